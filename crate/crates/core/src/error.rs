use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid {kind} `{text}`: tokens must be non-empty and free of whitespace, `;`, `{{`, `}}` and `#`")]
    InvalidToken { kind: &'static str, text: String },

    #[error("`{0}` is a reserved word and cannot name a variable")]
    ReservedName(String),

    #[error("variable `{0}` has an empty domain")]
    EmptyDomain(String),

    #[error("label `{label}` appears twice in the domain of `{variable}`")]
    DuplicateLabel { variable: String, label: String },

    #[error("variable `{0}` is declared twice")]
    DuplicateVariable(String),

    #[error("constraint scope is empty")]
    EmptyScope,

    #[error("variable `{0}` appears twice in a constraint scope")]
    DuplicateScopeVariable(String),

    #[error("tuple has {found} labels but the scope has {expected} variables")]
    ArityMismatch { expected: usize, found: usize },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("label `{label}` is not in the domain of `{variable}`")]
    LabelNotInDomain { variable: String, label: String },

    #[error("degree `{0}` is outside [0, 1]")]
    DegreeOutOfRange(String),

    #[error("malformed degree `{0}`")]
    InvalidDegree(String),

    #[error("labeling is not complete: `{missing}` is unassigned")]
    IncompleteLabeling { missing: String },

    #[error("constraint `{constraint}` has necessity {necessity}; classical consistency needs hard constraints only")]
    NotClassical { constraint: String, necessity: String },

    #[error("{size} complete labelings exceed the enumeration budget of {budget}")]
    BudgetExceeded { size: u128, budget: u128 },

    #[error("index {index} is out of range for {len} variables")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("constraint `{constraint}` has unassigned scope variable `{variable}`")]
    UnassignedScopeVariable { constraint: String, variable: String },

    #[error("variable `{variable}` is not in the scope of constraint `{constraint}`")]
    NotInScope { variable: String, constraint: String },

    #[error("constraint `{0}` is unary; arc revision needs a constraint of arity 2 or more")]
    UnaryConstraint(String),

    #[error("invalid variable order: {0}")]
    InvalidOrder(String),

    #[error("invalid search options: {0}")]
    InvalidOptions(String),

    #[error("unknown {kind} `{text}`")]
    UnknownTag { kind: &'static str, text: String },

    #[error("invalid generator spec: {0}")]
    InvalidGenerator(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
