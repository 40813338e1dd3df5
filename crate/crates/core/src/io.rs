//! The PCSP text format, built-in fixtures and a seeded random instance generator.
//!
//! The format is line oriented; `#` starts a comment:
//!
//! ```text
//! problem <name>
//! var <name> : <label> <label> ...
//! constraint <id> <necessity> on <var> <var> ... <allow|forbid> { <tuple> ; <tuple> ; ... }
//! ```
//!
//! A tuple lists scope-ordered labels separated by whitespace and `{}` is the
//! empty tuple set. Variables must be declared before constraints use them.

use std::collections::HashMap;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::degree::Degree;
use crate::error::{Error, Result};
use crate::model::{Constraint, DomainVariable, Label, Mode, Problem, ValuedConstraint};

/// Source text of the menu design fixture.
pub const MENU_PCSP: &str = include_str!("../data/menu.pcsp");

fn at(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Parse { .. } => e,
        other => Error::Parse {
            line,
            message: other.to_string(),
        },
    }
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses PCSP text, validating every problem invariant with line-numbered errors.
pub fn parse_problem(text: &str) -> Result<Problem> {
    let mut name: Option<String> = None;
    let mut variables: Vec<DomainVariable> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut constraints = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        last_line = line_no;
        let keyword = line.split_whitespace().next().expect("non-empty line");
        if name.is_none() {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if keyword != "problem" || tokens.len() != 2 {
                return Err(syntax(line_no, "expected `problem <name>` as the first declaration"));
            }
            name = Some(tokens[1].to_string());
            continue;
        }
        match keyword {
            "var" => {
                let tokens: Vec<&str> = line.split_whitespace().collect();
                if tokens.len() < 4 || tokens[2] != ":" {
                    return Err(syntax(line_no, "expected `var <name> : <label> ...`"));
                }
                let v = DomainVariable::new(tokens[1], &tokens[3..]).map_err(at(line_no))?;
                if index.insert(v.name().to_string(), variables.len()).is_some() {
                    return Err(syntax(line_no, format!("variable `{}` is declared twice", v.name())));
                }
                variables.push(v);
            }
            "constraint" => {
                let vc = parse_constraint(line, line_no, &variables, &index)?;
                constraints.push(vc);
            }
            "problem" => return Err(syntax(line_no, "duplicate `problem` declaration")),
            other => return Err(syntax(line_no, format!("unknown declaration `{other}`"))),
        }
    }
    let name = name.ok_or_else(|| syntax(last_line.max(1), "missing `problem <name>` declaration"))?;
    Problem::new(name, variables, constraints).map_err(at(last_line.max(1)))
}

fn parse_constraint(
    line: &str,
    line_no: usize,
    variables: &[DomainVariable],
    index: &HashMap<String, usize>,
) -> Result<ValuedConstraint> {
    let shape = "expected `constraint <id> <necessity> on <var> ... <allow|forbid> { ... }`";
    let (head, body) = line.split_once('{').ok_or_else(|| syntax(line_no, shape))?;
    let body = body
        .trim_end()
        .strip_suffix('}')
        .ok_or_else(|| syntax(line_no, "unterminated tuple set; expected `}` at end of line"))?;
    if body.contains('{') || body.contains('}') {
        return Err(syntax(line_no, "nested braces in tuple set"));
    }
    let tokens: Vec<&str> = head.split_whitespace().collect();
    if tokens.len() < 6 || tokens[3] != "on" {
        return Err(syntax(line_no, shape));
    }
    let id = tokens[1];
    let necessity: Degree = tokens[2].parse().map_err(at(line_no))?;
    let mode = match tokens[tokens.len() - 1] {
        "allow" => Mode::Allow,
        "forbid" => Mode::Forbid,
        other => return Err(syntax(line_no, format!("expected `allow` or `forbid`, found `{other}`"))),
    };
    let scope: Vec<String> = tokens[4..tokens.len() - 1].iter().map(|s| s.to_string()).collect();
    let mut scope_vars = Vec::with_capacity(scope.len());
    for v in &scope {
        let i = index
            .get(v)
            .ok_or_else(|| syntax(line_no, format!("unknown variable `{v}` in scope")))?;
        scope_vars.push(&variables[*i]);
    }
    let mut tuples = Vec::new();
    if !body.trim().is_empty() {
        for piece in body.split(';') {
            let labels: Vec<&str> = piece.split_whitespace().collect();
            if labels.is_empty() {
                return Err(syntax(line_no, "empty tuple"));
            }
            if labels.len() != scope.len() {
                return Err(syntax(
                    line_no,
                    format!("tuple `{}` has {} labels but the scope has {}", piece.trim(), labels.len(), scope.len()),
                ));
            }
            let mut tuple = Vec::with_capacity(labels.len());
            for (label, var) in labels.iter().zip(&scope_vars) {
                if var.position(label).is_none() {
                    return Err(syntax(
                        line_no,
                        format!("label `{label}` is not in the domain of `{}`", var.name()),
                    ));
                }
                tuple.push(Label::new(*label).map_err(at(line_no))?);
            }
            tuples.push(tuple);
        }
    }
    let k = Constraint::new(scope, tuples, mode).map_err(at(line_no))?;
    ValuedConstraint::new(id, k, necessity).map_err(at(line_no))
}

/// Canonical text: declaration order, one declaration per line, tuples in
/// lexicographic domain order.
pub fn write_problem(p: &Problem) -> String {
    let mut out = format!("problem {}\n", p.name());
    for v in p.variables() {
        out.push_str("var ");
        out.push_str(v.name());
        out.push_str(" :");
        for l in v.domain() {
            out.push(' ');
            out.push_str(l.as_str());
        }
        out.push('\n');
    }
    for vc in p.constraints() {
        let k = vc.constraint();
        let positions: Vec<&DomainVariable> = k
            .scope()
            .iter()
            .map(|v| p.variable(v).expect("validated scope"))
            .collect();
        let mut tuples: Vec<(Vec<usize>, &Vec<Label>)> = k
            .tuples()
            .iter()
            .map(|t| {
                let key = t
                    .iter()
                    .zip(&positions)
                    .map(|(l, v)| v.position(l.as_str()).expect("validated label"))
                    .collect();
                (key, t)
            })
            .collect();
        tuples.sort();
        let body = if tuples.is_empty() {
            "{}".to_string()
        } else {
            let parts: Vec<String> = tuples
                .iter()
                .map(|(_, t)| t.iter().map(Label::as_str).collect::<Vec<_>>().join(" "))
                .collect();
            format!("{{ {} }}", parts.join(" ; "))
        };
        out.push_str(&format!(
            "constraint {} {} on {} {} {}\n",
            vc.id(),
            vc.necessity(),
            k.scope().join(" "),
            k.mode().keyword(),
            body
        ));
    }
    out
}

/// The four-variable menu design problem (drink, entrance, dish, dessert)
/// with its fifteen valued constraints `a` to `o`.
pub fn builtin_menu() -> Problem {
    parse_problem(MENU_PCSP).expect("menu fixture is valid")
}

/// `n` queens on an `n × n` board with hard binary constraints: variable
/// `q<i>` is the column of the queen on row `i`.
pub fn builtin_queens(n: usize) -> Problem {
    let cols: Vec<String> = (1..=n).map(|c| c.to_string()).collect();
    let mut b = Problem::builder(format!("queens-{n}"));
    for row in 1..=n {
        b = b.variable(&format!("q{row}"), &cols);
    }
    for i in 1..=n {
        for j in i + 1..=n {
            let mut ok = Vec::new();
            for a in 1..=n {
                for c in 1..=n {
                    if a != c && a.abs_diff(c) != j - i {
                        ok.push([a.to_string(), c.to_string()]);
                    }
                }
            }
            b = b.allow(&format!("q{i}-q{j}"), Degree::ONE, [format!("q{i}"), format!("q{j}")], ok);
        }
    }
    b.build().expect("queens encoding is valid")
}

/// Parameters of [`random_problem`].
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub seed: u64,
    pub n_vars: usize,
    pub domain_size: usize,
    pub n_constraints: usize,
    pub max_arity: usize,
    /// Fraction of each scope's cross-product that is forbidden.
    pub tightness: f64,
    pub necessity_levels: Vec<Degree>,
}

impl GeneratorSpec {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidGenerator(m.to_string()));
        if self.n_vars == 0 || self.domain_size == 0 || self.max_arity == 0 {
            return bad("n_vars, domain_size and max_arity must be positive");
        }
        if self.max_arity > self.n_vars {
            return Err(Error::InvalidGenerator(format!(
                "max_arity {} exceeds n_vars {}",
                self.max_arity, self.n_vars
            )));
        }
        if !(0.0..=1.0).contains(&self.tightness) {
            return bad("tightness must lie in [0, 1]");
        }
        if self.necessity_levels.is_empty() || self.necessity_levels.iter().any(|d| d.is_zero()) {
            return bad("necessity levels must be a non-empty list of values in (0, 1]");
        }
        let largest = (self.domain_size as u128).checked_pow(self.max_arity as u32);
        if largest.is_none_or(|s| s > 1 << 24) {
            return bad("scope cross-products above 2^24 tuples are not supported");
        }
        Ok(())
    }
}

/// Deterministic random problem: variables `x0..`, labels `v0..`, constraints
/// `c0..` in forbid mode with `round(tightness × |cross-product|)` forbidden tuples.
pub fn random_problem(spec: &GeneratorSpec) -> Result<Problem> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let labels: Vec<String> = (0..spec.domain_size).map(|i| format!("v{i}")).collect();
    let variables = (0..spec.n_vars)
        .map(|i| DomainVariable::new(format!("x{i}"), &labels))
        .collect::<Result<Vec<_>>>()?;
    let mut constraints = Vec::with_capacity(spec.n_constraints);
    for c in 0..spec.n_constraints {
        let arity = rng.random_range(1..=spec.max_arity);
        let mut scope_idx = rand::seq::index::sample(&mut rng, spec.n_vars, arity).into_vec();
        scope_idx.sort_unstable();
        let size = spec.domain_size.pow(arity as u32);
        let forbidden = (spec.tightness * size as f64).round() as usize;
        let ranks = rand::seq::index::sample(&mut rng, size, forbidden.min(size));
        let tuples = ranks
            .iter()
            .map(|mut r| {
                let mut t = vec![labels[0].as_str(); arity];
                for slot in t.iter_mut().rev() {
                    *slot = &labels[r % spec.domain_size];
                    r /= spec.domain_size;
                }
                t
            })
            .collect::<Vec<_>>();
        let scope: Vec<String> = scope_idx.iter().map(|i| format!("x{i}")).collect();
        let necessity = *spec.necessity_levels.choose(&mut rng).expect("non-empty levels");
        let k = Constraint::forbid(scope, tuples)?;
        constraints.push(ValuedConstraint::new(format!("c{c}"), k, necessity)?);
    }
    Problem::new(format!("random-{}", spec.seed), variables, constraints)
}
