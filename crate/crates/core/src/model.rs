//! Problems, labelings and necessity-valued constraints.
//!
//! A [`Problem`] is a set of domain-variables plus a list of
//! [`ValuedConstraint`]s. Each valued constraint `(k, α)` requires the
//! satisfaction of `k` to be at least `α`-necessary. The greatest possibility
//! distribution compatible with all of them gives every complete labeling the
//! value
//!
//! ```text
//! π*(l) = min { 1 - α  |  (k, α) ∈ C,  l violates k }   (1 when nothing is violated)
//! ```
//!
//! which is what [`pi_star`] computes. [`partial_bound`] is the same infimum
//! restricted to constraints whose scope is fully assigned, an upper bound on
//! every completion of a partial labeling.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::degree::Degree;
use crate::error::{Error, Result};

fn check_token(kind: &'static str, text: &str) -> Result<()> {
    let bad = text.is_empty()
        || text
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, ';' | '{' | '}' | '#'));
    if bad {
        Err(Error::InvalidToken {
            kind,
            text: text.to_string(),
        })
    } else {
        Ok(())
    }
}

/// One element of a variable's domain.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    pub fn new(text: impl Into<String>) -> Result<Label> {
        let text = text.into();
        check_token("label", &text)?;
        Ok(Label(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for Label {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Label> {
        Label::new(s)
    }
}

fn labels_from<I, S>(labels: I) -> Result<Vec<Label>>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    labels.into_iter().map(|s| Label::new(s.as_ref())).collect()
}

/// A variable together with its finite, ordered domain.
///
/// The domain order is the default value-branching order of the search and
/// the enumeration order of the oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainVariable {
    name: String,
    domain: Vec<Label>,
}

impl DomainVariable {
    pub fn new<I, S>(name: impl Into<String>, labels: I) -> Result<DomainVariable>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self::from_labels(name, labels_from(labels)?)
    }

    pub fn from_labels(name: impl Into<String>, domain: Vec<Label>) -> Result<DomainVariable> {
        let name = name.into();
        check_token("variable name", &name)?;
        if matches!(name.as_str(), "allow" | "forbid") {
            return Err(Error::ReservedName(name));
        }
        if domain.is_empty() {
            return Err(Error::EmptyDomain(name));
        }
        let mut seen = HashSet::new();
        for label in &domain {
            if !seen.insert(label) {
                return Err(Error::DuplicateLabel {
                    variable: name,
                    label: label.to_string(),
                });
            }
        }
        Ok(DomainVariable { name, domain })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &[Label] {
        &self.domain
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.domain.iter().position(|l| l.as_str() == label)
    }
}

/// A partial or complete assignment of labels to variables, kept as a map.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Labeling(BTreeMap<String, Label>);

impl Labeling {
    pub fn new() -> Labeling {
        Labeling::default()
    }

    pub fn insert(&mut self, variable: impl Into<String>, label: Label) -> Option<Label> {
        self.0.insert(variable.into(), label)
    }

    pub fn with(mut self, variable: impl Into<String>, label: Label) -> Labeling {
        self.insert(variable, label);
        self
    }

    pub fn remove(&mut self, variable: &str) -> Option<Label> {
        self.0.remove(variable)
    }

    pub fn get(&self, variable: &str) -> Option<&Label> {
        self.0.get(variable)
    }

    pub fn assigns(&self, variable: &str) -> bool {
        self.0.contains_key(variable)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Pairs in variable-name order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &Label)> {
        self.0.iter().map(|(v, l)| (v.as_str(), l))
    }

    /// Labels of `scope` in scope order, or `None` if some variable is unassigned.
    pub fn restrict<S: AsRef<str>>(&self, scope: &[S]) -> Option<Vec<&Label>> {
        scope.iter().map(|v| self.0.get(v.as_ref())).collect()
    }

    /// `self` is more defined than `other`: `other`'s map is contained in
    /// `self`'s. Reflexive.
    pub fn more_defined(&self, other: &Labeling) -> bool {
        other.0.iter().all(|(v, l)| self.0.get(v) == Some(l))
    }
}

impl FromIterator<(String, Label)> for Labeling {
    fn from_iter<T: IntoIterator<Item = (String, Label)>>(iter: T) -> Self {
        Labeling(iter.into_iter().collect())
    }
}

impl FromStr for Labeling {
    type Err = Error;

    /// Parses `var=label` pairs separated by commas and/or whitespace.
    fn from_str(s: &str) -> Result<Labeling> {
        let mut labeling = Labeling::new();
        for pair in s.split(|c: char| c == ',' || c.is_whitespace()) {
            if pair.is_empty() {
                continue;
            }
            let (var, label) = pair.split_once('=').ok_or_else(|| Error::InvalidToken {
                kind: "assignment",
                text: pair.to_string(),
            })?;
            check_token("variable name", var)?;
            labeling.insert(var, Label::new(label)?);
        }
        Ok(labeling)
    }
}

impl fmt::Display for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, l) in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{v}={l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

/// `a` is more defined than `b`.
pub fn more_defined(a: &Labeling, b: &Labeling) -> bool {
    a.more_defined(b)
}

/// Whether the listed tuples are the allowed ones or the forbidden ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Allow,
    Forbid,
}

impl Mode {
    pub fn flipped(self) -> Mode {
        match self {
            Mode::Allow => Mode::Forbid,
            Mode::Forbid => Mode::Allow,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Mode::Allow => "allow",
            Mode::Forbid => "forbid",
        }
    }
}

/// An extensional constraint over an ordered scope.
///
/// With [`Mode::Allow`] the relation is the listed tuple set; with
/// [`Mode::Forbid`] it is the complement of that set within the cross-product
/// of the scope domains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    scope: Vec<String>,
    tuples: BTreeSet<Vec<Label>>,
    mode: Mode,
}

impl Constraint {
    pub fn new(
        scope: Vec<String>,
        tuples: impl IntoIterator<Item = Vec<Label>>,
        mode: Mode,
    ) -> Result<Constraint> {
        if scope.is_empty() {
            return Err(Error::EmptyScope);
        }
        let mut seen = HashSet::new();
        for v in &scope {
            check_token("variable name", v)?;
            if !seen.insert(v.as_str()) {
                return Err(Error::DuplicateScopeVariable(v.clone()));
            }
        }
        let mut set = BTreeSet::new();
        for t in tuples {
            if t.len() != scope.len() {
                return Err(Error::ArityMismatch {
                    expected: scope.len(),
                    found: t.len(),
                });
            }
            set.insert(t);
        }
        Ok(Constraint {
            scope,
            tuples: set,
            mode,
        })
    }

    fn from_strs<V, S, T, L>(scope: V, tuples: T, mode: Mode) -> Result<Constraint>
    where
        V: IntoIterator<Item = S>,
        S: AsRef<str>,
        T: IntoIterator,
        T::Item: IntoIterator<Item = L>,
        L: AsRef<str>,
    {
        let scope = scope.into_iter().map(|s| s.as_ref().to_string()).collect();
        let tuples = tuples
            .into_iter()
            .map(labels_from)
            .collect::<Result<Vec<_>>>()?;
        Constraint::new(scope, tuples, mode)
    }

    /// Constraint whose relation is exactly `tuples`.
    pub fn allow<V, S, T, L>(scope: V, tuples: T) -> Result<Constraint>
    where
        V: IntoIterator<Item = S>,
        S: AsRef<str>,
        T: IntoIterator,
        T::Item: IntoIterator<Item = L>,
        L: AsRef<str>,
    {
        Self::from_strs(scope, tuples, Mode::Allow)
    }

    /// Constraint whose relation is everything except `tuples`.
    pub fn forbid<V, S, T, L>(scope: V, tuples: T) -> Result<Constraint>
    where
        V: IntoIterator<Item = S>,
        S: AsRef<str>,
        T: IntoIterator,
        T::Item: IntoIterator<Item = L>,
        L: AsRef<str>,
    {
        Self::from_strs(scope, tuples, Mode::Forbid)
    }

    /// The always-satisfied relation on `scope`.
    pub fn full<V, S>(scope: V) -> Result<Constraint>
    where
        V: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self::forbid(scope, Vec::<Vec<&str>>::new())
    }

    /// The never-satisfied relation on `scope`.
    pub fn empty<V, S>(scope: V) -> Result<Constraint>
    where
        V: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self::allow(scope, Vec::<Vec<&str>>::new())
    }

    pub fn scope(&self) -> &[String] {
        &self.scope
    }

    pub fn arity(&self) -> usize {
        self.scope.len()
    }

    pub fn tuples(&self) -> &BTreeSet<Vec<Label>> {
        &self.tuples
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Membership of a scope-ordered tuple in the semantic relation.
    pub fn admits<L: Borrow<Label>>(&self, tuple: &[L]) -> bool {
        // BTreeSet<Vec<Label>> lookup wants a Vec<Label>; compare element-wise instead.
        let listed = self
            .tuples
            .iter()
            .any(|t| t.iter().zip(tuple).all(|(a, b)| a == b.borrow()));
        listed == (self.mode == Mode::Allow)
    }

    /// The semantic relation as an explicit tuple set, enumerated over the
    /// domains found in `variables`.
    pub fn relation(&self, variables: &[DomainVariable]) -> Result<BTreeSet<Vec<Label>>> {
        let domains = scope_domains(&self.scope, variables)?;
        let mut out = BTreeSet::new();
        for_each_tuple(&domains, |t| {
            if self.admits(t) {
                out.insert(t.iter().map(|l| (*l).clone()).collect());
            }
        });
        Ok(out)
    }
}

fn scope_domains<'a>(scope: &[String], variables: &'a [DomainVariable]) -> Result<Vec<&'a [Label]>> {
    scope
        .iter()
        .map(|name| {
            variables
                .iter()
                .find(|v| v.name() == name)
                .map(|v| v.domain())
                .ok_or_else(|| Error::UnknownVariable(name.clone()))
        })
        .collect()
}

/// Calls `f` on every tuple of the cross-product, first position most significant.
fn for_each_tuple(domains: &[&[Label]], mut f: impl FnMut(&[&Label])) {
    let mut counters = vec![0usize; domains.len()];
    let mut tuple: Vec<&Label> = domains.iter().map(|d| &d[0]).collect();
    loop {
        f(&tuple);
        let mut pos = domains.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            counters[pos] += 1;
            if counters[pos] < domains[pos].len() {
                tuple[pos] = &domains[pos][counters[pos]];
                break;
            }
            counters[pos] = 0;
            tuple[pos] = &domains[pos][0];
        }
    }
}

/// `l ⊨ k`: `l` assigns every scope variable and its restriction is in the relation.
pub fn satisfies(l: &Labeling, k: &Constraint) -> bool {
    match l.restrict(&k.scope) {
        Some(t) => k.admits(&t),
        None => false,
    }
}

/// The complement relation on the same scope.
pub fn negate(k: &Constraint) -> Constraint {
    Constraint {
        scope: k.scope.clone(),
        tuples: k.tuples.clone(),
        mode: k.mode.flipped(),
    }
}

fn combine(
    k1: &Constraint,
    k2: &Constraint,
    variables: &[DomainVariable],
    keep: impl Fn(bool, bool) -> bool,
) -> Result<Constraint> {
    let mut scope = k1.scope.clone();
    for v in &k2.scope {
        if !scope.contains(v) {
            scope.push(v.clone());
        }
    }
    let domains = scope_domains(&scope, variables)?;
    let pos1: Vec<usize> = (0..k1.arity()).collect();
    let pos2: Vec<usize> = k2
        .scope
        .iter()
        .map(|v| scope.iter().position(|s| s == v).expect("in union"))
        .collect();
    let mut tuples = Vec::new();
    for_each_tuple(&domains, |t| {
        let r1: Vec<&Label> = pos1.iter().map(|&i| t[i]).collect();
        let r2: Vec<&Label> = pos2.iter().map(|&i| t[i]).collect();
        if keep(k1.admits(&r1), k2.admits(&r2)) {
            tuples.push(t.iter().map(|&l| l.clone()).collect());
        }
    });
    Constraint::new(scope, tuples, Mode::Allow)
}

/// `k1 ∧ k2` over the union scope (left operand's variables first).
pub fn conjoin(k1: &Constraint, k2: &Constraint, variables: &[DomainVariable]) -> Result<Constraint> {
    combine(k1, k2, variables, |a, b| a && b)
}

/// `k1 ∨ k2` over the union scope (left operand's variables first).
pub fn disjoin(k1: &Constraint, k2: &Constraint, variables: &[DomainVariable]) -> Result<Constraint> {
    combine(k1, k2, variables, |a, b| a || b)
}

/// A constraint `k` with the necessity `α` its satisfaction must reach.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuedConstraint {
    id: String,
    constraint: Constraint,
    necessity: Degree,
}

impl ValuedConstraint {
    pub fn new(id: impl Into<String>, constraint: Constraint, necessity: Degree) -> Result<ValuedConstraint> {
        let id = id.into();
        check_token("constraint id", &id)?;
        Ok(ValuedConstraint {
            id,
            constraint,
            necessity,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn constraint(&self) -> &Constraint {
        &self.constraint
    }

    pub fn necessity(&self) -> Degree {
        self.necessity
    }

    /// `1 - α`: the possibility left to a labeling violating this constraint.
    pub fn penalty(&self) -> Degree {
        self.necessity.complement()
    }

    pub fn is_hard(&self) -> bool {
        self.necessity.is_one()
    }

    pub(crate) fn set_necessity(&mut self, necessity: Degree) {
        self.necessity = necessity;
    }
}

/// Constraint relation over label indices, for the search and propagation hot paths.
#[derive(Clone, Debug)]
pub(crate) enum Relation {
    /// Semantic membership per mixed-radix tuple rank.
    Dense(Vec<bool>),
    /// Listed tuple ranks plus the mode.
    Sparse { listed: HashSet<u128>, allow: bool },
}

#[derive(Clone, Debug)]
pub(crate) struct Compiled {
    pub scope: Vec<usize>,
    strides: Vec<u128>,
    relation: Relation,
    pub penalty: Degree,
}

const DENSE_LIMIT: u128 = 1 << 16;

impl Compiled {
    fn rank(&self, value: impl Fn(usize) -> usize) -> u128 {
        self.scope
            .iter()
            .zip(&self.strides)
            .map(|(&v, &s)| value(v) as u128 * s)
            .sum()
    }

    fn admits_rank(&self, rank: u128) -> bool {
        match &self.relation {
            Relation::Dense(bits) => bits[rank as usize],
            Relation::Sparse { listed, allow } => listed.contains(&rank) == *allow,
        }
    }

    /// Relation membership when every scope variable is given by `value`.
    pub fn holds_with(&self, value: impl Fn(usize) -> usize) -> bool {
        self.admits_rank(self.rank(value))
    }

    /// `None` when some scope variable is unassigned.
    pub fn holds_partial(&self, assignment: &[Option<usize>]) -> Option<bool> {
        if self.scope.iter().any(|&v| assignment[v].is_none()) {
            return None;
        }
        Some(self.holds_with(|v| assignment[v].expect("checked")))
    }

    pub fn is_unary(&self) -> bool {
        self.scope.len() == 1
    }
}

/// A possibilistic CSP: domain-variables and necessity-valued constraints.
///
/// Immutable once built; construction validates every invariant (unique
/// variable names, known scope variables, in-domain tuple labels).
#[derive(Clone, Debug)]
pub struct Problem {
    name: String,
    variables: Vec<DomainVariable>,
    constraints: Vec<ValuedConstraint>,
    index: HashMap<String, usize>,
    label_index: Vec<HashMap<Label, usize>>,
    compiled: Vec<Compiled>,
}

impl PartialEq for Problem {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.variables == other.variables
            && self.constraints == other.constraints
    }
}

impl Eq for Problem {}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        variables: Vec<DomainVariable>,
        constraints: Vec<ValuedConstraint>,
    ) -> Result<Problem> {
        let name = name.into();
        check_token("problem name", &name)?;
        let mut index = HashMap::new();
        for (i, v) in variables.iter().enumerate() {
            if index.insert(v.name.clone(), i).is_some() {
                return Err(Error::DuplicateVariable(v.name.clone()));
            }
        }
        let label_index = variables
            .iter()
            .map(|v| {
                v.domain
                    .iter()
                    .enumerate()
                    .map(|(i, l)| (l.clone(), i))
                    .collect()
            })
            .collect();
        let mut problem = Problem {
            name,
            variables,
            constraints: Vec::with_capacity(constraints.len()),
            index,
            label_index,
            compiled: Vec::with_capacity(constraints.len()),
        };
        for c in constraints {
            problem.push_constraint(c)?;
        }
        Ok(problem)
    }

    pub fn builder(name: impl Into<String>) -> ProblemBuilder {
        ProblemBuilder {
            name: name.into(),
            variables: Vec::new(),
            constraints: Vec::new(),
            error: None,
        }
    }

    pub(crate) fn compile(&self, vc: &ValuedConstraint) -> Result<Compiled> {
        let k = &vc.constraint;
        let scope = k
            .scope
            .iter()
            .map(|v| self.var_index(v).ok_or_else(|| Error::UnknownVariable(v.clone())))
            .collect::<Result<Vec<_>>>()?;
        let mut strides = vec![0u128; scope.len()];
        let mut size: u128 = 1;
        for (pos, &v) in scope.iter().enumerate().rev() {
            strides[pos] = size;
            size = size.saturating_mul(self.variables[v].domain.len() as u128);
        }
        let mut listed = HashSet::with_capacity(k.tuples.len());
        for t in &k.tuples {
            let mut rank = 0u128;
            for (pos, label) in t.iter().enumerate() {
                let var = scope[pos];
                let li = *self.label_index[var].get(label).ok_or_else(|| Error::LabelNotInDomain {
                    variable: self.variables[var].name.clone(),
                    label: label.to_string(),
                })?;
                rank += li as u128 * strides[pos];
            }
            listed.insert(rank);
        }
        let allow = k.mode == Mode::Allow;
        let relation = if size <= DENSE_LIMIT {
            let mut bits = vec![!allow; size as usize];
            for r in listed {
                bits[r as usize] = allow;
            }
            Relation::Dense(bits)
        } else {
            Relation::Sparse { listed, allow }
        };
        Ok(Compiled {
            scope,
            strides,
            relation,
            penalty: vc.penalty(),
        })
    }

    fn push_constraint(&mut self, vc: ValuedConstraint) -> Result<()> {
        let compiled = self.compile(&vc)?;
        self.constraints.push(vc);
        self.compiled.push(compiled);
        Ok(())
    }

    /// A copy of this problem with one more constraint.
    pub fn with_constraint(&self, vc: ValuedConstraint) -> Result<Problem> {
        let mut p = self.clone();
        p.push_constraint(vc)?;
        Ok(p)
    }

    pub(crate) fn set_necessity(&mut self, constraint: usize, necessity: Degree) {
        self.constraints[constraint].set_necessity(necessity);
        self.compiled[constraint].penalty = necessity.complement();
    }

    pub(crate) fn push_valid(&mut self, vc: ValuedConstraint) {
        self.push_constraint(vc).expect("constraint built from this problem's own vocabulary");
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn variables(&self) -> &[DomainVariable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[ValuedConstraint] {
        &self.constraints
    }

    pub fn variable(&self, name: &str) -> Option<&DomainVariable> {
        self.var_index(name).map(|i| &self.variables[i])
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub(crate) fn label_pos(&self, var: usize, label: &str) -> Option<usize> {
        self.label_index[var].get(label).copied()
    }

    pub(crate) fn compiled(&self) -> &[Compiled] {
        &self.compiled
    }

    pub fn max_arity(&self) -> usize {
        self.constraints.iter().map(|c| c.constraint.arity()).max().unwrap_or(0)
    }

    /// Number of complete labelings, saturating at `u128::MAX`.
    pub fn labeling_count(&self) -> u128 {
        self.variables
            .iter()
            .fold(1u128, |acc, v| acc.saturating_mul(v.domain.len() as u128))
    }

    /// Label indices per variable (declared order), validating every pair.
    pub fn values_of(&self, l: &Labeling) -> Result<Vec<Option<usize>>> {
        let mut values = vec![None; self.variables.len()];
        for (var, label) in l.iter() {
            let i = self.var_index(var).ok_or_else(|| Error::UnknownVariable(var.to_string()))?;
            let li = self.label_pos(i, label.as_str()).ok_or_else(|| Error::LabelNotInDomain {
                variable: var.to_string(),
                label: label.to_string(),
            })?;
            values[i] = Some(li);
        }
        Ok(values)
    }

    pub(crate) fn labeling_of(&self, values: &[Option<usize>]) -> Labeling {
        values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| {
                v.map(|li| (self.variables[i].name.clone(), self.variables[i].domain[li].clone()))
            })
            .collect()
    }

    pub(crate) fn complete_labeling_of(&self, values: &[usize]) -> Labeling {
        values
            .iter()
            .enumerate()
            .map(|(i, &li)| (self.variables[i].name.clone(), self.variables[i].domain[li].clone()))
            .collect()
    }

    /// All complete labelings, lexicographic over (declared variable order,
    /// declared domain order).
    pub fn complete_labelings(&self) -> impl Iterator<Item = Labeling> + '_ {
        Odometer::new(self.variables.iter().map(|v| v.domain.len()).collect())
            .map(move |values| self.complete_labeling_of(&values))
    }

    /// `var=label` pairs in declared variable order.
    pub fn format_labeling(&self, l: &Labeling) -> String {
        self.variables
            .iter()
            .filter_map(|v| l.get(&v.name).map(|label| format!("{}={}", v.name, label)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Mixed-radix counter over label indices, last position fastest.
#[derive(Clone, Debug)]
pub(crate) struct Odometer {
    radices: Vec<usize>,
    current: Option<Vec<usize>>,
}

impl Odometer {
    pub fn new(radices: Vec<usize>) -> Odometer {
        let current = if radices.contains(&0) {
            None
        } else {
            Some(vec![0; radices.len()])
        };
        Odometer { radices, current }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().expect("present");
        let mut pos = cur.len();
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < self.radices[pos] {
                break;
            }
            cur[pos] = 0;
        }
        Some(out)
    }
}

/// Fluent construction of a [`Problem`]; the first error is reported by [`build`](Self::build).
#[derive(Debug)]
pub struct ProblemBuilder {
    name: String,
    variables: Vec<DomainVariable>,
    constraints: Vec<ValuedConstraint>,
    error: Option<Error>,
}

impl ProblemBuilder {
    fn record<T>(&mut self, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.error.get_or_insert(e);
                None
            }
        }
    }

    pub fn variable<I, S>(mut self, name: &str, labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        if let Some(v) = self.record(DomainVariable::new(name, labels)) {
            self.variables.push(v);
        }
        self
    }

    pub fn constraint(mut self, id: &str, necessity: Degree, constraint: Result<Constraint>) -> Self {
        let vc = constraint.and_then(|k| ValuedConstraint::new(id, k, necessity));
        if let Some(vc) = self.record(vc) {
            self.constraints.push(vc);
        }
        self
    }

    pub fn allow<V, S, T, L>(self, id: &str, necessity: Degree, scope: V, tuples: T) -> Self
    where
        V: IntoIterator<Item = S>,
        S: AsRef<str>,
        T: IntoIterator,
        T::Item: IntoIterator<Item = L>,
        L: AsRef<str>,
    {
        self.constraint(id, necessity, Constraint::allow(scope, tuples))
    }

    pub fn forbid<V, S, T, L>(self, id: &str, necessity: Degree, scope: V, tuples: T) -> Self
    where
        V: IntoIterator<Item = S>,
        S: AsRef<str>,
        T: IntoIterator,
        T::Item: IntoIterator<Item = L>,
        L: AsRef<str>,
    {
        self.constraint(id, necessity, Constraint::forbid(scope, tuples))
    }

    pub fn build(self) -> Result<Problem> {
        if let Some(e) = self.error {
            return Err(e);
        }
        Problem::new(self.name, self.variables, self.constraints)
    }
}

fn violates(l: &Labeling, k: &Constraint) -> bool {
    match l.restrict(&k.scope) {
        Some(t) => !k.admits(&t),
        None => false,
    }
}

/// `π*(l)`: the least `1 - α` over the constraints `l` violates, 1 if none.
///
/// Fails unless `l` is a complete labeling of `p` with in-domain labels.
pub fn pi_star(p: &Problem, l: &Labeling) -> Result<Degree> {
    let values = p.values_of(l)?;
    if let Some(i) = values.iter().position(Option::is_none) {
        return Err(Error::IncompleteLabeling {
            missing: p.variables[i].name.clone(),
        });
    }
    Ok(partial_bound(p, l))
}

/// Upper bound on the compatibility of any completion of `l`: the least
/// `1 - α` over violated constraints whose scope `l` fully assigns.
pub fn partial_bound(p: &Problem, l: &Labeling) -> Degree {
    p.constraints
        .iter()
        .filter(|vc| violates(l, &vc.constraint))
        .map(ValuedConstraint::penalty)
        .fold(Degree::ONE, Degree::min)
}

/// Classical consistency of a partial labeling: every constraint whose scope
/// it covers is satisfied. Only defined for problems whose constraints are all hard.
pub fn classical_consistent(p: &Problem, l: &Labeling) -> Result<bool> {
    if let Some(vc) = p.constraints.iter().find(|vc| !vc.is_hard()) {
        return Err(Error::NotClassical {
            constraint: vc.id.clone(),
            necessity: vc.necessity.to_string(),
        });
    }
    Ok(!p.constraints.iter().any(|vc| violates(l, &vc.constraint)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::deg;

    fn lab(s: &str) -> Labeling {
        s.parse().unwrap()
    }

    fn xyz() -> Vec<DomainVariable> {
        vec![
            DomainVariable::new("x", ["a", "b", "c"]).unwrap(),
            DomainVariable::new("y", ["a", "b", "c"]).unwrap(),
            DomainVariable::new("z", ["a", "b"]).unwrap(),
        ]
    }

    #[test]
    fn tokens() {
        assert!(Label::new("white-wine").is_ok());
        for bad in ["", "a b", "a;b", "{", "}", "#x", "tab\t"] {
            assert!(Label::new(bad).is_err(), "{bad:?}");
        }
        assert!(matches!(DomainVariable::new("forbid", ["a"]), Err(Error::ReservedName(_))));
        assert!(matches!(
            DomainVariable::new("x", Vec::<&str>::new()),
            Err(Error::EmptyDomain(_))
        ));
        assert!(matches!(
            DomainVariable::new("x", ["a", "a"]),
            Err(Error::DuplicateLabel { .. })
        ));
    }

    #[test]
    fn more_defined_cases() {
        assert!(more_defined(&lab("x=1 y=2"), &lab("x=1")));
        assert!(more_defined(&lab("x=1"), &lab("x=1")));
        assert!(!more_defined(&lab("x=1"), &lab("x=2")));
        assert!(!more_defined(&lab("x=1"), &lab("x=1 y=2")));
        assert!(more_defined(&lab("x=1"), &Labeling::new()));
    }

    #[test]
    fn labeling_text() {
        let l = lab("dish=fish, drink=white-wine");
        assert_eq!(l.len(), 2);
        assert_eq!(l.to_string(), "dish=fish drink=white-wine");
        assert!("dish".parse::<Labeling>().is_err());
    }

    #[test]
    fn constraint_validation() {
        assert!(matches!(Constraint::full(Vec::<&str>::new()), Err(Error::EmptyScope)));
        assert!(matches!(
            Constraint::full(["x", "x"]),
            Err(Error::DuplicateScopeVariable(_))
        ));
        assert!(matches!(
            Constraint::allow(["x", "y"], [["a"]]),
            Err(Error::ArityMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn satisfies_needs_full_scope() {
        let k = Constraint::full(["dish", "drink"]).unwrap();
        assert!(!satisfies(&lab("dish=fish"), &k));
        assert!(satisfies(&lab("dish=fish drink=beer"), &k));
        let neq = Constraint::forbid(["x", "y"], [["a", "a"]]).unwrap();
        assert!(!satisfies(&lab("x=a y=a"), &neq));
        assert!(satisfies(&lab("x=a y=b z=a"), &neq));
    }

    #[test]
    fn negation() {
        let vars = xyz();
        let full = Constraint::full(["x", "y"]).unwrap();
        assert!(negate(&full).relation(&vars).unwrap().is_empty());
        let k = Constraint::allow(["x", "y"], [["a", "b"], ["c", "c"]]).unwrap();
        assert_eq!(negate(&negate(&k)).relation(&vars).unwrap(), k.relation(&vars).unwrap());
        // exactly one of k, ¬k holds on each of the 9 tuples
        let nk = negate(&k);
        let mut count = 0;
        for x in ["a", "b", "c"] {
            for y in ["a", "b", "c"] {
                let l = lab(&format!("x={x} y={y}"));
                assert!(satisfies(&l, &k) ^ satisfies(&l, &nk));
                count += 1;
            }
        }
        assert_eq!(count, 9);
    }

    #[test]
    fn conjoin_identity_and_excluded_middle() {
        let vars = xyz();
        let k = Constraint::forbid(["x", "y"], [["a", "a"], ["b", "c"]]).unwrap();
        let full = Constraint::full(["x", "y"]).unwrap();
        assert_eq!(
            conjoin(&k, &full, &vars).unwrap().relation(&vars).unwrap(),
            k.relation(&vars).unwrap()
        );
        assert_eq!(
            disjoin(&k, &negate(&k), &vars).unwrap().relation(&vars).unwrap(),
            full.relation(&vars).unwrap()
        );
    }

    #[test]
    fn conjoin_overlapping_scopes_matches_brute_force() {
        let vars = xyz();
        let k1 = Constraint::forbid(["x", "y"], [["a", "a"], ["b", "b"], ["c", "c"]]).unwrap();
        let k2 = Constraint::allow(["y", "z"], [["a", "a"], ["b", "b"], ["c", "a"]]).unwrap();
        let both = conjoin(&k1, &k2, &vars).unwrap();
        assert_eq!(both.scope(), ["x", "y", "z"]);
        let either = disjoin(&k1, &k2, &vars).unwrap();
        let mut expect_and = BTreeSet::new();
        let mut expect_or = BTreeSet::new();
        for x in ["a", "b", "c"] {
            for y in ["a", "b", "c"] {
                for z in ["a", "b"] {
                    let ok1 = x != y;
                    let ok2 = matches!((y, z), ("a", "a") | ("b", "b") | ("c", "a"));
                    let t: Vec<Label> = [x, y, z].iter().map(|s| Label::new(*s).unwrap()).collect();
                    if ok1 && ok2 {
                        expect_and.insert(t.clone());
                    }
                    if ok1 || ok2 {
                        expect_or.insert(t);
                    }
                }
            }
        }
        assert_eq!(both.relation(&vars).unwrap(), expect_and);
        assert_eq!(either.relation(&vars).unwrap(), expect_or);
    }

    #[test]
    fn conjoin_unknown_variable() {
        let k = Constraint::full(["w"]).unwrap();
        assert!(matches!(conjoin(&k, &k, &xyz()), Err(Error::UnknownVariable(_))));
    }

    fn neq_problem(necessity: &str) -> Problem {
        Problem::builder("neq")
            .variable("x", ["a", "b"])
            .variable("y", ["a", "b"])
            .forbid("ne", deg(necessity), ["x", "y"], [["a", "a"], ["b", "b"]])
            .build()
            .unwrap()
    }

    #[test]
    fn problem_validation() {
        let dup = Problem::builder("p").variable("x", ["a"]).variable("x", ["b"]).build();
        assert!(matches!(dup, Err(Error::DuplicateVariable(_))));
        let unknown = Problem::builder("p")
            .variable("x", ["a"])
            .forbid("c", Degree::ONE, ["x", "y"], Vec::<Vec<&str>>::new())
            .build();
        assert!(matches!(unknown, Err(Error::UnknownVariable(_))));
        let bad_label = Problem::builder("p")
            .variable("x", ["a"])
            .allow("c", Degree::ONE, ["x"], [["q"]])
            .build();
        assert!(matches!(bad_label, Err(Error::LabelNotInDomain { .. })));
    }

    #[test]
    fn pi_star_and_bounds() {
        let p = neq_problem("0.7");
        assert_eq!(pi_star(&p, &lab("x=a y=a")).unwrap(), deg("0.3"));
        assert_eq!(pi_star(&p, &lab("x=a y=b")).unwrap(), Degree::ONE);
        assert!(matches!(
            pi_star(&p, &lab("x=a")),
            Err(Error::IncompleteLabeling { .. })
        ));
        assert!(matches!(pi_star(&p, &lab("x=a y=q")), Err(Error::LabelNotInDomain { .. })));
        assert_eq!(partial_bound(&p, &Labeling::new()), Degree::ONE);
        assert_eq!(partial_bound(&p, &lab("x=a")), Degree::ONE);
        assert_eq!(partial_bound(&p, &lab("x=b y=b")), deg("0.3"));

        let empty = Problem::builder("e").variable("x", ["a", "b"]).build().unwrap();
        for l in empty.complete_labelings() {
            assert_eq!(pi_star(&empty, &l).unwrap(), Degree::ONE);
        }
    }

    #[test]
    fn classical_view() {
        let hard = neq_problem("1");
        assert!(classical_consistent(&hard, &Labeling::new()).unwrap());
        assert!(!classical_consistent(&hard, &lab("x=a y=a")).unwrap());
        assert!(classical_consistent(&hard, &lab("x=a y=b")).unwrap());
        assert!(matches!(
            classical_consistent(&neq_problem("0.5"), &Labeling::new()),
            Err(Error::NotClassical { .. })
        ));
    }

    #[test]
    fn enumeration_order() {
        let p = Problem::builder("p")
            .variable("x", ["b", "a"])
            .variable("y", ["1", "2", "3"])
            .build()
            .unwrap();
        let all: Vec<String> = p.complete_labelings().map(|l| p.format_labeling(&l)).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], "x=b y=1");
        assert_eq!(all[1], "x=b y=2");
        assert_eq!(all[5], "x=a y=3");
    }

    #[test]
    fn sparse_relation_path() {
        // 300^2 = 90_000 tuples exceeds the dense limit
        let labels: Vec<String> = (0..300).map(|i| format!("v{i}")).collect();
        let p = Problem::builder("big")
            .variable("x", &labels)
            .variable("y", &labels)
            .forbid("c", deg("0.5"), ["x", "y"], [["v3", "v299"]])
            .build()
            .unwrap();
        assert!(matches!(p.compiled()[0].relation, Relation::Sparse { .. }));
        assert_eq!(pi_star(&p, &lab("x=v3 y=v299")).unwrap(), deg("0.5"));
        let values = p.values_of(&lab("x=v3 y=v299")).unwrap();
        assert_eq!(p.compiled()[0].holds_partial(&values), Some(false));
        let values = p.values_of(&lab("x=v3 y=v298")).unwrap();
        assert_eq!(p.compiled()[0].holds_partial(&values), Some(true));
    }
}
