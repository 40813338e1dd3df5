//! Possibilistic arc-consistency.
//!
//! Classical arc revision deletes a label that has no support in some
//! constraint. Here a label may keep partial support, so revision instead
//! computes the best compatibility `b` the label can reach against one
//! constraint and the unary constraints on that constraint's scope, and
//! records it as a unary constraint forbidding the label with necessity
//! `1 - b`. Labels are never removed; a necessity-1 forbid plays that role.
//!
//! [`enforce_ac`] repeats revision over every (variable, constraint) pair in
//! full passes until no pass strengthens any label's forbidding necessity.
//! The closed problem has the same `π*` as the input.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::degree::Degree;
use crate::error::{Error, Result};
use crate::model::{Compiled, Constraint, Label, Labeling, Odometer, Problem, ValuedConstraint};

/// A label forbidden with some necessity, as produced by revision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnaryInference {
    pub variable: String,
    #[serde(serialize_with = "label_str")]
    pub label: Label,
    pub necessity: Degree,
}

fn label_str<S: serde::Serializer>(l: &Label, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(l.as_str())
}

impl UnaryInference {
    /// The equivalent valued constraint: scope `{variable}`, forbid `{label}`.
    pub fn to_constraint(&self, id: impl Into<String>) -> Result<ValuedConstraint> {
        let k = Constraint::forbid([&self.variable], [[self.label.as_str()]])?;
        ValuedConstraint::new(id, k, self.necessity)
    }
}

#[derive(Clone, Debug)]
pub struct AcResult {
    /// The input plus added or strengthened unary forbid constraints.
    pub closed_problem: Problem,
    /// Least, over variables, of the best unary compatibility among its labels.
    /// An upper bound on the consistency degree.
    pub delta: Degree,
    /// Net inference per label (the final forbidding necessity contributed by
    /// propagation), in declared variable then domain order.
    pub inferences: Vec<UnaryInference>,
    /// Full passes performed, including the final one that changed nothing.
    pub rounds: usize,
    /// False when some variable has every label at compatibility 0.
    pub arc_consistent: bool,
}

/// Per variable and label, the least `1 - α` over violated unary constraints.
fn unary_table(p: &Problem) -> Vec<Vec<Degree>> {
    let mut table: Vec<Vec<Degree>> = p
        .variables()
        .iter()
        .map(|v| vec![Degree::ONE; v.domain().len()])
        .collect();
    for c in p.compiled().iter().filter(|c| c.is_unary()) {
        let var = c.scope[0];
        for (label, slot) in table[var].iter_mut().enumerate() {
            if !c.holds_with(|_| label) {
                *slot = (*slot).min(c.penalty);
            }
        }
    }
    table
}

/// Best value over the scope tuples that put `label` at scope position `pos`.
fn revise_bound(p: &Problem, unary: &[Vec<Degree>], c: &Compiled, pos: usize, label: usize) -> Degree {
    let radices: Vec<usize> = c
        .scope
        .iter()
        .enumerate()
        .map(|(i, &v)| if i == pos { 1 } else { p.variables()[v].domain().len() })
        .collect();
    let mut best = Degree::ZERO;
    for mut tuple in Odometer::new(radices) {
        tuple[pos] = label;
        let mut value = c
            .scope
            .iter()
            .zip(&tuple)
            .map(|(&v, &l)| unary[v][l])
            .fold(Degree::ONE, Degree::min);
        if value <= best {
            continue;
        }
        if !c.holds_with(|v| tuple[c.scope.iter().position(|&s| s == v).expect("in scope")]) {
            value = value.min(c.penalty);
        }
        best = best.max(value);
        if best.is_one() {
            break;
        }
    }
    best
}

fn locate(p: &Problem, variable: &str, label: &str, k: &ValuedConstraint) -> Result<(usize, usize, usize)> {
    if k.constraint().arity() < 2 {
        return Err(Error::UnaryConstraint(k.id().to_string()));
    }
    let pos = k
        .constraint()
        .scope()
        .iter()
        .position(|v| v == variable)
        .ok_or_else(|| Error::NotInScope {
            variable: variable.to_string(),
            constraint: k.id().to_string(),
        })?;
    let var = p
        .var_index(variable)
        .ok_or_else(|| Error::UnknownVariable(variable.to_string()))?;
    let li = p.variables()[var].position(label).ok_or_else(|| Error::LabelNotInDomain {
        variable: variable.to_string(),
        label: label.to_string(),
    })?;
    Ok((pos, var, li))
}

/// `b({(j, v)}, k)`: the best compatibility of `variable = label` in the
/// sub-problem made of `k` and every unary constraint of `p` on `k`'s scope.
pub fn bound_b(p: &Problem, variable: &str, label: &str, k: &ValuedConstraint) -> Result<Degree> {
    let (pos, _, li) = locate(p, variable, label, k)?;
    let c = p.compile(k)?;
    Ok(revise_bound(p, &unary_table(p), &c, pos, li))
}

/// One revision of `variable` against `k`: an inference `(variable, v, 1 - b)`
/// for every label whose bound `b` is below its current unary compatibility.
pub fn revise(p: &Problem, variable: &str, k: &ValuedConstraint) -> Result<Vec<UnaryInference>> {
    let first = p
        .variable(variable)
        .ok_or_else(|| Error::UnknownVariable(variable.to_string()))?
        .domain()[0]
        .clone();
    let (pos, var, _) = locate(p, variable, first.as_str(), k)?;
    let c = p.compile(k)?;
    let unary = unary_table(p);
    let domain = p.variables()[var].domain();
    Ok((0..domain.len())
        .filter_map(|li| {
            let b = revise_bound(p, &unary, &c, pos, li);
            (b < unary[var][li]).then(|| UnaryInference {
                variable: variable.to_string(),
                label: domain[li].clone(),
                necessity: b.complement(),
            })
        })
        .collect())
}

/// Runs revision to a fixpoint, installing only inferences whose necessity
/// is at least `gamma` (`gamma = 0`: full possibilistic arc-consistency;
/// `gamma = 1`: classical label suppression).
pub fn enforce_ac(p: &Problem, gamma: Degree) -> Result<AcResult> {
    let mut work = p.clone();
    let mut unary = unary_table(&work);

    // existing single-label unary forbids absorb inferences on their label
    let mut forbid_at: HashMap<(usize, usize), usize> = HashMap::new();
    for (ci, vc) in work.constraints().iter().enumerate() {
        let k = vc.constraint();
        if k.arity() == 1 && k.mode() == crate::model::Mode::Forbid && k.tuples().len() == 1 {
            let var = work.var_index(&k.scope()[0]).expect("validated");
            let label = k.tuples().iter().next().expect("one tuple")[0].as_str();
            let li = work.label_pos(var, label).expect("validated");
            forbid_at.entry((var, li)).or_insert(ci);
        }
    }
    let mut ids: HashSet<String> = work.constraints().iter().map(|c| c.id().to_string()).collect();
    let non_unary: Vec<usize> = (0..work.compiled().len())
        .filter(|&ci| !work.compiled()[ci].is_unary())
        .collect();

    let mut inferred: BTreeMap<(usize, usize), Degree> = BTreeMap::new();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut changed = false;
        for &ci in &non_unary {
            let arity = work.compiled()[ci].scope.len();
            for pos in 0..arity {
                let var = work.compiled()[ci].scope[pos];
                for li in 0..work.variables()[var].domain().len() {
                    let b = revise_bound(&work, &unary, &work.compiled()[ci], pos, li);
                    if b >= unary[var][li] {
                        continue;
                    }
                    let necessity = b.complement();
                    if necessity < gamma {
                        continue;
                    }
                    match forbid_at.get(&(var, li)) {
                        Some(&existing) => work.set_necessity(existing, necessity),
                        None => {
                            let v = &work.variables()[var];
                            let inference = UnaryInference {
                                variable: v.name().to_string(),
                                label: v.domain()[li].clone(),
                                necessity,
                            };
                            let id = fresh_id(&mut ids, &inference);
                            let vc = inference.to_constraint(id)?;
                            forbid_at.insert((var, li), work.constraints().len());
                            work.push_valid(vc);
                        }
                    }
                    unary[var][li] = b;
                    inferred.insert((var, li), necessity);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let delta = unary
        .iter()
        .map(|labels| labels.iter().copied().fold(Degree::ZERO, Degree::max))
        .fold(Degree::ONE, Degree::min);
    let inferences = inferred
        .into_iter()
        .map(|((var, li), necessity)| {
            let v = &work.variables()[var];
            UnaryInference {
                variable: v.name().to_string(),
                label: v.domain()[li].clone(),
                necessity,
            }
        })
        .collect();
    Ok(AcResult {
        closed_problem: work,
        delta,
        inferences,
        rounds,
        arc_consistent: !delta.is_zero(),
    })
}

fn fresh_id(ids: &mut HashSet<String>, inference: &UnaryInference) -> String {
    let base = format!("ac-{}-{}", inference.variable, inference.label);
    let mut id = base.clone();
    let mut n = 2;
    while ids.contains(&id) {
        id = format!("{base}-{n}");
        n += 1;
    }
    ids.insert(id.clone());
    id
}

/// Bound for `var = label` against the constraints on `var` whose other
/// scope variables are all assigned.
pub(crate) fn label_bound(
    p: &Problem,
    incident: &[usize],
    assignment: &[Option<usize>],
    var: usize,
    label: usize,
) -> Degree {
    let mut bound = Degree::ONE;
    for &ci in incident {
        let c = &p.compiled()[ci];
        if c.scope.iter().any(|&s| s != var && assignment[s].is_none()) {
            continue;
        }
        if c.penalty < bound && !c.holds_with(|s| if s == var { label } else { assignment[s].expect("checked") }) {
            bound = c.penalty;
        }
    }
    bound
}

/// Per-label bounds for future variables, keyed by variable name, labels in domain order.
pub type LabelBounds = BTreeMap<String, Vec<(Label, Degree)>>;

/// Forward checking: for each variable in `unassigned` and each of its
/// labels, the least `1 - α` over constraints on that variable made fully
/// assigned by `partial` plus the label. A 0 entry marks a dead label.
pub fn forward_check<S: AsRef<str>>(p: &Problem, partial: &Labeling, unassigned: &[S]) -> Result<LabelBounds> {
    let assignment = p.values_of(partial)?;
    let mut out = LabelBounds::new();
    for name in unassigned {
        let name = name.as_ref();
        let var = p
            .var_index(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        let incident: Vec<usize> = p
            .compiled()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.scope.contains(&var))
            .map(|(ci, _)| ci)
            .collect();
        let domain = p.variables()[var].domain();
        let bounds = (0..domain.len())
            .map(|li| (domain[li].clone(), label_bound(p, &incident, &assignment, var, li)))
            .collect();
        out.insert(name.to_string(), bounds);
    }
    Ok(out)
}
