//! Reference semantics by exhaustive enumeration.
//!
//! Everything here walks the full set of complete labelings and evaluates the
//! defining formulas literally through [`crate::model`]'s labeling-level
//! operations. It is meant for desk-scale problems and serves as ground truth
//! for the search and propagation modules.

use crate::degree::Degree;
use crate::error::{Error, Result};
use crate::model::{negate, pi_star, satisfies, Constraint, DomainVariable, Labeling, Problem};

/// Default cap on the number of complete labelings an oracle call may visit.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

fn check_budget(p: &Problem, budget: u128) -> Result<()> {
    let size = p.labeling_count();
    if size > budget {
        return Err(Error::BudgetExceeded { size, budget });
    }
    Ok(())
}

/// The consistency degree and every labeling reaching it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestSet {
    pub consistency: Degree,
    /// Lexicographic over (declared variable order, declared domain order).
    pub labelings: Vec<Labeling>,
}

impl BestSet {
    pub fn inconsistency(&self) -> Degree {
        self.consistency.complement()
    }
}

/// Generate and test: evaluates `π*` on every complete labeling and keeps the maxima.
pub fn enumerate_best(p: &Problem) -> Result<BestSet> {
    enumerate_best_with_budget(p, DEFAULT_BUDGET)
}

pub fn enumerate_best_with_budget(p: &Problem, budget: u128) -> Result<BestSet> {
    check_budget(p, budget)?;
    let mut best = BestSet {
        consistency: Degree::ZERO,
        labelings: Vec::new(),
    };
    for l in p.complete_labelings() {
        let value = pi_star(p, &l)?;
        if value > best.consistency {
            best.consistency = value;
            best.labelings.clear();
        }
        if value == best.consistency {
            best.labelings.push(l);
        }
    }
    Ok(best)
}

/// An explicit possibility value for every complete labeling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributionTable {
    variables: Vec<DomainVariable>,
    values: Vec<Degree>,
}

impl DistributionTable {
    pub fn from_fn(p: &Problem, mut f: impl FnMut(&Labeling) -> Degree) -> Result<DistributionTable> {
        check_budget(p, DEFAULT_BUDGET)?;
        let values = p.complete_labelings().map(|l| f(&l)).collect();
        Ok(DistributionTable {
            variables: p.variables().to_vec(),
            values,
        })
    }

    pub fn constant(p: &Problem, value: Degree) -> Result<DistributionTable> {
        Self::from_fn(p, |_| value)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn rank(&self, l: &Labeling) -> Option<usize> {
        if l.len() != self.variables.len() {
            return None;
        }
        let mut rank = 0;
        for v in &self.variables {
            let pos = v.position(l.get(v.name())?.as_str())?;
            rank = rank * v.domain().len() + pos;
        }
        Some(rank)
    }

    pub fn get(&self, l: &Labeling) -> Option<Degree> {
        self.rank(l).map(|r| self.values[r])
    }

    pub fn set(&mut self, l: &Labeling, value: Degree) -> Result<()> {
        let r = self.rank(l).ok_or_else(|| Error::IncompleteLabeling {
            missing: format!("{l}"),
        })?;
        self.values[r] = value;
        Ok(())
    }

    /// Entries in enumeration order.
    pub fn iter(&self) -> impl Iterator<Item = (Labeling, Degree)> + '_ {
        let radices: Vec<usize> = self.variables.iter().map(|v| v.domain().len()).collect();
        crate::model::Odometer::new(radices)
            .zip(&self.values)
            .map(move |(idx, &value)| {
                let l = idx
                    .iter()
                    .zip(&self.variables)
                    .map(|(&i, v)| (v.name().to_string(), v.domain()[i].clone()))
                    .collect();
                (l, value)
            })
    }

    pub fn values(&self) -> &[Degree] {
        &self.values
    }

    /// Pointwise `self ≤ other`. Tables must come from the same problem.
    pub fn le(&self, other: &DistributionTable) -> bool {
        self.values.len() == other.values.len()
            && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

/// `Π(k) = max { π(l) | l ⊨ k } ∪ {0}`.
pub fn possibility_measure(t: &DistributionTable, k: &Constraint) -> Degree {
    t.iter()
        .filter(|(l, _)| satisfies(l, k))
        .map(|(_, v)| v)
        .fold(Degree::ZERO, Degree::max)
}

/// `N(k) = min { 1 - π(l) | l ⊨ ¬k } ∪ {1}`.
pub fn necessity_measure(t: &DistributionTable, k: &Constraint) -> Degree {
    let not_k = negate(k);
    t.iter()
        .filter(|(l, _)| satisfies(l, &not_k))
        .map(|(_, v)| v.complement())
        .fold(Degree::ONE, Degree::min)
}

/// `SN(π) = 1 - max π`.
pub fn sub_normalization(t: &DistributionTable) -> Degree {
    t.values
        .iter()
        .copied()
        .fold(Degree::ZERO, Degree::max)
        .complement()
}

/// Every valued constraint `(k, α)` of `p` has `N(k) ≥ α` under `t`.
pub fn distribution_satisfies(t: &DistributionTable, p: &Problem) -> bool {
    p.constraints()
        .iter()
        .all(|vc| necessity_measure(t, vc.constraint()) >= vc.necessity())
}

/// The maximal satisfying distribution `π*` as an explicit table.
pub fn pi_star_table(p: &Problem) -> Result<DistributionTable> {
    check_budget(p, DEFAULT_BUDGET)?;
    let mut err = None;
    let t = DistributionTable::from_fn(p, |l| match pi_star(p, l) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            Degree::ZERO
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(t),
    }
}
