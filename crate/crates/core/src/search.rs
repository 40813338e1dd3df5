//! Depth-first branch and bound over the labeling tree.
//!
//! Variables are assigned in a fixed vertical order. Each node carries an
//! upper bound on the compatibility of its completions, updated
//! incrementally: when a variable is assigned, only the constraints whose
//! scope becomes fully assigned at that step ([`newly_scoped`]) can lower it
//! ([`extend_bound`]). The bound is exact at the leaves.
//!
//! Two thresholds steer the run. The cutoff floor `α` starts at
//! [`SearchOptions::alpha0`] and rises to the value of each improving leaf; a
//! node is cut once its bound is `≤ α`. The sufficiency ceiling `β0` stops the
//! run at the first leaf reaching it. A node budget makes the search anytime:
//! when it runs out, the best labeling found so far is reported.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::degree::Degree;
use crate::error::{Error, Result};
use crate::model::{satisfies, Label, Labeling, Problem, ValuedConstraint};
use crate::propagate::label_bound;

/// Vertical (variable) ordering heuristics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Heuristic {
    /// Declaration order.
    Declared,
    /// Most constrained first: descending number of constraints mentioning
    /// the variable, ties in declaration order.
    MaxDegree,
    /// Greedy: next is the variable that completes the most constraint
    /// scopes given the variables already placed, ties in declaration order.
    MaxCardinality,
}

impl FromStr for Heuristic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Heuristic> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "declared" => Ok(Heuristic::Declared),
            "max-degree" => Ok(Heuristic::MaxDegree),
            "max-cardinality" => Ok(Heuristic::MaxCardinality),
            _ => Err(Error::UnknownTag {
                kind: "heuristic",
                text: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VariableOrder {
    Heuristic(Heuristic),
    /// A permutation of the problem's variable names.
    Explicit(Vec<String>),
}

/// Horizontal (value) ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueOrder {
    /// Domain declaration order.
    Declared,
    /// Descending child bound, ties in domain order.
    Bound,
}

impl FromStr for ValueOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<ValueOrder> {
        match s.to_ascii_lowercase().as_str() {
            "declared" => Ok(ValueOrder::Declared),
            "bound" => Ok(ValueOrder::Bound),
            _ => Err(Error::UnknownTag {
                kind: "value order",
                text: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub variable_order: VariableOrder,
    pub value_order: ValueOrder,
    alpha0: Degree,
    beta0: Degree,
    /// Collect every labeling reaching the best value, not just the first.
    pub all_best: bool,
    /// Maximum number of nodes (label assignments) to expand.
    pub node_limit: Option<u64>,
    pub forward_check: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            variable_order: VariableOrder::Heuristic(Heuristic::Declared),
            value_order: ValueOrder::Declared,
            alpha0: Degree::ZERO,
            beta0: Degree::ONE,
            all_best: false,
            node_limit: None,
            forward_check: false,
        }
    }
}

impl SearchOptions {
    /// Sets the initial cutoff floor and the sufficiency ceiling; requires `alpha0 ≤ beta0`.
    pub fn with_cutoffs(mut self, alpha0: Degree, beta0: Degree) -> Result<Self> {
        if alpha0 > beta0 {
            return Err(Error::InvalidOptions(format!(
                "alpha {alpha0} exceeds beta {beta0}"
            )));
        }
        self.alpha0 = alpha0;
        self.beta0 = beta0;
        Ok(self)
    }

    pub fn alpha0(&self) -> Degree {
        self.alpha0
    }

    pub fn beta0(&self) -> Degree {
        self.beta0
    }

    pub fn order(mut self, names: impl IntoIterator<Item = impl Into<String>>) -> Self {
        self.variable_order = VariableOrder::Explicit(names.into_iter().map(Into::into).collect());
        self
    }

    pub fn heuristic(mut self, h: Heuristic) -> Self {
        self.variable_order = VariableOrder::Heuristic(h);
        self
    }

    pub fn value_order(mut self, v: ValueOrder) -> Self {
        self.value_order = v;
        self
    }

    pub fn all_best(mut self, yes: bool) -> Self {
        self.all_best = yes;
        self
    }

    pub fn node_limit(mut self, limit: u64) -> Self {
        self.node_limit = Some(limit);
        self
    }

    pub fn forward_check(mut self, yes: bool) -> Self {
        self.forward_check = yes;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Status {
    /// The search completed: the value is the consistency degree.
    Optimal,
    /// No complete labeling has compatibility above the initial floor.
    AlphaPruned,
    /// A labeling reaching the sufficiency ceiling was found.
    BetaStopped,
    /// The node budget ran out; the result is the best found so far.
    BudgetExhausted,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "OPTIMAL",
            Status::AlphaPruned => "ALPHA-PRUNED",
            Status::BetaStopped => "BETA-STOPPED",
            Status::BudgetExhausted => "BUDGET-EXHAUSTED",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    /// Compatibility of the reported labelings; 0 when none was found.
    pub best_value: Degree,
    /// With `all_best`, in lexicographic declared order.
    pub best_labelings: Vec<Labeling>,
    pub status: Status,
    pub nodes_expanded: u64,
    pub cutoffs: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Extend,
    Cutoff,
    Leaf,
    Improve,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::Extend => "EXTEND",
            Action::Cutoff => "CUTOFF",
            Action::Leaf => "LEAF",
            Action::Improve => "IMPROVE",
        })
    }
}

/// One expanded node. Displays as `<depth> <var>=<label> bound=<value> <ACTION>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub depth: usize,
    /// The node's partial labeling, including the assignment just made.
    pub labeling: Labeling,
    pub variable: String,
    pub label: Label,
    pub bound: Degree,
    /// Cutoff floor in force when the node was evaluated.
    pub alpha: Degree,
    pub action: Action,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}={} bound={} {}",
            self.depth, self.variable, self.label, self.bound, self.action
        )
    }
}

fn resolve_order(p: &Problem, order: &VariableOrder) -> Result<Vec<usize>> {
    match order {
        VariableOrder::Heuristic(h) => Ok(heuristic_indices(p, *h)),
        VariableOrder::Explicit(names) => explicit_indices(p, names),
    }
}

fn explicit_indices<S: AsRef<str>>(p: &Problem, names: &[S]) -> Result<Vec<usize>> {
    let n = p.variables().len();
    if names.len() != n {
        return Err(Error::InvalidOrder(format!(
            "{} names given for {} variables",
            names.len(),
            n
        )));
    }
    let mut seen = vec![false; n];
    names
        .iter()
        .map(|name| {
            let name = name.as_ref();
            let i = p
                .var_index(name)
                .ok_or_else(|| Error::InvalidOrder(format!("unknown variable `{name}`")))?;
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidOrder(format!("`{name}` appears twice")));
            }
            Ok(i)
        })
        .collect()
}

fn heuristic_indices(p: &Problem, h: Heuristic) -> Vec<usize> {
    let n = p.variables().len();
    match h {
        Heuristic::Declared => (0..n).collect(),
        Heuristic::MaxDegree => {
            let mut degree = vec![0usize; n];
            for c in p.compiled() {
                for &v in &c.scope {
                    degree[v] += 1;
                }
            }
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by_key(|&v| std::cmp::Reverse(degree[v]));
            order
        }
        Heuristic::MaxCardinality => {
            let mut placed = vec![false; n];
            let mut order = Vec::with_capacity(n);
            for _ in 0..n {
                let completes = |v: usize| {
                    p.compiled()
                        .iter()
                        .filter(|c| c.scope.contains(&v) && c.scope.iter().all(|&s| s == v || placed[s]))
                        .count()
                };
                let mut best: Option<(usize, usize)> = None;
                for v in (0..n).filter(|&v| !placed[v]) {
                    let score = completes(v);
                    if best.is_none_or(|(_, s)| score > s) {
                        best = Some((v, score));
                    }
                }
                let (v, _) = best.expect("an unplaced variable remains");
                placed[v] = true;
                order.push(v);
            }
            order
        }
    }
}

/// Variable names in the order chosen by `h`.
pub fn order_heuristic(p: &Problem, h: Heuristic) -> Vec<String> {
    heuristic_indices(p, h)
        .into_iter()
        .map(|i| p.variables()[i].name().to_string())
        .collect()
}

/// Constraints completed by assigning `order[j]`: scope within the first
/// `j + 1` variables of `order` but not within the first `j`.
pub fn newly_scoped<'p, S: AsRef<str>>(
    p: &'p Problem,
    order: &[S],
    j: usize,
) -> Result<Vec<&'p ValuedConstraint>> {
    let order = explicit_indices(p, order)?;
    if j >= order.len() {
        return Err(Error::IndexOutOfRange {
            index: j,
            len: order.len(),
        });
    }
    let mut depth_of = vec![0usize; order.len()];
    for (d, &v) in order.iter().enumerate() {
        depth_of[v] = d;
    }
    Ok(p.compiled()
        .iter()
        .zip(p.constraints())
        .filter(|(c, _)| c.scope.iter().map(|&v| depth_of[v]).max() == Some(j))
        .map(|(_, vc)| vc)
        .collect())
}

/// `min(beta, 1 - α_i)` over the given constraints that `extended` violates.
/// Every scope variable must be assigned.
pub fn extend_bound(beta: Degree, new_constraints: &[&ValuedConstraint], extended: &Labeling) -> Result<Degree> {
    let mut bound = beta;
    for vc in new_constraints {
        if let Some(v) = vc.constraint().scope().iter().find(|v| !extended.assigns(v)) {
            return Err(Error::UnassignedScopeVariable {
                constraint: vc.id().to_string(),
                variable: v.clone(),
            });
        }
        if !satisfies(extended, vc.constraint()) {
            bound = bound.min(vc.penalty());
        }
    }
    Ok(bound)
}

/// Runs branch and bound with `opts`.
pub fn solve(p: &Problem, opts: &SearchOptions) -> Result<SearchResult> {
    Searcher::new(p, opts, None)?.run()
}

/// As [`solve`], reporting every expanded node to `on_event`.
pub fn solve_traced(
    p: &Problem,
    opts: &SearchOptions,
    on_event: &mut dyn FnMut(&TraceEvent),
) -> Result<SearchResult> {
    Searcher::new(p, opts, Some(on_event))?.run()
}

struct Searcher<'a> {
    p: &'a Problem,
    opts: &'a SearchOptions,
    order: Vec<usize>,
    /// Compiled constraint indices completed at each depth.
    completes_at: Vec<Vec<usize>>,
    /// Compiled constraint indices per variable.
    incident: Vec<Vec<usize>>,
    assignment: Vec<Option<usize>>,
    best: Option<Degree>,
    best_values: Vec<Vec<usize>>,
    nodes: u64,
    cutoffs: u64,
    stop: Option<Status>,
    trace: Option<&'a mut dyn FnMut(&TraceEvent)>,
}

impl<'a> Searcher<'a> {
    fn new(
        p: &'a Problem,
        opts: &'a SearchOptions,
        trace: Option<&'a mut dyn FnMut(&TraceEvent)>,
    ) -> Result<Self> {
        if opts.alpha0 > opts.beta0 {
            return Err(Error::InvalidOptions(format!(
                "alpha {} exceeds beta {}",
                opts.alpha0, opts.beta0
            )));
        }
        let order = resolve_order(p, &opts.variable_order)?;
        let n = order.len();
        let mut depth_of = vec![0usize; n];
        for (d, &v) in order.iter().enumerate() {
            depth_of[v] = d;
        }
        let mut completes_at = vec![Vec::new(); n];
        let mut incident = vec![Vec::new(); n];
        for (ci, c) in p.compiled().iter().enumerate() {
            let d = c.scope.iter().map(|&v| depth_of[v]).max().expect("non-empty scope");
            completes_at[d].push(ci);
            for &v in &c.scope {
                incident[v].push(ci);
            }
        }
        Ok(Searcher {
            p,
            opts,
            order,
            completes_at,
            incident,
            assignment: vec![None; n],
            best: None,
            best_values: Vec::new(),
            nodes: 0,
            cutoffs: 0,
            stop: None,
            trace,
        })
    }

    /// Whether a node with this bound can be discarded.
    fn is_cut(&self, bound: Degree) -> bool {
        if self.opts.all_best {
            // strict against the incumbent so that ties are still collected
            bound <= self.opts.alpha0 || self.best.is_some_and(|b| bound < b)
        } else {
            bound <= self.best.unwrap_or(self.opts.alpha0)
        }
    }

    fn floor(&self) -> Degree {
        self.best.unwrap_or(self.opts.alpha0)
    }

    fn extend(&self, beta: Degree, depth: usize) -> Degree {
        self.completes_at[depth]
            .iter()
            .map(|&ci| &self.p.compiled()[ci])
            .filter(|c| c.holds_partial(&self.assignment) == Some(false))
            .map(|c| c.penalty)
            .fold(beta, Degree::min)
    }

    /// Forward-checking bound: for each future variable, its best label bound.
    fn lookahead(&self, depth: usize) -> Degree {
        let mut bound = Degree::ONE;
        for &var in &self.order[depth + 1..] {
            let size = self.p.variables()[var].domain().len();
            let best_label = (0..size)
                .map(|v| label_bound(self.p, &self.incident[var], &self.assignment, var, v))
                .max()
                .expect("non-empty domain");
            bound = bound.min(best_label);
            if bound.is_zero() {
                break;
            }
        }
        bound
    }

    fn emit(&mut self, depth: usize, var: usize, label: usize, bound: Degree, action: Action) {
        if self.trace.is_none() {
            return;
        }
        let v = &self.p.variables()[var];
        let event = TraceEvent {
            depth: depth + 1,
            labeling: self.p.labeling_of(&self.assignment),
            variable: v.name().to_string(),
            label: v.domain()[label].clone(),
            bound,
            alpha: self.floor(),
            action,
        };
        if let Some(f) = self.trace.as_mut() {
            f(&event);
        }
    }

    fn leaf(&mut self, value: Degree) -> Action {
        let values: Vec<usize> = self.assignment.iter().map(|v| v.expect("complete")).collect();
        if self.best.is_none_or(|b| value > b) {
            self.best = Some(value);
            self.best_values.clear();
            self.best_values.push(values);
            if !self.opts.beta0.is_one() && value >= self.opts.beta0 {
                self.stop = Some(Status::BetaStopped);
            }
            Action::Improve
        } else {
            self.best_values.push(values);
            Action::Leaf
        }
    }

    fn value_order(&mut self, depth: usize, beta: Degree) -> Vec<usize> {
        let var = self.order[depth];
        let size = self.p.variables()[var].domain().len();
        match self.opts.value_order {
            ValueOrder::Declared => (0..size).collect(),
            ValueOrder::Bound => {
                let mut keyed: Vec<(usize, Degree)> = (0..size)
                    .map(|v| {
                        self.assignment[var] = Some(v);
                        let b = self.extend(beta, depth);
                        (v, b)
                    })
                    .collect();
                self.assignment[var] = None;
                keyed.sort_by_key(|&(_, b)| std::cmp::Reverse(b));
                keyed.into_iter().map(|(v, _)| v).collect()
            }
        }
    }

    fn dfs(&mut self, depth: usize, beta: Degree) {
        let n = self.order.len();
        let var = self.order[depth];
        for value in self.value_order(depth, beta) {
            if self.stop.is_some() || self.is_cut(beta) {
                return;
            }
            if self.opts.node_limit.is_some_and(|limit| self.nodes >= limit) {
                self.stop = Some(Status::BudgetExhausted);
                return;
            }
            self.nodes += 1;
            self.assignment[var] = Some(value);
            let mut bound = self.extend(beta, depth);
            if self.opts.forward_check && depth + 1 < n && !self.is_cut(bound) {
                bound = bound.min(self.lookahead(depth));
            }
            if self.is_cut(bound) {
                self.cutoffs += 1;
                self.emit(depth, var, value, bound, Action::Cutoff);
            } else if depth + 1 == n {
                let action = self.leaf(bound);
                self.emit(depth, var, value, bound, action);
            } else {
                self.emit(depth, var, value, bound, Action::Extend);
                self.dfs(depth + 1, bound);
            }
            self.assignment[var] = None;
        }
    }

    fn run(mut self) -> Result<SearchResult> {
        if self.order.is_empty() {
            // the empty labeling is the only (complete) labeling
            if !self.is_cut(Degree::ONE) {
                self.best = Some(Degree::ONE);
                self.best_values.push(Vec::new());
            }
        } else {
            self.dfs(0, Degree::ONE);
        }
        let mut status = self.stop.unwrap_or(Status::Optimal);
        let mut best_value = self.best.unwrap_or(Degree::ZERO);
        let mut labelings: Vec<Labeling>;
        if self.best.is_none() && status == Status::Optimal {
            if self.opts.alpha0.is_zero() {
                // every leaf was cut at bound 0: all complete labelings tie at 0
                best_value = Degree::ZERO;
                labelings = if self.opts.all_best {
                    self.p.complete_labelings().collect()
                } else {
                    vec![self.first_in_search_order()]
                };
            } else {
                status = Status::AlphaPruned;
                labelings = Vec::new();
            }
        } else {
            if self.opts.all_best {
                self.best_values.sort();
            }
            labelings = self
                .best_values
                .iter()
                .map(|v| self.p.complete_labeling_of(v))
                .collect();
        }
        if !self.opts.all_best {
            labelings.truncate(1);
        }
        Ok(SearchResult {
            best_value,
            best_labelings: labelings,
            status,
            nodes_expanded: self.nodes,
            cutoffs: self.cutoffs,
        })
    }

    fn first_in_search_order(&self) -> Labeling {
        self.p.complete_labeling_of(&vec![0; self.order.len()])
    }
}
