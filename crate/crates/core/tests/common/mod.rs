#![allow(dead_code)]

use pcsp::io::{random_problem, GeneratorSpec};
use pcsp::{deg, Degree, Labeling, Problem};

pub fn levels() -> Vec<Degree> {
    vec![deg("0.2"), deg("0.5"), deg("0.8"), Degree::ONE]
}

/// Instance `seed` of a small family: up to `max_vars` variables, domains up
/// to 4, arity up to 3, tightness cycling through five values.
pub fn instance(seed: u64, max_vars: usize) -> Problem {
    let n_vars = 2 + (seed as usize % (max_vars - 1));
    let domain_size = 2 + (seed as usize / 3) % 3;
    let max_arity = 1 + (seed as usize / 2) % n_vars.min(3);
    let spec = GeneratorSpec {
        seed,
        n_vars,
        domain_size,
        n_constraints: 2 + (seed as usize / 5) % (2 * n_vars),
        max_arity,
        tightness: [0.1, 0.3, 0.5, 0.7, 0.9][(seed as usize / 7) % 5],
        necessity_levels: levels(),
    };
    random_problem(&spec).expect("valid generator parameters")
}

/// All-hard instance for classical comparisons.
pub fn hard_instance(seed: u64) -> Problem {
    let spec = GeneratorSpec {
        seed,
        n_vars: 4 + seed as usize % 3,
        domain_size: 3,
        n_constraints: 6,
        max_arity: 2,
        tightness: 0.3,
        necessity_levels: vec![Degree::ONE],
    };
    random_problem(&spec).expect("valid generator parameters")
}

/// Plain chronological backtracking over `order`, testing every constraint
/// whose scope is fully assigned. A node is one attempted assignment.
pub struct Backtracker<'p> {
    p: &'p Problem,
    order: Vec<String>,
    pub nodes: u64,
    pub solutions: Vec<Labeling>,
    all: bool,
}

impl<'p> Backtracker<'p> {
    pub fn run(p: &'p Problem, order: &[String], all: bool) -> Backtracker<'p> {
        let mut bt = Backtracker {
            p,
            order: order.to_vec(),
            nodes: 0,
            solutions: Vec::new(),
            all,
        };
        bt.go(0, Labeling::new());
        bt
    }

    fn consistent(&self, l: &Labeling) -> bool {
        self.p.constraints().iter().all(|vc| {
            let k = vc.constraint();
            !k.scope().iter().all(|v| l.assigns(v)) || pcsp::satisfies(l, k)
        })
    }

    /// Returns true to stop.
    fn go(&mut self, depth: usize, l: Labeling) -> bool {
        if depth == self.order.len() {
            self.solutions.push(l);
            return !self.all;
        }
        let var = self.p.variable(&self.order[depth]).unwrap();
        for label in var.domain() {
            self.nodes += 1;
            let next = l.clone().with(var.name(), label.clone());
            if self.consistent(&next) && self.go(depth + 1, next) {
                return true;
            }
        }
        false
    }
}

/// Counts n-queens placements with row bitmasks.
pub fn count_queens(n: usize) -> usize {
    fn place(n: usize, cols: u32, d1: u32, d2: u32) -> usize {
        let full = (1u32 << n) - 1;
        if cols == full {
            return 1;
        }
        let mut free = full & !(cols | d1 | d2);
        let mut count = 0;
        while free != 0 {
            let bit = free & free.wrapping_neg();
            free ^= bit;
            count += place(n, cols | bit, ((d1 | bit) << 1) & full, (d2 | bit) >> 1);
        }
        count
    }
    place(n, 0, 0, 0)
}

/// All prefixes (partial labelings) of `order` reachable in the full tree,
/// including the empty one.
pub fn prefixes(p: &Problem, order: &[String]) -> Vec<Labeling> {
    let mut out = vec![Labeling::new()];
    let mut frontier = vec![Labeling::new()];
    for name in order {
        let var = p.variable(name).unwrap();
        frontier = frontier
            .iter()
            .flat_map(|l| var.domain().iter().map(move |lab| l.clone().with(name.clone(), lab.clone())))
            .collect();
        out.extend(frontier.iter().cloned());
    }
    out
}
