mod common;

use std::collections::BTreeSet;

use common::{instance, prefixes};
use pcsp::io::{parse_problem, write_problem};
use pcsp::oracle::{
    distribution_satisfies, enumerate_best, necessity_measure, pi_star_table, possibility_measure,
    sub_normalization, DistributionTable,
};
use pcsp::propagate::enforce_ac;
use pcsp::search::{order_heuristic, solve, Heuristic, SearchOptions, ValueOrder};
use pcsp::{
    classical_consistent, conjoin, deg, disjoin, more_defined, negate, partial_bound, pi_star, satisfies,
    Constraint, Degree, Labeling, Problem,
};
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    }
}

fn degree() -> impl Strategy<Value = Degree> {
    (0u32..=10).prop_map(|t| Degree::from_f64(t as f64 / 10.0).unwrap())
}

/// A random constraint over a random sub-scope of `p`.
fn constraint_on(p: &Problem, pick: u64) -> Constraint {
    let vars = p.variables();
    let a = pick as usize % vars.len();
    let b = (pick as usize / 7) % vars.len();
    let scope: Vec<&str> = if a == b {
        vec![vars[a].name()]
    } else {
        vec![vars[a].name(), vars[b].name()]
    };
    let mut tuples = BTreeSet::new();
    let mut bits = pick / 49;
    let combos: Vec<Vec<&str>> = if scope.len() == 1 {
        vars[a].domain().iter().map(|l| vec![l.as_str()]).collect()
    } else {
        vars[a]
            .domain()
            .iter()
            .flat_map(|x| vars[b].domain().iter().map(move |y| vec![x.as_str(), y.as_str()]))
            .collect()
    };
    for t in combos {
        if bits & 1 == 1 {
            tuples.insert(t);
        }
        bits >>= 1;
    }
    if pick.is_multiple_of(2) {
        Constraint::allow(scope, tuples).unwrap()
    } else {
        Constraint::forbid(scope, tuples).unwrap()
    }
}

fn random_table(p: &Problem, seed: u64) -> DistributionTable {
    let mut x = seed | 1;
    DistributionTable::from_fn(p, |_| {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        Degree::from_f64((x % 11) as f64 / 10.0).unwrap()
    })
    .unwrap()
}

fn declared(p: &Problem) -> Vec<String> {
    p.variables().iter().map(|v| v.name().to_string()).collect()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn search_matches_oracle(seed in 0u64..100_000) {
        let p = instance(seed, 5);
        let oracle = enumerate_best(&p).unwrap();
        let single = solve(&p, &SearchOptions::default()).unwrap();
        prop_assert_eq!(single.best_value, oracle.consistency);
        prop_assert!(oracle.labelings.contains(&single.best_labelings[0]));
        let all = solve(&p, &SearchOptions::default().all_best(true)).unwrap();
        prop_assert_eq!(all.best_labelings, oracle.labelings);
    }

    #[test]
    fn value_is_order_independent(seed in 0u64..100_000, rot in 0usize..5) {
        let p = instance(seed, 5);
        let expected = enumerate_best(&p).unwrap().consistency;
        let mut order = declared(&p);
        let k = rot % order.len();
        order.rotate_left(k);
        order.reverse();
        let runs = [
            SearchOptions::default().order(order.clone()),
            SearchOptions::default().heuristic(Heuristic::MaxDegree),
            SearchOptions::default().heuristic(Heuristic::MaxCardinality).value_order(ValueOrder::Bound),
            SearchOptions::default().order(order).forward_check(true),
        ];
        for opts in runs {
            prop_assert_eq!(solve(&p, &opts).unwrap().best_value, expected);
        }
    }

    #[test]
    fn forward_checking_changes_nothing_but_effort(seed in 0u64..100_000) {
        let p = instance(seed, 5);
        for h in [Heuristic::Declared, Heuristic::MaxDegree] {
            let plain = SearchOptions::default().heuristic(h).all_best(true);
            let off = solve(&p, &plain).unwrap();
            let on = solve(&p, &plain.clone().forward_check(true)).unwrap();
            prop_assert_eq!(&off.best_value, &on.best_value);
            prop_assert_eq!(&off.best_labelings, &on.best_labelings);
            prop_assert!(on.nodes_expanded <= off.nodes_expanded);
        }
    }

    #[test]
    fn pruning_is_sound(seed in 0u64..100_000, a in degree()) {
        let p = instance(seed, 4);
        let best = enumerate_best(&p).unwrap().consistency;
        let opts = SearchOptions::default().with_cutoffs(a, Degree::ONE).unwrap();
        let r = solve(&p, &opts).unwrap();
        if best > a || a.is_zero() {
            // a zero floor cannot prune a zero-consistency problem: every labeling ties at 0
            prop_assert_eq!(r.best_value, best);
            prop_assert_eq!(r.status, pcsp::search::Status::Optimal);
        } else {
            prop_assert_eq!(r.status, pcsp::search::Status::AlphaPruned);
            prop_assert!(r.best_labelings.is_empty());
        }
    }

    #[test]
    fn improvements_strictly_increase(seed in 0u64..100_000) {
        let p = instance(seed, 5);
        let mut last: Option<Degree> = None;
        let mut floors = Vec::new();
        let mut ok = true;
        pcsp::search::solve_traced(&p, &SearchOptions::default(), &mut |e| {
            floors.push(e.alpha);
            if e.action == pcsp::search::Action::Improve {
                ok &= last.is_none_or(|l| e.bound > l);
                last = Some(e.bound);
            }
        }).unwrap();
        prop_assert!(ok);
        prop_assert!(floors.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn bound_is_admissible_and_exact(seed in 0u64..100_000) {
        let p = instance(seed, 4);
        let order = order_heuristic(&p, Heuristic::MaxCardinality);
        let leaves: Vec<(Labeling, Degree)> =
            p.complete_labelings().map(|l| { let v = pi_star(&p, &l).unwrap(); (l, v) }).collect();
        for node in prefixes(&p, &order) {
            let best_below = leaves
                .iter()
                .filter(|(l, _)| more_defined(l, &node))
                .map(|(_, v)| *v)
                .max()
                .unwrap();
            prop_assert!(partial_bound(&p, &node) >= best_below);
            if node.len() == p.variables().len() {
                prop_assert_eq!(partial_bound(&p, &node), best_below);
            }
        }
    }

    #[test]
    fn adding_constraints_only_lowers(seed in 0u64..100_000, pick in any::<u64>(), a in degree()) {
        let p = instance(seed, 4);
        let k = constraint_on(&p, pick);
        let q = p.with_constraint(pcsp::ValuedConstraint::new("extra", k, a).unwrap()).unwrap();
        for l in p.complete_labelings() {
            prop_assert!(pi_star(&q, &l).unwrap() <= pi_star(&p, &l).unwrap());
        }
    }

    #[test]
    fn algebra_is_coherent(seed in 0u64..100_000, p1 in any::<u64>(), p2 in any::<u64>()) {
        let p = instance(seed, 4);
        let (k1, k2) = (constraint_on(&p, p1), constraint_on(&p, p2));
        let and = conjoin(&k1, &k2, p.variables()).unwrap();
        let or = disjoin(&k1, &k2, p.variables()).unwrap();
        for l in p.complete_labelings() {
            prop_assert_eq!(satisfies(&l, &and), satisfies(&l, &k1) && satisfies(&l, &k2));
            prop_assert_eq!(satisfies(&l, &or), satisfies(&l, &k1) || satisfies(&l, &k2));
            prop_assert_eq!(satisfies(&l, &negate(&k1)), !satisfies(&l, &k1));
        }
        let partial: Labeling = Labeling::new();
        prop_assert!(!satisfies(&partial, &k1) && !satisfies(&partial, &negate(&k1)));
    }

    #[test]
    fn hard_problems_are_classical(seed in 0u64..100_000) {
        let p = common::hard_instance(seed);
        for l in p.complete_labelings() {
            let v = pi_star(&p, &l).unwrap();
            prop_assert!(v.is_zero() || v.is_one());
            prop_assert_eq!(v.is_one(), classical_consistent(&p, &l).unwrap());
        }
    }

    #[test]
    fn pi_star_is_the_maximal_solution(seed in 0u64..100_000, t in any::<u64>()) {
        let p = instance(seed, 4);
        let star = pi_star_table(&p).unwrap();
        prop_assert!(distribution_satisfies(&star, &p));
        // anything pointwise below also satisfies
        let mut below = random_table(&p, t);
        for (l, v) in star.iter() {
            let capped = below.get(&l).unwrap().min(v);
            below.set(&l, capped).unwrap();
        }
        prop_assert!(distribution_satisfies(&below, &p));
        // raising a single point strictly above pi* breaks some constraint
        if let Some((l, v)) = star.iter().find(|(_, v)| !v.is_one()) {
            let mut above = star.clone();
            let raised = Degree::from_f64((v.to_f64() + 0.05).min(1.0)).unwrap();
            above.set(&l, raised).unwrap();
            prop_assert!(!distribution_satisfies(&above, &p));
        }
        prop_assert_eq!(enumerate_best(&p).unwrap().consistency, sub_normalization(&star).complement());
    }

    #[test]
    fn measures_are_dual(seed in 0u64..100_000, t in any::<u64>(), p1 in any::<u64>(), p2 in any::<u64>()) {
        let p = instance(seed, 4);
        let table = random_table(&p, t);
        let (k1, k2) = (constraint_on(&p, p1), constraint_on(&p, p2));
        prop_assert_eq!(
            necessity_measure(&table, &k1),
            possibility_measure(&table, &negate(&k1)).complement()
        );
        let and = conjoin(&k1, &k2, p.variables()).unwrap();
        prop_assert_eq!(
            necessity_measure(&table, &and),
            necessity_measure(&table, &k1).min(necessity_measure(&table, &k2))
        );
    }

    #[test]
    fn arc_consistency_preserves_pi_star(seed in 0u64..100_000) {
        let p = instance(seed, 4);
        let r = enforce_ac(&p, Degree::ZERO).unwrap();
        for l in p.complete_labelings() {
            prop_assert_eq!(pi_star(&p, &l).unwrap(), pi_star(&r.closed_problem, &l).unwrap());
        }
        prop_assert!(r.delta >= enumerate_best(&p).unwrap().consistency);
        let again = enforce_ac(&r.closed_problem, Degree::ZERO).unwrap();
        prop_assert!(again.inferences.is_empty());
        prop_assert_eq!(again.delta, r.delta);
    }

    #[test]
    fn gamma_filters_inferences(seed in 0u64..100_000, g in degree()) {
        let p = instance(seed, 4);
        let full = enforce_ac(&p, Degree::ZERO).unwrap();
        let filtered = enforce_ac(&p, g).unwrap();
        let expected: Vec<_> = full.inferences.into_iter().filter(|i| i.necessity >= g).collect();
        prop_assert_eq!(filtered.inferences, expected);
        for l in p.complete_labelings() {
            prop_assert_eq!(pi_star(&p, &l).unwrap(), pi_star(&filtered.closed_problem, &l).unwrap());
        }
    }

    #[test]
    fn arc_consistency_terminates_quickly(seed in 0u64..100_000) {
        let p = instance(seed, 5);
        let r = enforce_ac(&p, Degree::ZERO).unwrap();
        let labels: usize = p.variables().iter().map(|v| v.domain().len()).sum();
        let levels = {
            let mut s: BTreeSet<Degree> = BTreeSet::new();
            for vc in p.constraints() {
                s.insert(vc.necessity());
                s.insert(vc.penalty());
            }
            s.insert(Degree::ZERO);
            s.insert(Degree::ONE);
            s.len()
        };
        prop_assert!(r.rounds <= p.variables().len() * labels * levels);
    }

    #[test]
    fn text_format_round_trips(seed in 0u64..100_000) {
        let p = instance(seed, 5);
        let text = write_problem(&p);
        let back = parse_problem(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(write_problem(&back), text);
    }
}

#[test]
fn menu_and_queens_round_trip() {
    for p in [pcsp::io::builtin_menu(), pcsp::io::builtin_queens(5)] {
        assert_eq!(parse_problem(&write_problem(&p)).unwrap(), p);
    }
}

#[test]
fn degrees_survive_complements() {
    for text in ["0", "0.1", "0.2", "0.3", "0.35", "0.7", "0.123456789012345", "1"] {
        let d = deg(text);
        assert_eq!(d.complement().complement(), d);
        assert_eq!(text.parse::<Degree>().unwrap().to_string().parse::<Degree>().unwrap(), d);
    }
}
