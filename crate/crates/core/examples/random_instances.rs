//! Seeded random instances, solved by search and checked against enumeration.
//!
//! Run with `cargo run --example random_instances`.

use pcsp::io::{random_problem, GeneratorSpec};
use pcsp::oracle::enumerate_best;
use pcsp::propagate::enforce_ac;
use pcsp::search::{solve, SearchOptions};
use pcsp::{deg, Degree};

fn main() -> pcsp::Result<()> {
    let levels = vec![deg("0.2"), deg("0.5"), deg("0.8"), Degree::ONE];
    println!("seed tightness  consistency  delta  nodes  leaves");
    for seed in 0..12 {
        let spec = GeneratorSpec {
            seed,
            n_vars: 6,
            domain_size: 4,
            n_constraints: 9,
            max_arity: 3,
            tightness: [0.2, 0.5, 0.8][seed as usize % 3],
            necessity_levels: levels.clone(),
        };
        let p = random_problem(&spec)?;
        let r = solve(&p, &SearchOptions::default())?;
        let oracle = enumerate_best(&p)?;
        assert_eq!(r.best_value, oracle.consistency);
        let delta = enforce_ac(&p, Degree::ZERO)?.delta;
        println!(
            "{seed:>4} {:>9} {:>12} {:>6} {:>6} {:>7}",
            spec.tightness,
            r.best_value.to_string(),
            delta.to_string(),
            r.nodes_expanded,
            p.labeling_count()
        );
    }
    Ok(())
}
