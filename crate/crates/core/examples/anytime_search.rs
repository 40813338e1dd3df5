//! Cutoff floor, sufficiency ceiling and node budgets, with a search trace.
//!
//! Run with `cargo run --example anytime_search`.

use pcsp::io::builtin_menu;
use pcsp::search::{solve, solve_traced, Heuristic, SearchOptions, ValueOrder};
use pcsp::{deg, Degree};

fn main() -> pcsp::Result<()> {
    let menu = builtin_menu();

    println!("trace with the bound value order:");
    let opts = SearchOptions::default().value_order(ValueOrder::Bound);
    let r = solve_traced(&menu, &opts, &mut |event| println!("  {event}"))?;
    println!("=> {} {}\n", r.status, r.best_value);

    let runs = [
        ("alpha 0.9", SearchOptions::default().with_cutoffs(deg("0.9"), Degree::ONE)?),
        ("beta 0.5", SearchOptions::default().with_cutoffs(Degree::ZERO, deg("0.5"))?),
        ("5 nodes", SearchOptions::default().node_limit(5)),
        ("max-degree", SearchOptions::default().heuristic(Heuristic::MaxDegree)),
        ("max-cardinality", SearchOptions::default().heuristic(Heuristic::MaxCardinality)),
        ("forward checking", SearchOptions::default().forward_check(true)),
    ];
    for (name, opts) in runs {
        let r = solve(&menu, &opts)?;
        let first = r.best_labelings.first().map(|l| menu.format_labeling(l)).unwrap_or_default();
        println!(
            "{name:>16}: {:<16} value {} nodes {:>3} cutoffs {:>3}  {first}",
            r.status.to_string(),
            r.best_value,
            r.nodes_expanded,
            r.cutoffs
        );
    }

    // a node budget sweep shows the anytime behaviour
    println!();
    for limit in [1, 4, 8, 16, 32, 64] {
        let r = solve(&menu, &SearchOptions::default().node_limit(limit))?;
        println!("budget {limit:>3}: {} {}", r.status, r.best_value);
    }
    Ok(())
}
