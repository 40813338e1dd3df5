//! With only hard constraints the solver behaves like classical backtracking.
//!
//! Run with `cargo run --example queens -- 8`.

use pcsp::io::builtin_queens;
use pcsp::search::{solve, SearchOptions};

fn main() -> pcsp::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(6);
    let board = builtin_queens(n);

    let first = solve(&board, &SearchOptions::default())?;
    println!("{n}-queens: consistency {} after {} nodes", first.best_value, first.nodes_expanded);
    if let Some(l) = first.best_labelings.first() {
        println!("  {}", board.format_labeling(l));
    }

    for fc in [false, true] {
        let all = solve(&board, &SearchOptions::default().all_best(true).forward_check(fc))?;
        println!(
            "all solutions{}: {} ({} nodes)",
            if fc { " with forward checking" } else { "" },
            all.best_labelings.len(),
            all.nodes_expanded
        );
    }
    Ok(())
}
