//! Solve the menu design problem and list the best menus.
//!
//! Run with `cargo run --example menu_design`.

use pcsp::io::builtin_menu;
use pcsp::search::{solve, SearchOptions};

fn main() -> pcsp::Result<()> {
    let menu = builtin_menu();
    let opts = SearchOptions::default()
        .order(["dish", "drink", "entrance", "dessert"])
        .all_best(true);
    let result = solve(&menu, &opts)?;

    println!("consistency {} (inconsistency {})", result.best_value, result.best_value.complement());
    for l in &result.best_labelings {
        println!("  {}", menu.format_labeling(l));
    }
    println!("{} nodes, {} cutoffs", result.nodes_expanded, result.cutoffs);

    // why is the best menu not perfect? list the constraints it violates
    let best = &result.best_labelings[0];
    for vc in menu.constraints() {
        if !pcsp::satisfies(best, vc.constraint()) {
            println!("violates {} (necessity {})", vc.id(), vc.necessity());
        }
    }
    Ok(())
}
