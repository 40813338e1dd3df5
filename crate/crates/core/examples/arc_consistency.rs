//! Possibilistic arc-consistency on the menu: weighted unary inferences,
//! the delta upper bound, and the effect of the gamma threshold.
//!
//! Run with `cargo run --example arc_consistency`.

use pcsp::io::{builtin_menu, write_problem};
use pcsp::propagate::{bound_b, enforce_ac, revise};
use pcsp::{deg, Degree};

fn main() -> pcsp::Result<()> {
    let menu = builtin_menu();
    let a = menu.constraints().iter().find(|c| c.id() == "a").expect("fixture has a");

    println!("b(drink=white-wine, a) = {}", bound_b(&menu, "drink", "white-wine", a)?);
    for inf in revise(&menu, "drink", a)? {
        println!("revise drink against a: forbid {}={} necessity {}", inf.variable, inf.label, inf.necessity);
    }

    for gamma in [Degree::ZERO, deg("0.5"), Degree::ONE] {
        let r = enforce_ac(&menu, gamma)?;
        println!(
            "\ngamma {gamma}: delta {} after {} rounds, {} inferences",
            r.delta,
            r.rounds,
            r.inferences.len()
        );
        for inf in &r.inferences {
            println!("  forbid {}={} necessity {}", inf.variable, inf.label, inf.necessity);
        }
    }

    let closed = enforce_ac(&menu, Degree::ZERO)?.closed_problem;
    println!("\nclosed problem:\n{}", write_problem(&closed));
    Ok(())
}
