//! The maximal possibility distribution and the measures it induces.
//!
//! Run with `cargo run --example possibility_measures`.

use pcsp::oracle::{
    distribution_satisfies, necessity_measure, pi_star_table, possibility_measure, sub_normalization,
};
use pcsp::{conjoin, disjoin, negate, Constraint, Problem};
use pcsp::deg;

fn main() -> pcsp::Result<()> {
    let p = Problem::builder("weather")
        .variable("sky", ["sun", "cloud", "rain"])
        .variable("plan", ["picnic", "museum"])
        .forbid("wet", deg("0.9"), ["sky", "plan"], [["rain", "picnic"]])
        .forbid("dull", deg("0.3"), ["sky", "plan"], [["sun", "museum"]])
        .allow("hope", deg("0.6"), ["sky"], [["sun"]])
        .build()?;

    let pi = pi_star_table(&p)?;
    for (l, v) in pi.iter() {
        println!("pi*({}) = {v}", p.format_labeling(&l));
    }
    println!("sub-normalization {}", sub_normalization(&pi));
    println!("pi* satisfies every constraint: {}", distribution_satisfies(&pi, &p));

    let picnic = Constraint::allow(["plan"], [["picnic"]])?;
    let sunny = Constraint::allow(["sky"], [["sun"]])?;
    let both = conjoin(&picnic, &sunny, p.variables())?;
    let either = disjoin(&picnic, &sunny, p.variables())?;
    for (name, k) in [("picnic", &picnic), ("sunny", &sunny), ("picnic and sunny", &both), ("picnic or sunny", &either)] {
        println!(
            "{name:>17}: possibility {}  necessity {}  necessity of negation {}",
            possibility_measure(&pi, k),
            necessity_measure(&pi, k),
            necessity_measure(&pi, &negate(k)),
        );
    }
    Ok(())
}
