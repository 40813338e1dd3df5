//! Reading, validating and writing the PCSP text format.
//!
//! Run with `cargo run --example file_format -- [file.pcsp]`.

use pcsp::io::{parse_problem, write_problem, MENU_PCSP};
use pcsp::oracle::enumerate_best;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => MENU_PCSP.to_string(),
    };
    let p = parse_problem(&text)?;
    println!(
        "{}: {} variables, {} constraints, max arity {}, {} labelings",
        p.name(),
        p.variables().len(),
        p.constraints().len(),
        p.max_arity(),
        p.labeling_count()
    );

    let canonical = write_problem(&p);
    assert_eq!(parse_problem(&canonical)?, p);
    print!("{canonical}");
    println!("# consistency {}", enumerate_best(&p)?.consistency);

    for broken in ["problem x\nvar a : 1 2\nconstraint c 1.5 on a forbid { 1 }\n", "var a : 1\n", "problem x\nconstraint c 1 on z allow { 1 }\n"] {
        println!("{}", parse_problem(broken).unwrap_err());
    }
    Ok(())
}
