//! Parse an instance from the DSL, solve it and print the substitution.
//!
//! `cargo run --example solve_instance [FILE]`

use epsengine::cli::parse_instance;
use epsengine::driver::{solve, SolveOptions};

const DEFAULT: &str = "\
skolem five(0) := exists x. 5 <= x
skolem next(1) := exists x. y1 < x
crit existence five() witness 9
crit pred five()
crit existence next(five()) witness 7
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => DEFAULT.to_string(),
    };
    let inst = parse_instance(&text)?;
    let r = solve(&inst.crs, &SolveOptions::default())?;
    println!("{} formulas, top level {}, {} path steps", inst.crs.len(), r.top(), r.stats.path_steps);
    for (term, value) in r.substitution.iter() {
        println!("  {term} := {value}");
    }
    Ok(())
}
