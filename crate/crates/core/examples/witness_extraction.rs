//! Read off the witness of a true existential from a solving substitution.

use epsengine::cli::parse_instance;
use epsengine::driver::{extract_witness, solve, SolveOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let demos = [
        "skolem two(0) := exists x. x = S S 0\ncrit existence two() witness 2",
        "skolem small(0) := exists x. x < 1\ncrit existence small() witness 0",
        "skolem lt3(0) := exists x. x < 3\ncrit induction lt3() bound 5",
    ];
    for text in demos {
        let inst = parse_instance(text)?;
        let r = solve(&inst.crs, &SolveOptions::default())?;
        let w = extract_witness(&r.substitution, &inst.crs, 0)?;
        println!("{:<45} witness {w}", inst.crs[0].to_string());
    }
    Ok(())
}
