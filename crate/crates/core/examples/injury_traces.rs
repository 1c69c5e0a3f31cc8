//! Record the injury traces of a rank-2 solve and run the finite-injury
//! checks on them.

use epsengine::cli::{named_traces, parse_instance};
use epsengine::driver::{solve, SolveOptions};
use epsengine::injury::{check_finite_injury, check_weakly_finite_injury};

const INSTANCE: &str = "\
skolem f(1) := exists x. x = S S y1
skolem g(0) := exists x. f(x) = 5
crit existence f(3) witness 5
crit existence g() witness 3
crit pred g()
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = parse_instance(INSTANCE)?;
    let opts = SolveOptions::default();
    let r = solve(&inst.crs, &opts)?;
    for (name, trace) in named_traces(&r) {
        let strict = check_finite_injury(trace).map_or_else(|e| format!("no ({e})"), |_| "yes".into());
        let weak = check_weakly_finite_injury(trace, opts.max_run).is_ok();
        println!("{name}: {} steps, finite injury: {strict}, weakly: {weak}", trace.len());
    }
    println!("\npath selection in T1:");
    for (src, img) in r.path_trace.steps() {
        println!("  {src:<12} -> {img}");
    }
    Ok(())
}
