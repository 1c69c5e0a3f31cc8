//! Generate random rank-1 instances and solve each one.
//!
//! `cargo run --release --example generate_instances [COUNT] [SEED]`

use std::time::Instant;

use epsengine::cli::{generate, print_instance, GenParams};
use epsengine::driver::{solve, verify, SolveOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let count: u64 = args.next().map_or(Ok(10), |s| s.parse())?;
    let seed: u64 = args.next().map_or(Ok(0), |s| s.parse())?;
    let params = GenParams {
        formulas: 10,
        ..GenParams::default()
    };
    println!("{}", print_instance(&generate(seed, &params)));
    for s in seed..seed + count {
        let inst = generate(s, &params);
        let t0 = Instant::now();
        let r = solve(&inst.crs, &SolveOptions::default())?;
        let ok = verify(&r.substitution, &inst.crs).ok();
        println!(
            "seed {s:>4}: {:>2} entries, {:>3} path steps, verified {ok}, {:.2?}",
            r.substitution.len(),
            r.stats.path_steps,
            t0.elapsed()
        );
    }
    Ok(())
}
