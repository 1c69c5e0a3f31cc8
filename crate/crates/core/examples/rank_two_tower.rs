//! Walk the tower of trees for a rank-2 instance: the labels along the
//! selected path in T1 and the image of that path at every level.

use epsengine::cli::parse_instance;
use epsengine::driver::{select_path, solve_with};
use epsengine::trees::{Tower, TowerConfig};

const INSTANCE: &str = "\
skolem q(1) := exists x. y1 < x
skolem r(0) := exists x. q(x) = 4
crit existence q(3) witness 4
crit existence r() witness 3
crit existence q(r()) witness 5
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = parse_instance(INSTANCE)?;
    let tower = Tower::new(inst.crs.clone(), TowerConfig::default());
    println!("top level N = {}", tower.top());
    for alpha in select_path(&tower)? {
        let label = tower.label(1, &alpha)?;
        let image = tower.lift(1, &alpha)?;
        println!("T1 {alpha:<14} label {label:<40} lifts to T2 {}", image.image());
    }
    let r = solve_with(&tower)?;
    for node in &r.lifted {
        println!("{node}");
    }
    for (term, value) in r.substitution.iter() {
        println!("  {term} := {value}");
    }
    Ok(())
}
