//! Cantor normal form arithmetic and the height ordinal that decreases
//! along a finite-injury trace.

use epsengine::injury::{chain_bound, height_o, verify_descent, InjuryTrace, Ordinal, PathNode, RemainingHeight};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let w = Ordinal::omega();
    let a = Ordinal::omega_pow_nat(2).add(&Ordinal::omega_pow_nat(2)).add(&Ordinal::one());
    println!("w^2 + w^2 + 1 = {a}");
    println!("1 + w = {}", Ordinal::one().add(&w));
    println!("w^w = {}", Ordinal::omega_pow(w.clone()));

    // `?` is corrected twice on the way down
    let images: Vec<PathNode> = ["<>", "<?>", "<?,?>", "<?,4>", "<1>", "<1,?>", "<1,0>"]
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_, _>>()?;
    let trace = InjuryTrace::from_chain(images);
    let h = RemainingHeight::of_images(&trace);
    for (src, img) in trace.steps() {
        println!("{src:<10} {img:<8} o = {}", height_o(img, |n| h.ordinal(n)));
    }
    verify_descent(&trace, |n| h.ordinal(n))?;
    println!("descent verified; chain bound at height 2 with one correction: {}", chain_bound(2, 1, 1));
    Ok(())
}
