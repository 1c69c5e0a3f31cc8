//! Check hand-written substitutions against an instance with the plain
//! semantics: a solving and correct one, one that is not correct, and
//! one that leaves a formula false.

use epsengine::cli::{parse_instance, parse_substitution, Parser};
use epsengine::driver::verify;

const INSTANCE: &str = "\
skolem big(0) := exists x. 3 <= x
crit existence big() witness 8
crit pred big()
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = parse_instance(INSTANCE)?;
    let candidates = [
        ("least witnesses", "entry big() := 3\nentry c_{exists x. y1 = S x}(3) := 2\n"),
        ("not least", "entry big() := 4\nentry c_{exists x. y1 = S x}(4) := 3\n"),
        ("predecessor missing", "entry big() := 3\n"),
    ];
    for (name, entries) in candidates {
        let text = format!("epsengine/1\nkind substitution\n{entries}");
        let s = parse_substitution(&text, &Parser::new(), &inst)?;
        let report = verify(&s, &inst.crs);
        println!("-- {name}: {}", if report.ok() { "accepted" } else { "rejected" });
        println!("{report}");
    }
    Ok(())
}
