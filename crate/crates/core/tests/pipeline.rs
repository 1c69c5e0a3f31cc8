//! Library-level round trips: generate, print, parse, solve, serialize,
//! read back and verify.

use epsengine::cli::{generate, parse_instance, parse_substitution, print_instance, write_substitution, GenParams, Parser};
use epsengine::driver::{solve, verify, SolveOptions};
use epsengine::injury::check_finite_injury;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn generated_instances_survive_the_file_formats(seed in any::<u64>(), formulas in 1usize..=10) {
        let p = GenParams { formulas, ..GenParams::default() };
        let inst = generate(seed, &p);
        let reparsed = parse_instance(&print_instance(&inst)).unwrap();
        prop_assert_eq!(&reparsed, &inst);

        let r = solve(&reparsed.crs, &SolveOptions::default()).unwrap();
        prop_assert!(check_finite_injury(&r.path_trace).is_ok());
        let text = write_substitution(&r.substitution, None);
        let back = parse_substitution(&text, &Parser::new(), &reparsed).unwrap();
        prop_assert_eq!(&back, &r.substitution);
        prop_assert!(verify(&back, &inst.crs).ok());
    }
}

#[test]
fn dropping_an_entry_breaks_verification() {
    let inst = parse_instance("skolem c(0) := exists x. 4 <= x\ncrit existence c() witness 7\n").unwrap();
    let r = solve(&inst.crs, &SolveOptions::default()).unwrap();
    assert!(verify(&r.substitution, &inst.crs).ok());
    let mut s = r.substitution.clone();
    let key = inst.crs[0].key_canon().unwrap();
    s.remove(&key);
    let rep = verify(&s, &inst.crs);
    assert!(!rep.solving());
    assert!(rep.to_string().contains("FAIL"));
}
