use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SINGLE: &str = "skolem c(0) := exists x. x = 2\ncrit existence c() witness 2\n";

const NESTED: &str = "\
# rank 2: g looks up an f value
skolem f(1) := exists x. x = S S y1
skolem g(0) := exists x. f(x) = 5
crit existence f(3) witness 5
crit existence g() witness 3
crit pred g()
";

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epsengine"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn workspace(files: &[(&str, &str)]) -> TempDir {
    let dir = TempDir::new().unwrap();
    for (name, text) in files {
        fs::write(dir.path().join(name), text).unwrap();
    }
    dir
}

#[test]
fn solve_prints_the_substitution() {
    let dir = workspace(&[("single.eps", SINGLE)]);
    let o = run(&["solve", "single.eps", "--out", "sol.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "c_{exists x. x = 2}() := 2\n");
    let sol = fs::read_to_string(dir.path().join("sol.txt")).unwrap();
    assert!(sol.starts_with("epsengine/1\nkind solution\n"));
    assert!(sol.contains("entry c_{exists x. x = 2}() := 2\n"));
}

#[test]
fn verify_accepts_solution_and_rejects_edit() {
    let dir = workspace(&[("single.eps", SINGLE)]);
    assert!(run(&["solve", "single.eps", "--out", "sol.txt"], dir.path()).status.success());
    let o = run(&["verify", "single.eps", "--subst", "sol.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("correctness: ok"));

    let sol = fs::read_to_string(dir.path().join("sol.txt")).unwrap();
    fs::write(dir.path().join("bad.txt"), sol.replace(":= 2", ":= 1")).unwrap();
    let o = run(&["verify", "single.eps", "--subst", "bad.txt"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("correctness: FAIL"));
}

#[test]
fn ordinal_on_a_recorded_rank_one_trace() {
    let dir = workspace(&[("single.eps", SINGLE)]);
    assert!(run(&["solve", "single.eps", "--trace-dir", "tr"], dir.path()).status.success());
    let o = run(&["ordinal", "tr/path.trace"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let pairs: Vec<&str> = text.lines().filter(|l| l.starts_with("o ")).collect();
    assert!(!pairs.is_empty());
    assert!(pairs.iter().all(|l| l.starts_with("o decreases")), "{text}");
    assert!(text.contains("w^2 > w"), "{text}");
}

#[test]
fn trace_reports_every_level() {
    let dir = workspace(&[("nested.eps", NESTED)]);
    let o = run(&["trace", "nested.eps", "--trace-dir", "tr"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    for name in ["path", "lift-1", "lift-2", "chain-1", "chain-2"] {
        assert!(text.contains(name), "{text}");
        assert!(dir.path().join("tr").join(format!("{name}.trace")).exists());
    }
    assert!(text.lines().next().unwrap().contains("finite-injury ok"));
}

#[test]
fn outputs_are_deterministic() {
    let dir = workspace(&[("nested.eps", NESTED)]);
    let a = run(&["solve", "nested.eps", "--out", "a.txt", "--trace-dir", "ta"], dir.path());
    let b = run(&["solve", "nested.eps", "--out", "b.txt", "--trace-dir", "tb"], dir.path());
    assert_eq!(a.stdout, b.stdout);
    let read = |p: &str| fs::read(dir.path().join(p)).unwrap();
    assert_eq!(read("a.txt"), read("b.txt"));
    for name in ["path", "lift-1", "chain-1"] {
        assert_eq!(read(&format!("ta/{name}.trace")), read(&format!("tb/{name}.trace")));
    }
}

#[test]
fn gen_is_reproducible_and_solvable() {
    let dir = workspace(&[]);
    let a = run(&["gen", "--seed", "11", "--formulas", "8"], dir.path());
    let b = run(&["gen", "--seed", "11", "--formulas", "8"], dir.path());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().filter(|l| l.starts_with("crit ")).count(), 8);
    assert!(run(&["gen", "--seed", "3", "--count", "4", "--out", "many"], dir.path()).status.success());
    for i in 0..4 {
        let f = format!("many/instance-{i:03}.eps");
        let o = run(&["solve", &f], dir.path());
        assert_eq!(o.status.code(), Some(0), "{f}");
    }
}

#[test]
fn exit_codes_by_category() {
    let dir = workspace(&[
        ("single.eps", SINGLE),
        ("broken.eps", "skolem c(0) := exists x. x = 2\ncrit existence d() witness 2\n"),
    ]);
    let o = run(&["solve", "broken.eps"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("broken.eps:2:16"));
    assert_eq!(run(&["solve", "missing.eps"], dir.path()).status.code(), Some(4));
    assert_eq!(run(&["solve", "single.eps", "--fuel", "0"], dir.path()).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["gen", "--count", "2"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["--help"], dir.path()).status.code(), Some(0));
}
