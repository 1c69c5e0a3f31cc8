//! Acceptance criteria 1-9. Runs as a plain binary and prints one
//! PASS/FAIL line per criterion; exits nonzero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use std::time::{Duration, Instant};

use epsengine::cli::{generate, parse_instance, GenParams, Instance};
use epsengine::critical::{CriticalFormula, CriticalKind};
use epsengine::driver::{extract_witness, solve, solve_with, verify, DriverError, SolveOptions, SolveResult};
use epsengine::injury::{
    check_finite_injury, check_weakly_finite_injury, kb_lt, verify_descent, BranchLabel, InjuryTrace, PathNode,
    RemainingHeight,
};
use epsengine::lang::{Canon, Formula, Pred, SkolemFunction, Term, Var};
use epsengine::subst::{EpsSubstitution, Value};
use epsengine::trees::{rank1_lambda, Tower, TreeError};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SWEEP: u64 = 50;
const TIME_LIMIT: Duration = Duration::from_secs(1);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn sweep_params(seed: u64) -> GenParams {
    GenParams {
        formulas: 4 + (seed % 7) as usize,
        max_witness: 20,
        functions: 3,
    }
}

fn debug_opts() -> SolveOptions {
    let mut o = SolveOptions::default();
    o.tower.check_correctness = true;
    o
}

// ---------------------------------------------------------------------
// An evaluator for closed formulas that shares no code with the engine:
// unassigned canonical terms and `?` both denote 0.

fn eval(t: &Term, s: &BTreeMap<Canon, u64>) -> u64 {
    match t {
        Term::Num(n) => *n,
        Term::Succ(t) => eval(t, s) + 1,
        Term::App(f, args) => {
            let args: Vec<u64> = args.iter().map(|a| eval(a, s)).collect();
            let c = Canon::new(f.clone(), args).expect("arity checked by the parser");
            s.get(&c).copied().unwrap_or(0)
        }
        Term::Var(_) => panic!("open term"),
    }
}

fn holds(f: &Formula, s: &BTreeMap<Canon, u64>) -> bool {
    match f {
        Formula::Atom(p, args) => p.holds(&args.iter().map(|a| eval(a, s)).collect::<Vec<_>>()),
        Formula::NegAtom(p, args) => !p.holds(&args.iter().map(|a| eval(a, s)).collect::<Vec<_>>()),
        Formula::And(a, b) => holds(a, s) && holds(b, s),
        Formula::Or(a, b) => holds(a, s) || holds(b, s),
    }
}

/// The naive H-process over true arithmetic: while some critical formula
/// is false, give its key term the least true witness of its matrix.
fn h_process(crs: &[CriticalFormula]) -> BTreeMap<Canon, u64> {
    let mut s = BTreeMap::new();
    for _ in 0..10_000 {
        let Some(cr) = crs.iter().find(|cr| !holds(&cr.formula(), &s)) else {
            return s;
        };
        let args: Vec<u64> = cr.params().iter().map(|p| eval(p, &s)).collect();
        let key = Canon::new(cr.key_fn().clone(), args).unwrap();
        let v = (0..=1_000)
            .find(|v| holds(&key.func.at(*v, &key.args), &s))
            .expect("a false critical formula has a witness");
        s.insert(key, v);
    }
    panic!("H-process did not settle")
}

// ---------------------------------------------------------------------

struct Solved {
    name: String,
    crs: Vec<CriticalFormula>,
    result: Result<SolveResult, DriverError>,
    elapsed: Duration,
}

fn solve_timed(name: String, crs: Vec<CriticalFormula>, opts: &SolveOptions) -> Solved {
    let t0 = Instant::now();
    let result = solve(&crs, opts);
    Solved {
        name,
        crs,
        result,
        elapsed: t0.elapsed(),
    }
}

fn sweep_instances() -> Vec<(String, Instance)> {
    (0..SWEEP).map(|seed| (format!("gen-{seed}"), generate(seed, &sweep_params(seed)))).collect()
}

const RANK_TWO: [(&str, &str); 4] = [
    (
        "nested-successor",
        "skolem d(1) := exists x. x = S y1
         skolem e(0) := exists x. d(x) = 3
         crit existence d(2) witness 3
         crit existence e() witness 2",
    ),
    (
        "predecessor",
        "skolem f(1) := exists x. x = S S y1
         skolem g(0) := exists x. f(x) = 5
         crit existence f(3) witness 5
         crit existence g() witness 3
         crit pred g()",
    ),
    (
        "nested-parameter",
        "skolem q(1) := exists x. y1 < x
         skolem r(0) := exists x. q(x) = 4
         crit existence q(3) witness 4
         crit existence r() witness 3
         crit existence q(r()) witness 5",
    ),
    (
        "induction-over-skolem",
        "skolem h(1) := exists x. y1 < x
         skolem m(0) := exists x. h(x) < 3
         crit existence h(0) witness 1
         crit existence h(1) witness 2
         crit existence h(2) witness 3
         crit induction m() bound 2",
    ),
];

fn rank_two_instances() -> Vec<(String, Instance)> {
    RANK_TWO
        .iter()
        .map(|(n, text)| {
            let text: String = text.lines().map(|l| format!("{}\n", l.trim())).collect();
            (n.to_string(), parse_instance(&text).expect("rank-2 fixture parses"))
        })
        .collect()
}

fn key_terms(crs: &[CriticalFormula]) -> BTreeSet<Canon> {
    crs.iter().filter_map(CriticalFormula::key_canon).collect()
}

fn criterion_1(sweep: &[Solved]) -> Outcome {
    let mut failures = Vec::new();
    let mut slowest = Duration::ZERO;
    let mut variants = [0usize; 3];
    let mut shared = 0;
    for s in sweep {
        slowest = slowest.max(s.elapsed);
        for cr in &s.crs {
            variants[match cr.kind() {
                CriticalKind::Existence { .. } => 0,
                CriticalKind::Induction { .. } => 1,
                CriticalKind::Predecessor => 2,
            }] += 1;
        }
        if key_terms(&s.crs).len() < s.crs.len() {
            shared += 1;
        }
        let r = match &s.result {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("{}: {e}", s.name));
                continue;
            }
        };
        if s.elapsed > TIME_LIMIT {
            failures.push(format!("{}: took {:?}", s.name, s.elapsed));
        }
        if !verify(&r.substitution, &s.crs).ok() {
            failures.push(format!("{}: verify failed", s.name));
        }
        let oracle = h_process(&s.crs);
        for key in key_terms(&s.crs) {
            let engine = match r.substitution.get(&key) {
                Some(Value::Num(n)) => Some(n),
                Some(Value::Default) | None => None,
            };
            if engine != oracle.get(&key).copied() {
                failures.push(format!("{}: {key} engine {engine:?} oracle {:?}", s.name, oracle.get(&key)));
            }
        }
    }
    let detail = format!(
        "{} instances, {} with shared keys, variants e/i/p {}/{}/{}, slowest {:.3}s",
        sweep.len(),
        shared,
        variants[0],
        variants[1],
        variants[2],
        slowest.as_secs_f64()
    );
    report(failures, detail, variants.iter().all(|v| *v > 0) && shared > 0)
}

fn report(failures: Vec<String>, detail: String, extra: bool) -> Outcome {
    if failures.is_empty() {
        outcome(extra, detail)
    } else {
        outcome(false, format!("{detail}; {} failures, first: {}", failures.len(), failures[0]))
    }
}

fn criterion_2(sweep: &[Solved]) -> Outcome {
    let mut failures = Vec::new();
    let mut longest = 0;
    for s in sweep {
        match &s.result {
            Ok(r) => {
                longest = longest.max(r.path_trace.len());
                if let Err(e) = check_finite_injury(&r.path_trace) {
                    failures.push(format!("{}: {e}", s.name));
                }
            }
            Err(e) => failures.push(format!("{}: {e}", s.name)),
        }
    }
    report(failures, format!("{} path traces, longest {} steps", sweep.len(), longest), true)
}

fn criterion_3(instances: &[(String, Instance)]) -> Outcome {
    let mut failures = Vec::new();
    let mut nodes = 0;
    for (name, inst) in instances.iter().take(20) {
        let tower = Tower::new(inst.crs.clone(), SolveOptions::default().tower);
        let r = match solve_with(&tower) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("{name}: {e}"));
                continue;
            }
        };
        for alpha in r.path_trace.images() {
            nodes += 1;
            let lam = rank1_lambda(&tower, alpha);
            let lift = tower.lift(1, alpha).map(|l| l.image().clone());
            if lam != lift {
                failures.push(format!("{name}: at {alpha} lambda {lam:?} lift {lift:?}"));
            }
        }
    }
    report(failures, format!("20 instances, {nodes} driver nodes"), true)
}

fn criterion_4(rank_two: &[Solved]) -> Outcome {
    let mut failures = Vec::new();
    let max_run = SolveOptions::default().max_run;
    for s in rank_two {
        match &s.result {
            Ok(r) => {
                if r.top() != 2 {
                    failures.push(format!("{}: top level {}", s.name, r.top()));
                }
                if !verify(&r.substitution, &s.crs).ok() {
                    failures.push(format!("{}: verify failed", s.name));
                }
                if let Err(e) = check_weakly_finite_injury(&r.chain_traces[0], max_run) {
                    failures.push(format!("{}: {e}", s.name));
                }
            }
            Err(e) => failures.push(format!("{}: {e}", s.name)),
        }
    }
    let names: Vec<&str> = rank_two.iter().map(|s| s.name.as_str()).collect();
    report(failures, format!("{} instances ({})", rank_two.len(), names.join(", ")), rank_two.len() >= 3)
}

fn recorded_traces(solved: &[Solved]) -> Vec<(String, &InjuryTrace)> {
    let mut out = Vec::new();
    for s in solved {
        if let Ok(r) = &s.result {
            out.push((format!("{} path", s.name), &r.path_trace));
            for (i, t) in r.lift_traces.iter().enumerate() {
                out.push((format!("{} lift-{}", s.name, i + 1), t));
            }
            for (i, t) in r.chain_traces.iter().enumerate() {
                out.push((format!("{} chain-{}", s.name, i + 1), t));
            }
        }
    }
    out
}

fn criterion_5(solved: &[Solved]) -> Outcome {
    let mut failures = Vec::new();
    let (mut checked, mut pairs, mut max_height) = (0, 0, 0);
    for (name, t) in recorded_traces(solved) {
        if check_finite_injury(t).is_err() {
            continue;
        }
        checked += 1;
        let heights = RemainingHeight::of_images(t);
        max_height = max_height.max(heights.tree_height());
        let steps = t.steps();
        pairs += (0..steps.len())
            .flat_map(|i| (0..steps.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| steps[i].0.is_proper_prefix_of(&steps[j].0))
            .count();
        if let Err(e) = verify_descent(t, |n| heights.ordinal(n)) {
            failures.push(format!("{name}: {e}"));
        }
    }
    report(
        failures,
        format!("{checked} finite-injury traces, {pairs} extension pairs, image height up to {max_height}"),
        checked > 0,
    )
}

// ---------------------------------------------------------------------
// Random substitutions and formulas for the semantics suite.

struct Language {
    funcs: Vec<Arc<SkolemFunction>>,
}

impl Language {
    fn new() -> Self {
        let x = || Term::var(Var::Bound);
        let y1 = || Term::var(Var::Param(0));
        let succ = SkolemFunction::new(Formula::eq(x(), Term::succ(y1())), 1).unwrap();
        let window = SkolemFunction::new(Formula::and(Formula::lt(y1(), x()), Formula::lt(x(), Term::num(7))), 1).unwrap();
        let three = SkolemFunction::new(Formula::le(Term::num(3), x()), 0).unwrap();
        let lifted = SkolemFunction::new(
            Formula::eq(Term::app(succ.clone(), vec![x()]).unwrap(), Term::num(4)),
            0,
        )
        .unwrap();
        let nested = SkolemFunction::new(
            Formula::lt(Term::app(window.clone(), vec![y1()]).unwrap(), x()),
            1,
        )
        .unwrap();
        Language {
            funcs: vec![succ, window, three, lifted, nested],
        }
    }

    fn term(&self, rng: &mut ChaCha8Rng, depth: usize) -> Term {
        match if depth == 0 { 0 } else { rng.gen_range(0..4) } {
            0 => Term::num(rng.gen_range(0..6)),
            1 => Term::succ(self.term(rng, depth - 1)),
            _ => {
                let f = self.funcs.choose(rng).unwrap().clone();
                let args = (0..f.arity()).map(|_| self.term(rng, depth - 1)).collect();
                Term::app(f, args).unwrap()
            }
        }
    }

    fn formula(&self, rng: &mut ChaCha8Rng, depth: usize) -> Formula {
        match if depth == 0 { rng.gen_range(0..2) } else { rng.gen_range(0..4) } {
            k @ (0 | 1) => {
                let p = [Pred::Eq, Pred::Lt, Pred::Le].choose(rng).unwrap().clone();
                let args = vec![self.term(rng, 2), self.term(rng, 2)];
                if k == 0 {
                    Formula::atom(p, args)
                } else {
                    Formula::atom(p, args).negate()
                }
            }
            2 => Formula::and(self.formula(rng, depth - 1), self.formula(rng, depth - 1)),
            _ => Formula::or(self.formula(rng, depth - 1), self.formula(rng, depth - 1)),
        }
    }

    fn canon(&self, rng: &mut ChaCha8Rng, min_rank: usize) -> Option<Canon> {
        let funcs: Vec<_> = self.funcs.iter().filter(|f| f.rank() > min_rank).collect();
        let f = (*funcs.choose(rng)?).clone();
        let args = (0..f.arity()).map(|_| rng.gen_range(0..6)).collect();
        Some(Canon::new(f, args).unwrap())
    }

    fn value(rng: &mut ChaCha8Rng) -> Value {
        if rng.gen_bool(0.2) {
            Value::Default
        } else {
            Value::Num(rng.gen_range(0..8))
        }
    }

    fn subst(&self, rng: &mut ChaCha8Rng) -> EpsSubstitution {
        let mut s = EpsSubstitution::new();
        for _ in 0..rng.gen_range(0..25) {
            let c = self.canon(rng, 0).unwrap();
            let _ = s.insert(c, Self::value(rng));
        }
        s
    }
}

fn criterion_6() -> Outcome {
    let lang = Language::new();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = Vec::new();
    let mut undecided = 0;
    for i in 0..500 {
        let s = lang.subst(&mut rng);
        let phi = lang.formula(&mut rng, 3);
        let neg = phi.negate();
        if s.models(&phi) && s.models(&neg) {
            failures.push(format!("#{i}: both {phi} and its negation hold"));
        }
        if !s.decides(&phi) {
            undecided += 1;
            if s.unev(&phi).is_empty() {
                failures.push(format!("#{i}: {phi} undecided with no unevaluated term"));
            }
        }
        let rk = phi.rank();
        let mut perturbed = s.restrict_rank(rk);
        for _ in 0..10 {
            if let Some(c) = lang.canon(&mut rng, rk) {
                perturbed.set(c, Language::value(&mut rng));
            }
        }
        if s.models(&phi) != perturbed.models(&phi) || s.decides(&phi) != perturbed.decides(&phi) {
            failures.push(format!("#{i}: {phi} depends on entries above rank {rk}"));
        }
        if s.models_bar(&phi) == s.models_bar(&neg) {
            failures.push(format!("#{i}: standard extension does not decide {phi}"));
        }
    }
    report(failures, format!("500 pairs, {undecided} undecided under S"), undecided > 0)
}

fn random_node(rng: &mut ChaCha8Rng) -> PathNode {
    let len = rng.gen_range(0..=4);
    PathNode::new(
        (0..len)
            .map(|_| {
                if rng.gen_bool(0.4) {
                    BranchLabel::Q
                } else {
                    BranchLabel::Num(rng.gen_range(0..3))
                }
            })
            .collect(),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = Vec::new();
    let mut ok_count = 0;
    for i in 0..200 {
        // half the candidates are built to descend so both verdicts occur
        let mut images: Vec<PathNode> = (0..rng.gen_range(1..6)).map(|_| random_node(&mut rng)).collect();
        if i % 2 == 0 {
            images.sort_by(|a, b| {
                if kb_lt(b, a) {
                    std::cmp::Ordering::Less
                } else if kb_lt(a, b) {
                    std::cmp::Ordering::Greater
                } else {
                    std::cmp::Ordering::Equal
                }
            });
        }
        let trace = InjuryTrace::from_chain(images.clone());
        let descending = images
            .iter()
            .enumerate()
            .all(|(k, x)| images[k + 1..].iter().all(|y| kb_lt(y, x)));
        let fi = check_finite_injury(&trace).is_ok();
        ok_count += fi as usize;
        if fi != descending {
            failures.push(format!("#{i}: finite injury {fi}, KB descent {descending}"));
        }
    }
    report(failures, format!("200 candidates, {ok_count} finite injury"), ok_count > 0 && ok_count < 200)
}

fn criterion_8(instances: &[(String, Instance)]) -> Outcome {
    let mut failures = Vec::new();
    let mut steps = 0;
    for (name, inst) in instances {
        match solve(&inst.crs, &debug_opts()) {
            Ok(r) => steps += r.stats.path_steps,
            Err(DriverError::Tree(e @ TreeError::Incorrect { .. })) => failures.push(format!("{name}: {e}")),
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    report(
        failures,
        format!("{} instances with per-step checks, {steps} path steps", instances.len()),
        true,
    )
}

fn criterion_9() -> Outcome {
    let cases = [
        ("skolem a(0) := exists x. x = S S 0\ncrit existence a() witness 2\n", 2),
        ("skolem b(0) := exists x. x < 1\ncrit existence b() witness 0\n", 0),
        ("skolem c(0) := exists x. x < 3\ncrit induction c() bound 5\n", 2),
    ];
    let mut failures = Vec::new();
    let mut got = Vec::new();
    for (text, expected) in cases {
        let inst = parse_instance(text).unwrap();
        let cr = &inst.crs[0];
        let key = cr.key_canon().unwrap();
        let scan = (0..=100).find(|v| holds(&key.func.at(*v, &key.args), &BTreeMap::new()));
        let w = solve(&inst.crs, &debug_opts())
            .map_err(|e| e.to_string())
            .and_then(|r| extract_witness(&r.substitution, &inst.crs, 0).map_err(|e| e.to_string()));
        match w {
            Ok(w) => {
                got.push(w.to_string());
                if w != expected || scan != Some(expected) || !holds(&key.func.at(w, &key.args), &BTreeMap::new()) {
                    failures.push(format!("{key}: witness {w}, scan {scan:?}, expected {expected}"));
                }
            }
            Err(e) => failures.push(format!("{key}: {e}")),
        }
    }
    report(failures, format!("witnesses {}", got.join(", ")), true)
}

fn main() {
    let instances = sweep_instances();
    let sweep: Vec<Solved> = instances
        .iter()
        .map(|(n, i)| solve_timed(n.clone(), i.crs.clone(), &SolveOptions::default()))
        .collect();
    let rank_two_inst = rank_two_instances();
    let rank_two: Vec<Solved> = rank_two_inst
        .iter()
        .map(|(n, i)| solve_timed(n.clone(), i.crs.clone(), &SolveOptions::default()))
        .collect();
    let everything: Vec<Solved> = sweep.into_iter().chain(rank_two).collect();
    let (sweep, rank_two) = everything.split_at(instances.len());
    let all_instances: Vec<(String, Instance)> = instances.iter().cloned().chain(rank_two_inst).collect();

    let results = [
        ("rank-1 soundness sweep", criterion_1(sweep)),
        ("finite-injury certification", criterion_2(sweep)),
        ("rank-1 lambda cross-check", criterion_3(&instances)),
        ("rank-2 instances", criterion_4(rank_two)),
        ("ordinal descent", criterion_5(&everything)),
        ("semantics properties", criterion_6()),
        ("Kleene-Brouwer equivalence", criterion_7()),
        ("correctness preservation", criterion_8(&all_instances)),
        ("witness extraction", criterion_9()),
    ];
    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        println!(
            "criterion {} {:<30} {}  {}",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += !o.pass as usize;
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
