//! Random rank-1 instances built from a few matrix templates.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::critical::CriticalFormula;
use crate::lang::{Formula, SkolemFunction, Term, Var};

use super::parse::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenParams {
    /// Number of critical formulas.
    pub formulas: usize,
    /// Every least witness, witness term and bound stays at or below this.
    pub max_witness: u64,
    /// Size of the Skolem function pool; a small pool makes shared key
    /// terms likely.
    pub functions: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            formulas: 6,
            max_witness: 20,
            functions: 3,
        }
    }
}

fn x() -> Term {
    Term::var(Var::Bound)
}

fn y(i: usize) -> Term {
    Term::var(Var::Param(i))
}

fn s_pow(t: Term, k: u64) -> Term {
    (0..k).fold(t, |t, _| Term::succ(t))
}

/// A matrix template together with the largest parameter value that keeps
/// its least witness within `max_witness`.
fn template(rng: &mut ChaCha8Rng, w: u64) -> (Formula, usize, u64) {
    let k = rng.gen_range(0..=w / 2);
    match rng.gen_range(0..6) {
        0 => (Formula::eq(x(), Term::num(rng.gen_range(0..=w))), 0, 0),
        1 => (Formula::le(Term::num(rng.gen_range(0..=w)), x()), 0, 0),
        2 => (Formula::eq(x(), s_pow(y(0), k)), 1, w - k),
        3 => (Formula::lt(y(0), x()), 1, w.saturating_sub(1)),
        4 => {
            let a = rng.gen_range(0..=w);
            let b = rng.gen_range(0..=w);
            (Formula::or(Formula::eq(x(), Term::num(a)), Formula::eq(x(), Term::num(b))), 0, 0)
        }
        _ => (Formula::and(Formula::le(y(0), x()), Formula::le(y(1), x())), 2, w),
    }
}

/// The least-witness induction needs a matrix that holds at 0; these are
/// initial segments `x < k` and `x <= y1`.
fn induction_base(rng: &mut ChaCha8Rng, w: u64) -> (Formula, usize, u64) {
    if rng.gen_bool(0.5) {
        (Formula::lt(x(), Term::num(rng.gen_range(1..=w.max(1)))), 0, 0)
    } else {
        (Formula::le(x(), y(0)), 1, w)
    }
}

fn params(rng: &mut ChaCha8Rng, arity: usize, max: u64) -> Vec<Term> {
    (0..arity).map(|_| Term::num(rng.gen_range(0..=max.min(5)))).collect()
}

/// A reproducible random instance: the same seed and parameters give the
/// same instance.
pub fn generate(seed: u64, p: &GenParams) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = p.max_witness;
    let mut pool: Vec<(Arc<SkolemFunction>, u64)> = Vec::new();
    let mut bases: Vec<(Arc<SkolemFunction>, u64)> = Vec::new();
    let mut skolems = Vec::new();
    let mut declare = |(m, arity, max): (Formula, usize, u64), list: &mut Vec<(Arc<SkolemFunction>, u64)>| {
        let f = SkolemFunction::new(m, arity).expect("templates respect their arity");
        if !skolems.iter().any(|(_, g): &(String, Arc<SkolemFunction>)| *g == f) {
            skolems.push((format!("f{}", skolems.len()), f.clone()));
        }
        list.push((f, max));
    };
    for _ in 0..p.functions.max(1) {
        declare(template(&mut rng, w), &mut pool);
    }
    declare(induction_base(&mut rng, w), &mut bases);

    let mut crs = Vec::with_capacity(p.formulas);
    for _ in 0..p.formulas {
        let cr = match rng.gen_range(0..5) {
            0..=2 => {
                let (f, max) = pool.choose(&mut rng).expect("pool is nonempty").clone();
                let args = params(&mut rng, f.arity(), max);
                CriticalFormula::existence(f, Term::num(rng.gen_range(0..=w)), args)
            }
            3 => {
                let (f, max) = bases[0].clone();
                let args = params(&mut rng, f.arity(), max);
                CriticalFormula::induction(f, Term::num(rng.gen_range(0..=w)), args)
            }
            _ => Ok(CriticalFormula::predecessor(Term::num(rng.gen_range(0..=w)))),
        };
        crs.push(cr.expect("arguments match the arity"));
    }
    Instance { skolems, crs }
}
