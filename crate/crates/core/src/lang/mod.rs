//! Syntax of the quantifier-free Skolemized language: terms, formulas in
//! negation normal form, Skolem functions and ranks.
//!
//! Variables only occur inside Skolem function matrices. Everything the
//! engine evaluates is closed.

mod formula;
mod skolem;
mod term;

use thiserror::Error;

pub use formula::{Formula, Pred, UserPredicate};
pub use skolem::{expand_exists, least_witness_fn, predecessor_fn, SkolemFunction};
pub use term::{Canon, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("arity mismatch: expected {expected} arguments, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("matrix mentions parameter y{} but the function has arity {arity}", index + 1)]
    UnboundParameter { index: usize, arity: usize },
}

/// Anything carrying a rank: the least `n` with the item in the `n`-th
/// layer of the language.
pub trait Ranked {
    fn rank(&self) -> usize;
}

impl Ranked for Term {
    fn rank(&self) -> usize {
        Term::rank(self)
    }
}

impl Ranked for Formula {
    fn rank(&self) -> usize {
        Formula::rank(self)
    }
}

impl Ranked for SkolemFunction {
    fn rank(&self) -> usize {
        SkolemFunction::rank(self)
    }
}

impl Ranked for Canon {
    fn rank(&self) -> usize {
        Canon::rank(self)
    }
}
