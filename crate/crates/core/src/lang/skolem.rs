use std::fmt;
use std::sync::{Arc, OnceLock};

use super::formula::Formula;
use super::term::{Term, Var};
use super::LangError;

/// A Skolem function `c_{exists x. matrix}` of arity `k`.
///
/// Identity is structural: two functions are equal when their matrices
/// (with the bound variable and parameters in canonical positions) and
/// arities coincide. Display names given in instance files are not part
/// of the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SkolemFunction {
    rank: usize,
    arity: usize,
    matrix: Formula,
}

impl SkolemFunction {
    /// Fails when the matrix mentions a parameter beyond the arity.
    pub fn new(matrix: Formula, arity: usize) -> Result<Arc<SkolemFunction>, LangError> {
        let mut max = None;
        matrix.for_each_term(&mut |t| t.max_var(&mut max));
        if let Some(Var::Param(i)) = max {
            if i >= arity {
                return Err(LangError::UnboundParameter { index: i, arity });
            }
        }
        Ok(Arc::new(SkolemFunction {
            rank: matrix.rank() + 1,
            arity,
            matrix,
        }))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix(&self) -> &Formula {
        &self.matrix
    }

    /// `matrix[x := value, y := params]`.
    pub fn instantiate(&self, value: &Term, params: &[Term]) -> Result<Formula, LangError> {
        if params.len() != self.arity {
            return Err(LangError::Arity {
                expected: self.arity,
                found: params.len(),
            });
        }
        Ok(self.matrix.substitute(value, params))
    }

    /// Instantiation at numerals; arity is the caller's responsibility.
    pub fn at(&self, value: u64, params: &[u64]) -> Formula {
        let params: Vec<Term> = params.iter().map(|n| Term::Num(*n)).collect();
        self.matrix.substitute(&Term::Num(value), &params)
    }

    /// The normalization condition on Skolem matrices: with every
    /// parameter set to `0` the matrix contains no closed Skolem term.
    pub fn is_normalized(&self) -> bool {
        let zeros = vec![Term::zero(); self.arity];
        let inst = self.matrix.substitute(&Term::Var(Var::Bound), &zeros);
        let mut ok = true;
        inst.for_each_term(&mut |t| {
            t.visit_post_order(&mut |s| {
                if matches!(s, Term::App(..)) && s.is_closed() {
                    ok = false;
                }
            })
        });
        ok
    }
}

/// `exists x. phi` read as `phi[c(args), args]`.
pub fn expand_exists(sk: &Arc<SkolemFunction>, args: &[Term]) -> Result<Formula, LangError> {
    let key = Term::app(sk.clone(), args.to_vec())?;
    sk.instantiate(&key, args)
}

/// The predecessor function `c_{exists x. y1 = S x}`.
pub fn predecessor_fn() -> Arc<SkolemFunction> {
    static PRED: OnceLock<Arc<SkolemFunction>> = OnceLock::new();
    PRED.get_or_init(|| {
        let m = Formula::eq(Term::Var(Var::Param(0)), Term::succ(Term::Var(Var::Bound)));
        SkolemFunction::new(m, 1).expect("well-formed predecessor matrix")
    })
    .clone()
}

/// The least-witness function `c_{exists x. phi(x) & !phi(S x)}` paired
/// with `base = c_{exists x. phi}`.
pub fn least_witness_fn(base: &SkolemFunction) -> Arc<SkolemFunction> {
    let params: Vec<Term> = (0..base.arity).map(|i| Term::Var(Var::Param(i))).collect();
    let here = base.matrix.clone();
    let next = base
        .matrix
        .substitute(&Term::succ(Term::Var(Var::Bound)), &params)
        .negate();
    SkolemFunction::new(Formula::and(here, next), base.arity).expect("arity preserved")
}

impl fmt::Display for SkolemFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c_{{exists x. {}}}", self.matrix)
    }
}
