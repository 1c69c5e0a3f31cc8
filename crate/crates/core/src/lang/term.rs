use std::fmt;
use std::sync::Arc;

use super::skolem::SkolemFunction;

/// A variable inside a Skolem function matrix: the distinguished bound
/// variable `x` or one of the parameters `y1..yk` (stored zero-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Bound,
    Param(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Bound => write!(f, "x"),
            Var::Param(i) => write!(f, "y{}", i + 1),
        }
    }
}

/// Terms of the Skolemized language.
///
/// `Num(n)` is the numeral `S^n 0`. Constructors keep the representation
/// normal: a successor applied to a numeral is folded into the numeral, so
/// a term is a numeral exactly when it is `Num`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Num(u64),
    Succ(Box<Term>),
    App(Arc<SkolemFunction>, Vec<Term>),
    Var(Var),
}

impl Term {
    pub fn zero() -> Term {
        Term::Num(0)
    }

    pub fn num(n: u64) -> Term {
        Term::Num(n)
    }

    pub fn succ(t: Term) -> Term {
        match t {
            Term::Num(n) => Term::Num(n + 1),
            other => Term::Succ(Box::new(other)),
        }
    }

    pub fn var(v: Var) -> Term {
        Term::Var(v)
    }

    pub fn app(func: Arc<SkolemFunction>, args: Vec<Term>) -> Result<Term, super::LangError> {
        if func.arity() != args.len() {
            return Err(super::LangError::Arity {
                expected: func.arity(),
                found: args.len(),
            });
        }
        Ok(Term::App(func, args))
    }

    pub fn as_num(&self) -> Option<u64> {
        match self {
            Term::Num(n) => Some(*n),
            _ => None,
        }
    }

    pub fn is_numeral(&self) -> bool {
        matches!(self, Term::Num(_))
    }

    /// A Skolem function applied to numerals only.
    pub fn is_canonical(&self) -> bool {
        match self {
            Term::App(_, args) => args.iter().all(Term::is_numeral),
            _ => false,
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Term::Num(_) | Term::Var(_) => 0,
            Term::Succ(t) => t.rank(),
            Term::App(f, args) => args.iter().map(Term::rank).fold(f.rank(), usize::max),
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Num(_) => true,
            Term::Var(_) => false,
            Term::Succ(t) => t.is_closed(),
            Term::App(_, args) => args.iter().all(Term::is_closed),
        }
    }

    /// Replaces variables; nested Skolem matrices are separate scopes and
    /// are left untouched.
    pub fn substitute(&self, bound: &Term, params: &[Term]) -> Term {
        match self {
            Term::Num(n) => Term::Num(*n),
            Term::Succ(t) => Term::succ(t.substitute(bound, params)),
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|a| a.substitute(bound, params)).collect(),
            ),
            Term::Var(Var::Bound) => bound.clone(),
            Term::Var(Var::Param(i)) => params[*i].clone(),
        }
    }

    /// Visits every subterm, children before parents, left to right.
    pub fn visit_post_order<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        match self {
            Term::Succ(t) => t.visit_post_order(f),
            Term::App(_, args) => {
                for a in args {
                    a.visit_post_order(f);
                }
            }
            Term::Num(_) | Term::Var(_) => {}
        }
        f(self)
    }

    pub(crate) fn max_var(&self, acc: &mut Option<Var>) {
        self.visit_post_order(&mut |t| {
            if let Term::Var(v) = t {
                if acc.is_none_or(|cur| *v > cur) {
                    *acc = Some(*v);
                }
            }
        });
    }
}

/// A canonical Skolem term `c(n1, .., nk)`, the key type of substitutions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Canon {
    pub func: Arc<SkolemFunction>,
    pub args: Vec<u64>,
}

impl Canon {
    pub fn new(func: Arc<SkolemFunction>, args: Vec<u64>) -> Result<Canon, super::LangError> {
        if func.arity() != args.len() {
            return Err(super::LangError::Arity {
                expected: func.arity(),
                found: args.len(),
            });
        }
        Ok(Canon { func, args })
    }

    pub fn from_term(t: &Term) -> Option<Canon> {
        match t {
            Term::App(f, args) => {
                let nums = args.iter().map(Term::as_num).collect::<Option<Vec<_>>>()?;
                Some(Canon {
                    func: f.clone(),
                    args: nums,
                })
            }
            _ => None,
        }
    }

    pub fn to_term(&self) -> Term {
        Term::App(
            self.func.clone(),
            self.args.iter().map(|n| Term::Num(*n)).collect(),
        )
    }

    pub fn rank(&self) -> usize {
        self.func.rank()
    }
}

impl fmt::Display for Canon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Num(n) => write!(f, "{n}"),
            Term::Succ(t) => write!(f, "S {t}"),
            Term::Var(v) => write!(f, "{v}"),
            Term::App(func, args) => {
                write!(f, "{func}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}
