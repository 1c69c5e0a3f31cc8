use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::term::Term;

/// A user-registered total computable predicate of fixed arity.
///
/// Identity is the `(name, arity)` pair; the evaluation function is not
/// compared.
#[derive(Clone)]
pub struct UserPredicate {
    name: Arc<str>,
    arity: usize,
    eval: fn(&[u64]) -> bool,
}

impl UserPredicate {
    pub fn new(name: &str, arity: usize, eval: fn(&[u64]) -> bool) -> Self {
        UserPredicate {
            name: Arc::from(name),
            arity,
            eval,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }
}

impl fmt::Debug for UserPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

impl PartialEq for UserPredicate {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.arity == other.arity
    }
}

impl Eq for UserPredicate {}

impl Hash for UserPredicate {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.name.hash(state);
        self.arity.hash(state);
    }
}

impl PartialOrd for UserPredicate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for UserPredicate {
    fn cmp(&self, other: &Self) -> Ordering {
        (&*self.name, self.arity).cmp(&(&*other.name, other.arity))
    }
}

/// Decidable atomic predicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pred {
    Eq,
    Lt,
    Le,
    User(UserPredicate),
}

impl Pred {
    pub fn arity(&self) -> usize {
        match self {
            Pred::Eq | Pred::Lt | Pred::Le => 2,
            Pred::User(u) => u.arity,
        }
    }

    /// Truth in the standard model.
    pub fn holds(&self, args: &[u64]) -> bool {
        match self {
            Pred::Eq => args[0] == args[1],
            Pred::Lt => args[0] < args[1],
            Pred::Le => args[0] <= args[1],
            Pred::User(u) => (u.eval)(args),
        }
    }

    fn infix(&self) -> Option<&'static str> {
        match self {
            Pred::Eq => Some("="),
            Pred::Lt => Some("<"),
            Pred::Le => Some("<="),
            Pred::User(_) => None,
        }
    }
}

/// Quantifier-free formulas in negation normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Pred, Vec<Term>),
    NegAtom(Pred, Vec<Term>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(pred: Pred, args: Vec<Term>) -> Formula {
        debug_assert_eq!(pred.arity(), args.len());
        Formula::Atom(pred, args)
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Atom(Pred::Eq, vec![a, b])
    }

    pub fn lt(a: Term, b: Term) -> Formula {
        Formula::Atom(Pred::Lt, vec![a, b])
    }

    pub fn le(a: Term, b: Term) -> Formula {
        Formula::Atom(Pred::Le, vec![a, b])
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// `a -> b`, stored as `negate(a) | b`.
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(a.negate(), b)
    }

    /// Right-nested conjunction; `None` for an empty iterator.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        let mut parts: Vec<Formula> = parts.into_iter().collect();
        let mut acc = parts.pop()?;
        while let Some(p) = parts.pop() {
            acc = Formula::and(p, acc);
        }
        Some(acc)
    }

    /// Negation normal form of the negation. Involutive.
    pub fn negate(&self) -> Formula {
        match self {
            Formula::Atom(p, a) => Formula::NegAtom(p.clone(), a.clone()),
            Formula::NegAtom(p, a) => Formula::Atom(p.clone(), a.clone()),
            Formula::And(a, b) => Formula::or(a.negate(), b.negate()),
            Formula::Or(a, b) => Formula::and(a.negate(), b.negate()),
        }
    }

    pub fn rank(&self) -> usize {
        let mut r = 0;
        self.for_each_term(&mut |t| r = r.max(t.rank()));
        r
    }

    pub fn is_closed(&self) -> bool {
        let mut closed = true;
        self.for_each_term(&mut |t| closed &= t.is_closed());
        closed
    }

    pub fn substitute(&self, bound: &Term, params: &[Term]) -> Formula {
        match self {
            Formula::Atom(p, a) => Formula::Atom(
                p.clone(),
                a.iter().map(|t| t.substitute(bound, params)).collect(),
            ),
            Formula::NegAtom(p, a) => Formula::NegAtom(
                p.clone(),
                a.iter().map(|t| t.substitute(bound, params)).collect(),
            ),
            Formula::And(a, b) => Formula::and(a.substitute(bound, params), b.substitute(bound, params)),
            Formula::Or(a, b) => Formula::or(a.substitute(bound, params), b.substitute(bound, params)),
        }
    }

    /// Visits the top-level argument terms of every atom, left to right.
    pub fn for_each_term<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        match self {
            Formula::Atom(_, args) | Formula::NegAtom(_, args) => args.iter().for_each(f),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.for_each_term(f);
                b.for_each_term(f);
            }
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        match self {
            Formula::Atom(p, args) => fmt_atom(f, p, args),
            Formula::NegAtom(p, args) => {
                write!(f, "!(")?;
                fmt_atom(f, p, args)?;
                write!(f, ")")
            }
            Formula::And(a, b) => {
                if parens {
                    write!(f, "(")?;
                }
                // `&` is right associative and binds tighter than `|`.
                a.fmt_prec(f, matches!(**a, Formula::And(..) | Formula::Or(..)))?;
                write!(f, " & ")?;
                b.fmt_prec(f, matches!(**b, Formula::Or(..)))?;
                if parens {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Formula::Or(a, b) => {
                if parens {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, matches!(**a, Formula::Or(..)))?;
                write!(f, " | ")?;
                b.fmt_prec(f, false)?;
                if parens {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

fn fmt_atom(f: &mut fmt::Formatter<'_>, p: &Pred, args: &[Term]) -> fmt::Result {
    match p.infix() {
        Some(op) => write!(f, "{} {} {}", args[0], op, args[1]),
        None => {
            write!(f, "{}(", p_name(p))?;
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

fn p_name(p: &Pred) -> &str {
    match p {
        Pred::User(u) => u.name(),
        _ => unreachable!("infix predicates are printed inline"),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}
