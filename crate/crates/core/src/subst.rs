//! Epsilon-substitutions as finite partial models.
//!
//! An [`EpsSubstitution`] maps canonical Skolem terms to a numeral or the
//! default symbol `?`. Evaluation comes in two flavours: the partial
//! evaluation [`EpsSubstitution::eval_term`], which leaves terms outside the
//! domain unevaluated, and the standard extension (`*_bar` methods), which
//! treats every canonical term outside the domain as mapped to `?`.

use std::collections::btree_map::{self, BTreeMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::lang::{Canon, Formula, SkolemFunction, Term};

/// The value of a canonical term: a numeral or the default `?`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Num(u64),
    Default,
}

impl Value {
    /// The numeral a value evaluates to; `?` evaluates to `0`.
    pub fn numeral(self) -> u64 {
        match self {
            Value::Num(n) => n,
            Value::Default => 0,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(n) => write!(f, "{n}"),
            Value::Default => write!(f, "?"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("{term} is already assigned {existing}, cannot assign {new}")]
    Conflict {
        term: String,
        existing: Value,
        new: Value,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Closure {
    Partial,
    Standard,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct EpsSubstitution {
    entries: BTreeMap<Canon, Value>,
}

impl EpsSubstitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &Canon) -> Option<Value> {
        self.entries.get(key).copied()
    }

    pub fn contains(&self, key: &Canon) -> bool {
        self.entries.contains_key(key)
    }

    pub fn iter(&self) -> btree_map::Iter<'_, Canon, Value> {
        self.entries.iter()
    }

    /// The value under the standard extension: `?` outside the domain.
    pub fn get_bar(&self, key: &Canon) -> Value {
        self.get(key).unwrap_or(Value::Default)
    }

    /// Set-union with a single pair. Re-adding an identical pair is a no-op;
    /// a different value for a key in the domain is an error.
    pub fn insert(&mut self, key: Canon, value: Value) -> Result<(), SubstError> {
        match self.entries.get(&key) {
            Some(existing) if *existing != value => Err(SubstError::Conflict {
                term: key.to_string(),
                existing: *existing,
                new: value,
            }),
            Some(_) => Ok(()),
            None => {
                self.entries.insert(key, value);
                Ok(())
            }
        }
    }

    pub fn with(&self, key: Canon, value: Value) -> Result<Self, SubstError> {
        let mut s = self.clone();
        s.insert(key, value)?;
        Ok(s)
    }

    /// Overwrites an entry. Used for perturbation and hand-editing.
    pub fn set(&mut self, key: Canon, value: Value) {
        self.entries.insert(key, value);
    }

    pub fn remove(&mut self, key: &Canon) -> Option<Value> {
        self.entries.remove(key)
    }

    pub fn max_rank(&self) -> usize {
        self.entries.keys().map(Canon::rank).max().unwrap_or(0)
    }

    /// Entries whose key has rank at most `r`.
    pub fn restrict_rank(&self, r: usize) -> EpsSubstitution {
        EpsSubstitution {
            entries: self
                .entries
                .iter()
                .filter(|(k, _)| k.rank() <= r)
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        }
    }

    fn eval(&self, t: &Term, mode: Closure) -> Term {
        match t {
            Term::Num(n) => Term::Num(*n),
            Term::Succ(inner) => Term::succ(self.eval(inner, mode)),
            Term::Var(_) => t.clone(),
            Term::App(f, args) => {
                let vals: Vec<Term> = args.iter().map(|a| self.eval(a, mode)).collect();
                let Some(nums) = vals.iter().map(Term::as_num).collect::<Option<Vec<u64>>>() else {
                    return Term::App(f.clone(), vals);
                };
                let key = Canon {
                    func: f.clone(),
                    args: nums,
                };
                match (self.entries.get(&key), mode) {
                    (Some(v), _) => Term::Num(v.numeral()),
                    (None, Closure::Standard) => Term::Num(0),
                    (None, Closure::Partial) => key.to_term(),
                }
            }
        }
    }

    /// The extended evaluation of a closed term. The result is a numeral
    /// or contains an unevaluated canonical Skolem application.
    pub fn eval_term(&self, t: &Term) -> Term {
        self.eval(t, Closure::Partial)
    }

    /// Evaluation under the standard extension; always a numeral for
    /// closed terms.
    pub fn eval_term_bar(&self, t: &Term) -> Term {
        self.eval(t, Closure::Standard)
    }

    fn sat(&self, phi: &Formula, mode: Closure) -> bool {
        match phi {
            Formula::Atom(p, args) | Formula::NegAtom(p, args) => {
                let mut nums = Vec::with_capacity(args.len());
                for a in args {
                    match self.eval(a, mode).as_num() {
                        Some(n) => nums.push(n),
                        None => return false,
                    }
                }
                p.holds(&nums) == matches!(phi, Formula::Atom(..))
            }
            Formula::And(a, b) => self.sat(a, mode) && self.sat(b, mode),
            Formula::Or(a, b) => self.sat(a, mode) || self.sat(b, mode),
        }
    }

    /// `S |= phi` for a closed formula in negation normal form.
    pub fn models(&self, phi: &Formula) -> bool {
        self.sat(phi, Closure::Partial)
    }

    pub fn decides(&self, phi: &Formula) -> bool {
        self.models(phi) || self.models(&phi.negate())
    }

    /// Satisfaction under the standard extension. Only the finitely many
    /// canonical terms met during evaluation receive the default.
    pub fn models_bar(&self, phi: &Formula) -> bool {
        self.sat(phi, Closure::Standard)
    }

    /// Canonical terms met in `phi` whose arguments evaluate to numerals
    /// but which are outside the domain. Ordered leftmost-innermost, without
    /// duplicates.
    pub fn unev(&self, phi: &Formula) -> Vec<Canon> {
        let mut out: Vec<Canon> = Vec::new();
        phi.for_each_term(&mut |t| {
            t.visit_post_order(&mut |s| {
                if let Term::App(f, args) = s {
                    let nums = args
                        .iter()
                        .map(|a| self.eval_term(a).as_num())
                        .collect::<Option<Vec<u64>>>();
                    if let Some(nums) = nums {
                        let key = Canon {
                            func: f.clone(),
                            args: nums,
                        };
                        if !self.entries.contains_key(&key) && !out.contains(&key) {
                            out.push(key);
                        }
                    }
                }
            })
        });
        out
    }

    /// The formulas asserting that each numeric entry is the least witness
    /// of its matrix.
    pub fn crucial_set(&self) -> Vec<Formula> {
        self.entries
            .iter()
            .filter_map(|(k, v)| match v {
                Value::Num(n) => Some(min_witness_formula(&k.func, *n, &k.args)),
                Value::Default => None,
            })
            .collect()
    }

    /// Every numeric entry is the least witness under the standard
    /// extension.
    pub fn is_correct(&self) -> bool {
        self.first_incorrect().is_none()
    }

    pub fn first_incorrect(&self) -> Option<(&Canon, u64)> {
        self.entries.iter().find_map(|(k, v)| match v {
            Value::Num(n) if !self.models_bar(&min_witness_formula(&k.func, *n, &k.args)) => {
                Some((k, *n))
            }
            _ => None,
        })
    }
}

impl FromIterator<(Canon, Value)> for EpsSubstitution {
    fn from_iter<I: IntoIterator<Item = (Canon, Value)>>(iter: I) -> Self {
        EpsSubstitution {
            entries: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for EpsSubstitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} := {v}")?;
        }
        Ok(())
    }
}

/// `phi[v, t] & !phi[0, t] & .. & !phi[v-1, t]`: `v` is the least witness.
pub fn min_witness_formula(sk: &Arc<SkolemFunction>, v: u64, params: &[u64]) -> Formula {
    let head = sk.at(v, params);
    let rest = (0..v).map(|u| sk.at(u, params).negate());
    Formula::conj(std::iter::once(head).chain(rest)).expect("non-empty conjunction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{Var, SkolemFunction};
    use proptest::prelude::*;

    fn x() -> Term {
        Term::var(Var::Bound)
    }

    fn eq_const(n: u64) -> Arc<SkolemFunction> {
        SkolemFunction::new(Formula::eq(x(), Term::num(n)), 0).unwrap()
    }

    fn canon0(f: &Arc<SkolemFunction>) -> Canon {
        Canon::new(f.clone(), vec![]).unwrap()
    }

    fn app(f: &Arc<SkolemFunction>, args: Vec<Term>) -> Term {
        Term::app(f.clone(), args).unwrap()
    }

    #[test]
    fn default_value_evaluates_to_zero() {
        let c = eq_const(5);
        let s: EpsSubstitution = [(canon0(&c), Value::Default)].into_iter().collect();
        assert_eq!(s.eval_term(&app(&c, vec![])), Term::num(0));
    }

    #[test]
    fn outside_domain_stays_unevaluated() {
        let c = eq_const(5);
        let s = EpsSubstitution::new();
        assert_eq!(s.eval_term(&app(&c, vec![])), app(&c, vec![]));
    }

    #[test]
    fn successor_of_assigned_term() {
        let c = eq_const(2);
        let s: EpsSubstitution = [(canon0(&c), Value::Num(2))].into_iter().collect();
        assert_eq!(s.eval_term(&Term::succ(app(&c, vec![]))), Term::num(3));
    }

    #[test]
    fn arguments_are_evaluated_first() {
        let c = eq_const(2);
        let d = SkolemFunction::new(Formula::eq(x(), Term::succ(Term::var(Var::Param(0)))), 1).unwrap();
        let s: EpsSubstitution = [
            (Canon::new(d.clone(), vec![2]).unwrap(), Value::Num(5)),
            (canon0(&c), Value::Num(2)),
        ]
        .into_iter()
        .collect();
        assert_eq!(s.eval_term(&app(&d, vec![app(&c, vec![])])), Term::num(5));
    }

    #[test]
    fn models_examples() {
        let c = eq_const(0);
        let atom = Formula::eq(app(&c, vec![]), Term::zero());
        let empty = EpsSubstitution::new();
        assert!(empty.models(&Formula::eq(Term::zero(), Term::zero())));
        assert!(!empty.models(&atom));
        assert!(!empty.models(&atom.negate()));
        let s: EpsSubstitution = [(canon0(&c), Value::Default)].into_iter().collect();
        assert!(s.models(&atom));
    }

    #[test]
    fn decides_examples() {
        let c = eq_const(0);
        let atom = Formula::eq(app(&c, vec![]), Term::zero());
        let empty = EpsSubstitution::new();
        assert!(!empty.decides(&atom));
        let disj = Formula::or(Formula::eq(Term::zero(), Term::zero()), atom.clone());
        assert!(empty.decides(&disj));
        // a substitution total on the instance decides it
        let s: EpsSubstitution = [(canon0(&c), Value::Num(4))].into_iter().collect();
        assert!(s.decides(&atom));
    }

    #[test]
    fn unev_examples() {
        let c = eq_const(0);
        let d = SkolemFunction::new(Formula::eq(x(), Term::var(Var::Param(0))), 1).unwrap();
        let atom = Formula::eq(app(&c, vec![]), Term::zero());
        let empty = EpsSubstitution::new();
        assert_eq!(empty.unev(&atom), vec![canon0(&c)]);
        let s: EpsSubstitution = [(canon0(&c), Value::Default)].into_iter().collect();
        assert!(s.unev(&atom).is_empty());
        let nested = Formula::eq(app(&d, vec![app(&c, vec![])]), Term::zero());
        assert_eq!(empty.unev(&nested), vec![canon0(&c)]);
    }

    #[test]
    fn models_bar_examples() {
        let c = eq_const(0);
        let atom = Formula::eq(app(&c, vec![]), Term::zero());
        assert!(EpsSubstitution::new().models_bar(&atom));
        let s: EpsSubstitution = [(canon0(&c), Value::Num(2))].into_iter().collect();
        assert!(!s.models_bar(&atom));
    }

    #[test]
    fn restrict_rank_examples() {
        let c1 = eq_const(1);
        let c2 = SkolemFunction::new(Formula::eq(x(), app(&c1, vec![])), 0).unwrap();
        let s: EpsSubstitution = [
            (canon0(&c1), Value::Num(1)),
            (canon0(&c2), Value::Num(1)),
        ]
        .into_iter()
        .collect();
        assert!(s.restrict_rank(0).is_empty());
        assert_eq!(s.restrict_rank(s.max_rank()), s);
        let r1 = s.restrict_rank(1);
        assert_eq!(r1.len(), 1);
        assert!(r1.contains(&canon0(&c1)));
    }

    #[test]
    fn min_witness_formula_expansion() {
        let c = eq_const(2);
        let f = min_witness_formula(&c, 2, &[]);
        let expected = Formula::conj([
            Formula::eq(Term::num(2), Term::num(2)),
            Formula::eq(Term::num(0), Term::num(2)).negate(),
            Formula::eq(Term::num(1), Term::num(2)).negate(),
        ])
        .unwrap();
        assert_eq!(f, expected);
        assert_eq!(min_witness_formula(&c, 0, &[]), Formula::eq(Term::num(0), Term::num(2)));

        let p = SkolemFunction::new(Formula::eq(x(), Term::var(Var::Param(0))), 1).unwrap();
        let g = min_witness_formula(&p, 3, &[3]);
        let expected = Formula::conj(
            std::iter::once(Formula::eq(Term::num(3), Term::num(3)))
                .chain((0..3).map(|u| Formula::eq(Term::num(u), Term::num(3)).negate())),
        )
        .unwrap();
        assert_eq!(g, expected);
    }

    #[test]
    fn crucial_set_and_correctness() {
        let c = eq_const(2);
        let q: EpsSubstitution = [(canon0(&c), Value::Default)].into_iter().collect();
        assert!(q.crucial_set().is_empty());
        assert!(EpsSubstitution::new().is_correct());
        let good: EpsSubstitution = [(canon0(&c), Value::Num(2))].into_iter().collect();
        assert_eq!(good.crucial_set().len(), 1);
        assert!(good.is_correct());
        let bad: EpsSubstitution = [(canon0(&c), Value::Num(1))].into_iter().collect();
        assert!(!bad.is_correct());
        let d = eq_const(3);
        let two: EpsSubstitution = [(canon0(&c), Value::Num(2)), (canon0(&d), Value::Num(3))]
            .into_iter()
            .collect();
        assert_eq!(two.crucial_set().len(), 2);
    }

    #[test]
    fn insert_conflict() {
        let c = eq_const(2);
        let mut s = EpsSubstitution::new();
        s.insert(canon0(&c), Value::Default).unwrap();
        s.insert(canon0(&c), Value::Default).unwrap();
        assert!(s.insert(canon0(&c), Value::Num(2)).is_err());
    }

    proptest! {
        #[test]
        fn models_bar_is_total(f in crate::lang::tests::arb_formula()) {
            let s = EpsSubstitution::new();
            prop_assert!(s.models_bar(&f) ^ s.models_bar(&f.negate()));
        }
    }
}
