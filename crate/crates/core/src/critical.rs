//! Critical formulas: the three axiom shapes whose satisfaction the engine
//! is after, together with key terms, reduced forms and witness search.
//!
//! Every critical formula is viewed as `phi -> psi[c]` where `c` is the key
//! term `key_fn(params)` and `psi[t]` is the key function's matrix at `t`:
//!
//! | variant     | `phi`                        | key function                     |
//! |-------------|------------------------------|----------------------------------|
//! | existence   | `m[w, t]`                    | `c_{exists x. m}`                |
//! | induction   | `m[0, t] & !m[b, t]`         | `c_{exists x. m(x) & !m(S x)}`   |
//! | predecessor | `!(s = 0)`                   | `c_{exists x. y1 = S x}` at `s`  |

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::lang::{least_witness_fn, predecessor_fn, Canon, Formula, LangError, Pred, SkolemFunction, Term};
use crate::subst::{min_witness_formula, EpsSubstitution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriticalError {
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error("critical formula is not falsified by the standard extension")]
    NotFalsified,
    #[error("witness bound {0} does not evaluate to a numeral")]
    UnboundedSearch(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CriticalKind {
    Existence { witness: Term },
    Induction { base: Arc<SkolemFunction>, bound: Term },
    Predecessor,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CriticalFormula {
    kind: CriticalKind,
    key_fn: Arc<SkolemFunction>,
    params: Vec<Term>,
}

/// The key function and parameters of a critical formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyTermInfo {
    pub key_fn: Arc<SkolemFunction>,
    pub params: Vec<Term>,
}

/// Outcome of scanning `psi[0], psi[1], ..` for the least witness under a
/// partial substitution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessScan {
    /// `S |= psi[[n]]`.
    Found(u64),
    /// `psi[index]` is undecided; `term` is its leftmost-innermost
    /// unevaluated canonical term.
    Blocked { index: u64, term: Canon },
    /// Every instance up to the limit is decided false.
    Exhausted,
}

impl CriticalFormula {
    /// `m[w, t] -> m[c(t), t]`.
    pub fn existence(func: Arc<SkolemFunction>, witness: Term, params: Vec<Term>) -> Result<Self, LangError> {
        check_arity(&func, &params)?;
        Ok(CriticalFormula {
            kind: CriticalKind::Existence { witness },
            key_fn: func,
            params,
        })
    }

    /// `m[0, t] & !m[b, t] -> m[c, t] & !m[S c, t]` with `c` the least-witness
    /// function paired with `base`.
    pub fn induction(base: Arc<SkolemFunction>, bound: Term, params: Vec<Term>) -> Result<Self, LangError> {
        check_arity(&base, &params)?;
        Ok(CriticalFormula {
            key_fn: least_witness_fn(&base),
            kind: CriticalKind::Induction { base, bound },
            params,
        })
    }

    /// `!(s = 0) -> s = S c(s)`.
    pub fn predecessor(subject: Term) -> Self {
        CriticalFormula {
            kind: CriticalKind::Predecessor,
            key_fn: predecessor_fn(),
            params: vec![subject],
        }
    }

    pub fn kind(&self) -> &CriticalKind {
        &self.kind
    }

    pub fn key_fn(&self) -> &Arc<SkolemFunction> {
        &self.key_fn
    }

    pub fn params(&self) -> &[Term] {
        &self.params
    }

    pub fn key_info(&self) -> KeyTermInfo {
        KeyTermInfo {
            key_fn: self.key_fn.clone(),
            params: self.params.clone(),
        }
    }

    /// The designated Skolem function named in the formula: the existence
    /// function, the induction base, or the predecessor function.
    pub fn named_fn(&self) -> &Arc<SkolemFunction> {
        match &self.kind {
            CriticalKind::Induction { base, .. } => base,
            _ => &self.key_fn,
        }
    }

    pub fn key_term(&self) -> Term {
        Term::App(self.key_fn.clone(), self.params.clone())
    }

    pub fn hypothesis(&self) -> Formula {
        match &self.kind {
            CriticalKind::Existence { witness } => self.key_fn.matrix().substitute(witness, &self.params),
            CriticalKind::Induction { base, bound } => Formula::and(
                base.matrix().substitute(&Term::zero(), &self.params),
                base.matrix().substitute(bound, &self.params).negate(),
            ),
            CriticalKind::Predecessor => {
                Formula::NegAtom(Pred::Eq, vec![self.params[0].clone(), Term::zero()])
            }
        }
    }

    /// `psi[t]`.
    pub fn conclusion_at(&self, t: &Term) -> Formula {
        self.key_fn.matrix().substitute(t, &self.params)
    }

    /// `phi -> psi[t]`.
    pub fn formula_at(&self, t: &Term) -> Formula {
        Formula::implies(self.hypothesis(), self.conclusion_at(t))
    }

    /// The critical formula itself, `phi -> psi[c]`.
    pub fn formula(&self) -> Formula {
        self.formula_at(&self.key_term())
    }

    pub fn rank(&self) -> usize {
        self.formula().rank()
    }

    /// Replaces every parameter, witness, bound and subject by its value
    /// under the extended evaluation. The key function is unchanged.
    pub fn reduce(&self, s: &EpsSubstitution) -> CriticalFormula {
        let kind = match &self.kind {
            CriticalKind::Existence { witness } => CriticalKind::Existence {
                witness: s.eval_term(witness),
            },
            CriticalKind::Induction { base, bound } => CriticalKind::Induction {
                base: base.clone(),
                bound: s.eval_term(bound),
            },
            CriticalKind::Predecessor => CriticalKind::Predecessor,
        };
        CriticalFormula {
            kind,
            key_fn: self.key_fn.clone(),
            params: self.params.iter().map(|p| s.eval_term(p)).collect(),
        }
    }

    /// The key term at the evaluated parameters.
    pub fn key_term_at(&self, s: &EpsSubstitution) -> Term {
        Term::App(
            self.key_fn.clone(),
            self.params.iter().map(|p| s.eval_term(p)).collect(),
        )
    }

    pub fn key_canon_at(&self, s: &EpsSubstitution) -> Option<Canon> {
        Canon::from_term(&self.key_term_at(s))
    }

    /// The key term when the parameters are already numerals.
    pub fn key_canon(&self) -> Option<Canon> {
        Canon::from_term(&self.key_term())
    }

    pub fn params_numeric(&self) -> Option<Vec<u64>> {
        self.params.iter().map(Term::as_num).collect()
    }

    /// The value the key takes when its default is filled in: the stored
    /// value if the key is in the domain (`?` reads as 0), otherwise 0.
    pub fn key_default(&self, s: &EpsSubstitution) -> Term {
        let v = self
            .key_canon_at(s)
            .and_then(|k| s.get(&k))
            .map_or(0, |v| v.numeral());
        Term::Num(v)
    }

    /// `phi -> psi[v]` with `v` the key's defaulted value.
    pub fn formula_with_key_default(&self, s: &EpsSubstitution) -> Formula {
        self.formula_at(&self.key_default(s))
    }

    /// Upper bound on the least witness when the hypothesis holds, as a
    /// (possibly unevaluated) term: the witness, the induction bound, or
    /// the subject.
    pub fn bound_term(&self) -> &Term {
        match &self.kind {
            CriticalKind::Existence { witness } => witness,
            CriticalKind::Induction { bound, .. } => bound,
            CriticalKind::Predecessor => &self.params[0],
        }
    }

    /// Scans `psi[0], psi[1], ..` under the partial substitution `s`.
    pub fn scan(&self, s: &EpsSubstitution, limit: u64) -> WitnessScan {
        scan_instances(s, limit, |n| self.conclusion_at(&Term::Num(n)))
    }

    /// The bound term's value under `s`, when it is a numeral.
    pub fn bound_at(&self, s: &EpsSubstitution) -> Option<u64> {
        s.eval_term(self.bound_term()).as_num()
    }
}

fn check_arity(func: &SkolemFunction, params: &[Term]) -> Result<(), LangError> {
    if func.arity() != params.len() {
        return Err(LangError::Arity {
            expected: func.arity(),
            found: params.len(),
        });
    }
    Ok(())
}

/// Least `n <= limit` with `s |= sk[[n, params]]`, stopping at the first
/// undecided instance.
pub fn scan_witness(s: &EpsSubstitution, sk: &Arc<SkolemFunction>, params: &[u64], limit: u64) -> WitnessScan {
    scan_instances(s, limit, |n| sk.at(n, params))
}

fn scan_instances(s: &EpsSubstitution, limit: u64, inst: impl Fn(u64) -> Formula) -> WitnessScan {
    for n in 0..=limit {
        let f = inst(n);
        if s.models(&f) {
            return WitnessScan::Found(n);
        }
        if !s.models(&f.negate()) {
            let term = s
                .unev(&f)
                .into_iter()
                .next()
                .expect("an undecided formula has an unevaluated term");
            return WitnessScan::Blocked { index: n, term };
        }
    }
    WitnessScan::Exhausted
}

/// `S-bar |= Cr` for every formula of the instance.
pub fn is_solving(s: &EpsSubstitution, crs: &[CriticalFormula]) -> bool {
    crs.iter().all(|cr| s.models_bar(&cr.formula()))
}

/// Least witness for a critical formula falsified by the standard
/// extension, searched up to the variant's bound.
pub fn find_minimal_witness(s: &EpsSubstitution, cr: &CriticalFormula) -> Result<Option<u64>, CriticalError> {
    if !s.models_bar(&cr.formula().negate()) {
        return Err(CriticalError::NotFalsified);
    }
    let bound = s
        .eval_term_bar(cr.bound_term())
        .as_num()
        .ok_or_else(|| CriticalError::UnboundedSearch(cr.bound_term().to_string()))?;
    if let CriticalKind::Predecessor = cr.kind {
        // the hypothesis forces the subject to be positive
        return Ok(Some(bound - 1));
    }
    let params: Vec<u64> = cr
        .params
        .iter()
        .map(|p| s.eval_term_bar(p).as_num().expect("closed terms evaluate to numerals"))
        .collect();
    Ok((0..=bound).find(|v| s.models_bar(&min_witness_formula(&cr.key_fn, *v, &params))))
}

impl fmt::Display for CriticalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
            for (i, p) in self.params.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{p}")?;
            }
            Ok(())
        };
        match &self.kind {
            CriticalKind::Existence { witness } => {
                write!(f, "existence {}(", self.key_fn)?;
                args(f)?;
                write!(f, ") witness {witness}")
            }
            CriticalKind::Induction { base, bound } => {
                write!(f, "induction {base}(")?;
                args(f)?;
                write!(f, ") bound {bound}")
            }
            CriticalKind::Predecessor => write!(f, "pred {}", self.params[0]),
        }
    }
}
