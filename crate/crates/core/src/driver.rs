//! Top-level solving: pick the finite-injury path through `T1'`, compose
//! the lifts up the tower, and re-check the resulting substitution with
//! the plain semantics.

use std::fmt;

use thiserror::Error;

use crate::critical::{is_solving, CriticalFormula, WitnessScan};
use crate::injury::{BranchLabel, InjuryTrace, PathNode};
use crate::lang::Canon;
use crate::subst::{EpsSubstitution, Value};
use crate::trees::{value_branch, LevelStats, NodeLabel, TNode, Tower, TowerConfig, TowerEvent, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DriverError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("fuel exhausted after {0} path steps")]
    Fuel(u64),
    #[error("invariant violated at path step {step} ({node}): {reason}")]
    Invariant { step: usize, node: PathNode, reason: String },
    #[error("substitution failed verification\n{report}")]
    Verification { report: VerifyReport, substitution: EpsSubstitution },
}

impl DriverError {
    pub fn is_fuel(&self) -> bool {
        matches!(self, DriverError::Fuel(_) | DriverError::Tree(TreeError::Fuel { .. }))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub tower: TowerConfig,
    /// Longest run of sources allowed to share one image when checking the
    /// recorded lift chains.
    pub max_run: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tower: TowerConfig::default(),
            max_run: 64,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub path_steps: usize,
    /// Indexed by level; entry 0 is unused.
    pub levels: Vec<LevelStats>,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub substitution: EpsSubstitution,
    /// The node of `T1'` where path selection stopped.
    pub path_t1: TNode,
    /// `path_t1` followed by its image under each lift, up to `T(N+1)`.
    pub lifted: Vec<TNode>,
    /// Path selection as a map from step numbers to `T1'`.
    pub path_trace: InjuryTrace,
    /// For each level `i`, the prefixes of `lifted[i-1]` paired with their
    /// lifts into `T(i+1)`.
    pub chain_traces: Vec<InjuryTrace>,
    /// For each level `i`, the step sequence of the lift of `lifted[i-1]`.
    pub lift_traces: Vec<InjuryTrace>,
    pub events: Vec<TowerEvent>,
    pub stats: SolveStats,
}

impl SolveResult {
    /// `N`, the top level whose substitution is returned.
    pub fn top(&self) -> usize {
        self.lifted.len().saturating_sub(1)
    }
}

/// Per-formula verdicts under the standard extension, plus correctness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub verdicts: Vec<bool>,
    pub correct: bool,
    pub first_incorrect: Option<(Canon, u64)>,
    formulas: Vec<String>,
}

impl VerifyReport {
    pub fn solving(&self) -> bool {
        self.verdicts.iter().all(|v| *v)
    }

    pub fn ok(&self) -> bool {
        self.solving() && self.correct
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, cr)) in self.verdicts.iter().zip(&self.formulas).enumerate() {
            writeln!(f, "{:>3}  {}  {}", i + 1, if *v { "ok  " } else { "FAIL" }, cr)?;
        }
        match &self.first_incorrect {
            None => write!(f, "correctness: ok"),
            Some((t, v)) => write!(f, "correctness: FAIL ({t} := {v} is not the least witness)"),
        }
    }
}

/// Checks `S-bar |= Cr` for every formula and correctness of `s`, using
/// only the plain semantics.
pub fn verify(s: &EpsSubstitution, crs: &[CriticalFormula]) -> VerifyReport {
    let first_incorrect = s.first_incorrect().map(|(t, v)| (t.clone(), v));
    VerifyReport {
        verdicts: crs.iter().map(|cr| s.models_bar(&cr.formula())).collect(),
        correct: first_incorrect.is_none(),
        first_incorrect,
        formulas: crs.iter().map(ToString::to_string).collect(),
    }
}

/// Walks `T1'` from the root, correcting `?` to a witness when a formula
/// turns out false, until a leaf of `T1'` is reached. Returns every node
/// visited.
pub fn select_path(tower: &Tower) -> Result<Vec<PathNode>, DriverError> {
    let mut alpha = PathNode::root();
    let mut steps = vec![alpha.clone()];
    let fuel = tower.config().fuel;
    loop {
        if steps.len() as u64 > fuel {
            return Err(DriverError::Fuel(fuel));
        }
        if tower.is_truncated_leaf(1, &alpha)? {
            break;
        }
        let st = tower.state(1, &alpha)?;
        let s = &st.subst;
        let breach = |reason: String| DriverError::Invariant {
            step: steps.len() - 1,
            node: alpha.clone(),
            reason,
        };
        let next = match tower.label(1, &alpha)? {
            NodeLabel::ETerm(e) => alpha.child(value_branch(s.get_bar(&e))),
            NodeLabel::Form(f) => {
                let key = f
                    .key_canon()
                    .ok_or_else(|| breach(format!("{f} has a non-canonical key")))?;
                let imp = f.formula_with_key_default(s);
                if s.models(&imp) {
                    alpha.child(value_branch(s.get_bar(&key)))
                } else if s.models(&imp.negate()) {
                    let limit = f.bound_at(s).unwrap_or(tower.config().witness_limit);
                    match f.scan(s, limit) {
                        WitnessScan::Found(w) => tower
                            .backtrack_target(1, &alpha, Some(key), s)?
                            .child(BranchLabel::Num(w)),
                        other => return Err(breach(format!("falsified {f} has no witness: {other:?}"))),
                    }
                } else {
                    return Err(breach(format!("{f} is undecided")));
                }
            }
            NodeLabel::Leaf => return Err(breach("leaf outside the truncation".to_string())),
        };
        if tower.config().check_correctness {
            tower.check_correct(1, &next)?;
        }
        alpha = next;
        steps.push(alpha.clone());
    }
    Ok(steps)
}

/// Solves a finite set of closed critical formulas.
pub fn solve(crs: &[CriticalFormula], opts: &SolveOptions) -> Result<SolveResult, DriverError> {
    let tower = Tower::new(crs.to_vec(), opts.tower);
    solve_with(&tower)
}

/// As [`solve`] on an already configured tower, whose memo tables stay
/// available for inspection afterwards.
pub fn solve_with(tower: &Tower) -> Result<SolveResult, DriverError> {
    let crs = tower.crs();
    if crs.is_empty() {
        return Ok(SolveResult {
            substitution: EpsSubstitution::new(),
            path_t1: TNode::new(1, PathNode::root()),
            lifted: vec![TNode::new(1, PathNode::root())],
            path_trace: InjuryTrace::from_chain([PathNode::root()]),
            chain_traces: Vec::new(),
            lift_traces: Vec::new(),
            events: Vec::new(),
            stats: SolveStats::default(),
        });
    }
    let top = tower.top();
    let steps = select_path(tower)?;
    let alpha = steps.last().expect("path starts at the root").clone();

    let mut lifted = vec![TNode::new(1, alpha.clone())];
    let mut chain_traces = Vec::new();
    let mut lift_traces = Vec::new();
    for level in 1..=top {
        let node = lifted[level - 1].path.clone();
        let lift = tower.lift(level, &node)?;
        lift_traces.push(InjuryTrace::from_chain(lift.steps.iter().cloned()));
        let mut chain = InjuryTrace::default();
        for p in node.prefixes() {
            let image = tower.lift(level, &p)?.image().clone();
            chain.push(p, image);
        }
        chain_traces.push(chain);
        lifted.push(TNode::new(level + 1, lift.image().clone()));
    }

    let gamma = &lifted[top - 1];
    let substitution = tower.subst(top, &gamma.path)?;
    let report = verify(&substitution, crs);
    if !report.ok() {
        return Err(DriverError::Verification { report, substitution });
    }
    debug_assert!(is_solving(&substitution, crs));
    Ok(SolveResult {
        substitution,
        path_t1: TNode::new(1, alpha),
        lifted,
        path_trace: InjuryTrace::from_chain(steps.iter().cloned()),
        chain_traces,
        lift_traces,
        events: tower.events(),
        stats: SolveStats {
            path_steps: steps.len() - 1,
            levels: tower.stats(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("no critical formula at index {0}")]
    NoFormula(usize),
    #[error("substitution does not solve the instance")]
    NotSolving,
    #[error("key term {0} does not evaluate to a canonical term")]
    Blocked(String),
    #[error("key term {0} is unassigned")]
    Unassigned(String),
    #[error("key term {0} is assigned ? but its matrix fails at 0")]
    DefaultFails(String),
    #[error("matrix instance {0} is false")]
    False(String),
}

/// The value a solving substitution gives the key term of the designated
/// critical formula, checked by evaluating the matrix instance directly.
///
/// A key assigned `?` denotes `0`; it is accepted when the matrix holds at
/// `0`.
pub fn extract_witness(s: &EpsSubstitution, crs: &[CriticalFormula], designated: usize) -> Result<u64, WitnessError> {
    let cr = crs.get(designated).ok_or(WitnessError::NoFormula(designated))?;
    if !is_solving(s, crs) {
        return Err(WitnessError::NotSolving);
    }
    let key_term = cr.key_term();
    let params: Vec<u64> = cr
        .params()
        .iter()
        .map(|p| s.eval_term_bar(p).as_num())
        .collect::<Option<_>>()
        .ok_or_else(|| WitnessError::Blocked(key_term.to_string()))?;
    let key = Canon::new(cr.key_fn().clone(), params.clone()).map_err(|_| WitnessError::Blocked(key_term.to_string()))?;
    let value = s.get(&key).ok_or_else(|| WitnessError::Unassigned(key.to_string()))?;
    let n = value.numeral();
    let instance = cr.key_fn().at(n, &params);
    if !s.models_bar(&instance) {
        return Err(match value {
            Value::Default => WitnessError::DefaultFails(key.to_string()),
            Value::Num(_) => WitnessError::False(instance.to_string()),
        });
    }
    Ok(n)
}
