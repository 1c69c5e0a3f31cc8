//! The tower of priority trees `T1, .., T(N+1)`.
//!
//! Trees are never materialized. A node is its path of branch labels, and
//! labels, node substitutions, lifts and truncation are computed on demand
//! and memoized per `(level, path)`. `T(N+1)` assigns the `d`-th critical
//! formula to every node of depth `d`; a node of a lower tree `Ti` is
//! labelled from the least node of `T(i+1)` it does not settle.

mod order;
mod rank1;

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::hash::Hash;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::critical::{scan_witness, CriticalFormula, WitnessScan};
use crate::injury::{BranchLabel, PathNode};
use crate::lang::Canon;
use crate::subst::{EpsSubstitution, SubstError, Value};

pub use order::{next_sibling, omega_index, OrderKey, PriorityOrder};
pub use rank1::rank1_lambda;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("fuel exhausted at level {level} while {phase}")]
    Fuel { level: usize, phase: &'static str },
    #[error("level {level} is outside the tower 1..={top}")]
    Level { level: usize, top: usize },
    #[error("at {node}: {source}")]
    Subst { node: TNode, source: SubstError },
    #[error("invariant violated at {node}: {reason}")]
    Invariant { node: TNode, reason: String },
    #[error("substitution at {node} is not correct: {term} := {value}")]
    Incorrect { node: TNode, term: String, value: u64 },
    #[error("the rank-1 path map needs every critical formula to have rank 1, found rank {0}")]
    NotRankOne(usize),
}

/// A node of the tree `T(level)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TNode {
    pub level: usize,
    pub path: PathNode,
}

impl TNode {
    pub fn new(level: usize, path: PathNode) -> Self {
        TNode { level, path }
    }
}

impl fmt::Display for TNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}{}", self.level, self.path)
    }
}

/// What a node is about: a canonical term `e(a)`, a critical formula
/// `form(a)`, or nothing (a leaf).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NodeLabel {
    ETerm(Canon),
    Form(CriticalFormula),
    Leaf,
}

impl NodeLabel {
    pub fn is_leaf(&self) -> bool {
        matches!(self, NodeLabel::Leaf)
    }

    /// The canonical term this node assigns along its children, with
    /// parameters of an unreduced formula evaluated by `s`.
    pub fn assigned_term(&self, s: &EpsSubstitution) -> Option<Canon> {
        match self {
            NodeLabel::ETerm(e) => Some(e.clone()),
            NodeLabel::Form(f) => f.key_canon_at(s),
            NodeLabel::Leaf => None,
        }
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            NodeLabel::ETerm(e) => format!("e {e}"),
            NodeLabel::Form(cr) => format!("form {cr}"),
            NodeLabel::Leaf => "leaf".to_string(),
        };
        f.pad(&text)
    }
}

/// `S(a)` together with the formulas assigned along `a`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeState {
    pub subst: EpsSubstitution,
    pub forms: Vec<CriticalFormula>,
}

enum ExtendError {
    Subst(SubstError),
    Label(String),
}

impl NodeState {
    fn extend(&self, label: &NodeLabel, branch: BranchLabel) -> Result<NodeState, ExtendError> {
        let mut next = self.clone();
        let key = match label {
            NodeLabel::ETerm(e) => e.clone(),
            NodeLabel::Form(f) => {
                next.forms.push(f.clone());
                f.key_canon()
                    .ok_or_else(|| ExtendError::Label(format!("formula {f} has a non-canonical key")))?
            }
            NodeLabel::Leaf => return Err(ExtendError::Label("a leaf has no children".to_string())),
        };
        next.subst.insert(key, branch_value(branch)).map_err(ExtendError::Subst)?;
        Ok(next)
    }
}

pub fn branch_value(b: BranchLabel) -> Value {
    match b {
        BranchLabel::Num(n) => Value::Num(n),
        BranchLabel::Q => Value::Default,
    }
}

pub fn value_branch(v: Value) -> BranchLabel {
    match v {
        Value::Num(n) => BranchLabel::Num(n),
        Value::Default => BranchLabel::Q,
    }
}

/// The sequence `a^0_+, a^1_+, ..` of a lift; the last node is the image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lift {
    pub steps: Vec<PathNode>,
}

impl Lift {
    pub fn image(&self) -> &PathNode {
        self.steps.last().expect("a lift starts at the root")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TowerEvent {
    /// A node of `Ti` found every node of `T(i+1)` before a leaf settled.
    LeafLabel { node: TNode, found: PathNode },
}

#[derive(Debug, Clone, Copy)]
pub struct TowerConfig {
    pub order: PriorityOrder,
    /// Budget for each search, lift and path loop.
    pub fuel: u64,
    /// Largest witness tried when lifting past a term of higher rank.
    pub witness_limit: u64,
    /// Check correctness of every node substitution visited by a lift.
    pub check_correctness: bool,
}

impl Default for TowerConfig {
    fn default() -> Self {
        TowerConfig {
            order: PriorityOrder::Weighted,
            fuel: 1_000_000,
            witness_limit: 100_000,
            check_correctness: false,
        }
    }
}

/// Work counters for one level of the tower.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LevelStats {
    pub labels: u64,
    pub search_pops: u64,
    pub lift_steps: u64,
}

#[derive(Debug, Default)]
struct Counters {
    labels: AtomicU64,
    search_pops: AtomicU64,
    lift_steps: AtomicU64,
}

/// A grow-only memo table; the lock is held only around lookups and
/// inserts, so concurrent queries for distinct nodes are allowed.
#[derive(Debug)]
struct Memo<K, V>(Mutex<HashMap<K, V>>);

impl<K: Eq + Hash, V: Clone> Memo<K, V> {
    fn new() -> Self {
        Memo(Mutex::new(HashMap::new()))
    }

    fn get(&self, k: &K) -> Option<V> {
        self.0.lock().expect("memo lock").get(k).cloned()
    }

    fn insert(&self, k: K, v: V) -> V {
        self.0.lock().expect("memo lock").entry(k).or_insert(v).clone()
    }

    fn len(&self) -> usize {
        self.0.lock().expect("memo lock").len()
    }
}

pub struct Tower {
    crs: Vec<CriticalFormula>,
    top: usize,
    config: TowerConfig,
    labels: Memo<(usize, PathNode), NodeLabel>,
    states: Memo<(usize, PathNode), Arc<NodeState>>,
    lifts: Memo<(usize, PathNode), Arc<Lift>>,
    leaves: Memo<(usize, PathNode), bool>,
    events: Mutex<Vec<TowerEvent>>,
    counters: Vec<Counters>,
}

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tower")
            .field("top", &self.top)
            .field("formulas", &self.crs.len())
            .field("labels", &self.labels.len())
            .finish()
    }
}

impl Tower {
    /// `N` is the largest rank among the critical formulas.
    pub fn new(crs: Vec<CriticalFormula>, config: TowerConfig) -> Self {
        let top = crs.iter().map(CriticalFormula::rank).max().unwrap_or(0);
        Tower {
            crs,
            top,
            config,
            labels: Memo::new(),
            states: Memo::new(),
            lifts: Memo::new(),
            leaves: Memo::new(),
            events: Mutex::new(Vec::new()),
            counters: (0..=top + 1).map(|_| Counters::default()).collect(),
        }
    }

    /// `N`.
    pub fn top(&self) -> usize {
        self.top
    }

    pub fn crs(&self) -> &[CriticalFormula] {
        &self.crs
    }

    pub fn config(&self) -> &TowerConfig {
        &self.config
    }

    pub fn events(&self) -> Vec<TowerEvent> {
        self.events.lock().expect("event lock").clone()
    }

    pub fn stats(&self) -> Vec<LevelStats> {
        self.counters
            .iter()
            .map(|c| LevelStats {
                labels: c.labels.load(Ordering::Relaxed),
                search_pops: c.search_pops.load(Ordering::Relaxed),
                lift_steps: c.lift_steps.load(Ordering::Relaxed),
            })
            .collect()
    }

    fn check_level(&self, level: usize, max: usize) -> Result<(), TreeError> {
        if level == 0 || level > max {
            return Err(TreeError::Level { level, top: self.top });
        }
        Ok(())
    }

    fn invariant(level: usize, node: &PathNode, reason: impl Into<String>) -> TreeError {
        TreeError::Invariant {
            node: TNode::new(level, node.clone()),
            reason: reason.into(),
        }
    }

    fn top_label(&self, depth: usize) -> NodeLabel {
        self.crs.get(depth).map_or(NodeLabel::Leaf, |c| NodeLabel::Form(c.clone()))
    }

    /// The label of a node of `T(level)`.
    pub fn label(&self, level: usize, node: &PathNode) -> Result<NodeLabel, TreeError> {
        self.check_level(level, self.top + 1)?;
        if level == self.top + 1 {
            return Ok(self.top_label(node.len()));
        }
        let key = (level, node.clone());
        if let Some(l) = self.labels.get(&key) {
            return Ok(l);
        }
        let st = self.state(level, node)?;
        let l = self.compute_label(level, node, &st)?;
        self.counters[level].labels.fetch_add(1, Ordering::Relaxed);
        Ok(self.labels.insert(key, l))
    }

    /// `S(a)` and the formulas along `a` for a node of `T(level)`,
    /// `level <= N`.
    pub fn state(&self, level: usize, node: &PathNode) -> Result<Arc<NodeState>, TreeError> {
        self.check_level(level, self.top)?;
        let key = (level, node.clone());
        if let Some(s) = self.states.get(&key) {
            return Ok(s);
        }
        let st = match node.parent() {
            None => NodeState::default(),
            Some(parent) => {
                let ps = self.state(level, &parent)?;
                let pl = self.label(level, &parent)?;
                let branch = node.last().expect("non-root node");
                ps.extend(&pl, branch).map_err(|e| match e {
                    ExtendError::Subst(source) => TreeError::Subst {
                        node: TNode::new(level, node.clone()),
                        source,
                    },
                    ExtendError::Label(reason) => Self::invariant(level, node, reason),
                })?
            }
        };
        Ok(self.states.insert(key, Arc::new(st)))
    }

    /// `S(a)` for a node of `T(level)`.
    pub fn subst(&self, level: usize, node: &PathNode) -> Result<EpsSubstitution, TreeError> {
        Ok(self.state(level, node)?.subst.clone())
    }

    /// Whether a node of `T(level)` with state `st` settles a node of
    /// `T(level+1)` carrying `label`.
    pub fn settles_label(&self, level: usize, st: &NodeState, label: &NodeLabel) -> Result<bool, TreeError> {
        Ok(match label {
            NodeLabel::Leaf => false,
            NodeLabel::ETerm(e) => e.rank() > level || st.subst.contains(e),
            NodeLabel::Form(f) if f.rank() <= level => st.forms.contains(&f.reduce(&st.subst)),
            NodeLabel::Form(f) => {
                let s = &st.subst;
                let imp = f.formula_with_key_default(s);
                if s.models(&imp) {
                    true
                } else if s.models(&imp.negate()) {
                    matches!(self.scan_form(level, f, s)?, WitnessScan::Found(_))
                } else {
                    false
                }
            }
        })
    }

    /// `alpha` in `T(level)` settles `beta` in `T(level+1)`.
    pub fn settles(&self, level: usize, alpha: &PathNode, beta: &PathNode) -> Result<bool, TreeError> {
        let st = self.state(level, alpha)?;
        let lb = self.label(level + 1, beta)?;
        self.settles_label(level, &st, &lb)
    }

    /// Least-witness scan for a formula already known to be falsified with
    /// the key defaulted; the bound of the formula caps the search.
    fn scan_form(&self, level: usize, f: &CriticalFormula, s: &EpsSubstitution) -> Result<WitnessScan, TreeError> {
        let limit = f.bound_at(s).unwrap_or(self.config.witness_limit);
        match f.scan(s, limit) {
            WitnessScan::Exhausted => Err(Self::invariant(
                level + 1,
                &PathNode::root(),
                format!("no witness up to {limit} for falsified formula {f}"),
            )),
            r => Ok(r),
        }
    }

    /// The least node of the truncated tree `T(level+1)'` under the
    /// priority order that the node with state `st` does not settle.
    /// Leaves of `T(level+1)'` are passed over; `Leaf` comes back only when
    /// every node of `T(N+1)` above its leaves is settled.
    pub fn least_unsettled(&self, level: usize, st: &NodeState) -> Result<(PathNode, NodeLabel), TreeError> {
        if level == self.top {
            // labels of T(N+1) depend on depth only
            for d in 0..=self.crs.len() {
                let l = self.top_label(d);
                if !self.settles_label(level, st, &l)? {
                    return Ok((PathNode::q_path(d), l));
                }
            }
            unreachable!("the node at depth K is a leaf");
        }
        let order = self.config.order;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((order.key(&PathNode::root()), PathNode::root())));
        let mut pops = 0u64;
        while let Some(Reverse((_, b))) = heap.pop() {
            pops += 1;
            self.counters[level].search_pops.fetch_add(1, Ordering::Relaxed);
            if pops > self.config.fuel {
                return Err(TreeError::Fuel {
                    level,
                    phase: "searching for an unsettled node",
                });
            }
            if let Some(s) = next_sibling(&b) {
                heap.push(Reverse((order.key(&s), s)));
            }
            if self.is_truncated_leaf(level + 1, &b)? {
                continue;
            }
            let lb = self.label(level + 1, &b)?;
            if !self.settles_label(level, st, &lb)? {
                return Ok((b, lb));
            }
            let c = b.child(BranchLabel::Q);
            heap.push(Reverse((order.key(&c), c)));
        }
        unreachable!("the search frontier of an infinite tree never empties")
    }

    fn compute_label(&self, level: usize, node: &PathNode, st: &NodeState) -> Result<NodeLabel, TreeError> {
        let (beta, lb) = self.least_unsettled(level, st)?;
        let s = &st.subst;
        Ok(match lb {
            NodeLabel::Leaf => {
                self.events.lock().expect("event lock").push(TowerEvent::LeafLabel {
                    node: TNode::new(level, node.clone()),
                    found: beta,
                });
                NodeLabel::Leaf
            }
            NodeLabel::ETerm(e) => NodeLabel::ETerm(e),
            NodeLabel::Form(f) if f.rank() <= level => {
                let r = f.reduce(s);
                let key = r.key_canon();
                let other = s
                    .unev(&r.formula())
                    .into_iter()
                    .find(|t| Some(t) != key.as_ref());
                match (key, other) {
                    (_, Some(t)) => NodeLabel::ETerm(t),
                    (Some(_), None) => NodeLabel::Form(r),
                    (None, None) => {
                        return Err(Self::invariant(level, node, format!("{r} has a blocked key and nothing to evaluate")))
                    }
                }
            }
            NodeLabel::Form(f) => {
                let imp = f.formula_with_key_default(s);
                if !s.decides(&imp) {
                    let t = s.unev(&imp).into_iter().next().expect("undecided formulas have unevaluated terms");
                    NodeLabel::ETerm(t)
                } else {
                    match self.scan_form(level, &f, s)? {
                        WitnessScan::Blocked { term, .. } => NodeLabel::ETerm(term),
                        _ => return Err(Self::invariant(level, node, format!("least unsettled {f} is settled"))),
                    }
                }
            }
        })
    }

    /// Whether a node of `T(level)` is a leaf of the truncated tree
    /// `T(level)'`: its lift is a leaf of the next truncated tree, or it
    /// carries no label.
    pub fn is_truncated_leaf(&self, level: usize, node: &PathNode) -> Result<bool, TreeError> {
        self.check_level(level, self.top + 1)?;
        if level == self.top + 1 {
            return Ok(node.len() >= self.crs.len());
        }
        let key = (level, node.clone());
        if let Some(b) = self.leaves.get(&key) {
            return Ok(b);
        }
        let image = self.lift(level, node)?.image().clone();
        let leaf = self.is_truncated_leaf(level + 1, &image)? || self.label(level, node)?.is_leaf();
        Ok(self.leaves.insert(key, leaf))
    }

    /// `delta_level(a)` together with the whole sequence `a^n_+`.
    pub fn lift(&self, level: usize, alpha: &PathNode) -> Result<Arc<Lift>, TreeError> {
        self.check_level(level, self.top)?;
        let key = (level, alpha.clone());
        if let Some(l) = self.lifts.get(&key) {
            return Ok(l);
        }
        let st = self.state(level, alpha)?;
        let mut cur = PathNode::root();
        let mut steps = vec![cur.clone()];
        let mut n = 0u64;
        loop {
            n += 1;
            if n > self.config.fuel {
                return Err(TreeError::Fuel { level, phase: "lifting" });
            }
            if self.is_truncated_leaf(level + 1, &cur)? {
                break;
            }
            let lb = self.label(level + 1, &cur)?;
            if !self.settles_label(level, &st, &lb)? {
                break;
            }
            cur = self.lift_step(level, &st, &cur, &lb)?;
            self.counters[level].lift_steps.fetch_add(1, Ordering::Relaxed);
            if self.config.check_correctness && level < self.top {
                self.check_correct(level + 1, &cur)?;
            }
            steps.push(cur.clone());
        }
        Ok(self.lifts.insert(key, Arc::new(Lift { steps })))
    }

    /// One step `a^n_+ -> a^(n+1)_+` for a settled, non-leaf `cur`.
    pub fn lift_step(&self, level: usize, st: &NodeState, cur: &PathNode, label: &NodeLabel) -> Result<PathNode, TreeError> {
        let s = &st.subst;
        let up = level + 1;
        let lookup = |e: &Canon| {
            s.get(e)
                .map(|v| cur.child(value_branch(v)))
                .ok_or_else(|| Self::invariant(up, cur, format!("settled term {e} has no value")))
        };
        match label {
            NodeLabel::ETerm(e) if e.rank() <= level => lookup(e),
            NodeLabel::ETerm(e) => match scan_witness(s, &e.func, &e.args, self.config.witness_limit) {
                WitnessScan::Found(u) => Ok(cur.child(BranchLabel::Num(u))),
                WitnessScan::Blocked { .. } => Ok(cur.child(BranchLabel::Q)),
                WitnessScan::Exhausted => Err(TreeError::Fuel {
                    level,
                    phase: "scanning for a witness",
                }),
            },
            NodeLabel::Form(f) if f.rank() <= level => {
                let key = f
                    .key_canon_at(s)
                    .ok_or_else(|| Self::invariant(up, cur, format!("settled {f} has a blocked key")))?;
                lookup(&key)
            }
            NodeLabel::Form(f) => {
                if s.models(&f.formula_with_key_default(s)) {
                    return Ok(cur.child(BranchLabel::Q));
                }
                match self.scan_form(level, f, s)? {
                    WitnessScan::Found(u) => {
                        let beta = self.backtrack_target(up, cur, f.key_canon_at(s), s)?;
                        Ok(beta.child(BranchLabel::Num(u)))
                    }
                    _ => Err(Self::invariant(up, cur, format!("settled {f} has no witness"))),
                }
            }
            NodeLabel::Leaf => Err(Self::invariant(up, cur, "lifting past a leaf")),
        }
    }

    /// The shortest `g <= cur` in `T(level)` whose label assigns `key`,
    /// or `cur` itself.
    pub fn backtrack_target(
        &self,
        level: usize,
        cur: &PathNode,
        key: Option<Canon>,
        s: &EpsSubstitution,
    ) -> Result<PathNode, TreeError> {
        if let Some(key) = key {
            for p in cur.prefixes() {
                if self.label(level, &p)?.assigned_term(s).as_ref() == Some(&key) {
                    return Ok(p);
                }
            }
        }
        Ok(cur.clone())
    }

    /// Fails unless `S(node)` is correct.
    pub fn check_correct(&self, level: usize, node: &PathNode) -> Result<(), TreeError> {
        let st = self.state(level, node)?;
        match st.subst.first_incorrect() {
            None => Ok(()),
            Some((term, value)) => Err(TreeError::Incorrect {
                node: TNode::new(level, node.clone()),
                term: term.to_string(),
                value,
            }),
        }
    }
}
