use std::cmp::Ordering;

use num_bigint::BigUint;

use crate::injury::{BranchLabel, PathNode};

/// A constructive omega-ordering of a tree branching over `N ∪ {?}` in
/// which every node precedes its proper extensions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum PriorityOrder {
    /// Order by `depth + sum(enc)`, then depth, then the encoded labels
    /// lexicographically. Each weight class is finite.
    #[default]
    Weighted,
    /// Order by [`omega_index`].
    PairingCode,
}

/// Sort key of a node under a [`PriorityOrder`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderKey {
    Weighted(u64, usize, Vec<u64>),
    Code(BigUint),
}

impl PartialOrd for OrderKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrderKey {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (OrderKey::Weighted(a, b, c), OrderKey::Weighted(x, y, z)) => (a, b, c).cmp(&(x, y, z)),
            (OrderKey::Code(a), OrderKey::Code(b)) => a.cmp(b),
            (OrderKey::Weighted(..), OrderKey::Code(_)) => Ordering::Less,
            (OrderKey::Code(_), OrderKey::Weighted(..)) => Ordering::Greater,
        }
    }
}

fn enc(l: BranchLabel) -> u64 {
    match l {
        BranchLabel::Q => 0,
        BranchLabel::Num(n) => n.saturating_add(1),
    }
}

/// Cantor pairing, strictly increasing in each argument.
fn pair(a: &BigUint, b: &BigUint) -> BigUint {
    let s = a + b;
    (&s * (&s + 1u32)) / 2u32 + b
}

/// `code(<>) = 0`, `code(a^<u>) = pair(code(a), enc(u)) + 1` with
/// `enc(?) = 0` and `enc(n) = n + 1`.
pub fn omega_index(node: &PathNode) -> BigUint {
    node.labels().iter().fold(BigUint::ZERO, |code, l| {
        pair(&code, &BigUint::from(enc(*l))) + 1u32
    })
}

impl PriorityOrder {
    pub fn key(self, node: &PathNode) -> OrderKey {
        match self {
            PriorityOrder::Weighted => {
                let encs: Vec<u64> = node.labels().iter().map(|l| enc(*l)).collect();
                let weight = encs.iter().fold(node.len() as u64, |w, e| w.saturating_add(*e));
                OrderKey::Weighted(weight, node.len(), encs)
            }
            PriorityOrder::PairingCode => OrderKey::Code(omega_index(node)),
        }
    }

    pub fn precedes(self, a: &PathNode, b: &PathNode) -> bool {
        self.key(a) < self.key(b)
    }
}

/// The next sibling in branch order `?, 0, 1, 2, ..`; the root has none.
pub fn next_sibling(node: &PathNode) -> Option<PathNode> {
    let last = node.last()?;
    let next = match last {
        BranchLabel::Q => BranchLabel::Num(0),
        BranchLabel::Num(n) => BranchLabel::Num(n + 1),
    };
    Some(node.parent()?.child(next))
}
