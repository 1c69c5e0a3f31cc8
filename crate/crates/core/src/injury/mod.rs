//! Finite-injury machinery over trees whose branches are labelled by
//! `N ∪ {?}`: path nodes, injury traces and their checkers, the
//! Kleene-Brouwer order, Cantor normal form ordinals and the height
//! function used for the descent argument.

mod height;
mod ordinal;
mod trace;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use height::{chain_bound, height_o, longest_kb_chain, verify_descent, RemainingHeight};
pub use ordinal::Ordinal;
pub use trace::{
    check_finite_injury, check_weakly_finite_injury, is_correction, kb_leq, kb_lt, InjuryTrace,
    InjuryViolation,
};

/// A branch label: a numeral or the undetermined value `?`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BranchLabel {
    Num(u64),
    Q,
}

impl BranchLabel {
    pub fn as_num(self) -> Option<u64> {
        match self {
            BranchLabel::Num(n) => Some(n),
            BranchLabel::Q => None,
        }
    }

    /// The branch order: every numeral lies below `?`, numerals are
    /// pairwise incomparable.
    pub fn branch_lt(self, other: BranchLabel) -> bool {
        matches!((self, other), (BranchLabel::Num(_), BranchLabel::Q))
    }
}

impl fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchLabel::Num(n) => write!(f, "{n}"),
            BranchLabel::Q => write!(f, "?"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed path node `{0}`")]
pub struct ParsePathError(pub String);

impl FromStr for BranchLabel {
    type Err = ParsePathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "?" => Ok(BranchLabel::Q),
            t => t
                .parse()
                .map(BranchLabel::Num)
                .map_err(|_| ParsePathError(s.to_string())),
        }
    }
}

/// A tree node named by the labels on the path from the root; prefix
/// order is ancestry.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathNode(Vec<BranchLabel>);

impl PathNode {
    pub fn root() -> Self {
        PathNode(Vec::new())
    }

    pub fn new(labels: Vec<BranchLabel>) -> Self {
        PathNode(labels)
    }

    /// The all-`?` node of the given length.
    pub fn q_path(len: usize) -> Self {
        PathNode(vec![BranchLabel::Q; len])
    }

    pub fn labels(&self) -> &[BranchLabel] {
        &self.0
    }

    /// Depth of the node; the root has length 0.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<BranchLabel> {
        self.0.last().copied()
    }

    pub fn child(&self, label: BranchLabel) -> Self {
        let mut v = self.0.clone();
        v.push(label);
        PathNode(v)
    }

    pub fn parent(&self) -> Option<Self> {
        let (_, init) = self.0.split_last()?;
        Some(PathNode(init.to_vec()))
    }

    pub fn prefix(&self, len: usize) -> Self {
        PathNode(self.0[..len].to_vec())
    }

    /// All prefixes, from the root up to and including `self`.
    pub fn prefixes(&self) -> impl Iterator<Item = PathNode> + '_ {
        (0..=self.len()).map(|n| self.prefix(n))
    }

    pub fn is_prefix_of(&self, other: &PathNode) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_proper_prefix_of(&self, other: &PathNode) -> bool {
        self.len() < other.len() && self.is_prefix_of(other)
    }

    /// First position where the two paths disagree, if neither is a
    /// prefix of the other.
    pub fn first_difference(&self, other: &PathNode) -> Option<usize> {
        self.0.iter().zip(&other.0).position(|(a, b)| a != b)
    }
}

impl From<Vec<BranchLabel>> for PathNode {
    fn from(v: Vec<BranchLabel>) -> Self {
        PathNode(v)
    }
}

impl fmt::Display for PathNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.pad(&format!("<{}>", labels.join(",")))
    }
}

impl FromStr for PathNode {
    type Err = ParsePathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix('<')
            .and_then(|r| r.strip_suffix('>'))
            .ok_or_else(|| ParsePathError(s.to_string()))?;
        if inner.trim().is_empty() {
            return Ok(PathNode::root());
        }
        inner
            .split(',')
            .map(|p| p.parse().map_err(|_| ParsePathError(s.to_string())))
            .collect::<Result<Vec<_>, _>>()
            .map(PathNode)
    }
}

/// Test helper: `None` stands for `?`.
#[cfg(test)]
pub(crate) fn node(labels: &[Option<u64>]) -> PathNode {
    PathNode(
        labels
            .iter()
            .map(|l| l.map_or(BranchLabel::Q, BranchLabel::Num))
            .collect(),
    )
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn display_and_parse_round_trip() {
        let n = node(&[None, Some(2), Some(0)]);
        assert_eq!(n.to_string(), "<?,2,0>");
        assert_eq!("<?,2,0>".parse::<PathNode>().unwrap(), n);
        assert_eq!("<>".parse::<PathNode>().unwrap(), PathNode::root());
        assert!("<?,x>".parse::<PathNode>().is_err());
        assert!("?,1".parse::<PathNode>().is_err());
    }

    #[test]
    fn prefix_relations() {
        let a = node(&[Some(3)]);
        let b = node(&[Some(3), None]);
        assert!(a.is_proper_prefix_of(&b));
        assert!(a.is_prefix_of(&a));
        assert!(!a.is_proper_prefix_of(&a));
        assert_eq!(b.parent(), Some(a.clone()));
        assert_eq!(node(&[None]).first_difference(&node(&[Some(5)])), Some(0));
        assert_eq!(a.first_difference(&b), None);
    }

    /// Nodes of depth at most `depth` with labels from `{?, 0, 1, 2}`.
    pub(crate) fn arb_node(depth: usize) -> impl Strategy<Value = PathNode> {
        prop::collection::vec(prop::option::of(0u64..3), 0..=depth).prop_map(|v| node(&v))
    }

    proptest! {
        #[test]
        fn parse_inverts_display(n in arb_node(6)) {
            prop_assert_eq!(n.to_string().parse::<PathNode>().unwrap(), n);
        }
    }
}
