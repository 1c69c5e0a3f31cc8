use std::collections::{BTreeMap, BTreeSet};

use super::trace::{check_finite_injury, kb_lt};
use super::{BranchLabel, InjuryTrace, InjuryViolation, Ordinal, PathNode};

/// Remaining height in a finite prefix-closed tree: leaves have height 0,
/// inner nodes one more than their highest child.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RemainingHeight {
    heights: BTreeMap<PathNode, u64>,
}

impl RemainingHeight {
    /// The tree is the prefix closure of `nodes`.
    pub fn from_nodes<'a>(nodes: impl IntoIterator<Item = &'a PathNode>) -> Self {
        let mut heights = BTreeMap::new();
        for n in nodes {
            for (depth, p) in n.prefixes().enumerate() {
                let below = (n.len() - depth) as u64;
                let h = heights.entry(p).or_insert(0);
                *h = (*h).max(below);
            }
        }
        RemainingHeight { heights }
    }

    /// The tree spanned by the images of a trace.
    pub fn of_images(trace: &InjuryTrace) -> Self {
        RemainingHeight::from_nodes(trace.images())
    }

    pub fn get(&self, node: &PathNode) -> Option<u64> {
        self.heights.get(node).copied()
    }

    /// The height of the whole tree.
    pub fn tree_height(&self) -> u64 {
        self.get(&PathNode::root()).unwrap_or(0)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &PathNode> {
        self.heights.keys()
    }

    /// `h` as an ordinal-valued assignment. Nodes outside the tree get 0.
    pub fn ordinal(&self, node: &PathNode) -> Ordinal {
        Ordinal::nat(self.get(node).unwrap_or(0))
    }
}

/// `o(x) = (sum over a^<?> <= f(x) of w^h(a)) + w^(h(f(x)) + 1)`, summed by
/// increasing prefix length.
pub fn height_o(image: &PathNode, h: impl Fn(&PathNode) -> Ordinal) -> Ordinal {
    let mut sum = Ordinal::zero();
    for (k, l) in image.labels().iter().enumerate() {
        if *l == BranchLabel::Q {
            sum = sum.add(&Ordinal::omega_pow(h(&image.prefix(k))));
        }
    }
    sum.add(&Ordinal::omega_pow(h(image).add(&Ordinal::one())))
}

/// Checks that `o` strictly decreases along every proper source extension.
pub fn verify_descent(trace: &InjuryTrace, h: impl Fn(&PathNode) -> Ordinal) -> Result<(), InjuryViolation> {
    check_finite_injury(trace).map_err(|e| InjuryViolation::Precondition(Box::new(e)))?;
    let o: Vec<Ordinal> = trace.images().map(|img| height_o(img, &h)).collect();
    let steps = trace.steps();
    for i in 0..steps.len() {
        for j in 0..steps.len() {
            if steps[i].0.is_proper_prefix_of(&steps[j].0) && o[j] >= o[i] {
                return Err(InjuryViolation::Descent {
                    earlier: i,
                    later: j,
                    o_x: o[i].clone(),
                    o_y: o[j].clone(),
                });
            }
        }
    }
    Ok(())
}

/// Upper bound on the number of sources in a chain whose images stay in a
/// tree of the given height under weakly finite injury, when each `?` is
/// corrected at most `corrections` times and each image is shared by at
/// most `max_run` sources.
///
/// The distinct images of such a chain decrease in the Kleene-Brouwer
/// order, so they visit a node, then its `?`-subtree, then at most
/// `corrections` numeral subtrees: `L(0) = 1`, `L(H) = 1 + (c + 1) L(H - 1)`.
pub fn chain_bound(height: u64, max_run: u64, corrections: u64) -> u64 {
    let mut l = 1u64;
    for _ in 0..height {
        l = 1 + (corrections + 1) * l;
    }
    l * max_run
}

/// Length of the longest strictly Kleene-Brouwer-decreasing sequence of
/// nodes drawn from `nodes`.
pub fn longest_kb_chain<'a>(nodes: impl IntoIterator<Item = &'a PathNode>) -> usize {
    let nodes: Vec<&PathNode> = nodes.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    let mut memo = vec![None; nodes.len()];
    fn go(i: usize, nodes: &[&PathNode], memo: &mut Vec<Option<usize>>) -> usize {
        if let Some(v) = memo[i] {
            return v;
        }
        let mut best = 1;
        for j in 0..nodes.len() {
            if kb_lt(nodes[j], nodes[i]) {
                best = best.max(1 + go(j, nodes, memo));
            }
        }
        memo[i] = Some(best);
        best
    }
    (0..nodes.len()).map(|i| go(i, &nodes, &mut memo)).max().unwrap_or(0)
}
