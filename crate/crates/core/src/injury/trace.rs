use std::collections::BTreeMap;

use thiserror::Error;

use super::{BranchLabel, Ordinal, PathNode};

/// A recorded map `lambda: T1 -> T2` given as `(source, image)` steps.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InjuryTrace {
    steps: Vec<(PathNode, PathNode)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InjuryViolation {
    #[error("steps {earlier} and {later}: {source_x} < {source_y} but {image_x} -> {image_y} is neither an extension nor a ?-correction")]
    Injury {
        earlier: usize,
        later: usize,
        source_x: PathNode,
        source_y: PathNode,
        image_x: PathNode,
        image_y: PathNode,
    },
    #[error("steps {earlier} and {later}: source {node} has two images")]
    NotAFunction {
        earlier: usize,
        later: usize,
        node: PathNode,
    },
    #[error("image {image} is shared by a chain of {length} sources, more than {max_run}")]
    LongRun {
        image: PathNode,
        length: usize,
        max_run: usize,
    },
    #[error("maximum run length must be positive")]
    ZeroMaxRun,
    #[error("steps {earlier} and {later}: height does not decrease ({o_x} then {o_y})")]
    Descent {
        earlier: usize,
        later: usize,
        o_x: Ordinal,
        o_y: Ordinal,
    },
    #[error("trace is not finite injury: {0}")]
    Precondition(Box<InjuryViolation>),
}

impl InjuryTrace {
    pub fn new(steps: Vec<(PathNode, PathNode)>) -> Self {
        InjuryTrace { steps }
    }

    /// A trace indexed by natural numbers: step `n` has source `<?,..,?>`
    /// of length `n`, so sources form a chain in step order.
    pub fn from_chain(images: impl IntoIterator<Item = PathNode>) -> Self {
        InjuryTrace {
            steps: images
                .into_iter()
                .enumerate()
                .map(|(n, img)| (PathNode::q_path(n), img))
                .collect(),
        }
    }

    pub fn push(&mut self, source: PathNode, image: PathNode) {
        self.steps.push((source, image));
    }

    pub fn steps(&self) -> &[(PathNode, PathNode)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn images(&self) -> impl Iterator<Item = &PathNode> {
        self.steps.iter().map(|(_, i)| i)
    }

    /// Whether sources are weakly increasing under prefix order.
    pub fn sources_form_chain(&self) -> bool {
        self.steps.windows(2).all(|w| w[0].0.is_prefix_of(&w[1].0))
    }

    /// Pairs `(i, j)` of steps with `source_i` a proper prefix of
    /// `source_j`.
    fn extension_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.steps.len();
        (0..n).flat_map(move |i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| {
            self.steps[i].0.is_proper_prefix_of(&self.steps[j].0)
        })
    }

    fn check_function(&self) -> Result<(), InjuryViolation> {
        let mut seen: BTreeMap<&PathNode, (usize, &PathNode)> = BTreeMap::new();
        for (j, (src, img)) in self.steps.iter().enumerate() {
            if let Some(&(i, prev)) = seen.get(src) {
                if prev != img {
                    return Err(InjuryViolation::NotAFunction {
                        earlier: i,
                        later: j,
                        node: src.clone(),
                    });
                }
            } else {
                seen.insert(src, (j, img));
            }
        }
        Ok(())
    }

    fn violation(&self, i: usize, j: usize) -> InjuryViolation {
        InjuryViolation::Injury {
            earlier: i,
            later: j,
            source_x: self.steps[i].0.clone(),
            source_y: self.steps[j].0.clone(),
            image_x: self.steps[i].1.clone(),
            image_y: self.steps[j].1.clone(),
        }
    }
}

/// `y` arises from `x` by a `?`-correction: some `a^<?>` is a prefix of
/// `x` and `a^<u>` a prefix of `y` for a numeral `u`.
pub fn is_correction(x: &PathNode, y: &PathNode) -> bool {
    x.first_difference(y).is_some_and(|k| {
        x.labels()[k] == BranchLabel::Q && matches!(y.labels()[k], BranchLabel::Num(_))
    })
}

/// Strict Kleene-Brouwer order with the branch order `u < ?`: a node lies
/// below its ancestors, and below anything it beats at the first
/// difference.
pub fn kb_lt(a: &PathNode, b: &PathNode) -> bool {
    match a.first_difference(b) {
        Some(k) => a.labels()[k].branch_lt(b.labels()[k]),
        None => b.is_proper_prefix_of(a),
    }
}

pub fn kb_leq(a: &PathNode, b: &PathNode) -> bool {
    a == b || kb_lt(a, b)
}

/// Every proper source extension `x < y` has `lambda(x)` a proper prefix
/// of `lambda(y)`, or `lambda(y)` a `?`-correction of `lambda(x)`.
pub fn check_finite_injury(trace: &InjuryTrace) -> Result<(), InjuryViolation> {
    trace.check_function()?;
    for (i, j) in trace.extension_pairs() {
        let (x, y) = (&trace.steps[i].1, &trace.steps[j].1);
        if !(x.is_proper_prefix_of(y) || is_correction(x, y)) {
            return Err(trace.violation(i, j));
        }
    }
    Ok(())
}

/// As [`check_finite_injury`] with images allowed to stay put, provided no
/// chain of more than `max_run` sources shares one image.
pub fn check_weakly_finite_injury(trace: &InjuryTrace, max_run: usize) -> Result<(), InjuryViolation> {
    if max_run == 0 {
        return Err(InjuryViolation::ZeroMaxRun);
    }
    trace.check_function()?;
    for (i, j) in trace.extension_pairs() {
        let (x, y) = (&trace.steps[i].1, &trace.steps[j].1);
        if !(x.is_prefix_of(y) || is_correction(x, y)) {
            return Err(trace.violation(i, j));
        }
    }
    let mut by_image: BTreeMap<&PathNode, Vec<&PathNode>> = BTreeMap::new();
    for (src, img) in &trace.steps {
        let srcs = by_image.entry(img).or_default();
        if !srcs.contains(&src) {
            srcs.push(src);
        }
    }
    for (image, mut srcs) in by_image {
        let length = longest_prefix_chain(&mut srcs);
        if length > max_run {
            return Err(InjuryViolation::LongRun {
                image: image.clone(),
                length,
                max_run,
            });
        }
    }
    Ok(())
}

fn longest_prefix_chain(nodes: &mut [&PathNode]) -> usize {
    nodes.sort_by_key(|n| n.len());
    let mut best = vec![1usize; nodes.len()];
    for j in 0..nodes.len() {
        for i in 0..j {
            if nodes[i].is_proper_prefix_of(nodes[j]) {
                best[j] = best[j].max(best[i] + 1);
            }
        }
    }
    best.into_iter().max().unwrap_or(0)
}
