use crate::injury::PathNode;

use super::{value_branch, Tower, TreeError};

/// The path map `T1 -> T2` of the rank-1 construction: starting at the
/// root, follow the value `S(a)` gives the key of the formula at each
/// depth, as long as `a` has already handled that formula.
///
/// A formula counts as handled when its reduct under `S(a)` was assigned
/// to a node along `a`.
pub fn rank1_lambda(tower: &Tower, alpha: &PathNode) -> Result<PathNode, TreeError> {
    if tower.top() != 1 {
        return Err(TreeError::NotRankOne(tower.top()));
    }
    let st = tower.state(1, alpha)?;
    let s = &st.subst;
    let mut image = PathNode::root();
    for cr in tower.crs() {
        let reduced = cr.reduce(s);
        if !st.forms.contains(&reduced) {
            break;
        }
        match reduced.key_canon().and_then(|k| s.get(&k)) {
            Some(v) => image = image.child(value_branch(v)),
            None => break,
        }
    }
    Ok(image)
}
