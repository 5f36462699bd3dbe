//! Exhaustive reference implementations used to cross-check the fast paths.
//!
//! Nothing here uses the closed-form projection rules or the weighting
//! argument: projections are found by scanning every candidate member for
//! the smallest distance, and principal components by trying every
//! tree-line inside the support. Costs are exponential in the number of
//! lines, so these are for small inputs only.

use crate::error::{Error, Result};
use crate::line::TreeLine;
use crate::solver::PcResult;
use crate::tree::{distance, BinaryTree, NodeIndex, TreeDataset};

/// Largest support the exhaustive principal component search accepts.
pub const ORACLE_MAX_SUPPORT: usize = (1 << 6) - 1;

/// Member of `line` closest to `t`, found by scanning all members. Returns
/// `(index, tree, number of members attaining the minimum)`.
pub fn project_by_enumeration(t: &BinaryTree, line: &TreeLine) -> (usize, BinaryTree, usize) {
    let mut best: Option<(usize, BinaryTree, usize)> = None;
    let mut best_d = usize::MAX;
    for j in 0..=line.len() {
        let member = line.member(j);
        let d = distance(t, &member);
        if d < best_d {
            best_d = d;
            best = Some((j, member, 1));
        } else if d == best_d {
            if let Some(b) = best.as_mut() {
                b.2 += 1;
            }
        }
    }
    best.expect("a tree-line has at least one member")
}

/// Every distinct member of the union of `lines`, i.e. all unions
/// `ℓ_{1,i1} ∪ ... ∪ ℓ_{q,iq}`.
pub fn union_members(lines: &[TreeLine]) -> Vec<BinaryTree> {
    let mut members = vec![BinaryTree::empty()];
    for line in lines {
        let mut next = Vec::with_capacity(members.len() * (line.len() + 1));
        for m in &members {
            for j in 0..=line.len() {
                next.push(m.union(&line.member(j)));
            }
        }
        next.sort_by(|a, b| a.nodes().cmp(b.nodes()));
        next.dedup();
        members = next;
    }
    members
}

/// Closest member of the union of `lines` to `t`, with the number of
/// distinct members attaining the minimum.
pub fn project_union_by_enumeration(t: &BinaryTree, lines: &[TreeLine]) -> (BinaryTree, usize) {
    let mut best = BinaryTree::empty();
    let mut best_d = usize::MAX;
    let mut ties = 0;
    for m in union_members(lines) {
        let d = distance(t, &m);
        if d < best_d {
            best_d = d;
            best = m;
            ties = 1;
        } else if d == best_d {
            ties += 1;
        }
    }
    (best, ties)
}

/// Bit-set view of a support of at most 64 nodes.
struct BitSpace {
    nodes: Vec<NodeIndex>,
}

impl BitSpace {
    fn mask(&self, tree: &BinaryTree) -> u64 {
        tree.nodes()
            .iter()
            .map(|v| 1u64 << self.bit(*v).expect("tree outside support"))
            .fold(0, |a, b| a | b)
    }

    fn bit(&self, v: NodeIndex) -> Option<usize> {
        self.nodes.binary_search(&v).ok()
    }
}

/// Candidate paths: every downward chain inside the support whose first
/// node hangs off `start`, in lexicographic order.
fn candidate_paths(support: &BinaryTree, start: &BinaryTree) -> Vec<Vec<NodeIndex>> {
    let mut out = Vec::new();
    for &first in support.nodes() {
        if start.contains(first) {
            continue;
        }
        let attached = if start.is_empty() {
            first.is_root()
        } else {
            !first.is_root() && start.contains(first.parent().expect("non-root"))
        };
        if !attached {
            continue;
        }
        let mut stack = vec![vec![first]];
        while let Some(path) = stack.pop() {
            let last = *path.last().unwrap();
            for child in [last.left(), last.right()].into_iter().flatten() {
                if support.contains(child) {
                    let mut longer = path.clone();
                    longer.push(child);
                    stack.push(longer);
                }
            }
            out.push(path);
        }
    }
    out.sort();
    out
}

/// Greedy principal components by brute force.
///
/// For each `k`, every candidate tree-line is combined with the lines
/// already chosen and scored by `Σ_i min_{ℓ in union} d(t_i, ℓ)`. The
/// smallest objective wins, ties going to the shorter path and then the
/// lexicographically smaller one. Choosing the empty path means no line
/// improves the fit, which ends the search.
pub fn oracle_pc(dataset: &TreeDataset, start: &BinaryTree, k: usize) -> Result<PcResult> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "number of components must be positive".into(),
        ));
    }
    let support = dataset
        .trees()
        .iter()
        .fold(BinaryTree::empty(), |acc, t| acc.union(t));
    if support.len() > ORACLE_MAX_SUPPORT {
        return Err(Error::OracleCapacity {
            nodes: support.len(),
            limit: ORACLE_MAX_SUPPORT,
        });
    }
    if let Some(&v) = start.nodes().iter().find(|&&v| !support.contains(v)) {
        return Err(Error::StartNotInSupport(v.get()));
    }

    let space = BitSpace {
        nodes: support.nodes().to_vec(),
    };
    let data: Vec<u64> = dataset.trees().iter().map(|t| space.mask(t)).collect();
    let start_mask = space.mask(start);
    let member_masks = |path: &[NodeIndex]| -> Vec<u64> {
        let mut masks = vec![start_mask];
        let mut acc = start_mask;
        for &v in path {
            acc |= 1 << space.bit(v).unwrap();
            masks.push(acc);
        }
        masks
    };

    // all members of the union of the chosen lines
    let mut chosen_union: Vec<u64> = vec![start_mask];
    let objective = |members: &[u64]| -> u64 {
        data.iter()
            .map(|&t| {
                members
                    .iter()
                    .map(|&m| (t ^ m).count_ones() as u64)
                    .min()
                    .unwrap()
            })
            .sum()
    };

    let candidates = candidate_paths(&support, start);
    let mut result = PcResult {
        start: start.clone(),
        lines: Vec::new(),
        gains: Vec::new(),
        exhausted_at: None,
    };

    for component in 1..=k {
        let baseline = objective(&chosen_union);
        // the empty path reproduces the baseline and wins every tie
        let mut best: (u64, usize, Option<usize>) = (baseline, 0, None);
        for (ci, path) in candidates.iter().enumerate() {
            let mut members: Vec<u64> = Vec::with_capacity(chosen_union.len() * (path.len() + 1));
            for &u in &chosen_union {
                for m in member_masks(path) {
                    members.push(u | m);
                }
            }
            let obj = objective(&members);
            if obj < best.0 || (obj == best.0 && path.len() < best.1) {
                best = (obj, path.len(), Some(ci));
            }
        }
        let Some(ci) = best.2 else {
            result.exhausted_at = Some(component);
            break;
        };
        let path = candidates[ci].clone();
        let mut next: Vec<u64> = chosen_union
            .iter()
            .flat_map(|&u| member_masks(&path).into_iter().map(move |m| u | m))
            .collect();
        next.sort_unstable();
        next.dedup();
        chosen_union = next;
        result.gains.push(baseline - best.0);
        result.lines.push(TreeLine::new(start.clone(), path)?);
    }
    Ok(result)
}

/// `Σ_i d(t_i, P(t_i))` over the union of `lines`, with projections found
/// by enumeration. With no lines every tree projects onto `start`.
pub fn objective_by_enumeration(
    dataset: &TreeDataset,
    start: &BinaryTree,
    lines: &[TreeLine],
) -> u64 {
    dataset
        .trees()
        .iter()
        .map(|t| {
            if lines.is_empty() {
                distance(t, start) as u64
            } else {
                distance(t, &project_union_by_enumeration(t, lines).0) as u64
            }
        })
        .sum()
}
