//! Principal component tree-lines.
//!
//! Every node of the support tree is weighted by the number of data trees
//! that contain it, with nodes already claimed by earlier components zeroed.
//! The k-th component is the downward path hanging off the starting tree
//! with the largest total weight, found by a single bottom-up pass over the
//! support.
//!
//! Ties between equal-weight paths go to the shorter path, then to the
//! lexicographically smallest index sequence. A zero best gain ends the
//! extraction.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::line::{project_union, TreeLine};
use crate::par;
use crate::tree::{BinaryTree, NodeIndex, TreeDataset};

/// Node weights over the support tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedSupport {
    support: BinaryTree,
    weights: Vec<u32>,
}

impl WeightedSupport {
    pub fn support(&self) -> &BinaryTree {
        &self.support
    }

    /// Weight of `v`, or `None` outside the support.
    pub fn weight(&self, v: NodeIndex) -> Option<u32> {
        self.position(v).map(|i| self.weights[i])
    }

    /// `(node, weight)` pairs in index order.
    pub fn iter(&self) -> impl Iterator<Item = (NodeIndex, u32)> + '_ {
        self.support
            .nodes()
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
    }

    fn position(&self, v: NodeIndex) -> Option<usize> {
        self.support.nodes().binary_search(&v).ok()
    }

    /// Sets the weight of each listed node to zero.
    pub fn zero(&mut self, nodes: &[NodeIndex]) -> Result<()> {
        for &v in nodes {
            let i = self.position(v).ok_or(Error::NotInSupport(v.get()))?;
            self.weights[i] = 0;
        }
        Ok(())
    }

    /// Builds weights from explicit pairs; intended for tests and tooling.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, u32)>,
    {
        let mut pairs: Vec<(u64, u32)> = pairs.into_iter().collect();
        pairs.sort_unstable_by_key(|&(v, _)| v);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument(
                "duplicate node in weight list".into(),
            ));
        }
        let support = BinaryTree::new(pairs.iter().map(|&(v, _)| v))?;
        let weights = pairs.into_iter().map(|(_, w)| w).collect();
        Ok(WeightedSupport { support, weights })
    }
}

/// Containment counts over the support, zeroed on `zeroed`.
pub fn compute_weights(dataset: &TreeDataset, zeroed: &[NodeIndex]) -> Result<WeightedSupport> {
    let (nodes, weights) = dataset.node_counts().into_iter().unzip();
    let mut ws = WeightedSupport {
        support: BinaryTree::from_sorted_unchecked(nodes),
        weights,
    };
    ws.zero(zeroed)?;
    Ok(ws)
}

/// A downward path together with its total weight.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightedPath {
    pub path: Vec<NodeIndex>,
    pub gain: u64,
}

#[derive(Clone, Copy)]
struct Best {
    sum: u64,
    len: u32,
    next: Option<usize>,
}

impl Best {
    #[inline]
    fn beats(&self, other: &Best) -> bool {
        self.sum > other.sum || (self.sum == other.sum && self.len < other.len)
    }
}

/// Heaviest path inside the support that can extend `start` as a tree-line.
///
/// Returns the empty path when nothing attachable carries positive weight.
pub fn max_weight_path(weights: &WeightedSupport, start: &BinaryTree) -> Result<WeightedPath> {
    let supp = weights.support.nodes();
    if let Some(v) = start.first_missing_from(&weights.support) {
        return Err(Error::StartNotInSupport(v.get()));
    }

    let pos: HashMap<NodeIndex, usize> = supp.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    // start ⊆ supp, so a merge walk marks the start nodes in one pass
    let mut in_start = vec![false; supp.len()];
    let mut s = start.nodes().iter().peekable();
    for (i, &v) in supp.iter().enumerate() {
        if s.peek() == Some(&&v) {
            in_start[i] = true;
            s.next();
        }
    }

    // children carry larger indices than parents: sweep from the back
    let mut best = vec![
        Best {
            sum: 0,
            len: 0,
            next: None
        };
        supp.len()
    ];
    for i in (0..supp.len()).rev() {
        if in_start[i] {
            continue;
        }
        let w = weights.weights[i] as u64;
        let mut here = Best {
            sum: w,
            len: 1,
            next: None,
        };
        let v = supp[i];
        let children = [v.left(), v.right()];
        for child in children.into_iter().flatten() {
            if let Some(&j) = pos.get(&child) {
                let via = Best {
                    sum: w + best[j].sum,
                    len: 1 + best[j].len,
                    next: Some(j),
                };
                if via.beats(&here) {
                    here = via;
                }
            }
        }
        best[i] = here;
    }

    let attachable = |i: usize| {
        let v = supp[i];
        !in_start[i]
            && if start.is_empty() {
                v.is_root()
            } else {
                !v.is_root() && pos.get(&v.parent_unchecked()).is_some_and(|&p| in_start[p])
            }
    };

    let mut top: Option<usize> = None;
    for i in (0..supp.len()).filter(|&i| attachable(i)) {
        if top.is_none_or(|t| best[i].beats(&best[t])) {
            top = Some(i);
        }
    }

    let top = match top {
        Some(i) if best[i].sum > 0 => i,
        _ => return Ok(WeightedPath::default()),
    };
    let mut path = Vec::with_capacity(best[top].len as usize);
    let mut cur = Some(top);
    while let Some(i) = cur {
        path.push(supp[i]);
        cur = best[i].next;
    }
    Ok(WeightedPath {
        path,
        gain: best[top].sum,
    })
}

/// Extracted principal component tree-lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcResult {
    pub start: BinaryTree,
    pub lines: Vec<TreeLine>,
    /// Total path weight captured by each component.
    pub gains: Vec<u64>,
    /// First component index (1-based) whose best gain was zero.
    pub exhausted_at: Option<usize>,
}

impl PcResult {
    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

/// Computes up to `k` principal component tree-lines from `start`.
pub fn pc_treelines(dataset: &TreeDataset, start: &BinaryTree, k: usize) -> Result<PcResult> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "number of components must be positive".into(),
        ));
    }
    let mut weights = compute_weights(dataset, &[])?;
    let mut result = PcResult {
        start: start.clone(),
        lines: Vec::with_capacity(k),
        gains: Vec::with_capacity(k),
        exhausted_at: None,
    };
    for component in 1..=k {
        let best = max_weight_path(&weights, start)?;
        if best.gain == 0 {
            result.exhausted_at = Some(component);
            break;
        }
        weights.zero(&best.path)?;
        result.lines.push(TreeLine::new(start.clone(), best.path)?);
        result.gains.push(best.gain);
    }
    Ok(result)
}

/// Total size of the projections onto the union of the first `upto` lines.
pub fn explained_variation(dataset: &TreeDataset, lines: &[TreeLine], upto: usize) -> Result<u64> {
    if upto == 0 || upto > lines.len() {
        return Err(Error::InvalidArgument(format!(
            "upto must lie in 1..={}, got {upto}",
            lines.len()
        )));
    }
    let lines = &lines[..upto];
    let sizes = par::try_map(dataset.trees(), |t| {
        project_union(t, lines).map(|p| p.len() as u64)
    })?;
    Ok(sizes.into_iter().sum())
}

/// Explained variation for `k = 0..=K`, where `k = 0` counts only the
/// starting tree once per data tree.
pub fn explained_curve(dataset: &TreeDataset, result: &PcResult) -> Result<Vec<u64>> {
    let mut curve = Vec::with_capacity(result.lines.len() + 1);
    curve.push((dataset.len() * result.start.len()) as u64);
    for upto in 1..=result.lines.len() {
        curve.push(explained_variation(dataset, &result.lines, upto)?);
    }
    Ok(curve)
}
