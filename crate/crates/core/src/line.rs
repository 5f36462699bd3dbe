//! Tree-lines and projections onto them.
//!
//! A tree-line grows a starting tree one node at a time, each new node a
//! child of the previous one. Because data trees are ancestor-closed, the
//! nodes of a line's path that a tree contains always form a prefix of the
//! path, which makes projection a prefix scan.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{BinaryTree, NodeIndex};

/// Starting tree plus a parent-to-child chain of added nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTreeLine")]
pub struct TreeLine {
    start: BinaryTree,
    path: Vec<NodeIndex>,
}

#[derive(Deserialize)]
struct RawTreeLine {
    start: BinaryTree,
    path: Vec<NodeIndex>,
}

impl TryFrom<RawTreeLine> for TreeLine {
    type Error = Error;

    fn try_from(raw: RawTreeLine) -> Result<Self> {
        TreeLine::new(raw.start, raw.path)
    }
}

impl TreeLine {
    /// Validates the chain: `path[0]` hangs off `start` (or is the root when
    /// `start` is empty), each later node is a child of its predecessor, and
    /// no path node lies inside `start`.
    pub fn new(start: BinaryTree, path: Vec<NodeIndex>) -> Result<Self> {
        if let Some(&first) = path.first() {
            if start.contains(first) {
                return Err(Error::InvalidTreeLine(format!(
                    "path node {first} already belongs to the starting tree"
                )));
            }
            let attached = if start.is_empty() {
                first.is_root()
            } else {
                !first.is_root() && start.contains(first.parent_unchecked())
            };
            if !attached {
                return Err(Error::InvalidTreeLine(format!(
                    "first path node {first} is not attached to the starting tree"
                )));
            }
        }
        for w in path.windows(2) {
            if w[1].is_root() || w[1].parent_unchecked() != w[0] {
                return Err(Error::InvalidTreeLine(format!(
                    "chain broken: {} is not a child of {}",
                    w[1], w[0]
                )));
            }
        }
        Ok(TreeLine { start, path })
    }

    pub fn start(&self) -> &BinaryTree {
        &self.start
    }

    pub fn path(&self) -> &[NodeIndex] {
        &self.path
    }

    /// Number of steps `m`; the line has `m + 1` members.
    pub fn len(&self) -> usize {
        self.path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.path.is_empty()
    }

    /// The member `ℓ_j = start ∪ {v_1..v_j}`.
    pub fn member(&self, j: usize) -> BinaryTree {
        assert!(
            j <= self.path.len(),
            "member {j} out of range 0..={}",
            self.path.len()
        );
        with_nodes(&self.start, &self.path[..j])
    }

    /// Number of path nodes contained in `t`.
    fn captured(&self, t: &BinaryTree) -> usize {
        self.path.iter().take_while(|&&v| t.contains(v)).count()
    }
}

fn with_nodes(base: &BinaryTree, extra: &[NodeIndex]) -> BinaryTree {
    let mut nodes = Vec::with_capacity(base.len() + extra.len());
    nodes.extend_from_slice(base.nodes());
    nodes.extend_from_slice(extra);
    nodes.sort_unstable();
    nodes.dedup();
    BinaryTree::from_sorted_unchecked(nodes)
}

/// The closest member of a tree-line to a data tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    /// Member index `r` in `0..=m`.
    pub index: usize,
    /// The member tree `ℓ_r`.
    pub tree: BinaryTree,
}

/// Projects `t` onto `line`: the result is `start ∪ (t ∩ path)`.
pub fn project(t: &BinaryTree, line: &TreeLine) -> Projection {
    let index = line.captured(t);
    Projection {
        index,
        tree: line.member(index),
    }
}

fn common_start(lines: &[TreeLine]) -> Result<&BinaryTree> {
    let first = lines
        .first()
        .ok_or_else(|| Error::InvalidArgument("at least one tree-line is required".into()))?;
    if lines.iter().any(|l| l.start != first.start) {
        return Err(Error::CommonStartRequired);
    }
    Ok(&first.start)
}

/// Projects `t` onto the union of several tree-lines sharing a start,
/// as the union of the individual projections.
pub fn project_union(t: &BinaryTree, lines: &[TreeLine]) -> Result<BinaryTree> {
    let start = common_start(lines)?;
    let captured: Vec<NodeIndex> = lines
        .iter()
        .flat_map(|l| l.path[..l.captured(t)].iter().copied())
        .collect();
    Ok(with_nodes(start, &captured))
}

/// Score of `t` on `line`: the projection index, i.e. how many path nodes
/// the projection adds beyond the starting tree.
pub fn score(t: &BinaryTree, line: &TreeLine) -> usize {
    line.captured(t)
}

/// Cumulative score on a union of lines: `|P(t)| - |start|`.
pub fn union_score(t: &BinaryTree, lines: &[TreeLine]) -> Result<usize> {
    let start_len = common_start(lines)?.len();
    Ok(project_union(t, lines)?.len() - start_len)
}
