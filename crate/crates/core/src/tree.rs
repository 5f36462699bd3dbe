//! Binary trees as ancestor-closed sets of level-order indices.
//!
//! The root has index 1 and node `w` has children `2w` and `2w + 1`, so a
//! tree is fully described by the set of indices it contains.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

/// Level-order node index, always `>= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct NodeIndex(u64);

impl NodeIndex {
    pub const ROOT: NodeIndex = NodeIndex(1);

    pub fn new(value: u64) -> Result<Self> {
        if value == 0 {
            return Err(Error::ZeroIndex(value));
        }
        Ok(NodeIndex(value))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_root(self) -> bool {
        self.0 == 1
    }

    pub fn parent(self) -> Result<NodeIndex> {
        if self.is_root() {
            return Err(Error::RootHasNoParent);
        }
        Ok(NodeIndex(self.0 / 2))
    }

    pub fn left(self) -> Result<NodeIndex> {
        self.0
            .checked_mul(2)
            .map(NodeIndex)
            .ok_or(Error::IndexOverflow(self.0))
    }

    pub fn right(self) -> Result<NodeIndex> {
        self.0
            .checked_mul(2)
            .and_then(|v| v.checked_add(1))
            .map(NodeIndex)
            .ok_or(Error::IndexOverflow(self.0))
    }

    /// Depth below the root (the root is at depth 0).
    #[inline]
    pub fn depth(self) -> u32 {
        63 - self.0.leading_zeros()
    }

    /// Parent without the root check; only for indices known to be > 1.
    #[inline]
    pub(crate) fn parent_unchecked(self) -> NodeIndex {
        debug_assert!(self.0 > 1);
        NodeIndex(self.0 / 2)
    }
}

impl TryFrom<u64> for NodeIndex {
    type Error = Error;

    fn try_from(value: u64) -> Result<Self> {
        NodeIndex::new(value)
    }
}

impl From<NodeIndex> for u64 {
    fn from(v: NodeIndex) -> u64 {
        v.0
    }
}

impl fmt::Display for NodeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A binary tree, stored as its strictly increasing list of node indices.
///
/// Every non-root node's parent is present. The empty tree is allowed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct BinaryTree {
    nodes: Vec<NodeIndex>,
}

impl BinaryTree {
    pub fn empty() -> Self {
        BinaryTree { nodes: Vec::new() }
    }

    /// Builds a tree from indices in any order; duplicates are merged.
    pub fn new<I>(indices: I) -> Result<Self>
    where
        I: IntoIterator<Item = u64>,
    {
        let mut nodes = indices
            .into_iter()
            .map(NodeIndex::new)
            .collect::<Result<Vec<_>>>()?;
        nodes.sort_unstable();
        nodes.dedup();
        Self::from_sorted(nodes)
    }

    /// Parses the canonical form: a strictly increasing index list.
    pub fn from_canonical(indices: &[u64]) -> Result<Self> {
        let nodes = indices
            .iter()
            .map(|&v| NodeIndex::new(v))
            .collect::<Result<Vec<_>>>()?;
        if let Some(w) = nodes.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidTree(format!(
                "indices must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Self::from_sorted(nodes)
    }

    fn from_sorted(nodes: Vec<NodeIndex>) -> Result<Self> {
        let tree = BinaryTree { nodes };
        if let Some(&first) = tree.nodes.first() {
            if !first.is_root() {
                return Err(Error::InvalidTree(format!(
                    "nonempty tree must contain the root, smallest index is {first}"
                )));
            }
        }
        for &v in tree.nodes.iter().skip(1) {
            let p = v.parent_unchecked();
            if !tree.contains(p) {
                return Err(Error::InvalidTree(format!(
                    "node {v} present but its parent {p} is missing"
                )));
            }
        }
        Ok(tree)
    }

    /// Caller guarantees sorted, deduplicated and ancestor-closed input.
    pub(crate) fn from_sorted_unchecked(nodes: Vec<NodeIndex>) -> Self {
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        BinaryTree { nodes }
    }

    #[inline]
    pub fn nodes(&self) -> &[NodeIndex] {
        &self.nodes
    }

    pub fn indices(&self) -> Vec<u64> {
        self.nodes.iter().map(|v| v.get()).collect()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    #[inline]
    pub fn contains(&self, v: NodeIndex) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }

    pub fn is_subset(&self, other: &BinaryTree) -> bool {
        self.first_missing_from(other).is_none()
    }

    /// First node of `self` that `other` lacks.
    pub(crate) fn first_missing_from(&self, other: &BinaryTree) -> Option<NodeIndex> {
        let mut theirs = other.nodes.iter().peekable();
        'outer: for &v in &self.nodes {
            while let Some(&&w) = theirs.peek() {
                match w.cmp(&v) {
                    Ordering::Less => {
                        theirs.next();
                    }
                    Ordering::Equal => continue 'outer,
                    Ordering::Greater => break,
                }
            }
            return Some(v);
        }
        None
    }

    pub fn union(&self, other: &BinaryTree) -> BinaryTree {
        let mut out = Vec::with_capacity(self.len().max(other.len()));
        merge_walk(&self.nodes, &other.nodes, |v, _, _| out.push(v));
        BinaryTree::from_sorted_unchecked(out)
    }

    pub fn intersection(&self, other: &BinaryTree) -> BinaryTree {
        let mut out = Vec::new();
        merge_walk(&self.nodes, &other.nodes, |v, a, b| {
            if a && b {
                out.push(v)
            }
        });
        BinaryTree::from_sorted_unchecked(out)
    }

    /// Size of `self ∩ other`.
    pub fn common_count(&self, other: &BinaryTree) -> usize {
        let mut n = 0;
        merge_walk(&self.nodes, &other.nodes, |_, a, b| n += (a && b) as usize);
        n
    }
}

impl TryFrom<Vec<u64>> for BinaryTree {
    type Error = Error;

    fn try_from(indices: Vec<u64>) -> Result<Self> {
        BinaryTree::from_canonical(&indices)
    }
}

impl From<BinaryTree> for Vec<u64> {
    fn from(t: BinaryTree) -> Vec<u64> {
        t.indices()
    }
}

impl fmt::Display for BinaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.nodes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// Walks two sorted lists in step, reporting each distinct value and which
/// side(s) hold it.
fn merge_walk<F>(a: &[NodeIndex], b: &[NodeIndex], mut visit: F)
where
    F: FnMut(NodeIndex, bool, bool),
{
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                visit(a[i], true, false);
                i += 1;
            }
            Ordering::Greater => {
                visit(b[j], false, true);
                j += 1;
            }
            Ordering::Equal => {
                visit(a[i], true, true);
                i += 1;
                j += 1;
            }
        }
    }
    a[i..].iter().for_each(|&v| visit(v, true, false));
    b[j..].iter().for_each(|&v| visit(v, false, true));
}

/// Symmetric-difference (Hamming) distance between two trees.
pub fn distance(t1: &BinaryTree, t2: &BinaryTree) -> usize {
    let mut d = 0;
    merge_walk(&t1.nodes, &t2.nodes, |_, a, b| d += (a != b) as usize);
    d
}

/// Per-tree covariates. Only the subject id is mandatory.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Subject {
    pub id: String,
    pub age: Option<f64>,
    pub sex: Option<String>,
    /// Additional numeric covariates, keyed by name.
    pub extra: BTreeMap<String, f64>,
}

impl Subject {
    pub fn new(id: impl Into<String>) -> Self {
        Subject {
            id: id.into(),
            ..Default::default()
        }
    }

    /// Looks up a numeric covariate; `age` maps to the dedicated field.
    pub fn covariate(&self, name: &str) -> Option<f64> {
        match name {
            "age" => self.age,
            _ => self.extra.get(name).copied(),
        }
    }
}

/// An ordered, nonempty population of trees with one subject record each.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeDataset {
    trees: Vec<BinaryTree>,
    subjects: Vec<Subject>,
}

impl TreeDataset {
    /// Dataset without covariates; subjects are named `t1..tn`.
    pub fn new(trees: Vec<BinaryTree>) -> Result<Self> {
        let subjects = (1..=trees.len())
            .map(|i| Subject::new(format!("t{i}")))
            .collect();
        Self::with_subjects(trees, subjects)
    }

    pub fn with_subjects(trees: Vec<BinaryTree>, subjects: Vec<Subject>) -> Result<Self> {
        if trees.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if trees.len() != subjects.len() {
            return Err(Error::InvalidArgument(format!(
                "{} trees but {} subject records",
                trees.len(),
                subjects.len()
            )));
        }
        Ok(TreeDataset { trees, subjects })
    }

    #[inline]
    pub fn trees(&self) -> &[BinaryTree] {
        &self.trees
    }

    #[inline]
    pub fn subjects(&self) -> &[Subject] {
        &self.subjects
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.trees.len()
    }

    /// Always false; datasets hold at least one tree.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    /// Total node count over all trees.
    pub fn total_nodes(&self) -> usize {
        self.trees.iter().map(BinaryTree::len).sum()
    }

    /// Sorted `(node, number of trees containing it)` over the support.
    pub fn node_counts(&self) -> Vec<(NodeIndex, u32)> {
        let mut counts: Vec<_> = par::node_counts(&self.trees).into_iter().collect();
        counts.sort_unstable_by_key(|&(v, _)| v);
        counts
    }

    /// Union of all trees.
    pub fn support(&self) -> BinaryTree {
        let nodes = self.node_counts().into_iter().map(|(v, _)| v).collect();
        BinaryTree::from_sorted_unchecked(nodes)
    }

    /// Intersection of all trees.
    pub fn intersection(&self) -> BinaryTree {
        let n = self.trees.len() as u32;
        let nodes = self
            .node_counts()
            .into_iter()
            .filter(|&(_, c)| c == n)
            .map(|(v, _)| v)
            .collect();
        BinaryTree::from_sorted_unchecked(nodes)
    }
}
