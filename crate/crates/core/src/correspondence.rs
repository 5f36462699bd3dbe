//! Mapping raw branch trees onto level-order indices.
//!
//! Raw trees arrive as parent-linked branch records with a median radius
//! each. Which child of a split becomes the left child (`2w`) is decided by
//! a correspondence rule:
//!
//! * thickness: the child with the larger median radius goes left; ties go
//!   to more descendants, then to input order.
//! * descendant: the child with more descendants goes left; ties go to the
//!   larger radius, then to input order.
//!
//! An only child is always placed on the left.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{BinaryTree, NodeIndex};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributedNode {
    pub id: String,
    #[serde(default)]
    pub parent_id: Option<String>,
    /// Median branch radius in millimetres.
    pub median_radius: f64,
}

/// A validated rooted tree of branch records, at most two children each.
#[derive(Clone, Debug, PartialEq)]
pub struct AttributedTree {
    nodes: Vec<AttributedNode>,
    root: usize,
    children: Vec<Vec<usize>>,
    by_id: HashMap<String, usize>,
}

impl AttributedTree {
    pub fn new(nodes: Vec<AttributedNode>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::MalformedTree("tree has no nodes".into()));
        }
        let mut by_id = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            if !(node.median_radius > 0.0 && node.median_radius.is_finite()) {
                return Err(Error::MalformedTree(format!(
                    "node `{}` has non-positive median radius {}",
                    node.id, node.median_radius
                )));
            }
            if by_id.insert(node.id.clone(), i).is_some() {
                return Err(Error::MalformedTree(format!(
                    "duplicate node id `{}`",
                    node.id
                )));
            }
        }

        let mut root = None;
        let mut children = vec![Vec::new(); nodes.len()];
        for (i, node) in nodes.iter().enumerate() {
            match &node.parent_id {
                None => {
                    if let Some(r) = root.replace(i) {
                        return Err(Error::MalformedTree(format!(
                            "more than one root (`{}` and `{}`)",
                            nodes[r].id, node.id
                        )));
                    }
                }
                Some(p) => {
                    let &pi = by_id.get(p).ok_or_else(|| {
                        Error::MalformedTree(format!(
                            "node `{}` references unknown parent `{p}`",
                            node.id
                        ))
                    })?;
                    children[pi].push(i);
                }
            }
        }
        let root = root.ok_or_else(|| Error::MalformedTree("no root node".into()))?;

        for (i, kids) in children.iter().enumerate() {
            if kids.len() > 2 {
                return Err(Error::NonBinary {
                    id: nodes[i].id.clone(),
                    children: kids.len(),
                });
            }
        }

        // every node must hang below the root; anything else sits on a cycle
        let mut seen = vec![false; nodes.len()];
        let mut stack = vec![root];
        let mut reached = 0;
        while let Some(i) = stack.pop() {
            seen[i] = true;
            reached += 1;
            stack.extend(children[i].iter().copied());
        }
        if reached != nodes.len() {
            let stray = seen.iter().position(|s| !s).unwrap();
            return Err(Error::MalformedTree(format!(
                "node `{}` is not connected to the root",
                nodes[stray].id
            )));
        }

        Ok(AttributedTree {
            nodes,
            root,
            children,
            by_id,
        })
    }

    pub fn nodes(&self) -> &[AttributedNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> &AttributedNode {
        &self.nodes[self.root]
    }

    /// Proper descendant count of the node with the given id.
    pub fn descendant_count(&self, id: &str) -> Result<usize> {
        let &i = self
            .by_id
            .get(id)
            .ok_or_else(|| Error::UnknownNode(id.to_string()))?;
        let mut count = 0;
        let mut stack: Vec<usize> = self.children[i].clone();
        while let Some(j) = stack.pop() {
            count += 1;
            stack.extend(self.children[j].iter().copied());
        }
        Ok(count)
    }

    /// Proper descendant counts for all nodes, by input position.
    fn all_descendant_counts(&self) -> Vec<usize> {
        let order = self.preorder();
        let mut counts = vec![0usize; self.nodes.len()];
        for &i in order.iter().rev() {
            counts[i] = self.children[i].iter().map(|&c| 1 + counts[c]).sum();
        }
        counts
    }

    fn preorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(i) = stack.pop() {
            order.push(i);
            stack.extend(self.children[i].iter().rev().copied());
        }
        order
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrespondenceMode {
    Thickness,
    #[default]
    Descendant,
}

impl fmt::Display for CorrespondenceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorrespondenceMode::Thickness => "thickness",
            CorrespondenceMode::Descendant => "descendant",
        })
    }
}

impl FromStr for CorrespondenceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thickness" => Ok(CorrespondenceMode::Thickness),
            "descendant" => Ok(CorrespondenceMode::Descendant),
            other => Err(Error::InvalidArgument(format!(
                "unknown correspondence `{other}` (expected thickness or descendant)"
            ))),
        }
    }
}

/// Assigns level-order indices top-down and returns the resulting tree.
pub fn apply_correspondence(tree: &AttributedTree, mode: CorrespondenceMode) -> Result<BinaryTree> {
    let descendants = tree.all_descendant_counts();
    let radius = |i: usize| tree.nodes[i].median_radius;

    // Ordering::Less means `a` dominates and goes left
    let dominance = |a: usize, b: usize| -> Ordering {
        let by_radius = radius(b).total_cmp(&radius(a));
        let by_descendants = descendants[b].cmp(&descendants[a]);
        let primary = match mode {
            CorrespondenceMode::Thickness => by_radius.then(by_descendants),
            CorrespondenceMode::Descendant => by_descendants.then(by_radius),
        };
        primary.then(a.cmp(&b))
    };

    let mut indices = Vec::with_capacity(tree.len());
    let mut stack = vec![(tree.root, NodeIndex::ROOT)];
    while let Some((i, at)) = stack.pop() {
        indices.push(at);
        match tree.children[i].as_slice() {
            [] => {}
            &[only] => stack.push((only, at.left()?)),
            &[a, b] => {
                let (left, right) = if dominance(a, b) == Ordering::Greater {
                    (b, a)
                } else {
                    (a, b)
                };
                stack.push((left, at.left()?));
                stack.push((right, at.right()?));
            }
            kids => {
                return Err(Error::NonBinary {
                    id: tree.nodes[i].id.clone(),
                    children: kids.len(),
                })
            }
        }
    }
    indices.sort_unstable();
    Ok(BinaryTree::from_sorted_unchecked(indices))
}
