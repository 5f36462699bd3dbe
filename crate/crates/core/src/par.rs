//! Data-parallel helpers over per-tree work.
//!
//! With the `parallel` feature (default) these fan out over rayon's global
//! pool; without it they run as plain sequential iterators. Every helper
//! returns results in input order, so outputs are identical either way.

use std::collections::HashMap;

use crate::tree::{BinaryTree, NodeIndex};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub(crate) fn map_range<U, F>(len: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_range<U, F>(len: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..len).map(f).collect()
}

/// Fallible map; the first error in input order is not guaranteed under
/// rayon, but some error is returned whenever any item fails.
#[cfg(feature = "parallel")]
pub(crate) fn try_map<T, U, E, F>(items: &[T], f: F) -> Result<Vec<U>, E>
where
    T: Sync,
    U: Send,
    E: Send,
    F: Fn(&T) -> Result<U, E> + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn try_map<T, U, E, F>(items: &[T], f: F) -> Result<Vec<U>, E>
where
    F: Fn(&T) -> Result<U, E>,
{
    items.iter().map(f).collect()
}

/// Number of trees containing each node, over the union of all trees.
#[cfg(feature = "parallel")]
pub(crate) fn node_counts(trees: &[BinaryTree]) -> HashMap<NodeIndex, u32> {
    trees
        .par_iter()
        .fold(HashMap::new, |mut acc, tree| {
            for &v in tree.nodes() {
                *acc.entry(v).or_insert(0u32) += 1;
            }
            acc
        })
        .reduce(HashMap::new, |a, b| {
            // fold the smaller map into the larger one
            if a.len() < b.len() {
                merge_counts(b, a)
            } else {
                merge_counts(a, b)
            }
        })
}

#[cfg(feature = "parallel")]
fn merge_counts(
    mut into: HashMap<NodeIndex, u32>,
    from: HashMap<NodeIndex, u32>,
) -> HashMap<NodeIndex, u32> {
    for (v, c) in from {
        *into.entry(v).or_insert(0) += c;
    }
    into
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn node_counts(trees: &[BinaryTree]) -> HashMap<NodeIndex, u32> {
    let mut acc = HashMap::new();
    for tree in trees {
        for &v in tree.nodes() {
            *acc.entry(v).or_insert(0u32) += 1;
        }
    }
    acc
}
