#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use treeline::{BinaryTree, NodeIndex, TreeDataset, TreeLine};

pub fn tree(ix: &[u64]) -> BinaryTree {
    BinaryTree::new(ix.iter().copied()).unwrap()
}

/// Random ancestor-closed tree inside the complete tree of the given depth
/// (depth 3 means indices 1..=15). Each node is kept with probability `p`
/// when its parent is kept; the root is kept with probability `p_root`.
pub fn random_tree<R: Rng>(rng: &mut R, depth: u32, p: f64, p_root: f64) -> BinaryTree {
    if !rng.gen_bool(p_root) {
        return BinaryTree::empty();
    }
    let mut nodes = vec![1u64];
    let mut frontier = vec![1u64];
    for _ in 0..depth {
        let mut next = Vec::new();
        for v in frontier {
            for c in [2 * v, 2 * v + 1] {
                if rng.gen_bool(p) {
                    next.push(c);
                }
            }
        }
        nodes.extend_from_slice(&next);
        frontier = next;
    }
    BinaryTree::new(nodes).unwrap()
}

pub fn random_dataset<R: Rng>(rng: &mut R, n: usize, depth: u32) -> TreeDataset {
    let p = rng.gen_range(0.3..0.9);
    let trees = (0..n).map(|_| random_tree(rng, depth, p, 1.0)).collect();
    TreeDataset::new(trees).unwrap()
}

/// Random tree-line from `start` whose path stays within `max_depth`.
pub fn random_line<R: Rng>(rng: &mut R, start: &BinaryTree, max_depth: u32) -> TreeLine {
    let attach: Vec<u64> = if start.is_empty() {
        vec![1]
    } else {
        start
            .indices()
            .into_iter()
            .flat_map(|v| [2 * v, 2 * v + 1])
            .filter(|&c| !start.contains(NodeIndex::new(c).unwrap()))
            .filter(|&c| NodeIndex::new(c).unwrap().depth() <= max_depth)
            .collect()
    };
    let mut path = Vec::new();
    if let Some(&first) = attach.choose(rng) {
        let len = rng.gen_range(0..=max_depth as usize + 1);
        let mut v = first;
        for _ in 0..len {
            if NodeIndex::new(v).unwrap().depth() > max_depth {
                break;
            }
            path.push(NodeIndex::new(v).unwrap());
            v = 2 * v + rng.gen_range(0..=1);
        }
    }
    TreeLine::new(start.clone(), path).unwrap()
}

/// Random subtree of `t`: keeps each node with probability `p` when its
/// parent is kept.
pub fn random_subtree<R: Rng>(rng: &mut R, t: &BinaryTree, p: f64) -> BinaryTree {
    let mut kept: Vec<u64> = Vec::new();
    for &v in t.nodes() {
        let keep = if v.is_root() {
            rng.gen_bool(p)
        } else {
            kept.binary_search(&v.parent().unwrap().get()).is_ok() && rng.gen_bool(p)
        };
        if keep {
            kept.push(v.get());
        }
    }
    BinaryTree::new(kept).unwrap()
}
