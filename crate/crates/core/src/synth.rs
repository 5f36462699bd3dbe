//! Synthetic tree populations for demos and tests.
//!
//! Each tree starts at the root; a node at depth `d >= 1` is present with
//! probability `decay^d` when its parent is present. Trees are emitted in
//! raw form with synthetic branch radii and ids, so they go through the
//! same correspondence step as real data.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::correspondence::AttributedNode;
use crate::error::{Error, Result};
use crate::io::{DatasetFile, TreeRecord};
use crate::par;
use crate::tree::{BinaryTree, NodeIndex};

/// Deepest level the generator accepts; deeper indices overflow `u64`.
pub const MAX_DEPTH: u32 = 62;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n: usize,
    pub max_depth: u32,
    /// Per-level inclusion multiplier in `(0, 1]`.
    pub inclusion_decay: f64,
    pub seed: u64,
    pub population: String,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n: 73,
            max_depth: 10,
            inclusion_decay: 0.85,
            seed: 0,
            population: "synthetic".into(),
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if self.max_depth > MAX_DEPTH {
            return Err(Error::InvalidArgument(format!(
                "max_depth must be at most {MAX_DEPTH}, got {}",
                self.max_depth
            )));
        }
        if !(self.inclusion_decay > 0.0 && self.inclusion_decay <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "inclusion_decay must lie in (0, 1], got {}",
                self.inclusion_decay
            )));
        }
        Ok(())
    }

    /// Generator for tree `i`; each tree draws from its own stream so the
    /// output does not depend on how work is scheduled.
    fn rng(&self, i: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(i as u64);
        rng
    }
}

/// Topology of one synthetic tree.
fn grow(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Vec<NodeIndex> {
    let mut nodes = vec![NodeIndex::ROOT];
    let mut frontier = vec![NodeIndex::ROOT];
    let mut p = 1.0;
    for _depth in 1..=cfg.max_depth {
        p *= cfg.inclusion_decay;
        let mut next = Vec::new();
        for v in frontier {
            for child in [v.left(), v.right()].into_iter().flatten() {
                if p >= 1.0 || rng.gen::<f64>() < p {
                    next.push(child);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        nodes.extend_from_slice(&next);
        frontier = next;
    }
    nodes.sort_unstable();
    nodes
}

/// Canonical trees only, without covariates.
pub fn synth_trees(cfg: &SynthConfig) -> Result<Vec<BinaryTree>> {
    cfg.validate()?;
    Ok(par::map_range(cfg.n, |i| {
        BinaryTree::from_sorted_unchecked(grow(cfg, &mut cfg.rng(i)))
    }))
}

/// A raw dataset file with radii, ids, ages and sexes.
pub fn synth_dataset(cfg: &SynthConfig) -> Result<DatasetFile> {
    cfg.validate()?;
    let width = cfg.n.to_string().len().max(3);
    let trees = par::map_range(cfg.n, |i| {
        let mut rng = cfg.rng(i);
        let topology = grow(cfg, &mut rng);
        let age = rng.gen_range(18..=72) as f64;
        let sex = if rng.gen_bool(0.5) { "F" } else { "M" };
        TreeRecord {
            subject_id: format!("s{:0width$}", i + 1),
            age: Some(age),
            sex: Some(sex.to_string()),
            covariates: Default::default(),
            nodes: Some(raw_nodes(&topology, &mut rng)),
            indices: None,
        }
    });
    Ok(DatasetFile {
        population: cfg.population.clone(),
        trees,
    })
}

/// Branch records for a topology. Radii shrink with depth; sibling order
/// and ids are scrambled so nothing of the original layout leaks through.
fn raw_nodes(topology: &[NodeIndex], rng: &mut ChaCha8Rng) -> Vec<AttributedNode> {
    let mut order: Vec<usize> = (0..topology.len()).collect();
    order.shuffle(rng);
    let mut id_of = vec![0usize; topology.len()];
    for (id, &i) in order.iter().enumerate() {
        id_of[i] = id;
    }
    let position = |v: NodeIndex| topology.binary_search(&v).ok();

    let mut radius = vec![0.0f64; topology.len()];
    let mut records = Vec::with_capacity(topology.len());
    for (i, &v) in topology.iter().enumerate() {
        let parent = if v.is_root() {
            None
        } else {
            position(v.parent_unchecked())
        };
        radius[i] = match parent {
            None => rng.gen_range(2.0..3.0),
            Some(p) => radius[p] * rng.gen_range(0.55..0.95),
        };
        records.push(AttributedNode {
            id: format!("b{}", id_of[i]),
            parent_id: parent.map(|p| format!("b{}", id_of[p])),
            median_radius: (radius[i] * 1e4).round() / 1e4,
        });
    }
    records.shuffle(rng);
    records
}
