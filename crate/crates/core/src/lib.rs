//! Principal component analysis for populations of binary trees.
//!
//! Trees are sets of level-order node indices ([`BinaryTree`]). A
//! [`TreeLine`] grows a starting tree along a single parent-to-child chain,
//! and principal component tree-lines are the chains that best explain a
//! population. [`pc_treelines`] finds them with one linear pass over the
//! support tree per component; [`oracle::oracle_pc`] finds them by brute
//! force for cross-checking.
//!
//! ```
//! use treeline::{pc_treelines, BinaryTree, TreeDataset};
//!
//! let trees = [vec![1, 2, 4], vec![1, 2, 4], vec![1, 2, 5], vec![1, 3]]
//!     .into_iter()
//!     .map(BinaryTree::new)
//!     .collect::<Result<Vec<_>, _>>()?;
//! let data = TreeDataset::new(trees)?;
//! let pcs = pc_treelines(&data, &data.intersection(), 2)?;
//! assert_eq!(pcs.gains, vec![5, 1]);
//! # Ok::<(), treeline::Error>(())
//! ```

pub mod correspondence;
pub mod error;
pub mod io;
pub mod line;
pub mod oracle;
mod par;
pub mod scores;
pub mod solver;
pub mod stats;
pub mod synth;
pub mod tree;

pub use correspondence::{
    apply_correspondence, AttributedNode, AttributedTree, CorrespondenceMode,
};
pub use error::{Error, Result};
pub use line::{project, project_union, score, union_score, Projection, TreeLine};
pub use scores::{build_score_table, regress_scores, ScoreTable};
pub use solver::{
    compute_weights, explained_curve, explained_variation, max_weight_path, pc_treelines, PcResult,
    WeightedPath, WeightedSupport,
};
pub use stats::{linreg, student_t_two_sided, RegressionResult};
pub use tree::{distance, BinaryTree, NodeIndex, Subject, TreeDataset};
