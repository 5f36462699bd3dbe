//! Per-tree component scores and their regression on a covariate.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::line::{score, union_score, TreeLine};
use crate::par;
use crate::stats::{linreg, RegressionResult};
use crate::tree::{Subject, TreeDataset};

#[derive(Clone, Debug, PartialEq)]
pub struct ScoreRow {
    pub subject: Subject,
    /// `scores[k]` is the score on component `k + 1` alone.
    pub scores: Vec<usize>,
    /// `cumulative[k]` is the score on the union of components `1..=k+1`.
    pub cumulative: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoreTable {
    pub components: usize,
    pub rows: Vec<ScoreRow>,
}

/// Column labels in table order: `pc1..pcK`, then `pc1u2..pc1u..uK`.
pub fn column_labels(components: usize) -> Vec<String> {
    let single = (1..=components).map(|k| format!("pc{k}"));
    let unions = (2..=components).map(|k| {
        let tail: Vec<String> = (2..=k).map(|j| j.to_string()).collect();
        format!("pc1u{}", tail.join("u"))
    });
    single.chain(unions).collect()
}

impl ScoreTable {
    /// Values of row `i` in `column_labels` order.
    pub fn row_values(&self, i: usize) -> Vec<usize> {
        let row = &self.rows[i];
        row.scores
            .iter()
            .chain(row.cumulative.iter().skip(1))
            .copied()
            .collect()
    }

    pub fn labels(&self) -> Vec<String> {
        column_labels(self.components)
    }
}

/// Scores of every tree on the first `k` lines, individually and as
/// growing unions.
pub fn build_score_table(
    dataset: &TreeDataset,
    lines: &[TreeLine],
    k: usize,
) -> Result<ScoreTable> {
    if k == 0 || k > lines.len() {
        return Err(Error::InvalidArgument(format!(
            "requested {k} components but {} are available",
            lines.len()
        )));
    }
    let lines = &lines[..k];
    let per_tree = par::try_map(dataset.trees(), |t| -> Result<(Vec<usize>, Vec<usize>)> {
        let scores = lines.iter().map(|l| score(t, l)).collect();
        let cumulative = (1..=k)
            .map(|j| union_score(t, &lines[..j]))
            .collect::<Result<_>>()?;
        Ok((scores, cumulative))
    })?;
    let rows = per_tree
        .into_iter()
        .zip(dataset.subjects())
        .map(|((scores, cumulative), subject)| ScoreRow {
            subject: subject.clone(),
            scores,
            cumulative,
        })
        .collect();
    Ok(ScoreTable {
        components: k,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentRegression {
    pub component: String,
    pub covariate: String,
    pub dropped: usize,
    #[serde(flatten)]
    pub result: RegressionResult,
}

/// Regresses every score column on a numeric covariate. Rows without the
/// covariate are skipped.
pub fn regress_scores(table: &ScoreTable, covariate: &str) -> Result<Vec<ComponentRegression>> {
    let kept: Vec<(usize, f64)> = table
        .rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.subject.covariate(covariate).map(|x| (i, x)))
        .collect();
    if kept.is_empty() {
        return Err(Error::MissingCovariate(covariate.to_string()));
    }
    let dropped = table.rows.len() - kept.len();
    if dropped > 0 {
        log::warn!(
            "{dropped} trees lack covariate `{covariate}` and were left out of the regression"
        );
    }
    let x: Vec<f64> = kept.iter().map(|&(_, x)| x).collect();
    let values: Vec<Vec<usize>> = kept.iter().map(|&(i, _)| table.row_values(i)).collect();

    table
        .labels()
        .into_iter()
        .enumerate()
        .map(|(col, label)| {
            let y: Vec<f64> = values.iter().map(|v| v[col] as f64).collect();
            Ok(ComponentRegression {
                component: label,
                covariate: covariate.to_string(),
                dropped,
                result: linreg(&x, &y)?,
            })
        })
        .collect()
}
