//! On-disk formats.
//!
//! Datasets and results are UTF-8 JSON; score tables and curves are CSV.
//!
//! A dataset file holds a population label and a list of trees. Each tree
//! is either raw (`nodes`: parent-linked branch records with radii) or
//! canonical (`indices`: strictly increasing level-order indices), and one
//! file never mixes the two.
//!
//! ```json
//! {
//!   "population": "left",
//!   "trees": [
//!     { "subject_id": "s001", "age": 34.0, "sex": "F", "indices": [1, 2, 3, 4] }
//!   ]
//! }
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::correspondence::{
    apply_correspondence, AttributedNode, AttributedTree, CorrespondenceMode,
};
use crate::error::{Error, Result};
use crate::line::TreeLine;
use crate::par;
use crate::scores::ScoreTable;
use crate::solver::PcResult;
use crate::tree::{BinaryTree, NodeIndex, Subject, TreeDataset};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeRecord {
    pub subject_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub age: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sex: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub covariates: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<AttributedNode>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indices: Option<BinaryTree>,
}

impl TreeRecord {
    fn subject(&self) -> Subject {
        Subject {
            id: self.subject_id.clone(),
            age: self.age,
            sex: self.sex.clone(),
            extra: self.covariates.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DatasetForm {
    Raw,
    Canonical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetFile {
    pub population: String,
    pub trees: Vec<TreeRecord>,
}

impl DatasetFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: DatasetFile = serde_json::from_str(text)?;
        file.validate()?;
        Ok(file)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Json(j) => Error::Format(format!("{}: {j}", path.display())),
            other => other,
        })
    }

    /// Checks the one-form-per-file rule and subject id uniqueness, and
    /// returns the form.
    pub fn validate(&self) -> Result<DatasetForm> {
        if self.trees.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut ids = HashSet::with_capacity(self.trees.len());
        let mut form = None;
        for rec in &self.trees {
            if !ids.insert(rec.subject_id.as_str()) {
                return Err(Error::Format(format!(
                    "duplicate subject id `{}`",
                    rec.subject_id
                )));
            }
            let this = match (&rec.nodes, &rec.indices) {
                (Some(_), None) => DatasetForm::Raw,
                (None, Some(_)) => DatasetForm::Canonical,
                _ => {
                    return Err(Error::Format(format!(
                        "tree `{}` must have exactly one of `nodes` or `indices`",
                        rec.subject_id
                    )))
                }
            };
            if *form.get_or_insert(this) != this {
                return Err(Error::Format(
                    "raw and canonical trees mixed in one file".into(),
                ));
            }
        }
        Ok(form.unwrap())
    }

    pub fn form(&self) -> Result<DatasetForm> {
        self.validate()
    }

    /// Converts raw trees to canonical index lists. Canonical files pass
    /// through unchanged.
    pub fn to_canonical(&self, mode: CorrespondenceMode) -> Result<DatasetFile> {
        if self.validate()? == DatasetForm::Canonical {
            return Ok(self.clone());
        }
        let trees = par::try_map(&self.trees, |rec| -> Result<TreeRecord> {
            let nodes = rec.nodes.clone().unwrap_or_default();
            let tree = AttributedTree::new(nodes).map_err(|e| annotate(&rec.subject_id, e))?;
            let indices =
                apply_correspondence(&tree, mode).map_err(|e| annotate(&rec.subject_id, e))?;
            Ok(TreeRecord {
                nodes: None,
                indices: Some(indices),
                ..rec.clone()
            })
        })?;
        Ok(DatasetFile {
            population: self.population.clone(),
            trees,
        })
    }

    /// The analysis dataset; requires canonical form.
    pub fn to_dataset(&self) -> Result<TreeDataset> {
        if self.validate()? != DatasetForm::Canonical {
            return Err(Error::Format(
                "expected canonical index lists; convert the raw trees first".into(),
            ));
        }
        let trees = self
            .trees
            .iter()
            .map(|r| r.indices.clone().unwrap())
            .collect();
        let subjects = self.trees.iter().map(TreeRecord::subject).collect();
        TreeDataset::with_subjects(trees, subjects)
    }
}

fn annotate(subject: &str, e: Error) -> Error {
    match e {
        Error::MalformedTree(m) => Error::MalformedTree(format!("tree `{subject}`: {m}")),
        Error::NonBinary { id, children } => Error::NonBinary {
            id: format!("{subject}/{id}"),
            children,
        },
        other => other,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentRecord {
    pub path: Vec<NodeIndex>,
    pub gain: u64,
}

/// Serialized principal component result.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PcResultFile {
    pub start: BinaryTree,
    pub components: Vec<ComponentRecord>,
    pub exhausted_at: Option<usize>,
}

impl From<&PcResult> for PcResultFile {
    fn from(res: &PcResult) -> Self {
        PcResultFile {
            start: res.start.clone(),
            components: res
                .lines
                .iter()
                .zip(&res.gains)
                .map(|(l, &gain)| ComponentRecord {
                    path: l.path().to_vec(),
                    gain,
                })
                .collect(),
            exhausted_at: res.exhausted_at,
        }
    }
}

impl TryFrom<PcResultFile> for PcResult {
    type Error = Error;

    fn try_from(file: PcResultFile) -> Result<Self> {
        let lines = file
            .components
            .iter()
            .map(|c| TreeLine::new(file.start.clone(), c.path.clone()))
            .collect::<Result<_>>()?;
        Ok(PcResult {
            gains: file.components.iter().map(|c| c.gain).collect(),
            start: file.start,
            lines,
            exhausted_at: file.exhausted_at,
        })
    }
}

pub fn read_pc_result(path: impl AsRef<Path>) -> Result<PcResult> {
    let text = fs::read_to_string(path)?;
    let file: PcResultFile = serde_json::from_str(&text)?;
    file.try_into()
}

/// Pretty JSON with a trailing newline.
pub fn write_json<W: Write, T: Serialize>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

/// Single-line JSON with a trailing newline; used for datasets.
pub fn write_json_compact<W: Write, T: Serialize>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

/// Score table as CSV: subject columns followed by one column per label.
pub fn write_score_csv<W: Write>(out: W, table: &ScoreTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["subject_id".to_string(), "age".into(), "sex".into()];
    header.extend(table.labels());
    w.write_record(&header)?;
    for (i, row) in table.rows.iter().enumerate() {
        let mut rec = vec![
            row.subject.id.clone(),
            row.subject.age.map(|a| a.to_string()).unwrap_or_default(),
            row.subject.sex.clone().unwrap_or_default(),
        ];
        rec.extend(table.row_values(i).into_iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Explained-variation curve as CSV, one row per cumulative component
/// count starting at 0.
pub fn write_explained_csv<W: Write>(
    out: W,
    res: &PcResult,
    curve: &[u64],
    total_nodes: u64,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["components", "gain", "explained", "total_nodes", "fraction"])?;
    for (k, &explained) in curve.iter().enumerate() {
        let gain = if k == 0 { 0 } else { res.gains[k - 1] };
        let fraction = if total_nodes == 0 {
            0.0
        } else {
            explained as f64 / total_nodes as f64
        };
        w.write_record([
            k.to_string(),
            gain.to_string(),
            explained.to_string(),
            total_nodes.to_string(),
            format!("{fraction:.6}"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const RAW: &str = r#"{
      "population": "left",
      "trees": [
        { "subject_id": "a", "age": 30, "sex": "F", "nodes": [
            { "id": "r", "median_radius": 3.0 },
            { "id": "x", "parent_id": "r", "median_radius": 1.0 },
            { "id": "y", "parent_id": "r", "median_radius": 2.0 },
            { "id": "x1", "parent_id": "x", "median_radius": 0.5 }
        ]},
        { "subject_id": "b", "age": 50, "nodes": [ { "id": "r", "median_radius": 2.0 } ] }
      ]
    }"#;

    #[test]
    fn raw_file_converts_to_canonical() {
        let raw = DatasetFile::from_json(RAW).unwrap();
        assert_eq!(raw.form().unwrap(), DatasetForm::Raw);
        assert!(raw.to_dataset().is_err());

        let thick = raw.to_canonical(CorrespondenceMode::Thickness).unwrap();
        assert_eq!(
            thick.trees[0].indices.as_ref().unwrap().indices(),
            vec![1, 2, 3, 6]
        );
        let desc = raw.to_canonical(CorrespondenceMode::Descendant).unwrap();
        assert_eq!(
            desc.trees[0].indices.as_ref().unwrap().indices(),
            vec![1, 2, 3, 4]
        );
        assert_eq!(desc.trees[1].indices.as_ref().unwrap().indices(), vec![1]);

        let ds = desc.to_dataset().unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.subjects()[0].age, Some(30.0));
        assert_eq!(ds.subjects()[0].sex.as_deref(), Some("F"));

        // canonical input ignores the mode
        assert_eq!(
            desc.to_canonical(CorrespondenceMode::Thickness).unwrap(),
            desc
        );
    }

    #[test]
    fn canonical_serialization_is_stable() {
        let desc = DatasetFile::from_json(RAW)
            .unwrap()
            .to_canonical(CorrespondenceMode::Descendant)
            .unwrap();
        let mut first = Vec::new();
        write_json(&mut first, &desc).unwrap();
        let again = DatasetFile::from_json(std::str::from_utf8(&first).unwrap()).unwrap();
        let mut second = Vec::new();
        write_json(&mut second, &again).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn rejects_bad_files() {
        let mixed = r#"{"population":"p","trees":[
            {"subject_id":"a","indices":[1]},
            {"subject_id":"b","nodes":[{"id":"r","median_radius":1.0}]}]}"#;
        assert!(matches!(
            DatasetFile::from_json(mixed),
            Err(Error::Format(_))
        ));

        let both = r#"{"population":"p","trees":[
            {"subject_id":"a","indices":[1],"nodes":[]}]}"#;
        assert!(matches!(
            DatasetFile::from_json(both),
            Err(Error::Format(_))
        ));

        let dup = r#"{"population":"p","trees":[
            {"subject_id":"a","indices":[1]},{"subject_id":"a","indices":[1]}]}"#;
        assert!(matches!(DatasetFile::from_json(dup), Err(Error::Format(_))));

        let empty = r#"{"population":"p","trees":[]}"#;
        assert!(matches!(
            DatasetFile::from_json(empty),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn ancestor_violation_reports_line() {
        let text = "{\n  \"population\": \"p\",\n  \"trees\": [\n    {\"subject_id\": \"a\", \"indices\": [1, 2, 3]},\n    {\"subject_id\": \"b\", \"indices\": [1, 2, 5, 10, 21, 43]},\n    {\"subject_id\": \"c\", \"indices\": [1, 3, 12]}\n  ]\n}";
        let err = DatasetFile::from_json(text).unwrap_err().to_string();
        assert!(err.contains("line 6"), "{err}");
        assert!(err.contains("parent 6 is missing"), "{err}");
    }

    #[test]
    fn pc_result_round_trip() {
        let json = r#"{"start":[1],"components":[{"path":[2,4],"gain":5},{"path":[3],"gain":1}],"exhausted_at":3}"#;
        let file: PcResultFile = serde_json::from_str(json).unwrap();
        let res: PcResult = file.clone().try_into().unwrap();
        assert_eq!(res.gains, vec![5, 1]);
        assert_eq!(PcResultFile::from(&res), file);
        assert_eq!(serde_json::to_string(&file).unwrap(), json);

        let broken = r#"{"start":[1],"components":[{"path":[2,5,10,20],"gain":5},{"path":[2,9],"gain":1}],"exhausted_at":null}"#;
        let file: PcResultFile = serde_json::from_str(broken).unwrap();
        assert!(PcResult::try_from(file).is_err());
    }
}
