//! Externally computed score files.
//!
//! Classifiers outside this crate (an MLP or SVM, for instance) join
//! the grid through CSV files of per-fold test scores keyed by sample
//! identity: `subject_id,foot_side,fold,score`. The fold column must
//! name the fold whose test set contains the sample, which callers can
//! derive from the exported fold plan.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::data::FootSide;
use crate::error::{Error, Result};
use crate::features::SampleId;

#[derive(Clone, Debug, Default)]
pub struct ExternalScoreSet {
    scores: HashMap<(String, FootSide, usize), f64>,
}

impl ExternalScoreSet {
    pub fn load(path: &Path) -> Result<ExternalScoreSet> {
        let text = fs::read_to_string(path).map_err(|e| Error::MissingFile {
            path: path.to_path_buf(),
            source: e,
        })?;
        let mut scores = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with("subject_id")) {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 4 {
                return Err(Error::GridParse {
                    path: path.to_path_buf(),
                    line: lineno + 1,
                    message: format!("expected 4 fields, got {}", fields.len()),
                });
            }
            let parse_err = |message: String| Error::GridParse {
                path: path.to_path_buf(),
                line: lineno + 1,
                message,
            };
            let side: FootSide = fields[1]
                .parse()
                .map_err(|_| parse_err(format!("bad foot side {:?}", fields[1])))?;
            let fold: usize = fields[2]
                .parse()
                .map_err(|_| parse_err(format!("bad fold index {:?}", fields[2])))?;
            let score: f64 = fields[3]
                .parse()
                .map_err(|_| parse_err(format!("bad score {:?}", fields[3])))?;
            if !(0.0..=1.0).contains(&score) {
                return Err(parse_err(format!("score {score} outside [0, 1]")));
            }
            scores.insert((fields[0].to_string(), side, fold), score);
        }
        Ok(ExternalScoreSet { scores })
    }

    pub fn score(&self, id: &SampleId, fold: usize) -> Option<f64> {
        self.scores
            .get(&(id.subject_id.clone(), id.foot_side, fold))
            .copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Writes scores in the external exchange format.
pub fn write_external_scores(
    rows: &[(SampleId, usize, f64)],
    path: &Path,
) -> Result<()> {
    let mut out = String::from("subject_id,foot_side,fold,score\n");
    for (id, fold, score) in rows {
        out.push_str(&format!(
            "{},{},{fold},{score}\n",
            id.subject_id,
            id.foot_side.as_str()
        ));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
