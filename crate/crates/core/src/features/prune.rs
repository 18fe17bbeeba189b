//! Correlation-based feature pruning.
//!
//! A greedy scan in catalog order: each feature is dropped when its
//! absolute Pearson correlation with any earlier retained feature
//! exceeds the threshold. Constant features carry no information and an
//! undefined correlation, so they are dropped outright.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Pruning outcome: retained mask plus the full correlation matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FeatureCatalog {
    pub names: Vec<String>,
    pub retained: Vec<bool>,
    /// Pairwise Pearson correlations; undefined entries (constant
    /// features) are stored as 0 with the diagonal fixed at 1.
    pub correlation: Vec<Vec<f64>>,
    pub threshold: f64,
    pub version: String,
}

impl FeatureCatalog {
    pub fn retained_indices(&self) -> Vec<usize> {
        self.retained
            .iter()
            .enumerate()
            .filter(|(_, &r)| r)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn retained_names(&self) -> Vec<String> {
        self.retained_indices()
            .into_iter()
            .map(|i| self.names[i].clone())
            .collect()
    }
}

/// Pearson correlation of two equally long samples; `None` when either
/// sample has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b.iter()) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return None;
    }
    Some(cov / (va * vb).sqrt())
}

/// Greedily prunes features whose |r| with a retained predecessor
/// exceeds `threshold`. `x` is samples × features.
pub fn correlation_prune(x: &Matrix, names: &[String], threshold: f64) -> Result<FeatureCatalog> {
    if x.rows() < 2 {
        return Err(Error::InsufficientData(
            "correlation pruning needs at least two samples".into(),
        ));
    }
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Config(format!(
            "correlation threshold {threshold} outside (0, 1]"
        )));
    }
    if names.len() != x.cols() {
        return Err(Error::Shape(format!(
            "{} names for {} columns",
            names.len(),
            x.cols()
        )));
    }

    let d = x.cols();
    let columns: Vec<Vec<f64>> = (0..d).map(|j| x.column(j)).collect();
    let mut correlation = vec![vec![0.0f64; d]; d];
    for i in 0..d {
        correlation[i][i] = 1.0;
        for j in (i + 1)..d {
            let r = pearson(&columns[i], &columns[j]).unwrap_or(0.0);
            correlation[i][j] = r;
            correlation[j][i] = r;
        }
    }

    let mut retained = vec![false; d];
    let mut kept: Vec<usize> = Vec::new();
    for j in 0..d {
        let constant = pearson(&columns[j], &columns[j]).is_none();
        if constant {
            continue;
        }
        let redundant = kept
            .iter()
            .any(|&i| correlation[i][j].abs() > threshold);
        if !redundant {
            retained[j] = true;
            kept.push(j);
        }
    }

    Ok(FeatureCatalog {
        names: names.to_vec(),
        retained,
        correlation,
        threshold,
        version: super::CATALOG_VERSION.to_string(),
    })
}
