//! The 39-slot feature catalog and its assembly.
//!
//! Slot order is fixed and versioned: demographics and global features
//! first, then six per-region features for each of the four angiosomes
//! and the full foot. Reports should echo [`CATALOG_VERSION`] so
//! downstream consumers can detect ordering changes.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{FootRecord, FootSide, Gender, SubjectRecord, ThermalMap};
use crate::error::{Error, Result};
use crate::features::histogram::{
    estimate_temperature, estimated_temperature_difference, hot_spot_estimator,
    temperature_histogram,
};
use crate::features::{compute_tci, ntr_fractions, summary_stats, AngiosomeMeans, NtrConfig,
    ReferencePattern};
use crate::matrix::Matrix;

pub const CATALOG_VERSION: &str = "v1";
pub const FEATURE_COUNT: usize = 39;

const REGIONS: [&str; 5] = ["LPA", "LCA", "MPA", "MCA", "FullFoot"];
const REGION_STATS: [&str; 6] = ["ET", "ETD", "HSE", "mean", "median", "STD"];

/// Canonical feature names in catalog order.
pub fn feature_names() -> Vec<String> {
    let mut names = vec![
        "age".to_string(),
        "gender".to_string(),
        "TCI".to_string(),
        "highest_temperature".to_string(),
    ];
    for k in 1..=5 {
        names.push(format!("NTR_class{k}"));
    }
    for region in REGIONS {
        for stat in REGION_STATS {
            names.push(format!("{region}_{stat}"));
        }
    }
    debug_assert_eq!(names.len(), FEATURE_COUNT);
    names
}

/// Configuration shared by every feature computation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    #[serde(default)]
    pub ntr: NtrConfig,
    #[serde(default)]
    pub reference: ReferencePattern,
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        self.ntr.validate()?;
        self.reference.validate()
    }
}

/// One foot's 39 feature values in catalog order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    /// Set when the contralateral foot was absent and the difference
    /// features fell back to zero.
    pub missing_contralateral: bool,
}

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        feature_names()
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i])
    }
}

struct RegionFeatures {
    et: f64,
    hse: f64,
    mean: f64,
    median: f64,
    std: f64,
}

fn region_features(map: &ThermalMap) -> Result<RegionFeatures> {
    let hist = temperature_histogram(map)?;
    let stats = summary_stats(map)?;
    Ok(RegionFeatures {
        et: estimate_temperature(&hist),
        hse: hot_spot_estimator(&hist),
        mean: stats.mean,
        median: stats.median,
        std: stats.std,
    })
}

fn region_maps(foot: &FootRecord) -> [&ThermalMap; 5] {
    [
        &foot.angiosomes.lpa,
        &foot.angiosomes.lca,
        &foot.angiosomes.mpa,
        &foot.angiosomes.mca,
        &foot.foot_map,
    ]
}

/// Computes the full feature vector for one foot of a subject.
///
/// Contralateral difference slots use the other foot's estimate
/// temperatures; for single-foot subjects they are zero and the vector
/// is flagged.
pub fn assemble_features(
    subject: &SubjectRecord,
    side: FootSide,
    config: &FeatureConfig,
) -> Result<FeatureVector> {
    config.validate()?;
    let foot = subject.foot(side).ok_or_else(|| {
        Error::Validation(format!(
            "subject {}: no {} foot",
            subject.subject_id,
            side.as_str()
        ))
    })?;
    let other = subject.foot(side.opposite());

    let slot = |name: &str, r: Result<f64>| -> Result<f64> {
        r.map_err(|e| Error::Validation(format!("feature {name}: {e}")))
    };

    let mut values = Vec::with_capacity(FEATURE_COUNT);
    values.push(subject.age as f64);
    values.push(match subject.gender {
        Gender::Male => 0.0,
        Gender::Female => 1.0,
    });

    let means = AngiosomeMeans {
        lca: slot("LCA_mean", summary_stats(&foot.angiosomes.lca).map(|s| s.mean))?,
        lpa: slot("LPA_mean", summary_stats(&foot.angiosomes.lpa).map(|s| s.mean))?,
        mca: slot("MCA_mean", summary_stats(&foot.angiosomes.mca).map(|s| s.mean))?,
        mpa: slot("MPA_mean", summary_stats(&foot.angiosomes.mpa).map(|s| s.mean))?,
    };
    values.push(compute_tci(&means, &config.reference));

    let full_hist = slot(
        "highest_temperature",
        temperature_histogram(&foot.foot_map).map(|h| h.max_present_temperature),
    )?;
    values.push(full_hist);

    let ntr = ntr_fractions(&foot.foot_map, &config.ntr)
        .map_err(|e| Error::Validation(format!("feature NTR: {e}")))?;
    values.extend_from_slice(&ntr);

    let mut missing_contralateral = false;
    let this_regions = region_maps(foot);
    for (ri, region_name) in REGIONS.iter().enumerate() {
        let f = region_features(this_regions[ri])
            .map_err(|e| Error::Validation(format!("feature {region_name}: {e}")))?;
        let etd = match other {
            Some(other_foot) => {
                let other_map = region_maps(other_foot)[ri];
                let other_hist = temperature_histogram(other_map)
                    .map_err(|e| Error::Validation(format!("feature {region_name}_ETD: {e}")))?;
                estimated_temperature_difference(f.et, estimate_temperature(&other_hist))
            }
            None => {
                missing_contralateral = true;
                0.0
            }
        };
        values.push(f.et);
        values.push(etd);
        values.push(f.hse);
        values.push(f.mean);
        values.push(f.median);
        values.push(f.std);
    }

    debug_assert_eq!(values.len(), FEATURE_COUNT);
    if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Validation(format!(
            "feature {}: non-finite value",
            feature_names()[bad]
        )));
    }
    Ok(FeatureVector {
        values,
        missing_contralateral,
    })
}

/// Identity of one sample (one foot) in a feature table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SampleId {
    pub subject_id: String,
    pub foot_side: FootSide,
}

/// Feature matrix over every foot of a dataset, with labels (DM = 1).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FeatureTable {
    pub names: Vec<String>,
    pub x: Matrix,
    pub y: Vec<u8>,
    pub sample_ids: Vec<SampleId>,
    pub catalog_version: String,
}

/// Builds the feature table for a dataset, one row per foot.
pub fn feature_matrix(subjects: &[SubjectRecord], config: &FeatureConfig) -> Result<FeatureTable> {
    let names = feature_names();
    let mut x = Matrix::zeros(0, FEATURE_COUNT);
    let mut y = Vec::new();
    let mut sample_ids = Vec::new();
    for subject in subjects {
        for foot in &subject.feet {
            let fv = assemble_features(subject, foot.side(), config)?;
            x.push_row(&fv.values);
            y.push(subject.group_label.label());
            sample_ids.push(SampleId {
                subject_id: subject.subject_id.clone(),
                foot_side: foot.side(),
            });
        }
    }
    if y.is_empty() {
        return Err(Error::InsufficientData("dataset has no feet".into()));
    }
    Ok(FeatureTable {
        names,
        x,
        y,
        sample_ids,
        catalog_version: CATALOG_VERSION.to_string(),
    })
}

/// Writes the table as CSV: identity columns, label, then the 39
/// canonical feature columns.
pub fn write_feature_csv(table: &FeatureTable, path: &Path) -> Result<()> {
    let mut out = String::from("subject_id,foot_side,group");
    for name in &table.names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for i in 0..table.x.rows() {
        let id = &table.sample_ids[i];
        out.push_str(&format!(
            "{},{},{}",
            id.subject_id,
            id.foot_side.as_str(),
            if table.y[i] == 1 { "DM" } else { "CG" }
        ));
        for v in table.x.row(i) {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
