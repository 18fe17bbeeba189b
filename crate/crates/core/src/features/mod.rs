//! The per-foot feature catalog and its building blocks.
//!
//! Thirty-nine features per foot: demographics, the thermal change
//! index, the highest present temperature, five normalized temperature
//! range fractions, and per-region estimate temperature, contralateral
//! difference, hot-spot gap, and summary statistics for the four
//! angiosomes and the full foot.

mod catalog;
mod histogram;
mod prune;

pub use catalog::{
    assemble_features, feature_matrix, feature_names, write_feature_csv, FeatureConfig,
    FeatureTable, FeatureVector, SampleId, CATALOG_VERSION, FEATURE_COUNT,
};
pub use histogram::{
    estimate_temperature, estimated_temperature_difference, hot_spot_estimator,
    temperature_histogram, TemperatureHistogram, CLASS_CENTERS,
};
pub use prune::{correlation_prune, pearson, FeatureCatalog};

use serde::{Deserialize, Serialize};

use crate::data::ThermalMap;
use crate::error::{Error, Result};

/// Five contiguous half-open temperature intervals `[lo, hi)` used for
/// the normalized temperature range fractions. Pixels outside the span
/// count toward no class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NtrConfig {
    /// Six ascending boundaries delimiting the five intervals.
    pub boundaries: [f64; 6],
}

impl Default for NtrConfig {
    fn default() -> Self {
        NtrConfig {
            boundaries: [20.0, 27.0, 29.0, 31.0, 33.0, 36.0],
        }
    }
}

impl NtrConfig {
    pub fn new(boundaries: [f64; 6]) -> Result<Self> {
        let cfg = NtrConfig { boundaries };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.boundaries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "NTR boundaries must be strictly ascending".into(),
            ));
        }
        Ok(())
    }

    pub fn intervals(&self) -> [(f64, f64); 5] {
        let b = &self.boundaries;
        [
            (b[0], b[1]),
            (b[1], b[2]),
            (b[2], b[3]),
            (b[3], b[4]),
            (b[4], b[5]),
        ]
    }
}

/// Fraction of foreground pixels falling in each NTR interval.
pub fn ntr_fractions(map: &ThermalMap, config: &NtrConfig) -> Result<[f64; 5]> {
    config.validate()?;
    let mut counts = [0usize; 5];
    let mut total = 0usize;
    for (_, _, v) in map.foreground() {
        total += 1;
        for (k, (lo, hi)) in config.intervals().iter().enumerate() {
            if v >= *lo && v < *hi {
                counts[k] += 1;
                break;
            }
        }
    }
    if total == 0 {
        return Err(Error::InsufficientData("NTR of an all-background map".into()));
    }
    let mut fractions = [0.0f64; 5];
    for (f, &c) in fractions.iter_mut().zip(counts.iter()) {
        *f = c as f64 / total as f64;
    }
    Ok(fractions)
}

/// Reference angiosome means of the control pattern, °C.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferencePattern {
    pub lca: f64,
    pub lpa: f64,
    pub mca: f64,
    pub mpa: f64,
}

impl Default for ReferencePattern {
    fn default() -> Self {
        ReferencePattern {
            lca: 26.6,
            lpa: 26.4,
            mca: 27.0,
            mpa: 26.7,
        }
    }
}

impl ReferencePattern {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lca", self.lca),
            ("lpa", self.lpa),
            ("mca", self.mca),
            ("mpa", self.mpa),
        ] {
            if !(15.0..=45.0).contains(&v) {
                return Err(Error::Config(format!(
                    "reference {name} = {v} outside [15, 45] °C"
                )));
            }
        }
        Ok(())
    }
}

/// Mean angiosome temperatures of one foot, °C.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngiosomeMeans {
    pub lca: f64,
    pub lpa: f64,
    pub mca: f64,
    pub mpa: f64,
}

/// Mean absolute deviation of the subject's angiosome means from the
/// reference pattern.
pub fn compute_tci(subject: &AngiosomeMeans, reference: &ReferencePattern) -> f64 {
    ((subject.lca - reference.lca).abs()
        + (subject.lpa - reference.lpa).abs()
        + (subject.mca - reference.mca).abs()
        + (subject.mpa - reference.mpa).abs())
        / 4.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub median: f64,
    /// Population (1/n) standard deviation.
    pub std: f64,
    pub max: f64,
}

/// Mean, median, population standard deviation, and maximum of the
/// foreground pixels.
pub fn summary_stats(map: &ThermalMap) -> Result<SummaryStats> {
    let mut values = map.foreground_values();
    if values.is_empty() {
        return Err(Error::InsufficientData(
            "summary of an all-background map".into(),
        ));
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let median = if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    };
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    Ok(SummaryStats {
        mean,
        median,
        std: var.sqrt(),
        max: values[n - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{FootSide, ThermalMap};

    fn map_of(values: &[f64]) -> ThermalMap {
        ThermalMap::new(1, values.len(), values.to_vec(), FootSide::Left).unwrap()
    }

    #[test]
    fn single_interval_membership() {
        let f = ntr_fractions(&map_of(&[30.0; 6]), &NtrConfig::default()).unwrap();
        assert_eq!(f, [0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn split_between_outer_intervals() {
        let mut values = vec![26.0; 4];
        values.extend(vec![34.0; 4]);
        let f = ntr_fractions(&map_of(&values), &NtrConfig::default()).unwrap();
        assert_eq!(f, [0.5, 0.0, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn out_of_span_pixels_count_nowhere() {
        let f = ntr_fractions(&map_of(&[15.5; 3]), &NtrConfig::default()).unwrap();
        assert_eq!(f, [0.0; 5]);
    }

    #[test]
    fn tci_zero_at_reference() {
        let reference = ReferencePattern::default();
        let subject = AngiosomeMeans {
            lca: reference.lca,
            lpa: reference.lpa,
            mca: reference.mca,
            mpa: reference.mpa,
        };
        assert_eq!(compute_tci(&subject, &reference), 0.0);
    }

    #[test]
    fn tci_uniform_offset() {
        let reference = ReferencePattern::default();
        let subject = AngiosomeMeans {
            lca: reference.lca + 3.0,
            lpa: reference.lpa + 3.0,
            mca: reference.mca + 3.0,
            mpa: reference.mpa + 3.0,
        };
        assert!((compute_tci(&subject, &reference) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn tci_hand_computed() {
        let reference = ReferencePattern::default();
        let subject = AngiosomeMeans {
            lca: 29.4,
            lpa: 30.3,
            mca: 29.6,
            mpa: 30.6,
        };
        assert!((compute_tci(&subject, &reference) - 3.3).abs() < 1e-9);
    }

    #[test]
    fn summary_of_constant_field() {
        let s = summary_stats(&map_of(&[28.0; 9])).unwrap();
        assert_eq!((s.mean, s.median, s.std, s.max), (28.0, 28.0, 0.0, 28.0));
    }

    #[test]
    fn summary_hand_computed() {
        let s = summary_stats(&map_of(&[26.0, 28.0, 30.0, 32.0])).unwrap();
        assert!((s.mean - 29.0).abs() < 1e-12);
        assert!((s.median - 29.0).abs() < 1e-12);
        assert!((s.std - 5.0_f64.sqrt()).abs() < 1e-12);
        assert_eq!(s.max, 32.0);
    }

    #[test]
    fn summary_singleton() {
        let s = summary_stats(&map_of(&[27.0])).unwrap();
        assert_eq!((s.mean, s.median, s.std, s.max), (27.0, 27.0, 0.0, 27.0));
    }

    #[test]
    fn shifting_pixels_shifts_location_stats_only() {
        let values = [26.0, 27.5, 29.0, 30.5, 33.0];
        let map = map_of(&values);
        let shifted = map.shifted(2.0).unwrap();
        let a = summary_stats(&map).unwrap();
        let b = summary_stats(&shifted).unwrap();
        assert!((b.mean - a.mean - 2.0).abs() < 1e-9);
        assert!((b.median - a.median - 2.0).abs() < 1e-9);
        assert!((b.max - a.max - 2.0).abs() < 1e-9);
        assert!((b.std - a.std).abs() < 1e-9);

        // NTR against a config shifted by the same amount is unchanged.
        let cfg = NtrConfig::default();
        let mut shifted_bounds = cfg.boundaries;
        for b in &mut shifted_bounds {
            *b += 2.0;
        }
        let f0 = ntr_fractions(&map, &cfg).unwrap();
        let f1 = ntr_fractions(&shifted, &NtrConfig::new(shifted_bounds).unwrap()).unwrap();
        assert_eq!(f0, f1);
    }
}
