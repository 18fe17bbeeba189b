//! Dataset model: plantar temperature grids, angiosome regions, and
//! subject records, plus loading, saving, geometric angiosome splitting,
//! and a seeded synthetic generator.
//!
//! A grid cell holds either a temperature in °C or exactly `0.0`, the
//! background sentinel. Every statistic in the crate is computed over
//! non-background cells only.

mod manifest;
mod split;
mod synth;

pub use manifest::{
    load_dataset, load_dataset_with, read_grid, save_dataset, write_grid, AngiosomePaths,
    DatasetManifest, ManifestEntry,
};
pub use split::{split_angiosomes, AngiosomeLayout};
pub use synth::{synthesize_dataset, synthesize_with, SynthesisConfig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Background sentinel value for grid cells.
pub const BACKGROUND: f64 = 0.0;
/// Lowest plausible plantar temperature, °C.
pub const TEMP_MIN: f64 = 15.0;
/// Highest plausible plantar temperature, °C.
pub const TEMP_MAX: f64 = 45.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FootSide {
    Left,
    Right,
}

impl FootSide {
    pub fn as_str(&self) -> &'static str {
        match self {
            FootSide::Left => "left",
            FootSide::Right => "right",
        }
    }

    pub fn opposite(&self) -> FootSide {
        match self {
            FootSide::Left => FootSide::Right,
            FootSide::Right => FootSide::Left,
        }
    }
}

impl std::str::FromStr for FootSide {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "left" | "l" => Ok(FootSide::Left),
            "right" | "r" => Ok(FootSide::Right),
            other => Err(Error::Validation(format!("unknown foot side {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Male,
    Female,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupLabel {
    #[serde(rename = "DM")]
    Dm,
    #[serde(rename = "CG")]
    Cg,
}

impl GroupLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            GroupLabel::Dm => "DM",
            GroupLabel::Cg => "CG",
        }
    }

    /// DM is the positive class in every classification run.
    pub fn label(&self) -> u8 {
        match self {
            GroupLabel::Dm => 1,
            GroupLabel::Cg => 0,
        }
    }
}

/// Rectangular grid of plantar temperatures with a background sentinel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalMap {
    rows: usize,
    cols: usize,
    cells: Vec<f64>,
    pub foot_side: FootSide,
}

impl ThermalMap {
    /// Builds a map and checks its invariants: cell count matches the
    /// dimensions, at least one foreground cell exists, and every
    /// foreground value lies in `[TEMP_MIN, TEMP_MAX]`.
    pub fn new(rows: usize, cols: usize, cells: Vec<f64>, foot_side: FootSide) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Validation("grid dimensions must be positive".into()));
        }
        if cells.len() != rows * cols {
            return Err(Error::Validation(format!(
                "grid has {} cells, expected {rows}x{cols}={}",
                cells.len(),
                rows * cols
            )));
        }
        let mut foreground = 0usize;
        for (i, &v) in cells.iter().enumerate() {
            if v == BACKGROUND {
                continue;
            }
            foreground += 1;
            if !v.is_finite() || !(TEMP_MIN..=TEMP_MAX).contains(&v) {
                return Err(Error::Validation(format!(
                    "cell ({}, {}): temperature {v} outside [{TEMP_MIN}, {TEMP_MAX}] °C",
                    i / cols,
                    i % cols
                )));
            }
        }
        if foreground == 0 {
            return Err(Error::Validation("grid has no foreground cells".into()));
        }
        Ok(ThermalMap {
            rows,
            cols,
            cells,
            foot_side,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.cells[r * self.cols + c]
    }

    pub fn is_foreground(&self, r: usize, c: usize) -> bool {
        self.get(r, c) != BACKGROUND
    }

    /// Iterator over `(row, col, value)` of foreground cells.
    pub fn foreground(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let cols = self.cols;
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != BACKGROUND)
            .map(move |(i, &v)| (i / cols, i % cols, v))
    }

    pub fn foreground_values(&self) -> Vec<f64> {
        self.cells
            .iter()
            .copied()
            .filter(|&v| v != BACKGROUND)
            .collect()
    }

    pub fn foreground_count(&self) -> usize {
        self.cells.iter().filter(|&&v| v != BACKGROUND).count()
    }

    /// Returns a copy with `delta` added to every foreground cell.
    pub fn shifted(&self, delta: f64) -> Result<ThermalMap> {
        let cells = self
            .cells
            .iter()
            .map(|&v| if v == BACKGROUND { v } else { v + delta })
            .collect();
        ThermalMap::new(self.rows, self.cols, cells, self.foot_side)
    }
}

/// The four angiosome regions of one foot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngiosomeSet {
    pub mpa: ThermalMap,
    pub lpa: ThermalMap,
    pub mca: ThermalMap,
    pub lca: ThermalMap,
}

impl AngiosomeSet {
    pub fn regions(&self) -> [(&'static str, &ThermalMap); 4] {
        [
            ("mpa", &self.mpa),
            ("lpa", &self.lpa),
            ("mca", &self.mca),
            ("lca", &self.lca),
        ]
    }

    /// Checks the set against its parent foot map: matching sides and
    /// dimensions, pairwise-disjoint foreground pixels, and a combined
    /// foreground no larger than the parent's.
    pub fn validate_against(&self, foot: &ThermalMap) -> Result<()> {
        let mut seen = vec![false; foot.rows() * foot.cols()];
        let mut union = 0usize;
        for (name, map) in self.regions() {
            if map.foot_side != foot.foot_side {
                return Err(Error::Validation(format!(
                    "angiosome {name} foot side does not match the foot map"
                )));
            }
            if map.rows() != foot.rows() || map.cols() != foot.cols() {
                return Err(Error::Validation(format!(
                    "angiosome {name} dimensions do not match the foot map"
                )));
            }
            for (r, c, _) in map.foreground() {
                let i = r * foot.cols() + c;
                if seen[i] {
                    return Err(Error::Validation(format!(
                        "angiosome {name}: pixel ({r}, {c}) belongs to more than one region"
                    )));
                }
                seen[i] = true;
                union += 1;
            }
        }
        if union > foot.foreground_count() {
            return Err(Error::Validation(
                "angiosome foreground exceeds the parent foot's foreground".into(),
            ));
        }
        Ok(())
    }
}

/// One foot of a subject: the full map plus its angiosome regions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FootRecord {
    pub subject_id: String,
    pub foot_map: ThermalMap,
    pub angiosomes: AngiosomeSet,
}

impl FootRecord {
    pub fn new(subject_id: String, foot_map: ThermalMap, angiosomes: AngiosomeSet) -> Result<Self> {
        angiosomes.validate_against(&foot_map)?;
        Ok(FootRecord {
            subject_id,
            foot_map,
            angiosomes,
        })
    }

    pub fn side(&self) -> FootSide {
        self.foot_map.foot_side
    }
}

/// A study participant with demographics and one or two feet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubjectRecord {
    pub subject_id: String,
    pub age: u32,
    pub gender: Gender,
    pub group_label: GroupLabel,
    pub feet: Vec<FootRecord>,
}

impl SubjectRecord {
    pub fn new(
        subject_id: String,
        age: u32,
        gender: Gender,
        group_label: GroupLabel,
        feet: Vec<FootRecord>,
    ) -> Result<Self> {
        if !(1..=120).contains(&age) {
            return Err(Error::Validation(format!(
                "subject {subject_id}: age {age} outside [1, 120]"
            )));
        }
        if feet.is_empty() || feet.len() > 2 {
            return Err(Error::Validation(format!(
                "subject {subject_id}: expected one or two feet, got {}",
                feet.len()
            )));
        }
        if feet.len() == 2 && feet[0].side() == feet[1].side() {
            return Err(Error::Validation(format!(
                "subject {subject_id}: both feet have the same side"
            )));
        }
        Ok(SubjectRecord {
            subject_id,
            age,
            gender,
            group_label,
            feet,
        })
    }

    pub fn foot(&self, side: FootSide) -> Option<&FootRecord> {
        self.feet.iter().find(|f| f.side() == side)
    }

    /// True when only one foot was available at load time.
    pub fn single_foot(&self) -> bool {
        self.feet.len() == 1
    }
}

/// Per-group subject counts of a dataset.
pub fn class_counts(subjects: &[SubjectRecord]) -> (usize, usize) {
    let cg = subjects
        .iter()
        .filter(|s| s.group_label == GroupLabel::Cg)
        .count();
    (cg, subjects.len() - cg)
}
