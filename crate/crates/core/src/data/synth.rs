//! Seeded synthetic dataset generator.
//!
//! Produces desk-scale cohorts with the shape real plantar datasets
//! have: control feet centered on the published control angiosome means
//! with a cool central arch and near-symmetric left/right pairs,
//! diabetic feet with regional means raised by a configurable separation
//! plus randomly placed mean-neutral hot spots and noisier texture.
//! Output is a pure function of the configuration, including the seed.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{
    split_angiosomes, AngiosomeLayout, FootRecord, FootSide, Gender, GroupLabel, SubjectRecord,
    ThermalMap, BACKGROUND,
};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng, tag};

/// Control angiosome means the generator is centered on
/// (lca, lpa, mca, mpa), °C.
const CONTROL_MEANS: [f64; 4] = [26.6, 26.4, 27.0, 26.7];

/// Male fractions used for deterministic gender assignment, expressed
/// as published cohort counts.
const CG_MALE_RATIO: (usize, usize) = (29, 45);
const DM_MALE_RATIO: (usize, usize) = (33, 122);

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SynthesisConfig {
    pub n_cg: usize,
    pub n_dm: usize,
    /// Regional mean elevation of diabetic feet over controls, °C.
    pub separation: f64,
    pub rows: usize,
    pub cols: usize,
    pub seed: u64,
}

impl SynthesisConfig {
    pub fn new(n_cg: usize, n_dm: usize, separation: f64, seed: u64) -> Self {
        SynthesisConfig {
            n_cg,
            n_dm,
            separation,
            rows: 24,
            cols: 14,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_cg == 0 || self.n_dm == 0 {
            return Err(Error::Config("need at least one subject per group".into()));
        }
        if self.separation < 0.0 || !self.separation.is_finite() {
            return Err(Error::Config("separation must be non-negative".into()));
        }
        if self.rows < 8 || self.cols < 6 {
            return Err(Error::Config("synthetic grid too small".into()));
        }
        Ok(())
    }
}

/// Synthesizes a dataset with default grid dimensions.
pub fn synthesize_dataset(
    n_cg: usize,
    n_dm: usize,
    separation: f64,
    seed: u64,
) -> Result<Vec<SubjectRecord>> {
    synthesize_with(&SynthesisConfig::new(n_cg, n_dm, separation, seed))
}

pub fn synthesize_with(cfg: &SynthesisConfig) -> Result<Vec<SubjectRecord>> {
    cfg.validate()?;
    let geometry = FootGeometry::new(cfg.rows, cfg.cols)?;
    let mut subjects = Vec::with_capacity(cfg.n_cg + cfg.n_dm);
    for i in 0..cfg.n_cg {
        subjects.push(make_subject(cfg, &geometry, GroupLabel::Cg, i, i)?);
    }
    for i in 0..cfg.n_dm {
        subjects.push(make_subject(cfg, &geometry, GroupLabel::Dm, i, cfg.n_cg + i)?);
    }
    Ok(subjects)
}

/// Foot outline and per-pixel region assignment, shared by all subjects.
struct FootGeometry {
    rows: usize,
    cols: usize,
    /// Region index per cell: 0 mpa, 1 lpa, 2 mca, 3 lca; None = background.
    regions: [Vec<Option<usize>>; 2],
    foreground: [Vec<(usize, usize)>; 2],
}

impl FootGeometry {
    fn new(rows: usize, cols: usize) -> Result<FootGeometry> {
        let mut regions = [Vec::new(), Vec::new()];
        let mut foreground = [Vec::new(), Vec::new()];
        for (si, side) in [FootSide::Left, FootSide::Right].into_iter().enumerate() {
            let mask = ellipse_mask(rows, cols);
            let cells: Vec<f64> = mask
                .iter()
                .map(|&fg| if fg { 30.0 } else { BACKGROUND })
                .collect();
            let probe = ThermalMap::new(rows, cols, cells, side)?;
            let set = split_angiosomes(&probe, AngiosomeLayout::default())?;
            let mut assign = vec![None; rows * cols];
            for (ri, (_, map)) in set.regions().iter().enumerate() {
                for (r, c, _) in map.foreground() {
                    assign[r * cols + c] = Some(ri);
                }
            }
            foreground[si] = probe.foreground().map(|(r, c, _)| (r, c)).collect();
            regions[si] = assign;
        }
        Ok(FootGeometry {
            rows,
            cols,
            regions,
            foreground,
        })
    }

    fn side_index(side: FootSide) -> usize {
        match side {
            FootSide::Left => 0,
            FootSide::Right => 1,
        }
    }
}

fn ellipse_mask(rows: usize, cols: usize) -> Vec<bool> {
    let cy = (rows as f64 - 1.0) / 2.0;
    let cx = (cols as f64 - 1.0) / 2.0;
    let ry = rows as f64 / 2.0;
    let rx = cols as f64 / 2.0;
    let mut mask = vec![false; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let dy = (r as f64 - cy) / ry;
            let dx = (c as f64 - cx) / rx;
            mask[r * cols + c] = dy * dy + dx * dx <= 1.0;
        }
    }
    mask
}

fn normal(rng: &mut ChaCha8Rng, mean: f64, sd: f64) -> f64 {
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    let z = (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
    mean + sd * z
}

fn male_count(n: usize, ratio: (usize, usize)) -> usize {
    // Round to the nearest integer of n * ratio.
    (n * ratio.0 + ratio.1 / 2) / ratio.1
}

fn make_subject(
    cfg: &SynthesisConfig,
    geometry: &FootGeometry,
    group: GroupLabel,
    group_index: usize,
    global_index: usize,
) -> Result<SubjectRecord> {
    let mut subj_rng = rng(derive_seed(cfg.seed, &[tag::SYNTH, global_index as u64, 0]));
    let (age, gender, id) = match group {
        GroupLabel::Cg => {
            let age = normal(&mut subj_rng, 28.0, 8.0).round().clamp(21.0, 52.0) as u32;
            let males = male_count(cfg.n_cg, CG_MALE_RATIO);
            let gender = if group_index < males {
                Gender::Male
            } else {
                Gender::Female
            };
            (age, gender, format!("CG{:04}", group_index + 1))
        }
        GroupLabel::Dm => {
            let age = normal(&mut subj_rng, 56.0, 10.6).round().clamp(23.0, 84.0) as u32;
            let males = male_count(cfg.n_dm, DM_MALE_RATIO);
            let gender = if group_index < males {
                Gender::Male
            } else {
                Gender::Female
            };
            (age, gender, format!("DM{:04}", group_index + 1))
        }
    };

    let subject_offset = normal(&mut subj_rng, 0.0, 0.35);
    let mut region_jitter = [0.0f64; 4];
    for j in &mut region_jitter {
        *j = normal(&mut subj_rng, 0.0, 0.15);
    }

    let mut feet = Vec::with_capacity(2);
    for (fi, side) in [FootSide::Left, FootSide::Right].into_iter().enumerate() {
        let mut foot_rng = rng(derive_seed(
            cfg.seed,
            &[tag::SYNTH, global_index as u64, 1 + fi as u64],
        ));
        let map = make_foot(
            cfg,
            geometry,
            side,
            group,
            subject_offset,
            &region_jitter,
            &mut foot_rng,
        )?;
        let angiosomes = split_angiosomes(&map, AngiosomeLayout::default())?;
        feet.push(FootRecord::new(id.clone(), map, angiosomes)?);
    }
    SubjectRecord::new(id, age, gender, group, feet)
}

fn make_foot(
    cfg: &SynthesisConfig,
    geometry: &FootGeometry,
    side: FootSide,
    group: GroupLabel,
    subject_offset: f64,
    region_jitter: &[f64; 4],
    rng: &mut ChaCha8Rng,
) -> Result<ThermalMap> {
    let (rows, cols) = (geometry.rows, geometry.cols);
    let si = FootGeometry::side_index(side);
    let assign = &geometry.regions[si];
    let fg = &geometry.foreground[si];

    // Structured component: cool arch for controls, hot spots for
    // diabetics. Both are mean-centered so regional means stay at the
    // configured levels.
    let mut pattern = vec![0.0f64; rows * cols];
    match group {
        GroupLabel::Cg => {
            let cy = 0.52 * (rows as f64 - 1.0);
            let cx = (cols as f64 - 1.0) / 2.0;
            let (sy, sx) = (rows as f64 / 5.5, cols as f64 / 5.0);
            for &(r, c) in fg {
                let dy = (r as f64 - cy) / sy;
                let dx = (c as f64 - cx) / sx;
                pattern[r * cols + c] = -2.2 * (-0.5 * (dy * dy + dx * dx)).exp();
            }
            let mean = fg.iter().map(|&(r, c)| pattern[r * cols + c]).sum::<f64>()
                / fg.len() as f64;
            for &(r, c) in fg {
                pattern[r * cols + c] -= mean;
            }
        }
        GroupLabel::Dm => {
            let n_spots = 1 + rng.random_range(0..2usize);
            for _ in 0..n_spots {
                let &(cy, cx) = &fg[rng.random_range(0..fg.len())];
                let amp = 2.5 + rng.random::<f64>() * 2.0;
                let sigma = 1.3 + rng.random::<f64>() * 1.1;
                for &(r, c) in fg {
                    let dy = r as f64 - cy as f64;
                    let dx = c as f64 - cx as f64;
                    pattern[r * cols + c] +=
                        amp * (-(dy * dy + dx * dx) / (2.0 * sigma * sigma)).exp();
                }
            }
            // Center per region so hot spots redistribute rather than
            // shift the regional means.
            let mut sums = [0.0f64; 4];
            let mut counts = [0usize; 4];
            for &(r, c) in fg {
                let ri = assign[r * cols + c].expect("foreground cell has a region");
                sums[ri] += pattern[r * cols + c];
                counts[ri] += 1;
            }
            for &(r, c) in fg {
                let ri = assign[r * cols + c].unwrap();
                pattern[r * cols + c] -= sums[ri] / counts[ri] as f64;
            }
        }
    }

    let (noise_sd, elevation) = match group {
        GroupLabel::Cg => (0.25, 0.0),
        GroupLabel::Dm => (0.55, cfg.separation),
    };

    let mut cells = vec![BACKGROUND; rows * cols];
    for &(r, c) in fg {
        let i = r * cols + c;
        let ri = assign[i].unwrap();
        let base = CONTROL_MEANS[ri] + subject_offset + region_jitter[ri] + elevation;
        let v = base + pattern[i] + normal(rng, 0.0, noise_sd);
        cells[i] = v.clamp(16.0, 44.0);
    }
    ThermalMap::new(rows, cols, cells, side)
}
