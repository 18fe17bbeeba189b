//! Geometric fallback for carving a foot map into angiosome regions.
//!
//! When a dataset ships per-angiosome grids those take precedence; this
//! proportional split covers datasets that only provide the full foot.
//! The heel band (bottom fraction of the foreground bounding box) is
//! split at the medial/lateral midline into the calcaneal regions, the
//! remaining forefoot and arch into the plantar regions. Which image
//! half is medial depends on the foot side.

use serde::{Deserialize, Serialize};

use crate::data::{AngiosomeSet, FootSide, ThermalMap, BACKGROUND};
use crate::error::{Error, Result};

/// Proportions of the geometric angiosome split.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngiosomeLayout {
    /// Fraction of the foreground bounding-box height assigned to the
    /// heel band.
    pub heel_fraction: f64,
}

impl Default for AngiosomeLayout {
    fn default() -> Self {
        AngiosomeLayout {
            heel_fraction: 0.33,
        }
    }
}

impl AngiosomeLayout {
    pub fn validate(&self) -> Result<()> {
        if !(self.heel_fraction > 0.0 && self.heel_fraction < 1.0) {
            return Err(Error::Config(format!(
                "heel_fraction {} outside (0, 1)",
                self.heel_fraction
            )));
        }
        Ok(())
    }
}

/// Splits a foot map into the four angiosome regions.
pub fn split_angiosomes(foot: &ThermalMap, layout: AngiosomeLayout) -> Result<AngiosomeSet> {
    layout.validate()?;

    let (mut r0, mut r1, mut c0, mut c1) = (usize::MAX, 0usize, usize::MAX, 0usize);
    for (r, c, _) in foot.foreground() {
        r0 = r0.min(r);
        r1 = r1.max(r);
        c0 = c0.min(c);
        c1 = c1.max(c);
    }

    let height = r1 - r0 + 1;
    let width = c1 - c0 + 1;
    if height < 2 || width < 2 {
        return Err(Error::Validation(
            "foreground too small to split into angiosomes".into(),
        ));
    }
    let heel_rows = ((height as f64 * layout.heel_fraction).round() as usize).clamp(1, height - 1);
    let heel_start = r1 + 1 - heel_rows;
    // Columns [c0, mid) are one half, [mid, c1] the other.
    let mid = c0 + width / 2;
    // The grids are stored as seen from the sole; the medial (big-toe)
    // side of a right foot falls on the low-column half.
    let medial_low = foot.foot_side == FootSide::Right;

    let blank = vec![BACKGROUND; foot.rows() * foot.cols()];
    let mut cells = [blank.clone(), blank.clone(), blank.clone(), blank];
    // Region order: mpa, lpa, mca, lca.
    for (r, c, v) in foot.foreground() {
        let heel = r >= heel_start;
        let low = c < mid;
        let medial = low == medial_low;
        let region = match (heel, medial) {
            (false, true) => 0,
            (false, false) => 1,
            (true, true) => 2,
            (true, false) => 3,
        };
        cells[region][r * foot.cols() + c] = v;
    }

    let names = ["MPA", "LPA", "MCA", "LCA"];
    let mut maps = Vec::with_capacity(4);
    for (i, region_cells) in cells.into_iter().enumerate() {
        let map = ThermalMap::new(foot.rows(), foot.cols(), region_cells, foot.foot_side)
            .map_err(|_| {
                Error::Validation(format!(
                    "foreground too small to split: {} region is empty",
                    names[i]
                ))
            })?;
        maps.push(map);
    }
    let mut it = maps.into_iter();
    let set = AngiosomeSet {
        mpa: it.next().unwrap(),
        lpa: it.next().unwrap(),
        mca: it.next().unwrap(),
        lca: it.next().unwrap(),
    };
    set.validate_against(foot)?;
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::summary_stats;

    fn rect_foot(rows: usize, cols: usize, v: f64, side: FootSide) -> ThermalMap {
        ThermalMap::new(rows, cols, vec![v; rows * cols], side).unwrap()
    }

    #[test]
    fn partition_is_disjoint_and_complete() {
        let foot = rect_foot(12, 8, 30.0, FootSide::Left);
        let set = split_angiosomes(&foot, AngiosomeLayout::default()).unwrap();
        let total: usize = set
            .regions()
            .iter()
            .map(|(_, m)| m.foreground_count())
            .sum();
        assert_eq!(total, foot.foreground_count());
        set.validate_against(&foot).unwrap();
    }

    #[test]
    fn region_areas_match_configured_fractions() {
        let foot = rect_foot(10, 10, 30.0, FootSide::Left);
        let layout = AngiosomeLayout {
            heel_fraction: 0.33,
        };
        let set = split_angiosomes(&foot, layout).unwrap();
        let total = foot.foreground_count() as f64;
        // One boundary row/column of slack per region.
        let tol = 10.0;
        for (name, map) in set.regions() {
            let expected = match name {
                "mca" | "lca" => layout.heel_fraction / 2.0,
                _ => (1.0 - layout.heel_fraction) / 2.0,
            };
            let actual = map.foreground_count() as f64;
            assert!(
                (actual - expected * total).abs() <= tol,
                "{name}: {actual} vs expected {}",
                expected * total
            );
        }
    }

    #[test]
    fn mirrored_feet_swap_medial_regions() {
        let left = rect_foot(9, 6, 30.0, FootSide::Left);
        let right = rect_foot(9, 6, 30.0, FootSide::Right);
        let ls = split_angiosomes(&left, AngiosomeLayout::default()).unwrap();
        let rs = split_angiosomes(&right, AngiosomeLayout::default()).unwrap();
        // Mirror the right foot's MPA horizontally; it must equal the left MPA.
        let cols = right.cols();
        for (r, c, _) in rs.mpa.foreground() {
            assert!(ls.mpa.is_foreground(r, cols - 1 - c));
        }
        assert_eq!(ls.mpa.foreground_count(), rs.mpa.foreground_count());
        assert_eq!(ls.lpa.foreground_count(), rs.lpa.foreground_count());
    }

    #[test]
    fn uniform_field_means_are_preserved() {
        let foot = rect_foot(10, 10, 30.0, FootSide::Right);
        let set = split_angiosomes(&foot, AngiosomeLayout::default()).unwrap();
        for (_, map) in set.regions() {
            let stats = summary_stats(map).unwrap();
            assert!((stats.mean - 30.0).abs() < 1e-12);
        }
    }

    #[test]
    fn too_small_foreground_errors() {
        let mut cells = vec![BACKGROUND; 16];
        cells[5] = 30.0;
        let foot = ThermalMap::new(4, 4, cells, FootSide::Left).unwrap();
        assert!(split_angiosomes(&foot, AngiosomeLayout::default()).is_err());
    }
}
