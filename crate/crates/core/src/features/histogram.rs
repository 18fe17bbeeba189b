//! Temperature-class histogram and the estimators built on it.
//!
//! Pixels are binned into eight fixed temperature classes. Class
//! boundaries are the midpoints between consecutive class centers, each
//! bin half-open `[lower, upper)`, with open ends below the first and
//! above the last center.

use serde::{Deserialize, Serialize};

use crate::data::ThermalMap;
use crate::error::{Error, Result};

/// The eight class center temperatures, °C.
pub const CLASS_CENTERS: [f64; 8] = [26.5, 28.5, 29.5, 30.5, 31.0, 32.5, 33.5, 34.5];

fn class_boundaries() -> [f64; 7] {
    let mut b = [0.0; 7];
    for i in 0..7 {
        b[i] = (CLASS_CENTERS[i] + CLASS_CENTERS[i + 1]) / 2.0;
    }
    b
}

fn class_of(t: f64, bounds: &[f64; 7]) -> usize {
    bounds.iter().position(|&b| t < b).unwrap_or(7)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemperatureHistogram {
    pub class_centers: [f64; 8],
    /// Fraction of foreground pixels per class; sums to 1.
    pub percentages: [f64; 8],
    /// Index of the most populated class; ties resolve to the lowest index.
    pub modal_index: usize,
    /// Highest temperature present in the map, °C.
    pub max_present_temperature: f64,
}

/// Bins the foreground pixels of a map into the temperature classes.
pub fn temperature_histogram(map: &ThermalMap) -> Result<TemperatureHistogram> {
    let bounds = class_boundaries();
    let mut counts = [0usize; 8];
    let mut max_temp = f64::NEG_INFINITY;
    let mut total = 0usize;
    for (_, _, v) in map.foreground() {
        counts[class_of(v, &bounds)] += 1;
        max_temp = max_temp.max(v);
        total += 1;
    }
    if total == 0 {
        return Err(Error::InsufficientData(
            "temperature histogram of an all-background map".into(),
        ));
    }
    let mut percentages = [0.0f64; 8];
    for (p, &c) in percentages.iter_mut().zip(counts.iter()) {
        *p = c as f64 / total as f64;
    }
    let modal_index = percentages
        .iter()
        .enumerate()
        .fold(0usize, |best, (i, &p)| {
            if p > percentages[best] {
                i
            } else {
                best
            }
        });
    Ok(TemperatureHistogram {
        class_centers: CLASS_CENTERS,
        percentages,
        modal_index,
        max_present_temperature: max_temp,
    })
}

/// Weighted mean temperature of the modal class and its neighbors.
///
/// A missing neighbor (modal class at either end) contributes zero
/// weight.
pub fn estimate_temperature(hist: &TemperatureHistogram) -> f64 {
    let j = hist.modal_index;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in j.saturating_sub(1)..=(j + 1).min(7) {
        num += hist.percentages[i] * hist.class_centers[i];
        den += hist.percentages[i];
    }
    num / den
}

/// Absolute difference of the estimate temperatures of the same
/// angiosome on the two feet.
pub fn estimated_temperature_difference(left_et: f64, right_et: f64) -> f64 {
    (left_et - right_et).abs()
}

/// Gap between the hottest present temperature and the estimate
/// temperature.
pub fn hot_spot_estimator(hist: &TemperatureHistogram) -> f64 {
    (hist.max_present_temperature - estimate_temperature(hist)).abs()
}
