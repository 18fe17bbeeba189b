//! Grayscale conversion and contrast operators for temperature grids.
//!
//! Temperature maps quantize linearly to 8-bit intensities; the
//! operators (histogram equalization, contrast-limited adaptive
//! equalization, gamma correction) work on foreground pixels only and
//! leave the background mask untouched. All operators preserve
//! dimensions and are monotone non-decreasing in input intensity.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::ThermalMap;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrayImage {
    pub rows: usize,
    pub cols: usize,
    /// Row-major intensities; background pixels hold 0.
    pub pixels: Vec<u8>,
    /// True where the source grid had a foreground temperature.
    pub mask: Vec<bool>,
}

impl GrayImage {
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.pixels[r * self.cols + c]
    }

    pub fn foreground_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

fn round_half_up(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Linear map `[t_min, t_max] -> [0, 255]`, clamped, round half up.
/// Background cells map to 0.
pub fn quantize_grayscale(map: &ThermalMap, t_min: f64, t_max: f64) -> Result<GrayImage> {
    if !(t_min < t_max) {
        return Err(Error::Config(format!(
            "quantization range [{t_min}, {t_max}] is empty"
        )));
    }
    let n = map.rows() * map.cols();
    let mut pixels = vec![0u8; n];
    let mut mask = vec![false; n];
    for (r, c, v) in map.foreground() {
        let i = r * map.cols() + c;
        let scaled = (v - t_min) / (t_max - t_min) * 255.0;
        pixels[i] = round_half_up(scaled.clamp(0.0, 255.0));
        mask[i] = true;
    }
    Ok(GrayImage {
        rows: map.rows(),
        cols: map.cols(),
        pixels,
        mask,
    })
}

fn foreground_histogram(img: &GrayImage, r0: usize, r1: usize, c0: usize, c1: usize) -> [u64; 256] {
    let mut hist = [0u64; 256];
    for r in r0..r1 {
        for c in c0..c1 {
            let i = r * img.cols + c;
            if img.mask[i] {
                hist[img.pixels[i] as usize] += 1;
            }
        }
    }
    hist
}

/// Scaled-CDF lookup table: `i -> round(255 * cdf(i))`.
fn equalization_lut(hist: &[u64; 256]) -> [u8; 256] {
    let total: u64 = hist.iter().sum();
    let mut lut = [0u8; 256];
    if total == 0 {
        for (i, v) in lut.iter_mut().enumerate() {
            *v = i as u8;
        }
        return lut;
    }
    let mut cum = 0u64;
    for i in 0..256 {
        cum += hist[i];
        lut[i] = round_half_up(255.0 * cum as f64 / total as f64);
    }
    lut
}

/// Histogram equalization over the foreground.
pub fn histogram_equalize(img: &GrayImage) -> Result<GrayImage> {
    if img.foreground_count() == 0 {
        return Err(Error::InsufficientData(
            "equalization of an all-background image".into(),
        ));
    }
    let hist = foreground_histogram(img, 0, img.rows, 0, img.cols);
    let lut = equalization_lut(&hist);
    let mut out = img.clone();
    for i in 0..out.pixels.len() {
        if out.mask[i] {
            out.pixels[i] = lut[img.pixels[i] as usize];
        }
    }
    Ok(out)
}

fn clip_histogram(hist: &mut [u64; 256], clip_limit: f64) {
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return;
    }
    let cap = ((clip_limit * total as f64).ceil() as u64).max(1);
    let mut excess = 0u64;
    for bin in hist.iter_mut() {
        if *bin > cap {
            excess += *bin - cap;
            *bin = cap;
        }
    }
    if excess == 0 {
        return;
    }
    // One uniform redistribution pass; the remainder spreads from the
    // lowest bins.
    let share = excess / 256;
    let mut remainder = excess % 256;
    for bin in hist.iter_mut() {
        *bin += share;
        if remainder > 0 {
            *bin += 1;
            remainder -= 1;
        }
    }
}

/// Contrast-limited adaptive histogram equalization.
///
/// The image splits into `tiles = (tiles_x, tiles_y)` regions; each
/// tile's foreground histogram is clipped at `clip_limit` (a fraction
/// of the tile's foreground count) with the excess redistributed, and
/// per-tile mappings blend bilinearly between tile centers. A 1×1 grid
/// with `clip_limit = 1` reduces to plain histogram equalization.
pub fn adaptive_equalize(
    img: &GrayImage,
    tiles: (usize, usize),
    clip_limit: f64,
) -> Result<GrayImage> {
    if img.foreground_count() == 0 {
        return Err(Error::InsufficientData(
            "equalization of an all-background image".into(),
        ));
    }
    if !(clip_limit > 0.0 && clip_limit <= 1.0) {
        return Err(Error::Config(format!(
            "clip limit {clip_limit} outside (0, 1]"
        )));
    }
    if tiles.0 == 0 || tiles.1 == 0 {
        return Err(Error::Config("tile grid must be at least 1x1".into()));
    }
    // Oversized tile requests fall back toward a single tile.
    let tx = tiles.0.min(img.cols);
    let ty = tiles.1.min(img.rows);

    if tx == 1 && ty == 1 {
        let mut hist = foreground_histogram(img, 0, img.rows, 0, img.cols);
        clip_histogram(&mut hist, clip_limit);
        let lut = equalization_lut(&hist);
        let mut out = img.clone();
        for i in 0..out.pixels.len() {
            if out.mask[i] {
                out.pixels[i] = lut[img.pixels[i] as usize];
            }
        }
        return Ok(out);
    }

    let col_edge = |i: usize| i * img.cols / tx;
    let row_edge = |j: usize| j * img.rows / ty;
    let mut luts = vec![[0u8; 256]; tx * ty];
    let mut centers_x = vec![0.0f64; tx];
    let mut centers_y = vec![0.0f64; ty];
    for j in 0..ty {
        centers_y[j] = (row_edge(j) as f64 + row_edge(j + 1) as f64 - 1.0) / 2.0;
        for i in 0..tx {
            centers_x[i] = (col_edge(i) as f64 + col_edge(i + 1) as f64 - 1.0) / 2.0;
            let mut hist =
                foreground_histogram(img, row_edge(j), row_edge(j + 1), col_edge(i), col_edge(i + 1));
            let empty = hist.iter().all(|&h| h == 0);
            if empty {
                // Background-only tile: borrow the global mapping so
                // interpolation near it stays sensible.
                hist = foreground_histogram(img, 0, img.rows, 0, img.cols);
            }
            clip_histogram(&mut hist, clip_limit);
            luts[j * tx + i] = equalization_lut(&hist);
        }
    }

    let mut out = img.clone();
    for r in 0..img.rows {
        // Neighbor tile rows and vertical blend weight.
        let (j0, j1, wy) = interpolation_span(r as f64, &centers_y);
        for c in 0..img.cols {
            let i = r * img.cols + c;
            if !img.mask[i] {
                continue;
            }
            let (i0, i1, wx) = interpolation_span(c as f64, &centers_x);
            let p = img.pixels[i] as usize;
            let tl = luts[j0 * tx + i0][p] as f64;
            let tr = luts[j0 * tx + i1][p] as f64;
            let bl = luts[j1 * tx + i0][p] as f64;
            let br = luts[j1 * tx + i1][p] as f64;
            let top = tl * (1.0 - wx) + tr * wx;
            let bottom = bl * (1.0 - wx) + br * wx;
            out.pixels[i] = round_half_up(top * (1.0 - wy) + bottom * wy);
        }
    }
    Ok(out)
}

/// Neighboring tile indices around `pos` and the blend weight toward
/// the second one.
fn interpolation_span(pos: f64, centers: &[f64]) -> (usize, usize, f64) {
    if pos <= centers[0] {
        return (0, 0, 0.0);
    }
    if pos >= centers[centers.len() - 1] {
        let last = centers.len() - 1;
        return (last, last, 0.0);
    }
    let hi = centers.partition_point(|&c| c < pos);
    let lo = hi - 1;
    let span = centers[hi] - centers[lo];
    let w = if span > 0.0 {
        (pos - centers[lo]) / span
    } else {
        0.0
    };
    (lo, hi, w)
}

/// `i -> round(255 * (i/255)^gamma)` over the foreground; background
/// untouched.
pub fn gamma_correct(img: &GrayImage, gamma: f64) -> Result<GrayImage> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Config(format!("gamma {gamma} must be positive")));
    }
    let mut lut = [0u8; 256];
    for (i, v) in lut.iter_mut().enumerate() {
        *v = round_half_up(255.0 * (i as f64 / 255.0).powf(gamma));
    }
    let mut out = img.clone();
    for i in 0..out.pixels.len() {
        if out.mask[i] {
            out.pixels[i] = lut[img.pixels[i] as usize];
        }
    }
    Ok(out)
}

/// Writes an 8-bit grayscale PNG.
pub fn write_png(img: &GrayImage, path: &Path) -> Result<()> {
    let buffer = image::GrayImage::from_raw(img.cols as u32, img.rows as u32, img.pixels.clone())
        .ok_or_else(|| Error::Runtime("image buffer construction failed".into()))?;
    buffer
        .save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::Runtime(format!("PNG write to {} failed: {e}", path.display())))
}
