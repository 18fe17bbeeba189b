//! Synthetic minority oversampling.
//!
//! New minority samples are drawn on the segments between a minority
//! sample and one of its k nearest minority neighbors, cycling through
//! the minority class until both classes are equally large. Originals
//! are preserved and synthetics appended.

use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::seed::rng;

/// `p + lambda * (q - p)`.
pub(crate) fn synthetic_point(p: &[f64], q: &[f64], lambda: f64) -> Vec<f64> {
    p.iter()
        .zip(q.iter())
        .map(|(a, b)| a + lambda * (b - a))
        .collect()
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

/// Oversamples the minority class to parity. `k_neighbors` is clamped
/// to the minority size minus one; a single minority sample cannot be
/// interpolated and is an error. Balanced input is returned unchanged.
pub fn smote_oversample(
    x: &Matrix,
    y: &[u8],
    k_neighbors: usize,
    seed: u64,
) -> Result<(Matrix, Vec<u8>)> {
    if x.rows() != y.len() {
        return Err(Error::Shape(format!(
            "{} rows but {} labels",
            x.rows(),
            y.len()
        )));
    }
    if k_neighbors == 0 {
        return Err(Error::Config("k_neighbors must be at least 1".into()));
    }
    let n1 = y.iter().filter(|&&v| v == 1).count();
    let n0 = y.len() - n1;
    if n0 == n1 {
        return Ok((x.clone(), y.to_vec()));
    }
    let minority_label = u8::from(n1 < n0);
    let minority: Vec<usize> = (0..y.len()).filter(|&i| y[i] == minority_label).collect();
    if minority.len() < 2 {
        return Err(Error::InsufficientData(
            "SMOTE needs at least two minority samples to interpolate".into(),
        ));
    }
    let k = k_neighbors.min(minority.len() - 1);

    // k nearest minority neighbors per minority sample; ties break
    // toward the lower index.
    let neighbors: Vec<Vec<usize>> = minority
        .iter()
        .map(|&i| {
            let mut others: Vec<usize> = minority.iter().copied().filter(|&j| j != i).collect();
            others.sort_by(|&a, &b| {
                squared_distance(x.row(a), x.row(i))
                    .partial_cmp(&squared_distance(x.row(b), x.row(i)))
                    .unwrap()
                    .then(a.cmp(&b))
            });
            others.truncate(k);
            others
        })
        .collect();

    let deficit = n0.abs_diff(n1);
    let mut out_x = x.clone();
    let mut out_y = y.to_vec();
    let mut r = rng(seed);
    for s in 0..deficit {
        let base_pos = s % minority.len();
        let p = minority[base_pos];
        let q = neighbors[base_pos][r.random_range(0..k)];
        let lambda: f64 = r.random();
        out_x.push_row(&synthetic_point(x.row(p), x.row(q), lambda));
        out_y.push(minority_label);
    }
    Ok((out_x, out_y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_input_is_unchanged() {
        let x = Matrix::from_rows(vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let y = vec![0, 0, 1, 1];
        let (ox, oy) = smote_oversample(&x, &y, 5, 1).unwrap();
        assert_eq!(ox, x);
        assert_eq!(oy, y);
    }

    #[test]
    fn midpoint_interpolation() {
        let p = [0.0, 0.0];
        let q = [1.0, 1.0];
        assert_eq!(synthetic_point(&p, &q, 0.5), vec![0.5, 0.5]);
    }

    #[test]
    fn single_minority_sample_is_an_error() {
        let x = Matrix::from_rows(vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let y = vec![0, 0, 1];
        assert!(matches!(
            smote_oversample(&x, &y, 5, 1),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn counts_equalize_and_originals_survive() {
        let x = Matrix::from_rows(vec![
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![5.0, 5.0],
            vec![6.0, 5.0],
            vec![5.5, 6.0],
            vec![6.5, 6.5],
            vec![7.0, 5.5],
        ])
        .unwrap();
        let y = vec![1, 1, 0, 0, 0, 0, 0];
        let (ox, oy) = smote_oversample(&x, &y, 5, 9).unwrap();
        let n1 = oy.iter().filter(|&&v| v == 1).count();
        let n0 = oy.len() - n1;
        assert_eq!(n0, n1);
        for i in 0..x.rows() {
            assert_eq!(ox.row(i), x.row(i));
            assert_eq!(oy[i], y[i]);
        }
    }

    #[test]
    fn synthetics_lie_on_minority_segments() {
        // Geometric oracle: each synthetic point must be collinear with
        // and between two minority originals.
        let x = Matrix::from_rows(vec![
            vec![0.0, 0.0],
            vec![2.0, 1.0],
            vec![1.0, 3.0],
            vec![4.0, 4.0],
            vec![9.0, 9.0],
            vec![9.5, 8.5],
            vec![8.5, 9.5],
            vec![9.0, 8.0],
            vec![8.0, 9.0],
            vec![9.9, 9.9],
        ])
        .unwrap();
        let y = vec![1, 1, 1, 1, 0, 0, 0, 0, 0, 0];
        let minority: Vec<&[f64]> = (0..4).map(|i| x.row(i)).collect();
        for seed in 0..50 {
            let (ox, oy) = smote_oversample(&x, &y, 3, seed).unwrap();
            for i in x.rows()..ox.rows() {
                assert_eq!(oy[i], 1);
                assert!(
                    on_some_segment(ox.row(i), &minority),
                    "seed {seed}: synthetic {:?} off every segment",
                    ox.row(i)
                );
            }
        }
    }

    pub(super) fn on_some_segment(point: &[f64], originals: &[&[f64]]) -> bool {
        for (ai, a) in originals.iter().enumerate() {
            for b in originals.iter().skip(ai + 1) {
                if on_segment(point, a, b) {
                    return true;
                }
            }
        }
        false
    }

    fn on_segment(p: &[f64], a: &[f64], b: &[f64]) -> bool {
        // Find the interpolation parameter from the first axis with
        // extent, then verify every coordinate and betweenness.
        let mut t = None;
        for j in 0..p.len() {
            if (b[j] - a[j]).abs() > 1e-12 {
                t = Some((p[j] - a[j]) / (b[j] - a[j]));
                break;
            }
        }
        let Some(t) = t else {
            return p
                .iter()
                .zip(a.iter())
                .all(|(x, y)| (x - y).abs() <= 1e-9);
        };
        if !(-1e-9..=1.0 + 1e-9).contains(&t) {
            return false;
        }
        p.iter()
            .zip(a.iter().zip(b.iter()))
            .all(|(x, (ya, yb))| (x - (ya + t * (yb - ya))).abs() <= 1e-9)
    }

    #[test]
    fn deterministic_per_seed() {
        let x = Matrix::from_rows(vec![
            vec![0.0],
            vec![1.0],
            vec![2.0],
            vec![10.0],
            vec![11.0],
            vec![12.0],
            vec![13.0],
        ])
        .unwrap();
        let y = vec![1, 1, 1, 0, 0, 0, 0];
        let a = smote_oversample(&x, &y, 2, 5).unwrap();
        let b = smote_oversample(&x, &y, 2, 5).unwrap();
        assert_eq!(a, b);
    }
}
