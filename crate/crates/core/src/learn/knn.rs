//! K-nearest-neighbor classification over the stored training set.

use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub x: Matrix,
    pub y: Vec<u8>,
    pub k: usize,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

/// Fraction of the k nearest training samples labeled 1. Distance ties
/// break toward the lower training index.
pub(crate) fn knn_score(model: &KnnModel, row: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..model.x.rows()).collect();
    order.sort_by(|&a, &b| {
        squared_distance(model.x.row(a), row)
            .partial_cmp(&squared_distance(model.x.row(b), row))
            .unwrap()
            .then(a.cmp(&b))
    });
    let k = model.k.min(order.len()).max(1);
    let hits = order[..k].iter().filter(|&&i| model.y[i] == 1).count();
    hits as f64 / k as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_neighbor_wins_at_k1() {
        let model = KnnModel {
            x: Matrix::from_rows(vec![vec![0.0], vec![10.0]]).unwrap(),
            y: vec![0, 1],
            k: 1,
        };
        assert_eq!(knn_score(&model, &[1.0]), 0.0);
        assert_eq!(knn_score(&model, &[9.0]), 1.0);
    }

    #[test]
    fn distance_ties_break_to_lowest_index() {
        let model = KnnModel {
            x: Matrix::from_rows(vec![vec![1.0], vec![-1.0], vec![5.0]]).unwrap(),
            y: vec![1, 0, 0],
            k: 1,
        };
        // Query at 0 is equidistant from samples 0 and 1.
        assert_eq!(knn_score(&model, &[0.0]), 1.0);
    }

    #[test]
    fn vote_fraction_at_k3() {
        let model = KnnModel {
            x: Matrix::from_rows(vec![vec![0.0], vec![0.1], vec![0.2], vec![9.0]]).unwrap(),
            y: vec![1, 1, 0, 0],
            k: 3,
        };
        let s = knn_score(&model, &[0.0]);
        assert!((s - 2.0 / 3.0).abs() < 1e-12);
    }
}
