//! Linear models: L2-regularized logistic regression fitted by plain
//! gradient descent, and a pooled-covariance linear discriminant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learn::boost::sigmoid;
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearParams {
    /// Coefficients in raw feature space.
    pub weights: Vec<f64>,
    pub intercept: f64,
}

pub(crate) fn linear_score(params: &LinearParams, row: &[f64]) -> f64 {
    let z: f64 = params
        .weights
        .iter()
        .zip(row.iter())
        .map(|(w, v)| w * v)
        .sum::<f64>()
        + params.intercept;
    sigmoid(z)
}

fn standardize(x: &Matrix) -> (Matrix, Vec<f64>, Vec<f64>) {
    let (n, d) = (x.rows(), x.cols());
    let mut mean = vec![0.0; d];
    let mut sd = vec![0.0; d];
    for j in 0..d {
        let col = x.column(j);
        let m = col.iter().sum::<f64>() / n as f64;
        let v = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n as f64;
        mean[j] = m;
        sd[j] = if v > 0.0 { v.sqrt() } else { 1.0 };
    }
    let mut z = Matrix::zeros(n, d);
    for i in 0..n {
        for j in 0..d {
            z.set(i, j, (x.get(i, j) - mean[j]) / sd[j]);
        }
    }
    (z, mean, sd)
}

fn stable_log_loss(margin: f64) -> f64 {
    // ln(1 + exp(-margin)) without overflow.
    if margin > 0.0 {
        (-margin).exp().ln_1p()
    } else {
        -margin + margin.exp().ln_1p()
    }
}

/// Gradient descent on mean cross-entropy plus `l2/(2n) * ||w||^2`
/// (intercept unregularized). Features are standardized internally and
/// the returned coefficients are mapped back to raw space. The step
/// size is the inverse of a Lipschitz bound on the gradient, which
/// makes the recorded loss trace non-increasing.
pub(crate) fn fit_logistic(
    x: &Matrix,
    y: &[u8],
    l2: f64,
    tolerance: f64,
    max_iterations: usize,
) -> (LinearParams, Vec<f64>) {
    let (z, mean, sd) = standardize(x);
    let (n, d) = (z.rows(), z.cols());
    let nf = n as f64;

    let frobenius_sq: f64 = (0..n).map(|i| z.row(i).iter().map(|v| v * v).sum::<f64>()).sum();
    let lipschitz = (frobenius_sq / nf + 1.0) / 4.0 + l2 / nf;
    let step = 1.0 / lipschitz;

    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut trace = Vec::new();
    for _ in 0..max_iterations {
        let mut grad_w = vec![0.0; d];
        let mut grad_b = 0.0;
        let mut loss = 0.0;
        for i in 0..n {
            let row = z.row(i);
            let f: f64 = w.iter().zip(row.iter()).map(|(a, v)| a * v).sum::<f64>() + b;
            let margin = if y[i] == 1 { f } else { -f };
            loss += stable_log_loss(margin);
            let err = sigmoid(f) - y[i] as f64;
            for (g, v) in grad_w.iter_mut().zip(row.iter()) {
                *g += err * v;
            }
            grad_b += err;
        }
        loss /= nf;
        loss += l2 / (2.0 * nf) * w.iter().map(|v| v * v).sum::<f64>();
        trace.push(loss);

        let mut max_grad: f64 = 0.0;
        for (g, wj) in grad_w.iter_mut().zip(w.iter()) {
            *g = *g / nf + l2 / nf * wj;
            max_grad = max_grad.max(g.abs());
        }
        grad_b /= nf;
        max_grad = max_grad.max(grad_b.abs());
        if max_grad < tolerance {
            break;
        }
        for (wj, g) in w.iter_mut().zip(grad_w.iter()) {
            *wj -= step * g;
        }
        b -= step * grad_b;
    }

    let mut raw_w = vec![0.0; d];
    let mut raw_b = b;
    for j in 0..d {
        raw_w[j] = w[j] / sd[j];
        raw_b -= w[j] * mean[j] / sd[j];
    }
    (
        LinearParams {
            weights: raw_w,
            intercept: raw_b,
        },
        trace,
    )
}

fn cholesky_solve(matrix: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = matrix.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = matrix[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l[i][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    // Forward then backward substitution.
    let mut u = vec![0.0; n];
    for i in 0..n {
        let mut sum = rhs[i];
        for k in 0..i {
            sum -= l[i][k] * u[k];
        }
        u[i] = sum / l[i][i];
    }
    let mut w = vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = u[i];
        for k in (i + 1)..n {
            sum -= l[k][i] * w[k];
        }
        w[i] = sum / l[i][i];
    }
    Some(w)
}

/// Pooled-covariance Gaussian discriminant with a ridge jitter on the
/// covariance. Scores are the class-1 posterior under equal-covariance
/// Gaussians, i.e. a sigmoid of a linear function.
pub(crate) fn fit_lda(x: &Matrix, y: &[u8], ridge: f64) -> Result<LinearParams> {
    let (n, d) = (x.rows(), x.cols());
    let n1 = y.iter().filter(|&&v| v == 1).count();
    let n0 = n - n1;

    let mut mu = [vec![0.0; d], vec![0.0; d]];
    for i in 0..n {
        let c = y[i] as usize;
        for j in 0..d {
            mu[c][j] += x.get(i, j);
        }
    }
    for j in 0..d {
        mu[0][j] /= n0 as f64;
        mu[1][j] /= n1 as f64;
    }

    let denom = (n.saturating_sub(2)).max(1) as f64;
    let mut cov = vec![vec![0.0; d]; d];
    for i in 0..n {
        let m = &mu[y[i] as usize];
        let row = x.row(i);
        for a in 0..d {
            let da = row[a] - m[a];
            for b in a..d {
                cov[a][b] += da * (row[b] - m[b]) / denom;
            }
        }
    }
    for a in 0..d {
        for b in 0..a {
            cov[a][b] = cov[b][a];
        }
    }

    let diff: Vec<f64> = (0..d).map(|j| mu[1][j] - mu[0][j]).collect();
    let mut jitter = ridge;
    for _ in 0..8 {
        let mut sys = cov.clone();
        for (a, row) in sys.iter_mut().enumerate() {
            row[a] += jitter;
        }
        if let Some(w) = cholesky_solve(&sys, &diff) {
            let mid: f64 = (0..d).map(|j| w[j] * (mu[0][j] + mu[1][j]) / 2.0).sum();
            let intercept = -mid + (n1 as f64 / n0 as f64).ln();
            return Ok(LinearParams {
                weights: w,
                intercept,
            });
        }
        jitter = (jitter * 100.0).max(1e-9);
    }
    Err(Error::Runtime(
        "LDA covariance is singular even after ridge escalation".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    use crate::seed::rng;

    #[test]
    fn logistic_loss_is_monotone_non_increasing() {
        let x = Matrix::from_rows(vec![
            vec![0.1, 1.0],
            vec![0.4, 2.0],
            vec![0.35, 0.5],
            vec![0.8, 3.0],
            vec![0.9, 2.5],
            vec![1.2, 4.0],
        ])
        .unwrap();
        let y = vec![0, 0, 0, 1, 1, 1];
        let (_, trace) = fit_logistic(&x, &y, 1.0, 1e-10, 500);
        for w in trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "loss rose: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn logistic_saturates_deep_inside_a_separable_class() {
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..20 {
            rows.push(vec![-10.0 + 0.25 * i as f64]);
            y.push(0);
            rows.push(vec![5.0 + 0.25 * i as f64]);
            y.push(1);
        }
        let x = Matrix::from_rows(rows).unwrap();
        let (params, _) = fit_logistic(&x, &y, 1.0, 1e-8, 5000);
        let score = linear_score(&params, &[10.0]);
        assert!(score > 0.9, "score = {score}");
    }

    #[test]
    fn lda_boundary_sits_at_the_midpoint_of_symmetric_gaussians() {
        let mut r = rng(404);
        let mut rows = Vec::new();
        let mut y = Vec::new();
        let normal = |r: &mut rand_chacha::ChaCha8Rng| {
            let u1: f64 = r.random();
            let u2: f64 = r.random();
            (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        };
        let mu = [1.5, -0.75];
        for _ in 0..5000 {
            rows.push(vec![mu[0] + normal(&mut r), mu[1] + normal(&mut r)]);
            y.push(1);
            rows.push(vec![-mu[0] + normal(&mut r), -mu[1] + normal(&mut r)]);
            y.push(0);
        }
        let x = Matrix::from_rows(rows).unwrap();
        let params = fit_lda(&x, &y, 1e-6).unwrap();
        let norm = params.weights.iter().map(|w| w * w).sum::<f64>().sqrt();
        // Distance of the decision hyperplane from the origin.
        let offset = (params.intercept / norm).abs();
        assert!(offset < 0.05, "offset = {offset}");
        assert!(linear_score(&params, &[1.5, -0.75]) > 0.9);
        assert!(linear_score(&params, &[-1.5, 0.75]) < 0.1);
    }

    #[test]
    fn lda_survives_duplicate_features() {
        let x = Matrix::from_rows(vec![
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![0.5, 0.5],
            vec![5.0, 5.0],
            vec![6.0, 6.0],
            vec![5.5, 5.5],
        ])
        .unwrap();
        let y = vec![0, 0, 0, 1, 1, 1];
        let params = fit_lda(&x, &y, 1e-6).unwrap();
        assert!(linear_score(&params, &[0.2, 0.2]) < 0.5);
        assert!(linear_score(&params, &[5.8, 5.8]) > 0.5);
    }
}
