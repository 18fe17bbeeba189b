//! Boosting: discrete two-class SAMME over shallow CART weak learners
//! and gradient boosting of regression trees on logistic-loss
//! gradients.

use serde::{Deserialize, Serialize};

use crate::learn::tree::{
    grow_class_tree, grow_reg_tree, reg_tree_value, tree_prob, ClassTreeParams, FeatureSubsample,
    RegNode, TreeNode,
};
use crate::matrix::Matrix;

/// Stage weight assigned when a weak learner reaches zero weighted
/// error; equals `ln((1 - eps)/eps)` at `eps = 1e-12`.
const ALPHA_CAP: f64 = 27.631021115928547;

const EARLY_STOP_PATIENCE: usize = 10;

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaStage {
    pub tree: TreeNode,
    pub alpha: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostModel {
    pub stages: Vec<AdaStage>,
    /// Training class-1 prior, the fallback score when no stage
    /// survived.
    pub prior: f64,
}

fn tree_label(tree: &TreeNode, row: &[f64]) -> u8 {
    u8::from(tree_prob(tree, row)[1] >= 0.5)
}

/// Fits discrete SAMME stages. A stage with zero weighted error is kept
/// at a capped weight and stops the loop; a stage at or beyond chance
/// error is dropped and stops the loop.
pub(crate) fn fit_adaboost(
    x: &Matrix,
    y: &[u8],
    n_stages: usize,
    weak_depth: usize,
    validation: Option<(&Matrix, &[u8])>,
) -> AdaBoostModel {
    let n = x.rows();
    let mut weights = vec![1.0 / n as f64; n];
    let idx: Vec<usize> = (0..n).collect();
    let params = ClassTreeParams {
        max_depth: Some(weak_depth),
        min_leaf: 1,
        feature_subsample: FeatureSubsample::All,
        random_thresholds: false,
    };
    let prior = y.iter().filter(|&&v| v == 1).count() as f64 / n as f64;

    let mut stages: Vec<AdaStage> = Vec::new();
    let mut best_len = 0usize;
    let mut best_val_error = f64::INFINITY;
    for _ in 0..n_stages {
        let tree = grow_class_tree(x, y, &weights, &idx, &params, &mut None);
        let preds: Vec<u8> = (0..n).map(|i| tree_label(&tree, x.row(i))).collect();
        let eps: f64 = preds
            .iter()
            .zip(y.iter())
            .zip(weights.iter())
            .filter(|((p, t), _)| p != t)
            .map(|(_, &w)| w)
            .sum();
        if eps <= 1e-12 {
            stages.push(AdaStage {
                tree,
                alpha: ALPHA_CAP,
            });
            best_len = stages.len();
            break;
        }
        if eps >= 0.5 {
            break;
        }
        let alpha = ((1.0 - eps) / eps).ln();
        for i in 0..n {
            if preds[i] != y[i] {
                weights[i] *= alpha.exp();
            }
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        stages.push(AdaStage { tree, alpha });

        match validation {
            Some((vx, vy)) => {
                let err = ensemble_error(&stages, vx, vy);
                if err < best_val_error - 1e-12 {
                    best_val_error = err;
                    best_len = stages.len();
                } else if stages.len() - best_len >= EARLY_STOP_PATIENCE {
                    break;
                }
            }
            None => best_len = stages.len(),
        }
    }
    stages.truncate(best_len.max(usize::from(!stages.is_empty())));
    AdaBoostModel { stages, prior }
}

fn ensemble_error(stages: &[AdaStage], x: &Matrix, y: &[u8]) -> f64 {
    let mut wrong = 0usize;
    for i in 0..x.rows() {
        let score = adaboost_score_stages(stages, 0.5, x.row(i));
        let label = u8::from(score >= 0.5);
        if label != y[i] {
            wrong += 1;
        }
    }
    wrong as f64 / x.rows().max(1) as f64
}

fn adaboost_score_stages(stages: &[AdaStage], prior: f64, row: &[f64]) -> f64 {
    let total: f64 = stages.iter().map(|s| s.alpha).sum();
    if total <= 0.0 {
        return prior;
    }
    let votes: f64 = stages
        .iter()
        .filter(|s| tree_label(&s.tree, row) == 1)
        .map(|s| s.alpha)
        .sum();
    votes / total
}

/// Weighted vote fraction for class 1.
pub(crate) fn adaboost_score(model: &AdaBoostModel, row: &[f64]) -> f64 {
    adaboost_score_stages(&model.stages, model.prior, row)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbdtModel {
    pub init: f64,
    pub learning_rate: f64,
    pub trees: Vec<RegNode>,
}

fn log_loss(p: f64, y: u8) -> f64 {
    let p = p.clamp(1e-12, 1.0 - 1e-12);
    if y == 1 {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// Stagewise regression trees on logistic-loss gradients with Newton
/// leaf values and shrinkage. Fully deterministic.
pub(crate) fn fit_gbdt(
    x: &Matrix,
    y: &[u8],
    n_stages: usize,
    max_depth: usize,
    learning_rate: f64,
    validation: Option<(&Matrix, &[u8])>,
) -> GbdtModel {
    let n = x.rows();
    let p_mean = (y.iter().filter(|&&v| v == 1).count() as f64 / n as f64)
        .clamp(1e-10, 1.0 - 1e-10);
    let init = (p_mean / (1.0 - p_mean)).ln();
    let idx: Vec<usize> = (0..n).collect();

    let mut f_train = vec![init; n];
    let mut f_val: Vec<f64> = validation
        .map(|(vx, _)| vec![init; vx.rows()])
        .unwrap_or_default();
    let mut trees: Vec<RegNode> = Vec::new();
    let mut best_len = 0usize;
    let mut best_val_loss = f64::INFINITY;

    for _ in 0..n_stages {
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n];
        for i in 0..n {
            let p = sigmoid(f_train[i]);
            grad[i] = y[i] as f64 - p;
            hess[i] = (p * (1.0 - p)).max(1e-12);
        }
        let tree = grow_reg_tree(x, &grad, &hess, &idx, max_depth, 1);
        for i in 0..n {
            f_train[i] += learning_rate * reg_tree_value(&tree, x.row(i));
        }
        trees.push(tree);

        match validation {
            Some((vx, vy)) => {
                let tree = trees.last().unwrap();
                let mut loss = 0.0;
                for i in 0..vx.rows() {
                    f_val[i] += learning_rate * reg_tree_value(tree, vx.row(i));
                    loss += log_loss(sigmoid(f_val[i]), vy[i]);
                }
                loss /= vx.rows().max(1) as f64;
                if loss < best_val_loss - 1e-12 {
                    best_val_loss = loss;
                    best_len = trees.len();
                } else if trees.len() - best_len >= EARLY_STOP_PATIENCE {
                    break;
                }
            }
            None => best_len = trees.len(),
        }
    }
    trees.truncate(best_len.max(1));
    GbdtModel {
        init,
        learning_rate,
        trees,
    }
}

pub(crate) fn gbdt_score(model: &GbdtModel, row: &[f64]) -> f64 {
    let mut f = model.init;
    for tree in &model.trees {
        f += model.learning_rate * reg_tree_value(tree, row);
    }
    sigmoid(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable() -> (Matrix, Vec<u8>) {
        let x = Matrix::from_rows(vec![
            vec![0.0, 1.0],
            vec![0.5, 0.0],
            vec![1.0, 1.0],
            vec![5.0, 0.0],
            vec![5.5, 1.0],
            vec![6.0, 0.0],
        ])
        .unwrap();
        (x, vec![0, 0, 0, 1, 1, 1])
    }

    #[test]
    fn alpha_formula_on_quarter_error() {
        // Directly check the stage-weight formula the loop applies.
        let eps: f64 = 0.25;
        let alpha = ((1.0 - eps) / eps).ln();
        assert!((alpha - 3.0f64.ln()).abs() < 1e-12);
        assert!((alpha - 1.0986).abs() < 1e-4);
    }

    #[test]
    fn perfect_stump_stops_early_with_capped_weight() {
        let (x, y) = separable();
        let model = fit_adaboost(&x, &y, 50, 1, None);
        assert_eq!(model.stages.len(), 1);
        assert_eq!(model.stages[0].alpha, ALPHA_CAP);
        for i in 0..x.rows() {
            let s = adaboost_score(&model, x.row(i));
            assert_eq!(u8::from(s >= 0.5), y[i]);
        }
    }

    #[test]
    fn training_error_is_non_increasing_on_separable_data() {
        // Interleave the classes on one axis so stumps need several
        // stages.
        let x = Matrix::from_rows(vec![
            vec![1.0, 1.0],
            vec![2.0, 4.0],
            vec![3.0, 2.0],
            vec![4.0, 5.0],
            vec![5.0, 3.0],
            vec![6.0, 6.0],
            vec![7.0, 3.5],
            vec![8.0, 6.5],
        ])
        .unwrap();
        let y = vec![0, 1, 0, 1, 0, 1, 0, 1];
        let model = fit_adaboost(&x, &y, 25, 1, None);
        let mut last = f64::INFINITY;
        for t in 1..=model.stages.len() {
            let err = ensemble_error(&model.stages[..t], &x, &y);
            assert!(err <= last + 1e-12, "stage {t}: {err} > {last}");
            last = err;
        }
        assert!(last <= 0.125, "final training error {last}");
    }

    #[test]
    fn gbdt_learns_separable_data() {
        let (x, y) = separable();
        let model = fit_gbdt(&x, &y, 50, 3, 0.1, None);
        for i in 0..x.rows() {
            let s = gbdt_score(&model, x.row(i));
            assert_eq!(u8::from(s >= 0.5), y[i], "sample {i}: score {s}");
        }
    }

    #[test]
    fn gbdt_is_deterministic() {
        let (x, y) = separable();
        let a = fit_gbdt(&x, &y, 20, 3, 0.1, None);
        let b = fit_gbdt(&x, &y, 20, 3, 0.1, None);
        assert_eq!(a, b);
    }

    #[test]
    fn early_stop_truncates_to_best_validation_loss() {
        let (x, y) = separable();
        let model_full = fit_gbdt(&x, &y, 60, 2, 0.3, None);
        let model_es = fit_gbdt(&x, &y, 60, 2, 0.3, Some((&x, &y)));
        assert!(model_es.trees.len() <= model_full.trees.len());
    }
}
