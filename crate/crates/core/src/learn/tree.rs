//! Decision-tree growing: weighted Gini classification trees (used by
//! CART, the forests, and AdaBoost) and squared-error regression trees
//! (used by gradient boosting).
//!
//! Split search scans features in ascending index order and candidate
//! thresholds in ascending value order, keeping the first strictly best
//! candidate, so ties resolve to the lowest feature index and then the
//! lowest threshold.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;

/// A fitted classification tree node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        /// Gini decrease achieved by this split.
        impurity_decrease: f64,
        /// Fraction of the root's total weight reaching this node.
        weight_fraction: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        /// Class probabilities `[p0, p1]`, summing to 1.
        prob: [f64; 2],
    },
}

/// How many features each split considers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSubsample {
    All,
    /// `floor(sqrt(d))`, at least 1.
    Sqrt,
    Count(usize),
}

impl FeatureSubsample {
    fn resolve(&self, d: usize) -> usize {
        match self {
            FeatureSubsample::All => d,
            FeatureSubsample::Sqrt => (d as f64).sqrt().floor().max(1.0) as usize,
            FeatureSubsample::Count(k) => (*k).clamp(1, d),
        }
    }
}

pub(crate) struct ClassTreeParams {
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub feature_subsample: FeatureSubsample,
    /// Extra-trees style: one uniformly random threshold per candidate
    /// feature instead of the exhaustive midpoint scan.
    pub random_thresholds: bool,
}

/// Guard band for comparing split scores. Mathematically tied
/// candidates can land a few ulps apart under floating point; anything
/// closer than this counts as a tie and the earlier candidate (lowest
/// feature index, then lowest threshold) wins.
const SPLIT_TIE_TOLERANCE: f64 = 1e-12;

fn gini(w0: f64, w1: f64) -> f64 {
    let w = w0 + w1;
    if w <= 0.0 {
        return 0.0;
    }
    // Symmetric form: swapping the class weights reproduces the exact
    // same floating-point value, so label relabeling mirrors fits
    // bit for bit.
    1.0 - (w0 * w0 + w1 * w1) / (w * w)
}

struct SplitCandidate {
    feature: usize,
    threshold: f64,
    decrease: f64,
}

fn class_weights(y: &[u8], weights: &[f64], idx: &[usize]) -> [f64; 2] {
    let mut w = [0.0f64; 2];
    for &i in idx {
        w[y[i] as usize] += weights[i];
    }
    w
}

fn candidate_features(
    d: usize,
    mode: FeatureSubsample,
    rng: &mut Option<&mut ChaCha8Rng>,
) -> Vec<usize> {
    let k = mode.resolve(d);
    if k >= d {
        return (0..d).collect();
    }
    let rng = rng.as_mut().expect("feature subsampling needs an RNG");
    let mut picked = rand::seq::index::sample(rng, d, k).into_vec();
    picked.sort_unstable();
    picked
}

/// Best split of `idx` by weighted Gini decrease, or `None` when no
/// candidate improves on the parent.
fn best_class_split(
    x: &Matrix,
    y: &[u8],
    weights: &[f64],
    idx: &[usize],
    params: &ClassTreeParams,
    rng: &mut Option<&mut ChaCha8Rng>,
) -> Option<SplitCandidate> {
    let parent_w = class_weights(y, weights, idx);
    let total = parent_w[0] + parent_w[1];
    let parent_gini = gini(parent_w[0], parent_w[1]);
    let mut best: Option<SplitCandidate> = None;

    let features = candidate_features(x.cols(), params.feature_subsample, rng);
    let mut sorted: Vec<usize> = idx.to_vec();
    for f in features {
        sorted.sort_by(|&a, &b| {
            x.get(a, f)
                .partial_cmp(&x.get(b, f))
                .unwrap()
                .then(a.cmp(&b))
        });
        if params.random_thresholds {
            let lo = x.get(sorted[0], f);
            let hi = x.get(sorted[sorted.len() - 1], f);
            if lo == hi {
                continue;
            }
            let rng = rng.as_mut().expect("random thresholds need an RNG");
            let threshold = lo + rng.random::<f64>() * (hi - lo);
            let split_at = sorted.partition_point(|&i| x.get(i, f) <= threshold);
            consider(
                &sorted,
                y,
                weights,
                split_at,
                f,
                threshold,
                total,
                parent_gini,
                params.min_leaf,
                &mut best,
            );
        } else {
            let mut left_w = [0.0f64; 2];
            for k in 1..sorted.len() {
                let prev = sorted[k - 1];
                left_w[y[prev] as usize] += weights[prev];
                let (v0, v1) = (x.get(prev, f), x.get(sorted[k], f));
                if v0 == v1 {
                    continue;
                }
                if k < params.min_leaf || sorted.len() - k < params.min_leaf {
                    continue;
                }
                let threshold = (v0 + v1) / 2.0;
                let right_w = [parent_w[0] - left_w[0], parent_w[1] - left_w[1]];
                let wl = left_w[0] + left_w[1];
                let wr = right_w[0] + right_w[1];
                let decrease = parent_gini
                    - (wl / total) * gini(left_w[0], left_w[1])
                    - (wr / total) * gini(right_w[0], right_w[1]);
                if decrease > best.as_ref().map_or(0.0, |b| b.decrease) + SPLIT_TIE_TOLERANCE {
                    best = Some(SplitCandidate {
                        feature: f,
                        threshold,
                        decrease,
                    });
                }
            }
        }
    }
    best
}

#[allow(clippy::too_many_arguments)]
fn consider(
    sorted: &[usize],
    y: &[u8],
    weights: &[f64],
    split_at: usize,
    feature: usize,
    threshold: f64,
    total: f64,
    parent_gini: f64,
    min_leaf: usize,
    best: &mut Option<SplitCandidate>,
) {
    if split_at < min_leaf || sorted.len() - split_at < min_leaf {
        return;
    }
    if split_at == 0 || split_at == sorted.len() {
        return;
    }
    let mut left_w = [0.0f64; 2];
    let mut right_w = [0.0f64; 2];
    for (k, &i) in sorted.iter().enumerate() {
        if k < split_at {
            left_w[y[i] as usize] += weights[i];
        } else {
            right_w[y[i] as usize] += weights[i];
        }
    }
    let wl = left_w[0] + left_w[1];
    let wr = right_w[0] + right_w[1];
    let decrease = parent_gini
        - (wl / total) * gini(left_w[0], left_w[1])
        - (wr / total) * gini(right_w[0], right_w[1]);
    if decrease > best.as_ref().map_or(0.0, |b| b.decrease) + SPLIT_TIE_TOLERANCE {
        *best = Some(SplitCandidate {
            feature,
            threshold,
            decrease,
        });
    }
}

pub(crate) fn grow_class_tree(
    x: &Matrix,
    y: &[u8],
    weights: &[f64],
    idx: &[usize],
    params: &ClassTreeParams,
    rng: &mut Option<&mut ChaCha8Rng>,
) -> TreeNode {
    let root_weight = class_weights(y, weights, idx);
    grow_class_node(x, y, weights, idx, params, rng, 0, root_weight[0] + root_weight[1])
}

#[allow(clippy::too_many_arguments)]
fn grow_class_node(
    x: &Matrix,
    y: &[u8],
    weights: &[f64],
    idx: &[usize],
    params: &ClassTreeParams,
    rng: &mut Option<&mut ChaCha8Rng>,
    depth: usize,
    root_total: f64,
) -> TreeNode {
    let w = class_weights(y, weights, idx);
    let total = w[0] + w[1];
    let leaf = || TreeNode::Leaf {
        prob: if total > 0.0 {
            [w[0] / total, w[1] / total]
        } else {
            [0.5, 0.5]
        },
    };
    if w[0] == 0.0 || w[1] == 0.0 || idx.len() < 2 * params.min_leaf {
        return leaf();
    }
    if let Some(max) = params.max_depth {
        if depth >= max {
            return leaf();
        }
    }
    let Some(split) = best_class_split(x, y, weights, idx, params, rng) else {
        return leaf();
    };
    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = idx
        .iter()
        .partition(|&&i| x.get(i, split.feature) <= split.threshold);
    if left_idx.is_empty() || right_idx.is_empty() {
        return leaf();
    }
    let left = grow_class_node(x, y, weights, &left_idx, params, rng, depth + 1, root_total);
    let right = grow_class_node(x, y, weights, &right_idx, params, rng, depth + 1, root_total);
    TreeNode::Split {
        feature: split.feature,
        threshold: split.threshold,
        impurity_decrease: split.decrease,
        weight_fraction: total / root_total,
        left: Box::new(left),
        right: Box::new(right),
    }
}

pub(crate) fn tree_prob(node: &TreeNode, row: &[f64]) -> [f64; 2] {
    match node {
        TreeNode::Leaf { prob } => *prob,
        TreeNode::Split {
            feature,
            threshold,
            left,
            right,
            ..
        } => {
            if row[*feature] <= *threshold {
                tree_prob(left, row)
            } else {
                tree_prob(right, row)
            }
        }
    }
}

/// Adds `weight_fraction * impurity_decrease` per split feature.
pub(crate) fn accumulate_tree_importances(node: &TreeNode, out: &mut [f64]) {
    if let TreeNode::Split {
        feature,
        impurity_decrease,
        weight_fraction,
        left,
        right,
        ..
    } = node
    {
        out[*feature] += weight_fraction * impurity_decrease;
        accumulate_tree_importances(left, out);
        accumulate_tree_importances(right, out);
    }
}

/// A fitted regression tree node (gradient-boosting base learner).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum RegNode {
    Split {
        feature: usize,
        threshold: f64,
        impurity_decrease: f64,
        weight_fraction: f64,
        left: Box<RegNode>,
        right: Box<RegNode>,
    },
    Leaf {
        value: f64,
    },
}

fn sse(grad: &[f64], idx: &[usize]) -> (f64, f64, f64) {
    let mut sum = 0.0;
    let mut sq = 0.0;
    for &i in idx {
        sum += grad[i];
        sq += grad[i] * grad[i];
    }
    let n = idx.len() as f64;
    (sq - sum * sum / n, sum, n)
}

/// Newton leaf value for logistic loss: sum of gradients over sum of
/// hessians.
fn leaf_value(grad: &[f64], hess: &[f64], idx: &[usize]) -> f64 {
    let g: f64 = idx.iter().map(|&i| grad[i]).sum();
    let h: f64 = idx.iter().map(|&i| hess[i]).sum();
    g / h.max(1e-12)
}

pub(crate) fn grow_reg_tree(
    x: &Matrix,
    grad: &[f64],
    hess: &[f64],
    idx: &[usize],
    max_depth: usize,
    min_leaf: usize,
) -> RegNode {
    grow_reg_node(x, grad, hess, idx, max_depth, min_leaf, 0, idx.len() as f64)
}

#[allow(clippy::too_many_arguments)]
fn grow_reg_node(
    x: &Matrix,
    grad: &[f64],
    hess: &[f64],
    idx: &[usize],
    max_depth: usize,
    min_leaf: usize,
    depth: usize,
    root_n: f64,
) -> RegNode {
    let leaf = || RegNode::Leaf {
        value: leaf_value(grad, hess, idx),
    };
    if depth >= max_depth || idx.len() < 2 * min_leaf {
        return leaf();
    }
    let (parent_sse, total_sum, n) = sse(grad, idx);
    if parent_sse <= 1e-12 {
        return leaf();
    }
    let total_sq = parent_sse + total_sum * total_sum / n;

    let mut best: Option<SplitCandidate> = None;
    let mut sorted = idx.to_vec();
    for f in 0..x.cols() {
        sorted.sort_by(|&a, &b| {
            x.get(a, f)
                .partial_cmp(&x.get(b, f))
                .unwrap()
                .then(a.cmp(&b))
        });
        let mut left_sum = 0.0;
        let mut left_sq = 0.0;
        for k in 1..sorted.len() {
            let prev = sorted[k - 1];
            left_sum += grad[prev];
            left_sq += grad[prev] * grad[prev];
            let (v0, v1) = (x.get(prev, f), x.get(sorted[k], f));
            if v0 == v1 {
                continue;
            }
            if k < min_leaf || sorted.len() - k < min_leaf {
                continue;
            }
            let nl = k as f64;
            let nr = n - nl;
            let right_sum = total_sum - left_sum;
            let right_sq = total_sq - left_sq;
            let sse_l = left_sq - left_sum * left_sum / nl;
            let sse_r = right_sq - right_sum * right_sum / nr;
            // Variance-weighted decrease, comparable across nodes.
            let decrease = (parent_sse - sse_l - sse_r) / n;
            if decrease > best.as_ref().map_or(0.0, |b| b.decrease) + SPLIT_TIE_TOLERANCE {
                best = Some(SplitCandidate {
                    feature: f,
                    threshold: (v0 + v1) / 2.0,
                    decrease,
                });
            }
        }
    }
    let Some(split) = best else {
        return leaf();
    };
    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = idx
        .iter()
        .partition(|&&i| x.get(i, split.feature) <= split.threshold);
    if left_idx.is_empty() || right_idx.is_empty() {
        return leaf();
    }
    RegNode::Split {
        feature: split.feature,
        threshold: split.threshold,
        impurity_decrease: split.decrease,
        weight_fraction: n / root_n,
        left: Box::new(grow_reg_node(
            x, grad, hess, &left_idx, max_depth, min_leaf, depth + 1, root_n,
        )),
        right: Box::new(grow_reg_node(
            x, grad, hess, &right_idx, max_depth, min_leaf, depth + 1, root_n,
        )),
    }
}

pub(crate) fn reg_tree_value(node: &RegNode, row: &[f64]) -> f64 {
    match node {
        RegNode::Leaf { value } => *value,
        RegNode::Split {
            feature,
            threshold,
            left,
            right,
            ..
        } => {
            if row[*feature] <= *threshold {
                reg_tree_value(left, row)
            } else {
                reg_tree_value(right, row)
            }
        }
    }
}

pub(crate) fn accumulate_reg_importances(node: &RegNode, out: &mut [f64]) {
    if let RegNode::Split {
        feature,
        impurity_decrease,
        weight_fraction,
        left,
        right,
        ..
    } = node
    {
        out[*feature] += weight_fraction * impurity_decrease;
        accumulate_reg_importances(left, out);
        accumulate_reg_importances(right, out);
    }
}
