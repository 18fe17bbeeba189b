//! Random forest and extra trees.
//!
//! Both grow ensembles of the classification trees in [`super::tree`].
//! The random forest bootstraps samples and subsamples features per
//! split; extra trees keep the full sample and draw one uniformly
//! random threshold per candidate feature.

use rand::Rng;

use crate::learn::tree::{grow_class_tree, ClassTreeParams, FeatureSubsample, TreeNode};
use crate::matrix::Matrix;
use crate::seed::{derive_seed, rng, tag};

pub(crate) struct ForestOptions {
    pub trees: usize,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub feature_subsample: FeatureSubsample,
    pub bootstrap: bool,
    pub random_thresholds: bool,
}

pub(crate) fn fit_forest(x: &Matrix, y: &[u8], opts: &ForestOptions, seed: u64) -> Vec<TreeNode> {
    let n = x.rows();
    let weights = vec![1.0; n];
    let params = ClassTreeParams {
        max_depth: opts.max_depth,
        min_leaf: opts.min_leaf,
        feature_subsample: opts.feature_subsample,
        random_thresholds: opts.random_thresholds,
    };
    let needs_rng =
        opts.random_thresholds || !matches!(opts.feature_subsample, FeatureSubsample::All);
    (0..opts.trees)
        .map(|t| {
            let mut tree_rng = rng(derive_seed(seed, &[tag::TREE, t as u64]));
            let idx: Vec<usize> = if opts.bootstrap {
                (0..n).map(|_| tree_rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let mut maybe_rng = if needs_rng { Some(&mut tree_rng) } else { None };
            grow_class_tree(x, y, &weights, &idx, &params, &mut maybe_rng)
        })
        .collect()
}

/// Mean class-1 probability over the ensemble.
pub(crate) fn forest_score(trees: &[TreeNode], row: &[f64]) -> f64 {
    let sum: f64 = trees
        .iter()
        .map(|t| crate::learn::tree::tree_prob(t, row)[1])
        .sum();
    sum / trees.len() as f64
}
