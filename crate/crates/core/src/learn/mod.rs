//! From-scratch binary classifiers with a common fit/score surface.
//!
//! Eight families: CART, random forest, extra trees, AdaBoost, gradient
//! boosting, KNN, logistic regression, and LDA. Every fit is a pure
//! function of `(spec, x, y)` including the spec's seed; scores are
//! class-1 probability estimates and labels threshold them at 0.5.
//! The published "default parameters" of the source methods are
//! implementation-defined, so the defaults here are explicit and should
//! be echoed in reports.

mod boost;
mod forest;
mod knn;
mod linear;
mod tree;

pub use boost::{AdaBoostModel, AdaStage, GbdtModel};
pub use knn::KnnModel;
pub use linear::LinearParams;
pub use tree::{FeatureSubsample, RegNode, TreeNode};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::seed::{derive_seed, tag};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassifierKind {
    Cart {
        max_depth: Option<usize>,
        min_leaf: usize,
    },
    RandomForest {
        trees: usize,
        max_depth: Option<usize>,
        min_leaf: usize,
        feature_subsample: FeatureSubsample,
        bootstrap: bool,
    },
    ExtraTrees {
        trees: usize,
        max_depth: Option<usize>,
        min_leaf: usize,
        feature_subsample: FeatureSubsample,
    },
    Adaboost {
        stages: usize,
        weak_depth: usize,
    },
    GradientBoosting {
        stages: usize,
        max_depth: usize,
        learning_rate: f64,
    },
    Knn {
        k: usize,
    },
    Logistic {
        l2: f64,
        tolerance: f64,
        max_iterations: usize,
    },
    Lda {
        ridge: f64,
    },
}

impl ClassifierKind {
    pub fn cart() -> Self {
        ClassifierKind::Cart {
            max_depth: None,
            min_leaf: 1,
        }
    }

    pub fn random_forest() -> Self {
        ClassifierKind::RandomForest {
            trees: 100,
            max_depth: None,
            min_leaf: 1,
            feature_subsample: FeatureSubsample::Sqrt,
            bootstrap: true,
        }
    }

    pub fn extra_trees() -> Self {
        ClassifierKind::ExtraTrees {
            trees: 100,
            max_depth: None,
            min_leaf: 1,
            feature_subsample: FeatureSubsample::Sqrt,
        }
    }

    pub fn adaboost() -> Self {
        ClassifierKind::Adaboost {
            stages: 50,
            weak_depth: 1,
        }
    }

    pub fn gradient_boosting() -> Self {
        ClassifierKind::GradientBoosting {
            stages: 100,
            max_depth: 3,
            learning_rate: 0.1,
        }
    }

    pub fn knn() -> Self {
        ClassifierKind::Knn { k: 5 }
    }

    pub fn logistic() -> Self {
        ClassifierKind::Logistic {
            l2: 1.0,
            tolerance: 1e-6,
            max_iterations: 5000,
        }
    }

    pub fn lda() -> Self {
        ClassifierKind::Lda { ridge: 1e-6 }
    }

    /// Canonical short name used in CLI arguments and reports.
    pub fn name(&self) -> &'static str {
        match self {
            ClassifierKind::Cart { .. } => "cart",
            ClassifierKind::RandomForest { .. } => "random_forest",
            ClassifierKind::ExtraTrees { .. } => "extra_trees",
            ClassifierKind::Adaboost { .. } => "adaboost",
            ClassifierKind::GradientBoosting { .. } => "gradient_boosting",
            ClassifierKind::Knn { .. } => "knn",
            ClassifierKind::Logistic { .. } => "logistic",
            ClassifierKind::Lda { .. } => "lda",
        }
    }

    /// Default-parameter spec for a short name.
    pub fn from_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "cart" | "tree" => Ok(Self::cart()),
            "random_forest" | "rf" => Ok(Self::random_forest()),
            "extra_trees" | "et" => Ok(Self::extra_trees()),
            "adaboost" | "ada" => Ok(Self::adaboost()),
            "gradient_boosting" | "gbdt" | "gb" => Ok(Self::gradient_boosting()),
            "knn" => Ok(Self::knn()),
            "logistic" | "logreg" => Ok(Self::logistic()),
            "lda" => Ok(Self::lda()),
            other => Err(Error::Config(format!("unknown classifier {other:?}"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: usize| {
            if v == 0 {
                Err(Error::Config(format!("{name} must be positive")))
            } else {
                Ok(())
            }
        };
        match self {
            ClassifierKind::Cart { min_leaf, .. } => positive("min_leaf", *min_leaf),
            ClassifierKind::RandomForest {
                trees, min_leaf, ..
            }
            | ClassifierKind::ExtraTrees {
                trees, min_leaf, ..
            } => {
                positive("trees", *trees)?;
                positive("min_leaf", *min_leaf)
            }
            ClassifierKind::Adaboost { stages, weak_depth } => {
                positive("stages", *stages)?;
                if !(1..=3).contains(weak_depth) {
                    return Err(Error::Config(format!(
                        "adaboost weak_depth {weak_depth} outside 1..=3"
                    )));
                }
                Ok(())
            }
            ClassifierKind::GradientBoosting {
                stages,
                max_depth,
                learning_rate,
            } => {
                positive("stages", *stages)?;
                positive("max_depth", *max_depth)?;
                if !(*learning_rate > 0.0 && *learning_rate <= 1.0) {
                    return Err(Error::Config(format!(
                        "learning_rate {learning_rate} outside (0, 1]"
                    )));
                }
                Ok(())
            }
            ClassifierKind::Knn { k } => positive("k", *k),
            ClassifierKind::Logistic {
                l2,
                tolerance,
                max_iterations,
            } => {
                if *l2 < 0.0 {
                    return Err(Error::Config("l2 must be non-negative".into()));
                }
                if *tolerance <= 0.0 {
                    return Err(Error::Config("tolerance must be positive".into()));
                }
                positive("max_iterations", *max_iterations)
            }
            ClassifierKind::Lda { ridge } => {
                if *ridge <= 0.0 {
                    return Err(Error::Config("ridge must be positive".into()));
                }
                Ok(())
            }
        }
    }

    fn is_tree_based(&self) -> bool {
        matches!(
            self,
            ClassifierKind::Cart { .. }
                | ClassifierKind::RandomForest { .. }
                | ClassifierKind::ExtraTrees { .. }
                | ClassifierKind::Adaboost { .. }
                | ClassifierKind::GradientBoosting { .. }
        )
    }
}

/// A classifier kind plus the seed that makes its fit deterministic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub kind: ClassifierKind,
    #[serde(default)]
    pub seed: u64,
}

impl ClassifierSpec {
    pub fn new(kind: ClassifierKind, seed: u64) -> Result<Self> {
        kind.validate()?;
        Ok(ClassifierSpec { kind, seed })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
enum ModelParams {
    Tree { root: TreeNode },
    Forest { trees: Vec<TreeNode> },
    Adaboost { model: AdaBoostModel },
    GradientBoosting { model: GbdtModel },
    Knn { model: KnnModel },
    Logistic { params: LinearParams },
    Lda { params: LinearParams },
}

/// A fitted classifier with its spec and training metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u32,
    pub spec: ClassifierSpec,
    pub feature_names: Vec<String>,
    pub n_features: usize,
    params: ModelParams,
}

fn validate_training_data(x: &Matrix, y: &[u8]) -> Result<()> {
    if x.rows() != y.len() {
        return Err(Error::Shape(format!(
            "{} rows but {} labels",
            x.rows(),
            y.len()
        )));
    }
    if x.rows() < 2 {
        return Err(Error::InsufficientData(
            "training needs at least two samples".into(),
        ));
    }
    if x.cols() == 0 {
        return Err(Error::InsufficientData("training needs at least one feature".into()));
    }
    if let Some(bad) = y.iter().find(|&&v| v > 1) {
        return Err(Error::Validation(format!("label {bad} is not binary")));
    }
    let ones = y.iter().filter(|&&v| v == 1).count();
    if ones == 0 || ones == y.len() {
        return Err(Error::Unsupported(
            "training labels contain a single class".into(),
        ));
    }
    for i in 0..x.rows() {
        if x.row(i).iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "sample {i} contains a non-finite feature value"
            )));
        }
    }
    Ok(())
}

/// Fits a classifier. Deterministic given the spec (seed included).
pub fn fit(spec: &ClassifierSpec, x: &Matrix, y: &[u8]) -> Result<TrainedModel> {
    fit_with_validation(spec, x, y, None)
}

/// As [`fit`], with an optional held-out set that enables early
/// stopping for the boosting families. Other families ignore it.
pub fn fit_with_validation(
    spec: &ClassifierSpec,
    x: &Matrix,
    y: &[u8],
    validation: Option<(&Matrix, &[u8])>,
) -> Result<TrainedModel> {
    spec.kind.validate()?;
    validate_training_data(x, y)?;

    let params = match &spec.kind {
        ClassifierKind::Cart {
            max_depth,
            min_leaf,
        } => {
            let weights = vec![1.0; x.rows()];
            let idx: Vec<usize> = (0..x.rows()).collect();
            let params = tree::ClassTreeParams {
                max_depth: *max_depth,
                min_leaf: *min_leaf,
                feature_subsample: FeatureSubsample::All,
                random_thresholds: false,
            };
            ModelParams::Tree {
                root: tree::grow_class_tree(x, y, &weights, &idx, &params, &mut None),
            }
        }
        ClassifierKind::RandomForest {
            trees,
            max_depth,
            min_leaf,
            feature_subsample,
            bootstrap,
        } => ModelParams::Forest {
            trees: forest::fit_forest(
                x,
                y,
                &forest::ForestOptions {
                    trees: *trees,
                    max_depth: *max_depth,
                    min_leaf: *min_leaf,
                    feature_subsample: *feature_subsample,
                    bootstrap: *bootstrap,
                    random_thresholds: false,
                },
                derive_seed(spec.seed, &[tag::TREE, 0]),
            ),
        },
        ClassifierKind::ExtraTrees {
            trees,
            max_depth,
            min_leaf,
            feature_subsample,
        } => ModelParams::Forest {
            trees: forest::fit_forest(
                x,
                y,
                &forest::ForestOptions {
                    trees: *trees,
                    max_depth: *max_depth,
                    min_leaf: *min_leaf,
                    feature_subsample: *feature_subsample,
                    bootstrap: false,
                    random_thresholds: true,
                },
                derive_seed(spec.seed, &[tag::TREE, 1]),
            ),
        },
        ClassifierKind::Adaboost { stages, weak_depth } => ModelParams::Adaboost {
            model: boost::fit_adaboost(x, y, *stages, *weak_depth, validation),
        },
        ClassifierKind::GradientBoosting {
            stages,
            max_depth,
            learning_rate,
        } => ModelParams::GradientBoosting {
            model: boost::fit_gbdt(x, y, *stages, *max_depth, *learning_rate, validation),
        },
        ClassifierKind::Knn { k } => ModelParams::Knn {
            model: KnnModel {
                x: x.clone(),
                y: y.to_vec(),
                k: *k,
            },
        },
        ClassifierKind::Logistic {
            l2,
            tolerance,
            max_iterations,
        } => {
            let (params, _) = linear::fit_logistic(x, y, *l2, *tolerance, *max_iterations);
            ModelParams::Logistic { params }
        }
        ClassifierKind::Lda { ridge } => ModelParams::Lda {
            params: linear::fit_lda(x, y, *ridge)?,
        },
    };

    Ok(TrainedModel {
        format_version: MODEL_FORMAT_VERSION,
        spec: spec.clone(),
        feature_names: Vec::new(),
        n_features: x.cols(),
        params,
    })
}

impl TrainedModel {
    pub fn with_feature_names(mut self, names: Vec<String>) -> Self {
        self.feature_names = names;
        self
    }

    /// Class-1 probability estimates in `[0, 1]`.
    pub fn predict_scores(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.cols() != self.n_features {
            return Err(Error::Shape(format!(
                "model expects {} features, got {}",
                self.n_features,
                x.cols()
            )));
        }
        let mut scores = Vec::with_capacity(x.rows());
        for i in 0..x.rows() {
            let row = x.row(i);
            let s = match &self.params {
                ModelParams::Tree { root } => tree::tree_prob(root, row)[1],
                ModelParams::Forest { trees } => forest::forest_score(trees, row),
                ModelParams::Adaboost { model } => boost::adaboost_score(model, row),
                ModelParams::GradientBoosting { model } => boost::gbdt_score(model, row),
                ModelParams::Knn { model } => knn::knn_score(model, row),
                ModelParams::Logistic { params } | ModelParams::Lda { params } => {
                    linear::linear_score(params, row)
                }
            };
            scores.push(s);
        }
        Ok(scores)
    }

    /// Scores thresholded at 0.5.
    pub fn predict_labels(&self, x: &Matrix) -> Result<Vec<u8>> {
        Ok(self
            .predict_scores(x)?
            .into_iter()
            .map(|s| u8::from(s >= 0.5))
            .collect())
    }

    /// Mean-decrease-in-impurity importances, normalized to sum 1.
    /// Only tree-based families support this.
    pub fn feature_importances(&self) -> Result<Vec<f64>> {
        if !self.spec.kind.is_tree_based() {
            return Err(Error::Unsupported(format!(
                "feature importances are not defined for {}",
                self.spec.kind.name()
            )));
        }
        let mut imp = vec![0.0; self.n_features];
        match &self.params {
            ModelParams::Tree { root } => tree::accumulate_tree_importances(root, &mut imp),
            ModelParams::Forest { trees } => {
                for t in trees {
                    tree::accumulate_tree_importances(t, &mut imp);
                }
            }
            ModelParams::Adaboost { model } => {
                for stage in &model.stages {
                    let mut stage_imp = vec![0.0; self.n_features];
                    tree::accumulate_tree_importances(&stage.tree, &mut stage_imp);
                    for (a, b) in imp.iter_mut().zip(stage_imp.iter()) {
                        *a += stage.alpha * b;
                    }
                }
            }
            ModelParams::GradientBoosting { model } => {
                for t in &model.trees {
                    tree::accumulate_reg_importances(t, &mut imp);
                }
            }
            _ => unreachable!("non-tree families rejected above"),
        }
        let total: f64 = imp.iter().sum();
        if total > 0.0 {
            for v in &mut imp {
                *v /= total;
            }
        }
        Ok(imp)
    }

    /// Root node of a fitted CART model, for inspection.
    pub fn tree(&self) -> Option<&TreeNode> {
        match &self.params {
            ModelParams::Tree { root } => Some(root),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::Runtime(format!("model serialization failed: {e}")))
    }

    pub fn from_json(text: &str) -> Result<TrainedModel> {
        let model: TrainedModel = serde_json::from_str(text)
            .map_err(|e| Error::Validation(format!("model deserialization failed: {e}")))?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Validation(format!(
                "unsupported model format version {}",
                model.format_version
            )));
        }
        Ok(model)
    }
}

/// Feature-ranking families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankerKind {
    RandomForest,
    ExtraTrees,
    GradientBoosting,
}

impl RankerKind {
    pub fn name(&self) -> &'static str {
        match self {
            RankerKind::RandomForest => "random_forest",
            RankerKind::ExtraTrees => "extra_trees",
            RankerKind::GradientBoosting => "gradient_boosting",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "random_forest" | "rf" => Ok(RankerKind::RandomForest),
            "extra_trees" | "et" => Ok(RankerKind::ExtraTrees),
            "gradient_boosting" | "gbdt" | "gb" | "xgb" => Ok(RankerKind::GradientBoosting),
            other => Err(Error::Config(format!("unknown ranker {other:?}"))),
        }
    }

    pub fn all() -> [RankerKind; 3] {
        [
            RankerKind::RandomForest,
            RankerKind::ExtraTrees,
            RankerKind::GradientBoosting,
        ]
    }

    fn default_spec(&self, seed: u64) -> ClassifierSpec {
        let kind = match self {
            RankerKind::RandomForest => ClassifierKind::random_forest(),
            RankerKind::ExtraTrees => ClassifierKind::extra_trees(),
            RankerKind::GradientBoosting => ClassifierKind::gradient_boosting(),
        };
        ClassifierSpec { kind, seed }
    }
}

/// Ranks features by descending importance of a freshly fitted
/// default-parameter ensemble; ties break toward the lower feature
/// index.
pub fn rank_features(ranker: RankerKind, x: &Matrix, y: &[u8], seed: u64) -> Result<Vec<usize>> {
    let spec = ranker.default_spec(seed);
    let model = fit(&spec, x, y)?;
    let imp = model.feature_importances()?;
    let mut order: Vec<usize> = (0..imp.len()).collect();
    order.sort_by(|&a, &b| imp[b].partial_cmp(&imp[a]).unwrap().then(a.cmp(&b)));
    Ok(order)
}

/// Importances of a freshly fitted ranking ensemble, for reporting.
pub fn ranking_importances(
    ranker: RankerKind,
    x: &Matrix,
    y: &[u8],
    seed: u64,
) -> Result<Vec<f64>> {
    let model = fit(&ranker.default_spec(seed), x, y)?;
    model.feature_importances()
}

#[cfg(test)]
mod tests;
