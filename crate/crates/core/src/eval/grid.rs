//! The ranker × classifier × top-k grid search under stratified k-fold
//! cross-validation.
//!
//! Per fold, correlation pruning and feature ranking are fitted on the
//! training portion only, the top-k columns are selected, the training
//! set is SMOTE-balanced, the classifier is fitted, and the untouched
//! test fold is scored. Confusion counts pool over folds. A leakage
//! audit instruments every prune/rank/SMOTE/fit call and records any
//! test-index appearance.
//!
//! Runs are independent given their derived seeds and execute in
//! parallel; results are collected in run order and then sorted by
//! overall F1, so output is bit-identical for identical inputs.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::external::ExternalScoreSet;
use crate::eval::folds::{stratified_kfold, FoldPlan};
use crate::eval::metrics::{compute_metrics, ConfusionCounts, MetricsReport};
use crate::eval::roc::{roc_curve_auc, RocCurve};
use crate::eval::smote::smote_oversample;
use crate::features::{correlation_prune, FeatureTable};
use crate::learn::{
    fit_with_validation, rank_features, ranking_importances, ClassifierKind, ClassifierSpec,
    RankerKind,
};
use crate::matrix::Matrix;
use crate::seed::{derive_seed, tag};

/// One column of the grid: a native spec or an external score source.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridClassifier {
    Native(ClassifierSpec),
    External { external: String },
}

impl GridClassifier {
    pub fn name(&self) -> String {
        match self {
            GridClassifier::Native(spec) => spec.kind.name().to_string(),
            GridClassifier::External { external } => format!("external:{external}"),
        }
    }

    /// Parses `"adaboost"`, `"rf"`, `"external:mlp"`, ...
    pub fn parse(text: &str) -> Result<GridClassifier> {
        if let Some(name) = text.strip_prefix("external:") {
            if name.is_empty() {
                return Err(Error::Config("external classifier needs a name".into()));
            }
            return Ok(GridClassifier::External {
                external: name.to_string(),
            });
        }
        Ok(GridClassifier::Native(ClassifierSpec::new(
            ClassifierKind::from_name(text)?,
            0,
        )?))
    }

    /// The ten-model set: eight native classifiers plus two external
    /// score stubs.
    pub fn paper_set() -> Vec<GridClassifier> {
        let mut set: Vec<GridClassifier> = [
            ClassifierKind::cart(),
            ClassifierKind::random_forest(),
            ClassifierKind::extra_trees(),
            ClassifierKind::adaboost(),
            ClassifierKind::gradient_boosting(),
            ClassifierKind::knn(),
            ClassifierKind::logistic(),
            ClassifierKind::lda(),
        ]
        .into_iter()
        .map(|kind| GridClassifier::Native(ClassifierSpec { kind, seed: 0 }))
        .collect();
        set.push(GridClassifier::External {
            external: "mlp".into(),
        });
        set.push(GridClassifier::External {
            external: "svm".into(),
        });
        set
    }
}

#[derive(Clone, Debug)]
pub struct GridConfig {
    pub rankers: Vec<RankerKind>,
    pub classifiers: Vec<GridClassifier>,
    pub k_max: usize,
    pub folds: usize,
    pub seed: u64,
    pub prune_threshold: f64,
    pub smote_neighbors: usize,
    /// Compatibility flag: prune once on the full dataset instead of
    /// per training fold.
    pub global_prune: bool,
    /// Compatibility flag: SMOTE the full retained-column training set
    /// before ranking instead of after selection.
    pub smote_before_rank: bool,
    /// Feed the spared validation split to boosting early-stop.
    pub use_validation: bool,
    /// Store ROC curves for this many top results.
    pub keep_roc: usize,
    pub external_scores: BTreeMap<String, ExternalScoreSet>,
}

impl GridConfig {
    /// Full-scale defaults: three rankers, the ten-model set, top-k up
    /// to 28.
    pub fn paper_defaults(seed: u64) -> GridConfig {
        GridConfig {
            rankers: RankerKind::all().to_vec(),
            classifiers: GridClassifier::paper_set(),
            k_max: 28,
            folds: 5,
            seed,
            prune_threshold: 0.95,
            smote_neighbors: 5,
            global_prune: false,
            smote_before_rank: false,
            use_validation: false,
            keep_roc: 10,
            external_scores: BTreeMap::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.rankers.is_empty() || self.classifiers.is_empty() {
            return Err(Error::Config("grid needs rankers and classifiers".into()));
        }
        if self.k_max == 0 {
            return Err(Error::Config("k_max must be at least 1".into()));
        }
        if self.folds < 2 {
            return Err(Error::Config("grid needs at least 2 folds".into()));
        }
        Ok(())
    }
}

/// Serializable echo of a grid configuration for archives.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridConfigEcho {
    pub rankers: Vec<String>,
    pub classifiers: Vec<GridClassifier>,
    pub k_max: usize,
    pub folds: usize,
    pub seed: u64,
    pub prune_threshold: f64,
    pub smote_neighbors: usize,
    pub global_prune: bool,
    pub smote_before_rank: bool,
    pub use_validation: bool,
}

impl From<&GridConfig> for GridConfigEcho {
    fn from(cfg: &GridConfig) -> Self {
        GridConfigEcho {
            rankers: cfg.rankers.iter().map(|r| r.name().to_string()).collect(),
            classifiers: cfg.classifiers.clone(),
            k_max: cfg.k_max,
            folds: cfg.folds,
            seed: cfg.seed,
            prune_threshold: cfg.prune_threshold,
            smote_neighbors: cfg.smote_neighbors,
            global_prune: cfg.global_prune,
            smote_before_rank: cfg.smote_before_rank,
            use_validation: cfg.use_validation,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridResult {
    pub run_id: String,
    pub ranker: String,
    pub classifier: String,
    pub top_k: usize,
    /// Features the run used on the first fold (per-fold rankings can
    /// differ; this names one concrete selection).
    pub selected_features: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<MetricsReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct AuditReport {
    /// Instrumented prune/rank/SMOTE/fit calls.
    pub checks: u64,
    /// Test-index appearances, one entry per offending call.
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Debug)]
pub struct GridOutput {
    /// Sorted by overall F1 descending; failed runs last.
    pub results: Vec<GridResult>,
    pub fold_plan: FoldPlan,
    pub audit: AuditReport,
    /// ROC curves of the top `keep_roc` runs, keyed by run id.
    pub roc_curves: BTreeMap<String, RocCurve>,
    /// Wall-clock per-sample inference milliseconds, keyed by run id.
    /// Sidecar material: never part of byte-stable outputs.
    pub timings_ms: BTreeMap<String, f64>,
}

struct Audit {
    checks: AtomicU64,
    violations: Mutex<Vec<String>>,
    notes: Mutex<Vec<String>>,
}

impl Audit {
    fn new() -> Audit {
        Audit {
            checks: AtomicU64::new(0),
            violations: Mutex::new(Vec::new()),
            notes: Mutex::new(Vec::new()),
        }
    }

    /// Asserts that `used` avoids the fold's sorted test indices.
    fn check(&self, op: &str, fold: usize, used: &[usize], test_sorted: &[usize]) {
        self.checks.fetch_add(1, Ordering::Relaxed);
        for &i in used {
            if test_sorted.binary_search(&i).is_ok() {
                self.violations
                    .lock()
                    .unwrap()
                    .push(format!("{op}: fold {fold} consumed test index {i}"));
            }
        }
    }

    fn note(&self, text: String) {
        self.notes.lock().unwrap().push(text);
    }

    fn into_report(self) -> AuditReport {
        let mut violations = self.violations.into_inner().unwrap();
        violations.sort();
        let mut notes = self.notes.into_inner().unwrap();
        notes.sort();
        AuditReport {
            checks: self.checks.into_inner(),
            violations,
            notes,
        }
    }
}

struct FoldContext {
    train: Vec<usize>,
    validation: Vec<usize>,
    test: Vec<usize>,
    /// Per ranker: retained catalog feature indices, best first.
    rankings: Vec<Vec<usize>>,
    /// SMOTE-before-rank mode: the balanced training set over all
    /// retained columns, plus those columns' catalog indices.
    presmoted: Option<(Matrix, Vec<u8>, Vec<usize>)>,
}

struct RunOutcome {
    ranker_idx: usize,
    classifier_idx: usize,
    top_k: usize,
    ranker: String,
    classifier: String,
    selected_features: Vec<String>,
    scores: Vec<f64>,
    labels: Vec<u8>,
    predict_seconds: f64,
    error: Option<String>,
}

fn select_labels(y: &[u8], idx: &[usize]) -> Vec<u8> {
    idx.iter().map(|&i| y[i]).collect()
}

/// Runs the full grid. See the module docs for the per-fold protocol.
pub fn run_grid(table: &FeatureTable, cfg: &GridConfig) -> Result<GridOutput> {
    cfg.validate()?;
    let plan = stratified_kfold(&table.y, cfg.folds, cfg.seed)?;
    let audit = Audit::new();

    // Global-prune compatibility mode sees every row by design; the
    // audit notes it instead of flagging each call.
    let global_catalog = if cfg.global_prune {
        audit.note("global_prune enabled: pruning fitted on the full dataset".into());
        Some(correlation_prune(
            &table.x,
            &table.names,
            cfg.prune_threshold,
        )?)
    } else {
        None
    };

    let mut contexts: Vec<FoldContext> = Vec::with_capacity(plan.k());
    for (f, fold) in plan.folds.iter().enumerate() {
        let train_x = table.x.select_rows(&fold.train);
        let train_y = select_labels(&table.y, &fold.train);

        let retained: Vec<usize> = match &global_catalog {
            Some(catalog) => catalog.retained_indices(),
            None => {
                audit.check("prune", f, &fold.train, &fold.test);
                correlation_prune(&train_x, &table.names, cfg.prune_threshold)?
                    .retained_indices()
            }
        };
        if retained.is_empty() {
            return Err(Error::InsufficientData(format!(
                "fold {f}: pruning retained no features"
            )));
        }

        let (rank_input_x, rank_input_y, presmoted) = if cfg.smote_before_rank {
            audit.check("smote", f, &fold.train, &fold.test);
            let (xs, ys) = smote_oversample(
                &train_x.select_cols(&retained),
                &train_y,
                cfg.smote_neighbors,
                derive_seed(cfg.seed, &[tag::SMOTE, f as u64]),
            )?;
            (
                xs.clone(),
                ys.clone(),
                Some((xs, ys, retained.clone())),
            )
        } else {
            (train_x.select_cols(&retained), train_y.clone(), None)
        };

        let mut rankings = Vec::with_capacity(cfg.rankers.len());
        for (ri, ranker) in cfg.rankers.iter().enumerate() {
            audit.check("rank", f, &fold.train, &fold.test);
            let order = rank_features(
                *ranker,
                &rank_input_x,
                &rank_input_y,
                derive_seed(cfg.seed, &[tag::RANKER, ri as u64, f as u64]),
            )?;
            rankings.push(order.into_iter().map(|j| retained[j]).collect());
        }

        contexts.push(FoldContext {
            train: fold.train.clone(),
            validation: fold.validation.clone(),
            test: fold.test.clone(),
            rankings,
            presmoted,
        });
    }

    // One work group per (ranker, k); classifiers share the group's
    // per-fold SMOTE output.
    let groups: Vec<(usize, usize)> = (0..cfg.rankers.len())
        .flat_map(|ri| (1..=cfg.k_max).map(move |k| (ri, k)))
        .collect();

    let outcomes: Vec<Vec<RunOutcome>> = groups
        .par_iter()
        .map(|&(ri, k)| run_group(table, cfg, &contexts, &audit, ri, k))
        .collect();

    let mut results: Vec<(usize, usize, usize, GridResult)> = Vec::new();
    let mut score_store: BTreeMap<String, (Vec<f64>, Vec<u8>)> = BTreeMap::new();
    let mut timings_ms = BTreeMap::new();
    for outcome in outcomes.into_iter().flatten() {
        let run_id = format!(
            "r{}_c{}_k{}",
            outcome.ranker_idx, outcome.classifier_idx, outcome.top_k
        );
        let (report, error) = match outcome.error {
            Some(e) => (None, Some(e)),
            None => match summarize(&outcome) {
                Ok(report) => (Some(report), None),
                Err(e) => (None, Some(e.to_string())),
            },
        };
        if report.is_some() {
            if outcome.predict_seconds > 0.0 && !outcome.scores.is_empty() {
                timings_ms.insert(
                    run_id.clone(),
                    outcome.predict_seconds * 1e3 / outcome.scores.len() as f64,
                );
            }
            score_store.insert(run_id.clone(), (outcome.scores, outcome.labels));
        }
        results.push((
            outcome.ranker_idx,
            outcome.classifier_idx,
            outcome.top_k,
            GridResult {
                run_id,
                ranker: outcome.ranker,
                classifier: outcome.classifier,
                top_k: outcome.top_k,
                selected_features: outcome.selected_features,
                report,
                error,
            },
        ));
    }

    // F1 descending, failures last, ties by run identity.
    results.sort_by(|a, b| {
        let f1 = |r: &GridResult| r.report.as_ref().map(|m| m.overall.f1.value);
        match (f1(&a.3), f1(&b.3)) {
            (Some(x), Some(y)) => y
                .partial_cmp(&x)
                .unwrap()
                .then((a.0, a.1, a.2).cmp(&(b.0, b.1, b.2))),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)),
        }
    });
    let results: Vec<GridResult> = results.into_iter().map(|(_, _, _, r)| r).collect();

    let mut roc_curves = BTreeMap::new();
    for result in results.iter().take(cfg.keep_roc) {
        if let Some((scores, labels)) = score_store.get(&result.run_id) {
            if let Ok(curve) = roc_curve_auc(scores, labels) {
                roc_curves.insert(result.run_id.clone(), curve);
            }
        }
    }

    Ok(GridOutput {
        results,
        fold_plan: plan,
        audit: audit.into_report(),
        roc_curves,
        timings_ms,
    })
}

fn run_group(
    table: &FeatureTable,
    cfg: &GridConfig,
    contexts: &[FoldContext],
    audit: &Audit,
    ri: usize,
    k: usize,
) -> Vec<RunOutcome> {
    let n_classifiers = cfg.classifiers.len();
    let mut outcomes: Vec<RunOutcome> = cfg
        .classifiers
        .iter()
        .enumerate()
        .map(|(ci, c)| RunOutcome {
            ranker_idx: ri,
            classifier_idx: ci,
            top_k: k,
            ranker: cfg.rankers[ri].name().to_string(),
            classifier: c.name(),
            selected_features: Vec::new(),
            scores: Vec::new(),
            labels: Vec::new(),
            predict_seconds: 0.0,
            error: None,
        })
        .collect();

    for (f, ctx) in contexts.iter().enumerate() {
        let ranking = &ctx.rankings[ri];
        let cols: Vec<usize> = ranking[..k.min(ranking.len())].to_vec();
        if f == 0 {
            let names: Vec<String> = cols.iter().map(|&j| table.names[j].clone()).collect();
            for o in &mut outcomes {
                o.selected_features = names.clone();
            }
        }

        let test_x = table.x.select_rows(&ctx.test).select_cols(&cols);
        let test_y = select_labels(&table.y, &ctx.test);

        let (train_x, train_y) = match &ctx.presmoted {
            Some((xs, ys, retained)) => {
                let positions: Vec<usize> = cols
                    .iter()
                    .map(|cat| retained.iter().position(|r| r == cat).unwrap())
                    .collect();
                (xs.select_cols(&positions), ys.clone())
            }
            None => {
                audit.check("smote", f, &ctx.train, &ctx.test);
                let base = table.x.select_rows(&ctx.train).select_cols(&cols);
                let y = select_labels(&table.y, &ctx.train);
                match smote_oversample(
                    &base,
                    &y,
                    cfg.smote_neighbors,
                    derive_seed(cfg.seed, &[tag::SMOTE, ri as u64, k as u64, f as u64]),
                ) {
                    Ok(pair) => pair,
                    Err(e) => {
                        for o in &mut outcomes {
                            o.error = Some(format!("fold {f}: SMOTE failed: {e}"));
                        }
                        return outcomes;
                    }
                }
            }
        };

        let validation = if cfg.use_validation && !ctx.validation.is_empty() {
            Some((
                table.x.select_rows(&ctx.validation).select_cols(&cols),
                select_labels(&table.y, &ctx.validation),
            ))
        } else {
            None
        };

        for ci in 0..n_classifiers {
            if outcomes[ci].error.is_some() {
                continue;
            }
            match &cfg.classifiers[ci] {
                GridClassifier::Native(spec) => {
                    let seeded = spec.clone().with_seed(derive_seed(
                        cfg.seed,
                        &[tag::CLASSIFIER, ri as u64, ci as u64, k as u64, f as u64],
                    ));
                    audit.check("fit", f, &ctx.train, &ctx.test);
                    let fitted = fit_with_validation(
                        &seeded,
                        &train_x,
                        &train_y,
                        validation.as_ref().map(|(vx, vy)| (vx, vy.as_slice())),
                    );
                    match fitted {
                        Ok(model) => {
                            let start = std::time::Instant::now();
                            match model.predict_scores(&test_x) {
                                Ok(scores) => {
                                    outcomes[ci].predict_seconds +=
                                        start.elapsed().as_secs_f64();
                                    outcomes[ci].scores.extend_from_slice(&scores);
                                    outcomes[ci].labels.extend_from_slice(&test_y);
                                }
                                Err(e) => {
                                    outcomes[ci].error =
                                        Some(format!("fold {f}: predict failed: {e}"))
                                }
                            }
                        }
                        Err(e) => {
                            outcomes[ci].error = Some(format!("fold {f}: fit failed: {e}"))
                        }
                    }
                }
                GridClassifier::External { external } => {
                    let Some(set) = cfg.external_scores.get(external) else {
                        outcomes[ci].error =
                            Some(format!("no score file provided for external:{external}"));
                        continue;
                    };
                    for (pos, &sample) in ctx.test.iter().enumerate() {
                        let id = &table.sample_ids[sample];
                        match set.score(id, f) {
                            Some(s) => {
                                outcomes[ci].scores.push(s);
                                outcomes[ci].labels.push(test_y[pos]);
                            }
                            None => {
                                outcomes[ci].error = Some(format!(
                                    "external:{external} missing score for {} {} fold {f}",
                                    id.subject_id,
                                    id.foot_side.as_str()
                                ));
                                break;
                            }
                        }
                    }
                }
            }
        }
    }
    outcomes
}

fn summarize(outcome: &RunOutcome) -> Result<MetricsReport> {
    let predictions: Vec<u8> = outcome
        .scores
        .iter()
        .map(|&s| u8::from(s >= 0.5))
        .collect();
    let counts = ConfusionCounts::from_predictions(&outcome.labels, &predictions)?;
    let mut report = compute_metrics(&counts)?;
    report.auc = Some(roc_curve_auc(&outcome.scores, &outcome.labels)?.auc);
    if outcome.predict_seconds > 0.0 && !outcome.scores.is_empty() {
        report.inference_ms =
            Some(outcome.predict_seconds * 1e3 / outcome.scores.len() as f64);
    }
    Ok(report)
}

/// Presentation ranking over the full dataset, mirroring published
/// global correlation and importance figures. The cross-validated grid
/// never consumes this; it exists for reports only.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RankingReport {
    pub ranker: String,
    /// `(feature name, importance)`, best first.
    pub features: Vec<(String, f64)>,
}

pub fn ranking_report(
    table: &FeatureTable,
    rankers: &[RankerKind],
    prune_threshold: f64,
    seed: u64,
) -> Result<Vec<RankingReport>> {
    let catalog = correlation_prune(&table.x, &table.names, prune_threshold)?;
    let retained = catalog.retained_indices();
    let x = table.x.select_cols(&retained);
    let mut reports = Vec::with_capacity(rankers.len());
    for (ri, ranker) in rankers.iter().enumerate() {
        let imp = ranking_importances(
            *ranker,
            &x,
            &table.y,
            derive_seed(seed, &[tag::RANKER, 0xffff, ri as u64]),
        )?;
        let mut order: Vec<usize> = (0..imp.len()).collect();
        order.sort_by(|&a, &b| imp[b].partial_cmp(&imp[a]).unwrap().then(a.cmp(&b)));
        reports.push(RankingReport {
            ranker: ranker.name().to_string(),
            features: order
                .into_iter()
                .map(|j| (table.names[retained[j]].clone(), imp[j]))
                .collect(),
        });
    }
    Ok(reports)
}

/// Median wall-clock milliseconds per sample for scoring `x`, warm-up
/// excluded.
pub fn time_inference(
    model: &crate::learn::TrainedModel,
    x: &Matrix,
    repetitions: usize,
) -> Result<f64> {
    if repetitions == 0 {
        return Err(Error::Config("repetitions must be at least 1".into()));
    }
    if x.rows() == 0 {
        return Err(Error::InsufficientData("no samples to time".into()));
    }
    model.predict_scores(x)?; // surface shape errors before timing
    Ok(crate::eval::metrics::time_per_sample_ms(
        x.rows(),
        repetitions,
        || {
            let _ = std::hint::black_box(model.predict_scores(x));
        },
    ))
}

/// Serializable grid archive: everything `report` rendering needs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridArchive {
    pub catalog_version: String,
    pub config: GridConfigEcho,
    pub results: Vec<GridResult>,
    pub rankings: Vec<RankingReport>,
    pub roc_curves: BTreeMap<String, RocCurve>,
    pub fold_plan: FoldPlan,
    pub audit: AuditReport,
}

/// One row per result: identity, metrics with CI half-widths, AUC.
pub fn grid_results_csv(results: &[GridResult]) -> String {
    let mut out = String::from(
        "run_id,ranker,classifier,top_k,status,accuracy,accuracy_ci,precision,precision_ci,\
         sensitivity,sensitivity_ci,specificity,specificity_ci,f1,f1_ci,auc,selected_features\n",
    );
    for r in results {
        match &r.report {
            Some(m) => {
                let o = &m.overall;
                out.push_str(&format!(
                    "{},{},{},{},ok,{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{}\n",
                    r.run_id,
                    r.ranker,
                    r.classifier,
                    r.top_k,
                    o.accuracy.value,
                    o.accuracy.ci,
                    o.precision.value,
                    o.precision.ci,
                    o.sensitivity.value,
                    o.sensitivity.ci,
                    o.specificity.value,
                    o.specificity.ci,
                    o.f1.value,
                    o.f1.ci,
                    m.auc.unwrap_or(0.0),
                    r.selected_features.join("|"),
                ));
            }
            None => {
                out.push_str(&format!(
                    "{},{},{},{},error: {},,,,,,,,,,,,{}\n",
                    r.run_id,
                    r.ranker,
                    r.classifier,
                    r.top_k,
                    r.error.as_deref().unwrap_or("unknown").replace(',', ";"),
                    r.selected_features.join("|"),
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synthesize_dataset;
    use crate::features::{feature_matrix, FeatureConfig};

    fn small_table(seed: u64) -> FeatureTable {
        let subjects = synthesize_dataset(8, 12, 2.5, seed).unwrap();
        feature_matrix(&subjects, &FeatureConfig::default()).unwrap()
    }

    fn tiny_config(seed: u64) -> GridConfig {
        GridConfig {
            rankers: vec![RankerKind::RandomForest],
            classifiers: vec![
                GridClassifier::Native(
                    ClassifierSpec::new(ClassifierKind::lda(), 0).unwrap(),
                ),
                GridClassifier::Native(
                    ClassifierSpec::new(ClassifierKind::knn(), 0).unwrap(),
                ),
            ],
            k_max: 2,
            folds: 5,
            seed,
            prune_threshold: 0.95,
            smote_neighbors: 5,
            global_prune: false,
            smote_before_rank: false,
            use_validation: false,
            keep_roc: 3,
            external_scores: BTreeMap::new(),
        }
    }

    #[test]
    fn unit_grid_yields_one_result() {
        let table = small_table(5);
        let mut cfg = tiny_config(5);
        cfg.classifiers.truncate(1);
        cfg.k_max = 1;
        let out = run_grid(&table, &cfg).unwrap();
        assert_eq!(out.results.len(), 1);
        assert!(out.results[0].report.is_some());
        assert!(out.audit.violations.is_empty());
        assert!(out.audit.checks > 0);
    }

    #[test]
    fn cardinality_is_rankers_times_classifiers_times_k() {
        let table = small_table(6);
        let mut cfg = tiny_config(6);
        cfg.k_max = 3;
        cfg.classifiers.push(GridClassifier::External {
            external: "mlp".into(),
        });
        let out = run_grid(&table, &cfg).unwrap();
        assert_eq!(out.results.len(), 1 * 3 * 3);
        // External stub without a score file fails but still yields rows.
        let stub_rows: Vec<_> = out
            .results
            .iter()
            .filter(|r| r.classifier == "external:mlp")
            .collect();
        assert_eq!(stub_rows.len(), 3);
        assert!(stub_rows.iter().all(|r| r.error.is_some()));
    }

    #[test]
    fn results_sort_by_f1_with_failures_last() {
        let table = small_table(7);
        let mut cfg = tiny_config(7);
        cfg.classifiers.push(GridClassifier::External {
            external: "svm".into(),
        });
        let out = run_grid(&table, &cfg).unwrap();
        let mut seen_failure = false;
        let mut last_f1 = f64::INFINITY;
        for r in &out.results {
            match &r.report {
                Some(m) => {
                    assert!(!seen_failure, "ok row after a failed row");
                    assert!(m.overall.f1.value <= last_f1 + 1e-12);
                    last_f1 = m.overall.f1.value;
                }
                None => seen_failure = true,
            }
        }
    }

    #[test]
    fn grid_is_deterministic() {
        let table = small_table(8);
        let cfg = tiny_config(8);
        let a = run_grid(&table, &cfg).unwrap();
        let b = run_grid(&table, &cfg).unwrap();
        let ja = serde_json::to_string(&a.results).unwrap();
        let jb = serde_json::to_string(&b.results).unwrap();
        assert_eq!(ja, jb);
    }

    #[test]
    fn compat_flags_run_clean() {
        let table = small_table(9);
        let mut cfg = tiny_config(9);
        cfg.global_prune = true;
        cfg.smote_before_rank = true;
        cfg.use_validation = true;
        cfg.classifiers = vec![GridClassifier::Native(
            ClassifierSpec::new(ClassifierKind::adaboost(), 0).unwrap(),
        )];
        let out = run_grid(&table, &cfg).unwrap();
        assert!(out.results[0].report.is_some());
        assert!(!out.audit.notes.is_empty());
    }

    #[test]
    fn ranking_report_covers_retained_features() {
        let table = small_table(10);
        let reports = ranking_report(&table, &RankerKind::all(), 0.95, 1).unwrap();
        assert_eq!(reports.len(), 3);
        for r in &reports {
            assert!(!r.features.is_empty());
            // Importances are sorted descending.
            for w in r.features.windows(2) {
                assert!(w[0].1 >= w[1].1);
            }
        }
    }
}
