//! Evaluation protocol: stratified folds, SMOTE, metrics with
//! confidence intervals, ROC/AUC, inference timing, and the grid
//! search.

mod external;
mod folds;
mod grid;
mod metrics;
mod roc;
mod smote;

pub use external::{write_external_scores, ExternalScoreSet};
pub use folds::{stratified_kfold, Fold, FoldPlan};
pub use grid::{
    grid_results_csv, ranking_report, run_grid, time_inference, AuditReport, GridArchive,
    GridClassifier, GridConfig, GridConfigEcho, GridOutput, GridResult, RankingReport,
};
pub use metrics::{
    compute_metrics, confidence_interval, time_per_sample_ms, ClassMetrics, ConfusionCounts,
    MetricValue, MetricsReport,
};
pub use roc::{roc_curve_auc, RocCurve};
pub use smote::smote_oversample;
