//! Plantar-thermogram analytics: dataset handling, angiosome feature
//! extraction, classical learners, and a cross-validated model search.
//!
//! The crate follows the screening pipeline end to end:
//!
//! - [`data`] — temperature grids, dataset manifests, the geometric
//!   angiosome split, and a seeded synthetic generator.
//! - [`features`] — the versioned 39-slot feature catalog (histogram
//!   temperature estimates, hot-spot gaps, thermal change index,
//!   normalized temperature ranges, summary statistics) and
//!   correlation pruning.
//! - [`stats`] — chi-square and rank-sum tests plus grouped descriptive
//!   summaries for cohort tables.
//! - [`learn`] — from-scratch CART, random forest, extra trees,
//!   AdaBoost, gradient boosting, KNN, logistic regression, and LDA,
//!   all seeded and serializable.
//! - [`eval`] — stratified fold plans, SMOTE, confusion metrics with
//!   binomial confidence intervals, ROC/AUC, inference timing, and the
//!   ranker × classifier × top-k grid search with a leakage audit.
//! - [`enhance`] — grayscale quantization, histogram equalization,
//!   contrast-limited adaptive equalization, and gamma correction.
//! - [`plot`] — static SVG rendering for ROC curves and feature
//!   rankings.
//!
//! Every random decision derives from one root seed (see [`seed`]), so
//! identical inputs produce identical outputs byte for byte.

pub mod data;
pub mod enhance;
pub mod error;
pub mod eval;
pub mod features;
pub mod learn;
pub mod matrix;
pub mod plot;
pub mod seed;
pub mod stats;

pub use error::{Error, ErrorCategory, Result};
pub use matrix::Matrix;
