//! Run configuration: a JSON file of defaults that command-line flags
//! override. Exactly one of `manifest` or `synthesis` names the
//! dataset.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thermofoot::data::{load_dataset_with, synthesize_with, AngiosomeLayout, SubjectRecord,
    SynthesisConfig};
use thermofoot::error::{Error, Result};
use thermofoot::eval::{ExternalScoreSet, GridClassifier, GridConfig};
use thermofoot::features::{FeatureConfig, NtrConfig, ReferencePattern};
use thermofoot::learn::RankerKind;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub manifest: Option<PathBuf>,
    #[serde(default)]
    pub synthesis: Option<SynthesisSection>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub ntr: Option<NtrConfig>,
    #[serde(default)]
    pub reference: Option<ReferencePattern>,
    #[serde(default)]
    pub heel_fraction: Option<f64>,
    #[serde(default)]
    pub rankers: Option<Vec<String>>,
    #[serde(default)]
    pub classifiers: Option<Vec<String>>,
    #[serde(default)]
    pub k_max: Option<usize>,
    #[serde(default)]
    pub folds: Option<usize>,
    #[serde(default)]
    pub prune_threshold: Option<f64>,
    #[serde(default)]
    pub smote_neighbors: Option<usize>,
    #[serde(default)]
    pub global_prune: Option<bool>,
    #[serde(default)]
    pub smote_before_rank: Option<bool>,
    #[serde(default)]
    pub use_validation: Option<bool>,
    #[serde(default)]
    pub keep_roc: Option<usize>,
    /// External classifier name -> score CSV path.
    #[serde(default)]
    pub external_scores: BTreeMap<String, PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SynthesisSection {
    pub n_cg: usize,
    pub n_dm: usize,
    #[serde(default)]
    pub separation: f64,
    #[serde(default)]
    pub rows: Option<usize>,
    #[serde(default)]
    pub cols: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("config {}: {e}", path.display())))
    }

    pub fn load_or_default(path: Option<&PathBuf>) -> Result<RunConfig> {
        match path {
            Some(p) => Self::load(p),
            None => Ok(RunConfig::default()),
        }
    }

    pub fn feature_config(&self) -> Result<FeatureConfig> {
        let cfg = FeatureConfig {
            ntr: self.ntr.clone().unwrap_or_default(),
            reference: self.reference.unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn layout(&self) -> AngiosomeLayout {
        match self.heel_fraction {
            Some(h) => AngiosomeLayout { heel_fraction: h },
            None => AngiosomeLayout::default(),
        }
    }

    /// Loads or synthesizes the dataset. Exactly one source must be
    /// configured.
    pub fn resolve_dataset(&self, seed: u64) -> Result<Vec<SubjectRecord>> {
        match (&self.manifest, &self.synthesis) {
            (Some(path), None) => load_dataset_with(path, self.layout()),
            (None, Some(synth)) => {
                let mut cfg = SynthesisConfig::new(synth.n_cg, synth.n_dm, synth.separation, seed);
                if let Some(r) = synth.rows {
                    cfg.rows = r;
                }
                if let Some(c) = synth.cols {
                    cfg.cols = c;
                }
                synthesize_with(&cfg)
            }
            (None, None) => Err(Error::Config(
                "no dataset: provide --manifest or synthesis parameters".into(),
            )),
            (Some(_), Some(_)) => Err(Error::Config(
                "both manifest and synthesis configured; pick exactly one".into(),
            )),
        }
    }

    pub fn grid_config(&self, seed: u64) -> Result<GridConfig> {
        let mut cfg = GridConfig::paper_defaults(seed);
        if let Some(rankers) = &self.rankers {
            cfg.rankers = rankers
                .iter()
                .map(|r| RankerKind::from_name(r))
                .collect::<Result<Vec<_>>>()?;
        }
        if let Some(classifiers) = &self.classifiers {
            cfg.classifiers = classifiers
                .iter()
                .map(|c| GridClassifier::parse(c))
                .collect::<Result<Vec<_>>>()?;
        }
        if let Some(k) = self.k_max {
            cfg.k_max = k;
        }
        if let Some(f) = self.folds {
            cfg.folds = f;
        }
        if let Some(t) = self.prune_threshold {
            cfg.prune_threshold = t;
        }
        if let Some(n) = self.smote_neighbors {
            cfg.smote_neighbors = n;
        }
        cfg.global_prune = self.global_prune.unwrap_or(cfg.global_prune);
        cfg.smote_before_rank = self.smote_before_rank.unwrap_or(cfg.smote_before_rank);
        cfg.use_validation = self.use_validation.unwrap_or(cfg.use_validation);
        if let Some(n) = self.keep_roc {
            cfg.keep_roc = n;
        }
        for (name, path) in &self.external_scores {
            cfg.external_scores
                .insert(name.clone(), ExternalScoreSet::load(path)?);
        }
        Ok(cfg)
    }
}
