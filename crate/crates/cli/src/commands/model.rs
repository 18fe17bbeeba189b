//! `train` and `evaluate`.

use std::fs;
use std::path::Path;

use thermofoot::error::{Error, Result};
use thermofoot::eval::{
    compute_metrics, roc_curve_auc, smote_oversample, time_inference, ConfusionCounts,
};
use thermofoot::features::feature_matrix;
use thermofoot::learn::{fit, rank_features, ClassifierKind, ClassifierSpec, RankerKind,
    TrainedModel};
use thermofoot::seed::{derive_seed, tag};

use crate::config::RunConfig;
use crate::DatasetArgs;

use super::{ensure_dir, resolve_dataset, write_json, write_sidecar, write_text};

#[allow(clippy::too_many_arguments)]
pub fn train(
    config: &RunConfig,
    dataset: &DatasetArgs,
    out: &Path,
    classifier: &str,
    seed: Option<u64>,
    ranker: Option<&str>,
    top_k: Option<usize>,
    smote: bool,
) -> Result<()> {
    let started = std::time::Instant::now();
    let seed = super::effective_seed(config, seed);
    let records = resolve_dataset(config, dataset, seed)?;
    let table = feature_matrix(&records, &config.feature_config()?)?;

    let (x, names) = match (ranker, top_k) {
        (Some(ranker), Some(k)) => {
            let ranker = RankerKind::from_name(ranker)?;
            let order = rank_features(
                ranker,
                &table.x,
                &table.y,
                derive_seed(seed, &[tag::RANKER, 0]),
            )?;
            let cols: Vec<usize> = order[..k.min(order.len())].to_vec();
            let names: Vec<String> = cols.iter().map(|&j| table.names[j].clone()).collect();
            (table.x.select_cols(&cols), names)
        }
        (None, None) => (table.x.clone(), table.names.clone()),
        _ => {
            return Err(Error::Config(
                "--ranker and --top-k go together".into(),
            ))
        }
    };

    let (x, y) = if smote {
        smote_oversample(
            &x,
            &table.y,
            config.smote_neighbors.unwrap_or(5),
            derive_seed(seed, &[tag::SMOTE, 0]),
        )?
    } else {
        (x, table.y.clone())
    };

    let spec = ClassifierSpec::new(
        ClassifierKind::from_name(classifier)?,
        derive_seed(seed, &[tag::CLASSIFIER, 0]),
    )?;
    let model = fit(&spec, &x, &y)?.with_feature_names(names);

    ensure_dir(out)?;
    write_text(&out.join("model.json"), &model.to_json()?)?;
    write_sidecar(
        out,
        "train",
        started,
        serde_json::json!({ "classifier": classifier, "samples": x.rows() }),
    )?;
    println!(
        "fitted {} on {} samples × {} features",
        classifier,
        x.rows(),
        x.cols()
    );
    Ok(())
}

pub fn evaluate(
    config: &RunConfig,
    dataset: &DatasetArgs,
    model_path: &Path,
    out: &Path,
    seed: Option<u64>,
    repetitions: usize,
) -> Result<()> {
    let started = std::time::Instant::now();
    let seed = super::effective_seed(config, seed);
    let records = resolve_dataset(config, dataset, seed)?;
    let table = feature_matrix(&records, &config.feature_config()?)?;

    let text = fs::read_to_string(model_path).map_err(|e| Error::MissingFile {
        path: model_path.to_path_buf(),
        source: e,
    })?;
    let model = TrainedModel::from_json(&text)?;

    let x = if model.feature_names.is_empty() {
        table.x.clone()
    } else {
        let cols: Vec<usize> = model
            .feature_names
            .iter()
            .map(|name| {
                table.names.iter().position(|n| n == name).ok_or_else(|| {
                    Error::Validation(format!("model feature {name:?} not in the catalog"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        table.x.select_cols(&cols)
    };

    let scores = model.predict_scores(&x)?;
    let predictions: Vec<u8> = scores.iter().map(|&s| u8::from(s >= 0.5)).collect();
    let counts = ConfusionCounts::from_predictions(&table.y, &predictions)?;
    let mut report = compute_metrics(&counts)?;
    let roc = roc_curve_auc(&scores, &table.y)?;
    report.auc = Some(roc.auc);

    ensure_dir(out)?;
    write_json(&out.join("metrics.json"), &report)?;
    let mut roc_csv = String::from("fpr,tpr\n");
    for (fpr, tpr) in &roc.points {
        roc_csv.push_str(&format!("{fpr},{tpr}\n"));
    }
    write_text(&out.join("roc.csv"), &roc_csv)?;

    let per_sample_ms = time_inference(&model, &x, repetitions)?;
    write_sidecar(
        out,
        "evaluate",
        started,
        serde_json::json!({ "inference_ms_per_sample": per_sample_ms }),
    )?;
    println!(
        "accuracy {:.4}, F1 {:.4}, AUC {:.4} over {} samples ({:.3} ms/sample)",
        report.overall.accuracy.value,
        report.overall.f1.value,
        roc.auc,
        table.y.len(),
        per_sample_ms
    );
    Ok(())
}
