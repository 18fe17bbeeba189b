//! `grid` and `report`.

use std::fs;
use std::path::Path;

use thermofoot::error::{Error, Result};
use thermofoot::eval::{
    grid_results_csv, ranking_report, run_grid, ExternalScoreSet, GridArchive, GridClassifier,
    GridConfigEcho,
};
use thermofoot::features::feature_matrix;
use thermofoot::learn::RankerKind;
use thermofoot::plot::{bar_chart_svg, roc_svg};

use crate::config::RunConfig;
use crate::DatasetArgs;

use super::{ensure_dir, resolve_dataset, write_json, write_sidecar, write_text};

pub struct GridFlags {
    pub seed: Option<u64>,
    pub rankers: Option<String>,
    pub classifiers: Option<String>,
    pub kmax: Option<usize>,
    pub folds: Option<usize>,
    pub global_prune: bool,
    pub smote_before_rank: bool,
    pub use_validation: bool,
    pub external: Vec<String>,
    pub keep_roc: Option<usize>,
}

pub fn grid(
    config: &RunConfig,
    dataset: &DatasetArgs,
    out: &Path,
    flags: GridFlags,
) -> Result<()> {
    let started = std::time::Instant::now();
    let seed = super::effective_seed(config, flags.seed);
    let records = resolve_dataset(config, dataset, seed)?;
    let table = feature_matrix(&records, &config.feature_config()?)?;

    let mut grid_cfg = config.grid_config(seed)?;
    if let Some(rankers) = &flags.rankers {
        grid_cfg.rankers = rankers
            .split(',')
            .map(RankerKind::from_name)
            .collect::<Result<Vec<_>>>()?;
    }
    if let Some(classifiers) = &flags.classifiers {
        grid_cfg.classifiers = classifiers
            .split(',')
            .map(GridClassifier::parse)
            .collect::<Result<Vec<_>>>()?;
    }
    if let Some(k) = flags.kmax {
        grid_cfg.k_max = k;
    }
    if let Some(f) = flags.folds {
        grid_cfg.folds = f;
    }
    grid_cfg.global_prune |= flags.global_prune;
    grid_cfg.smote_before_rank |= flags.smote_before_rank;
    grid_cfg.use_validation |= flags.use_validation;
    if let Some(n) = flags.keep_roc {
        grid_cfg.keep_roc = n;
    }
    for pair in &flags.external {
        let (name, path) = pair.split_once('=').ok_or_else(|| {
            Error::Config(format!("--external expects name=path, got {pair:?}"))
        })?;
        grid_cfg
            .external_scores
            .insert(name.to_string(), ExternalScoreSet::load(Path::new(path))?);
    }

    let output = run_grid(&table, &grid_cfg)?;
    let rankings = ranking_report(&table, &grid_cfg.rankers, grid_cfg.prune_threshold, seed)?;

    ensure_dir(out)?;
    write_text(&out.join("grid.csv"), &grid_results_csv(&output.results))?;
    let archive = GridArchive {
        catalog_version: table.catalog_version.clone(),
        config: GridConfigEcho::from(&grid_cfg),
        results: output.results.clone(),
        rankings,
        roc_curves: output.roc_curves.clone(),
        fold_plan: output.fold_plan.clone(),
        audit: output.audit.clone(),
    };
    write_json(&out.join("grid.json"), &archive)?;
    write_json(&out.join("foldplan.json"), &output.fold_plan)?;
    write_sidecar(
        out,
        "grid",
        started,
        serde_json::json!({
            "runs": output.results.len(),
            "audit_checks": output.audit.checks,
            "audit_violations": output.audit.violations.len(),
            "inference_ms_per_sample": output.timings_ms,
        }),
    )?;

    if !output.audit.violations.is_empty() {
        return Err(Error::Runtime(format!(
            "leakage audit recorded {} violation(s)",
            output.audit.violations.len()
        )));
    }
    match output.results.iter().find(|r| r.report.is_some()) {
        Some(best) => {
            let m = best.report.as_ref().unwrap();
            println!(
                "{} runs; best {} + {} ranking, top {} features: F1 {:.4} ± {:.4}, AUC {:.4}",
                output.results.len(),
                best.classifier,
                best.ranker,
                best.top_k,
                m.overall.f1.value,
                m.overall.f1.ci,
                m.auc.unwrap_or(0.0),
            );
        }
        None => println!("{} runs; none succeeded", output.results.len()),
    }
    Ok(())
}

pub fn report(archive_path: &Path, out: &Path, top: usize) -> Result<()> {
    let started = std::time::Instant::now();
    let text = fs::read_to_string(archive_path).map_err(|e| Error::MissingFile {
        path: archive_path.to_path_buf(),
        source: e,
    })?;
    let archive: GridArchive = serde_json::from_str(&text)
        .map_err(|e| Error::Validation(format!("archive parse failed: {e}")))?;

    ensure_dir(out)?;
    // ROC curves in result order (the archive stores the top runs).
    let mut curves = Vec::new();
    for result in &archive.results {
        if let Some(curve) = archive.roc_curves.get(&result.run_id) {
            curves.push((
                format!(
                    "{} + {} (k={})",
                    result.classifier, result.ranker, result.top_k
                ),
                curve,
            ));
        }
    }
    if !curves.is_empty() {
        write_text(
            &out.join("roc_top.svg"),
            &roc_svg(&curves, "ROC of the top grid runs"),
        )?;
    }
    for ranking in &archive.rankings {
        let items: Vec<(String, f64)> = ranking.features.iter().take(top).cloned().collect();
        write_text(
            &out.join(format!("features_{}.svg", ranking.ranker)),
            &bar_chart_svg(
                &items,
                &format!("Top {} features by {} importance", items.len(), ranking.ranker),
            ),
        )?;
    }
    write_sidecar(
        out,
        "report",
        started,
        serde_json::json!({ "curves": curves.len(), "rankings": archive.rankings.len() }),
    )?;
    println!(
        "rendered {} ROC curve(s) and {} ranking chart(s)",
        curves.len(),
        archive.rankings.len()
    );
    Ok(())
}
