//! `ingest` and `synth`.

use std::path::{Path, PathBuf};

use serde::Serialize;
use thermofoot::data::{
    class_counts, load_dataset_with, save_dataset, synthesize_with, GroupLabel, SubjectRecord,
    SynthesisConfig,
};
use thermofoot::error::Result;

use crate::config::RunConfig;

use super::{ensure_dir, write_json, write_sidecar};

#[derive(Serialize)]
struct IngestReport {
    subjects: usize,
    feet: usize,
    control_subjects: usize,
    diabetic_subjects: usize,
    single_foot_subjects: Vec<String>,
    min_temperature: f64,
    max_temperature: f64,
}

fn build_report(records: &[SubjectRecord]) -> IngestReport {
    let (cg, dm) = class_counts(records);
    let mut min_t = f64::INFINITY;
    let mut max_t = f64::NEG_INFINITY;
    let mut feet = 0usize;
    for s in records {
        for f in &s.feet {
            feet += 1;
            for (_, _, v) in f.foot_map.foreground() {
                min_t = min_t.min(v);
                max_t = max_t.max(v);
            }
        }
    }
    IngestReport {
        subjects: records.len(),
        feet,
        control_subjects: cg,
        diabetic_subjects: dm,
        single_foot_subjects: records
            .iter()
            .filter(|s| s.single_foot())
            .map(|s| s.subject_id.clone())
            .collect(),
        min_temperature: min_t,
        max_temperature: max_t,
    }
}

pub fn ingest(config: &RunConfig, manifest: &Path, out: Option<&Path>) -> Result<()> {
    let started = std::time::Instant::now();
    let records = load_dataset_with(manifest, config.layout())?;
    let report = build_report(&records);
    match out {
        Some(dir) => {
            ensure_dir(dir)?;
            write_json(&dir.join("ingest_report.json"), &report)?;
            save_dataset(&records, &dir.join("normalized"))?;
            write_sidecar(dir, "ingest", started, serde_json::json!({}))?;
        }
        None => {
            // Tolerate a closed pipe (e.g. piping into `head`).
            use std::io::Write;
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| thermofoot::Error::Runtime(e.to_string()))?;
            let _ = writeln!(std::io::stdout(), "{text}");
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn synth(
    config: &RunConfig,
    out: &PathBuf,
    cg: Option<usize>,
    dm: Option<usize>,
    sep: Option<f64>,
    seed: Option<u64>,
    rows: Option<usize>,
    cols: Option<usize>,
) -> Result<()> {
    let started = std::time::Instant::now();
    let seed = super::effective_seed(config, seed);
    let section = config.synthesis.clone();
    let mut synth_cfg = SynthesisConfig::new(
        cg.or(section.as_ref().map(|s| s.n_cg)).unwrap_or(45),
        dm.or(section.as_ref().map(|s| s.n_dm)).unwrap_or(122),
        sep.or(section.as_ref().map(|s| s.separation)).unwrap_or(3.0),
        seed,
    );
    if let Some(r) = rows.or(section.as_ref().and_then(|s| s.rows)) {
        synth_cfg.rows = r;
    }
    if let Some(c) = cols.or(section.as_ref().and_then(|s| s.cols)) {
        synth_cfg.cols = c;
    }
    let records = synthesize_with(&synth_cfg)?;
    ensure_dir(out)?;
    save_dataset(&records, out)?;
    let dm_feet: usize = records
        .iter()
        .filter(|s| s.group_label == GroupLabel::Dm)
        .map(|s| s.feet.len())
        .sum();
    write_sidecar(
        out,
        "synth",
        started,
        serde_json::json!({
            "subjects": records.len(),
            "diabetic_feet": dm_feet,
            "seed": seed,
        }),
    )?;
    println!(
        "wrote {} subjects to {}",
        records.len(),
        out.join("manifest.json").display()
    );
    Ok(())
}
