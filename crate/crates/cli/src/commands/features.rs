//! `features` and `stats`.

use std::path::Path;

use serde::Serialize;
use thermofoot::data::Gender;
use thermofoot::error::{Error, Result};
use thermofoot::features::{
    correlation_prune, feature_matrix, write_feature_csv, FeatureCatalog, FeatureTable,
};
use thermofoot::stats::{
    chi_square_2x2, descriptive_summary, rank_sum_test, ContingencyTable2x2, DescriptiveSummary,
};

use crate::config::RunConfig;
use crate::DatasetArgs;

use super::{ensure_dir, resolve_dataset, write_json, write_sidecar, write_text};

#[derive(Serialize)]
struct CatalogReport<'a> {
    catalog_version: &'a str,
    ntr_boundaries: [f64; 6],
    reference: thermofoot::features::ReferencePattern,
    retained_names: Vec<String>,
    dropped_names: Vec<String>,
    catalog: &'a FeatureCatalog,
}

pub fn features(
    config: &RunConfig,
    dataset: &DatasetArgs,
    out: &Path,
    seed: Option<u64>,
    threshold: Option<f64>,
) -> Result<()> {
    let started = std::time::Instant::now();
    let seed = super::effective_seed(config, seed);
    let records = resolve_dataset(config, dataset, seed)?;
    let feature_cfg = config.feature_config()?;
    let table = feature_matrix(&records, &feature_cfg)?;

    ensure_dir(out)?;
    write_feature_csv(&table, &out.join("features.csv"))?;

    let threshold = threshold.or(config.prune_threshold).unwrap_or(0.95);
    let catalog = correlation_prune(&table.x, &table.names, threshold)?;
    let dropped = catalog
        .names
        .iter()
        .zip(catalog.retained.iter())
        .filter(|(_, &kept)| !kept)
        .map(|(n, _)| n.clone())
        .collect();
    write_json(
        &out.join("catalog.json"),
        &CatalogReport {
            catalog_version: &catalog.version,
            ntr_boundaries: feature_cfg.ntr.boundaries,
            reference: feature_cfg.reference,
            retained_names: catalog.retained_names(),
            dropped_names: dropped,
            catalog: &catalog,
        },
    )?;
    write_sidecar(
        out,
        "features",
        started,
        serde_json::json!({
            "rows": table.x.rows(),
            "retained": catalog.retained_indices().len(),
        }),
    )?;
    println!(
        "{} feet, {} features, {} retained after pruning at {threshold}",
        table.x.rows(),
        table.names.len(),
        catalog.retained_indices().len()
    );
    Ok(())
}

#[derive(Serialize)]
struct GenderRow {
    control_male: u64,
    control_female: u64,
    diabetic_male: u64,
    diabetic_female: u64,
    statistic: f64,
    p_value: f64,
}

#[derive(Serialize)]
struct CohortRow {
    item: String,
    method: &'static str,
    statistic: f64,
    p_value: f64,
    control: DescriptiveSummary,
    diabetic: DescriptiveSummary,
    pooled: DescriptiveSummary,
}

#[derive(Serialize)]
struct CohortReport {
    /// Counts are per foot; each subject contributes one row per foot.
    gender: GenderRow,
    rows: Vec<CohortRow>,
}

fn cohort_rows(table: &FeatureTable, items: &[(&str, &str)]) -> Result<Vec<CohortRow>> {
    let mut rows = Vec::new();
    for (label, feature) in items {
        let j = table
            .names
            .iter()
            .position(|n| n == feature)
            .ok_or_else(|| Error::Runtime(format!("feature {feature} missing")))?;
        let col = table.x.column(j);
        let control: Vec<f64> = col
            .iter()
            .zip(table.y.iter())
            .filter(|(_, &y)| y == 0)
            .map(|(&v, _)| v)
            .collect();
        let diabetic: Vec<f64> = col
            .iter()
            .zip(table.y.iter())
            .filter(|(_, &y)| y == 1)
            .map(|(&v, _)| v)
            .collect();
        let (z, p) = rank_sum_test(&control, &diabetic)?;
        let mut pooled = control.clone();
        pooled.extend_from_slice(&diabetic);
        rows.push(CohortRow {
            item: label.to_string(),
            method: "rank_sum",
            statistic: z,
            p_value: p,
            control: descriptive_summary(&control)?,
            diabetic: descriptive_summary(&diabetic)?,
            pooled: descriptive_summary(&pooled)?,
        });
    }
    Ok(rows)
}

fn summary_csv_fields(s: &DescriptiveSummary) -> String {
    format!(
        "{},{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}",
        s.n, s.missing, s.mean, s.std, s.median, s.q1, s.q3, s.min, s.max
    )
}

pub fn stats(
    config: &RunConfig,
    dataset: &DatasetArgs,
    out: &Path,
    seed: Option<u64>,
) -> Result<()> {
    let started = std::time::Instant::now();
    let seed = super::effective_seed(config, seed);
    let records = resolve_dataset(config, dataset, seed)?;
    let table = feature_matrix(&records, &config.feature_config()?)?;

    // Per-foot gender counts, grouped by cohort.
    let mut counts = [[0u64; 2]; 2]; // [group][gender]; group 0 = control
    for s in &records {
        let g = usize::from(s.group_label.label());
        let sex = usize::from(s.gender == Gender::Female);
        counts[g][sex] += s.feet.len() as u64;
    }
    let contingency = ContingencyTable2x2::new(counts)?;
    let (chi, chi_p) = chi_square_2x2(&contingency)?;
    let gender = GenderRow {
        control_male: counts[0][0],
        control_female: counts[0][1],
        diabetic_male: counts[1][0],
        diabetic_female: counts[1][1],
        statistic: chi,
        p_value: chi_p,
    };

    let rows = cohort_rows(
        &table,
        &[
            ("Age (years)", "age"),
            ("Full-foot temperature (°C)", "FullFoot_mean"),
            ("LCA temperature (°C)", "LCA_mean"),
            ("LPA temperature (°C)", "LPA_mean"),
            ("MCA temperature (°C)", "MCA_mean"),
            ("MPA temperature (°C)", "MPA_mean"),
            ("TCI (°C)", "TCI"),
        ],
    )?;
    let report = CohortReport { gender, rows };

    ensure_dir(out)?;
    write_json(&out.join("stats.json"), &report)?;

    let mut csv = String::from(
        "item,method,statistic,p_value,\
         cg_n,cg_missing,cg_mean,cg_std,cg_median,cg_q1,cg_q3,cg_min,cg_max,\
         dm_n,dm_missing,dm_mean,dm_std,dm_median,dm_q1,dm_q3,dm_min,dm_max,\
         all_n,all_missing,all_mean,all_std,all_median,all_q1,all_q3,all_min,all_max\n",
    );
    // The gender row reports per-foot counts and male fractions in the
    // n/mean slots.
    let g = &report.gender;
    let cg_total = g.control_male + g.control_female;
    let dm_total = g.diabetic_male + g.diabetic_female;
    csv.push_str(&format!(
        "Gender (male fraction),chi_square,{:.4},{:.6},{cg_total},0,{:.4},,,,,,,{dm_total},0,{:.4},,,,,,,{},0,{:.4},,,,,,\n",
        g.statistic,
        g.p_value,
        g.control_male as f64 / cg_total as f64,
        g.diabetic_male as f64 / dm_total as f64,
        cg_total + dm_total,
        (g.control_male + g.diabetic_male) as f64 / (cg_total + dm_total) as f64,
    ));
    for row in &report.rows {
        csv.push_str(&format!(
            "{},{},{:.4},{:.6},{},{},{}\n",
            row.item,
            row.method,
            row.statistic,
            row.p_value,
            summary_csv_fields(&row.control),
            summary_csv_fields(&row.diabetic),
            summary_csv_fields(&row.pooled),
        ));
    }
    write_text(&out.join("stats.csv"), &csv)?;
    write_sidecar(out, "stats", started, serde_json::json!({}))?;
    println!(
        "gender chi-square {:.4} (p = {:.6}); {} rank-sum rows",
        report.gender.statistic,
        report.gender.p_value,
        report.rows.len()
    );
    Ok(())
}
