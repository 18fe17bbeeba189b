//! Subcommand implementations.

mod data;
mod enhance;
mod features;
mod model;
mod search;

pub use data::{ingest, synth};
pub use enhance::enhance;
pub use features::{features, stats};
pub use model::{evaluate, train};
pub use search::{grid, report, GridFlags};

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use thermofoot::data::SubjectRecord;
use thermofoot::error::{Error, Result};

use crate::config::{RunConfig, SynthesisSection};
use crate::DatasetArgs;

pub(crate) fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Runtime(format!("serialization failed: {e}")))?;
    write_text(path, &text)
}

pub(crate) fn effective_seed(config: &RunConfig, flag: Option<u64>) -> u64 {
    flag.or(config.seed).unwrap_or(0)
}

/// Applies dataset flags over the config and loads or synthesizes the
/// records.
pub(crate) fn resolve_dataset(
    config: &RunConfig,
    args: &DatasetArgs,
    seed: u64,
) -> Result<Vec<SubjectRecord>> {
    let mut merged = config.clone();
    if args.manifest.is_some() {
        merged.manifest = args.manifest.clone();
        merged.synthesis = None;
    } else if args.cg.is_some() || args.dm.is_some() || args.sep.is_some() {
        let (Some(cg), Some(dm)) = (args.cg, args.dm) else {
            return Err(Error::Config(
                "synthesis needs both --cg and --dm".into(),
            ));
        };
        merged.synthesis = Some(SynthesisSection {
            n_cg: cg,
            n_dm: dm,
            separation: args.sep.unwrap_or(3.0),
            rows: None,
            cols: None,
        });
        merged.manifest = None;
    }
    merged.resolve_dataset(seed)
}

/// Writes the wall-clock sidecar. Everything time-dependent lands here
/// so primary outputs stay byte-stable.
pub(crate) fn write_sidecar(
    out_dir: &Path,
    command: &str,
    started: std::time::Instant,
    extra: serde_json::Value,
) -> Result<()> {
    let meta = serde_json::json!({
        "command": command,
        "unix_time_ms": SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0),
        "duration_ms": started.elapsed().as_secs_f64() * 1e3,
        "details": extra,
    });
    write_json(&out_dir.join("run_meta.json"), &meta)
}
