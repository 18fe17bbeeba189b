//! `enhance`: grayscale PNG export per foot and operator.

use std::path::Path;

use thermofoot::enhance::{
    adaptive_equalize, gamma_correct, histogram_equalize, quantize_grayscale, write_png, GrayImage,
};
use thermofoot::error::{Error, Result};

use crate::config::RunConfig;
use crate::DatasetArgs;

use super::{ensure_dir, resolve_dataset, write_sidecar};

#[derive(Clone, Copy, PartialEq)]
enum Operator {
    Original,
    He,
    Ahe,
    Gamma,
}

impl Operator {
    fn parse(name: &str) -> Result<Operator> {
        match name.trim() {
            "original" | "orig" => Ok(Operator::Original),
            "he" => Ok(Operator::He),
            "ahe" | "clahe" => Ok(Operator::Ahe),
            "gamma" => Ok(Operator::Gamma),
            other => Err(Error::Config(format!("unknown operator {other:?}"))),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Operator::Original => "original",
            Operator::He => "he",
            Operator::Ahe => "ahe",
            Operator::Gamma => "gamma",
        }
    }

    fn apply(
        &self,
        img: &GrayImage,
        gamma: f64,
        tiles: usize,
        clip: f64,
    ) -> Result<GrayImage> {
        match self {
            Operator::Original => Ok(img.clone()),
            Operator::He => histogram_equalize(img),
            Operator::Ahe => adaptive_equalize(img, (tiles, tiles), clip),
            Operator::Gamma => gamma_correct(img, gamma),
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn enhance(
    config: &RunConfig,
    dataset: &DatasetArgs,
    out: &Path,
    seed: Option<u64>,
    ops: &str,
    gamma: f64,
    t_range: (f64, f64),
    tiles: usize,
    clip: f64,
) -> Result<()> {
    let started = std::time::Instant::now();
    let seed = super::effective_seed(config, seed);
    let records = resolve_dataset(config, dataset, seed)?;
    let operators: Vec<Operator> = ops
        .split(',')
        .map(Operator::parse)
        .collect::<Result<Vec<_>>>()?;
    if operators.is_empty() {
        return Err(Error::Config("no operators requested".into()));
    }

    ensure_dir(out)?;
    let mut written = 0usize;
    for subject in &records {
        for foot in &subject.feet {
            let img = quantize_grayscale(&foot.foot_map, t_range.0, t_range.1)?;
            for op in &operators {
                let result = op.apply(&img, gamma, tiles, clip)?;
                let path = out.join(format!(
                    "{}_{}_{}.png",
                    subject.subject_id,
                    foot.side().as_str(),
                    op.name()
                ));
                write_png(&result, &path)?;
                written += 1;
            }
        }
    }
    write_sidecar(
        out,
        "enhance",
        started,
        serde_json::json!({ "files": written }),
    )?;
    println!("wrote {written} PNG file(s) to {}", out.display());
    Ok(())
}
