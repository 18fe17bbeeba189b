//! Command-line front end for the plantar-thermogram screening
//! pipeline.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data validation
//! error, 4 runtime failure. Errors print one line to stderr with a
//! machine-parsable `error[category]:` prefix. Primary output files are
//! byte-identical across reruns with the same seed; wall-clock values
//! (timestamps, timings) go to the `run_meta.json` sidecar.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thermofoot::error::{Error, ErrorCategory};

#[derive(Parser)]
#[command(
    name = "thermofoot",
    version,
    about = "Plantar thermogram screening: features, statistics, learners, and the \
             cross-validated model search",
    after_help = "Environment: THERMOFOOT_THREADS caps the worker-thread count."
)]
struct Cli {
    /// JSON run-configuration file; command-line flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DatasetArgs {
    /// Dataset manifest (JSON).
    #[arg(long, value_name = "FILE")]
    manifest: Option<PathBuf>,
    /// Synthesize: number of control subjects.
    #[arg(long, value_name = "N")]
    cg: Option<usize>,
    /// Synthesize: number of diabetic subjects.
    #[arg(long, value_name = "N")]
    dm: Option<usize>,
    /// Synthesize: diabetic regional mean elevation, °C.
    #[arg(long, value_name = "DEG")]
    sep: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate and normalize a dataset; write a validation report.
    Ingest {
        #[arg(long, value_name = "FILE")]
        manifest: PathBuf,
        /// Also write a normalized copy of the dataset here.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Write a synthetic dataset.
    Synth {
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long, value_name = "N")]
        cg: Option<usize>,
        #[arg(long, value_name = "N")]
        dm: Option<usize>,
        #[arg(long, value_name = "DEG")]
        sep: Option<f64>,
        #[arg(long, value_name = "SEED")]
        seed: Option<u64>,
        #[arg(long, value_name = "N")]
        rows: Option<usize>,
        #[arg(long, value_name = "N")]
        cols: Option<usize>,
    },
    /// Compute the 39-column feature matrix and the pruning report.
    Features {
        #[command(flatten)]
        dataset: DatasetArgs,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long, value_name = "SEED")]
        seed: Option<u64>,
        /// Correlation-pruning threshold.
        #[arg(long, value_name = "R")]
        threshold: Option<f64>,
    },
    /// Emit the cohort statistics table (chi-square and rank-sum rows).
    Stats {
        #[command(flatten)]
        dataset: DatasetArgs,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long, value_name = "SEED")]
        seed: Option<u64>,
    },
    /// Fit one classifier on the full dataset and save it.
    Train {
        #[command(flatten)]
        dataset: DatasetArgs,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Classifier name (cart, random_forest, extra_trees, adaboost,
        /// gradient_boosting, knn, logistic, lda).
        #[arg(long, value_name = "NAME")]
        classifier: String,
        #[arg(long, value_name = "SEED")]
        seed: Option<u64>,
        /// Rank features first and keep the top k.
        #[arg(long, value_name = "NAME")]
        ranker: Option<String>,
        #[arg(long, value_name = "K")]
        top_k: Option<usize>,
        /// Balance the training set with SMOTE before fitting.
        #[arg(long)]
        smote: bool,
    },
    /// Score a saved model on a dataset and write the metric report.
    Evaluate {
        #[command(flatten)]
        dataset: DatasetArgs,
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long, value_name = "SEED")]
        seed: Option<u64>,
        /// Timing repetitions for the inference measurement.
        #[arg(long, value_name = "N", default_value_t = 15)]
        repetitions: usize,
    },
    /// Run the ranker × classifier × top-k grid search.
    Grid {
        #[command(flatten)]
        dataset: DatasetArgs,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long, value_name = "SEED")]
        seed: Option<u64>,
        /// Comma-separated rankers (rf,et,gbdt).
        #[arg(long, value_name = "LIST")]
        rankers: Option<String>,
        /// Comma-separated classifiers; `external:NAME` for score stubs.
        #[arg(long, value_name = "LIST")]
        classifiers: Option<String>,
        #[arg(long, value_name = "K")]
        kmax: Option<usize>,
        #[arg(long, value_name = "N")]
        folds: Option<usize>,
        /// Prune once on the full dataset (compatibility mode).
        #[arg(long)]
        global_prune: bool,
        /// SMOTE before ranking instead of after selection.
        #[arg(long)]
        smote_before_rank: bool,
        /// Feed the spared validation split to boosting early-stop.
        #[arg(long)]
        use_validation: bool,
        /// External score file, `name=path`; repeatable.
        #[arg(long, value_name = "NAME=FILE")]
        external: Vec<String>,
        /// Store ROC curves for this many top runs.
        #[arg(long, value_name = "N")]
        keep_roc: Option<usize>,
    },
    /// Export enhanced grayscale PNGs per foot and operator.
    Enhance {
        #[command(flatten)]
        dataset: DatasetArgs,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long, value_name = "SEED")]
        seed: Option<u64>,
        /// Comma-separated operators: original,he,ahe,gamma.
        #[arg(long, value_name = "LIST", default_value = "original,he,ahe,gamma")]
        ops: String,
        #[arg(long, value_name = "G", default_value_t = 0.7)]
        gamma: f64,
        /// Quantization range, °C.
        #[arg(long, value_name = "DEG", default_value_t = 20.0)]
        t_min: f64,
        #[arg(long, value_name = "DEG", default_value_t = 36.0)]
        t_max: f64,
        /// Adaptive-equalization tile grid (NxN).
        #[arg(long, value_name = "N", default_value_t = 8)]
        tiles: usize,
        #[arg(long, value_name = "F", default_value_t = 0.01)]
        clip: f64,
    },
    /// Render ROC curves and top-feature charts from a grid archive.
    Report {
        #[arg(long, value_name = "FILE")]
        archive: PathBuf,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Bars per feature-ranking chart.
        #[arg(long, value_name = "N", default_value_t = 15)]
        top: usize,
    },
}

fn configure_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var("THERMOFOOT_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .map_err(|_| Error::Config(format!("THERMOFOOT_THREADS={raw:?} is not a count")))?;
    if threads == 0 {
        return Err(Error::Config("THERMOFOOT_THREADS must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Runtime(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), Error> {
    let config = config::RunConfig::load_or_default(cli.config.as_ref())?;
    match cli.command {
        Command::Ingest { manifest, out } => commands::ingest(&config, &manifest, out.as_deref()),
        Command::Synth {
            out,
            cg,
            dm,
            sep,
            seed,
            rows,
            cols,
        } => commands::synth(&config, &out, cg, dm, sep, seed, rows, cols),
        Command::Features {
            dataset,
            out,
            seed,
            threshold,
        } => commands::features(&config, &dataset, &out, seed, threshold),
        Command::Stats { dataset, out, seed } => commands::stats(&config, &dataset, &out, seed),
        Command::Train {
            dataset,
            out,
            classifier,
            seed,
            ranker,
            top_k,
            smote,
        } => commands::train(
            &config,
            &dataset,
            &out,
            &classifier,
            seed,
            ranker.as_deref(),
            top_k,
            smote,
        ),
        Command::Evaluate {
            dataset,
            model,
            out,
            seed,
            repetitions,
        } => commands::evaluate(&config, &dataset, &model, &out, seed, repetitions),
        Command::Grid {
            dataset,
            out,
            seed,
            rankers,
            classifiers,
            kmax,
            folds,
            global_prune,
            smote_before_rank,
            use_validation,
            external,
            keep_roc,
        } => commands::grid(
            &config,
            &dataset,
            &out,
            commands::GridFlags {
                seed,
                rankers,
                classifiers,
                kmax,
                folds,
                global_prune,
                smote_before_rank,
                use_validation,
                external,
                keep_roc,
            },
        ),
        Command::Enhance {
            dataset,
            out,
            seed,
            ops,
            gamma,
            t_min,
            t_max,
            tiles,
            clip,
        } => commands::enhance(
            &config,
            &dataset,
            &out,
            seed,
            &ops,
            gamma,
            (t_min, t_max),
            tiles,
            clip,
        ),
        Command::Report { archive, out, top } => commands::report(&archive, &out, top),
    }
}

fn main() -> ExitCode {
    if let Err(e) = configure_threads() {
        eprintln!("error[{}]: {e}", e.category());
        return ExitCode::from(2);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            let code = match e.category() {
                ErrorCategory::Config => 2,
                ErrorCategory::Data => 3,
                ErrorCategory::Runtime => 4,
            };
            ExitCode::from(code)
        }
    }
}
