//! Command-line interface.
//!
//! Exit codes: 0 success, 2 usage or validation, 3 data degeneracy,
//! 4 internal numeric failure.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use opplearn_core::{mine_opposites, Bounds, FunctionId, OppositionScheme, SampleSet, TrainConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{HarnessError, Result};
use crate::experiments::{
    run_series1, run_series2, run_series3, sample_opt_function, sample_test_function, train_opposites,
    ExperimentConfig,
};
use crate::io;
use crate::manifest::{manifest_path_for, ManifestConfig, RunManifest};

#[derive(Debug, Parser)]
#[command(name = "opplearn", version, about = "Learn type-II opposites from sampled data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a benchmark function uniformly into a CSV with header x1..xn,y
    Generate(GenerateArgs),
    /// Pair every sample with its mined opposite
    Mine(MineArgs),
    /// Mine opposites and fit a rule base, saved as JSON
    Train(TrainArgs),
    /// Predict opposites for a CSV of samples with a saved model
    Predict(PredictArgs),
    /// Run one of the three experiment series
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_parser = parse_function)]
    pub function: FunctionId,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// LO:HI, replaces the default domain of f1..f9
    #[arg(long, allow_hyphen_values = true, value_parser = parse_domain)]
    pub domain: Option<Bounds>,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// t1|t2|t3
    #[arg(long, default_value = "t1", value_parser = parse_scheme)]
    pub scheme: OppositionScheme,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// t1|t2|t3
    #[arg(long, default_value = "t1", value_parser = parse_scheme)]
    pub scheme: OppositionScheme,
    #[arg(long, default_value_t = 30)]
    pub clusters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub series: u8,
    #[arg(long, value_parser = parse_function)]
    pub function: FunctionId,
    /// t1|t2|t3
    #[arg(long, default_value = "t1", value_parser = parse_scheme)]
    pub scheme: OppositionScheme,
    /// Training samples per run (default 100, or 1000 for series 3)
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 30)]
    pub clusters: usize,
    /// Independent runs (default 30, or 5 for series 2 and 3)
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Samples before the first update (series 2)
    #[arg(long, default_value_t = 100)]
    pub initial: usize,
    /// Samples after the last update (series 2)
    #[arg(long = "final", default_value_t = 200)]
    pub final_n: usize,
    #[arg(long, default_value = "results")]
    pub output: PathBuf,
    /// LO:HI, replaces the default domain of f1..f9
    #[arg(long, allow_hyphen_values = true, value_parser = parse_domain)]
    pub domain: Option<Bounds>,
}

fn parse_scheme(s: &str) -> std::result::Result<OppositionScheme, String> {
    s.parse().map_err(|e: opplearn_core::Error| e.to_string())
}

fn parse_function(s: &str) -> std::result::Result<FunctionId, String> {
    s.parse().map_err(|e: opplearn_core::Error| e.to_string())
}

fn parse_domain(s: &str) -> std::result::Result<Bounds, String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got '{s}'"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("'{v}' is not a number"));
    Bounds::new(parse(lo)?, parse(hi)?).map_err(|e| e.to_string())
}

/// Executes a parsed command line; `argv` is recorded in the manifest.
pub fn run(cli: Cli, argv: &str) -> Result<()> {
    match cli.command {
        Command::Generate(a) => generate(a, argv),
        Command::Mine(a) => mine(a, argv),
        Command::Train(a) => train(a, argv),
        Command::Predict(a) => predict(a, argv),
        Command::Experiment(a) => experiment(a, argv),
    }
}

fn finish(mut manifest: RunManifest, outputs: Vec<PathBuf>, manifest_path: &Path) -> Result<()> {
    manifest.output_paths = outputs;
    manifest.write(manifest_path)
}

fn generate(a: GenerateArgs, argv: &str) -> Result<()> {
    let manifest = RunManifest::start(
        argv,
        ManifestConfig::Generate {
            function: a.function.as_str().to_string(),
            samples: a.samples,
            seed: a.seed,
            domain: a.domain,
        },
    );
    let cfg = ExperimentConfig {
        domain: a.domain,
        ..ExperimentConfig::series1(a.function)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let samples = match a.function {
        FunctionId::Test(_) => sample_test_function(&cfg.test_function()?, a.samples, &mut rng)?,
        FunctionId::Opt(_) => sample_opt_function(&cfg.opt_function()?, a.samples, &mut rng)?,
    };
    io::write_samples(&a.output, samples.rows())?;
    finish(manifest, vec![a.output.clone()], &manifest_path_for(&a.output))
}

fn load_sample_set(path: &Path) -> Result<SampleSet> {
    Ok(SampleSet::with_observed_bounds(io::read_samples(path)?)?)
}

fn mine(a: MineArgs, argv: &str) -> Result<()> {
    let manifest = RunManifest::start(argv, ManifestConfig::Mine { scheme: a.scheme });
    let pairs = mine_opposites(&load_sample_set(&a.input)?, a.scheme)?;
    io::write_mined(&a.output, &pairs)?;
    finish(manifest, vec![a.output.clone()], &manifest_path_for(&a.output))
}

fn train(a: TrainArgs, argv: &str) -> Result<()> {
    let cfg = TrainConfig::default().with_clusters(a.clusters).with_seed(a.seed);
    let manifest = RunManifest::start(
        argv,
        ManifestConfig::Train {
            scheme: a.scheme,
            train: cfg.clone(),
        },
    );
    let model = train_opposites(&load_sample_set(&a.input)?, a.scheme, &cfg)?;
    io::save_model(&a.output, &model)?;
    finish(manifest, vec![a.output.clone()], &manifest_path_for(&a.output))
}

fn predict(a: PredictArgs, argv: &str) -> Result<()> {
    let manifest = RunManifest::start(argv, ManifestConfig::Predict { model: a.model.clone() });
    let model = io::load_model(&a.model)?;
    let rows = io::read_samples(&a.input)?;
    let opposites = rows
        .iter()
        .map(|r| {
            let mut input = r.inputs.clone();
            input.push(r.output);
            model.predict(&input)
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    io::write_predictions(&a.output, &rows, &opposites)?;
    finish(manifest, vec![a.output.clone()], &manifest_path_for(&a.output))
}

fn experiment(a: ExperimentArgs, argv: &str) -> Result<()> {
    let preset = match a.series {
        1 => ExperimentConfig::series1(a.function),
        2 => ExperimentConfig::series2(a.function),
        _ => ExperimentConfig::series3(a.function),
    };
    let cfg = ExperimentConfig {
        n_samples: a.samples.unwrap_or(preset.n_samples),
        n_runs: a.runs.unwrap_or(preset.n_runs),
        scheme: a.scheme,
        seed: a.seed,
        train_config: TrainConfig::default().with_clusters(a.clusters).with_seed(a.seed),
        domain: a.domain,
        ..preset
    };
    // reject a bad function/series pairing before any work or output
    match a.series {
        1 | 2 => cfg.test_function().map(drop)?,
        _ => cfg.opt_function().map(drop)?,
    }
    let series2 = a.series == 2;
    let manifest = RunManifest::start(
        argv,
        ManifestConfig::Experiment {
            series: a.series,
            config: cfg.clone(),
            initial: series2.then_some(a.initial),
            final_n: series2.then_some(a.final_n),
        },
    );

    std::fs::create_dir_all(&a.output).map_err(|e| HarnessError::io(&a.output, e))?;
    let stem = format!("series{}_{}_{}", a.series, cfg.function_id, cfg.scheme);
    let file = |suffix: &str| a.output.join(format!("{stem}{suffix}"));
    let results = file(".csv");
    let mut outputs = vec![results.clone()];
    match a.series {
        1 => io::write_results(&results, &run_series1(&cfg)?.rows(&cfg))?,
        2 => {
            let report = run_series2(&cfg, a.initial, a.final_n)?;
            io::write_results(&results, &report.rows(&cfg))?;
            let (plot, curves) = (file("_plot.csv"), file("_curves.csv"));
            io::write_plot(&plot, &report.curve)?;
            io::write_curves(&curves, &report.runs)?;
            outputs.extend([plot, curves]);
        }
        _ => io::write_results(&results, &run_series3(&cfg)?.rows(&cfg))?,
    }
    finish(manifest, outputs, &file("_manifest.json"))
}
