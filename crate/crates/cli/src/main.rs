// SPDX-License-Identifier: Apache-2.0

mod commands;
mod config;
mod error;
mod model_file;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lipsqml_core::bounds::Gamma;
use lipsqml_core::train::Regularizer;

use crate::config::{Encoding, ExperimentConfig};
use crate::error::CliError;

/// Train, bound and stress-test trainable-encoding quantum classifiers.
#[derive(Debug, Parser)]
#[command(name = "lipsqml", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct ConfigSource {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Use the built-in reproduction preset.
    #[arg(long)]
    paper: bool,
}

impl ConfigSource {
    fn load(&self) -> Result<ExperimentConfig, CliError> {
        match &self.config {
            Some(p) => ExperimentConfig::load(p),
            None => Ok(ExperimentConfig::paper()),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EncodingArg {
    Trainable,
    Fixed,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RegularizerArg {
    EncodingNorm,
    AngleNorm,
    None,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SweepMode {
    Robustness,
    Lambda,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a circle-classification dataset as CSV (x1,x2,label).
    GenerateData {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a model; writes model.json and history.csv into the output directory.
    Train {
        #[command(flatten)]
        source: ConfigSource,
        /// Output directory (defaults to the config's output_dir).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, value_enum)]
        encoding: Option<EncodingArg>,
        #[arg(long, value_enum)]
        regularizer: Option<RegularizerArg>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        model_id: Option<String>,
    },
    /// Print Lipschitz and generalization bounds of a trained model as JSON.
    Bound {
        #[arg(long)]
        model: PathBuf,
        /// Sample count for the generalization bound (defaults to n_train).
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        /// `auto` or a positive number.
        #[arg(long, default_value = "auto")]
        gamma: String,
    },
    /// Run a robustness (noise) or regularization (lambda) sweep.
    Sweep {
        #[arg(long, value_enum)]
        mode: SweepMode,
        #[command(flatten)]
        source: ConfigSource,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Trained model file; repeatable. Appended to sweep.models.
        #[arg(long = "model")]
        models: Vec<PathBuf>,
        #[arg(long, value_enum)]
        encoding: Option<EncodingArg>,
        #[arg(long, value_enum)]
        regularizer: Option<RegularizerArg>,
    },
    /// Print the reproduction preset configuration.
    Preset,
    /// Print the JSON schema for experiment configurations.
    Schema,
}

fn apply_overrides(
    config: &mut ExperimentConfig,
    encoding: Option<EncodingArg>,
    regularizer: Option<RegularizerArg>,
) {
    if let Some(e) = encoding {
        config.circuit.encoding = match e {
            EncodingArg::Trainable => Encoding::Trainable,
            EncodingArg::Fixed => Encoding::Fixed,
        };
    }
    if let Some(r) = regularizer {
        config.train.regularizer = match r {
            RegularizerArg::EncodingNorm => Regularizer::EncodingNorm,
            RegularizerArg::AngleNorm => Regularizer::AngleNorm,
            RegularizerArg::None => Regularizer::None,
        };
    }
}

fn parse_gamma(s: &str) -> Result<Gamma, CliError> {
    if s == "auto" {
        return Ok(Gamma::Auto);
    }
    match s.parse::<f64>() {
        Ok(g) if g > 0.0 && g.is_finite() => Ok(Gamma::Fixed(g)),
        _ => Err(CliError::usage(format!("--gamma must be `auto` or a positive number, got {s:?}"))),
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("LIPSQML_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("LIPSQML_THREADS must be a non-negative integer, got {raw:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| anyhow::anyhow!("thread pool: {e}"))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::GenerateData { n, seed, out } => commands::generate_data(n as usize, seed, &out),
        Command::Train {
            source,
            out,
            lambda,
            encoding,
            regularizer,
            seed,
            model_id,
        } => {
            let mut config = source.load()?;
            apply_overrides(&mut config, encoding, regularizer);
            if let Some(l) = lambda {
                config.train.lambda = l;
            }
            if let Some(s) = seed {
                config.train.seed = s;
            }
            config.validate()?;
            let out = out.unwrap_or_else(|| config.output_dir.clone());
            commands::train_model(&config, &out, model_id)
        }
        Command::Bound { model, n, delta, gamma } => commands::bound(&model, n, delta, parse_gamma(&gamma)?),
        Command::Sweep {
            mode,
            source,
            out,
            models,
            encoding,
            regularizer,
        } => {
            let mut config = source.load()?;
            apply_overrides(&mut config, encoding, regularizer);
            config.validate()?;
            let out = out.unwrap_or_else(|| config.output_dir.clone());
            match mode {
                SweepMode::Lambda => commands::sweep_lambda(&config, &out),
                SweepMode::Robustness => {
                    let mut paths = config.sweep.models.clone();
                    paths.extend(models);
                    commands::sweep_robustness(&config, &paths, &out)
                }
            }
        }
        Command::Preset => {
            commands::print_stdout(&(ExperimentConfig::paper().to_pretty_json() + "\n"))
        }
        Command::Schema => {
            commands::print_stdout(config::SCHEMA)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
