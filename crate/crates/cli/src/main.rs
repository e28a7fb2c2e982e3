//! `nesent`: entity-aware sentiment analysis over labeled corpora.
//!
//! Exit codes: 0 success, 1 domain error (bad data, impossible
//! operation), 2 usage error (clap).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod config;
mod pipeline;

use config::{Overrides, RunConfig};

#[derive(Parser)]
#[command(
    name = "nesent",
    about = "Mine named-entity polarity from a labeled corpus, tag it, and classify sentiment",
    version
)]
struct Cli {
    /// JSON run configuration file.
    #[arg(short, long, global = true, default_value = "config.json")]
    config: PathBuf,

    /// Override the corpus path from the config.
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,

    /// Override the output directory from the config.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,

    /// Override the random seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine entity polarities by majority of attitudes; writes
    /// ne_polarity.jsonl and ne_stats.json.
    NePolarity,
    /// Replace assigned entities with PosNE/NegNE tags in both splits;
    /// writes tagged_corpus.jsonl.
    Tag,
    /// Train a supervised model on the train split; writes
    /// model_<name>.json.
    Train {
        /// Model to train: nb | svm.
        #[arg(long)]
        model: String,
    },
    /// Predict the test split; writes predictions.jsonl.
    Classify {
        /// lexicon_sfs, lexicon_dp, or a path to a model artifact.
        #[arg(long)]
        with: String,
    },
    /// Score a predictions file against the test golds; writes
    /// metrics.json.
    Evaluate {
        /// predictions.jsonl produced by `classify`.
        #[arg(long)]
        predictions: PathBuf,
    },
    /// Run every configured model with and without NE tags; writes
    /// ablation.json and ablation.txt.
    Ablate,
    /// Report per-split label counts; writes split_summary.json.
    Stats,
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let overrides = Overrides {
        corpus: cli.corpus.clone(),
        output_dir: cli.output_dir.clone(),
        seed: cli.seed,
    };
    let config = RunConfig::load(&cli.config, &overrides)?;
    match &cli.command {
        Command::NePolarity => pipeline::cmd_ne_polarity(&config),
        Command::Tag => pipeline::cmd_tag(&config),
        Command::Train { model } => pipeline::cmd_train(&config, model),
        Command::Classify { with } => pipeline::cmd_classify(&config, with),
        Command::Evaluate { predictions } => pipeline::cmd_evaluate(&config, predictions),
        Command::Ablate => pipeline::cmd_ablate(&config),
        Command::Stats => pipeline::cmd_stats(&config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
