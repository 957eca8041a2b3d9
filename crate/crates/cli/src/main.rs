use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use xner::commands;
use xner::config::ExperimentConfig;
use xner::error::{CliError, Result};
use xner_core::romanizer::{builtin_table, load_table, Romanizer};

#[derive(Parser)]
#[command(
    name = "xner",
    version,
    about = "Cross-lingual named entity recognition toolkit"
)]
struct Cli {
    /// Experiment configuration (TOML).
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Override a config value, e.g. `--set model.epochs=20`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Filter tags, normalize tokens and convert corpora to BIOSE.
    Preprocess,
    /// Align target embeddings to the source space and merge the tables.
    Align,
    /// Translate the training and dev corpora word by word.
    Translate,
    /// Romanize words given as arguments, or one per line on stdin.
    Romanize {
        /// Built-in table (de, latin, bn); overrides the config.
        #[arg(long, conflicts_with = "table")]
        builtin: Option<String>,
        /// Rule file; overrides the config.
        #[arg(long)]
        table: Option<PathBuf>,
        words: Vec<String>,
    },
    /// Train the tagger.
    Train,
    /// Tag the test corpus.
    Predict {
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Score a model on the test corpus.
    Evaluate {
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Train and score each ablation variant.
    Ablate,
    /// Report out-of-vocabulary rates of the corpora.
    OovReport,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    ExperimentConfig::load(path, &cli.overrides)
}

fn romanizer(cli: &Cli, builtin: Option<&str>, table: Option<&Path>) -> Result<Romanizer> {
    if let Some(name) = builtin {
        let t = builtin_table(name)
            .ok_or_else(|| CliError::Config(format!("unknown built-in table `{name}`")))?;
        return Ok(Romanizer::new(t));
    }
    if let Some(path) = table {
        let text = xner::files::read_text(path)?;
        let t = load_table(&text, "custom").map_err(|source| CliError::Input {
            path: path.to_path_buf(),
            source,
        })?;
        return Ok(Romanizer::new(t));
    }
    load_config(cli)?.romanizer()
}

fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Romanize {
            builtin,
            table,
            words,
        } => {
            let r = romanizer(cli, builtin.as_deref(), table.as_deref())?;
            let mut out = String::new();
            let mut push = |w: &str| {
                out.push_str(&r.romanize(w));
                out.push('\n');
            };
            if words.is_empty() {
                for line in std::io::stdin().lock().lines() {
                    let line = line.map_err(|source| CliError::Read {
                        path: "<stdin>".into(),
                        source,
                    })?;
                    push(line.trim());
                }
            } else {
                words.iter().for_each(|w| push(w));
            }
            Ok(out)
        }
        command => {
            let config = load_config(cli)?;
            match command {
                Command::Preprocess => commands::preprocess(&config),
                Command::Align => commands::align(&config),
                Command::Translate => commands::translate(&config),
                Command::Train => commands::train(&config),
                Command::Predict { model } => commands::predict(&config, model.as_deref()),
                Command::Evaluate { model } => commands::evaluate(&config, model.as_deref()),
                Command::Ablate => commands::ablate(&config),
                Command::OovReport => commands::oov_report(&config),
                Command::Romanize { .. } => unreachable!(),
            }
        }
    }
}

fn main() -> ExitCode {
    // Usage errors are validation errors (clap would exit with 2).
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(xner::error::EXIT_VALIDATION)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(out) => {
            let _ = std::io::stdout().write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
