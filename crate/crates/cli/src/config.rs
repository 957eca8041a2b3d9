//! Experiment configuration: a TOML file plus `key=value` overrides.
//!
//! ```toml
//! seed = 13
//! output_dir = "runs/de"
//!
//! [data]
//! train = "data/en.train"
//! dev = "data/en.dev"
//! test = "data/de.test"
//! token_column = 0
//! label_column = 3
//! keep_types = ["PER", "LOC", "ORG", "MISC"]
//!
//! [embeddings]
//! source = "vectors/en.vec"
//! target = "vectors/de.vec"
//! seed_dictionary = "dicts/en-de.seed"
//!
//! [translation]
//! dictionary = "dicts/en-de.txt"
//! alpha = 0.5
//!
//! [romanization]
//! builtin = "de"
//!
//! [model]
//! epochs = 200
//! variant = "full"
//! ```
//!
//! Relative paths are resolved against the config file's directory.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use xner_core::corpus::EntityType;
use xner_core::eval::Variant;
use xner_core::romanizer::{builtin_table, load_table, Romanizer, TransliterationTable};
use xner_core::tagger::{Hyperparams, InputMode};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default)]
    pub embeddings: EmbeddingConfig,
    #[serde(default)]
    pub translation: TranslationConfig,
    #[serde(default)]
    pub romanization: RomanizationConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub ablation: AblationSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataConfig {
    pub train: Option<PathBuf>,
    pub dev: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub token_column: usize,
    /// Defaults to the last column of the first token line.
    pub label_column: Option<usize>,
    pub source_language: String,
    pub target_language: String,
    pub keep_types: Vec<String>,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            train: None,
            dev: None,
            test: None,
            token_column: 0,
            label_column: None,
            source_language: "source".into(),
            target_language: "target".into(),
            keep_types: EntityType::ALL
                .iter()
                .map(|t| t.as_str().to_string())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmbeddingConfig {
    pub source: Option<PathBuf>,
    pub target: Option<PathBuf>,
    pub seed_dictionary: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TranslationConfig {
    pub dictionary: Option<PathBuf>,
    pub alpha: f64,
}

impl Default for TranslationConfig {
    fn default() -> Self {
        TranslationConfig {
            dictionary: None,
            alpha: xner_core::translation::DEFAULT_ALPHA,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RomanizationConfig {
    /// Rule file, one `key<TAB>replacement` per line.
    pub table: Option<PathBuf>,
    /// Name of a built-in table (`de`, `latin`, `bn`).
    pub builtin: Option<String>,
    /// Replacement for unmatched characters; they are dropped when unset.
    pub placeholder: Option<char>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub word_dim: usize,
    pub char_dim: usize,
    pub char_hidden: usize,
    pub token_hidden: usize,
    pub dropout: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub decay_rate: f64,
    pub momentum: f64,
    pub clip: f64,
    pub target_dev_f1: Option<f64>,
    pub variant: String,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let h = Hyperparams::default();
        ModelConfig {
            word_dim: h.word_dim,
            char_dim: h.char_dim,
            char_hidden: h.char_hidden,
            token_hidden: h.token_hidden,
            dropout: h.dropout,
            epochs: h.epochs,
            learning_rate: h.learning_rate,
            decay_rate: h.decay_rate,
            momentum: h.momentum,
            clip: h.clip,
            target_dev_f1: h.target_dev_f1,
            variant: Variant::Full.as_str().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AblationSection {
    pub variants: Vec<String>,
}

impl Default for AblationSection {
    fn default() -> Self {
        AblationSection {
            variants: Variant::ALL
                .iter()
                .map(|v| v.as_str().to_string())
                .collect(),
        }
    }
}

/// Applies one `dotted.key=value` override. The value is read as a TOML
/// value when it parses as one and as a string otherwise.
fn apply_override(root: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{assignment}` is not key=value")))?;
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.trim().split('.').collect();
    let mut table = root;
    for part in &parts[..parts.len() - 1] {
        let entry = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("`{part}` in `{key}` is not a table")))?;
    }
    table.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

fn resolve(base: &Path, path: &mut Option<PathBuf>) {
    if let Some(p) = path {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
}

impl ExperimentConfig {
    /// Parses TOML text with overrides; relative paths are taken against `base`.
    pub fn from_toml(text: &str, overrides: &[String], base: &Path) -> Result<Self> {
        let mut root: toml::Table = text.parse().map_err(|e| CliError::Config(format!("{e}")))?;
        for o in overrides {
            apply_override(&mut root, o)?;
        }
        let mut config: ExperimentConfig = root
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
        for p in [
            &mut config.data.train,
            &mut config.data.dev,
            &mut config.data.test,
            &mut config.embeddings.source,
            &mut config.embeddings.target,
            &mut config.embeddings.seed_dictionary,
            &mut config.translation.dictionary,
            &mut config.romanization.table,
        ] {
            resolve(base, p);
        }
        if config.output_dir.is_relative() {
            config.output_dir = base.join(&config.output_dir);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, overrides, base)
    }

    /// Checks values and that every referenced input exists.
    pub fn validate(&self) -> Result<()> {
        for (name, path) in self.input_paths() {
            if !path.is_file() {
                return Err(CliError::Config(format!(
                    "{name}: {} does not exist",
                    path.display()
                )));
            }
        }
        self.keep_types()?;
        self.variant()?;
        self.variants()?;
        self.hyperparams()
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        if !(0.0..=1.0).contains(&self.translation.alpha) {
            return Err(CliError::Config(
                "translation.alpha must lie in [0, 1]".into(),
            ));
        }
        if self.romanization.table.is_some() && self.romanization.builtin.is_some() {
            return Err(CliError::Config(
                "set only one of romanization.table and romanization.builtin".into(),
            ));
        }
        if let Some(name) = &self.romanization.builtin {
            if builtin_table(name).is_none() {
                return Err(CliError::Config(format!(
                    "unknown built-in romanization table `{name}`"
                )));
            }
        }
        Ok(())
    }

    /// Named input files that are set.
    pub fn input_paths(&self) -> Vec<(&'static str, &Path)> {
        [
            ("data.train", &self.data.train),
            ("data.dev", &self.data.dev),
            ("data.test", &self.data.test),
            ("embeddings.source", &self.embeddings.source),
            ("embeddings.target", &self.embeddings.target),
            (
                "embeddings.seed_dictionary",
                &self.embeddings.seed_dictionary,
            ),
            ("translation.dictionary", &self.translation.dictionary),
            ("romanization.table", &self.romanization.table),
        ]
        .into_iter()
        .filter_map(|(n, p)| p.as_deref().map(|p| (n, p)))
        .collect()
    }

    pub fn require<'a>(&self, name: &str, path: &'a Option<PathBuf>) -> Result<&'a Path> {
        path.as_deref()
            .ok_or_else(|| CliError::Config(format!("{name} is required for this command")))
    }

    pub fn keep_types(&self) -> Result<BTreeSet<EntityType>> {
        self.data
            .keep_types
            .iter()
            .map(|t| {
                t.parse::<EntityType>()
                    .map_err(|_| CliError::Config(format!("unknown entity type `{t}`")))
            })
            .collect()
    }

    pub fn variant(&self) -> Result<Variant> {
        self.model
            .variant
            .parse()
            .map_err(|e: xner_core::Error| CliError::Config(e.to_string()))
    }

    pub fn variants(&self) -> Result<Vec<Variant>> {
        self.ablation
            .variants
            .iter()
            .map(|v| {
                v.parse()
                    .map_err(|e: xner_core::Error| CliError::Config(e.to_string()))
            })
            .collect()
    }

    pub fn hyperparams(&self) -> Hyperparams {
        let m = &self.model;
        Hyperparams {
            word_dim: m.word_dim,
            char_dim: m.char_dim,
            char_hidden: m.char_hidden,
            token_hidden: m.token_hidden,
            dropout: m.dropout,
            epochs: m.epochs,
            learning_rate: m.learning_rate,
            decay_rate: m.decay_rate,
            momentum: m.momentum,
            clip: m.clip,
            seed: self.seed,
            input_mode: self
                .variant()
                .map(Variant::input_mode)
                .unwrap_or(InputMode::Full),
            target_dev_f1: m.target_dev_f1,
        }
    }

    /// Romanizer from the configured table; identity on ASCII when none is set.
    pub fn romanizer(&self) -> Result<Romanizer> {
        let r = &self.romanization;
        let table = if let Some(path) = &r.table {
            let text = crate::files::read_text(path)?;
            load_table(&text, &self.data.target_language).map_err(|source| CliError::Input {
                path: path.clone(),
                source,
            })?
        } else if let Some(name) = &r.builtin {
            builtin_table(name)
                .ok_or_else(|| CliError::Config(format!("unknown built-in table `{name}`")))?
        } else {
            TransliterationTable::new(&self.data.target_language, Vec::new())
                .map_err(|e| CliError::Config(e.to_string()))?
        };
        let romanizer = Romanizer::new(table);
        match r.placeholder {
            Some(c) => romanizer
                .with_placeholder(c)
                .map_err(|e| CliError::Config(e.to_string())),
            None => Ok(romanizer),
        }
    }

    /// Effective configuration as canonical JSON.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
