//! Command-line pipeline for cross-lingual NER transfer: config handling,
//! file formats, the model container and provenance records.

pub mod commands;
pub mod config;
pub mod error;
pub mod files;
pub mod model_file;
pub mod provenance;

pub use config::ExperimentConfig;
pub use error::{CliError, Result};
