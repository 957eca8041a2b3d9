//! Per-command provenance records.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::files::{read_bytes, sha256_hex, write_file};

#[derive(Debug, Clone, Serialize)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
}

/// Tracks the files a command reads and writes and records them as
/// `<command>.provenance.json` in the output directory. Records carry no
/// timestamps, so identical runs produce identical records.
#[derive(Debug, Serialize)]
pub struct Provenance {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub config_sha256: String,
    pub config: serde_json::Value,
    pub inputs: BTreeMap<String, FileRecord>,
    pub outputs: BTreeMap<String, FileRecord>,
    #[serde(skip)]
    output_dir: PathBuf,
}

impl Provenance {
    pub fn new(command: &str, config: &ExperimentConfig) -> Self {
        let json = config.to_json();
        let canonical = serde_json::to_vec(&json).expect("config serializes");
        Provenance {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            config_sha256: sha256_hex(&canonical),
            config: json,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            output_dir: config.output_dir.clone(),
        }
    }

    pub fn output_dir(&self) -> &Path {
        &self.output_dir
    }

    /// Reads an input file and records its hash.
    pub fn read(&mut self, name: &str, path: &Path) -> Result<Vec<u8>> {
        let bytes = read_bytes(path)?;
        self.inputs.insert(
            name.to_string(),
            FileRecord {
                path: path.display().to_string(),
                sha256: sha256_hex(&bytes),
            },
        );
        Ok(bytes)
    }

    pub fn read_text(&mut self, name: &str, path: &Path) -> Result<String> {
        let bytes = self.read(name, path)?;
        String::from_utf8(bytes).map_err(|e| crate::error::CliError::Read {
            path: path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
        })
    }

    /// Writes `bytes` to `file` inside the output directory and records it.
    pub fn write(&mut self, file: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.output_dir.join(file);
        write_file(&path, bytes)?;
        self.outputs.insert(
            file.to_string(),
            FileRecord {
                path: file.to_string(),
                sha256: sha256_hex(bytes),
            },
        );
        Ok(path)
    }

    pub fn finish(self) -> Result<PathBuf> {
        let mut json = serde_json::to_vec_pretty(&self).expect("provenance serializes");
        json.push(b'\n');
        let path = self
            .output_dir
            .join(format!("{}.provenance.json", self.command));
        write_file(&path, &json)?;
        Ok(path)
    }
}
