//! Binary model container.
//!
//! Layout: the 8-byte magic `XNERMDL1`, a little-endian `u64` header length,
//! a JSON header, then every tensor as little-endian `f64` in header order.
//! Word embeddings are not stored; the header records the SHA-256 of the
//! embedding file the model was trained with.

use std::path::Path;

use serde::{Deserialize, Serialize};
use xner_core::corpus::Label;
use xner_core::tagger::{CharInventory, Hyperparams, LabelSet, Params, TaggerModel};

use crate::error::{CliError, Result};

pub const MAGIC: &[u8; 8] = b"XNERMDL1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperRecord {
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
    pub seed: u64,
    pub input_mode: String,
    pub target_dev_f1: Option<f64>,
}

impl From<&Hyperparams> for HyperRecord {
    fn from(h: &Hyperparams) -> Self {
        HyperRecord {
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
            seed: h.seed,
            input_mode: h.input_mode.as_str().to_string(),
            target_dev_f1: h.target_dev_f1,
        }
    }
}

impl HyperRecord {
    fn to_hyperparams(&self) -> xner_core::Result<Hyperparams> {
        Ok(Hyperparams {
            word_dim: self.word_dim,
            char_dim: self.char_dim,
            char_hidden: self.char_hidden,
            token_hidden: self.token_hidden,
            dropout: self.dropout,
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            decay_rate: self.decay_rate,
            momentum: self.momentum,
            clip: self.clip,
            seed: self.seed,
            input_mode: self.input_mode.parse()?,
            target_dev_f1: self.target_dev_f1,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorEntry {
    pub name: String,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelHeader {
    pub hyperparams: HyperRecord,
    pub labels: Vec<String>,
    pub char_inventory: String,
    pub embedding_sha256: String,
    pub checksum: String,
    pub tensors: Vec<TensorEntry>,
}

#[derive(Debug, Clone)]
pub struct ModelFile {
    pub model: TaggerModel,
    pub embedding_sha256: String,
}

pub fn encode_model(model: &TaggerModel, embedding_sha256: &str) -> Vec<u8> {
    let groups = model.params.groups();
    let header = ModelHeader {
        hyperparams: HyperRecord::from(&model.hyper),
        labels: model
            .labels
            .labels()
            .iter()
            .map(ToString::to_string)
            .collect(),
        char_inventory: CharInventory::describe(),
        embedding_sha256: embedding_sha256.to_string(),
        checksum: model.params.checksum(),
        tensors: groups
            .iter()
            .map(|(n, t)| TensorEntry {
                name: n.to_string(),
                len: t.len(),
            })
            .collect(),
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let mut out = Vec::with_capacity(16 + json.len() + 8 * model.params.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(json.len() as u64).to_le_bytes());
    out.extend_from_slice(&json);
    for (_, t) in groups {
        for v in t {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode_model(bytes: &[u8], path: &Path) -> Result<ModelFile> {
    let bad = |message: String| CliError::Model {
        path: path.to_path_buf(),
        message,
    };
    if bytes.len() < 16 || &bytes[..8] != MAGIC {
        return Err(bad("not a model file".into()));
    }
    let header_len = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    let header_end = usize::try_from(header_len)
        .ok()
        .and_then(|n| n.checked_add(16))
        .filter(|&end| end <= bytes.len())
        .ok_or_else(|| bad("truncated header".into()))?;
    let header: ModelHeader = serde_json::from_slice(&bytes[16..header_end])
        .map_err(|e| bad(format!("bad header: {e}")))?;
    if header.char_inventory != CharInventory::describe() {
        return Err(bad("character inventory differs from this build".into()));
    }
    let hyper = header
        .hyperparams
        .to_hyperparams()
        .map_err(|e| bad(e.to_string()))?;
    let labels = header
        .labels
        .iter()
        .map(|l| l.parse::<Label>())
        .collect::<xner_core::Result<Vec<_>>>()
        .and_then(LabelSet::from_labels)
        .map_err(|e| bad(e.to_string()))?;
    let mut params = Params::zeros(&hyper, labels.len());
    let mut data = bytes[header_end..].chunks_exact(8);
    if data.len() != params.len() || !data.remainder().is_empty() {
        return Err(bad(format!(
            "expected {} parameters, found {} bytes",
            params.len(),
            bytes.len() - header_end
        )));
    }
    let groups = params.groups_mut();
    if groups.len() != header.tensors.len() {
        return Err(bad("tensor list does not match the architecture".into()));
    }
    for ((name, tensor), entry) in groups.into_iter().zip(&header.tensors) {
        if name != entry.name || tensor.len() != entry.len {
            return Err(bad(format!(
                "tensor `{}` does not match the architecture",
                entry.name
            )));
        }
        for (v, chunk) in tensor.iter_mut().zip(&mut data) {
            *v = f64::from_le_bytes(chunk.try_into().expect("8 bytes"));
        }
    }
    if params.checksum() != header.checksum {
        return Err(bad("parameter checksum mismatch".into()));
    }
    let model = TaggerModel::from_parts(hyper, labels, params).map_err(|e| bad(e.to_string()))?;
    Ok(ModelFile {
        model,
        embedding_sha256: header.embedding_sha256,
    })
}
