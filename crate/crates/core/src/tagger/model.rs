use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::crf;
use super::lstm::{Lstm, LstmTrace};
use super::Hyperparams;
use crate::corpus::{Boundary, EntityType, Label, Sentence};
use crate::embeddings::{EmbeddingTable, OovStore};
use crate::linalg::{axpy, dot, Matrix};
use crate::{Error, Result};

/// Bound of the uniform initialization of every trainable parameter.
pub const INIT_RANGE: f64 = 0.1;

/// Which parts of the token representation feed the token Bi-LSTM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InputMode {
    Full,
    WordOnly,
    CharOnly,
}

impl InputMode {
    pub fn uses_words(self) -> bool {
        self != InputMode::CharOnly
    }

    pub fn uses_chars(self) -> bool {
        self != InputMode::WordOnly
    }

    pub fn as_str(self) -> &'static str {
        match self {
            InputMode::Full => "full",
            InputMode::WordOnly => "word_only",
            InputMode::CharOnly => "char_only",
        }
    }
}

impl fmt::Display for InputMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InputMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(InputMode::Full),
            "word_only" => Ok(InputMode::WordOnly),
            "char_only" => Ok(InputMode::CharOnly),
            _ => Err(Error::Invalid(format!("unknown input mode `{s}`"))),
        }
    }
}

/// Ordered output labels: `O` first, then `B I E S` for each entity type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet {
    labels: Vec<Label>,
}

impl LabelSet {
    pub fn biose(types: &[EntityType]) -> Self {
        let mut labels = vec![Label::Outside];
        for &ty in types {
            for b in [
                Boundary::Begin,
                Boundary::Inside,
                Boundary::End,
                Boundary::Single,
            ] {
                labels.push(Label::Entity(b, ty));
            }
        }
        LabelSet { labels }
    }

    /// Rebuilds a label set from its serialized order. Labels must be distinct.
    pub fn from_labels(labels: Vec<Label>) -> Result<Self> {
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::Invalid(format!("duplicate label {l}")));
            }
        }
        if labels.is_empty() {
            return Err(Error::Invalid("empty label set".to_string()));
        }
        Ok(LabelSet { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn index_of(&self, label: Label) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn label(&self, index: usize) -> Label {
        self.labels[index]
    }
}

/// Printable ASCII plus a blank symbol (for empty words) and an unknown symbol.
pub struct CharInventory;

impl CharInventory {
    pub const PRINTABLE: usize = 95;
    pub const BLANK: usize = 95;
    pub const UNKNOWN: usize = 96;
    pub const SIZE: usize = 97;

    pub fn id(c: char) -> usize {
        if (' '..='~').contains(&c) {
            c as usize - ' ' as usize
        } else {
            Self::UNKNOWN
        }
    }

    /// Character ids of a romanized word; an empty word is the blank symbol.
    pub fn encode(word: &str) -> Vec<usize> {
        if word.is_empty() {
            return vec![Self::BLANK];
        }
        word.chars().map(Self::id).collect()
    }

    /// Inventory description used in model files.
    pub fn describe() -> String {
        let mut s: String = (' '..='~').collect();
        s.push_str("<blank><unk>");
        s
    }
}

/// All trainable tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub char_embeddings: Vec<f64>,
    pub char_forward: Lstm,
    pub char_backward: Lstm,
    pub token_forward: Lstm,
    pub token_backward: Lstm,
    /// `L × 2·token_hidden`, row-major.
    pub projection: Vec<f64>,
    pub projection_bias: Vec<f64>,
    pub transitions: Matrix,
}

pub const GROUP_NAMES: [&str; 12] = [
    "char_embeddings",
    "char_lstm.forward.weights",
    "char_lstm.forward.bias",
    "char_lstm.backward.weights",
    "char_lstm.backward.bias",
    "token_lstm.forward.weights",
    "token_lstm.forward.bias",
    "token_lstm.backward.weights",
    "token_lstm.backward.bias",
    "projection.weights",
    "projection.bias",
    "transitions",
];

impl Params {
    pub fn zeros(hyper: &Hyperparams, labels: usize) -> Self {
        let token_input = token_input_dim(hyper);
        Params {
            char_embeddings: vec![0.0; CharInventory::SIZE * hyper.char_dim],
            char_forward: Lstm::zeros(hyper.char_dim, hyper.char_hidden),
            char_backward: Lstm::zeros(hyper.char_dim, hyper.char_hidden),
            token_forward: Lstm::zeros(token_input, hyper.token_hidden),
            token_backward: Lstm::zeros(token_input, hyper.token_hidden),
            projection: vec![0.0; labels * 2 * hyper.token_hidden],
            projection_bias: vec![0.0; labels],
            transitions: Matrix::zeros(labels + 2, labels + 2),
        }
    }

    /// Named flat views of every tensor, in a fixed order.
    pub fn groups(&self) -> [(&'static str, &[f64]); 12] {
        [
            (GROUP_NAMES[0], &self.char_embeddings),
            (GROUP_NAMES[1], &self.char_forward.weights),
            (GROUP_NAMES[2], &self.char_forward.bias),
            (GROUP_NAMES[3], &self.char_backward.weights),
            (GROUP_NAMES[4], &self.char_backward.bias),
            (GROUP_NAMES[5], &self.token_forward.weights),
            (GROUP_NAMES[6], &self.token_forward.bias),
            (GROUP_NAMES[7], &self.token_backward.weights),
            (GROUP_NAMES[8], &self.token_backward.bias),
            (GROUP_NAMES[9], &self.projection),
            (GROUP_NAMES[10], &self.projection_bias),
            (GROUP_NAMES[11], self.transitions.as_slice()),
        ]
    }

    pub fn groups_mut(&mut self) -> [(&'static str, &mut [f64]); 12] {
        [
            (GROUP_NAMES[0], &mut self.char_embeddings),
            (GROUP_NAMES[1], &mut self.char_forward.weights),
            (GROUP_NAMES[2], &mut self.char_forward.bias),
            (GROUP_NAMES[3], &mut self.char_backward.weights),
            (GROUP_NAMES[4], &mut self.char_backward.bias),
            (GROUP_NAMES[5], &mut self.token_forward.weights),
            (GROUP_NAMES[6], &mut self.token_forward.bias),
            (GROUP_NAMES[7], &mut self.token_backward.weights),
            (GROUP_NAMES[8], &mut self.token_backward.bias),
            (GROUP_NAMES[9], &mut self.projection),
            (GROUP_NAMES[10], &mut self.projection_bias),
            (GROUP_NAMES[11], self.transitions.as_mut_slice()),
        ]
    }

    pub fn len(&self) -> usize {
        self.groups().iter().map(|(_, g)| g.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn fill(&mut self, value: f64) {
        for (_, g) in self.groups_mut() {
            g.fill(value);
        }
    }

    /// SHA-256 over the little-endian bytes of every parameter, hex encoded.
    pub fn checksum(&self) -> String {
        let mut hasher = Sha256::new();
        for (_, g) in self.groups() {
            for x in g {
                hasher.update(x.to_le_bytes());
            }
        }
        let digest: [u8; 32] = hasher.finalize().into();
        let mut out = String::with_capacity(64);
        for b in digest {
            out.push_str(&format!("{b:02x}"));
        }
        out
    }
}

fn token_input_dim(hyper: &Hyperparams) -> usize {
    let mut dim = 0;
    if hyper.input_mode.uses_words() {
        dim += hyper.word_dim;
    }
    if hyper.input_mode.uses_chars() {
        dim += 2 * hyper.char_hidden;
    }
    dim
}

/// Word vectors for the tagger: the frozen table plus per-run vectors for unknown words.
#[derive(Debug, Clone)]
pub struct WordVectors<'a> {
    table: &'a EmbeddingTable,
    oov: OovStore,
    shared: BTreeMap<String, Arc<[f64]>>,
}

impl<'a> WordVectors<'a> {
    pub fn new(table: &'a EmbeddingTable, seed: u64) -> Self {
        WordVectors {
            table,
            oov: OovStore::new(seed, table.dim()),
            shared: BTreeMap::new(),
        }
    }

    pub fn table(&self) -> &EmbeddingTable {
        self.table
    }

    pub fn oov_count(&self) -> usize {
        self.oov.len()
    }

    pub fn vector(&mut self, word: &str) -> Arc<[f64]> {
        if let Some(v) = self.shared.get(word) {
            return v.clone();
        }
        let v: Arc<[f64]> = crate::embeddings::lookup(self.table, word, &mut self.oov).into();
        self.shared.insert(word.to_string(), v.clone());
        v
    }
}

/// A sentence prepared for the network.
#[derive(Debug, Clone)]
pub struct EncodedSentence {
    pub words: Vec<Arc<[f64]>>,
    pub chars: Vec<Vec<usize>>,
    /// Gold label indices, when the sentence's labels are in the label set.
    pub gold: Option<Vec<usize>>,
}

impl EncodedSentence {
    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }
}

/// Cached activations of one forward pass.
pub struct Forward {
    pub emissions: Matrix,
    char_traces: Vec<(LstmTrace, LstmTrace)>,
    char_masks: Vec<Vec<f64>>,
    token_trace: (LstmTrace, LstmTrace),
    hidden: Vec<Vec<f64>>,
    hidden_masks: Vec<Vec<f64>>,
}

/// Inverted-dropout mask: entries are `0` or `1 / (1 − rate)`.
fn dropout_mask(rng: Option<&mut ChaCha8Rng>, rate: f64, len: usize) -> Vec<f64> {
    match rng {
        Some(rng) if rate > 0.0 => {
            let keep = 1.0 - rate;
            (0..len)
                .map(|_| {
                    if rng.random::<f64>() < keep {
                        1.0 / keep
                    } else {
                        0.0
                    }
                })
                .collect()
        }
        _ => Vec::new(),
    }
}

fn apply_mask(values: &mut [f64], mask: &[f64]) {
    if !mask.is_empty() {
        values.iter_mut().zip(mask).for_each(|(v, m)| *v *= m);
    }
}

/// Model parameters together with the settings that shaped them.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggerModel {
    pub hyper: Hyperparams,
    pub labels: LabelSet,
    pub params: Params,
}

impl TaggerModel {
    /// Fresh model with every parameter drawn uniformly from `[-0.1, 0.1]`.
    pub fn new(hyper: Hyperparams, labels: LabelSet) -> Result<Self> {
        hyper.validate()?;
        let mut params = Params::zeros(&hyper, labels.len());
        let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
        for (_, group) in params.groups_mut() {
            for x in group.iter_mut() {
                *x = rng.random_range(-INIT_RANGE..=INIT_RANGE);
            }
        }
        Ok(TaggerModel {
            hyper,
            labels,
            params,
        })
    }

    /// Rebuilds a model from stored parameters, checking every shape.
    pub fn from_parts(hyper: Hyperparams, labels: LabelSet, params: Params) -> Result<Self> {
        hyper.validate()?;
        let expected = Params::zeros(&hyper, labels.len());
        for ((name, want), (_, got)) in expected.groups().iter().zip(params.groups().iter()) {
            if want.len() != got.len() {
                return Err(Error::Shape(format!(
                    "{name}: expected {} values, found {}",
                    want.len(),
                    got.len()
                )));
            }
        }
        Ok(TaggerModel {
            hyper,
            labels,
            params,
        })
    }

    pub fn token_input_dim(&self) -> usize {
        token_input_dim(&self.hyper)
    }

    /// Prepares a sentence. `romanized` holds one romanized surface per token;
    /// word vectors are looked up by the original surface.
    pub fn encode(
        &self,
        sentence: &Sentence,
        romanized: &[String],
        words: &mut WordVectors<'_>,
    ) -> Result<EncodedSentence> {
        if romanized.len() != sentence.len() {
            return Err(Error::Shape(format!(
                "{} romanized surfaces for {} tokens",
                romanized.len(),
                sentence.len()
            )));
        }
        let word_vectors = if self.hyper.input_mode.uses_words() {
            if words.table().dim() != self.hyper.word_dim {
                return Err(Error::DimMismatch {
                    expected: self.hyper.word_dim,
                    found: words.table().dim(),
                });
            }
            sentence.surfaces().map(|w| words.vector(w)).collect()
        } else {
            Vec::new()
        };
        let chars = romanized.iter().map(|r| CharInventory::encode(r)).collect();
        let gold = sentence
            .tokens()
            .iter()
            .map(|t| self.labels.index_of(t.label))
            .collect();
        Ok(EncodedSentence {
            words: word_vectors,
            chars,
            gold,
        })
    }

    fn char_row(&self, id: usize) -> &[f64] {
        let d = self.hyper.char_dim;
        &self.params.char_embeddings[id * d..(id + 1) * d]
    }

    fn char_forward(&self, ids: &[usize]) -> (Vec<f64>, LstmTrace, LstmTrace) {
        let p = &self.params;
        let (out_f, trace_f) = p
            .char_forward
            .forward(ids.iter().map(|&id| self.char_row(id)));
        let (out_b, trace_b) = p
            .char_backward
            .forward(ids.iter().rev().map(|&id| self.char_row(id)));
        let mut repr = out_f[out_f.len() - 1].clone();
        repr.extend_from_slice(&out_b[out_b.len() - 1]);
        (repr, trace_f, trace_b)
    }

    /// Final forward and backward hidden states of the character Bi-LSTM.
    pub fn char_encode(&self, romanized: &str) -> Vec<f64> {
        self.char_forward(&CharInventory::encode(romanized)).0
    }

    /// Runs the network. With `dropout` set, dropout is applied to the
    /// character encodings and the token Bi-LSTM outputs.
    pub fn forward(&self, sent: &EncodedSentence, mut dropout: Option<&mut ChaCha8Rng>) -> Forward {
        let hyper = &self.hyper;
        let mode = hyper.input_mode;
        let steps = sent.len();
        let mut char_traces = Vec::new();
        let mut char_masks = Vec::new();
        let mut inputs: Vec<Vec<f64>> = Vec::with_capacity(steps);
        for t in 0..steps {
            let mut x = Vec::with_capacity(self.token_input_dim());
            if mode.uses_words() {
                x.extend_from_slice(&sent.words[t]);
            }
            if mode.uses_chars() {
                let (mut repr, tf, tb) = self.char_forward(&sent.chars[t]);
                let mask = dropout_mask(dropout.as_deref_mut(), hyper.dropout, repr.len());
                apply_mask(&mut repr, &mask);
                x.extend_from_slice(&repr);
                char_traces.push((tf, tb));
                char_masks.push(mask);
            }
            inputs.push(x);
        }
        let p = &self.params;
        let (out_f, trace_f) = p.token_forward.forward(inputs.iter().map(Vec::as_slice));
        let (out_b, trace_b) = p
            .token_backward
            .forward(inputs.iter().rev().map(Vec::as_slice));
        let labels = self.labels.len();
        let width = 2 * hyper.token_hidden;
        let mut emissions = Matrix::zeros(steps, labels);
        let mut hidden = Vec::with_capacity(steps);
        let mut hidden_masks = Vec::with_capacity(steps);
        for t in 0..steps {
            let mut h = out_f[t].clone();
            h.extend_from_slice(&out_b[steps - 1 - t]);
            let mask = dropout_mask(dropout.as_deref_mut(), hyper.dropout, h.len());
            apply_mask(&mut h, &mask);
            for l in 0..labels {
                emissions[(t, l)] =
                    dot(&p.projection[l * width..(l + 1) * width], &h) + p.projection_bias[l];
            }
            hidden.push(h);
            hidden_masks.push(mask);
        }
        Forward {
            emissions,
            char_traces,
            char_masks,
            token_trace: (trace_f, trace_b),
            hidden,
            hidden_masks,
        }
    }

    /// Emission scores without dropout.
    pub fn emissions(&self, sent: &EncodedSentence) -> Matrix {
        self.forward(sent, None).emissions
    }

    /// Backpropagates `d_emissions` through the network into `grad`.
    /// Frozen word vectors receive nothing.
    pub fn backward(
        &self,
        sent: &EncodedSentence,
        fwd: &Forward,
        d_emissions: &Matrix,
        grad: &mut Params,
    ) {
        let hyper = &self.hyper;
        let p = &self.params;
        let steps = sent.len();
        let labels = self.labels.len();
        let th = hyper.token_hidden;
        let width = 2 * th;
        let mut d_out_f = vec![Vec::new(); steps];
        let mut d_out_b = vec![Vec::new(); steps];
        for t in 0..steps {
            let mut dh = vec![0.0; width];
            for l in 0..labels {
                let d = d_emissions[(t, l)];
                axpy(
                    d,
                    &fwd.hidden[t],
                    &mut grad.projection[l * width..(l + 1) * width],
                );
                axpy(d, &p.projection[l * width..(l + 1) * width], &mut dh);
                grad.projection_bias[l] += d;
            }
            apply_mask(&mut dh, &fwd.hidden_masks[t]);
            d_out_b[steps - 1 - t] = dh.split_off(th);
            d_out_f[t] = dh;
        }
        let dx_f = p
            .token_forward
            .backward(&fwd.token_trace.0, &d_out_f, &mut grad.token_forward);
        let dx_b =
            p.token_backward
                .backward(&fwd.token_trace.1, &d_out_b, &mut grad.token_backward);
        if !hyper.input_mode.uses_chars() {
            return;
        }
        let offset = if hyper.input_mode.uses_words() {
            hyper.word_dim
        } else {
            0
        };
        let ch = hyper.char_hidden;
        let cd = hyper.char_dim;
        for t in 0..steps {
            let mut d_repr: Vec<f64> = (0..2 * ch)
                .map(|k| dx_f[t][offset + k] + dx_b[steps - 1 - t][offset + k])
                .collect();
            apply_mask(&mut d_repr, &fwd.char_masks[t]);
            let ids = &sent.chars[t];
            let n = ids.len();
            let mut d_f = vec![vec![0.0; ch]; n];
            let mut d_b = vec![vec![0.0; ch]; n];
            d_f[n - 1].copy_from_slice(&d_repr[..ch]);
            d_b[n - 1].copy_from_slice(&d_repr[ch..]);
            let (trace_f, trace_b) = &fwd.char_traces[t];
            let de_f = p
                .char_forward
                .backward(trace_f, &d_f, &mut grad.char_forward);
            let de_b = p
                .char_backward
                .backward(trace_b, &d_b, &mut grad.char_backward);
            for k in 0..n {
                let row = &mut grad.char_embeddings[ids[k] * cd..(ids[k] + 1) * cd];
                axpy(1.0, &de_f[k], row);
                axpy(1.0, &de_b[n - 1 - k], row);
            }
        }
    }

    /// CRF loss of the gold path; accumulates its gradient into `grad`.
    pub fn loss_and_gradient(
        &self,
        sent: &EncodedSentence,
        dropout: Option<&mut ChaCha8Rng>,
        grad: &mut Params,
    ) -> Result<f64> {
        let gold = sent.gold.as_ref().ok_or_else(|| {
            Error::Invalid("sentence has labels outside the label set".to_string())
        })?;
        let fwd = self.forward(sent, dropout);
        let g = crf::neg_log_likelihood_grad(&fwd.emissions, &self.params.transitions, gold);
        axpy(
            1.0,
            g.d_transitions.as_slice(),
            grad.transitions.as_mut_slice(),
        );
        self.backward(sent, &fwd, &g.d_emissions, grad);
        Ok(g.loss)
    }

    /// CRF loss of the gold path without dropout.
    pub fn loss(&self, sent: &EncodedSentence) -> Result<f64> {
        let gold = sent.gold.as_ref().ok_or_else(|| {
            Error::Invalid("sentence has labels outside the label set".to_string())
        })?;
        Ok(crf::neg_log_likelihood(
            &self.emissions(sent),
            &self.params.transitions,
            gold,
        ))
    }

    /// Best label path.
    pub fn decode(&self, sent: &EncodedSentence) -> Vec<Label> {
        let (path, _) = crf::viterbi_decode(&self.emissions(sent), &self.params.transitions);
        path.into_iter().map(|i| self.labels.label(i)).collect()
    }
}
