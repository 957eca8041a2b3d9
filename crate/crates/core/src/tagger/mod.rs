//! Bi-LSTM-CRF sequence labeler.
//!
//! Each token is represented by its frozen bilingual word vector
//! concatenated with a character Bi-LSTM encoding of its romanized surface.
//! One token-level Bi-LSTM reads the sentence, a linear layer produces
//! per-label emission scores, and a linear-chain CRF scores label paths.

pub mod crf;
mod gradcheck;
pub mod lstm;
mod model;
mod train;

pub use gradcheck::{check_gradients, GradCheckReport, GroupCheck};
pub use model::{
    CharInventory, EncodedSentence, Forward, InputMode, LabelSet, Params, TaggerModel, WordVectors,
};
pub use train::{predict, predict_sentence, train, EpochRecord, TrainOutcome, TrainReport};

use alloc::format;

use crate::{Error, Result};

/// Training and architecture settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparams {
    pub word_dim: usize,
    pub char_dim: usize,
    /// Hidden size per direction of the character Bi-LSTM.
    pub char_hidden: usize,
    /// Hidden size per direction of the token Bi-LSTM.
    pub token_hidden: usize,
    pub dropout: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub decay_rate: f64,
    pub momentum: f64,
    /// Every gradient component is clamped to `[-clip, clip]`.
    pub clip: f64,
    pub seed: u64,
    pub input_mode: InputMode,
    /// Stop as soon as dev F1 reaches this value.
    pub target_dev_f1: Option<f64>,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            word_dim: 300,
            char_dim: 300,
            char_hidden: 300,
            token_hidden: 300,
            dropout: 0.5,
            epochs: 200,
            learning_rate: 0.01,
            decay_rate: 0.05,
            momentum: 0.9,
            clip: 5.0,
            seed: 0,
            input_mode: InputMode::Full,
            target_dev_f1: None,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Invalid(format!("hyperparameter {what}")));
        if !(0.0..1.0).contains(&self.dropout) {
            return bad("dropout must lie in [0, 1)");
        }
        if self.clip.is_nan() || self.clip <= 0.0 {
            return bad("clip must be positive");
        }
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return bad("learning_rate must be positive");
        }
        if self.decay_rate.is_nan() || self.decay_rate < 0.0 || !(0.0..1.0).contains(&self.momentum)
        {
            return bad("decay_rate must be ≥ 0 and momentum in [0, 1)");
        }
        if self.char_dim == 0
            || self.char_hidden == 0
            || self.token_hidden == 0
            || self.word_dim == 0
        {
            return bad("dimensions must be positive");
        }
        Ok(())
    }

    /// Learning rate for 0-based epoch `epoch`: `lr / (1 + epoch·dr)`, i.e.
    /// the rate set after epoch `epoch − 1` finished.
    pub fn learning_rate_for_epoch(&self, epoch: usize) -> f64 {
        self.learning_rate / (1.0 + epoch as f64 * self.decay_rate)
    }
}

#[cfg(test)]
mod tests;
