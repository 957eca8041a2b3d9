use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::model::{EncodedSentence, Params, TaggerModel, WordVectors};
use crate::corpus::{Corpus, Label, Schema};
use crate::eval::score_label_sequences;
use crate::{Error, Result};

/// Generator streams derived from the run seed.
const SHUFFLE_STREAM: u64 = 1;
const DROPOUT_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    /// 0-based epoch index.
    pub epoch: usize,
    /// Summed CRF loss over the epoch's updates.
    pub loss: f64,
    pub dev_f1: f64,
    pub learning_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epochs: Vec<EpochRecord>,
    pub selected_epoch: usize,
    pub momentum: f64,
    pub checksum: String,
}

impl TrainReport {
    pub fn best_dev_f1(&self) -> f64 {
        self.epochs[self.selected_epoch].dev_f1
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: TaggerModel,
    pub report: TrainReport,
}

fn encode_all(
    model: &TaggerModel,
    corpus: &Corpus,
    romanized: &[Vec<String>],
    words: &mut WordVectors<'_>,
) -> Result<Vec<EncodedSentence>> {
    if romanized.len() != corpus.sentences.len() {
        return Err(Error::Shape(alloc::format!(
            "{} romanized sentences for {} sentences",
            romanized.len(),
            corpus.sentences.len()
        )));
    }
    corpus
        .sentences
        .iter()
        .zip(romanized)
        .map(|(s, r)| model.encode(s, r, words))
        .collect()
}

fn require_biose(corpus: &Corpus) -> Result<()> {
    if corpus.schema != Schema::Biose {
        return Err(Error::Invalid(
            "tagger corpora must use the BIOSE schema".to_string(),
        ));
    }
    Ok(())
}

/// Entity F1 of the model's decoding against the encoded gold labels.
fn dev_f1(model: &TaggerModel, dev: &[EncodedSentence], gold: &[Vec<Label>]) -> Result<f64> {
    let pred: Vec<Vec<Label>> = dev.iter().map(|s| model.decode(s)).collect();
    Ok(score_label_sequences(gold, &pred)?.f1)
}

/// Trains `model` with per-sentence SGD and returns the parameters of the
/// best dev epoch.
///
/// Each update clips every gradient component to `[-clip, clip]` and applies
/// `v ← μ·v + g; θ ← θ − lr·v`.
pub fn train(
    mut model: TaggerModel,
    train: (&Corpus, &[Vec<String>]),
    dev: (&Corpus, &[Vec<String>]),
    words: &mut WordVectors<'_>,
) -> Result<TrainOutcome> {
    let hyper = model.hyper.clone();
    hyper.validate()?;
    require_biose(train.0)?;
    require_biose(dev.0)?;
    if train.0.is_empty() || dev.0.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let train_set = encode_all(&model, train.0, train.1, words)?;
    if let Some(i) = train_set.iter().position(|s| s.gold.is_none()) {
        return Err(Error::Invalid(alloc::format!(
            "training sentence {i} has labels outside the label set"
        )));
    }
    let dev_set = encode_all(&model, dev.0, dev.1, words)?;
    let dev_gold: Vec<Vec<Label>> = dev.0.sentences.iter().map(|s| s.labels()).collect();

    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    shuffle_rng.set_stream(SHUFFLE_STREAM);
    let mut dropout_rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    dropout_rng.set_stream(DROPOUT_STREAM);

    let labels = model.labels.len();
    let mut grad = Params::zeros(&hyper, labels);
    let mut velocity = Params::zeros(&hyper, labels);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut records = Vec::with_capacity(hyper.epochs);
    let mut best: Option<(usize, f64, Params)> = None;

    for epoch in 0..hyper.epochs {
        let lr = hyper.learning_rate_for_epoch(epoch);
        order.shuffle(&mut shuffle_rng);
        let mut total = 0.0;
        for &i in &order {
            grad.fill(0.0);
            let loss = model.loss_and_gradient(&train_set[i], Some(&mut dropout_rng), &mut grad)?;
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch, sentence: i });
            }
            total += loss;
            let params = model.params.groups_mut();
            let grads = grad.groups();
            let vels = velocity.groups_mut();
            for (((_, p), (_, g)), (_, v)) in params.into_iter().zip(grads).zip(vels) {
                for ((p, &g), v) in p.iter_mut().zip(g).zip(v.iter_mut()) {
                    *v = hyper.momentum * *v + g.clamp(-hyper.clip, hyper.clip);
                    *p -= lr * *v;
                }
            }
        }
        let f1 = dev_f1(&model, &dev_set, &dev_gold)?;
        records.push(EpochRecord {
            epoch,
            loss: total,
            dev_f1: f1,
            learning_rate: lr,
        });
        if best.as_ref().is_none_or(|(_, b, _)| f1 > *b) {
            best = Some((epoch, f1, model.params.clone()));
        }
        if hyper.target_dev_f1.is_some_and(|t| f1 >= t) {
            break;
        }
    }

    let (selected_epoch, _, params) =
        best.ok_or_else(|| Error::Invalid("epochs must be positive".to_string()))?;
    model.params = params;
    let report = TrainReport {
        epochs: records,
        selected_epoch,
        momentum: hyper.momentum,
        checksum: model.params.checksum(),
    };
    Ok(TrainOutcome { model, report })
}

/// Viterbi labels for one sentence; its input labels are ignored.
pub fn predict_sentence(
    model: &TaggerModel,
    sentence: &crate::corpus::Sentence,
    romanized: &[String],
    words: &mut WordVectors<'_>,
) -> Result<Vec<Label>> {
    Ok(model.decode(&model.encode(sentence, romanized, words)?))
}

/// Copy of `corpus` (in BIOSE) carrying the model's predicted labels.
pub fn predict(
    model: &TaggerModel,
    corpus: &Corpus,
    romanized: &[Vec<String>],
    words: &mut WordVectors<'_>,
) -> Result<Corpus> {
    let encoded = encode_all(model, corpus, romanized, words)?;
    let sentences = corpus
        .sentences
        .iter()
        .zip(&encoded)
        .map(|(s, e)| s.relabel(&model.decode(e)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Corpus::new(
        sentences,
        corpus.language.clone(),
        Schema::Biose,
    ))
}
