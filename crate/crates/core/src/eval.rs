//! Entity-level scoring, per-length breakdown and the ablation runner.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::corpus::{
    convert_schema, extract_spans, shuffle_ablation, Corpus, EntitySpan, EntityType, Label, Schema,
};
use crate::embeddings::EmbeddingTable;
use crate::romanizer::{romanize_corpus, Romanizer};
use crate::tagger::{
    self, Hyperparams, InputMode, LabelSet, TaggerModel, TrainReport, WordVectors,
};
use crate::translation::{translate_corpus, BilingualDictionary, TranslationStats};
use crate::{Error, Result};

/// Precision, recall and F1 in `[0, 1]` with the counts behind them.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScoreTriple {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub gold: usize,
    pub predicted: usize,
    pub correct: usize,
}

impl ScoreTriple {
    pub fn from_counts(gold: usize, predicted: usize, correct: usize) -> Self {
        let ratio = |n: usize, d: usize| if d == 0 { 0.0 } else { n as f64 / d as f64 };
        let precision = ratio(correct, predicted);
        let recall = ratio(correct, gold);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        ScoreTriple {
            precision,
            recall,
            f1,
            gold,
            predicted,
            correct,
        }
    }
}

fn check_shapes(gold: &[Vec<Label>], pred: &[Vec<Label>]) -> Result<()> {
    if gold.len() != pred.len() {
        return Err(Error::Shape(format!(
            "{} gold sentences, {} predicted",
            gold.len(),
            pred.len()
        )));
    }
    for (i, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.len() != p.len() {
            return Err(Error::Shape(format!(
                "sentence {i}: {} gold tokens, {} predicted",
                g.len(),
                p.len()
            )));
        }
    }
    Ok(())
}

fn span_sets(
    gold: &[Vec<Label>],
    pred: &[Vec<Label>],
) -> Result<(BTreeSet<EntitySpan>, BTreeSet<EntitySpan>)> {
    check_shapes(gold, pred)?;
    let collect = |seqs: &[Vec<Label>]| -> BTreeSet<EntitySpan> {
        seqs.iter()
            .enumerate()
            .flat_map(|(i, labels)| extract_spans(i, labels))
            .collect()
    };
    Ok((collect(gold), collect(pred)))
}

/// Exact span-and-type matching over parallel label sequences (any schema).
pub fn score_label_sequences(gold: &[Vec<Label>], pred: &[Vec<Label>]) -> Result<ScoreTriple> {
    let (g, p) = span_sets(gold, pred)?;
    Ok(ScoreTriple::from_counts(
        g.len(),
        p.len(),
        g.intersection(&p).count(),
    ))
}

fn label_sequences(corpus: &Corpus) -> Vec<Vec<Label>> {
    corpus.sentences.iter().map(|s| s.labels()).collect()
}

pub fn entity_f1(gold: &Corpus, pred: &Corpus) -> Result<ScoreTriple> {
    score_label_sequences(&label_sequences(gold), &label_sequences(pred))
}

/// Entity length buckets `1`, `2` and `≥3`.
pub const BUCKET_NAMES: [&str; 3] = ["1", "2", ">=3"];

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LengthBuckets {
    pub buckets: [ScoreTriple; 3],
}

fn bucket(span: &EntitySpan) -> usize {
    span.len().clamp(1, 3) - 1
}

/// Precision buckets predicted spans by predicted length, recall buckets
/// gold spans by gold length.
pub fn f1_by_length(gold: &Corpus, pred: &Corpus) -> Result<LengthBuckets> {
    let (g, p) = span_sets(&label_sequences(gold), &label_sequences(pred))?;
    let mut counts = [(0usize, 0usize, 0usize); 3];
    for s in &g {
        counts[bucket(s)].0 += 1;
        if p.contains(s) {
            counts[bucket(s)].2 += 1;
        }
    }
    for s in &p {
        counts[bucket(s)].1 += 1;
    }
    let buckets =
        counts.map(|(gold, predicted, correct)| ScoreTriple::from_counts(gold, predicted, correct));
    Ok(LengthBuckets { buckets })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Full,
    Shuffle,
    WordOnly,
    CharOnly,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Full,
        Variant::Shuffle,
        Variant::WordOnly,
        Variant::CharOnly,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::Shuffle => "shuffle",
            Variant::WordOnly => "word_only",
            Variant::CharOnly => "char_only",
        }
    }

    /// Row name in the ablation table.
    pub fn row_name(self) -> &'static str {
        match self {
            Variant::Full => "Full Model",
            Variant::Shuffle => "Shuffle",
            Variant::WordOnly => "Word-only",
            Variant::CharOnly => "Char-only",
        }
    }

    pub fn input_mode(self) -> InputMode {
        match self {
            Variant::Full | Variant::Shuffle => InputMode::Full,
            Variant::WordOnly => InputMode::WordOnly,
            Variant::CharOnly => InputMode::CharOnly,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown variant `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AblationConfig {
    pub variant: Variant,
    pub seed: u64,
}

/// Everything a transfer run needs besides the corpora.
#[derive(Debug, Clone, Copy)]
pub struct TransferResources<'a> {
    /// Bilingual table: aligned target vectors merged with source vectors.
    pub table: &'a EmbeddingTable,
    pub dictionary: &'a BilingualDictionary,
    pub romanizer: &'a Romanizer,
    pub alpha: f64,
    pub hyper: &'a Hyperparams,
}

#[derive(Debug, Clone)]
pub struct TransferRun {
    pub variant: Variant,
    pub test: ScoreTriple,
    pub lengths: LengthBuckets,
    pub report: TrainReport,
    pub translation: TranslationStats,
    pub model: TaggerModel,
    pub predictions: Corpus,
}

/// Translates the source-language train and dev sets, trains the tagger on
/// them, and scores it on the target-language test set.
///
/// The shuffle variant shuffles the translated training data; the test set
/// is never altered.
pub fn run_transfer(
    train: &Corpus,
    dev: &Corpus,
    test: &Corpus,
    config: AblationConfig,
    resources: &TransferResources<'_>,
) -> Result<TransferRun> {
    let train = convert_schema(train, Schema::Biose);
    let dev = convert_schema(dev, Schema::Biose);
    let test = convert_schema(test, Schema::Biose);
    let (mut train_t, translation) = translate_corpus(
        &train,
        resources.dictionary,
        resources.table,
        resources.alpha,
    );
    let (dev_t, _) = translate_corpus(&dev, resources.dictionary, resources.table, resources.alpha);
    if config.variant == Variant::Shuffle {
        train_t = shuffle_ablation(&train_t, config.seed);
    }
    let train_r = romanize_corpus(&train_t, resources.romanizer);
    let dev_r = romanize_corpus(&dev_t, resources.romanizer);
    let test_r = romanize_corpus(&test, resources.romanizer);

    let hyper = Hyperparams {
        seed: config.seed,
        input_mode: config.variant.input_mode(),
        ..resources.hyper.clone()
    };
    let model = TaggerModel::new(hyper, LabelSet::biose(&EntityType::ALL))?;
    let mut words = WordVectors::new(resources.table, config.seed);
    let outcome = tagger::train(
        model,
        (&train_t, &train_r.surfaces),
        (&dev_t, &dev_r.surfaces),
        &mut words,
    )?;
    let predictions = tagger::predict(&outcome.model, &test, &test_r.surfaces, &mut words)?;
    Ok(TransferRun {
        variant: config.variant,
        test: entity_f1(&test, &predictions)?,
        lengths: f1_by_length(&test, &predictions)?,
        report: outcome.report,
        translation,
        model: outcome.model,
        predictions,
    })
}

/// One transfer run per configuration, in order.
pub fn run_ablation(
    train: &Corpus,
    dev: &Corpus,
    test: &Corpus,
    configs: &[AblationConfig],
    resources: &TransferResources<'_>,
) -> Result<Vec<TransferRun>> {
    configs
        .iter()
        .map(|&c| run_transfer(train, dev, test, c, resources))
        .collect()
}

/// Aligned plain-text table of test scores (×100).
pub fn ablation_table(rows: &[(Variant, ScoreTriple)]) -> String {
    let mut out = format!("{:<12} {:>9} {:>9} {:>9}\n", "Model", "P", "R", "F1");
    for (variant, s) in rows {
        out.push_str(&format!(
            "{:<12} {:>9.2} {:>9.2} {:>9.2}\n",
            variant.row_name(),
            s.precision * 100.0,
            s.recall * 100.0,
            s.f1 * 100.0
        ));
    }
    out
}

/// Aligned plain-text table of per-length scores (×100).
pub fn length_table(lengths: &LengthBuckets) -> String {
    let mut out = format!(
        "{:<8} {:>6} {:>6} {:>8} {:>9} {:>9} {:>9}\n",
        "Length", "Gold", "Pred", "Correct", "P", "R", "F1"
    );
    for (name, s) in BUCKET_NAMES.iter().zip(&lengths.buckets) {
        out.push_str(&format!(
            "{:<8} {:>6} {:>6} {:>8} {:>9.2} {:>9.2} {:>9.2}\n",
            name,
            s.gold,
            s.predicted,
            s.correct,
            s.precision * 100.0,
            s.recall * 100.0,
            s.f1 * 100.0
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_conll;

    fn corpus(tags: &[&str]) -> Corpus {
        let mut text = String::new();
        for sentence in tags {
            for (i, t) in sentence.split_whitespace().enumerate() {
                text.push_str(&format!("w{i} {t}\n"));
            }
            text.push('\n');
        }
        parse_conll(&text, 0, 1).unwrap()
    }

    #[test]
    fn identical_corpora_score_one() {
        let c = corpus(&["B-PER I-PER O B-LOC", "O B-ORG"]);
        let s = entity_f1(&c, &c).unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
        assert_eq!(s.gold, 3);
    }

    #[test]
    fn half_right() {
        let gold = corpus(&["B-PER O B-LOC O"]);
        let pred = corpus(&["B-PER O O B-LOC"]);
        let s = entity_f1(&gold, &pred).unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (0.5, 0.5, 0.5));
    }

    #[test]
    fn no_predictions_scores_zero() {
        let gold = corpus(&["B-PER O"]);
        let pred = corpus(&["O O"]);
        let s = entity_f1(&gold, &pred).unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn type_mismatch_is_wrong() {
        let s = entity_f1(&corpus(&["B-PER"]), &corpus(&["B-ORG"])).unwrap();
        assert_eq!(s.correct, 0);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        assert!(matches!(
            entity_f1(&corpus(&["O O"]), &corpus(&["O"])),
            Err(Error::Shape(_))
        ));
        assert!(entity_f1(&corpus(&["O"]), &corpus(&["O", "O"])).is_err());
    }

    #[test]
    fn matching_two_token_entity_fills_bucket_two() {
        let c = corpus(&["O B-LOC I-LOC"]);
        let b = f1_by_length(&c, &c).unwrap();
        assert_eq!(b.buckets[1].f1, 1.0);
        assert_eq!(b.buckets[0], ScoreTriple::default());
        assert_eq!(b.buckets[2], ScoreTriple::default());
    }

    #[test]
    fn split_long_entity_counts_by_own_length() {
        let gold = corpus(&["B-ORG I-ORG I-ORG I-ORG"]);
        let pred = corpus(&["B-ORG I-ORG B-ORG I-ORG"]);
        let b = f1_by_length(&gold, &pred).unwrap();
        assert_eq!(b.buckets[2].gold, 1);
        assert_eq!(b.buckets[2].recall, 0.0);
        assert_eq!(b.buckets[1].predicted, 2);
        assert_eq!(b.buckets[1].precision, 0.0);
    }

    #[test]
    fn variants_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.as_str().parse::<Variant>().unwrap(), v);
        }
        let t = ablation_table(&[(Variant::Full, ScoreTriple::from_counts(2, 2, 1))]);
        assert!(t.contains("Full Model"));
        assert!(t.contains("50.00"));
    }
}
