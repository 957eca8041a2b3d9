//! Word-by-word reverse translation of a source-language training corpus.
//!
//! When a source word has several candidate translations, each candidate
//! `t` is scored against the source word `w` and its sentence context:
//!
//! ```text
//! F(w, t) = α·cos(E(w), E(t)) + (1 − α)·Σⱼ cos(E(t), E(cⱼ)) / (dⱼ + 1)²
//! ```
//!
//! where `cⱼ` ranges over the other words of the sentence and `dⱼ` is the
//! distance in tokens. The highest-scoring candidate wins; ties go to the
//! candidate listed first in the dictionary.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::{Corpus, Sentence};
use crate::embeddings::{cosine, EmbeddingTable};
use crate::{Error, Result};

/// Default trade-off between pair similarity and context similarity.
pub const DEFAULT_ALPHA: f64 = 0.5;

/// Source word → candidate translations, in dictionary order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BilingualDictionary {
    entries: BTreeMap<String, Vec<String>>,
}

impl BilingualDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a candidate; repeated pairs are ignored.
    pub fn add(&mut self, source: impl Into<String>, target: impl Into<String>) {
        let candidates = self.entries.entry(source.into()).or_default();
        let target = target.into();
        if !candidates.contains(&target) {
            candidates.push(target);
        }
    }

    pub fn candidates(&self, source: &str) -> Option<&[String]> {
        self.entries.get(source).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }
}

/// One `source target` pair per line, tab or space separated.
pub fn load_dictionary(text: &str) -> Result<BilingualDictionary> {
    let mut dict = BilingualDictionary::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected `source target`, found {} fields", fields.len()),
            });
        }
        dict.add(fields[0], fields[1]);
    }
    Ok(dict)
}

/// A word to translate together with its weighted context.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoringContext<'a> {
    pub word: &'a str,
    /// Context words and their distance (≥ 1) from `word`.
    pub context: Vec<(&'a str, usize)>,
    pub alpha: f64,
}

impl<'a> ScoringContext<'a> {
    /// Every other token of `surfaces` is context for position `index`.
    pub fn in_sentence(surfaces: &[&'a str], index: usize, alpha: f64) -> Self {
        let context = surfaces
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != index)
            .map(|(j, &w)| (w, index.abs_diff(j)))
            .collect();
        ScoringContext {
            word: surfaces[index],
            context,
            alpha,
        }
    }
}

/// Context score of `candidate`; `-∞` when the candidate has no embedding.
///
/// Context words without an embedding contribute nothing; neither does the
/// pair term when the source word itself has no embedding.
pub fn score_candidate(ctx: &ScoringContext<'_>, candidate: &str, table: &EmbeddingTable) -> f64 {
    let Some(cand) = table.get(candidate) else {
        return f64::NEG_INFINITY;
    };
    let pair = table
        .get(ctx.word)
        .map_or(0.0, |w| cosine(w, cand).unwrap_or(0.0));
    let context: f64 = ctx
        .context
        .iter()
        .filter_map(|&(word, d)| {
            let c = table.get(word)?;
            let denom = (d as f64 + 1.0) * (d as f64 + 1.0);
            Some(cosine(cand, c).unwrap_or(0.0) / denom)
        })
        .sum();
    ctx.alpha * pair + (1.0 - ctx.alpha) * context
}

/// Index of the best candidate; the earliest wins ties, the first wins if none is embedded.
pub fn select_candidate(
    ctx: &ScoringContext<'_>,
    candidates: &[String],
    table: &EmbeddingTable,
) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, c) in candidates.iter().enumerate() {
        let score = score_candidate(ctx, c, table);
        if score > best_score {
            best = i;
            best_score = score;
        }
    }
    best
}

/// Replaces every word that has a dictionary entry with its best
/// translation. Context always uses the original surfaces; labels are copied.
pub fn translate_sentence(
    sentence: &Sentence,
    dict: &BilingualDictionary,
    table: &EmbeddingTable,
    alpha: f64,
) -> Sentence {
    translate_sentence_counted(sentence, dict, table, alpha).0
}

fn translate_sentence_counted(
    sentence: &Sentence,
    dict: &BilingualDictionary,
    table: &EmbeddingTable,
    alpha: f64,
) -> (Sentence, Vec<bool>) {
    let surfaces: Vec<&str> = sentence.surfaces().collect();
    let mut replaced = Vec::with_capacity(surfaces.len());
    let tokens = sentence
        .tokens()
        .iter()
        .enumerate()
        .map(|(i, token)| match dict.candidates(surfaces[i]) {
            Some(candidates) if !candidates.is_empty() => {
                let chosen = if candidates.len() == 1 {
                    0
                } else {
                    select_candidate(
                        &ScoringContext::in_sentence(&surfaces, i, alpha),
                        candidates,
                        table,
                    )
                };
                replaced.push(true);
                token
                    .with_surface(candidates[chosen].as_str())
                    .expect("dictionary words are single tokens")
            }
            _ => {
                replaced.push(false);
                token.clone()
            }
        })
        .collect();
    (
        Sentence::new(tokens).expect("translation preserves length"),
        replaced,
    )
}

/// Counts of translated and untouched tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TranslationStats {
    pub replaced: usize,
    pub kept: usize,
    /// `(replaced, kept)` keyed by the token's entity type, `O` for outside.
    pub per_type: BTreeMap<String, (usize, usize)>,
}

impl TranslationStats {
    pub fn total(&self) -> usize {
        self.replaced + self.kept
    }

    /// `key=value` lines.
    pub fn to_record(&self) -> String {
        let mut out = format!(
            "replaced={}\nkept={}\ntotal={}\n",
            self.replaced,
            self.kept,
            self.total()
        );
        for (ty, (r, k)) in &self.per_type {
            out.push_str(&format!("replaced.{ty}={r}\nkept.{ty}={k}\n"));
        }
        out
    }
}

pub fn translate_corpus(
    corpus: &Corpus,
    dict: &BilingualDictionary,
    table: &EmbeddingTable,
    alpha: f64,
) -> (Corpus, TranslationStats) {
    let mut stats = TranslationStats::default();
    let sentences = corpus
        .sentences
        .iter()
        .map(|s| {
            let (out, replaced) = translate_sentence_counted(s, dict, table, alpha);
            for (token, was_replaced) in s.tokens().iter().zip(replaced) {
                let key = token
                    .label
                    .entity_type()
                    .map_or_else(|| "O".to_string(), |t| t.to_string());
                let entry = stats.per_type.entry(key).or_default();
                if was_replaced {
                    stats.replaced += 1;
                    entry.0 += 1;
                } else {
                    stats.kept += 1;
                    entry.1 += 1;
                }
            }
            out
        })
        .collect();
    (
        Corpus::new(sentences, corpus.language.clone(), corpus.schema),
        stats,
    )
}
