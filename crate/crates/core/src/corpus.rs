//! Labeled corpora in CoNLL column format and the BIO/BIOSE tag schemas.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityType {
    Per,
    Org,
    Loc,
    Misc,
}

impl EntityType {
    pub const ALL: [EntityType; 4] = [
        EntityType::Per,
        EntityType::Org,
        EntityType::Loc,
        EntityType::Misc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityType::Per => "PER",
            EntityType::Org => "ORG",
            EntityType::Loc => "LOC",
            EntityType::Misc => "MISC",
        }
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "PER" => Ok(EntityType::Per),
            "ORG" => Ok(EntityType::Org),
            "LOC" => Ok(EntityType::Loc),
            "MISC" => Ok(EntityType::Misc),
            _ => Err(Error::Invalid(format!("unknown entity type `{s}`"))),
        }
    }
}

/// Position of a token inside an entity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Boundary {
    Begin,
    Inside,
    End,
    Single,
}

impl Boundary {
    fn prefix(self) -> char {
        match self {
            Boundary::Begin => 'B',
            Boundary::Inside => 'I',
            Boundary::End => 'E',
            Boundary::Single => 'S',
        }
    }
}

/// A token's NER tag. `Outside` carries no type, every other position does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Outside,
    Entity(Boundary, EntityType),
}

impl Label {
    pub fn entity_type(self) -> Option<EntityType> {
        match self {
            Label::Outside => None,
            Label::Entity(_, ty) => Some(ty),
        }
    }

    pub fn boundary(self) -> Option<Boundary> {
        match self {
            Label::Outside => None,
            Label::Entity(b, _) => Some(b),
        }
    }

    /// Whether the label may appear in `schema`.
    pub fn fits(self, schema: Schema) -> bool {
        !matches!(
            (self, schema),
            (
                Label::Entity(Boundary::End | Boundary::Single, _),
                Schema::Bio
            )
        )
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Outside => f.write_str("O"),
            Label::Entity(b, ty) => write!(f, "{}-{}", b.prefix(), ty),
        }
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "O" {
            return Ok(Label::Outside);
        }
        let invalid = || Error::Invalid(format!("unknown label `{s}`"));
        let (prefix, ty) = s.split_once('-').ok_or_else(invalid)?;
        let boundary = match prefix {
            "B" => Boundary::Begin,
            "I" => Boundary::Inside,
            "E" => Boundary::End,
            "S" => Boundary::Single,
            _ => return Err(invalid()),
        };
        let ty = ty.parse().map_err(|_| invalid())?;
        Ok(Label::Entity(boundary, ty))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Schema {
    Bio,
    Biose,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    surface: String,
    pub label: Label,
}

impl Token {
    /// Fails if `surface` is empty or contains whitespace.
    pub fn new(surface: impl Into<String>, label: Label) -> Result<Self> {
        let surface = surface.into();
        if surface.is_empty() || surface.chars().any(char::is_whitespace) {
            return Err(Error::Invalid(format!("bad token surface {surface:?}")));
        }
        Ok(Token { surface, label })
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    /// Replaces the surface, keeping the label. Same validity rules as [`Token::new`].
    pub fn with_surface(&self, surface: impl Into<String>) -> Result<Self> {
        Token::new(surface, self.label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sentence {
    tokens: Vec<Token>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::Invalid("empty sentence".to_string()));
        }
        Ok(Sentence { tokens })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.tokens.iter().map(|t| t.label).collect()
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(Token::surface)
    }

    /// Same surfaces, new labels. `labels` must have the sentence's length.
    pub fn relabel(&self, labels: &[Label]) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::Shape(format!(
                "{} labels for {} tokens",
                labels.len(),
                self.len()
            )));
        }
        let tokens = self
            .tokens
            .iter()
            .zip(labels)
            .map(|(t, &label)| Token {
                surface: t.surface.clone(),
                label,
            })
            .collect();
        Ok(Sentence { tokens })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub sentences: Vec<Sentence>,
    pub language: String,
    pub schema: Schema,
}

impl Corpus {
    pub fn new(sentences: Vec<Sentence>, language: impl Into<String>, schema: Schema) -> Self {
        Corpus {
            sentences,
            language: language.into(),
            schema,
        }
    }

    pub fn with_language(mut self, language: impl Into<String>) -> Self {
        self.language = language.into();
        self
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Applies `f` to every sentence's label sequence.
    pub fn map_labels(&self, schema: Schema, mut f: impl FnMut(&[Label]) -> Vec<Label>) -> Corpus {
        let sentences = self
            .sentences
            .iter()
            .map(|s| {
                s.relabel(&f(&s.labels()))
                    .expect("label map must preserve length")
            })
            .collect();
        Corpus {
            sentences,
            language: self.language.clone(),
            schema,
        }
    }

    /// All entity spans of the corpus, in sentence order.
    pub fn spans(&self) -> Vec<EntitySpan> {
        self.sentences
            .iter()
            .enumerate()
            .flat_map(|(i, s)| extract_spans(i, &s.labels()))
            .collect()
    }
}

/// A typed entity covering tokens `start..=end` of one sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntitySpan {
    pub sentence_index: usize,
    pub start: usize,
    pub end: usize,
    pub entity_type: EntityType,
}

impl EntitySpan {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Reads a BIO-labeled CoNLL file.
///
/// Columns are whitespace separated, blank lines end sentences and
/// `-DOCSTART-` lines are skipped. Line numbers in errors are 1-based.
pub fn parse_conll(text: &str, token_column: usize, label_column: usize) -> Result<Corpus> {
    parse_conll_with_schema(text, token_column, label_column, Schema::Bio)
}

/// Like [`parse_conll`], accepting the labels of `schema`.
pub fn parse_conll_with_schema(
    text: &str,
    token_column: usize,
    label_column: usize,
    schema: Schema,
) -> Result<Corpus> {
    let needed = token_column.max(label_column) + 1;
    let mut sentences = Vec::new();
    let mut current = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            if !current.is_empty() {
                sentences.push(Sentence {
                    tokens: core::mem::take(&mut current),
                });
            }
            continue;
        }
        if trimmed.starts_with("-DOCSTART-") {
            continue;
        }
        let columns: Vec<&str> = trimmed.split_whitespace().collect();
        if columns.len() < needed {
            return Err(Error::Parse {
                line: line_no,
                message: format!(
                    "expected at least {needed} columns, found {}",
                    columns.len()
                ),
            });
        }
        let raw_label = columns[label_column];
        let label = raw_label
            .parse::<Label>()
            .ok()
            .filter(|l| l.fits(schema))
            .ok_or_else(|| Error::UnknownLabel {
                line: line_no,
                label: raw_label.to_string(),
            })?;
        current.push(Token {
            surface: columns[token_column].to_string(),
            label,
        });
    }
    if !current.is_empty() {
        sentences.push(Sentence { tokens: current });
    }
    Ok(Corpus::new(sentences, "", schema))
}

/// Writes `token label` lines with a blank line after every sentence.
pub fn to_conll(corpus: &Corpus) -> String {
    let mut out = String::new();
    for sentence in &corpus.sentences {
        for token in sentence.tokens() {
            out.push_str(token.surface());
            out.push(' ');
            out.push_str(&token.label.to_string());
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

const NUMERIC_PUNCT: [char; 6] = ['.', ',', '%', '-', '/', '+'];

/// Digits once `. , % - / +` are stripped, with at least one digit left.
pub fn is_numeric(surface: &str) -> bool {
    let mut digits = 0usize;
    for c in surface.chars() {
        if c.is_ascii_digit() {
            digits += 1;
        } else if !NUMERIC_PUNCT.contains(&c) {
            return false;
        }
    }
    digits > 0
}

pub fn is_url(surface: &str) -> bool {
    ["http://", "https://", "ftp://", "www."]
        .iter()
        .any(|p| surface.starts_with(p))
}

/// Lowercase, then map numbers to `num` and URLs to `url`.
pub fn normalize_surface(surface: &str) -> String {
    let lower = surface.to_lowercase();
    if is_url(&lower) {
        "url".to_string()
    } else if is_numeric(&lower) {
        "num".to_string()
    } else {
        lower
    }
}

pub fn normalize_tokens(corpus: &Corpus) -> Corpus {
    let sentences = corpus
        .sentences
        .iter()
        .map(|s| Sentence {
            tokens: s
                .tokens
                .iter()
                .map(|t| Token {
                    surface: normalize_surface(&t.surface),
                    label: t.label,
                })
                .collect(),
        })
        .collect();
    Corpus {
        sentences,
        language: corpus.language.clone(),
        schema: corpus.schema,
    }
}

/// Entity spans of one label sequence.
///
/// Accepts BIO and BIOSE labels alike. Invalid sequences are repaired: an
/// `I-X` that does not continue an open `X` entity starts a new one, and a
/// stray `E-X` becomes a single-token entity.
pub fn extract_spans(sentence_index: usize, labels: &[Label]) -> Vec<EntitySpan> {
    let mut spans = Vec::new();
    let mut open: Option<(usize, EntityType)> = None;
    let span = |start, end, entity_type| EntitySpan {
        sentence_index,
        start,
        end,
        entity_type,
    };
    for (i, &label) in labels.iter().enumerate() {
        match label {
            Label::Outside => {
                if let Some((start, ty)) = open.take() {
                    spans.push(span(start, i - 1, ty));
                }
            }
            Label::Entity(boundary, ty) => {
                let continues = matches!(open, Some((_, open_ty)) if open_ty == ty)
                    && matches!(boundary, Boundary::Inside | Boundary::End);
                if !continues {
                    if let Some((start, open_ty)) = open.take() {
                        spans.push(span(start, i - 1, open_ty));
                    }
                }
                match boundary {
                    Boundary::Begin => open = Some((i, ty)),
                    Boundary::Inside => {
                        if !continues {
                            open = Some((i, ty));
                        }
                    }
                    Boundary::End => {
                        let start = open.take().map_or(i, |(start, _)| start);
                        spans.push(span(start, i, ty));
                    }
                    Boundary::Single => spans.push(span(i, i, ty)),
                }
            }
        }
    }
    if let Some((start, ty)) = open {
        spans.push(span(start, labels.len() - 1, ty));
    }
    spans
}

fn encode_spans(len: usize, spans: &[EntitySpan], schema: Schema) -> Vec<Label> {
    let mut labels = alloc::vec![Label::Outside; len];
    for s in spans {
        for (i, label) in labels.iter_mut().enumerate().take(s.end + 1).skip(s.start) {
            let boundary = match schema {
                Schema::Bio if i == s.start => Boundary::Begin,
                Schema::Bio => Boundary::Inside,
                Schema::Biose if s.start == s.end => Boundary::Single,
                Schema::Biose if i == s.start => Boundary::Begin,
                Schema::Biose if i == s.end => Boundary::End,
                Schema::Biose => Boundary::Inside,
            };
            *label = Label::Entity(boundary, s.entity_type);
        }
    }
    labels
}

/// Re-encodes entities in BIOSE. Invalid input is repaired as in [`extract_spans`].
pub fn bio_to_biose(labels: &[Label]) -> Vec<Label> {
    encode_spans(labels.len(), &extract_spans(0, labels), Schema::Biose)
}

/// `S-X` becomes `B-X` and `E-X` becomes `I-X`.
pub fn biose_to_bio(labels: &[Label]) -> Vec<Label> {
    labels
        .iter()
        .map(|&l| match l {
            Label::Entity(Boundary::Single, ty) => Label::Entity(Boundary::Begin, ty),
            Label::Entity(Boundary::End, ty) => Label::Entity(Boundary::Inside, ty),
            other => other,
        })
        .collect()
}

/// Converts every sentence of a corpus to `schema`.
pub fn convert_schema(corpus: &Corpus, schema: Schema) -> Corpus {
    match schema {
        Schema::Biose => corpus.map_labels(schema, bio_to_biose),
        Schema::Bio => corpus.map_labels(schema, |l| {
            encode_spans(l.len(), &extract_spans(0, l), Schema::Bio)
        }),
    }
}

/// Turns every entity whose type is not in `keep` into `O`.
pub fn filter_tags(corpus: &Corpus, keep: &BTreeSet<EntityType>) -> Corpus {
    corpus.map_labels(corpus.schema, |labels| {
        labels
            .iter()
            .map(|&l| match l.entity_type() {
                Some(ty) if !keep.contains(&ty) => Label::Outside,
                _ => l,
            })
            .collect()
    })
}

/// Shuffles each sentence while keeping every entity contiguous and in order.
///
/// A sentence is cut into units, one per entity span and one per `O` token,
/// and the units are permuted uniformly with a generator seeded by `seed`.
pub fn shuffle_ablation(corpus: &Corpus, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sentences = corpus
        .sentences
        .iter()
        .map(|sentence| {
            let labels = sentence.labels();
            let mut units: Vec<(usize, usize)> = Vec::new();
            let mut spans = extract_spans(0, &labels).into_iter().peekable();
            let mut i = 0;
            while i < labels.len() {
                match spans.peek() {
                    Some(s) if s.start == i => {
                        units.push((s.start, s.end));
                        i = s.end + 1;
                        spans.next();
                    }
                    _ => {
                        units.push((i, i));
                        i += 1;
                    }
                }
            }
            units.shuffle(&mut rng);
            let tokens = units
                .iter()
                .flat_map(|&(start, end)| sentence.tokens[start..=end].iter().cloned())
                .collect();
            Sentence { tokens }
        })
        .collect();
    Corpus {
        sentences,
        language: corpus.language.clone(),
        schema: corpus.schema,
    }
}
