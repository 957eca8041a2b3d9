//! Seeded synthetic data: planted alignments, a small overfitting corpus, and
//! a two-language transfer benchmark.
//!
//! The transfer benchmark mixes three kinds of entity mentions so that each
//! part of the model has something to contribute:
//!
//! * ambiguous names, whose type is given only by the trigger word in front;
//! * names carrying a type-specific suffix, held out as unknown words at test time;
//! * names without a suffix whose embeddings cluster by type, held out of the
//!   dictionary and the training data but present in the target embeddings.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Boundary, Corpus, EntityType, Label, Schema, Sentence, Token};
use crate::embeddings::{EmbeddingTable, SeedDictionary};
use crate::linalg::{norm, svd, Matrix};
use crate::romanizer::TransliterationTable;
use crate::translation::BilingualDictionary;
use crate::Result;

fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = norm(&v);
        if n > 1e-3 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// A random orthogonal matrix: the polar factor `U·Vᵀ` of a random matrix.
pub fn random_orthogonal(dim: usize, rng: &mut ChaCha8Rng) -> Result<Matrix> {
    let a = Matrix::from_vec(
        dim,
        dim,
        (0..dim * dim)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect(),
    )?;
    let d = svd(&a)?;
    d.u.matmul(&d.v.transpose())
}

/// Source table, target table `y = R·x`, and the one-to-one seed dictionary.
#[derive(Debug, Clone)]
pub struct PlantedAlignment {
    pub source: EmbeddingTable,
    pub target: EmbeddingTable,
    pub rotation: Matrix,
    pub dictionary: SeedDictionary,
}

pub fn planted_alignment(words: usize, dim: usize, seed: u64) -> Result<PlantedAlignment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rotation = random_orthogonal(dim, &mut rng)?;
    let mut source = EmbeddingTable::new(dim);
    let mut target = EmbeddingTable::new(dim);
    let mut pairs = Vec::with_capacity(words);
    for i in 0..words {
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y = rotation.matvec(&x)?;
        let (s, t) = (format!("src{i}"), format!("tgt{i}"));
        source.insert(s.clone(), &x)?;
        target.insert(t.clone(), &y)?;
        pairs.push((s, t));
    }
    Ok(PlantedAlignment {
        source,
        target,
        rotation,
        dictionary: SeedDictionary { pairs },
    })
}

fn pseudo_word(rng: &mut ChaCha8Rng, syllables: usize) -> String {
    const ONSETS: [&str; 16] = [
        "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "tr",
    ];
    const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];
    let mut w = String::new();
    for _ in 0..syllables {
        w.push_str(ONSETS.choose(rng).expect("non-empty"));
        w.push_str(VOWELS.choose(rng).expect("non-empty"));
    }
    w
}

/// `count` distinct pseudo-words not yet in `used`.
fn fresh_words(
    rng: &mut ChaCha8Rng,
    used: &mut BTreeSet<String>,
    count: usize,
    syllables: usize,
    suffix: &str,
) -> Vec<String> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let w = format!("{}{}", pseudo_word(rng, syllables), suffix);
        if used.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

fn mention_labels(len: usize, ty: EntityType) -> Vec<Label> {
    (0..len)
        .map(|i| {
            Label::Entity(
                if i == 0 {
                    Boundary::Begin
                } else {
                    Boundary::Inside
                },
                ty,
            )
        })
        .collect()
}

/// A small corpus whose entity surfaces reveal their labels, with a vector
/// for every word.
pub fn overfit_corpus(sentences: usize, dim: usize, seed: u64) -> Result<(Corpus, EmbeddingTable)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used = BTreeSet::new();
    let fillers = fresh_words(&mut rng, &mut used, 12, 2, "");
    let types = [
        EntityType::Per,
        EntityType::Loc,
        EntityType::Org,
        EntityType::Misc,
    ];
    let mut out = Vec::with_capacity(sentences);
    for s in 0..sentences {
        let mut tokens = Vec::new();
        for _ in 0..rng.random_range(1..3) {
            tokens.push(Token::new(
                fillers.choose(&mut rng).expect("fillers").clone(),
                Label::Outside,
            )?);
        }
        let ty = types[s % types.len()];
        let len = rng.random_range(1..=3);
        for (i, label) in mention_labels(len, ty).into_iter().enumerate() {
            tokens.push(Token::new(
                format!("{}{s}x{i}", ty.as_str().to_lowercase()),
                label,
            )?);
        }
        tokens.push(Token::new(
            fillers.choose(&mut rng).expect("fillers").clone(),
            Label::Outside,
        )?);
        out.push(Sentence::new(tokens)?);
    }
    let corpus = Corpus::new(out, "synthetic", Schema::Bio);
    let mut table = EmbeddingTable::new(dim);
    for sentence in &corpus.sentences {
        for w in sentence.surfaces() {
            if !table.contains(w) {
                let v = unit_vector(&mut rng, dim);
                table.insert(w.to_string(), &v)?;
            }
        }
    }
    Ok((corpus, table))
}

/// Sizes and seed of the transfer benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransferConfig {
    pub dim: usize,
    pub train_sentences: usize,
    pub dev_sentences: usize,
    pub test_sentences: usize,
    pub seed: u64,
}

impl Default for TransferConfig {
    fn default() -> Self {
        TransferConfig {
            dim: 32,
            train_sentences: 600,
            dev_sentences: 150,
            test_sentences: 400,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TransferBenchmark {
    /// Source-language training data (BIO).
    pub train: Corpus,
    pub dev: Corpus,
    /// Target-language test data (BIO), written in the target script.
    pub test: Corpus,
    pub source_embeddings: EmbeddingTable,
    pub target_embeddings: EmbeddingTable,
    /// Translation pairs `(source, target)` for alignment.
    pub seed_dictionary: SeedDictionary,
    pub dictionary: BilingualDictionary,
    /// Romanizes the target script back to ASCII.
    pub romanization: TransliterationTable,
    pub rotation: Matrix,
}

/// Target script: one Cyrillic letter per ASCII lowercase letter.
const SCRIPT: [(char, char); 26] = [
    ('a', 'а'),
    ('b', 'б'),
    ('c', 'ц'),
    ('d', 'д'),
    ('e', 'е'),
    ('f', 'ф'),
    ('g', 'г'),
    ('h', 'х'),
    ('i', 'и'),
    ('j', 'й'),
    ('k', 'к'),
    ('l', 'л'),
    ('m', 'м'),
    ('n', 'н'),
    ('o', 'о'),
    ('p', 'п'),
    ('q', 'я'),
    ('r', 'р'),
    ('s', 'с'),
    ('t', 'т'),
    ('u', 'у'),
    ('v', 'в'),
    ('w', 'ш'),
    ('x', 'ж'),
    ('y', 'ы'),
    ('z', 'з'),
];

fn to_script(word: &str) -> String {
    word.chars()
        .map(|c| SCRIPT.iter().find(|(a, _)| *a == c).map_or(c, |&(_, t)| t))
        .collect()
}

const TYPES: [EntityType; 3] = [EntityType::Per, EntityType::Loc, EntityType::Org];
const SUFFIXES: [[&str; 2]; 3] = [["son", "ski"], ["burg", "ia"], ["corp", "tek"]];
const TRIGGERS: [[&str; 2]; 3] = [["mister", "doctor"], ["inside", "near"], ["at", "firm"]];

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Ambiguous,
    Suffixed,
    Clustered,
}

struct Pools {
    ambiguous: Vec<String>,
    suffixed: [Vec<String>; 3],
    clustered: [Vec<String>; 3],
}

struct Vocabulary {
    fillers: Vec<String>,
    train: Pools,
    test: Pools,
}

/// Words of one mention kind and type, `len` tokens.
fn mention(rng: &mut ChaCha8Rng, pools: &Pools, kind: Kind, t: usize, len: usize) -> Vec<String> {
    let pool = match kind {
        Kind::Ambiguous => &pools.ambiguous,
        Kind::Suffixed => &pools.suffixed[t],
        Kind::Clustered => &pools.clustered[t],
    };
    (0..len)
        .map(|_| pool.choose(rng).expect("non-empty pool").clone())
        .collect()
}

fn sentence(rng: &mut ChaCha8Rng, vocab: &Vocabulary, pools: &Pools) -> Result<Sentence> {
    let mut tokens = Vec::new();
    let filler = |rng: &mut ChaCha8Rng| vocab.fillers.choose(rng).expect("fillers").clone();
    let mentions = rng.random_range(1..=2);
    for m in 0..mentions {
        let gap = rng.random_range(if m == 0 { 0 } else { 1 }..=2);
        for _ in 0..gap {
            tokens.push(Token::new(filler(rng), Label::Outside)?);
        }
        let t = rng.random_range(0..TYPES.len());
        let kind = match rng.random_range(0..3) {
            0 => Kind::Ambiguous,
            1 => Kind::Suffixed,
            _ => Kind::Clustered,
        };
        if kind == Kind::Ambiguous || rng.random_bool(0.5) {
            let trigger = TRIGGERS[t].choose(rng).expect("triggers");
            tokens.push(Token::new(*trigger, Label::Outside)?);
        } else if tokens.is_empty() || rng.random_bool(0.5) {
            tokens.push(Token::new(filler(rng), Label::Outside)?);
        }
        let len = [1, 1, 1, 2, 2, 3][rng.random_range(0..6)];
        let words = mention(rng, pools, kind, t, len);
        for (w, label) in words.into_iter().zip(mention_labels(len, TYPES[t])) {
            tokens.push(Token::new(w, label)?);
        }
    }
    for _ in 0..rng.random_range(0..=2) {
        tokens.push(Token::new(filler(rng), Label::Outside)?);
    }
    Sentence::new(tokens)
}

pub fn transfer_benchmark(config: &TransferConfig) -> Result<TransferBenchmark> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let dim = config.dim;
    let mut used: BTreeSet<String> = TRIGGERS.iter().flatten().map(|s| s.to_string()).collect();
    let fillers = fresh_words(&mut rng, &mut used, 40, 2, "");
    let mut pools =
        |rng: &mut ChaCha8Rng, ambiguous: usize, suffixed: usize, clustered: usize| Pools {
            ambiguous: fresh_words(rng, &mut used, ambiguous, 2, ""),
            suffixed: [0, 1, 2].map(|t| {
                let mut words = Vec::new();
                for (i, sfx) in SUFFIXES[t].iter().enumerate() {
                    words.extend(fresh_words(
                        rng,
                        &mut used,
                        suffixed / 2 + i * (suffixed % 2),
                        2,
                        sfx,
                    ));
                }
                words
            }),
            clustered: [0, 1, 2].map(|_| fresh_words(rng, &mut used, clustered, 3, "")),
        };
    let train_pools = pools(&mut rng, 12, 24, 16);
    let test_pools = Pools {
        ambiguous: train_pools.ambiguous.clone(),
        ..pools(&mut rng, 0, 16, 12)
    };
    let vocab = Vocabulary {
        fillers,
        train: train_pools,
        test: test_pools,
    };

    // Latent vectors: type centroids for clustered names, unit vectors otherwise.
    let centroids: Vec<Vec<f64>> = (0..3).map(|_| unit_vector(&mut rng, dim)).collect();
    let clustered_vector = |rng: &mut ChaCha8Rng, t: usize| {
        let noise = unit_vector(rng, dim);
        let v: Vec<f64> = centroids[t]
            .iter()
            .zip(&noise)
            .map(|(c, n)| c + 0.35 * n)
            .collect();
        let n = norm(&v);
        v.into_iter().map(|x| x / n).collect::<Vec<f64>>()
    };
    let rotation = random_orthogonal(dim, &mut rng)?;
    let mut source = EmbeddingTable::new(dim);
    let mut target = EmbeddingTable::new(dim);
    let mut dictionary = BilingualDictionary::new();
    let mut pairs = Vec::new();
    let mut target_words = BTreeSet::new();

    let mut shared: Vec<(String, Vec<f64>, bool)> = Vec::new();
    for w in &vocab.fillers {
        shared.push((w.clone(), unit_vector(&mut rng, dim), false));
    }
    for w in TRIGGERS.iter().flatten() {
        shared.push((w.to_string(), unit_vector(&mut rng, dim), false));
    }
    for w in &vocab.train.ambiguous {
        shared.push((w.clone(), unit_vector(&mut rng, dim), true));
    }
    for t in 0..3 {
        for w in &vocab.train.suffixed[t] {
            shared.push((w.clone(), unit_vector(&mut rng, dim), true));
        }
        for w in &vocab.train.clustered[t] {
            shared.push((w.clone(), clustered_vector(&mut rng, t), true));
        }
    }
    // Names keep their spelling across languages; other words get new ones.
    let mut translations = Vec::with_capacity(shared.len());
    for (word, latent, is_name) in &shared {
        let spelled = if *is_name {
            word.clone()
        } else {
            loop {
                let w = pseudo_word(&mut rng, 3);
                if !used.contains(&w) && target_words.insert(w.clone()) {
                    break w;
                }
            }
        };
        let tgt = to_script(&spelled);
        source.insert(word.clone(), latent)?;
        target.insert(tgt.clone(), &rotation.matvec(latent)?)?;
        dictionary.add(word.clone(), tgt.clone());
        pairs.push((word.clone(), tgt.clone()));
        translations.push(tgt);
    }
    // Decoy candidates: a filler may also list the translation of another filler.
    let filler_count = vocab.fillers.len();
    for i in (0..filler_count).step_by(4) {
        let decoy = translations[(i + 7) % filler_count].clone();
        dictionary.add(shared[i].0.clone(), decoy);
    }
    // Held-out clustered names exist only in the target embeddings.
    for t in 0..3 {
        for w in &vocab.test.clustered[t] {
            let v = clustered_vector(&mut rng, t);
            target.insert(to_script(w), &rotation.matvec(&v)?)?;
        }
    }

    let train: Vec<Sentence> = (0..config.train_sentences)
        .map(|_| sentence(&mut rng, &vocab, &vocab.train))
        .collect::<Result<_>>()?;
    let dev: Vec<Sentence> = (0..config.dev_sentences)
        .map(|_| sentence(&mut rng, &vocab, &vocab.train))
        .collect::<Result<_>>()?;
    let source_to_target = |w: &str| -> String {
        shared
            .iter()
            .position(|(s, _, _)| s == w)
            .map_or_else(|| to_script(w), |i| translations[i].clone())
    };
    let test: Vec<Sentence> = (0..config.test_sentences)
        .map(|_| {
            let s = sentence(&mut rng, &vocab, &vocab.test)?;
            let tokens = s
                .tokens()
                .iter()
                .map(|t| t.with_surface(source_to_target(t.surface())))
                .collect::<Result<Vec<_>>>()?;
            Sentence::new(tokens)
        })
        .collect::<Result<_>>()?;

    let rules: Vec<(String, String)> = SCRIPT
        .iter()
        .map(|&(a, c)| (c.to_string(), a.to_string()))
        .collect();
    Ok(TransferBenchmark {
        train: Corpus::new(train, "src", Schema::Bio),
        dev: Corpus::new(dev, "src", Schema::Bio),
        test: Corpus::new(test, "tgt", Schema::Bio),
        source_embeddings: source,
        target_embeddings: target,
        seed_dictionary: SeedDictionary { pairs },
        dictionary,
        romanization: TransliterationTable::new("tgt", rules)?,
        rotation,
    })
}
