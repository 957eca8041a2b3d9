//! Word-embedding tables: loading, normalization, supervised orthogonal
//! alignment, merging and lookup with random vectors for unknown words.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::corpus::Corpus;
use crate::linalg::{self, Matrix};
use crate::{Error, Result};

/// Bound of the uniform distribution unknown-word vectors are drawn from.
pub const OOV_RANGE: f64 = 0.1;

/// Tolerance of the orthogonality invariant (max absolute entry of `WᵀW − I`).
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-8;

/// Word vectors of a fixed dimension, in insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    words: Vec<String>,
    vectors: Vec<f64>,
    index: BTreeMap<String, usize>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            words: Vec::new(),
            vectors: Vec::new(),
            index: BTreeMap::new(),
        }
    }

    /// Builds a table from `(word, vector)` pairs; the first occurrence of a word wins.
    pub fn from_entries<I, S>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let mut table = EmbeddingTable::new(dim);
        for (word, vector) in entries {
            table.insert(word.into(), &vector)?;
        }
        Ok(table)
    }

    /// Adds an entry unless the word is already present. Returns whether it was added.
    pub fn insert(&mut self, word: String, vector: &[f64]) -> Result<bool> {
        if vector.len() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: vector.len(),
            });
        }
        if self.index.contains_key(&word) {
            return Ok(false);
        }
        self.index.insert(word.clone(), self.words.len());
        self.words.push(word);
        self.vectors.extend_from_slice(vector);
        Ok(true)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index.get(word).map(|&i| self.vector_at(i))
    }

    fn vector_at(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.words
            .iter()
            .enumerate()
            .map(move |(i, w)| (w.as_str(), self.vector_at(i)))
    }

    /// The word whose vector has the highest cosine with `query`, skipping `exclude`.
    pub fn nearest(&self, query: &[f64], exclude: &BTreeSet<&str>) -> Option<&str> {
        let mut best: Option<(&str, f64)> = None;
        for (word, v) in self.iter() {
            if exclude.contains(word) {
                continue;
            }
            let c = cosine(query, v).ok()?;
            if best.is_none_or(|(_, b)| c > b) {
                best = Some((word, c));
            }
        }
        best.map(|(w, _)| w)
    }
}

/// Parses the word2vec/fastText text format: an optional `count dim`
/// header, then one word and its components per line.
pub fn load_embeddings(text: &str) -> Result<EmbeddingTable> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .peekable();
    let mut dim = None;
    if let Some((_, first)) = lines.peek() {
        let fields: Vec<&str> = first.split_whitespace().collect();
        if fields.len() == 2 {
            if let (Ok(_count), Ok(d)) = (fields[0].parse::<usize>(), fields[1].parse::<usize>()) {
                dim = Some(d);
                lines.next();
            }
        }
    }
    let mut table: Option<EmbeddingTable> = dim.map(EmbeddingTable::new);
    let mut vector = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let mut fields = line.split_whitespace();
        let word = fields.next().expect("line is not blank");
        vector.clear();
        for field in fields {
            let value = field.parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("cannot parse `{field}` as a real number"),
            })?;
            vector.push(value);
        }
        let table = table.get_or_insert_with(|| EmbeddingTable::new(vector.len()));
        if vector.len() != table.dim || vector.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {} values, found {}", table.dim, vector.len()),
            });
        }
        table.insert(word.to_string(), &vector)?;
    }
    Ok(table.unwrap_or_else(|| EmbeddingTable::new(0)))
}

/// Serializes a table in the text format read by [`load_embeddings`], with a header.
pub fn embeddings_to_text(table: &EmbeddingTable) -> String {
    let mut out = format!("{} {}\n", table.len(), table.dim());
    for (word, v) in table.iter() {
        out.push_str(word);
        for x in v {
            write!(out, " {x}").expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

/// Result of [`normalize_table`].
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub table: EmbeddingTable,
    /// Entries dropped because they were (or became) zero vectors.
    pub dropped: usize,
}

fn unit_norm_entries<'a>(
    entries: impl Iterator<Item = (&'a str, Vec<f64>)>,
    dropped: &mut usize,
) -> Vec<(&'a str, Vec<f64>)> {
    entries
        .filter_map(|(w, mut v)| {
            let n = linalg::norm(&v);
            if n <= f64::EPSILON {
                *dropped += 1;
                return None;
            }
            v.iter_mut().for_each(|x| *x /= n);
            Some((w, v))
        })
        .collect()
}

/// Unit-normalizes every vector, subtracts the table mean, and unit-normalizes again.
///
/// Zero vectors are dropped at either normalization. Tables with fewer
/// than two entries are rejected: centering a single vector leaves nothing.
pub fn normalize_table(table: &EmbeddingTable) -> Result<Normalized> {
    let mut dropped = 0;
    let unit = unit_norm_entries(table.iter().map(|(w, v)| (w, v.to_vec())), &mut dropped);
    if unit.len() < 2 {
        return Err(Error::Invalid(format!(
            "cannot mean-center a table with {} non-zero entries",
            unit.len()
        )));
    }
    let mut mean = alloc::vec![0.0; table.dim()];
    for (_, v) in &unit {
        linalg::axpy(1.0, v, &mut mean);
    }
    mean.iter_mut().for_each(|m| *m /= unit.len() as f64);
    let centered = unit.into_iter().map(|(w, mut v)| {
        linalg::axpy(-1.0, &mean, &mut v);
        (w, v)
    });
    let result = unit_norm_entries(centered, &mut dropped);
    Ok(Normalized {
        table: EmbeddingTable::from_entries(table.dim(), result)?,
        dropped,
    })
}

/// An orthogonal matrix mapping one embedding space onto another.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalMap(Matrix);

impl OrthogonalMap {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::DimMismatch {
                expected: matrix.rows(),
                found: matrix.cols(),
            });
        }
        let err = matrix.orthogonality_error();
        if err.is_nan() || err > ORTHOGONALITY_TOLERANCE {
            return Err(Error::Numeric(format!(
                "matrix is not orthogonal (max |WᵀW − I| = {err:e})"
            )));
        }
        Ok(OrthogonalMap(matrix))
    }

    pub fn identity(dim: usize) -> Self {
        OrthogonalMap(Matrix::identity(dim))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }
}

/// Ordered word pairs supervising the alignment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SeedDictionary {
    pub pairs: Vec<(String, String)>,
}

impl SeedDictionary {
    /// The same pairs with both sides swapped.
    pub fn reversed(&self) -> SeedDictionary {
        SeedDictionary {
            pairs: self
                .pairs
                .iter()
                .map(|(a, b)| (b.clone(), a.clone()))
                .collect(),
        }
    }
}

/// Reads one `source target` pair per line (tab or space separated).
pub fn load_seed_dictionary(text: &str) -> Result<SeedDictionary> {
    let mut pairs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected a word pair, found {} fields", fields.len()),
            });
        }
        pairs.push((fields[0].to_string(), fields[1].to_string()));
    }
    Ok(SeedDictionary { pairs })
}

/// Orthogonal Procrustes with the default minimum of `dim` usable pairs.
pub fn procrustes_align(
    source: &EmbeddingTable,
    target: &EmbeddingTable,
    seed_dict: &SeedDictionary,
) -> Result<OrthogonalMap> {
    procrustes_align_with_min(source, target, seed_dict, source.dim())
}

/// Finds the orthogonal `W` minimizing `Σ ‖W·x − y‖²` over dictionary pairs
/// `(x from source, y from target)`.
///
/// Pairs with a word missing from either table are ignored. With
/// `Y·Xᵀ = U·Σ·Vᵀ` the minimizer is `W = U·Vᵀ`.
pub fn procrustes_align_with_min(
    source: &EmbeddingTable,
    target: &EmbeddingTable,
    seed_dict: &SeedDictionary,
    min_pairs: usize,
) -> Result<OrthogonalMap> {
    let dim = source.dim();
    if target.dim() != dim {
        return Err(Error::DimMismatch {
            expected: dim,
            found: target.dim(),
        });
    }
    let mut cross = Matrix::zeros(dim, dim);
    let mut usable = 0;
    for (s, t) in &seed_dict.pairs {
        let (Some(x), Some(y)) = (source.get(s), target.get(t)) else {
            continue;
        };
        usable += 1;
        for (r, &yr) in y.iter().enumerate() {
            linalg::axpy(yr, x, cross.row_mut(r));
        }
    }
    if usable < min_pairs.max(1) {
        return Err(Error::InsufficientSupervision {
            usable,
            required: min_pairs.max(1),
        });
    }
    let svd = linalg::svd(&cross)?;
    let w = svd.u.matmul(&svd.v.transpose())?;
    OrthogonalMap::new(w)
}

/// Maps every vector through `map`.
pub fn apply_alignment(table: &EmbeddingTable, map: &OrthogonalMap) -> Result<EmbeddingTable> {
    if table.dim() != map.dim() {
        return Err(Error::DimMismatch {
            expected: map.dim(),
            found: table.dim(),
        });
    }
    let mut out = EmbeddingTable::new(table.dim());
    for (word, v) in table.iter() {
        out.insert(word.to_string(), &map.matrix().matvec(v)?)?;
    }
    Ok(out)
}

/// Result of [`merge_tables`].
#[derive(Debug, Clone, PartialEq)]
pub struct Merged {
    pub table: EmbeddingTable,
    pub collisions: usize,
}

/// Union of two tables; on a shared word the entry of `a` is kept.
pub fn merge_tables(a: &EmbeddingTable, b: &EmbeddingTable) -> Result<Merged> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let mut table = a.clone();
    let mut collisions = 0;
    for (word, v) in b.iter() {
        if !table.insert(word.to_string(), v)? {
            collisions += 1;
        }
    }
    Ok(Merged { table, collisions })
}

/// Per-run random vectors for words missing from the table.
///
/// Each word's vector is derived from the run seed and the word alone, so
/// the result does not depend on lookup order; it is cached after the first
/// request.
#[derive(Debug, Clone)]
pub struct OovStore {
    seed: u64,
    dim: usize,
    cache: BTreeMap<String, Vec<f64>>,
}

impl OovStore {
    pub fn new(seed: u64, dim: usize) -> Self {
        OovStore {
            seed,
            dim,
            cache: BTreeMap::new(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.cache.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cache.is_empty()
    }

    pub fn vector(&mut self, word: &str) -> &[f64] {
        if !self.cache.contains_key(word) {
            let mut hasher = Sha256::new();
            hasher.update(self.seed.to_le_bytes());
            hasher.update(word.as_bytes());
            let digest: [u8; 32] = hasher.finalize().into();
            let mut rng = ChaCha8Rng::from_seed(digest);
            let v = (0..self.dim)
                .map(|_| rng.random_range(-OOV_RANGE..=OOV_RANGE))
                .collect();
            self.cache.insert(word.to_string(), v);
        }
        &self.cache[word]
    }
}

/// The stored vector of `word`, or its per-run random vector if unknown.
pub fn lookup<'a>(table: &'a EmbeddingTable, word: &str, oov: &'a mut OovStore) -> &'a [f64] {
    match table.get(word) {
        Some(v) => v,
        None => oov.vector(word),
    }
}

/// Cosine similarity; zero when either vector is zero.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    let (nu, nv) = (linalg::norm(u), linalg::norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok(linalg::dot(u, v) / (nu * nv))
}

/// Percentages of unknown words, by distinct surface and by occurrence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OovReport {
    pub type_rate: f64,
    pub token_rate: f64,
    pub types: usize,
    pub tokens: usize,
}

pub fn oov_rate(corpus: &Corpus, table: &EmbeddingTable) -> Result<OovReport> {
    let mut types = BTreeSet::new();
    let mut tokens = 0usize;
    let mut oov_tokens = 0usize;
    for surface in corpus.sentences.iter().flat_map(|s| s.surfaces()) {
        tokens += 1;
        if !table.contains(surface) {
            oov_tokens += 1;
        }
        types.insert(surface);
    }
    if tokens == 0 {
        return Err(Error::EmptyCorpus);
    }
    let oov_types = types.iter().filter(|w| !table.contains(w)).count();
    Ok(OovReport {
        type_rate: 100.0 * oov_types as f64 / types.len() as f64,
        token_rate: 100.0 * oov_tokens as f64 / tokens as f64,
        types: types.len(),
        tokens,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Label, Schema, Sentence, Token};
    use alloc::vec;

    fn table(dim: usize, entries: &[(&str, &[f64])]) -> EmbeddingTable {
        EmbeddingTable::from_entries(dim, entries.iter().map(|(w, v)| (*w, v.to_vec()))).unwrap()
    }

    #[test]
    fn loads_with_header() {
        let t = load_embeddings("2 3\na 1 0 0\nb 0 1 0\n").unwrap();
        assert_eq!((t.len(), t.dim()), (2, 3));
        assert_eq!(t.get("b").unwrap(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn infers_dim_without_header() {
        let t = load_embeddings("a 1 0\nb 0.5 -2e-3\n").unwrap();
        assert_eq!((t.len(), t.dim()), (2, 2));
        assert_eq!(t.get("b").unwrap(), &[0.5, -0.002]);
    }

    #[test]
    fn rejects_short_rows_and_bad_reals() {
        let mut text = String::from("1 300\nw");
        for _ in 0..299 {
            text.push_str(" 0.1");
        }
        assert!(matches!(
            load_embeddings(&text),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            load_embeddings("a 1 x\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            load_embeddings("a 1 2\nb 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn duplicate_word_keeps_first() {
        let t = load_embeddings("a 1 0\na 0 1\n").unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.get("a").unwrap(), &[1.0, 0.0]);
    }

    #[test]
    fn text_round_trip_is_exact() {
        let t = table(2, &[("x", &[0.1, -1.0 / 3.0]), ("y", &[1e-300, 7.0])]);
        assert_eq!(load_embeddings(&embeddings_to_text(&t)).unwrap(), t);
    }

    #[test]
    fn normalize_single_entry_is_rejected() {
        assert!(normalize_table(&table(2, &[("a", &[3.0, 4.0])])).is_err());
    }

    #[test]
    fn normalize_symmetric_pair_is_unchanged() {
        let n = normalize_table(&table(2, &[("a", &[1.0, 0.0]), ("b", &[-1.0, 0.0])])).unwrap();
        assert_eq!(n.table.get("a").unwrap(), &[1.0, 0.0]);
        assert_eq!(n.table.get("b").unwrap(), &[-1.0, 0.0]);
        assert_eq!(n.dropped, 0);
    }

    #[test]
    fn normalize_drops_zero_vectors() {
        let n = normalize_table(&table(
            2,
            &[("z", &[0.0, 0.0]), ("a", &[2.0, 0.0]), ("b", &[0.0, 5.0])],
        ))
        .unwrap();
        assert_eq!(n.dropped, 1);
        assert_eq!(n.table.len(), 2);
        for (_, v) in n.table.iter() {
            assert!((linalg::norm(v) - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn identical_tables_align_to_identity() {
        let t = table(
            2,
            &[("a", &[1.0, 0.2]), ("b", &[-0.3, 1.0]), ("c", &[0.5, 0.5])],
        );
        let dict = SeedDictionary {
            pairs: vec![
                ("a".into(), "a".into()),
                ("b".into(), "b".into()),
                ("c".into(), "c".into()),
            ],
        };
        let w = procrustes_align(&t, &t, &dict).unwrap();
        assert!(w.matrix().frobenius_distance(&Matrix::identity(2)) <= 1e-8);
    }

    #[test]
    fn alignment_needs_enough_pairs() {
        let t = table(2, &[("a", &[1.0, 0.0]), ("b", &[0.0, 1.0])]);
        let dict = SeedDictionary {
            pairs: vec![("a".into(), "a".into()), ("zzz".into(), "b".into())],
        };
        assert_eq!(
            procrustes_align(&t, &t, &dict).unwrap_err(),
            Error::InsufficientSupervision {
                usable: 1,
                required: 2
            }
        );
        assert!(procrustes_align_with_min(&t, &t, &dict, 1).is_ok());
    }

    #[test]
    fn rotation_by_quarter_turn() {
        let rot =
            OrthogonalMap::new(Matrix::from_vec(2, 2, vec![0.0, -1.0, 1.0, 0.0]).unwrap()).unwrap();
        let out = apply_alignment(&table(2, &[("a", &[1.0, 0.0])]), &rot).unwrap();
        assert_eq!(out.get("a").unwrap(), &[0.0, 1.0]);
        let same = apply_alignment(
            &table(2, &[("a", &[0.3, 0.4])]),
            &OrthogonalMap::identity(2),
        )
        .unwrap();
        assert_eq!(same.get("a").unwrap(), &[0.3, 0.4]);
        assert!(apply_alignment(&table(3, &[("a", &[0.0; 3])]), &rot).is_err());
    }

    #[test]
    fn non_orthogonal_matrix_is_rejected() {
        assert!(
            OrthogonalMap::new(Matrix::from_vec(2, 2, vec![1.0, 0.1, 0.0, 1.0]).unwrap()).is_err()
        );
    }

    #[test]
    fn merge_rules() {
        let a = table(2, &[("p", &[1.0, 0.0]), ("q", &[1.0, 0.0])]);
        let b = table(
            2,
            &[("r", &[0.0, 1.0]), ("s", &[0.0, 1.0]), ("t", &[0.0, 1.0])],
        );
        assert_eq!(merge_tables(&a, &b).unwrap().table.len(), 5);

        let one = table(2, &[("w", &[1.0, 0.0])]);
        let other = table(2, &[("w", &[0.0, 1.0])]);
        let m = merge_tables(&one, &other).unwrap();
        assert_eq!((m.table.len(), m.collisions), (1, 1));
        assert_eq!(m.table.get("w").unwrap(), &[1.0, 0.0]);

        let b = table(2, &[("w", &[0.0, 1.0]), ("x", &[1.0, 1.0])]);
        let m = merge_tables(&one, &b).unwrap();
        assert_eq!(m.table, table(2, &[("w", &[1.0, 0.0]), ("x", &[1.0, 1.0])]));
        assert!(merge_tables(&one, &table(3, &[])).is_err());
    }

    #[test]
    fn lookup_known_and_unknown() {
        let t = table(3, &[("a", &[0.5, 0.5, 0.5])]);
        let mut oov = OovStore::new(7, 3);
        assert_eq!(lookup(&t, "a", &mut oov), &[0.5, 0.5, 0.5]);
        let first = lookup(&t, "zz", &mut oov).to_vec();
        let _ = lookup(&t, "yy", &mut oov);
        let second = lookup(&t, "zz", &mut oov).to_vec();
        assert_eq!(
            first.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            second.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
        assert!(first.iter().all(|x| (-0.1..=0.1).contains(x)));
        // Order independence across stores.
        let mut fresh = OovStore::new(7, 3);
        assert_eq!(fresh.vector("zz"), first.as_slice());
        assert_ne!(OovStore::new(8, 3).vector("zz"), first.as_slice());
    }

    #[test]
    fn cosine_cases() {
        assert_eq!(cosine(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert!(
            (cosine(&[1.0, 1.0], &[1.0, 0.0]).unwrap() - core::f64::consts::FRAC_1_SQRT_2).abs()
                < 1e-15
        );
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert!(cosine(&[1.0], &[1.0, 0.0]).is_err());
    }

    fn corpus(words: &[&str]) -> Corpus {
        let tokens = words
            .iter()
            .map(|w| Token::new(*w, Label::Outside).unwrap())
            .collect();
        Corpus::new(vec![Sentence::new(tokens).unwrap()], "x", Schema::Biose)
    }

    #[test]
    fn oov_rates() {
        let r = oov_rate(&corpus(&["a", "b", "a"]), &table(1, &[("a", &[1.0])])).unwrap();
        assert_eq!(r.type_rate, 50.0);
        assert!((r.token_rate - 100.0 / 3.0).abs() < 1e-12);
        let r = oov_rate(
            &corpus(&["a", "b"]),
            &table(1, &[("a", &[1.0]), ("b", &[1.0])]),
        )
        .unwrap();
        assert_eq!((r.type_rate, r.token_rate), (0.0, 0.0));
        let empty = Corpus::new(vec![], "x", Schema::Biose);
        assert_eq!(
            oov_rate(&empty, &table(1, &[])).unwrap_err(),
            Error::EmptyCorpus
        );
    }

    #[test]
    fn seed_dictionary_parsing() {
        let d = load_seed_dictionary("the\tder\nhouse haus\n\n").unwrap();
        assert_eq!(d.pairs.len(), 2);
        assert_eq!(d.reversed().pairs[1], ("haus".into(), "house".into()));
        assert!(matches!(
            load_seed_dictionary("a b c\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
