//! File reading and writing with path-carrying errors.

use std::path::Path;

use sha2::{Digest, Sha256};
use xner_core::corpus::{parse_conll_with_schema, Corpus, Schema};
use xner_core::embeddings::{load_embeddings, EmbeddingTable};

use crate::error::{CliError, Result};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `bytes`, creating parent directories.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let wrap = |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(wrap)?;
    }
    std::fs::write(path, bytes).map_err(wrap)
}

/// Column count of the first token line, if any.
pub fn detect_columns(text: &str) -> Option<usize> {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with("-DOCSTART-"))
        .map(|l| l.split_whitespace().count())
}

/// Parses CoNLL text labeled in either BIO or BIOSE.
///
/// BIO is tried first; a file using `E-`/`S-` labels is read as BIOSE.
pub fn parse_any_schema(
    text: &str,
    token_column: usize,
    label_column: usize,
) -> xner_core::Result<Corpus> {
    parse_conll_with_schema(text, token_column, label_column, Schema::Bio).or_else(|bio_err| {
        parse_conll_with_schema(text, token_column, label_column, Schema::Biose)
            .map_err(|_| bio_err)
    })
}

/// Reads a raw corpus. Without an explicit label column the last column is used.
pub fn load_raw_corpus(
    path: &Path,
    token_column: usize,
    label_column: Option<usize>,
    language: &str,
) -> Result<Corpus> {
    let text = read_text(path)?;
    let input = |source| CliError::Input {
        path: path.to_path_buf(),
        source,
    };
    let label_column = match label_column {
        Some(c) => c,
        None => detect_columns(&text).ok_or_else(|| input(xner_core::Error::EmptyCorpus))? - 1,
    };
    let corpus = parse_any_schema(&text, token_column, label_column).map_err(input)?;
    if corpus.is_empty() {
        return Err(input(xner_core::Error::EmptyCorpus));
    }
    Ok(corpus.with_language(language))
}

/// Reads a two-column BIOSE corpus written by this tool.
pub fn load_biose(path: &Path, language: &str) -> Result<Corpus> {
    let text = read_text(path)?;
    let corpus =
        parse_conll_with_schema(&text, 0, 1, Schema::Biose).map_err(|source| CliError::Input {
            path: path.to_path_buf(),
            source,
        })?;
    if corpus.is_empty() {
        return Err(CliError::Input {
            path: path.to_path_buf(),
            source: xner_core::Error::EmptyCorpus,
        });
    }
    Ok(corpus.with_language(language))
}

pub fn parse_embeddings(path: &Path, text: &str) -> Result<EmbeddingTable> {
    load_embeddings(text).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_last_column() {
        assert_eq!(
            detect_columns("-DOCSTART- O\n\nEU NNP B-NP B-ORG\n"),
            Some(4)
        );
        assert_eq!(detect_columns("\n\n"), None);
    }

    #[test]
    fn reads_either_schema() {
        assert_eq!(
            parse_any_schema("a B-PER\nb I-PER\n", 0, 1).unwrap().schema,
            Schema::Bio
        );
        assert_eq!(
            parse_any_schema("a B-PER\nb E-PER\n", 0, 1).unwrap().schema,
            Schema::Biose
        );
        let err = parse_any_schema("a X-PER\n", 0, 1).unwrap_err();
        assert!(matches!(
            err,
            xner_core::Error::UnknownLabel { line: 1, .. }
        ));
    }

    #[test]
    fn hashes_are_hex_sha256() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
