//! Cross-lingual named entity recognition.
//!
//! A Bi-LSTM-CRF tagger is trained on a source language and applied to a
//! target language with no annotated data. Three bridges carry knowledge
//! across languages:
//!
//! - [`embeddings`]: target-language word vectors are aligned into the
//!   source space with an orthogonal map and merged into one frozen table;
//! - [`translation`]: source training sentences are rewritten word-by-word
//!   through a bilingual dictionary, choosing among candidate translations
//!   with a context-weighted cosine score;
//! - [`romanizer`]: every word is transliterated to ASCII before it reaches
//!   the character encoder, so all languages share one character space.
//!
//! [`corpus`] handles CoNLL data and tag schemas, [`tagger`] is the neural
//! model, [`eval`] scores predictions and runs ablations, and [`synthetic`]
//! builds small planted benchmarks.
//!
//! The crate is `no_std` (it needs `alloc`); file and process IO live in the
//! `xner` command-line crate.
#![no_std]

extern crate alloc;

pub mod corpus;
pub mod embeddings;
mod error;
pub mod eval;
pub mod linalg;
pub mod romanizer;
pub mod synthetic;
pub mod tagger;
pub mod translation;

pub use error::{Error, Result};
