//! Shared fixtures for the CLI tests: a synthetic transfer benchmark
//! written out as files plus an experiment config that points at them.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use xner_core::corpus::to_conll;
use xner_core::embeddings::embeddings_to_text;
use xner_core::synthetic::{transfer_benchmark, TransferConfig};

pub fn write(path: &Path, text: &str) {
    std::fs::create_dir_all(path.parent().unwrap()).unwrap();
    std::fs::write(path, text).unwrap();
}

/// Writes the benchmark's corpora and resources into `dir/data` and returns
/// the TOML config text (paths relative to `dir`).
pub fn write_benchmark(dir: &Path, bench: &TransferConfig) -> String {
    let b = transfer_benchmark(bench).unwrap();
    let data = dir.join("data");
    write(&data.join("train.conll"), &to_conll(&b.train));
    write(&data.join("dev.conll"), &to_conll(&b.dev));
    write(&data.join("test.conll"), &to_conll(&b.test));
    write(
        &data.join("source.vec"),
        &embeddings_to_text(&b.source_embeddings),
    );
    write(
        &data.join("target.vec"),
        &embeddings_to_text(&b.target_embeddings),
    );
    let seed: String = b
        .seed_dictionary
        .pairs
        .iter()
        .map(|(s, t)| format!("{s}\t{t}\n"))
        .collect();
    write(&data.join("seed.dict"), &seed);
    let mut dict = String::new();
    for (s, candidates) in b.dictionary.iter() {
        for t in candidates {
            dict.push_str(&format!("{s}\t{t}\n"));
        }
    }
    write(&data.join("bilingual.dict"), &dict);
    write(&data.join("romanization.tsv"), &b.romanization.to_text());
    format!(
        r#"seed = {seed}
output_dir = "out"

[data]
train = "data/train.conll"
dev = "data/dev.conll"
test = "data/test.conll"
source_language = "src"
target_language = "tgt"

[embeddings]
source = "data/source.vec"
target = "data/target.vec"
seed_dictionary = "data/seed.dict"

[translation]
dictionary = "data/bilingual.dict"
alpha = 0.5

[romanization]
table = "data/romanization.tsv"

[model]
word_dim = {dim}
char_dim = 16
char_hidden = 16
token_hidden = 32
epochs = 15
"#,
        seed = bench.seed,
        dim = bench.dim,
    )
}

/// A benchmark small enough for quick end-to-end runs.
pub fn small_benchmark() -> TransferConfig {
    TransferConfig {
        dim: 8,
        train_sentences: 40,
        dev_sentences: 15,
        test_sentences: 30,
        seed: 5,
    }
}

pub fn xner(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xner"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

/// Runs a command with `--config config.toml` and the given overrides.
pub fn run(dir: &Path, command: &str, overrides: &[&str]) -> Output {
    let mut args = vec!["--config", "config.toml", command];
    for o in overrides {
        args.push("--set");
        args.push(o);
    }
    xner(dir, &args)
}

pub fn run_ok(dir: &Path, command: &str, overrides: &[&str]) -> String {
    let out = run(dir, command, overrides);
    assert!(
        out.status.success(),
        "{command} failed ({:?}): {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub fn out_file(dir: &Path, output_dir: &str, file: &str) -> PathBuf {
    dir.join(output_dir).join(file)
}
