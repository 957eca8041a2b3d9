//! Pipeline commands. Each reads its inputs from the config and from the
//! artifacts earlier commands left in the output directory:
//!
//! | command     | reads                                         | writes |
//! |-------------|-----------------------------------------------|--------|
//! | preprocess  | `data.*`                                      | `train.conll`, `dev.conll`, `test.conll` |
//! | align       | `embeddings.*`                                | `merged.vec`, `alignment.json` |
//! | translate   | `train.conll`, `dev.conll`, `merged.vec`      | `*.translated.conll`, `translation_stats.txt` |
//! | train       | translated (else preprocessed) train and dev  | `model.bin`, `train_report.{log,json}` |
//! | predict     | `model.bin`, `test.conll`, `merged.vec`       | `test.predicted.conll` |
//! | evaluate    | `model.bin`, `test.conll`, `merged.vec`       | `scores.{txt,json}` |
//! | ablate      | preprocessed corpora, `merged.vec`            | `ablation.{txt,json}` |
//! | oov-report  | preprocessed corpora, `merged.vec`            | `oov.{txt,json}` |

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use xner_core::corpus::{
    convert_schema, filter_tags, normalize_tokens, shuffle_ablation, to_conll, Corpus, Schema,
};
use xner_core::embeddings::{
    apply_alignment, embeddings_to_text, load_seed_dictionary, merge_tables, normalize_table,
    oov_rate, procrustes_align, EmbeddingTable, OovReport,
};
use xner_core::eval::{
    ablation_table, entity_f1, f1_by_length, length_table, run_ablation, AblationConfig,
    LengthBuckets, ScoreTriple, TransferResources, BUCKET_NAMES,
};
use xner_core::romanizer::romanize_corpus;
use xner_core::tagger::{self, LabelSet, TaggerModel, TrainReport, WordVectors};
use xner_core::translation::{load_dictionary, translate_corpus, BilingualDictionary};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::files::{load_raw_corpus, parse_embeddings, sha256_hex};
use crate::model_file::{decode_model, encode_model};
use crate::provenance::Provenance;

pub const MERGED_EMBEDDINGS: &str = "merged.vec";
pub const MODEL_FILE: &str = "model.bin";
const SPLITS: [&str; 3] = ["train", "dev", "test"];

/// Path of an artifact that an earlier command must have produced.
fn artifact(config: &ExperimentConfig, file: &str, producer: &str) -> Result<PathBuf> {
    let path = config.output_dir.join(file);
    if path.is_file() {
        Ok(path)
    } else {
        Err(CliError::Config(format!(
            "{} is missing; run `{producer}` first",
            path.display()
        )))
    }
}

fn input_error(path: &Path) -> impl Fn(xner_core::Error) -> CliError + '_ {
    move |source| CliError::Input {
        path: path.to_path_buf(),
        source,
    }
}

fn read_corpus(prov: &mut Provenance, name: &str, path: &Path, language: &str) -> Result<Corpus> {
    let text = prov.read_text(name, path)?;
    let corpus = xner_core::corpus::parse_conll_with_schema(&text, 0, 1, Schema::Biose)
        .map_err(input_error(path))?;
    if corpus.is_empty() {
        return Err(input_error(path)(xner_core::Error::EmptyCorpus));
    }
    Ok(corpus.with_language(language))
}

/// Reads the merged table and returns it with the SHA-256 of the file.
fn read_merged(
    prov: &mut Provenance,
    config: &ExperimentConfig,
) -> Result<(EmbeddingTable, String)> {
    let path = artifact(config, MERGED_EMBEDDINGS, "align")?;
    let bytes = prov.read(MERGED_EMBEDDINGS, &path)?;
    let hash = sha256_hex(&bytes);
    let text = String::from_utf8_lossy(&bytes);
    Ok((parse_embeddings(&path, &text)?, hash))
}

fn language_of(config: &ExperimentConfig, split: &str) -> String {
    if split == "test" {
        config.data.target_language.clone()
    } else {
        config.data.source_language.clone()
    }
}

fn split_path<'a>(config: &'a ExperimentConfig, split: &str) -> &'a Option<PathBuf> {
    match split {
        "train" => &config.data.train,
        "dev" => &config.data.dev,
        _ => &config.data.test,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScoreRecord {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub gold: usize,
    pub predicted: usize,
    pub correct: usize,
}

impl From<&ScoreTriple> for ScoreRecord {
    fn from(s: &ScoreTriple) -> Self {
        ScoreRecord {
            precision: s.precision,
            recall: s.recall,
            f1: s.f1,
            gold: s.gold,
            predicted: s.predicted,
            correct: s.correct,
        }
    }
}

fn lengths_json(lengths: &LengthBuckets) -> serde_json::Value {
    BUCKET_NAMES
        .iter()
        .zip(&lengths.buckets)
        .map(|(name, s)| {
            (
                name.to_string(),
                serde_json::to_value(ScoreRecord::from(s)).expect("serializes"),
            )
        })
        .collect::<serde_json::Map<_, _>>()
        .into()
}

fn oov_json(r: &OovReport) -> serde_json::Value {
    json!({ "type_rate": r.type_rate, "token_rate": r.token_rate, "types": r.types, "tokens": r.tokens })
}

fn pretty(value: &serde_json::Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("json serializes");
    bytes.push(b'\n');
    bytes
}

pub fn preprocess(config: &ExperimentConfig) -> Result<String> {
    let keep = config.keep_types()?;
    let mut prov = Provenance::new("preprocess", config);
    let mut summary = String::new();
    for split in SPLITS {
        let Some(path) = split_path(config, split) else {
            continue;
        };
        prov.read(&format!("data.{split}"), path)?;
        let raw = load_raw_corpus(
            path,
            config.data.token_column,
            config.data.label_column,
            &language_of(config, split),
        )?;
        let corpus = convert_schema(&normalize_tokens(&filter_tags(&raw, &keep)), Schema::Biose);
        prov.write(&format!("{split}.conll"), to_conll(&corpus).as_bytes())?;
        let _ = writeln!(
            summary,
            "{split}: {} sentences, {} tokens",
            corpus.sentences.len(),
            corpus.token_count()
        );
    }
    if prov.outputs.is_empty() {
        return Err(CliError::Config("no corpus paths set under [data]".into()));
    }
    prov.finish()?;
    Ok(summary)
}

pub fn align(config: &ExperimentConfig) -> Result<String> {
    let e = &config.embeddings;
    let (src_path, tgt_path, dict_path) = (
        config.require("embeddings.source", &e.source)?,
        config.require("embeddings.target", &e.target)?,
        config.require("embeddings.seed_dictionary", &e.seed_dictionary)?,
    );
    let mut prov = Provenance::new("align", config);
    let source = parse_embeddings(src_path, &prov.read_text("embeddings.source", src_path)?)?;
    let target = parse_embeddings(tgt_path, &prov.read_text("embeddings.target", tgt_path)?)?;
    let dict = load_seed_dictionary(&prov.read_text("embeddings.seed_dictionary", dict_path)?)
        .map_err(input_error(dict_path))?;
    let source = normalize_table(&source)?;
    let target = normalize_table(&target)?;
    // Target vectors move into the source space; source entries win on collisions.
    let map = procrustes_align(&target.table, &source.table, &dict.reversed())?;
    let aligned = apply_alignment(&target.table, &map)?;
    let merged = merge_tables(&source.table, &aligned)?;
    let w = map.matrix();
    let record = json!({
        "dim": w.rows(),
        "source_words": source.table.len(),
        "target_words": target.table.len(),
        "dropped_source": source.dropped,
        "dropped_target": target.dropped,
        "dictionary_pairs": dict.pairs.len(),
        "collisions": merged.collisions,
        "merged_words": merged.table.len(),
        "orthogonality_error": w.orthogonality_error(),
        "map": (0..w.rows()).map(|r| w.row(r).to_vec()).collect::<Vec<_>>(),
    });
    prov.write(
        MERGED_EMBEDDINGS,
        embeddings_to_text(&merged.table).as_bytes(),
    )?;
    prov.write("alignment.json", &pretty(&record))?;
    prov.finish()?;
    Ok(format!(
        "merged {} words ({} collisions), orthogonality error {:.3e}\n",
        merged.table.len(),
        merged.collisions,
        w.orthogonality_error()
    ))
}

fn read_dictionary(
    prov: &mut Provenance,
    config: &ExperimentConfig,
) -> Result<BilingualDictionary> {
    match &config.translation.dictionary {
        Some(path) => load_dictionary(&prov.read_text("translation.dictionary", path)?)
            .map_err(input_error(path)),
        None => Ok(BilingualDictionary::new()),
    }
}

pub fn translate(config: &ExperimentConfig) -> Result<String> {
    let dict_path = config.require("translation.dictionary", &config.translation.dictionary)?;
    let mut prov = Provenance::new("translate", config);
    let dict = load_dictionary(&prov.read_text("translation.dictionary", dict_path)?)
        .map_err(input_error(dict_path))?;
    let (table, _) = read_merged(&mut prov, config)?;
    let mut stats_text = String::new();
    for split in ["train", "dev"] {
        let file = format!("{split}.conll");
        let path = artifact(config, &file, "preprocess")?;
        let corpus = read_corpus(&mut prov, &file, &path, &config.data.source_language)?;
        let (translated, stats) =
            translate_corpus(&corpus, &dict, &table, config.translation.alpha);
        let translated = translated.with_language(&config.data.target_language);
        prov.write(
            &format!("{split}.translated.conll"),
            to_conll(&translated).as_bytes(),
        )?;
        let _ = write!(stats_text, "[{split}]\n{}\n", stats.to_record());
    }
    prov.write("translation_stats.txt", stats_text.as_bytes())?;
    prov.finish()?;
    Ok(stats_text)
}

/// Translated corpus when `translate` has run, otherwise the preprocessed one.
fn training_split(prov: &mut Provenance, config: &ExperimentConfig, split: &str) -> Result<Corpus> {
    let translated = format!("{split}.translated.conll");
    let path = config.output_dir.join(&translated);
    if path.is_file() {
        return read_corpus(prov, &translated, &path, &config.data.target_language);
    }
    let file = format!("{split}.conll");
    let path = artifact(config, &file, "preprocess")?;
    read_corpus(prov, &file, &path, &config.data.source_language)
}

fn train_report_json(report: &TrainReport, config: &ExperimentConfig) -> Result<serde_json::Value> {
    Ok(json!({
        "variant": config.variant()?.as_str(),
        "seed": config.seed,
        "selected_epoch": report.selected_epoch,
        "best_dev_f1": report.best_dev_f1(),
        "momentum": report.momentum,
        "checksum": report.checksum,
        "epochs": report.epochs.iter().map(|e| json!({
            "epoch": e.epoch,
            "learning_rate": e.learning_rate,
            "loss": e.loss,
            "dev_f1": e.dev_f1,
        })).collect::<Vec<_>>(),
    }))
}

fn train_report_log(report: &TrainReport) -> String {
    let mut out = String::new();
    for e in &report.epochs {
        let _ = writeln!(
            out,
            "epoch {:>4}  lr {:.6}  loss {:>14.6}  dev_f1 {:.4}",
            e.epoch, e.learning_rate, e.loss, e.dev_f1
        );
    }
    let _ = writeln!(
        out,
        "selected epoch {} (dev_f1 {:.4}), checksum {}",
        report.selected_epoch,
        report.best_dev_f1(),
        report.checksum
    );
    out
}

pub fn train(config: &ExperimentConfig) -> Result<String> {
    let variant = config.variant()?;
    let romanizer = config.romanizer()?;
    let mut prov = Provenance::new("train", config);
    let (table, table_hash) = read_merged(&mut prov, config)?;
    let mut train = training_split(&mut prov, config, "train")?;
    let dev = training_split(&mut prov, config, "dev")?;
    if variant == xner_core::eval::Variant::Shuffle {
        train = shuffle_ablation(&train, config.seed);
    }
    let train_r = romanize_corpus(&train, &romanizer);
    let dev_r = romanize_corpus(&dev, &romanizer);
    let model = TaggerModel::new(
        config.hyperparams(),
        LabelSet::biose(&xner_core::corpus::EntityType::ALL),
    )?;
    let mut words = WordVectors::new(&table, config.seed);
    let outcome = tagger::train(
        model,
        (&train, &train_r.surfaces),
        (&dev, &dev_r.surfaces),
        &mut words,
    )?;
    let report = &outcome.report;
    prov.write(MODEL_FILE, &encode_model(&outcome.model, &table_hash))?;
    prov.write("train_report.log", train_report_log(report).as_bytes())?;
    prov.write(
        "train_report.json",
        &pretty(&train_report_json(report, config)?),
    )?;
    prov.finish()?;
    Ok(format!(
        "trained {} epochs, selected epoch {} (dev F1 {:.2}), checksum {}\n",
        report.epochs.len(),
        report.selected_epoch,
        report.best_dev_f1() * 100.0,
        report.checksum
    ))
}

/// Loads the model and tags the preprocessed test set.
fn predict_test(
    prov: &mut Provenance,
    config: &ExperimentConfig,
    model_path: Option<&Path>,
) -> Result<(Corpus, Corpus, EmbeddingTable)> {
    let model_path = match model_path {
        Some(p) => p.to_path_buf(),
        None => artifact(config, MODEL_FILE, "train")?,
    };
    let model = decode_model(&prov.read("model", &model_path)?, &model_path)?;
    let (table, table_hash) = read_merged(prov, config)?;
    if model.embedding_sha256 != table_hash {
        return Err(CliError::Model {
            path: model_path,
            message: format!(
                "trained with embeddings {}, but {MERGED_EMBEDDINGS} is {table_hash}",
                model.embedding_sha256
            ),
        });
    }
    let path = artifact(config, "test.conll", "preprocess")?;
    let test = read_corpus(prov, "test.conll", &path, &config.data.target_language)?;
    let romanized = romanize_corpus(&test, &config.romanizer()?);
    let mut words = WordVectors::new(&table, config.seed);
    let predictions = tagger::predict(&model.model, &test, &romanized.surfaces, &mut words)?;
    Ok((test, predictions, table))
}

pub fn predict(config: &ExperimentConfig, model_path: Option<&Path>) -> Result<String> {
    let mut prov = Provenance::new("predict", config);
    let (_, predictions, _) = predict_test(&mut prov, config, model_path)?;
    prov.write("test.predicted.conll", to_conll(&predictions).as_bytes())?;
    prov.finish()?;
    Ok(format!(
        "tagged {} sentences\n",
        predictions.sentences.len()
    ))
}

pub fn evaluate(config: &ExperimentConfig, model_path: Option<&Path>) -> Result<String> {
    let mut prov = Provenance::new("evaluate", config);
    let (test, predictions, table) = predict_test(&mut prov, config, model_path)?;
    let overall = entity_f1(&test, &predictions)?;
    let lengths = f1_by_length(&test, &predictions)?;
    let oov = oov_rate(&test, &table)?;
    let mut text = format!(
        "{:<8} {:>6} {:>6} {:>8} {:>9.2} {:>9.2} {:>9.2}\n\n",
        "Overall",
        overall.gold,
        overall.predicted,
        overall.correct,
        overall.precision * 100.0,
        overall.recall * 100.0,
        overall.f1 * 100.0
    );
    text.push_str(&length_table(&lengths));
    let _ = write!(
        text,
        "\nOOV types {:.2}% of {}, tokens {:.2}% of {}\n",
        oov.type_rate, oov.types, oov.token_rate, oov.tokens
    );
    let record = json!({
        "overall": ScoreRecord::from(&overall),
        "lengths": lengths_json(&lengths),
        "oov": oov_json(&oov),
    });
    prov.write("scores.txt", text.as_bytes())?;
    prov.write("scores.json", &pretty(&record))?;
    prov.finish()?;
    Ok(text)
}

pub fn ablate(config: &ExperimentConfig) -> Result<String> {
    let variants = config.variants()?;
    let romanizer = config.romanizer()?;
    let mut prov = Provenance::new("ablate", config);
    let (table, _) = read_merged(&mut prov, config)?;
    let dictionary = read_dictionary(&mut prov, config)?;
    let mut corpora = Vec::new();
    for split in SPLITS {
        let file = format!("{split}.conll");
        let path = artifact(config, &file, "preprocess")?;
        corpora.push(read_corpus(
            &mut prov,
            &file,
            &path,
            &language_of(config, split),
        )?);
    }
    let hyper = config.hyperparams();
    let resources = TransferResources {
        table: &table,
        dictionary: &dictionary,
        romanizer: &romanizer,
        alpha: config.translation.alpha,
        hyper: &hyper,
    };
    let configs: Vec<AblationConfig> = variants
        .iter()
        .map(|&variant| AblationConfig {
            variant,
            seed: config.seed,
        })
        .collect();
    let runs = run_ablation(&corpora[0], &corpora[1], &corpora[2], &configs, &resources)?;
    let rows: Vec<_> = runs.iter().map(|r| (r.variant, r.test)).collect();
    let text = ablation_table(&rows);
    let record = json!({
        "seed": config.seed,
        "rows": runs.iter().map(|r| json!({
            "variant": r.variant.as_str(),
            "name": r.variant.row_name(),
            "test": ScoreRecord::from(&r.test),
            "lengths": lengths_json(&r.lengths),
            "selected_epoch": r.report.selected_epoch,
            "best_dev_f1": r.report.best_dev_f1(),
            "checksum": r.report.checksum,
        })).collect::<Vec<_>>(),
    });
    prov.write("ablation.txt", text.as_bytes())?;
    prov.write("ablation.json", &pretty(&record))?;
    prov.finish()?;
    Ok(text)
}

pub fn oov_report(config: &ExperimentConfig) -> Result<String> {
    let mut prov = Provenance::new("oov-report", config);
    let (table, _) = read_merged(&mut prov, config)?;
    let mut text = format!(
        "{:<18} {:>8} {:>8} {:>8} {:>8}\n",
        "Corpus", "Types", "OOV%", "Tokens", "OOV%"
    );
    let mut record = serde_json::Map::new();
    for file in [
        "train.conll",
        "dev.conll",
        "test.conll",
        "train.translated.conll",
        "dev.translated.conll",
    ] {
        let path = config.output_dir.join(file);
        if !path.is_file() {
            continue;
        }
        let corpus = read_corpus(&mut prov, file, &path, "")?;
        let r = oov_rate(&corpus, &table)?;
        let _ = writeln!(
            text,
            "{:<18} {:>8} {:>8.2} {:>8} {:>8.2}",
            file.trim_end_matches(".conll"),
            r.types,
            r.type_rate,
            r.tokens,
            r.token_rate
        );
        record.insert(file.trim_end_matches(".conll").to_string(), oov_json(&r));
    }
    if record.is_empty() {
        return Err(CliError::Config(
            "no corpora in the output directory; run `preprocess` first".into(),
        ));
    }
    prov.write("oov.txt", text.as_bytes())?;
    prov.write("oov.json", &pretty(&record.into()))?;
    prov.finish()?;
    Ok(text)
}
