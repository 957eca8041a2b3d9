use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::corpus::{parse_conll_with_schema, Corpus, EntityType, Schema};
use crate::embeddings::EmbeddingTable;
use crate::romanizer::identity_romanization;

fn tiny(mode: InputMode) -> Hyperparams {
    Hyperparams {
        word_dim: 3,
        char_dim: 4,
        char_hidden: 3,
        token_hidden: 4,
        dropout: 0.0,
        epochs: 5,
        seed: 7,
        input_mode: mode,
        ..Hyperparams::default()
    }
}

fn table() -> EmbeddingTable {
    EmbeddingTable::from_entries(
        3,
        [
            ("john", vec![0.3, -0.2, 0.5]),
            ("lives", vec![0.1, 0.4, -0.3]),
            ("paris", vec![-0.5, 0.2, 0.1]),
        ],
    )
    .unwrap()
}

fn corpus(text: &str) -> Corpus {
    parse_conll_with_schema(text, 0, 1, Schema::Biose).unwrap()
}

fn sample() -> Corpus {
    corpus("john S-PER\nlives O\nin O\nnew B-LOC\nyork E-LOC\n\n")
}

fn model(mode: InputMode) -> TaggerModel {
    TaggerModel::new(tiny(mode), LabelSet::biose(&EntityType::ALL)).unwrap()
}

fn encoded(model: &TaggerModel, c: &Corpus, table: &EmbeddingTable) -> EncodedSentence {
    let r = identity_romanization(c);
    let mut words = WordVectors::new(table, 1);
    model
        .encode(&c.sentences[0], &r.surfaces[0], &mut words)
        .unwrap()
}

#[test]
fn schedule_matches_closed_form() {
    let h = Hyperparams::default();
    assert_eq!(h.learning_rate_for_epoch(0), 0.01);
    assert!((h.learning_rate_for_epoch(1) - 0.01 / 1.05).abs() < 1e-15);
    assert!((h.learning_rate_for_epoch(10) - 0.01 / 1.5).abs() < 1e-15);
}

#[test]
fn rejects_bad_hyperparams() {
    for h in [
        Hyperparams {
            dropout: 1.0,
            ..Hyperparams::default()
        },
        Hyperparams {
            clip: 0.0,
            ..Hyperparams::default()
        },
        Hyperparams {
            learning_rate: -1.0,
            ..Hyperparams::default()
        },
    ] {
        assert!(h.validate().is_err());
    }
}

#[test]
fn label_set_is_o_then_biose_per_type() {
    let l = LabelSet::biose(&EntityType::ALL);
    assert_eq!(l.len(), 17);
    assert_eq!(l.label(0).to_string(), "O");
    assert_eq!(l.label(1).to_string(), "B-PER");
    assert_eq!(l.label(4).to_string(), "S-PER");
}

#[test]
fn initial_parameters_are_bounded_and_seeded() {
    let a = model(InputMode::Full);
    for (_, g) in a.params.groups() {
        assert!(g.iter().all(|x| x.abs() <= 0.1));
    }
    assert_eq!(a, model(InputMode::Full));
    let other = TaggerModel::new(
        Hyperparams {
            seed: 8,
            ..tiny(InputMode::Full)
        },
        LabelSet::biose(&EntityType::ALL),
    );
    assert_ne!(a.params.checksum(), other.unwrap().params.checksum());
}

#[test]
fn shapes() {
    let m = model(InputMode::Full);
    assert_eq!(m.char_encode("x").len(), 6);
    assert_eq!(m.char_encode(""), m.char_encode(""));
    assert_eq!(m.char_encode("paris"), m.char_encode("paris"));
    let t = table();
    let e = m.emissions(&encoded(&m, &sample(), &t));
    assert_eq!((e.rows(), e.cols()), (5, 17));
    assert_eq!(model(InputMode::WordOnly).token_input_dim(), 3);
    assert_eq!(model(InputMode::CharOnly).token_input_dim(), 6);
}

#[test]
fn gradients_match_finite_differences() {
    let t = table();
    for mode in [InputMode::Full, InputMode::WordOnly, InputMode::CharOnly] {
        let m = model(mode);
        let s = encoded(&m, &sample(), &t);
        let report = check_gradients(&m, &s, 1e-5, 40).unwrap();
        assert_eq!(report.groups.len(), 12);
        assert!(report.max_rel_error <= 1e-4, "{mode}: {report:?}");
        assert!(
            report.groups.iter().all(|g| g.max_abs_error < 1e-8),
            "{mode}: {report:?}"
        );
    }
}

#[test]
fn word_only_leaves_char_parameters_without_gradient() {
    let t = table();
    let m = model(InputMode::WordOnly);
    let s = encoded(&m, &sample(), &t);
    let mut grad = Params::zeros(&m.hyper, m.labels.len());
    m.loss_and_gradient(&s, None, &mut grad).unwrap();
    for (name, g) in grad.groups() {
        if name.starts_with("char") {
            assert!(g.iter().all(|&x| x == 0.0), "{name}");
        } else if name != "transitions" {
            assert!(g.iter().any(|&x| x != 0.0), "{name}");
        }
    }
}

#[test]
fn dropout_changes_training_pass_only() {
    let t = table();
    let m = TaggerModel::new(
        Hyperparams {
            dropout: 0.5,
            ..tiny(InputMode::Full)
        },
        LabelSet::biose(&EntityType::ALL),
    )
    .unwrap();
    let s = encoded(&m, &sample(), &t);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let dropped = m.forward(&s, Some(&mut rng)).emissions;
    assert_ne!(dropped, m.emissions(&s));
    assert_eq!(m.emissions(&s), m.emissions(&s));
}

fn overfit_corpus() -> Corpus {
    let mut text = String::new();
    let names = ["alice", "bob", "carol", "dave", "erin"];
    let places = ["rome", "oslo", "lima", "kyiv"];
    for i in 0..8 {
        text.push_str(&alloc::format!(
            "{} S-PER\nvisited O\n{} S-LOC\n\n",
            names[i % names.len()],
            places[i % places.len()]
        ));
    }
    corpus(&text)
}

#[test]
fn training_is_reproducible_and_keeps_table_frozen() {
    let t = table();
    let before = t.clone();
    let c = overfit_corpus();
    let r = identity_romanization(&c);
    let run = || {
        let mut words = WordVectors::new(&t, 5);
        train(
            model(InputMode::Full),
            (&c, &r.surfaces),
            (&c, &r.surfaces),
            &mut words,
        )
        .unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a.report, b.report);
    assert_eq!(a.model, b.model);
    assert_eq!(t, before);
    assert_eq!(a.report.epochs.len(), 5);
    for (e, rec) in a.report.epochs.iter().enumerate() {
        assert_eq!(
            rec.learning_rate,
            tiny(InputMode::Full).learning_rate_for_epoch(e)
        );
    }
    let best = a
        .report
        .epochs
        .iter()
        .map(|r| r.dev_f1)
        .fold(f64::MIN, f64::max);
    let first_best = a
        .report
        .epochs
        .iter()
        .position(|r| r.dev_f1 == best)
        .unwrap();
    assert_eq!(a.report.selected_epoch, first_best);
    assert_eq!(a.report.checksum, a.model.params.checksum());
}

#[test]
fn small_model_overfits() {
    let t = table();
    let c = overfit_corpus();
    let r = identity_romanization(&c);
    let hyper = Hyperparams {
        word_dim: 3,
        char_dim: 8,
        char_hidden: 8,
        token_hidden: 8,
        dropout: 0.0,
        epochs: 200,
        learning_rate: 0.05,
        target_dev_f1: Some(1.0),
        seed: 1,
        ..Hyperparams::default()
    };
    let m = TaggerModel::new(hyper, LabelSet::biose(&EntityType::ALL)).unwrap();
    let mut words = WordVectors::new(&t, 5);
    let out = train(m, (&c, &r.surfaces), (&c, &r.surfaces), &mut words).unwrap();
    assert_eq!(out.report.best_dev_f1(), 1.0);
    let pred = predict(&out.model, &c, &r.surfaces, &mut words).unwrap();
    assert_eq!(pred, c);
    assert_eq!(
        predict(&out.model, &c, &r.surfaces, &mut words).unwrap(),
        pred
    );
}

#[test]
fn bio_corpora_and_empty_dev_are_rejected() {
    let t = table();
    let c = overfit_corpus();
    let r = identity_romanization(&c);
    let bio = parse_conll_with_schema("a B-PER\n\n", 0, 1, Schema::Bio).unwrap();
    let rb = identity_romanization(&bio);
    let mut words = WordVectors::new(&t, 5);
    assert!(train(
        model(InputMode::Full),
        (&bio, &rb.surfaces),
        (&c, &r.surfaces),
        &mut words
    )
    .is_err());
    let empty = Corpus::new(Vec::new(), "x", Schema::Biose);
    let no: Vec<Vec<String>> = Vec::new();
    assert!(matches!(
        train(
            model(InputMode::Full),
            (&c, &r.surfaces),
            (&empty, &no),
            &mut words
        ),
        Err(crate::Error::EmptyCorpus)
    ));
}
