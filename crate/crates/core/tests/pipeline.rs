use xner_core::corpus::{convert_schema, parse_conll_with_schema, to_conll, Schema};
use xner_core::embeddings::{apply_alignment, merge_tables, normalize_table, procrustes_align};
use xner_core::eval::{ablation_table, run_ablation, AblationConfig, TransferResources, Variant};
use xner_core::romanizer::{romanize_corpus, Romanizer};
use xner_core::synthetic::{transfer_benchmark, TransferConfig};
use xner_core::tagger::Hyperparams;
use xner_core::translation::translate_corpus;

fn small() -> TransferConfig {
    TransferConfig {
        dim: 8,
        train_sentences: 40,
        dev_sentences: 10,
        test_sentences: 20,
        seed: 3,
    }
}

#[test]
fn aligned_target_vectors_land_on_their_translations() {
    let b = transfer_benchmark(&small()).unwrap();
    let src = normalize_table(&b.source_embeddings).unwrap().table;
    let tgt = normalize_table(&b.target_embeddings).unwrap().table;
    let map = procrustes_align(&tgt, &src, &b.seed_dictionary.reversed()).unwrap();
    let aligned = apply_alignment(&tgt, &map).unwrap();
    let mut hits = 0;
    for (s, t) in &b.seed_dictionary.pairs {
        let exclude = Default::default();
        if src.nearest(aligned.get(t).unwrap(), &exclude) == Some(s.as_str()) {
            hits += 1;
        }
    }
    assert!(hits * 10 >= b.seed_dictionary.pairs.len() * 9, "{hits}");
}

#[test]
fn translated_training_data_romanizes_to_ascii() {
    let b = transfer_benchmark(&small()).unwrap();
    let (translated, stats) = translate_corpus(&b.train, &b.dictionary, &b.target_embeddings, 0.5);
    assert_eq!(stats.kept, 0);
    assert_eq!(stats.total(), b.train.token_count());
    let r = romanize_corpus(&translated, &Romanizer::new(b.romanization.clone()));
    assert_eq!(r.unmatched, 0);
    // Names keep their spelling through translation and romanization.
    for (s, rs) in b.train.sentences.iter().zip(&r.surfaces) {
        for (tok, rom) in s.tokens().iter().zip(rs) {
            if tok.label.entity_type().is_some() {
                assert_eq!(tok.surface(), rom);
            }
        }
    }
}

#[test]
fn conll_round_trip_of_benchmark_corpora() {
    let b = transfer_benchmark(&small()).unwrap();
    for c in [&b.train, &b.test] {
        let biose = convert_schema(c, Schema::Biose);
        let back = parse_conll_with_schema(&to_conll(&biose), 0, 1, Schema::Biose).unwrap();
        assert_eq!(back.sentences, biose.sentences);
    }
}

#[test]
fn ablation_runs_every_variant_reproducibly() {
    let b = transfer_benchmark(&small()).unwrap();
    let src = normalize_table(&b.source_embeddings).unwrap().table;
    let tgt = normalize_table(&b.target_embeddings).unwrap().table;
    let map = procrustes_align(&tgt, &src, &b.seed_dictionary.reversed()).unwrap();
    let merged = merge_tables(&src, &apply_alignment(&tgt, &map).unwrap())
        .unwrap()
        .table;
    let romanizer = Romanizer::new(b.romanization.clone());
    let hyper = Hyperparams {
        word_dim: 8,
        char_dim: 4,
        char_hidden: 4,
        token_hidden: 4,
        epochs: 2,
        ..Hyperparams::default()
    };
    let resources = TransferResources {
        table: &merged,
        dictionary: &b.dictionary,
        romanizer: &romanizer,
        alpha: 0.5,
        hyper: &hyper,
    };
    let configs: Vec<_> = Variant::ALL
        .iter()
        .map(|&variant| AblationConfig { variant, seed: 9 })
        .collect();
    let first = run_ablation(&b.train, &b.dev, &b.test, &configs, &resources).unwrap();
    let second = run_ablation(&b.train, &b.dev, &b.test, &configs, &resources).unwrap();
    assert_eq!(first.len(), 4);
    for (a, z) in first.iter().zip(&second) {
        assert_eq!(a.report, z.report);
        assert_eq!(a.test, z.test);
        assert_eq!(a.predictions.sentences.len(), b.test.sentences.len());
        let surfaces = |c: &xner_core::corpus::Corpus| {
            c.sentences
                .iter()
                .flat_map(|s| s.surfaces().map(String::from).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        };
        assert_eq!(surfaces(&a.predictions), surfaces(&b.test));
    }
    let table = ablation_table(
        &first
            .iter()
            .map(|r| (r.variant, r.test))
            .collect::<Vec<_>>(),
    );
    let rows: Vec<&str> = table
        .lines()
        .skip(1)
        .map(|l| l.split("  ").next().unwrap().trim())
        .collect();
    assert_eq!(rows, ["Full Model", "Shuffle", "Word-only", "Char-only"]);
}
