use std::fs;
use std::path::Path;

use ontozsl::el_embed::ElTrainConfig;
use ontozsl::harness::{
    gen_synthetic, macro_accuracy, run_pipeline, sample_accuracy, training_matrices,
    write_synthetic, Ablation, ErrorClass, RunConfig, SynthParams, EMBEDDING_FILE, MANIFEST,
    REPORT_JSON, REPORT_TEXT,
};
use ontozsl::harness::Classified;
use ontozsl::text_walk::SkipGramConfig;
use ontozsl::zsl::{
    encode_labels, map_features, predict, train_ridge, Component, Distance, EncodeOptions,
    EncodingSources, Mapper,
};
use proptest::prelude::*;

fn small(dir: &Path) -> RunConfig {
    let params = SynthParams { per_class: 6, ..Default::default() };
    let cfg = write_synthetic(&gen_synthetic(&params).unwrap(), dir).unwrap();
    RunConfig {
        el: ElTrainConfig { epochs: 100, ..cfg.el.clone() },
        skipgram: SkipGramConfig { epochs: 5, ..Default::default() },
        ..cfg
    }
}

#[test]
fn report_schema_and_echo() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small(&tmp.path().join("data"));
    let r = run_pipeline(&cfg, &tmp.path().join("run")).unwrap();
    assert!((0.0..=1.0).contains(&r.macro_unseen_accuracy));
    assert!((0.0..=1.0).contains(&r.sample_accuracy));
    assert_eq!(r.config_echo, cfg.to_pairs().into_iter().collect());
    assert_eq!(r.counts.seen_classes, 8);
    assert_eq!(r.counts.unseen_classes, 2);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("run").join(REPORT_JSON)).unwrap()).unwrap();
    assert_eq!(json["macro_unseen_accuracy"].as_f64().unwrap(), r.macro_unseen_accuracy);
    let text = fs::read_to_string(tmp.path().join("run").join(REPORT_TEXT)).unwrap();
    assert!(text.starts_with("average micro accuracy (unseen classes)"));
}

#[test]
fn manifest_lists_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    run_pipeline(&small(&tmp.path().join("data")), &run).unwrap();
    let manifest = fs::read_to_string(run.join(MANIFEST)).unwrap();
    let listed: Vec<&str> = manifest.lines().map(|l| l.split("  ").nth(1).unwrap()).collect();
    for f in ["config.cfg", "normalized.txt", EMBEDDING_FILE, "encodings.tsv", "model.txt", "predictions.tsv", REPORT_TEXT, REPORT_JSON] {
        assert!(listed.contains(&f), "{f} missing from {listed:?}");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        encode: EncodeOptions { components: vec![Component::ElCenter, Component::Word], ..Default::default() },
        ..small(&tmp.path().join("data"))
    };
    run_pipeline(&cfg, &tmp.path().join("a")).unwrap();
    run_pipeline(&cfg, &tmp.path().join("b")).unwrap();
    for f in [REPORT_TEXT, REPORT_JSON, EMBEDDING_FILE, "vectors.txt", "corpus.txt", MANIFEST] {
        let a = fs::read(tmp.path().join("a").join(f)).unwrap();
        let b = fs::read(tmp.path().join("b").join(f)).unwrap();
        assert!(a == b, "{f} differs");
    }
}

#[test]
fn encoding_dims_follow_components() {
    let tmp = tempfile::tempdir().unwrap();
    let base = small(&tmp.path().join("data"));
    let (n, d) = (base.el.dim, base.skipgram.dim);
    for (components, dim) in [
        (vec![Component::ElCenter], n),
        (vec![Component::Word], d),
        (vec![Component::ElCenter, Component::Word], n + d),
    ] {
        let cfg = RunConfig { encode: EncodeOptions { components, ..Default::default() }, ..base.clone() };
        let r = run_pipeline(&cfg, &tmp.path().join("run")).unwrap();
        assert_eq!(r.counts.encoding_dim, dim);
    }
}

#[test]
fn noiseless_seen_classes_are_separable() {
    let data = gen_synthetic(&SynthParams { noise: 0.0, ..Default::default() }).unwrap();
    let opts = EncodeOptions { components: vec![Component::Attribute], ..Default::default() };
    let src = EncodingSources { attributes: Some(&data.attributes), ..Default::default() };
    let table = encode_labels(&data.dataset.labels(), &src, &opts).unwrap();
    let (x, z) = training_matrices(&data.dataset, &table).unwrap();
    let mapper = Mapper::Ridge(train_ridge(&x, &z, 1e-6).unwrap());
    let seen_tests: Vec<_> = data.dataset.test.iter().filter(|s| data.dataset.seen.contains(&s.label)).collect();
    assert!(!seen_tests.is_empty());
    let pred: Vec<String> = seen_tests
        .iter()
        .map(|s| predict(&map_features(&mapper, &s.x).unwrap(), &table, &data.dataset.seen, Distance::L2).unwrap())
        .collect();
    let truth: Vec<String> = seen_tests.iter().map(|s| s.label.clone()).collect();
    assert_eq!(sample_accuracy(&pred, &truth).unwrap(), 1.0);
}

#[test]
fn synthetic_files_repeat() {
    let tmp = tempfile::tempdir().unwrap();
    for d in ["a", "b"] {
        write_synthetic(&gen_synthetic(&SynthParams::default()).unwrap(), &tmp.path().join(d)).unwrap();
    }
    for f in ["ontology.elf", "train.tsv", "test.tsv", "split.txt", "classes.tsv", "attributes.tsv", "run.cfg"] {
        assert_eq!(fs::read(tmp.path().join("a").join(f)).unwrap(), fs::read(tmp.path().join("b").join(f)).unwrap(), "{f}");
    }
    let from_file = RunConfig::from_file(&tmp.path().join("a").join("run.cfg")).unwrap();
    let direct = write_synthetic(&gen_synthetic(&SynthParams::default()).unwrap(), &tmp.path().join("a")).unwrap();
    assert_eq!(from_file, direct);
}

#[test]
fn failures_map_to_classes() {
    let tmp = tempfile::tempdir().unwrap();
    let base = small(&tmp.path().join("data"));
    let missing = RunConfig { ontology: Some(tmp.path().join("nope.elf")), ..base.clone() };
    assert_eq!(run_pipeline(&missing, &tmp.path().join("r")).unwrap_err().class(), ErrorClass::Data);
    let unnamed = RunConfig { split: None, ..base.clone() };
    assert_eq!(run_pipeline(&unnamed, &tmp.path().join("r")).unwrap_err().class(), ErrorClass::Usage);
    let wild = RunConfig { el: ElTrainConfig { learning_rate: 1e300, ..base.el.clone() }, ..base.clone() };
    let e = run_pipeline(&wild, &tmp.path().join("r")).unwrap_err();
    assert_eq!(e.class(), ErrorClass::Numeric, "{e}");
    assert!(e.to_string().starts_with("embed:"), "{e}");
    let ablated = RunConfig { ablation: Ablation::Random, ..base };
    assert!(run_pipeline(&ablated, &tmp.path().join("r")).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn accuracies_bounded_and_order_free(
        pairs in prop::collection::vec((0usize..3, 0usize..3), 1..30),
        rot in 0usize..30,
    ) {
        let labels = ["a", "b", "c"];
        let mut pred: Vec<String> = pairs.iter().map(|(p, _)| labels[*p].to_string()).collect();
        let mut truth: Vec<String> = pairs.iter().map(|(_, t)| labels[*t].to_string()).collect();
        let present: Vec<&str> = labels.iter().copied().filter(|l| truth.iter().any(|t| t == l)).collect();
        let s = sample_accuracy(&pred, &truth).unwrap();
        let m = macro_accuracy(&pred, &truth, &present).unwrap();
        prop_assert!((0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&m));
        let k = rot % pred.len();
        pred.rotate_left(k);
        truth.rotate_left(k);
        prop_assert_eq!(macro_accuracy(&pred, &truth, &present).unwrap(), m);
    }

    #[test]
    fn synthetic_invariants(seed in 0u64..1000, per_class in 1usize..6, k_unseen in 1usize..4) {
        let d = gen_synthetic(&SynthParams { seed, per_class, k_unseen, ..Default::default() }).unwrap();
        let ds = &d.dataset;
        prop_assert!(ds.seen.iter().all(|l| !ds.unseen.contains(l)));
        for l in ds.labels() {
            let n = ds.train.iter().chain(&ds.test).filter(|s| s.label == l).count();
            prop_assert_eq!(n, per_class);
        }
        prop_assert!(ontozsl::ontology::validate(&d.ontology).is_empty());
    }
}
