use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::{Ablation, MapperKind, RunConfig};
use super::dataset::{load_dataset, write_features, write_split, ZslDataset};
use super::metrics::{macro_accuracy, per_class_accuracy, sample_accuracy};
use super::synth::SyntheticData;
use super::{at, ErrorClass, HarnessError};
use crate::el_embed::{export_space, train_el, ElTrainConfig};
use crate::normalizer::{normalize, write_normalized};
use crate::ontology::{parse_ontology, serialize_ontology, validate, Ontology};
use crate::text_walk::{
    lexicalize, project, random_walks, train_skipgram, SkipGramConfig, WalkConfig, WordVectors,
};
use crate::zsl::{
    encode_labels, map_features, predict, read_attributes, read_class_map, train_ridge, train_sae,
    write_attributes, write_class_map, write_model, Component, EncodingSources, EncodingTable,
    Mapper, SaeConfig,
};

pub const REPORT_TEXT: &str = "report.txt";
pub const REPORT_JSON: &str = "report.json";
pub const MANIFEST: &str = "manifest.txt";
pub const EMBEDDING_FILE: &str = "embedding.tsv";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counts {
    pub train_samples: usize,
    pub test_samples: usize,
    pub seen_classes: usize,
    pub unseen_classes: usize,
    pub feature_dim: usize,
    pub encoding_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    /// Per-class accuracy ("micro accuracy") for every label with test samples.
    pub per_class_accuracy: BTreeMap<String, f64>,
    /// Mean per-class accuracy over the unseen labels.
    pub macro_unseen_accuracy: f64,
    /// Correct predictions over all test samples.
    pub sample_accuracy: f64,
    pub counts: Counts,
    pub el_final_loss: Option<f64>,
    pub mapper_train_loss: Option<f64>,
    pub config_echo: BTreeMap<String, String>,
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "average micro accuracy (unseen classes)\t{:.6}", self.macro_unseen_accuracy);
        let _ = writeln!(out, "sample accuracy (all test samples)\t{:.6}", self.sample_accuracy);
        let c = &self.counts;
        let _ = writeln!(out, "train samples\t{}", c.train_samples);
        let _ = writeln!(out, "test samples\t{}", c.test_samples);
        let _ = writeln!(out, "seen classes\t{}", c.seen_classes);
        let _ = writeln!(out, "unseen classes\t{}", c.unseen_classes);
        let _ = writeln!(out, "feature dim\t{}", c.feature_dim);
        let _ = writeln!(out, "encoding dim\t{}", c.encoding_dim);
        if let Some(l) = self.el_final_loss {
            let _ = writeln!(out, "embedding loss\t{l:.6e}");
        }
        if let Some(l) = self.mapper_train_loss {
            let _ = writeln!(out, "mapper loss\t{l:.6e}");
        }
        out.push_str("\n[micro accuracy per class]\n");
        for (label, acc) in &self.per_class_accuracy {
            let _ = writeln!(out, "{label}\t{acc:.6}");
        }
        out.push_str("\n[config]\n");
        for (k, v) in &self.config_echo {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

fn read(path: &Path) -> Result<String, HarnessError> {
    fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), HarnessError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| HarnessError::Io { path, source })
}

fn required<'a>(p: &'a Option<PathBuf>, key: &str) -> Result<&'a Path, HarnessError> {
    p.as_deref().ok_or_else(|| HarnessError::Usage(format!("configuration key `{key}` is required")))
}

/// Seeds of the individual stages, all derived from the run seed.
fn stage_seed(seed: u64, stage: u64) -> u64 {
    seed.wrapping_add(stage)
}

fn unit(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

/// Same labels and block layout, values drawn from a seeded standard normal.
pub fn random_encodings(table: &EncodingTable, seed: u64, normalize: bool) -> EncodingTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut encodings = BTreeMap::new();
    for label in table.encodings.keys() {
        let mut z = Vec::with_capacity(table.dim());
        for &d in &table.dims {
            let mut block: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            if normalize {
                unit(&mut block);
            }
            z.extend(block);
        }
        encodings.insert(label.clone(), z);
    }
    EncodingTable { components: table.components.clone(), dims: table.dims.clone(), encodings }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// `sha256  name` for every regular file in `dir` except the manifest itself.
pub fn write_manifest(dir: &Path) -> Result<(), HarnessError> {
    let io = |source| HarnessError::Io { path: dir.to_path_buf(), source };
    let mut names: Vec<String> = fs::read_dir(dir)
        .map_err(io)?
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_ok_and(|t| t.is_file()))
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n != MANIFEST)
        .collect();
    names.sort();
    let mut out = String::new();
    for n in names {
        let bytes = fs::read(dir.join(&n)).map_err(io)?;
        let _ = writeln!(out, "{}  {n}", sha256_hex(&bytes));
    }
    write(dir, MANIFEST, &out)
}

/// Parses and validates the configured ontology.
fn load_ontology(cfg: &RunConfig) -> Result<Ontology, HarnessError> {
    let text = read(required(&cfg.ontology, "ontology")?)?;
    let o = parse_ontology(&text).map_err(at("parse"))?;
    let violations = validate(&o);
    if let Some(v) = violations.first() {
        return Err(HarnessError::Stage { stage: "parse", class: ErrorClass::Data, message: v.to_string() });
    }
    Ok(o)
}

/// parse → normalize → embed → walk → word vectors → encode → map → predict → score.
///
/// Every intermediate artifact is written to `out`, followed by the report files
/// and a manifest of sha256 digests. Identical configurations give identical
/// files.
pub fn run_pipeline(cfg: &RunConfig, out: &Path) -> Result<MetricsReport, HarnessError> {
    cfg.validate()?;
    fs::create_dir_all(out).map_err(|source| HarnessError::Io { path: out.to_path_buf(), source })?;
    write(out, "config.cfg", &cfg.to_text())?;

    let o = load_ontology(cfg)?;
    let data = load_dataset(
        &read(required(&cfg.train_features, "train_features")?)?,
        &read(required(&cfg.test_features, "test_features")?)?,
        &read(required(&cfg.split, "split")?)?,
    )
    .map_err(|e| e.in_stage("load"))?;
    let class_map = read_class_map(&read(required(&cfg.class_map, "class_map")?)?).map_err(at("load"))?;
    let attributes = match &cfg.attributes {
        Some(p) => Some(read_attributes(&read(p)?).map_err(at("load"))?),
        None => None,
    };

    let normalized = normalize(&o).map_err(at("normalize"))?;
    write(out, "normalized.txt", &write_normalized(&normalized))?;

    let uses = |c: Component| cfg.encode.components.contains(&c);
    let mut el_final_loss = None;
    let space = if uses(Component::ElCenter) {
        let el_cfg = ElTrainConfig { seed: stage_seed(cfg.seed, 0), ..cfg.el.clone() };
        let trained = train_el(&normalized, &el_cfg).map_err(at("embed"))?;
        write(out, EMBEDDING_FILE, &export_space(&trained.space))?;
        el_final_loss = Some(trained.final_loss);
        Some(trained.space)
    } else {
        None
    };

    let words = if uses(Component::Word) {
        let graph = project(&o).map_err(at("project"))?;
        let mut edges = String::new();
        for (s, p, t) in &graph.edges {
            let _ = writeln!(edges, "{s}\t{p}\t{t}");
        }
        write(out, "graph.tsv", &edges)?;
        let walk_cfg = WalkConfig { seed: stage_seed(cfg.seed, 1), ..cfg.walk.clone() };
        let walks = random_walks(&graph, &walk_cfg).map_err(at("walk"))?;
        let corpus = lexicalize(&walks, &o);
        write(out, "corpus.txt", &corpus.to_text())?;
        let init = match &cfg.word_vectors {
            Some(p) => Some(WordVectors::from_text(&read(p)?).map_err(at("w2v"))?),
            None => None,
        };
        let sg_cfg = SkipGramConfig { seed: stage_seed(cfg.seed, 2), ..cfg.skipgram.clone() };
        let wv = train_skipgram(&corpus, &sg_cfg, init.as_ref()).map_err(at("w2v"))?.vectors;
        write(out, "vectors.txt", &wv.to_text())?;
        Some(wv)
    } else {
        None
    };

    let labels = data.labels();
    let sources = EncodingSources {
        class_map: Some(&class_map),
        space: space.as_ref(),
        words: words.as_ref().map(|w| (w, &o)),
        attributes: attributes.as_ref(),
    };
    let mut table = encode_labels(&labels, &sources, &cfg.encode).map_err(at("encode"))?;
    if cfg.ablation == Ablation::Random {
        table = random_encodings(&table, stage_seed(cfg.seed, 4), cfg.encode.normalize);
    }
    write(out, "encodings.tsv", &table.to_tsv())?;

    let (mapper, mapper_train_loss) = train_mapper(cfg, &data, &table)?;
    write(out, "model.txt", &write_model(&mapper))?;

    let candidates = cfg.predict.candidates.labels(&data.seen, &data.unseen);
    let mut predictions = Vec::with_capacity(data.test.len());
    let mut lines = String::new();
    for s in &data.test {
        let gx = map_features(&mapper, &s.x).map_err(at("predict"))?;
        let y = predict(&gx, &table, &candidates, cfg.predict.distance).map_err(at("predict"))?;
        let _ = writeln!(lines, "{}\t{}\t{y}", s.id, s.label);
        predictions.push(y);
    }
    write(out, "predictions.tsv", &lines)?;

    let truth: Vec<String> = data.test.iter().map(|s| s.label.clone()).collect();
    let score = |e: HarnessError| e.in_stage("eval");
    let report = MetricsReport {
        per_class_accuracy: per_class_accuracy(&predictions, &truth).map_err(score)?,
        macro_unseen_accuracy: macro_accuracy(&predictions, &truth, &data.unseen).map_err(score)?,
        sample_accuracy: sample_accuracy(&predictions, &truth).map_err(score)?,
        counts: Counts {
            train_samples: data.train.len(),
            test_samples: data.test.len(),
            seen_classes: data.seen.len(),
            unseen_classes: data.unseen.len(),
            feature_dim: data.feature_dim,
            encoding_dim: table.dim(),
        },
        el_final_loss,
        mapper_train_loss,
        config_echo: cfg.to_pairs().into_iter().collect(),
    };
    write(out, REPORT_TEXT, &report.to_text())?;
    write(out, REPORT_JSON, &report.to_json())?;
    write_manifest(out)?;
    Ok(report)
}

/// Feature matrix `X` (p×N) and target matrix `Z` (m×N), one column per
/// training sample with `z = h(label)`.
pub fn training_matrices(
    data: &ZslDataset,
    table: &EncodingTable,
) -> Result<(DMatrix<f64>, DMatrix<f64>), HarnessError> {
    let n = data.train.len();
    if n == 0 {
        return Err(HarnessError::Stage {
            stage: "map",
            class: ErrorClass::Data,
            message: "no training samples".into(),
        });
    }
    let x = DMatrix::from_fn(data.feature_dim, n, |i, j| data.train[j].x[i]);
    let mut z = DMatrix::zeros(table.dim(), n);
    for (j, s) in data.train.iter().enumerate() {
        let h = table.get(&s.label).ok_or_else(|| HarnessError::Stage {
            stage: "map",
            class: ErrorClass::Data,
            message: format!("no encoding for `{}`", s.label),
        })?;
        z.set_column(j, &nalgebra::DVector::from_column_slice(h));
    }
    Ok((x, z))
}

fn train_mapper(
    cfg: &RunConfig,
    data: &ZslDataset,
    table: &EncodingTable,
) -> Result<(Mapper, Option<f64>), HarnessError> {
    let (x, z) = training_matrices(data, table)?;
    Ok(match cfg.mapper {
        MapperKind::Sae => {
            let sae_cfg = SaeConfig { seed: stage_seed(cfg.seed, 3), ..cfg.sae.clone() };
            let m = train_sae(&x, &z, &sae_cfg).map_err(at("map"))?;
            let loss = m.train_loss;
            (Mapper::Sae(m), Some(loss))
        }
        MapperKind::Ridge => (Mapper::Ridge(train_ridge(&x, &z, cfg.ridge_alpha).map_err(at("map"))?), None),
    })
}

/// Writes the dataset files of a synthetic benchmark into `dir` together with a
/// `run.cfg` that points at them, and returns that configuration.
pub fn write_synthetic(data: &SyntheticData, dir: &Path) -> Result<RunConfig, HarnessError> {
    fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.to_path_buf(), source })?;
    write(dir, "ontology.elf", &serialize_ontology(&data.ontology))?;
    write(dir, "train.tsv", &write_features(&data.dataset.train))?;
    write(dir, "test.tsv", &write_features(&data.dataset.test))?;
    write(dir, "split.txt", &write_split(&data.dataset.split()))?;
    write(dir, "classes.tsv", &write_class_map(&data.class_map))?;
    write(dir, "attributes.tsv", &write_attributes(&data.attributes))?;
    // the library defaults take only a couple of steps per epoch on an ontology of
    // this size; smaller batches and a larger step reach a near-zero loss
    let tuned = RunConfig {
        el: ElTrainConfig { learning_rate: 0.1, batch_size: 8, epochs: 2000, ..Default::default() },
        ..Default::default()
    };
    let cfg = RunConfig {
        ontology: Some(dir.join("ontology.elf")),
        train_features: Some(dir.join("train.tsv")),
        test_features: Some(dir.join("test.tsv")),
        split: Some(dir.join("split.txt")),
        class_map: Some(dir.join("classes.tsv")),
        attributes: Some(dir.join("attributes.tsv")),
        ..tuned.clone()
    };
    let relative = RunConfig {
        ontology: Some("ontology.elf".into()),
        train_features: Some("train.tsv".into()),
        test_features: Some("test.tsv".into()),
        split: Some("split.txt".into()),
        class_map: Some("classes.tsv".into()),
        attributes: Some("attributes.tsv".into()),
        ..tuned
    };
    write(dir, "run.cfg", &relative.to_text())?;
    Ok(cfg)
}
