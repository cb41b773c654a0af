use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Arg, ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use ontozsl::el_embed::{export_space, import_space, train_el, ElTrainConfig};
use ontozsl::harness::{
    at, gen_synthetic, macro_accuracy, per_class_accuracy, read_features, read_split,
    run_pipeline, sample_accuracy, training_matrices, write_synthetic, Classified, HarnessError,
    RunConfig, Split, SynthParams, ZslDataset, CONFIG_KEYS,
};
use ontozsl::harness::MapperKind;
use ontozsl::normalizer::{classify, normalize, read_normalized, write_normalized};
use ontozsl::ontology::{parse_ontology, serialize_ontology, validate, Ontology};
use ontozsl::text_walk::{
    lexicalize, project, random_walks, train_skipgram, SkipGramConfig, WalkConfig, WalkCorpus,
    WordVectors,
};
use ontozsl::zsl::{
    encode_labels, map_features, parse_components, predict, read_attributes, read_class_map,
    read_model, train_ridge, train_sae, write_model, CandidateSet, Distance, EncodeOptions,
    EncodingSources, EncodingTable, Mapper, SaeConfig,
};

/// Zero-shot learning with ontology embeddings.
#[derive(Parser)]
#[command(name = "ontozsl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate an ELF ontology; print it in canonical form.
    Parse(InOut),
    /// Rewrite an ELF ontology into normal-form axioms.
    Normalize(InOut),
    /// Print the atomic subsumptions entailed by a normalized ontology.
    Classify {
        #[arg(long)]
        normalized: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a ball embedding of a normalized ontology.
    EmbedEl(EmbedArgs),
    /// Project an ontology onto a labelled graph (`s<TAB>p<TAB>t` lines).
    Project(InOut),
    /// Sample random walks over the projected graph and write the lexicalized corpus.
    Walk(WalkArgs),
    /// Train skip-gram word vectors on a corpus.
    W2v(W2vArgs),
    /// Build class encodings.
    Encode(EncodeArgs),
    /// Fit a feature-to-encoding map on the training samples.
    TrainMap(TrainMapArgs),
    /// Predict a label for every test sample.
    Predict(PredictArgs),
    /// Score a predictions file.
    Eval {
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        split: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic benchmark and a run configuration for it.
    Synth(SynthArgs),
    /// Run every stage from one configuration. Each configuration key is also
    /// accepted as a `--key value` flag and overrides the file.
    Pipeline {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct InOut {
    #[arg(long)]
    input: PathBuf,
    /// Defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    normalized: PathBuf,
    #[arg(long, default_value_t = 50)]
    dim: usize,
    #[arg(long, default_value_t = 0.1)]
    margin: f64,
    #[arg(long, default_value_t = 1000)]
    epochs: usize,
    #[arg(long, default_value_t = 0.01)]
    learning_rate: f64,
    #[arg(long, default_value_t = 64)]
    batch_size: usize,
    #[arg(long, default_value_t = 1)]
    negatives: usize,
    #[arg(long, default_value_t = 1e-3)]
    gamma_min: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct WalkArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 10)]
    walks_per_node: usize,
    #[arg(long, default_value_t = 4)]
    walk_length: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct W2vArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Pretrained vectors used as the starting point.
    #[arg(long)]
    init: Option<PathBuf>,
    #[arg(long, default_value_t = 25)]
    dim: usize,
    #[arg(long, default_value_t = 2)]
    window: usize,
    #[arg(long, default_value_t = 5)]
    negatives: usize,
    #[arg(long, default_value_t = 50)]
    epochs: usize,
    #[arg(long, default_value_t = 0.025)]
    learning_rate: f64,
    #[arg(long, default_value_t = 1)]
    min_count: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EncodeArgs {
    /// Labels to encode are those of this split file.
    #[arg(long)]
    split: PathBuf,
    /// `+`-separated list of EL_CENTER, WORD, ATTRIBUTE.
    #[arg(long, default_value = "EL_CENTER")]
    components: String,
    #[arg(long)]
    class_map: Option<PathBuf>,
    #[arg(long)]
    embedding: Option<PathBuf>,
    #[arg(long)]
    vectors: Option<PathBuf>,
    /// Ontology supplying labels for WORD encodings.
    #[arg(long)]
    ontology: Option<PathBuf>,
    #[arg(long)]
    attributes: Option<PathBuf>,
    #[arg(long)]
    no_normalize: bool,
    #[arg(long)]
    include_radius: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainMapArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    split: PathBuf,
    #[arg(long)]
    encodings: PathBuf,
    #[arg(long, default_value = "sae")]
    mapper: MapperKind,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 5000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-3)]
    alpha: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    test: PathBuf,
    #[arg(long)]
    split: PathBuf,
    #[arg(long)]
    encodings: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value = "l2")]
    distance: Distance,
    /// `unseen` or `all`.
    #[arg(long, default_value = "unseen")]
    candidates: CandidateSet,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 8)]
    k_seen: usize,
    #[arg(long, default_value_t = 2)]
    k_unseen: usize,
    #[arg(long, default_value_t = 30)]
    per_class: usize,
    #[arg(long, default_value_t = 16)]
    p: usize,
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn read(path: &Path) -> Result<String, HarnessError> {
    fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.to_path_buf(), source })?;
    }
    fs::write(path, text).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), HarnessError> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_ontology(path: &Path) -> Result<Ontology, HarnessError> {
    let o = parse_ontology(&read(path)?).map_err(at("parse"))?;
    let violations = validate(&o);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(HarnessError::Data(format!("parse: {}", list.join("; "))));
    }
    Ok(o)
}

fn load_split(path: &Path) -> Result<Split, HarnessError> {
    read_split(&read(path)?)
}

/// `id<TAB>truth<TAB>prediction` rows.
fn read_predictions(text: &str) -> Result<(Vec<String>, Vec<String>), HarnessError> {
    let (mut truth, mut pred) = (Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 3 {
            return Err(HarnessError::Data(format!("predictions, line {}: expected 3 fields", i + 1)));
        }
        truth.push(f[1].to_string());
        pred.push(f[2].to_string());
    }
    Ok((truth, pred))
}

fn run(command: Command, overrides: &[(String, String)]) -> Result<(), HarnessError> {
    match command {
        Command::Parse(a) => emit(a.out.as_deref(), &serialize_ontology(&load_ontology(&a.input)?)),
        Command::Normalize(a) => {
            let n = normalize(&load_ontology(&a.input)?).map_err(at("normalize"))?;
            emit(a.out.as_deref(), &write_normalized(&n))
        }
        Command::Classify { normalized, out } => {
            let n = read_normalized(&read(&normalized)?).map_err(at("classify"))?;
            let mut text = String::new();
            for (sub, sup) in classify(&n) {
                let _ = writeln!(text, "{sub}\t{sup}");
            }
            emit(out.as_deref(), &text)
        }
        Command::EmbedEl(a) => {
            let n = read_normalized(&read(&a.normalized)?).map_err(at("embed"))?;
            let cfg = ElTrainConfig {
                dim: a.dim,
                margin: a.margin,
                learning_rate: a.learning_rate,
                epochs: a.epochs,
                batch_size: a.batch_size,
                negatives: a.negatives,
                gamma_min: a.gamma_min,
                seed: a.seed,
            };
            let trained = train_el(&n, &cfg).map_err(at("embed"))?;
            write(&a.out, &export_space(&trained.space))?;
            eprintln!("final loss {:.6e}", trained.final_loss);
            Ok(())
        }
        Command::Project(a) => {
            let g = project(&load_ontology(&a.input)?).map_err(at("project"))?;
            let mut text = String::new();
            for (s, p, t) in &g.edges {
                let _ = writeln!(text, "{s}\t{p}\t{t}");
            }
            if g.skipped > 0 {
                eprintln!("skipped {} axioms without a graph form", g.skipped);
            }
            emit(a.out.as_deref(), &text)
        }
        Command::Walk(a) => {
            let o = load_ontology(&a.input)?;
            let g = project(&o).map_err(at("project"))?;
            let cfg = WalkConfig { walks_per_node: a.walks_per_node, walk_length: a.walk_length, seed: a.seed };
            let walks = random_walks(&g, &cfg).map_err(at("walk"))?;
            write(&a.out, &lexicalize(&walks, &o).to_text())
        }
        Command::W2v(a) => {
            let corpus = WalkCorpus::from_text(&read(&a.corpus)?);
            let init = match &a.init {
                Some(p) => Some(WordVectors::from_text(&read(p)?).map_err(at("w2v"))?),
                None => None,
            };
            let cfg = SkipGramConfig {
                dim: a.dim,
                window: a.window,
                negatives: a.negatives,
                epochs: a.epochs,
                learning_rate: a.learning_rate,
                min_count: a.min_count,
                seed: a.seed,
            };
            let trained = train_skipgram(&corpus, &cfg, init.as_ref()).map_err(at("w2v"))?;
            write(&a.out, &trained.vectors.to_text())
        }
        Command::Encode(a) => {
            let split = load_split(&a.split)?;
            let mut labels: Vec<String> = split.seen.into_iter().chain(split.unseen).collect();
            labels.sort();
            let class_map = match &a.class_map {
                Some(p) => Some(read_class_map(&read(p)?).map_err(at("encode"))?),
                None => None,
            };
            let space = match &a.embedding {
                Some(p) => Some(import_space(&read(p)?).map_err(at("encode"))?),
                None => None,
            };
            let vectors = match &a.vectors {
                Some(p) => Some(WordVectors::from_text(&read(p)?).map_err(at("encode"))?),
                None => None,
            };
            let ontology = match &a.ontology {
                Some(p) => load_ontology(p)?,
                None => Ontology::default(),
            };
            let attributes = match &a.attributes {
                Some(p) => Some(read_attributes(&read(p)?).map_err(at("encode"))?),
                None => None,
            };
            let sources = EncodingSources {
                class_map: class_map.as_ref(),
                space: space.as_ref(),
                words: vectors.as_ref().map(|v| (v, &ontology)),
                attributes: attributes.as_ref(),
            };
            let opts = EncodeOptions {
                components: parse_components(&a.components).map_err(|e| HarnessError::Usage(e.to_string()))?,
                normalize: !a.no_normalize,
                include_radius: a.include_radius,
            };
            let table = encode_labels(&labels, &sources, &opts).map_err(at("encode"))?;
            write(&a.out, &table.to_tsv())
        }
        Command::TrainMap(a) => {
            let train = read_features(&read(&a.train)?, "training features")?;
            let data = ZslDataset::new(train, Vec::new(), load_split(&a.split)?)?;
            let table = EncodingTable::from_tsv(&read(&a.encodings)?).map_err(at("map"))?;
            let (x, z) = training_matrices(&data, &table)?;
            let model = match a.mapper {
                MapperKind::Sae => {
                    let cfg = SaeConfig { lambda: a.lambda, tol: a.tol, max_iters: a.max_iters, seed: a.seed };
                    let m = train_sae(&x, &z, &cfg).map_err(at("map"))?;
                    eprintln!("training loss {:.6e} after {} iterations", m.train_loss, m.iterations);
                    Mapper::Sae(m)
                }
                MapperKind::Ridge => Mapper::Ridge(train_ridge(&x, &z, a.alpha).map_err(at("map"))?),
            };
            write(&a.out, &write_model(&model))
        }
        Command::Predict(a) => {
            let test = read_features(&read(&a.test)?, "test features")?;
            let data = ZslDataset::new(Vec::new(), test, load_split(&a.split)?)?;
            let table = EncodingTable::from_tsv(&read(&a.encodings)?).map_err(at("predict"))?;
            let model = read_model(&read(&a.model)?).map_err(at("predict"))?;
            let candidates = a.candidates.labels(&data.seen, &data.unseen);
            let mut text = String::new();
            for s in &data.test {
                let gx = map_features(&model, &s.x).map_err(at("predict"))?;
                let y = predict(&gx, &table, &candidates, a.distance).map_err(at("predict"))?;
                let _ = writeln!(text, "{}\t{}\t{y}", s.id, s.label);
            }
            emit(a.out.as_deref(), &text)
        }
        Command::Eval { predictions, split, out } => {
            let (truth, pred) = read_predictions(&read(&predictions)?)?;
            let split = load_split(&split)?;
            let known: BTreeSet<&String> = split.seen.iter().chain(&split.unseen).collect();
            if let Some(l) = truth.iter().find(|l| !known.contains(l)) {
                return Err(HarnessError::Data(format!("label `{l}` is not in the split")));
            }
            let eval = |e: HarnessError| e.in_stage("eval");
            let per_class = per_class_accuracy(&pred, &truth).map_err(eval)?;
            let mut text = format!(
                "average micro accuracy (unseen classes)\t{:.6}\nsample accuracy\t{:.6}\n",
                macro_accuracy(&pred, &truth, &split.unseen).map_err(eval)?,
                sample_accuracy(&pred, &truth).map_err(eval)?,
            );
            for (label, acc) in per_class {
                let _ = writeln!(text, "{label}\t{acc:.6}");
            }
            emit(out.as_deref(), &text)
        }
        Command::Synth(a) => {
            let params = SynthParams {
                k_seen: a.k_seen,
                k_unseen: a.k_unseen,
                per_class: a.per_class,
                p: a.p,
                noise: a.noise,
                seed: a.seed,
                ..Default::default()
            };
            write_synthetic(&gen_synthetic(&params)?, &a.out)?;
            Ok(())
        }
        Command::Pipeline { config, out } => {
            let mut cfg = match &config {
                Some(p) => RunConfig::from_file(p)?,
                None => RunConfig::default(),
            };
            for (key, value) in overrides {
                cfg.set(key, value, Path::new("."))?;
            }
            let report = run_pipeline(&cfg, &out)?;
            print!("{}", report.to_text());
            Ok(())
        }
    }
}

/// The `pipeline` subcommand accepts one flag per configuration key.
fn command() -> clap::Command {
    Cli::command().mut_subcommand("pipeline", |mut sub| {
        for key in CONFIG_KEYS {
            sub = sub.arg(Arg::new(key).long(key).value_name("VALUE").help_heading("Configuration"));
        }
        sub
    })
}

fn overrides(m: &ArgMatches) -> Vec<(String, String)> {
    let Some(("pipeline", sub)) = m.subcommand() else {
        return Vec::new();
    };
    CONFIG_KEYS
        .iter()
        .filter_map(|k| sub.get_one::<String>(k).map(|v| (k.to_string(), v.clone())))
        .collect()
}

fn main() -> ExitCode {
    let parsed = command().try_get_matches().and_then(|m| Ok((Cli::from_arg_matches(&m)?, m)));
    let (cli, matches) = match parsed {
        Ok(p) => p,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command, &overrides(&matches)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.class().exit_code() as u8)
        }
    }
}
