use std::collections::BTreeMap;
use std::fmt::Write;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::corpus::{name_tokens, WalkCorpus};
use super::TextError;
use crate::ontology::Ontology;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct WordVectors {
    pub dim: usize,
    pub vectors: BTreeMap<String, Vec<f64>>,
}

impl WordVectors {
    pub fn new(dim: usize) -> Self {
        WordVectors { dim, vectors: BTreeMap::new() }
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.vectors.get(token).map(Vec::as_slice)
    }

    pub fn insert(&mut self, token: &str, v: Vec<f64>) -> Result<(), TextError> {
        if v.len() != self.dim {
            return Err(TextError::Format {
                line: 0,
                message: format!("`{token}` has {} values, expected {}", v.len(), self.dim),
            });
        }
        self.vectors.insert(token.to_string(), v);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Word2vec text format: `count dim`, then `token v1 … vd` per line.
    /// Values use the shortest representation that reads back exactly.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.vectors.len(), self.dim);
        for (t, v) in &self.vectors {
            out.push_str(t);
            for x in v {
                let _ = write!(out, " {x}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, TextError> {
        let err = |line: usize, message: String| TextError::Format { line, message };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| err(1, "missing `count dim` header".into()))?;
        let head: Vec<usize> = header
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| err(1, format!("bad header `{header}`"))))
            .collect::<Result<_, _>>()?;
        let [count, dim] = head[..] else {
            return Err(err(1, format!("bad header `{header}`")));
        };
        let mut wv = WordVectors::new(dim);
        for (i, line) in lines {
            let mut fields = line.split_whitespace();
            let token = fields.next().unwrap_or_default();
            let v: Vec<f64> = fields
                .map(|x| x.parse().map_err(|_| err(i + 1, format!("`{x}` is not a number"))))
                .collect::<Result<_, _>>()?;
            if v.len() != dim {
                return Err(err(i + 1, format!("`{token}` has {} values, expected {dim}", v.len())));
            }
            if wv.vectors.insert(token.to_string(), v).is_some() {
                return Err(err(i + 1, format!("duplicate token `{token}`")));
            }
        }
        if wv.len() != count {
            return Err(err(1, format!("header announces {count} vectors, found {}", wv.len())));
        }
        Ok(wv)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkipGramConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Tokens rarer than this are dropped before training.
    pub min_count: usize,
    pub seed: u64,
}

impl Default for SkipGramConfig {
    fn default() -> Self {
        SkipGramConfig {
            dim: 25,
            window: 2,
            negatives: 5,
            epochs: 50,
            learning_rate: 0.025,
            min_count: 1,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainedVectors {
    pub vectors: WordVectors,
    /// Mean negative-sampling loss per (center, context) pair, per epoch.
    pub epoch_losses: Vec<f64>,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Skip-gram with negative sampling.
///
/// Tokens found in `init` start from those vectors, the rest from small seeded
/// random values; context vectors start at zero. Negatives follow the unigram
/// distribution raised to 0.75, and a draw equal to the center or context token
/// is skipped. The step size decays linearly over all center positions.
/// Tokens of `init` that do not occur in the corpus are carried over unchanged.
pub fn train_skipgram(
    corpus: &WalkCorpus,
    cfg: &SkipGramConfig,
    init: Option<&WordVectors>,
) -> Result<TrainedVectors, TextError> {
    if cfg.dim == 0 || cfg.window == 0 || cfg.min_count == 0 {
        return Err(TextError::InvalidConfig("dim, window and min count must be positive".into()));
    }
    if !(cfg.learning_rate > 0.0 && cfg.learning_rate.is_finite()) {
        return Err(TextError::InvalidConfig("learning rate must be positive".into()));
    }
    if let Some(w) = init.filter(|w| w.dim != cfg.dim) {
        return Err(TextError::InvalidConfig(format!(
            "initial vectors have dimension {}, expected {}",
            w.dim, cfg.dim
        )));
    }

    let vocab: Vec<(&str, usize)> = corpus
        .vocabulary
        .iter()
        .filter(|(_, &c)| c >= cfg.min_count)
        .map(|(t, &c)| (t.as_str(), c))
        .collect();
    if vocab.is_empty() {
        return Err(TextError::EmptyVocabulary);
    }
    let index: BTreeMap<&str, usize> = vocab.iter().enumerate().map(|(i, (t, _))| (*t, i)).collect();
    let sentences: Vec<Vec<usize>> = corpus
        .sentences
        .iter()
        .map(|s| s.iter().filter_map(|t| index.get(t.as_str()).copied()).collect::<Vec<_>>())
        .filter(|s: &Vec<usize>| !s.is_empty())
        .collect();
    let noise = WeightedIndex::new(vocab.iter().map(|(_, c)| (*c as f64).powf(0.75)))
        .map_err(|e| TextError::InvalidConfig(e.to_string()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let d = cfg.dim;
    let mut input: Vec<Vec<f64>> = vocab
        .iter()
        .map(|(t, _)| {
            let fresh: Vec<f64> = (0..d).map(|_| (rng.random::<f64>() - 0.5) / d as f64).collect();
            init.and_then(|w| w.get(t)).map_or(fresh, <[f64]>::to_vec)
        })
        .collect();
    let mut output = vec![vec![0.0; d]; vocab.len()];

    let positions: usize = sentences.iter().map(Vec::len).sum();
    let total = (positions * cfg.epochs).max(1) as f64;
    let mut seen = 0usize;
    let mut grad = vec![0.0; d];
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);

    for _ in 0..cfg.epochs {
        let (mut loss, mut pairs) = (0.0, 0usize);
        for s in &sentences {
            for (i, &center) in s.iter().enumerate() {
                let lr = cfg.learning_rate * (1.0 - seen as f64 / total).max(1e-4);
                seen += 1;
                let lo = i.saturating_sub(cfg.window);
                let hi = (i + cfg.window + 1).min(s.len());
                for (j, &context) in s.iter().enumerate().take(hi).skip(lo) {
                    if j == i {
                        continue;
                    }
                    grad.fill(0.0);
                    let mut update = |target: usize, label: f64, loss: &mut f64| {
                        let score = dot(&input[center], &output[target]);
                        let p = sigmoid(score);
                        *loss -= if label > 0.5 { p } else { 1.0 - p }.max(1e-12).ln();
                        let g = lr * (label - p);
                        for k in 0..d {
                            grad[k] += g * output[target][k];
                            output[target][k] += g * input[center][k];
                        }
                    };
                    update(context, 1.0, &mut loss);
                    for _ in 0..cfg.negatives {
                        let neg = noise.sample(&mut rng);
                        if neg != center && neg != context {
                            update(neg, 0.0, &mut loss);
                        }
                    }
                    for (x, g) in input[center].iter_mut().zip(&grad) {
                        *x += g;
                    }
                    pairs += 1;
                }
            }
        }
        if !loss.is_finite() {
            return Err(TextError::Divergence);
        }
        epoch_losses.push(if pairs == 0 { 0.0 } else { loss / pairs as f64 });
    }

    let mut vectors = WordVectors::new(d);
    if let Some(w) = init {
        vectors.vectors.extend(w.vectors.iter().map(|(t, v)| (t.clone(), v.clone())));
    }
    for ((t, _), v) in vocab.iter().zip(input) {
        vectors.vectors.insert(t.to_string(), v);
    }
    Ok(TrainedVectors { vectors, epoch_losses })
}

/// Mean vector of the tokens of `label` (see [`name_tokens`]; labels outside the
/// ontology are split like identifiers). Unknown tokens are skipped.
pub fn word_encoding(label: &str, wv: &WordVectors, o: &Ontology) -> Result<Vec<f64>, TextError> {
    let mut tokens = name_tokens(label, o);
    if tokens.is_empty() {
        tokens = super::corpus::split_identifier(label);
    }
    let known: Vec<&[f64]> = tokens.iter().filter_map(|t| wv.get(t)).collect();
    if known.is_empty() {
        return Err(TextError::OutOfVocabulary(label.to_string()));
    }
    let mut mean = vec![0.0; wv.dim];
    for v in &known {
        for (m, x) in mean.iter_mut().zip(*v) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= known.len() as f64);
    Ok(mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::parse_ontology;

    fn wv(entries: &[(&str, &[f64])]) -> WordVectors {
        let mut w = WordVectors::new(entries[0].1.len());
        for (t, v) in entries {
            w.insert(t, v.to_vec()).unwrap();
        }
        w
    }

    #[test]
    fn text_format_round_trip() {
        let w = wv(&[("sun", &[0.1, -2.5e-7]), ("moon", &[1.0 / 3.0, 0.0])]);
        let text = w.to_text();
        assert!(text.starts_with("2 2\nmoon "));
        assert_eq!(WordVectors::from_text(&text).unwrap(), w);
        assert!(WordVectors::from_text("1 2\nsun 1\n").is_err());
        assert!(WordVectors::from_text("2 1\nsun 1\n").is_err());
        assert!(WordVectors::from_text("").is_err());
    }

    #[test]
    fn mean_of_tokens() {
        let o = parse_ontology("Concept(Killer_Whale)\nConcept(Sun)").unwrap();
        let w = wv(&[("killer", &[1.0, 0.0]), ("whale", &[0.0, 1.0]), ("sun", &[3.0, 3.0])]);
        assert_eq!(word_encoding("Killer_Whale", &w, &o).unwrap(), vec![0.5, 0.5]);
        assert_eq!(word_encoding("Sun", &w, &o).unwrap(), vec![3.0, 3.0]);
        let w = wv(&[("whale", &[0.0, 1.0])]);
        assert_eq!(word_encoding("Killer_Whale", &w, &o).unwrap(), vec![0.0, 1.0]);
        assert!(matches!(
            word_encoding("Sun", &w, &o),
            Err(TextError::OutOfVocabulary(l)) if l == "Sun"
        ));
    }

    #[test]
    fn empty_vocabulary() {
        let c = WalkCorpus::from_sentences(vec![vec!["a".into()]]);
        let cfg = SkipGramConfig { min_count: 2, ..Default::default() };
        assert!(matches!(train_skipgram(&c, &cfg, None), Err(TextError::EmptyVocabulary)));
    }

    #[test]
    fn zero_epochs_keep_init() {
        let c = WalkCorpus::from_sentences(vec![vec!["sun".into(), "moon".into()]]);
        let init = wv(&[("sun", &[0.3, -0.7]), ("star", &[1.0, 1.0])]);
        let cfg = SkipGramConfig { dim: 2, epochs: 0, ..Default::default() };
        let out = train_skipgram(&c, &cfg, Some(&init)).unwrap().vectors;
        assert_eq!(out.get("sun").unwrap(), &[0.3, -0.7]);
        assert_eq!(out.get("star").unwrap(), &[1.0, 1.0]);
        assert_eq!(out.get("moon").unwrap().len(), 2);
    }
}
