use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::HarnessError;
use crate::el_embed::ElTrainConfig;
use crate::text_walk::{SkipGramConfig, WalkConfig};
use crate::zsl::{components_to_string, parse_components, EncodeOptions, PredictConfig, SaeConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MapperKind {
    #[default]
    Sae,
    Ridge,
}

impl fmt::Display for MapperKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapperKind::Sae => "sae",
            MapperKind::Ridge => "ridge",
        })
    }
}

impl FromStr for MapperKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sae" => Ok(MapperKind::Sae),
            "ridge" => Ok(MapperKind::Ridge),
            _ => Err(HarnessError::Usage(format!("unknown mapper `{s}`"))),
        }
    }
}

/// Encodings used for mapping and prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ablation {
    #[default]
    None,
    /// Every class encoding replaced by seeded Gaussian noise of the same shape.
    Random,
}

impl fmt::Display for Ablation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ablation::None => "none",
            Ablation::Random => "random",
        })
    }
}

impl FromStr for Ablation {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Ablation::None),
            "random" => Ok(Ablation::Random),
            _ => Err(HarnessError::Usage(format!("unknown ablation `{s}`"))),
        }
    }
}

/// Everything one pipeline run needs. Stage seeds are derived from `seed`;
/// the `seed` fields of the nested stage configs are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub ontology: Option<PathBuf>,
    pub train_features: Option<PathBuf>,
    pub test_features: Option<PathBuf>,
    pub split: Option<PathBuf>,
    pub class_map: Option<PathBuf>,
    pub attributes: Option<PathBuf>,
    /// Pretrained word vectors to fine-tune.
    pub word_vectors: Option<PathBuf>,
    pub encode: EncodeOptions,
    pub el: ElTrainConfig,
    pub walk: WalkConfig,
    pub skipgram: SkipGramConfig,
    pub mapper: MapperKind,
    pub sae: SaeConfig,
    pub ridge_alpha: f64,
    pub predict: PredictConfig,
    pub ablation: Ablation,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            ontology: None,
            train_features: None,
            test_features: None,
            split: None,
            class_map: None,
            attributes: None,
            word_vectors: None,
            encode: EncodeOptions::default(),
            el: ElTrainConfig::default(),
            walk: WalkConfig::default(),
            skipgram: SkipGramConfig::default(),
            mapper: MapperKind::default(),
            sae: SaeConfig::default(),
            ridge_alpha: 1e-3,
            predict: PredictConfig::default(),
            ablation: Ablation::default(),
            seed: 42,
        }
    }
}

/// Every recognised key, in the order [`RunConfig::to_pairs`] emits them.
pub const CONFIG_KEYS: [&str; 34] = [
    "ontology",
    "train_features",
    "test_features",
    "split",
    "class_map",
    "attributes",
    "word_vectors",
    "components",
    "normalize_components",
    "include_radius",
    "el_dim",
    "el_margin",
    "el_learning_rate",
    "el_epochs",
    "el_batch_size",
    "el_negatives",
    "el_gamma_min",
    "walks_per_node",
    "walk_length",
    "w2v_dim",
    "w2v_window",
    "w2v_negatives",
    "w2v_epochs",
    "w2v_learning_rate",
    "w2v_min_count",
    "mapper",
    "sae_lambda",
    "sae_tol",
    "sae_max_iters",
    "ridge_alpha",
    "distance",
    "candidates",
    "ablation",
    "seed",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, HarnessError> {
    value
        .parse()
        .map_err(|_| HarnessError::Usage(format!("`{key}`: cannot parse `{value}`")))
}

fn path_string(p: &Option<PathBuf>) -> String {
    p.as_ref().map_or(String::new(), |p| p.display().to_string())
}

impl RunConfig {
    /// Sets one key. Relative paths are taken relative to `base`.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<(), HarnessError> {
        let value = value.trim();
        let path = || (!value.is_empty()).then(|| base.join(value));
        match key {
            "ontology" => self.ontology = path(),
            "train_features" => self.train_features = path(),
            "test_features" => self.test_features = path(),
            "split" => self.split = path(),
            "class_map" => self.class_map = path(),
            "attributes" => self.attributes = path(),
            "word_vectors" => self.word_vectors = path(),
            "components" => {
                self.encode.components =
                    parse_components(value).map_err(|e| HarnessError::Usage(e.to_string()))?
            }
            "normalize_components" => self.encode.normalize = parse(key, value)?,
            "include_radius" => self.encode.include_radius = parse(key, value)?,
            "el_dim" => self.el.dim = parse(key, value)?,
            "el_margin" => self.el.margin = parse(key, value)?,
            "el_learning_rate" => self.el.learning_rate = parse(key, value)?,
            "el_epochs" => self.el.epochs = parse(key, value)?,
            "el_batch_size" => self.el.batch_size = parse(key, value)?,
            "el_negatives" => self.el.negatives = parse(key, value)?,
            "el_gamma_min" => self.el.gamma_min = parse(key, value)?,
            "walks_per_node" => self.walk.walks_per_node = parse(key, value)?,
            "walk_length" => self.walk.walk_length = parse(key, value)?,
            "w2v_dim" => self.skipgram.dim = parse(key, value)?,
            "w2v_window" => self.skipgram.window = parse(key, value)?,
            "w2v_negatives" => self.skipgram.negatives = parse(key, value)?,
            "w2v_epochs" => self.skipgram.epochs = parse(key, value)?,
            "w2v_learning_rate" => self.skipgram.learning_rate = parse(key, value)?,
            "w2v_min_count" => self.skipgram.min_count = parse(key, value)?,
            "mapper" => self.mapper = value.parse()?,
            "sae_lambda" => self.sae.lambda = parse(key, value)?,
            "sae_tol" => self.sae.tol = parse(key, value)?,
            "sae_max_iters" => self.sae.max_iters = parse(key, value)?,
            "ridge_alpha" => self.ridge_alpha = parse(key, value)?,
            "distance" => {
                self.predict.distance = value.parse().map_err(|e: crate::zsl::ZslError| {
                    HarnessError::Usage(e.to_string())
                })?
            }
            "candidates" => {
                self.predict.candidates = value.parse().map_err(|e: crate::zsl::ZslError| {
                    HarnessError::Usage(e.to_string())
                })?
            }
            "ablation" => self.ablation = value.parse()?,
            "seed" => self.seed = parse(key, value)?,
            _ => return Err(HarnessError::Usage(format!("unknown configuration key `{key}`"))),
        }
        Ok(())
    }

    /// `key = value` lines; `#` starts a comment.
    pub fn from_text(text: &str, base: &Path) -> Result<Self, HarnessError> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::Usage(format!("config line {}: expected `key = value`", i + 1))
            })?;
            cfg.set(key.trim(), value, base)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
        Self::from_text(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// All keys with their current values, in [`CONFIG_KEYS`] order.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let values = [
            path_string(&self.ontology),
            path_string(&self.train_features),
            path_string(&self.test_features),
            path_string(&self.split),
            path_string(&self.class_map),
            path_string(&self.attributes),
            path_string(&self.word_vectors),
            components_to_string(&self.encode.components),
            self.encode.normalize.to_string(),
            self.encode.include_radius.to_string(),
            self.el.dim.to_string(),
            self.el.margin.to_string(),
            self.el.learning_rate.to_string(),
            self.el.epochs.to_string(),
            self.el.batch_size.to_string(),
            self.el.negatives.to_string(),
            self.el.gamma_min.to_string(),
            self.walk.walks_per_node.to_string(),
            self.walk.walk_length.to_string(),
            self.skipgram.dim.to_string(),
            self.skipgram.window.to_string(),
            self.skipgram.negatives.to_string(),
            self.skipgram.epochs.to_string(),
            self.skipgram.learning_rate.to_string(),
            self.skipgram.min_count.to_string(),
            self.mapper.to_string(),
            self.sae.lambda.to_string(),
            self.sae.tol.to_string(),
            self.sae.max_iters.to_string(),
            self.ridge_alpha.to_string(),
            self.predict.distance.to_string(),
            self.predict.candidates.to_string(),
            self.ablation.to_string(),
            self.seed.to_string(),
        ];
        CONFIG_KEYS.iter().map(|k| k.to_string()).zip(values).collect()
    }

    pub fn to_text(&self) -> String {
        self.to_pairs().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Checks that the required inputs are named and the component list is usable.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let required = [
            ("ontology", &self.ontology),
            ("train_features", &self.train_features),
            ("test_features", &self.test_features),
            ("split", &self.split),
            ("class_map", &self.class_map),
        ];
        if let Some((key, _)) = required.iter().find(|(_, v)| v.is_none()) {
            return Err(HarnessError::Usage(format!("configuration key `{key}` is required")));
        }
        if self.encode.components.is_empty() {
            return Err(HarnessError::Usage("component list is empty".into()));
        }
        if self.encode.components.contains(&crate::zsl::Component::Attribute) && self.attributes.is_none() {
            return Err(HarnessError::Usage("ATTRIBUTE encodings need `attributes`".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zsl::{CandidateSet, Component, Distance};

    #[test]
    fn text_round_trip() {
        let base = Path::new("/data");
        let cfg = RunConfig::from_text(
            "ontology = o.elf  # the ontology\ncomponents = EL_CENTER+WORD\nel_margin = 0.25\n\
             distance = cosine\ncandidates = all\nmapper = ridge\nseed = 7\n",
            base,
        )
        .unwrap();
        assert_eq!(cfg.ontology, Some(PathBuf::from("/data/o.elf")));
        assert_eq!(cfg.encode.components, vec![Component::ElCenter, Component::Word]);
        assert_eq!(cfg.el.margin, 0.25);
        assert_eq!(cfg.predict.distance, Distance::Cosine);
        assert_eq!(cfg.predict.candidates, CandidateSet::SeenAndUnseen);
        assert_eq!(cfg.mapper, MapperKind::Ridge);
        let again = RunConfig::from_text(&cfg.to_text(), base).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(cfg.to_pairs().len(), CONFIG_KEYS.len());
    }

    #[test]
    fn bad_entries() {
        let base = Path::new(".");
        assert!(RunConfig::from_text("colour = blue\n", base).is_err());
        assert!(RunConfig::from_text("el_dim = many\n", base).is_err());
        assert!(RunConfig::from_text("just text\n", base).is_err());
        assert!(RunConfig::default().validate().is_err());
    }

    #[test]
    fn every_key_is_settable() {
        let mut cfg = RunConfig::default();
        for (k, v) in RunConfig::default().to_pairs() {
            let v = if v.is_empty() { "x".to_string() } else { v };
            cfg.set(&k, &v, Path::new(".")).unwrap();
        }
    }
}
