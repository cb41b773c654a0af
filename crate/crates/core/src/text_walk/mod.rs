//! Text side of the class encodings: the ontology is projected to a triple
//! graph, random walks over it are turned into sentences through entity labels,
//! and skip-gram word vectors trained on those sentences give ω(y).

mod corpus;
mod graph;
mod skipgram;

use thiserror::Error;

use crate::normalizer::NormalizeError;

pub use corpus::{lexicalize, name_tokens, split_identifier, tokenize_text, WalkCorpus};
pub use graph::{project, random_walks, ProjectedGraph, WalkConfig, SUBCLASS_OF};
pub use skipgram::{
    train_skipgram, word_encoding, SkipGramConfig, TrainedVectors, WordVectors,
};

#[derive(Debug, Error)]
pub enum TextError {
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no token reaches the minimum count")]
    EmptyVocabulary,
    #[error("no token of `{0}` has a word vector")]
    OutOfVocabulary(String),
    #[error("skip-gram loss became non-finite")]
    Divergence,
    #[error("word vector file, line {line}: {message}")]
    Format { line: usize, message: String },
}
