//! Mapping-based zero-shot prediction: class encodings h(y), a linear map g from
//! features to encodings, and nearest-encoding prediction.

mod encode;
mod mapper;
mod predict;

use thiserror::Error;

pub use encode::{
    components_to_string, encode_labels, parse_components, read_attributes, read_class_map,
    write_attributes, write_class_map, AttributeTable, Component, EncodeOptions, EncodingSources,
    EncodingTable,
};
pub use mapper::{
    map_features, read_model, sae_gradient, sae_loss, train_ridge, train_sae, write_model,
    Mapper, RidgeModel, SaeConfig, SaeModel,
};
pub use predict::{distance, predict, CandidateSet, Distance, PredictConfig};

#[derive(Debug, Error)]
pub enum ZslError {
    #[error("label `{label}`: no {what}")]
    UnknownLabel { label: String, what: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("cosine distance to a zero vector is undefined")]
    ZeroVector,
    #[error("candidate set is empty")]
    EmptyCandidates,
    #[error("numerical failure: {0}")]
    Divergence(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

impl ZslError {
    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        ZslError::Format { line, message: message.into() }
    }
}
