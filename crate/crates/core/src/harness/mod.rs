//! Datasets, metrics, the synthetic benchmark, and end-to-end runs.

mod config;
mod dataset;
mod metrics;
mod pipeline;
mod synth;

use std::fmt::Display;
use std::path::PathBuf;

use thiserror::Error;

pub use config::{Ablation, MapperKind, RunConfig, CONFIG_KEYS};
pub use dataset::{
    load_dataset, read_features, read_split, write_features, write_split, Sample, Split, ZslDataset,
};
pub use metrics::{macro_accuracy, per_class_accuracy, sample_accuracy};
pub use pipeline::{
    random_encodings, run_pipeline, training_matrices, write_manifest, write_synthetic, Counts,
    MetricsReport, EMBEDDING_FILE, MANIFEST, REPORT_JSON, REPORT_TEXT,
};
pub use synth::{gen_synthetic, SynthParams, SyntheticData};

use crate::el_embed::EmbedError;
use crate::normalizer::{NormalizeError, NormalizedFormatError};
use crate::ontology::ParseError;
use crate::text_walk::TextError;
use crate::zsl::ZslError;

/// Failure categories, each with its own process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad arguments or configuration.
    Usage,
    /// Malformed or inconsistent input data.
    Data,
    /// Divergence or another numerical breakdown.
    Numeric,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Usage => 1,
            ErrorClass::Data => 2,
            ErrorClass::Numeric => 3,
        }
    }
}

/// Errors that know which [`ErrorClass`] they belong to.
pub trait Classified {
    fn class(&self) -> ErrorClass;
}

impl Classified for ParseError {
    fn class(&self) -> ErrorClass {
        ErrorClass::Data
    }
}

impl Classified for NormalizeError {
    fn class(&self) -> ErrorClass {
        ErrorClass::Data
    }
}

impl Classified for NormalizedFormatError {
    fn class(&self) -> ErrorClass {
        ErrorClass::Data
    }
}

impl Classified for EmbedError {
    fn class(&self) -> ErrorClass {
        match self {
            EmbedError::Divergence { .. } => ErrorClass::Numeric,
            EmbedError::InvalidConfig(_) => ErrorClass::Usage,
            _ => ErrorClass::Data,
        }
    }
}

impl Classified for TextError {
    fn class(&self) -> ErrorClass {
        match self {
            TextError::Divergence => ErrorClass::Numeric,
            TextError::InvalidConfig(_) => ErrorClass::Usage,
            _ => ErrorClass::Data,
        }
    }
}

impl Classified for ZslError {
    fn class(&self) -> ErrorClass {
        match self {
            ZslError::Divergence(_) | ZslError::ZeroVector => ErrorClass::Numeric,
            ZslError::InvalidConfig(_) => ErrorClass::Usage,
            _ => ErrorClass::Data,
        }
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{stage}: {message}")]
    Stage { stage: &'static str, class: ErrorClass, message: String },
}

impl Classified for HarnessError {
    fn class(&self) -> ErrorClass {
        match self {
            HarnessError::Usage(_) => ErrorClass::Usage,
            HarnessError::Data(_) | HarnessError::Io { .. } => ErrorClass::Data,
            HarnessError::Stage { class, .. } => *class,
        }
    }
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        self.class().exit_code()
    }

    /// Prefixes the message with a stage name, keeping the class.
    pub fn in_stage(self, stage: &'static str) -> Self {
        match self {
            HarnessError::Stage { .. } => self,
            other => HarnessError::Stage { stage, class: other.class(), message: other.to_string() },
        }
    }
}

/// `map_err` adapter that tags a module error with the stage it came from.
pub fn at<E: Classified + Display>(stage: &'static str) -> impl Fn(E) -> HarnessError {
    move |e| HarnessError::Stage { stage, class: e.class(), message: e.to_string() }
}
