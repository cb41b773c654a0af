//! Ball embeddings of concepts and translation embeddings of relations.
//!
//! A concept is a ball (center, radius); a relation is a vector. Subsumption is
//! ball inclusion, an existential restriction is a translation of the center.

mod io;
mod loss;
mod train;

use std::collections::HashMap;

use thiserror::Error;

pub use io::{export_space, import_space};
pub use loss::{
    loss, loss_disjoint, loss_gradient, loss_nf1, loss_nf2, loss_nf2_negative, loss_nf3,
    loss_nf4, loss_role, Gradient, LossTerm,
};
pub use train::{total_loss, train_el, ElTrainConfig, TrainedSpace};

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("unknown concept `{0}`")]
    UnknownConcept(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("`{name}` is already present in the space")]
    Duplicate { name: String },
    #[error("`{name}` has dimension {found}, expected {expected}")]
    DimensionMismatch { name: String, expected: usize, found: usize },
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("loss became non-finite at step {step}")]
    Divergence { step: usize },
    #[error("embedding file, line {line}: {message}")]
    Format { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Self {
        Ball { center, radius }
    }

    /// `true` if this ball lies inside `other` up to `tolerance`.
    pub fn inside(&self, other: &Ball, tolerance: f64) -> bool {
        distance(&self.center, &other.center) + self.radius <= other.radius + tolerance
    }
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Concept balls and relation vectors of a common dimension, in insertion order.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingSpace {
    dim: usize,
    concept_names: Vec<String>,
    balls: Vec<Ball>,
    relation_names: Vec<String>,
    relation_vectors: Vec<Vec<f64>>,
    concept_index: HashMap<String, usize>,
    relation_index: HashMap<String, usize>,
}

impl PartialEq for EmbeddingSpace {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.concept_names == other.concept_names
            && self.balls == other.balls
            && self.relation_names == other.relation_names
            && self.relation_vectors == other.relation_vectors
    }
}

impl EmbeddingSpace {
    pub fn new(dim: usize) -> Self {
        EmbeddingSpace { dim, ..Default::default() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn insert_concept(&mut self, name: &str, ball: Ball) -> Result<(), EmbedError> {
        if ball.center.len() != self.dim {
            return Err(EmbedError::DimensionMismatch {
                name: name.to_string(),
                expected: self.dim,
                found: ball.center.len(),
            });
        }
        if self.concept_index.contains_key(name) {
            return Err(EmbedError::Duplicate { name: name.to_string() });
        }
        self.concept_index.insert(name.to_string(), self.balls.len());
        self.concept_names.push(name.to_string());
        self.balls.push(ball);
        Ok(())
    }

    pub fn insert_relation(&mut self, name: &str, vector: Vec<f64>) -> Result<(), EmbedError> {
        if vector.len() != self.dim {
            return Err(EmbedError::DimensionMismatch {
                name: name.to_string(),
                expected: self.dim,
                found: vector.len(),
            });
        }
        if self.relation_index.contains_key(name) {
            return Err(EmbedError::Duplicate { name: name.to_string() });
        }
        self.relation_index.insert(name.to_string(), self.relation_vectors.len());
        self.relation_names.push(name.to_string());
        self.relation_vectors.push(vector);
        Ok(())
    }

    pub fn concept(&self, name: &str) -> Option<&Ball> {
        self.concept_index.get(name).map(|&i| &self.balls[i])
    }

    pub fn concept_mut(&mut self, name: &str) -> Option<&mut Ball> {
        self.concept_index.get(name).map(|&i| &mut self.balls[i])
    }

    pub fn relation(&self, name: &str) -> Option<&[f64]> {
        self.relation_index.get(name).map(|&i| self.relation_vectors[i].as_slice())
    }

    pub fn relation_mut(&mut self, name: &str) -> Option<&mut Vec<f64>> {
        self.relation_index.get(name).map(|&i| &mut self.relation_vectors[i])
    }

    pub fn concepts(&self) -> impl Iterator<Item = (&str, &Ball)> {
        self.concept_names.iter().map(String::as_str).zip(&self.balls)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.relation_names.iter().map(String::as_str).zip(self.relation_vectors.iter().map(Vec::as_slice))
    }

    pub fn concept_count(&self) -> usize {
        self.balls.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relation_vectors.len()
    }

    pub(crate) fn concept_id(&self, name: &str) -> Option<usize> {
        self.concept_index.get(name).copied()
    }

    pub(crate) fn relation_id(&self, name: &str) -> Option<usize> {
        self.relation_index.get(name).copied()
    }

    pub(crate) fn ball_at(&self, i: usize) -> &Ball {
        &self.balls[i]
    }

    pub(crate) fn balls_mut(&mut self) -> &mut [Ball] {
        &mut self.balls
    }

    pub(crate) fn relation_at(&self, i: usize) -> &[f64] {
        &self.relation_vectors[i]
    }

    pub(crate) fn relations_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.relation_vectors
    }
}
