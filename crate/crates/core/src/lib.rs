//! Ontology-guided semantic encodings for zero-shot learning.
//!
//! The pipeline parses an EL++ ontology, rewrites it into normal forms, learns
//! ball embeddings of concepts and translation vectors of relations, trains word
//! vectors on random walks over the projected ontology graph, and uses the
//! resulting class encodings in a mapping-based zero-shot classifier.

pub mod el_embed;
pub mod harness;
pub mod normalizer;
pub mod ontology;
pub mod text_walk;
pub mod zsl;
