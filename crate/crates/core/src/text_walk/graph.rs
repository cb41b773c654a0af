use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TextError;
use crate::normalizer::{normalize, NormalAxiom, BOTTOM, TOP};
use crate::ontology::{Axiom, Ontology};

/// Predicate of the edges produced by plain subsumptions and class assertions.
pub const SUBCLASS_OF: &str = "subClassOf";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProjectedGraph {
    pub nodes: BTreeSet<String>,
    /// `(subject, predicate, object)`.
    pub edges: BTreeSet<(String, String, String)>,
    /// Relation chain axioms left out of the projection.
    pub skipped: usize,
}

impl ProjectedGraph {
    /// Outgoing `(predicate, object)` pairs per subject, in edge order.
    pub fn adjacency(&self) -> BTreeMap<&str, Vec<(&str, &str)>> {
        let mut adj: BTreeMap<&str, Vec<(&str, &str)>> = BTreeMap::new();
        for (s, p, o) in &self.edges {
            adj.entry(s.as_str()).or_default().push((p.as_str(), o.as_str()));
        }
        adj
    }
}

/// Triple graph of an ontology.
///
/// The ontology is normalized first, so nested expressions contribute edges
/// through fresh names. `A ⊑ B` becomes `(A, subClassOf, B)`, and both
/// `A ⊑ ∃r.B` and `∃r.B ⊑ A` become `(A, r, B)`. Nominal concepts are mapped
/// back to their individuals, which turns `a : C` into `(a, subClassOf, C)` and
/// `r(a, b)` into `(a, r, b)`. Conjunctions, disjointness, relation inclusions
/// and anything touching `Top`/`Bottom` produce no edge.
pub fn project(o: &Ontology) -> Result<ProjectedGraph, TextError> {
    let mut source = o.clone();
    source.axioms.retain(|a| !matches!(a, Axiom::RelationChain { .. }));
    let skipped = o.axioms.len() - source.axioms.len();
    let n = normalize(&source)?;

    let mut g = ProjectedGraph { skipped, ..Default::default() };
    g.nodes.extend(o.signature.concepts.iter().cloned());
    g.nodes.extend(o.signature.individuals.iter().cloned());
    g.nodes.extend(n.fresh.iter().cloned());

    let node = |c: &str| n.individual_of(c).unwrap_or(c).to_string();
    for ax in &n.axioms {
        let (s, p, t) = match ax {
            NormalAxiom::Nf1 { sub, sup } => (sub, SUBCLASS_OF, sup),
            NormalAxiom::Nf2 { sub, relation, filler } => (sub, relation.as_str(), filler),
            NormalAxiom::Nf3 { relation, filler, sup } => (sup, relation.as_str(), filler),
            _ => continue,
        };
        if [s, t].iter().any(|c| *c == TOP || *c == BOTTOM) {
            continue;
        }
        g.edges.insert((node(s), p.to_string(), node(t)));
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkConfig {
    pub walks_per_node: usize,
    /// Maximum number of edges per walk.
    pub walk_length: usize,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig { walks_per_node: 10, walk_length: 4, seed: 42 }
    }
}

/// `walks_per_node` walks from every node in name order. Each step follows an
/// outgoing edge chosen uniformly; a walk stops early at a node without one.
/// A walk lists node, predicate, node, … .
pub fn random_walks(g: &ProjectedGraph, cfg: &WalkConfig) -> Result<Vec<Vec<String>>, TextError> {
    if cfg.walks_per_node == 0 || cfg.walk_length == 0 {
        return Err(TextError::InvalidConfig(
            "walks per node and walk length must be positive".into(),
        ));
    }
    let adj = g.adjacency();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut walks = Vec::with_capacity(g.nodes.len() * cfg.walks_per_node);
    for start in &g.nodes {
        for _ in 0..cfg.walks_per_node {
            let mut walk = vec![start.clone()];
            let mut at = start.as_str();
            for _ in 0..cfg.walk_length {
                let Some(out) = adj.get(at) else { break };
                let (p, o) = out[rng.random_range(0..out.len())];
                walk.push(p.to_string());
                walk.push(o.to_string());
                at = o;
            }
            walks.push(walk);
        }
    }
    Ok(walks)
}
