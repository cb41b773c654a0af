//! Rewriting of an ontology into normal forms, plus a completion-rule classifier.
//!
//! The six output shapes are `A ⊑ B`, `A ⊑ ∃r.B`, `∃r.A ⊑ B`, `A ⊓ B ⊑ C`,
//! `A ⊓ B ⊑ ⊥` and `r ⊑ s`, all over atomic names. Complex subexpressions are
//! replaced by fresh names (`NORM_<k>`), nominals `{a}` by `IND_a`.

mod classify;
mod io;
mod rewrite;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ontology::{Axiom, ConceptExpr, NameKind, Ontology, Violation};

pub use classify::classify;
pub use io::{read_normalized, write_normalized, NormalizedFormatError};
pub use rewrite::normalize;

pub const TOP: &str = "Top";
pub const BOTTOM: &str = "Bottom";
pub const FRESH_PREFIX: &str = "NORM_";
pub const NOMINAL_PREFIX: &str = "IND_";

/// Concept name standing for the nominal `{individual}`.
pub fn nominal_concept(individual: &str) -> String {
    format!("{NOMINAL_PREFIX}{individual}")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NormalAxiom {
    /// `sub ⊑ sup`
    Nf1 { sub: String, sup: String },
    /// `sub ⊑ ∃relation.filler`
    Nf2 { sub: String, relation: String, filler: String },
    /// `∃relation.filler ⊑ sup`
    Nf3 { relation: String, filler: String, sup: String },
    /// `left ⊓ right ⊑ sup`
    Nf4 { left: String, right: String, sup: String },
    /// `left ⊓ right ⊑ ⊥`
    Disjoint { left: String, right: String },
    /// `sub ⊑ sup` over relations
    RoleSub { sub: String, sup: String },
}

impl NormalAxiom {
    pub fn nf1(a: &str, b: &str) -> Self {
        NormalAxiom::Nf1 { sub: a.into(), sup: b.into() }
    }

    pub fn nf2(a: &str, r: &str, b: &str) -> Self {
        NormalAxiom::Nf2 { sub: a.into(), relation: r.into(), filler: b.into() }
    }

    pub fn nf3(r: &str, a: &str, b: &str) -> Self {
        NormalAxiom::Nf3 { relation: r.into(), filler: a.into(), sup: b.into() }
    }

    pub fn nf4(a: &str, b: &str, c: &str) -> Self {
        NormalAxiom::Nf4 { left: a.into(), right: b.into(), sup: c.into() }
    }

    pub fn disjoint(a: &str, b: &str) -> Self {
        NormalAxiom::Disjoint { left: a.into(), right: b.into() }
    }

    pub fn role_sub(r: &str, s: &str) -> Self {
        NormalAxiom::RoleSub { sub: r.into(), sup: s.into() }
    }

    /// Concept operands in positional order.
    pub fn concepts(&self) -> Vec<&str> {
        match self {
            NormalAxiom::Nf1 { sub, sup } => vec![sub, sup],
            NormalAxiom::Nf2 { sub, filler, .. } => vec![sub, filler],
            NormalAxiom::Nf3 { filler, sup, .. } => vec![filler, sup],
            NormalAxiom::Nf4 { left, right, sup } => vec![left, right, sup],
            NormalAxiom::Disjoint { left, right } => vec![left, right],
            NormalAxiom::RoleSub { .. } => vec![],
        }
    }

    pub fn relations(&self) -> Vec<&str> {
        match self {
            NormalAxiom::Nf2 { relation, .. } | NormalAxiom::Nf3 { relation, .. } => {
                vec![relation]
            }
            NormalAxiom::RoleSub { sub, sup } => vec![sub, sup],
            _ => vec![],
        }
    }

    /// Back to an ordinary axiom over the same names.
    pub fn to_axiom(&self) -> Axiom {
        fn c(name: &str) -> ConceptExpr {
            match name {
                TOP => ConceptExpr::Top,
                BOTTOM => ConceptExpr::Bottom,
                n => ConceptExpr::atomic(n),
            }
        }
        match self {
            NormalAxiom::Nf1 { sub, sup } => Axiom::subclass(c(sub), c(sup)),
            NormalAxiom::Nf2 { sub, relation, filler } => {
                Axiom::subclass(c(sub), ConceptExpr::exists(relation.as_str(), c(filler)))
            }
            NormalAxiom::Nf3 { relation, filler, sup } => {
                Axiom::subclass(ConceptExpr::exists(relation.as_str(), c(filler)), c(sup))
            }
            NormalAxiom::Nf4 { left, right, sup } => {
                Axiom::subclass(ConceptExpr::and(c(left), c(right)), c(sup))
            }
            NormalAxiom::Disjoint { left, right } => {
                Axiom::subclass(ConceptExpr::and(c(left), c(right)), ConceptExpr::Bottom)
            }
            NormalAxiom::RoleSub { sub, sup } => {
                Axiom::SubRelationOf { sub: sub.clone(), sup: sup.clone() }
            }
        }
    }
}

impl fmt::Display for NormalAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalAxiom::Nf1 { sub, sup } => write!(f, "NF1 {sub} {sup}"),
            NormalAxiom::Nf2 { sub, relation, filler } => write!(f, "NF2 {sub} {relation} {filler}"),
            NormalAxiom::Nf3 { relation, filler, sup } => write!(f, "NF3 {relation} {filler} {sup}"),
            NormalAxiom::Nf4 { left, right, sup } => write!(f, "NF4 {left} {right} {sup}"),
            NormalAxiom::Disjoint { left, right } => write!(f, "DISJ {left} {right}"),
            NormalAxiom::RoleSub { sub, sup } => write!(f, "RSUB {sub} {sup}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NormalizedOntology {
    /// Normal axioms without duplicates, in generation order.
    pub axioms: Vec<NormalAxiom>,
    /// Concept names of the source signature, in declaration order.
    pub concepts: Vec<String>,
    pub relations: Vec<String>,
    /// `(individual, concept name)` for every declared individual.
    pub nominals: Vec<(String, String)>,
    pub fresh: Vec<String>,
    /// Fresh name → the complex expression it stands for.
    pub provenance: BTreeMap<String, ConceptExpr>,
    /// Annotation axioms of the source, unchanged.
    pub annotations: Vec<Axiom>,
}

impl NormalizedOntology {
    /// Every concept name an embedding needs: source concepts, nominal concepts,
    /// fresh names, then `Top` and `Bottom`.
    pub fn all_concepts(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.concepts.iter().map(String::as_str).collect();
        v.extend(self.nominals.iter().map(|(_, c)| c.as_str()));
        v.extend(self.fresh.iter().map(String::as_str));
        v.push(TOP);
        v.push(BOTTOM);
        v
    }

    /// Concepts eligible as corrupted fillers: everything except `Top` and `Bottom`.
    pub fn sampling_concepts(&self) -> Vec<&str> {
        let mut v = self.all_concepts();
        v.truncate(v.len() - 2);
        v
    }

    pub fn nominal_concept_of(&self, individual: &str) -> Option<&str> {
        self.nominals.iter().find(|(a, _)| a == individual).map(|(_, c)| c.as_str())
    }

    pub fn individual_of(&self, concept: &str) -> Option<&str> {
        self.nominals.iter().find(|(_, c)| c == concept).map(|(a, _)| a.as_str())
    }

    pub fn is_nominal(&self, concept: &str) -> bool {
        self.individual_of(concept).is_some()
    }

    /// Re-expresses the normal axioms as an ordinary ontology. Nominal concepts
    /// and fresh names become declared concepts.
    pub fn to_ontology(&self) -> Ontology {
        let mut o = Ontology::new();
        for c in self.all_concepts() {
            if c != TOP && c != BOTTOM {
                o.declare(NameKind::Concept, c);
            }
        }
        for r in &self.relations {
            o.declare(NameKind::Relation, r.as_str());
        }
        o.axioms.extend(self.axioms.iter().map(NormalAxiom::to_axiom));
        o.axioms.extend(self.annotations.iter().cloned());
        o
    }

    /// Checks the operand invariant: every concept operand is a known concept name
    /// and every relation operand a source relation.
    pub fn check(&self) -> Result<(), NormalizeError> {
        let concepts: std::collections::HashSet<&str> = self.all_concepts().into_iter().collect();
        for ax in &self.axioms {
            let bad_concept = ax.concepts().into_iter().find(|c| !concepts.contains(c));
            let bad_relation =
                ax.relations().into_iter().find(|r| !self.relations.iter().any(|x| x == r));
            if let Some(name) = bad_concept.or(bad_relation) {
                return Err(NormalizeError::Internal(format!(
                    "axiom `{ax}` refers to unknown name `{name}`"
                )));
            }
            if let NormalAxiom::Nf4 { sup, .. } = ax {
                if sup == BOTTOM {
                    return Err(NormalizeError::Internal(format!(
                        "`{ax}` should have been emitted as a disjointness axiom"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum NormalizeError {
    #[error("ontology is not valid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("axiom {index}: relation chains are not supported by the normalizer")]
    Unsupported { index: usize },
    #[error("nominal concept `{concept}` for individual `{individual}` collides with a declared name")]
    NameCollision { individual: String, concept: String },
    #[error("normalizer invariant violated: {0}")]
    Internal(String),
}
