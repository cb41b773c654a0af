use std::collections::HashMap;
use std::fmt;

/// Keywords of the expression grammar. None of them may be used as a declared name.
pub const RESERVED_NAMES: [&str; 5] = ["Top", "Bottom", "And", "Some", "One"];

/// An EL++ concept expression.
///
/// Conjunction is binary; n-ary `And(...)` in the text syntax folds to the right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConceptExpr {
    Top,
    Bottom,
    Atomic(String),
    Conjunction(Box<ConceptExpr>, Box<ConceptExpr>),
    Existential { relation: String, filler: Box<ConceptExpr> },
    Nominal(String),
}

impl ConceptExpr {
    pub fn atomic(name: impl Into<String>) -> Self {
        ConceptExpr::Atomic(name.into())
    }

    pub fn and(left: ConceptExpr, right: ConceptExpr) -> Self {
        ConceptExpr::Conjunction(Box::new(left), Box::new(right))
    }

    /// Right-folds a non-empty list of conjuncts. Returns `None` for an empty list.
    pub fn and_all(mut parts: Vec<ConceptExpr>) -> Option<Self> {
        let mut acc = parts.pop()?;
        while let Some(next) = parts.pop() {
            acc = ConceptExpr::and(next, acc);
        }
        Some(acc)
    }

    pub fn exists(relation: impl Into<String>, filler: ConceptExpr) -> Self {
        ConceptExpr::Existential { relation: relation.into(), filler: Box::new(filler) }
    }

    pub fn nominal(individual: impl Into<String>) -> Self {
        ConceptExpr::Nominal(individual.into())
    }

    /// `true` for conjunctions and existential restrictions.
    pub fn is_complex(&self) -> bool {
        matches!(self, ConceptExpr::Conjunction(..) | ConceptExpr::Existential { .. })
    }

    /// Number of complex nodes in the expression tree.
    pub fn complex_count(&self) -> usize {
        match self {
            ConceptExpr::Conjunction(l, r) => 1 + l.complex_count() + r.complex_count(),
            ConceptExpr::Existential { filler, .. } => 1 + filler.complex_count(),
            _ => 0,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ConceptExpr::Conjunction(l, r) => 1 + l.depth().max(r.depth()),
            ConceptExpr::Existential { filler, .. } => 1 + filler.depth(),
            _ => 0,
        }
    }

    /// Calls `f` with every name in the expression and the kind it must have.
    pub fn visit_names<'a>(&'a self, f: &mut impl FnMut(&'a str, NameKind)) {
        match self {
            ConceptExpr::Top | ConceptExpr::Bottom => {}
            ConceptExpr::Atomic(n) => f(n, NameKind::Concept),
            ConceptExpr::Conjunction(l, r) => {
                l.visit_names(f);
                r.visit_names(f);
            }
            ConceptExpr::Existential { relation, filler } => {
                f(relation, NameKind::Relation);
                filler.visit_names(f);
            }
            ConceptExpr::Nominal(a) => f(a, NameKind::Individual),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NameKind {
    Concept,
    Relation,
    Individual,
}

impl fmt::Display for NameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NameKind::Concept => "concept",
            NameKind::Relation => "relation",
            NameKind::Individual => "individual",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AnnotationKind {
    Label,
    Comment,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Axiom {
    SubClassOf { sub: ConceptExpr, sup: ConceptExpr },
    EquivalentTo { left: ConceptExpr, right: ConceptExpr },
    SubRelationOf { sub: String, sup: String },
    RelationChain { chain: Vec<String>, sup: String },
    Instance { individual: String, concept: ConceptExpr },
    RelationInstance { relation: String, subject: String, object: String },
    Annotation { entity: String, kind: AnnotationKind, text: String },
}

impl Axiom {
    pub fn subclass(sub: ConceptExpr, sup: ConceptExpr) -> Self {
        Axiom::SubClassOf { sub, sup }
    }

    pub fn equivalent(left: ConceptExpr, right: ConceptExpr) -> Self {
        Axiom::EquivalentTo { left, right }
    }

    /// Calls `f` with every referenced name and the kind it must resolve to.
    /// Annotation subjects are reported with `None` since any declared entity qualifies.
    pub fn visit_names<'a>(&'a self, f: &mut impl FnMut(&'a str, Option<NameKind>)) {
        let mut typed = |n: &'a str, k: NameKind| f(n, Some(k));
        match self {
            Axiom::SubClassOf { sub, sup } => {
                sub.visit_names(&mut typed);
                sup.visit_names(&mut typed);
            }
            Axiom::EquivalentTo { left, right } => {
                left.visit_names(&mut typed);
                right.visit_names(&mut typed);
            }
            Axiom::SubRelationOf { sub, sup } => {
                typed(sub, NameKind::Relation);
                typed(sup, NameKind::Relation);
            }
            Axiom::RelationChain { chain, sup } => {
                for r in chain {
                    typed(r, NameKind::Relation);
                }
                typed(sup, NameKind::Relation);
            }
            Axiom::Instance { individual, concept } => {
                typed(individual, NameKind::Individual);
                concept.visit_names(&mut typed);
            }
            Axiom::RelationInstance { relation, subject, object } => {
                typed(relation, NameKind::Relation);
                typed(subject, NameKind::Individual);
                typed(object, NameKind::Individual);
            }
            Axiom::Annotation { entity, .. } => f(entity, None),
        }
    }
}

/// The three name sets of an ontology, each in declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: Vec<String>,
    pub relations: Vec<String>,
    pub individuals: Vec<String>,
}

impl Signature {
    pub fn names(&self, kind: NameKind) -> &[String] {
        match kind {
            NameKind::Concept => &self.concepts,
            NameKind::Relation => &self.relations,
            NameKind::Individual => &self.individuals,
        }
    }

    /// Name → kind lookup. When a name is declared under several kinds the first
    /// kind in concept/relation/individual order wins; `validate` reports the clash.
    pub fn index(&self) -> HashMap<&str, NameKind> {
        let mut map = HashMap::new();
        for kind in [NameKind::Concept, NameKind::Relation, NameKind::Individual] {
            for n in self.names(kind) {
                map.entry(n.as_str()).or_insert(kind);
            }
        }
        map
    }

    pub fn contains(&self, name: &str) -> bool {
        [NameKind::Concept, NameKind::Relation, NameKind::Individual]
            .iter()
            .any(|k| self.names(*k).iter().any(|n| n == name))
    }

    pub fn len(&self) -> usize {
        self.concepts.len() + self.relations.len() + self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ontology {
    pub signature: Signature,
    pub axioms: Vec<Axiom>,
}

impl Ontology {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, kind: NameKind, name: impl Into<String>) -> &mut Self {
        let name = name.into();
        match kind {
            NameKind::Concept => self.signature.concepts.push(name),
            NameKind::Relation => self.signature.relations.push(name),
            NameKind::Individual => self.signature.individuals.push(name),
        }
        self
    }

    pub fn concept(&mut self, name: impl Into<String>) -> &mut Self {
        self.declare(NameKind::Concept, name)
    }

    pub fn relation(&mut self, name: impl Into<String>) -> &mut Self {
        self.declare(NameKind::Relation, name)
    }

    pub fn individual(&mut self, name: impl Into<String>) -> &mut Self {
        self.declare(NameKind::Individual, name)
    }

    pub fn axiom(&mut self, axiom: Axiom) -> &mut Self {
        self.axioms.push(axiom);
        self
    }

    pub fn has_role_chains(&self) -> bool {
        self.axioms.iter().any(|a| matches!(a, Axiom::RelationChain { .. }))
    }

    /// First annotation of the given kind attached to `entity`.
    pub fn annotation<'a>(&'a self, entity: &'a str, kind: AnnotationKind) -> Option<&'a str> {
        self.annotations(entity, kind).next()
    }

    pub fn annotations<'a>(
        &'a self,
        entity: &'a str,
        kind: AnnotationKind,
    ) -> impl Iterator<Item = &'a str> + 'a {
        self.axioms.iter().filter_map(move |a| match a {
            Axiom::Annotation { entity: e, kind: k, text } if e == entity && *k == kind => {
                Some(text.as_str())
            }
            _ => None,
        })
    }
}

/// `true` when `name` matches `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn is_reserved(name: &str) -> bool {
    RESERVED_NAMES.contains(&name)
}
