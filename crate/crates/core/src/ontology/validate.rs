use std::collections::HashMap;
use std::fmt;

use super::model::{is_identifier, is_reserved, Axiom, NameKind, Ontology};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Index into `Ontology::axioms`; `None` for signature-level problems.
    pub axiom: Option<usize>,
    pub reason: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    /// A name is declared in more than one of the three signature sets.
    NotDisjoint { name: String, kinds: Vec<NameKind> },
    DuplicateDeclaration { name: String, kind: NameKind },
    InvalidName { name: String },
    Unresolved { name: String, expected: Option<NameKind> },
    WrongKind { name: String, expected: NameKind, found: NameKind },
    EmptyAnnotation,
    EmptyChain,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.axiom {
            Some(i) => write!(f, "axiom {i}: ")?,
            None => write!(f, "signature: ")?,
        }
        match &self.reason {
            ViolationKind::NotDisjoint { name, kinds } => {
                let kinds: Vec<String> = kinds.iter().map(|k| k.to_string()).collect();
                write!(f, "`{name}` declared as {}", kinds.join(" and "))
            }
            ViolationKind::DuplicateDeclaration { name, kind } => {
                write!(f, "{kind} `{name}` declared twice")
            }
            ViolationKind::InvalidName { name } => write!(f, "`{name}` is not a valid name"),
            ViolationKind::Unresolved { name, expected: Some(k) } => {
                write!(f, "{k} `{name}` is not declared")
            }
            ViolationKind::Unresolved { name, expected: None } => {
                write!(f, "`{name}` is not declared")
            }
            ViolationKind::WrongKind { name, expected, found } => {
                write!(f, "`{name}` is a {found}, expected a {expected}")
            }
            ViolationKind::EmptyAnnotation => write!(f, "annotation text is empty"),
            ViolationKind::EmptyChain => write!(f, "relation chain is empty"),
        }
    }
}

/// Checks every structural invariant of `o`. An empty result means the ontology is valid.
pub fn validate(o: &Ontology) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut declared: HashMap<&str, Vec<NameKind>> = HashMap::new();
    let mut order: Vec<&str> = Vec::new();
    for kind in [NameKind::Concept, NameKind::Relation, NameKind::Individual] {
        for name in o.signature.names(kind) {
            if !is_identifier(name) || is_reserved(name) {
                out.push(Violation {
                    axiom: None,
                    reason: ViolationKind::InvalidName { name: name.clone() },
                });
            }
            let kinds = declared.entry(name.as_str()).or_insert_with(|| {
                order.push(name.as_str());
                Vec::new()
            });
            if kinds.contains(&kind) {
                out.push(Violation {
                    axiom: None,
                    reason: ViolationKind::DuplicateDeclaration { name: name.clone(), kind },
                });
            } else {
                kinds.push(kind);
            }
        }
    }
    for name in order {
        let kinds = &declared[name];
        if kinds.len() > 1 {
            out.push(Violation {
                axiom: None,
                reason: ViolationKind::NotDisjoint { name: name.to_string(), kinds: kinds.clone() },
            });
        }
    }

    for (i, axiom) in o.axioms.iter().enumerate() {
        axiom.visit_names(&mut |name, expected| {
            let reason = match (declared.get(name), expected) {
                (None, _) => Some(ViolationKind::Unresolved { name: name.to_string(), expected }),
                (Some(kinds), Some(e)) if !kinds.contains(&e) => Some(ViolationKind::WrongKind {
                    name: name.to_string(),
                    expected: e,
                    found: kinds[0],
                }),
                _ => None,
            };
            if let Some(reason) = reason {
                out.push(Violation { axiom: Some(i), reason });
            }
        });
        match axiom {
            Axiom::Annotation { text, .. } if text.is_empty() => {
                out.push(Violation { axiom: Some(i), reason: ViolationKind::EmptyAnnotation })
            }
            Axiom::RelationChain { chain, .. } if chain.is_empty() => {
                out.push(Violation { axiom: Some(i), reason: ViolationKind::EmptyChain })
            }
            _ => {}
        }
    }
    out
}
