use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use super::{nominal_concept, NormalAxiom, NormalizeError, NormalizedOntology, BOTTOM, FRESH_PREFIX, TOP};
use crate::ontology::{validate, Axiom, ConceptExpr, Ontology};

/// Rewrites `o` into normal axioms.
///
/// Each distinct complex subexpression gets at most one fresh name, reused for
/// both directions it is needed in, so `|fresh|` never exceeds the number of
/// complex subexpressions of the input.
pub fn normalize(o: &Ontology) -> Result<NormalizedOntology, NormalizeError> {
    let violations = validate(o);
    if !violations.is_empty() {
        return Err(NormalizeError::Invalid(violations));
    }
    if let Some(index) = o.axioms.iter().position(|a| matches!(a, Axiom::RelationChain { .. })) {
        return Err(NormalizeError::Unsupported { index });
    }

    let mut nominals = Vec::new();
    for a in &o.signature.individuals {
        let concept = nominal_concept(a);
        if o.signature.contains(&concept) {
            return Err(NormalizeError::NameCollision { individual: a.clone(), concept });
        }
        nominals.push((a.clone(), concept));
    }

    let mut rw = Rewriter {
        taken: o
            .signature
            .concepts
            .iter()
            .chain(&o.signature.relations)
            .chain(&o.signature.individuals)
            .cloned()
            .chain(nominals.iter().map(|(_, c)| c.clone()))
            .collect(),
        nominals: nominals.iter().cloned().collect(),
        counter: 0,
        fresh: Vec::new(),
        provenance: BTreeMap::new(),
        names: HashMap::new(),
        defined_below: HashSet::new(),
        defined_above: HashSet::new(),
        out: Vec::new(),
        seen: HashSet::new(),
    };
    let mut annotations = Vec::new();

    for axiom in &o.axioms {
        let mut queue = VecDeque::new();
        match axiom {
            Axiom::SubClassOf { sub, sup } => queue.push_back((sub.clone(), sup.clone())),
            Axiom::EquivalentTo { left, right } => {
                queue.push_back((left.clone(), right.clone()));
                queue.push_back((right.clone(), left.clone()));
            }
            Axiom::Instance { individual, concept } => {
                queue.push_back((ConceptExpr::nominal(individual.as_str()), concept.clone()))
            }
            Axiom::RelationInstance { relation, subject, object } => queue.push_back((
                ConceptExpr::nominal(subject.as_str()),
                ConceptExpr::exists(relation.as_str(), ConceptExpr::nominal(object.as_str())),
            )),
            Axiom::SubRelationOf { sub, sup } => rw.emit(NormalAxiom::role_sub(sub, sup)),
            Axiom::Annotation { .. } => annotations.push(axiom.clone()),
            Axiom::RelationChain { .. } => unreachable!("rejected above"),
        }
        while let Some((sub, sup)) = queue.pop_front() {
            rw.step(sub, sup, &mut queue);
        }
    }

    let n = NormalizedOntology {
        axioms: rw.out,
        concepts: o.signature.concepts.clone(),
        relations: o.signature.relations.clone(),
        nominals,
        fresh: rw.fresh,
        provenance: rw.provenance,
        annotations,
    };
    n.check()?;
    Ok(n)
}

struct Rewriter {
    taken: HashSet<String>,
    nominals: HashMap<String, String>,
    counter: usize,
    fresh: Vec<String>,
    provenance: BTreeMap<String, ConceptExpr>,
    names: HashMap<ConceptExpr, String>,
    /// Fresh names N for which `expr ⊑ N` has been queued.
    defined_below: HashSet<String>,
    /// Fresh names N for which `N ⊑ expr` has been queued.
    defined_above: HashSet<String>,
    out: Vec<NormalAxiom>,
    seen: HashSet<NormalAxiom>,
}

type Work = VecDeque<(ConceptExpr, ConceptExpr)>;

impl Rewriter {
    fn emit(&mut self, ax: NormalAxiom) {
        if self.seen.insert(ax.clone()) {
            self.out.push(ax);
        }
    }

    /// Name of a non-complex expression.
    fn basic(&self, e: &ConceptExpr) -> Option<String> {
        match e {
            ConceptExpr::Top => Some(TOP.to_string()),
            ConceptExpr::Bottom => Some(BOTTOM.to_string()),
            ConceptExpr::Atomic(n) => Some(n.clone()),
            ConceptExpr::Nominal(a) => Some(self.nominals[a].clone()),
            _ => None,
        }
    }

    fn name_for(&mut self, e: &ConceptExpr) -> String {
        if let Some(n) = self.names.get(e) {
            return n.clone();
        }
        let name = loop {
            self.counter += 1;
            let candidate = format!("{FRESH_PREFIX}{}", self.counter);
            if !self.taken.contains(&candidate) {
                break candidate;
            }
        };
        self.taken.insert(name.clone());
        self.fresh.push(name.clone());
        self.provenance.insert(name.clone(), e.clone());
        self.names.insert(e.clone(), name.clone());
        name
    }

    /// Fresh name N with `e ⊑ N` queued.
    fn name_below(&mut self, e: &ConceptExpr, queue: &mut Work) -> String {
        let n = self.name_for(e);
        if self.defined_below.insert(n.clone()) {
            queue.push_back((e.clone(), ConceptExpr::atomic(n.as_str())));
        }
        n
    }

    /// Fresh name N with `N ⊑ e` queued.
    fn name_above(&mut self, e: &ConceptExpr, queue: &mut Work) -> String {
        let n = self.name_for(e);
        if self.defined_above.insert(n.clone()) {
            queue.push_back((ConceptExpr::atomic(n.as_str()), e.clone()));
        }
        n
    }

    fn step(&mut self, sub: ConceptExpr, sup: ConceptExpr, queue: &mut Work) {
        if sup == ConceptExpr::Top || sub == ConceptExpr::Bottom {
            return;
        }
        if let ConceptExpr::Conjunction(l, r) = sup {
            queue.push_back((sub.clone(), *l));
            queue.push_back((sub, *r));
            return;
        }
        match (self.basic(&sub), self.basic(&sup)) {
            (Some(a), Some(b)) => self.emit(NormalAxiom::Nf1 { sub: a, sup: b }),
            (Some(a), None) => {
                let ConceptExpr::Existential { relation, filler } = &sup else {
                    unreachable!("conjunctions on the right are split above")
                };
                let b = match self.basic(filler) {
                    Some(b) => b,
                    None => self.name_above(filler, queue),
                };
                self.emit(NormalAxiom::Nf2 { sub: a, relation: relation.clone(), filler: b });
            }
            (None, Some(d)) => match &sub {
                ConceptExpr::Existential { relation, filler } => {
                    let a = match self.basic(filler) {
                        Some(a) => a,
                        None => self.name_below(filler, queue),
                    };
                    self.emit(NormalAxiom::Nf3 { relation: relation.clone(), filler: a, sup: d });
                }
                ConceptExpr::Conjunction(l, r) => match (self.basic(l), self.basic(r)) {
                    // ⊥ ⊓ X ⊑ ⊥ holds trivially
                    (Some(a), Some(b)) if d == BOTTOM && (a == BOTTOM || b == BOTTOM) => {}
                    (Some(a), Some(b)) if d == BOTTOM => {
                        self.emit(NormalAxiom::Disjoint { left: a, right: b })
                    }
                    (Some(a), Some(b)) => {
                        self.emit(NormalAxiom::Nf4 { left: a, right: b, sup: d })
                    }
                    (None, _) => {
                        let n = self.name_below(l, queue);
                        queue.push_back((ConceptExpr::and(ConceptExpr::atomic(n), (**r).clone()), sup));
                    }
                    (Some(_), None) => {
                        let n = self.name_below(r, queue);
                        queue.push_back((ConceptExpr::and((**l).clone(), ConceptExpr::atomic(n)), sup));
                    }
                },
                _ => unreachable!("basic expressions handled above"),
            },
            (None, None) => {
                let n = self.name_below(&sub, queue);
                queue.push_back((ConceptExpr::atomic(n), sup));
            }
        }
    }
}
