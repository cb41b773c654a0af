use std::fmt::Write;

use super::model::{AnnotationKind, Axiom, ConceptExpr, Ontology};

/// Canonical text form: declarations (concepts, relations, individuals) first,
/// then axioms in their stored order, one statement per line.
pub fn serialize_ontology(o: &Ontology) -> String {
    let mut out = String::new();
    for (keyword, names) in [
        ("Concept", &o.signature.concepts),
        ("Relation", &o.signature.relations),
        ("Individual", &o.signature.individuals),
    ] {
        for n in names {
            let _ = writeln!(out, "{keyword}({n})");
        }
    }
    for axiom in &o.axioms {
        out.push_str(&axiom_to_string(axiom));
        out.push('\n');
    }
    out
}

pub fn axiom_to_string(axiom: &Axiom) -> String {
    match axiom {
        Axiom::SubClassOf { sub, sup } => {
            format!("SubClassOf({} {})", expr_to_string(sub), expr_to_string(sup))
        }
        Axiom::EquivalentTo { left, right } => {
            format!("EquivalentTo({} {})", expr_to_string(left), expr_to_string(right))
        }
        Axiom::SubRelationOf { sub, sup } => format!("SubRelationOf({sub} {sup})"),
        Axiom::RelationChain { chain, sup } => {
            format!("RelationChain({} -> {sup})", chain.join(" "))
        }
        Axiom::Instance { individual, concept } => {
            format!("Instance({individual} {})", expr_to_string(concept))
        }
        Axiom::RelationInstance { relation, subject, object } => {
            format!("RelationInstance({relation} {subject} {object})")
        }
        Axiom::Annotation { entity, kind, text } => {
            let keyword = match kind {
                AnnotationKind::Label => "Label",
                AnnotationKind::Comment => "Comment",
            };
            format!("{keyword}({entity} \"{}\")", escape(text))
        }
    }
}

pub fn expr_to_string(e: &ConceptExpr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

fn write_expr(out: &mut String, e: &ConceptExpr) {
    match e {
        ConceptExpr::Top => out.push_str("Top"),
        ConceptExpr::Bottom => out.push_str("Bottom"),
        ConceptExpr::Atomic(n) => out.push_str(n),
        ConceptExpr::Conjunction(..) => {
            // the right spine prints flat; it re-folds to the same tree
            out.push_str("And(");
            let mut cur = e;
            let mut first = true;
            while let ConceptExpr::Conjunction(l, r) = cur {
                if !first {
                    out.push(' ');
                }
                write_expr(out, l);
                first = false;
                cur = r;
            }
            out.push(' ');
            write_expr(out, cur);
            out.push(')');
        }
        ConceptExpr::Existential { relation, filler } => {
            out.push_str("Some(");
            out.push_str(relation);
            out.push(' ');
            write_expr(out, filler);
            out.push(')');
        }
        ConceptExpr::Nominal(a) => {
            out.push_str("One(");
            out.push_str(a);
            out.push(')');
        }
    }
}

fn escape(text: &str) -> String {
    let mut s = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '"' => s.push_str("\\\""),
            '\\' => s.push_str("\\\\"),
            '\n' => s.push_str("\\n"),
            '\r' => s.push_str("\\r"),
            '\t' => s.push_str("\\t"),
            c => s.push(c),
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::parse_ontology;

    #[test]
    fn empty_ontology_is_empty_text() {
        assert_eq!(serialize_ontology(&Ontology::new()), "");
    }

    #[test]
    fn canonical_form() {
        let mut o = Ontology::new();
        o.concept("A")
            .concept("B")
            .axiom(Axiom::subclass(ConceptExpr::atomic("A"), ConceptExpr::atomic("B")));
        assert_eq!(serialize_ontology(&o), "Concept(A)\nConcept(B)\nSubClassOf(A B)\n");
    }

    #[test]
    fn declarations_hoisted_before_axioms() {
        let o = parse_ontology("Concept(A)\nSubClassOf(A A)\nRelation(r)\nComment(r \"x\\\"y\")")
            .unwrap();
        let text = serialize_ontology(&o);
        assert_eq!(text, "Concept(A)\nRelation(r)\nSubClassOf(A A)\nComment(r \"x\\\"y\")\n");
        assert_eq!(parse_ontology(&text).unwrap(), o);
    }

    #[test]
    fn left_nested_conjunction_keeps_shape() {
        let e = ConceptExpr::and(
            ConceptExpr::and(ConceptExpr::atomic("A"), ConceptExpr::atomic("B")),
            ConceptExpr::and(ConceptExpr::atomic("C"), ConceptExpr::Top),
        );
        assert_eq!(expr_to_string(&e), "And(And(A B) C Top)");
    }
}
