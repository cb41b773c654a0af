//! Text form of a normalized ontology: one `NF1 A B`-style axiom per line,
//! followed by `#`-prefixed trailer lines carrying the name bookkeeping.

use std::collections::HashMap;
use std::fmt::Write;

use thiserror::Error;

use super::{NormalAxiom, NormalizedOntology, BOTTOM, TOP};
use crate::ontology::{expr_to_string, is_identifier, parse_expression, NameKind};

#[derive(Debug, Error)]
#[error("normalized axiom file, line {line}: {message}")]
pub struct NormalizedFormatError {
    pub line: usize,
    pub message: String,
}

pub fn write_normalized(n: &NormalizedOntology) -> String {
    let mut out = String::new();
    for ax in &n.axioms {
        let _ = writeln!(out, "{ax}");
    }
    let _ = writeln!(out, "# concepts: {}", n.concepts.join(" "));
    let _ = writeln!(out, "# relations: {}", n.relations.join(" "));
    let nominals: Vec<String> = n.nominals.iter().map(|(a, c)| format!("{a}:{c}")).collect();
    let _ = writeln!(out, "# nominals: {}", nominals.join(" "));
    for name in &n.fresh {
        if let Some(e) = n.provenance.get(name) {
            let _ = writeln!(out, "# provenance: {name} {}", expr_to_string(e));
        }
    }
    let _ = writeln!(out, "# fresh: {}", n.fresh.join(" "));
    out
}

/// Reads the format produced by [`write_normalized`]. Trailer lines are optional;
/// without them concept and relation names are collected from the axioms.
/// Annotations are not part of the format.
pub fn read_normalized(text: &str) -> Result<NormalizedOntology, NormalizedFormatError> {
    let mut n = NormalizedOntology::default();
    let mut concepts: Option<Vec<String>> = None;
    let mut relations: Option<Vec<String>> = None;
    let mut provenance_lines = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| NormalizedFormatError { line, message };
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let comment = comment.trim();
            let (key, rest) = comment.split_once(':').unwrap_or((comment, ""));
            let names = || -> Result<Vec<String>, NormalizedFormatError> {
                rest.split_whitespace()
                    .map(|s| {
                        if is_identifier(s) {
                            Ok(s.to_string())
                        } else {
                            Err(err(format!("`{s}` is not a valid name")))
                        }
                    })
                    .collect()
            };
            match key.trim() {
                "concepts" => concepts = Some(names()?),
                "relations" => relations = Some(names()?),
                "fresh" => n.fresh = names()?,
                "nominals" => {
                    for pair in rest.split_whitespace() {
                        let (a, c) = pair
                            .split_once(':')
                            .ok_or_else(|| err(format!("expected individual:concept, got `{pair}`")))?;
                        n.nominals.push((a.to_string(), c.to_string()));
                    }
                }
                "provenance" => provenance_lines.push((line, rest.trim().to_string())),
                _ => {}
            }
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if let Some(bad) = fields[1..].iter().find(|f| !is_identifier(f)) {
            return Err(err(format!("`{bad}` is not a valid name")));
        }
        let arity = |k: usize| {
            if fields.len() == k + 1 {
                Ok(())
            } else {
                Err(err(format!("`{}` takes {k} operands, found {}", fields[0], fields.len() - 1)))
            }
        };
        let ax = match fields[0] {
            "NF1" => arity(2).map(|_| NormalAxiom::nf1(fields[1], fields[2]))?,
            "NF2" => arity(3).map(|_| NormalAxiom::nf2(fields[1], fields[2], fields[3]))?,
            "NF3" => arity(3).map(|_| NormalAxiom::nf3(fields[1], fields[2], fields[3]))?,
            "NF4" => arity(3).map(|_| NormalAxiom::nf4(fields[1], fields[2], fields[3]))?,
            "DISJ" => arity(2).map(|_| NormalAxiom::disjoint(fields[1], fields[2]))?,
            "RSUB" => arity(2).map(|_| NormalAxiom::role_sub(fields[1], fields[2]))?,
            other => return Err(err(format!("unknown axiom form `{other}`"))),
        };
        if !n.axioms.contains(&ax) {
            n.axioms.push(ax);
        }
    }

    let special = |c: &str| {
        c == TOP
            || c == BOTTOM
            || n.fresh.iter().any(|f| f == c)
            || n.nominals.iter().any(|(_, nc)| nc == c)
    };
    n.concepts = concepts.unwrap_or_else(|| {
        let mut v: Vec<String> = Vec::new();
        for ax in &n.axioms {
            for c in ax.concepts() {
                if !special(c) && !v.iter().any(|x| x == c) {
                    v.push(c.to_string());
                }
            }
        }
        v
    });
    n.relations = relations.unwrap_or_else(|| {
        let mut v: Vec<String> = Vec::new();
        for ax in &n.axioms {
            for r in ax.relations() {
                if !v.iter().any(|x| x == r) {
                    v.push(r.to_string());
                }
            }
        }
        v
    });

    let mut table: HashMap<String, NameKind> = HashMap::new();
    for c in n.all_concepts() {
        table.insert(c.to_string(), NameKind::Concept);
    }
    for r in &n.relations {
        table.insert(r.clone(), NameKind::Relation);
    }
    for (a, _) in &n.nominals {
        table.insert(a.clone(), NameKind::Individual);
    }
    for (line, rest) in provenance_lines {
        let (name, expr) = rest
            .split_once(char::is_whitespace)
            .ok_or_else(|| NormalizedFormatError { line, message: "empty provenance".into() })?;
        let e = parse_expression(expr.trim(), &table)
            .map_err(|e| NormalizedFormatError { line, message: e.kind.to_string() })?;
        n.provenance.insert(name.to_string(), e);
    }

    n.check().map_err(|e| NormalizedFormatError { line: 0, message: e.to_string() })?;
    Ok(n)
}
