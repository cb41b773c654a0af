use std::collections::BTreeMap;

use super::graph::SUBCLASS_OF;
use crate::ontology::{AnnotationKind, Axiom, Ontology};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WalkCorpus {
    pub sentences: Vec<Vec<String>>,
    /// Token → number of occurrences across all sentences.
    pub vocabulary: BTreeMap<String, usize>,
}

impl WalkCorpus {
    pub fn from_sentences(sentences: Vec<Vec<String>>) -> Self {
        let mut vocabulary = BTreeMap::new();
        for t in sentences.iter().flatten() {
            *vocabulary.entry(t.clone()).or_insert(0) += 1;
        }
        WalkCorpus { sentences, vocabulary }
    }

    pub fn token_count(&self) -> usize {
        self.vocabulary.values().sum()
    }

    /// One sentence per line, tokens separated by single spaces.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.sentences {
            out.push_str(&s.join(" "));
            out.push('\n');
        }
        out
    }

    /// Inverse of [`WalkCorpus::to_text`]; blank lines are skipped.
    pub fn from_text(text: &str) -> Self {
        Self::from_sentences(
            text.lines()
                .map(|l| l.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>())
                .filter(|s| !s.is_empty())
                .collect(),
        )
    }
}

/// Splits an identifier on underscores and camel-case boundaries, lowercased.
/// `hasTexture` → `has texture`, `HTTPServer2x` → `http server2x`.
pub fn split_identifier(name: &str) -> Vec<String> {
    let mut out = Vec::new();
    for part in name.split('_').filter(|p| !p.is_empty()) {
        let chars: Vec<char> = part.chars().collect();
        let mut start = 0;
        for i in 1..chars.len() {
            let (prev, cur) = (chars[i - 1], chars[i]);
            let next_lower = chars.get(i + 1).is_some_and(|c| c.is_lowercase());
            let boundary = cur.is_uppercase()
                && (prev.is_lowercase()
                    || prev.is_ascii_digit()
                    || (prev.is_uppercase() && next_lower));
            if boundary {
                out.push(chars[start..i].iter().collect::<String>().to_lowercase());
                start = i;
            }
        }
        out.push(chars[start..].iter().collect::<String>().to_lowercase());
    }
    out
}

/// Lowercased alphanumeric runs of free text.
pub fn tokenize_text(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Tokens standing for `name`: its label if it has one, else the split
/// identifier. Names outside the signature (fresh names from normalization)
/// have no tokens; the `subClassOf` predicate is split like an identifier.
pub fn name_tokens(name: &str, o: &Ontology) -> Vec<String> {
    if let Some(label) = o.annotation(name, AnnotationKind::Label) {
        return tokenize_text(label);
    }
    if name == SUBCLASS_OF || o.signature.contains(name) {
        split_identifier(name)
    } else {
        Vec::new()
    }
}

/// One sentence per walk (empty ones dropped), followed by one sentence per
/// `Comment` annotation.
pub fn lexicalize(walks: &[Vec<String>], o: &Ontology) -> WalkCorpus {
    let mut cache: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    let mut sentences = Vec::with_capacity(walks.len());
    for walk in walks {
        let mut sentence = Vec::new();
        for name in walk {
            sentence.extend_from_slice(cache.entry(name).or_insert_with(|| name_tokens(name, o)));
        }
        if !sentence.is_empty() {
            sentences.push(sentence);
        }
    }
    for ax in &o.axioms {
        if let Axiom::Annotation { kind: AnnotationKind::Comment, text, .. } = ax {
            let s = tokenize_text(text);
            if !s.is_empty() {
                sentences.push(s);
            }
        }
    }
    WalkCorpus::from_sentences(sentences)
}
