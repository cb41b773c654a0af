//! EL++ data model, the line-oriented text syntax and structural validation.

mod model;
mod parser;
mod serialize;
mod validate;

pub use model::{
    is_identifier, is_reserved, AnnotationKind, Axiom, ConceptExpr, NameKind, Ontology, Signature,
    RESERVED_NAMES,
};
pub use parser::{parse_expression, parse_ontology, ParseError, ParseErrorKind};
pub use serialize::{axiom_to_string, expr_to_string, serialize_ontology};
pub use validate::{validate, Violation, ViolationKind};
