//! Recursive-descent parser for the line-oriented ontology syntax.
//!
//! One statement per line; `#` outside a string starts a comment. Names must be
//! declared (`Concept`, `Relation`, `Individual`) before they are used.

use std::collections::HashMap;

use thiserror::Error;

use super::model::{is_reserved, AnnotationKind, Axiom, ConceptExpr, NameKind, Ontology};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected {expected}, found {found}")]
    Syntax { expected: String, found: String },
    #[error("undeclared name `{name}`")]
    Undeclared { name: String },
    #[error("`{name}` is declared as a {found}, expected a {expected}")]
    WrongKind { name: String, expected: NameKind, found: NameKind },
    #[error("duplicate declaration of {kind} `{name}`")]
    Duplicate { name: String, kind: NameKind },
    #[error("`{name}` is already declared as a {existing}; the signature sets must be disjoint")]
    Disjointness { name: String, existing: NameKind },
    #[error("`{name}` is a reserved word and cannot be declared")]
    Reserved { name: String },
    #[error("annotation text must not be empty")]
    EmptyAnnotation,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    LParen,
    RParen,
    Arrow,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(_) => "string".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::End => "end of line".into(),
        }
    }
}

struct Token {
    tok: Tok,
    column: usize,
}

fn syntax(line: usize, column: usize, expected: &str, found: String) -> ParseError {
    ParseError {
        line,
        column,
        kind: ParseErrorKind::Syntax { expected: expected.to_string(), found },
    }
}

fn tokenize(line_no: usize, line: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            '(' => {
                tokens.push(Token { tok: Tok::LParen, column });
                i += 1;
            }
            ')' => {
                tokens.push(Token { tok: Tok::RParen, column });
                i += 1;
            }
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    tokens.push(Token { tok: Tok::Arrow, column });
                    i += 2;
                } else {
                    return Err(syntax(line_no, column, "`->`", "`-`".into()));
                }
            }
            '"' => {
                let mut text = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => {
                            return Err(syntax(
                                line_no,
                                chars.len(),
                                "closing `\"`",
                                "end of line".into(),
                            ))
                        }
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') => {
                            let esc = match chars.get(i + 1) {
                                Some('"') => '"',
                                Some('\\') => '\\',
                                Some('n') => '\n',
                                Some('r') => '\r',
                                Some('t') => '\t',
                                other => {
                                    let found = other
                                        .map(|c| format!("`\\{c}`"))
                                        .unwrap_or_else(|| "end of line".into());
                                    return Err(syntax(
                                        line_no,
                                        (i + 2).min(chars.len()),
                                        "escape sequence",
                                        found,
                                    ));
                                }
                            };
                            text.push(esc);
                            i += 2;
                        }
                        Some(&c) => {
                            text.push(c);
                            i += 1;
                        }
                    }
                }
                tokens.push(Token { tok: Tok::Str(text), column });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                tokens.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), column });
            }
            other => {
                return Err(syntax(line_no, column, "a statement token", format!("`{other}`")));
            }
        }
    }
    tokens.push(Token { tok: Tok::End, column: chars.len().max(1) });
    Ok(tokens)
}

struct LineParser<'a> {
    line: usize,
    tokens: Vec<Token>,
    pos: usize,
    names: &'a HashMap<String, NameKind>,
}

impl LineParser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn column(&self) -> usize {
        self.tokens[self.pos].column
    }

    fn bump(&mut self) -> &Token {
        let t = &self.tokens[self.pos];
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, column: self.column(), kind }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        syntax(self.line, self.column(), expected, self.peek().describe())
    }

    fn expect(&mut self, want: Tok, expected: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn ident(&mut self) -> Result<(String, usize), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let col = self.column();
                self.bump();
                Ok((s, col))
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    /// Parses a name and checks it resolves to `kind`.
    fn name(&mut self, kind: NameKind) -> Result<String, ParseError> {
        let (name, column) = self.ident()?;
        self.resolve(&name, column, Some(kind))?;
        Ok(name)
    }

    fn resolve(&self, name: &str, column: usize, kind: Option<NameKind>) -> Result<(), ParseError> {
        let err = |kind| ParseError { line: self.line, column, kind };
        match (self.names.get(name), kind) {
            (None, _) => Err(err(ParseErrorKind::Undeclared { name: name.to_string() })),
            (Some(found), Some(expected)) if *found != expected => Err(err(
                ParseErrorKind::WrongKind { name: name.to_string(), expected, found: *found },
            )),
            _ => Ok(()),
        }
    }

    fn string(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Str(s) => {
                if s.is_empty() {
                    return Err(self.error(ParseErrorKind::EmptyAnnotation));
                }
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("a quoted string")),
        }
    }

    fn expr(&mut self) -> Result<ConceptExpr, ParseError> {
        let (word, column) = self.ident().map_err(|_| self.unexpected("a concept expression"))?;
        match word.as_str() {
            "Top" => Ok(ConceptExpr::Top),
            "Bottom" => Ok(ConceptExpr::Bottom),
            "And" => {
                self.expect(Tok::LParen, "`(`")?;
                let mut parts = vec![self.expr()?];
                while *self.peek() != Tok::RParen {
                    parts.push(self.expr()?);
                }
                if parts.len() < 2 {
                    return Err(self.unexpected("a second conjunct"));
                }
                self.bump();
                Ok(ConceptExpr::and_all(parts).expect("non-empty conjunct list"))
            }
            "Some" => {
                self.expect(Tok::LParen, "`(`")?;
                let relation = self.name(NameKind::Relation)?;
                let filler = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(ConceptExpr::exists(relation, filler))
            }
            "One" => {
                self.expect(Tok::LParen, "`(`")?;
                let individual = self.name(NameKind::Individual)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(ConceptExpr::Nominal(individual))
            }
            _ => {
                self.resolve(&word, column, Some(NameKind::Concept))?;
                Ok(ConceptExpr::Atomic(word))
            }
        }
    }
}

enum Statement {
    Declare(NameKind, String, usize),
    Axiom(Axiom),
}

fn statement(p: &mut LineParser<'_>) -> Result<Statement, ParseError> {
    let (keyword, column) = p.ident().map_err(|_| p.unexpected("a statement keyword"))?;
    p.expect(Tok::LParen, "`(`")?;
    let stmt = match keyword.as_str() {
        "Concept" | "Relation" | "Individual" => {
            let kind = match keyword.as_str() {
                "Concept" => NameKind::Concept,
                "Relation" => NameKind::Relation,
                _ => NameKind::Individual,
            };
            let (name, col) = p.ident()?;
            Statement::Declare(kind, name, col)
        }
        "SubClassOf" => {
            let sub = p.expr()?;
            let sup = p.expr()?;
            Statement::Axiom(Axiom::SubClassOf { sub, sup })
        }
        "EquivalentTo" => {
            let left = p.expr()?;
            let right = p.expr()?;
            Statement::Axiom(Axiom::EquivalentTo { left, right })
        }
        "SubRelationOf" => {
            let sub = p.name(NameKind::Relation)?;
            let sup = p.name(NameKind::Relation)?;
            Statement::Axiom(Axiom::SubRelationOf { sub, sup })
        }
        "RelationChain" => {
            let mut chain = vec![p.name(NameKind::Relation)?];
            while *p.peek() != Tok::Arrow {
                if !matches!(p.peek(), Tok::Ident(_)) {
                    return Err(p.unexpected("a relation name or `->`"));
                }
                chain.push(p.name(NameKind::Relation)?);
            }
            p.bump();
            let sup = p.name(NameKind::Relation)?;
            Statement::Axiom(Axiom::RelationChain { chain, sup })
        }
        "Instance" => {
            let individual = p.name(NameKind::Individual)?;
            let concept = p.expr()?;
            Statement::Axiom(Axiom::Instance { individual, concept })
        }
        "RelationInstance" => {
            let relation = p.name(NameKind::Relation)?;
            let subject = p.name(NameKind::Individual)?;
            let object = p.name(NameKind::Individual)?;
            Statement::Axiom(Axiom::RelationInstance { relation, subject, object })
        }
        "Label" | "Comment" => {
            let kind =
                if keyword == "Label" { AnnotationKind::Label } else { AnnotationKind::Comment };
            let (entity, col) = p.ident()?;
            p.resolve(&entity, col, None)?;
            let text = p.string()?;
            Statement::Axiom(Axiom::Annotation { entity, kind, text })
        }
        _ => {
            return Err(ParseError {
                line: p.line,
                column,
                kind: ParseErrorKind::Syntax {
                    expected: "a statement keyword".into(),
                    found: format!("`{keyword}`"),
                },
            })
        }
    };
    p.expect(Tok::RParen, "`)`")?;
    p.expect(Tok::End, "end of line")?;
    Ok(stmt)
}

/// Parses a single concept expression against an existing name table.
pub fn parse_expression(
    text: &str,
    names: &HashMap<String, NameKind>,
) -> Result<ConceptExpr, ParseError> {
    let tokens = tokenize(1, text)?;
    let mut p = LineParser { line: 1, tokens, pos: 0, names };
    let e = p.expr()?;
    p.expect(Tok::End, "end of expression")?;
    Ok(e)
}

/// Parses an ontology document.
pub fn parse_ontology(text: &str) -> Result<Ontology, ParseError> {
    let mut ontology = Ontology::new();
    let mut names: HashMap<String, NameKind> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens = tokenize(line, raw)?;
        if tokens.len() == 1 {
            continue;
        }
        let mut p = LineParser { line, tokens, pos: 0, names: &names };
        match statement(&mut p)? {
            Statement::Declare(kind, name, column) => {
                let err = |kind| ParseError { line, column, kind };
                if is_reserved(&name) {
                    return Err(err(ParseErrorKind::Reserved { name }));
                }
                match names.get(&name) {
                    Some(&existing) if existing == kind => {
                        return Err(err(ParseErrorKind::Duplicate { name, kind }))
                    }
                    Some(&existing) => {
                        return Err(err(ParseErrorKind::Disjointness { name, existing }))
                    }
                    None => {}
                }
                names.insert(name.clone(), kind);
                ontology.declare(kind, name);
            }
            Statement::Axiom(axiom) => {
                ontology.axiom(axiom);
            }
        }
    }
    Ok(ontology)
}
