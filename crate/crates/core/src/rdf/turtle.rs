//! Turtle subset: `@prefix`/`PREFIX`, `a`, predicate and object lists,
//! string literals with language tags or datatypes, blank node labels.

use std::fmt::{self, Write as _};

use serde::Serialize;

use super::graph::{Graph, Triple};
use super::lexer::{tokenize, Tok, Token};
use super::term::{compact_iri, escape_string, Literal, Namespaces, Term, RDF_TYPE};
use super::RdfError;

/// Non-fatal findings while parsing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum ParseWarning {
    /// `@prefix p: <q:...>` where `q` is itself a prefix name; ignored.
    CircularPrefix { prefix: String, iri: String, line: usize },
    /// A prefix redeclared with a different namespace; the later one wins.
    RedefinedPrefix { prefix: String, line: usize },
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseWarning::CircularPrefix { prefix, iri, line } => {
                write!(
                    f,
                    "line {line}: prefix '{prefix}' maps to <{iri}>, which uses a prefix as its scheme; ignored"
                )
            }
            ParseWarning::RedefinedPrefix { prefix, line } => {
                write!(f, "line {line}: prefix '{prefix}' redefined")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParsedDocument {
    pub graph: Graph,
    pub warnings: Vec<ParseWarning>,
}

/// Parses a Turtle document into a graph whose namespace table is `base`
/// plus every accepted `@prefix` directive.
pub fn parse_turtle(text: &str, base: &Namespaces) -> Result<Graph, RdfError> {
    parse_turtle_document(text, base).map(|d| d.graph)
}

pub fn parse_turtle_document(text: &str, base: &Namespaces) -> Result<ParsedDocument, RdfError> {
    let tokens = tokenize(text).map_err(|e| RdfError::Syntax {
        line: e.line,
        column: e.col,
        message: e.message,
    })?;
    let mut p = Parser {
        tokens,
        pos: 0,
        eof: end_position(text),
        graph: Graph::new().with_namespaces(base.clone()),
        warnings: Vec::new(),
    };
    p.document()?;
    Ok(ParsedDocument {
        graph: p.graph,
        warnings: p.warnings,
    })
}

pub(crate) fn end_position(text: &str) -> (usize, usize) {
    let line = text.matches('\n').count() + 1;
    let col = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

/// `<b6:>` style namespace that names another prefix instead of an IRI.
pub(crate) fn is_circular_namespace(prefix: &str, iri: &str, ns: &Namespaces) -> bool {
    match iri.split_once(':') {
        Some((scheme, rest)) => !rest.starts_with("//") && (scheme == prefix || ns.contains_key(scheme)),
        None => false,
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    eof: (usize, usize),
    graph: Graph,
    warnings: Vec<ParseWarning>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn error_at(&self, tok: Option<&Token>, message: impl Into<String>) -> RdfError {
        let (line, column) = tok.map_or(self.eof, |t| (t.line, t.col));
        RdfError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), RdfError> {
        match self.next() {
            Some(Token { tok: Tok::Punct(p), .. }) if p == c => Ok(()),
            other => Err(self.error_at(
                other.as_ref(),
                format!("expected '{c}', found {}", describe(other.as_ref())),
            )),
        }
    }

    fn document(&mut self) -> Result<(), RdfError> {
        while let Some(tok) = self.peek().cloned() {
            match &tok.tok {
                Tok::At(d) if d == "prefix" => {
                    self.pos += 1;
                    self.prefix_decl(&tok)?;
                    self.expect_punct('.')?;
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("prefix") => {
                    self.pos += 1;
                    self.prefix_decl(&tok)?;
                }
                Tok::At(d) => return Err(self.error_at(Some(&tok), format!("unsupported directive @{d}"))),
                _ => {
                    self.triples()?;
                    self.expect_punct('.')?;
                }
            }
        }
        Ok(())
    }

    fn prefix_decl(&mut self, at: &Token) -> Result<(), RdfError> {
        let name = match self.next() {
            Some(Token {
                tok: Tok::PName { prefix, local },
                ..
            }) if local.is_empty() => prefix,
            other => {
                return Err(self.error_at(
                    other.as_ref(),
                    format!("expected prefix name, found {}", describe(other.as_ref())),
                ))
            }
        };
        let iri = match self.next() {
            Some(Token {
                tok: Tok::IriRef(iri), ..
            }) => iri,
            other => {
                return Err(self.error_at(
                    other.as_ref(),
                    format!("expected IRI, found {}", describe(other.as_ref())),
                ))
            }
        };
        let ns = &mut self.graph.namespaces;
        if is_circular_namespace(&name, &iri, ns) {
            self.warnings.push(ParseWarning::CircularPrefix {
                prefix: name,
                iri,
                line: at.line,
            });
            return Ok(());
        }
        if let Some(old) = ns.insert(name.clone(), iri.clone()) {
            if old != iri {
                self.warnings.push(ParseWarning::RedefinedPrefix {
                    prefix: name,
                    line: at.line,
                });
            }
        }
        Ok(())
    }

    fn triples(&mut self) -> Result<(), RdfError> {
        let tok = self.next();
        let subject = match tok.as_ref().map(|t| &t.tok) {
            Some(Tok::IriRef(_)) | Some(Tok::PName { .. }) | Some(Tok::Blank(_)) => self.term(tok.as_ref().unwrap())?,
            _ => {
                return Err(self.error_at(
                    tok.as_ref(),
                    format!("expected subject, found {}", describe(tok.as_ref())),
                ))
            }
        };
        loop {
            let predicate = self.verb()?;
            loop {
                let object = self.object()?;
                self.graph.insert(Triple {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                if matches!(self.peek().map(|t| &t.tok), Some(Tok::Punct(','))) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            if matches!(self.peek().map(|t| &t.tok), Some(Tok::Punct(';'))) {
                while matches!(self.peek().map(|t| &t.tok), Some(Tok::Punct(';'))) {
                    self.pos += 1;
                }
                if matches!(self.peek().map(|t| &t.tok), Some(Tok::Punct('.'))) {
                    return Ok(());
                }
            } else {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Result<Term, RdfError> {
        let tok = self.next();
        match tok.as_ref().map(|t| &t.tok) {
            Some(Tok::Word(w)) if w == "a" => Ok(Term::iri(RDF_TYPE)),
            Some(Tok::IriRef(_)) | Some(Tok::PName { .. }) => self.term(tok.as_ref().unwrap()),
            _ => Err(self.error_at(
                tok.as_ref(),
                format!("expected predicate, found {}", describe(tok.as_ref())),
            )),
        }
    }

    fn object(&mut self) -> Result<Term, RdfError> {
        let tok = self.next();
        match tok.as_ref().map(|t| &t.tok) {
            Some(Tok::IriRef(_)) | Some(Tok::PName { .. }) | Some(Tok::Blank(_)) => self.term(tok.as_ref().unwrap()),
            Some(Tok::Str(s)) => {
                let lexical = s.clone();
                self.literal_suffix(lexical)
            }
            _ => Err(self.error_at(
                tok.as_ref(),
                format!("expected object, found {}", describe(tok.as_ref())),
            )),
        }
    }

    fn literal_suffix(&mut self, lexical: String) -> Result<Term, RdfError> {
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::At(lang)) => {
                self.pos += 1;
                Ok(Term::Literal(Literal {
                    lexical,
                    datatype: None,
                    lang: Some(lang),
                }))
            }
            Some(Tok::DoubleCaret) => {
                self.pos += 1;
                let tok = self.next();
                match tok.as_ref().map(|t| &t.tok) {
                    Some(Tok::IriRef(_)) | Some(Tok::PName { .. }) => {
                        let dt = self.term(tok.as_ref().unwrap())?;
                        Ok(Term::Literal(Literal {
                            lexical,
                            datatype: dt.as_iri().map(str::to_string),
                            lang: None,
                        }))
                    }
                    _ => Err(self.error_at(tok.as_ref(), "expected datatype IRI")),
                }
            }
            _ => Ok(Term::literal(lexical)),
        }
    }

    fn term(&self, tok: &Token) -> Result<Term, RdfError> {
        match &tok.tok {
            Tok::IriRef(iri) => Ok(Term::iri(iri.clone())),
            Tok::Blank(l) => Ok(Term::blank(l.clone())),
            Tok::PName { prefix, local } => {
                let ns = self
                    .graph
                    .namespaces
                    .get(prefix)
                    .ok_or_else(|| RdfError::UndeclaredPrefix {
                        prefix: prefix.clone(),
                        line: tok.line,
                        column: tok.col,
                    })?;
                Ok(Term::iri(format!("{ns}{local}")))
            }
            _ => Err(self.error_at(Some(tok), "expected a term")),
        }
    }
}

pub(crate) fn describe(tok: Option<&Token>) -> String {
    match tok.map(|t| &t.tok) {
        None => "end of input".into(),
        Some(Tok::IriRef(i)) => format!("<{i}>"),
        Some(Tok::PName { prefix, local }) => format!("'{prefix}:{local}'"),
        Some(Tok::Blank(l)) => format!("'_:{l}'"),
        Some(Tok::Str(_)) => "string literal".into(),
        Some(Tok::At(w)) => format!("'@{w}'"),
        Some(Tok::DoubleCaret) => "'^^'".into(),
        Some(Tok::Var(v)) => format!("'?{v}'"),
        Some(Tok::Word(w)) => format!("'{w}'"),
        Some(Tok::Punct(c)) => format!("'{c}'"),
    }
}

fn render(term: &Term, ns: &Namespaces) -> String {
    match term {
        Term::Iri(iri) => compact_iri(iri, ns),
        Term::Blank(l) => format!("_:{l}"),
        Term::Literal(lit) => {
            let mut s = format!("\"{}\"", escape_string(&lit.lexical));
            if let Some(lang) = &lit.lang {
                let _ = write!(s, "@{lang}");
            } else if let Some(dt) = &lit.datatype {
                let _ = write!(s, "^^{}", compact_iri(dt, ns));
            }
            s
        }
    }
}

/// Deterministic Turtle output: prefix block, then one block per subject in
/// term order with `rdf:type` first.
pub fn serialize_turtle(graph: &Graph) -> String {
    let ns = &graph.namespaces;
    let mut out = String::new();
    for (prefix, iri) in ns {
        let _ = writeln!(out, "@prefix {prefix}: <{iri}> .");
    }
    let rdf_type = Term::rdf_type();
    let subjects: Vec<&Term> = graph.subject_terms().collect();
    for subject in subjects {
        let triples = graph.matching(Some(subject), None, None);
        let mut groups: Vec<(Term, Vec<Term>)> = Vec::new();
        for t in triples {
            match groups.last_mut() {
                Some((p, objs)) if *p == t.predicate => objs.push(t.object),
                _ => groups.push((t.predicate, vec![t.object])),
            }
        }
        groups.sort_by(|a, b| (a.0 != rdf_type, &a.0).cmp(&(b.0 != rdf_type, &b.0)));
        let _ = write!(out, "\n{}", render(subject, ns));
        for (i, (p, objs)) in groups.iter().enumerate() {
            if i > 0 {
                out.push_str(" ;\n   ");
            }
            let verb = if *p == rdf_type { "a".to_string() } else { render(p, ns) };
            let objs: Vec<String> = objs.iter().map(|o| render(o, ns)).collect();
            let _ = write!(out, " {verb} {}", objs.join(", "));
        }
        out.push_str(" .\n");
    }
    out
}
