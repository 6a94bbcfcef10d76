use crate::rdf::lexer::{tokenize, Tok, Token};
use crate::rdf::{describe, end_position, Literal, Namespaces, Term, RDF_TYPE};

use super::ast::{PatternTerm, QueryAst, TriplePattern, Values};
use super::QueryError;

/// Keywords outside the supported subset; reported by name.
const UNSUPPORTED: [&str; 22] = [
    "OPTIONAL",
    "FILTER",
    "UNION",
    "MINUS",
    "BIND",
    "SERVICE",
    "GRAPH",
    "ORDER",
    "GROUP",
    "LIMIT",
    "OFFSET",
    "HAVING",
    "CONSTRUCT",
    "ASK",
    "DESCRIBE",
    "INSERT",
    "DELETE",
    "BASE",
    "NAMED",
    "REDUCED",
    "EXISTS",
    "LOAD",
];

/// Parses the supported SPARQL subset: PREFIX declarations, SELECT
/// [DISTINCT] with `FROM <iri>` after the projection, and a WHERE block of
/// triple patterns with an optional VALUES clause.
pub fn parse_query(text: &str) -> Result<QueryAst, QueryError> {
    let tokens = tokenize(text).map_err(|e| QueryError::Syntax {
        line: e.line,
        column: e.col,
        message: e.message,
    })?;
    let mut p = Parser {
        tokens,
        pos: 0,
        eof: end_position(text),
        ast: QueryAst::default(),
        star: false,
    };
    p.query()?;
    let mut ast = p.ast;
    if p.star {
        ast.projection = ast.variables();
    }
    let vars = ast.variables();
    for v in &ast.projection {
        if !vars.contains(v) {
            return Err(QueryError::UnboundProjection(v.clone()));
        }
    }
    Ok(ast)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    eof: (usize, usize),
    ast: QueryAst,
    star: bool,
}

fn keyword(tok: Option<&Token>) -> Option<String> {
    match tok.map(|t| &t.tok) {
        Some(Tok::Word(w)) => Some(w.to_ascii_uppercase()),
        _ => None,
    }
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

    fn syntax(&self, tok: Option<&Token>, expected: &str) -> QueryError {
        if let Some(kw) = keyword(tok) {
            if UNSUPPORTED.contains(&kw.as_str()) {
                return QueryError::UnsupportedFeature(kw);
            }
        }
        let (line, column) = tok.map_or(self.eof, |t| (t.line, t.col));
        QueryError::Syntax {
            line,
            column,
            message: format!("expected {expected}, found {}", describe(tok)),
        }
    }

    /// Fails with UnsupportedFeature when the next token is an excluded keyword.
    fn reject_unsupported(&self) -> Result<(), QueryError> {
        if let Some(kw) = keyword(self.peek()) {
            if UNSUPPORTED.contains(&kw.as_str()) {
                return Err(QueryError::UnsupportedFeature(kw));
            }
        }
        Ok(())
    }

    fn is_punct(&self, c: char) -> bool {
        matches!(self.peek().map(|t| &t.tok), Some(Tok::Punct(p)) if *p == c)
    }

    fn expect_punct(&mut self, c: char) -> Result<(), QueryError> {
        if self.is_punct(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(self.peek(), &format!("'{c}'")))
        }
    }

    fn query(&mut self) -> Result<(), QueryError> {
        while keyword(self.peek()).as_deref() == Some("PREFIX") {
            self.pos += 1;
            self.prefix_decl()?;
        }
        self.reject_unsupported()?;
        if keyword(self.peek()).as_deref() != Some("SELECT") {
            return Err(self.syntax(self.peek(), "SELECT"));
        }
        self.pos += 1;
        self.reject_unsupported()?;
        if keyword(self.peek()).as_deref() == Some("DISTINCT") {
            self.pos += 1;
            self.ast.distinct = true;
        }
        self.projection()?;
        if keyword(self.peek()).as_deref() == Some("FROM") {
            self.pos += 1;
            self.reject_unsupported()?;
            let tok = self.next();
            let iri = match tok.as_ref().map(|t| &t.tok) {
                Some(Tok::IriRef(_)) | Some(Tok::PName { .. }) => self.iri(tok.as_ref().unwrap())?,
                _ => return Err(self.syntax(tok.as_ref(), "graph IRI after FROM")),
            };
            self.ast.dataset = iri.as_iri().map(str::to_string);
            if keyword(self.peek()).as_deref() == Some("FROM") {
                return Err(QueryError::UnsupportedFeature("multiple FROM".into()));
            }
        }
        if keyword(self.peek()).as_deref() == Some("WHERE") {
            self.pos += 1;
        }
        self.expect_punct('{')?;
        self.group()?;
        self.expect_punct('}')?;
        if self.peek().is_some() {
            self.reject_unsupported()?;
            return Err(self.syntax(self.peek(), "end of query"));
        }
        Ok(())
    }

    fn prefix_decl(&mut self) -> Result<(), QueryError> {
        let tok = self.next();
        let name = match tok.as_ref().map(|t| &t.tok) {
            Some(Tok::PName { prefix, local }) if local.is_empty() => prefix.clone(),
            _ => return Err(self.syntax(tok.as_ref(), "prefix name")),
        };
        let tok = self.next();
        let iri = match tok.as_ref().map(|t| &t.tok) {
            Some(Tok::IriRef(iri)) => iri.clone(),
            _ => return Err(self.syntax(tok.as_ref(), "namespace IRI")),
        };
        self.ast.prefixes.insert(name, iri);
        Ok(())
    }

    fn projection(&mut self) -> Result<(), QueryError> {
        if self.is_punct('*') {
            self.pos += 1;
            // Filled in once the WHERE block is known.
            self.star = true;
            return Ok(());
        }
        while let Some(Tok::Var(v)) = self.peek().map(|t| &t.tok) {
            let v = v.clone();
            self.pos += 1;
            if !self.ast.projection.contains(&v) {
                self.ast.projection.push(v);
            }
        }
        if self.ast.projection.is_empty() {
            self.reject_unsupported()?;
            return Err(self.syntax(self.peek(), "a projected variable or '*'"));
        }
        Ok(())
    }

    fn group(&mut self) -> Result<(), QueryError> {
        loop {
            while self.is_punct('.') {
                self.pos += 1;
            }
            if self.is_punct('}') || self.peek().is_none() {
                break;
            }
            self.reject_unsupported()?;
            if keyword(self.peek()).as_deref() == Some("VALUES") {
                let at = self.next().expect("peeked");
                if self.ast.values.is_some() {
                    return Err(QueryError::Syntax {
                        line: at.line,
                        column: at.col,
                        message: "only one VALUES clause is supported".into(),
                    });
                }
                self.values()?;
                continue;
            }
            if self.is_punct('{') {
                return Err(QueryError::UnsupportedFeature("nested group".into()));
            }
            self.triples_block()?;
            if !self.is_punct('.') && !self.is_punct('}') {
                return Err(self.syntax(self.peek(), "'.' or '}'"));
            }
        }
        Ok(())
    }

    fn values(&mut self) -> Result<(), QueryError> {
        let tok = self.next();
        let var = match tok.as_ref().map(|t| &t.tok) {
            Some(Tok::Var(v)) => v.clone(),
            Some(Tok::Punct('(')) => return Err(QueryError::UnsupportedFeature("multi-variable VALUES".into())),
            _ => return Err(self.syntax(tok.as_ref(), "variable after VALUES")),
        };
        self.expect_punct('{')?;
        let mut terms = Vec::new();
        while !self.is_punct('}') {
            if keyword(self.peek()).as_deref() == Some("UNDEF") {
                return Err(QueryError::UnsupportedFeature("UNDEF".into()));
            }
            let tok = self.next();
            let term = match tok.as_ref().map(|t| &t.tok) {
                Some(Tok::IriRef(_)) | Some(Tok::PName { .. }) => self.iri(tok.as_ref().unwrap())?,
                Some(Tok::Str(s)) => {
                    let s = s.clone();
                    self.literal(s)?
                }
                _ => return Err(self.syntax(tok.as_ref(), "an IRI or literal in VALUES")),
            };
            terms.push(term);
        }
        self.expect_punct('}')?;
        self.ast.values = Some(Values { var, terms });
        Ok(())
    }

    fn triples_block(&mut self) -> Result<(), QueryError> {
        let subject = self.node("subject")?;
        loop {
            let predicate = self.verb()?;
            loop {
                let object = self.node("object")?;
                self.ast.patterns.push(TriplePattern {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                if self.is_punct(',') {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            if !self.is_punct(';') {
                return Ok(());
            }
            while self.is_punct(';') {
                self.pos += 1;
            }
            if self.is_punct('.') || self.is_punct('}') {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Result<PatternTerm, QueryError> {
        let tok = self.next();
        match tok.as_ref().map(|t| &t.tok) {
            Some(Tok::Word(w)) if w == "a" => Ok(PatternTerm::Term(Term::iri(RDF_TYPE))),
            Some(Tok::Var(v)) => Ok(PatternTerm::Var(v.clone())),
            Some(Tok::IriRef(_)) | Some(Tok::PName { .. }) => Ok(PatternTerm::Term(self.iri(tok.as_ref().unwrap())?)),
            _ => Err(self.syntax(tok.as_ref(), "predicate")),
        }
    }

    fn node(&mut self, role: &str) -> Result<PatternTerm, QueryError> {
        self.reject_unsupported()?;
        let tok = self.next();
        match tok.as_ref().map(|t| &t.tok) {
            Some(Tok::Var(v)) => Ok(PatternTerm::Var(v.clone())),
            Some(Tok::IriRef(_)) | Some(Tok::PName { .. }) => Ok(PatternTerm::Term(self.iri(tok.as_ref().unwrap())?)),
            Some(Tok::Str(s)) if role == "object" => {
                let s = s.clone();
                Ok(PatternTerm::Term(self.literal(s)?))
            }
            Some(Tok::Blank(_)) | Some(Tok::Punct('[')) => {
                Err(QueryError::UnsupportedFeature("blank node pattern".into()))
            }
            _ => Err(self.syntax(tok.as_ref(), role)),
        }
    }

    fn literal(&mut self, lexical: String) -> Result<Term, QueryError> {
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::At(lang)) => {
                self.pos += 1;
                Ok(Term::lang_literal(lexical, lang))
            }
            Some(Tok::DoubleCaret) => {
                self.pos += 1;
                let tok = self.next();
                match tok.as_ref().map(|t| &t.tok) {
                    Some(Tok::IriRef(_)) | Some(Tok::PName { .. }) => {
                        let dt = self.iri(tok.as_ref().unwrap())?;
                        Ok(Term::Literal(Literal {
                            lexical,
                            datatype: dt.as_iri().map(str::to_string),
                            lang: None,
                        }))
                    }
                    _ => Err(self.syntax(tok.as_ref(), "datatype IRI")),
                }
            }
            _ => Ok(Term::literal(lexical)),
        }
    }

    fn iri(&self, tok: &Token) -> Result<Term, QueryError> {
        match &tok.tok {
            Tok::IriRef(i) => Ok(Term::iri(i.clone())),
            Tok::PName { prefix, local } => {
                let ns: &Namespaces = &self.ast.prefixes;
                let base = ns.get(prefix).ok_or_else(|| QueryError::UnknownPrefix {
                    prefix: prefix.clone(),
                    line: tok.line,
                    column: tok.col,
                })?;
                Ok(Term::iri(format!("{base}{local}")))
            }
            _ => Err(self.syntax(Some(tok), "IRI")),
        }
    }
}
