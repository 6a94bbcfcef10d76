use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::RdfError;

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";
pub const SKOS: &str = "http://www.w3.org/2004/02/skos/core#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const BRICK: &str = "https://brickschema.org/schema/Brick#";
pub const TAG: &str = "https://brickschema.org/schema/BrickTag#";

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

/// Prefix name to namespace IRI.
pub type Namespaces = BTreeMap<String, String>;

/// The namespace table every document starts from.
pub fn default_namespaces() -> Namespaces {
    [
        ("rdf", RDF),
        ("rdfs", RDFS),
        ("owl", OWL),
        ("skos", SKOS),
        ("xsd", XSD),
        ("brick", BRICK),
        ("tag", TAG),
    ]
    .into_iter()
    .map(|(p, iri)| (p.to_string(), iri.to_string()))
    .collect()
}

/// An RDF term. The derived ordering (IRIs, then blank nodes, then literals)
/// is what the serializer and result ordering rely on.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Term {
    Iri(String),
    Blank(String),
    Literal(Literal),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub lexical: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub datatype: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
}

impl Term {
    pub fn iri(s: impl Into<String>) -> Self {
        Term::Iri(s.into())
    }

    pub fn blank(label: impl Into<String>) -> Self {
        Term::Blank(label.into())
    }

    pub fn literal(lexical: impl Into<String>) -> Self {
        Term::Literal(Literal {
            lexical: lexical.into(),
            datatype: None,
            lang: None,
        })
    }

    pub fn lang_literal(lexical: impl Into<String>, lang: impl Into<String>) -> Self {
        Term::Literal(Literal {
            lexical: lexical.into(),
            datatype: None,
            lang: Some(lang.into()),
        })
    }

    pub fn typed_literal(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        Term::Literal(Literal {
            lexical: lexical.into(),
            datatype: Some(datatype.into()),
            lang: None,
        })
    }

    /// `brick:<local>`
    pub fn brick(local: &str) -> Self {
        Term::Iri(format!("{BRICK}{local}"))
    }

    /// `tag:<local>`
    pub fn tag(local: &str) -> Self {
        Term::Iri(format!("{TAG}{local}"))
    }

    pub fn rdf_type() -> Self {
        Term::Iri(RDF_TYPE.to_string())
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    /// Plain string form used for result ordering: the IRI itself, `_:label`,
    /// or the quoted literal.
    pub fn sort_key(&self) -> String {
        match self {
            Term::Iri(s) => s.clone(),
            other => other.to_string(),
        }
    }
}

/// N-Triples style rendering.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(s) => write!(f, "<{s}>"),
            Term::Blank(l) => write!(f, "_:{l}"),
            Term::Literal(lit) => {
                write!(f, "\"{}\"", escape_string(&lit.lexical))?;
                if let Some(lang) = &lit.lang {
                    write!(f, "@{lang}")
                } else if let Some(dt) = &lit.datatype {
                    write!(f, "^^<{dt}>")
                } else {
                    Ok(())
                }
            }
        }
    }
}

pub(crate) fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

/// Expands `prefix:local` or `<iri>` into an IRI term.
pub fn expand_term(prefixed: &str, namespaces: &Namespaces) -> Result<Term, RdfError> {
    let s = prefixed.trim();
    if let Some(inner) = s.strip_prefix('<') {
        let iri = inner
            .strip_suffix('>')
            .ok_or_else(|| RdfError::MalformedName(s.to_string()))?;
        return Ok(Term::Iri(iri.to_string()));
    }
    let (prefix, local) = s
        .split_once(':')
        .ok_or_else(|| RdfError::MalformedName(s.to_string()))?;
    let ns = namespaces
        .get(prefix)
        .ok_or_else(|| RdfError::UnknownPrefix(prefix.to_string()))?;
    if ns.is_empty() && local.is_empty() {
        return Err(RdfError::MalformedName(s.to_string()));
    }
    let iri = format!("{ns}{local}");
    if !iri.contains(':') {
        return Err(RdfError::MalformedName(s.to_string()));
    }
    Ok(Term::Iri(iri))
}

/// Renders an IRI with the longest matching prefix whose remainder is a valid
/// local name, falling back to `<iri>`.
pub fn compact_iri(iri: &str, namespaces: &Namespaces) -> String {
    let mut best: Option<(&str, &str)> = None;
    for (prefix, ns) in namespaces {
        if ns.is_empty() {
            continue;
        }
        if let Some(local) = iri.strip_prefix(ns.as_str()) {
            if is_valid_local(local) && best.is_none_or(|(_, b)| ns.len() > b.len()) {
                best = Some((prefix, ns));
            }
        }
    }
    match best {
        Some((prefix, ns)) => format!("{prefix}:{}", &iri[ns.len()..]),
        None => format!("<{iri}>"),
    }
}

pub(crate) fn is_pn_chars(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

/// Local names accepted by the Turtle subset: alphanumerics, `_`, `-` and
/// interior `.`.
pub(crate) fn is_valid_local(local: &str) -> bool {
    if local.is_empty() {
        return true;
    }
    if local.starts_with('.') || local.starts_with('-') || local.ends_with('.') {
        return false;
    }
    local.chars().all(|c| is_pn_chars(c) || c == '.')
}
