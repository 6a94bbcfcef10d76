//! RDF terms, indexed graphs and the Turtle subset used for model exchange.

mod graph;
pub(crate) mod lexer;
mod term;
mod turtle;

pub use graph::{Graph, Triple};
pub use term::{
    compact_iri, default_namespaces, expand_term, Literal, Namespaces, Term, BRICK, OWL, RDF, RDFS, RDF_TYPE, SKOS,
    TAG, XSD,
};
pub use turtle::{parse_turtle, parse_turtle_document, serialize_turtle, ParseWarning, ParsedDocument};

pub(crate) use turtle::{describe, end_position};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RdfError {
    #[error("unknown prefix '{0}'")]
    UnknownPrefix(String),
    #[error("{line}:{column}: undeclared prefix '{prefix}'")]
    UndeclaredPrefix { prefix: String, line: usize, column: usize },
    #[error("malformed name '{0}'")]
    MalformedName(String),
    #[error("invalid triple: {0}")]
    InvalidTriple(String),
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
}

impl RdfError {
    /// Line and column for document-level errors.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            RdfError::Syntax { line, column, .. } | RdfError::UndeclaredPrefix { line, column, .. } => {
                Some((*line, *column))
            }
            _ => None,
        }
    }
}
