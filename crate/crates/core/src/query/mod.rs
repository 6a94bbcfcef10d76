//! SPARQL subset: basic graph patterns with VALUES, evaluated by nested-loop
//! join over an (already materialized) graph.

mod ast;
mod eval;
mod json;
mod parser;

pub use ast::{PatternTerm, QueryAst, TriplePattern, Values};
pub use eval::{evaluate, Dataset, GraphResolver, ResultTable};
pub use json::results_to_json;
pub use parser::parse_query;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: unknown prefix '{prefix}'")]
    UnknownPrefix { prefix: String, line: usize, column: usize },
    #[error("projected variable ?{0} does not appear in the query body")]
    UnboundProjection(String),
    #[error("unsupported feature: {0}")]
    UnsupportedFeature(String),
    #[error("unknown graph <{0}>")]
    UnknownGraph(String),
}

/// Parse and evaluate in one step.
pub fn run_query<R: GraphResolver + ?Sized>(text: &str, store: &R) -> Result<ResultTable, QueryError> {
    evaluate(&parse_query(text)?, store)
}
