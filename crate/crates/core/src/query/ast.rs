use std::collections::BTreeSet;
use std::fmt;

use crate::rdf::{Namespaces, Term};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternTerm {
    /// Variable name without the leading `?`.
    Var(String),
    Term(Term),
}

impl PatternTerm {
    pub fn var(name: &str) -> Self {
        PatternTerm::Var(name.to_string())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Term(_) => None,
        }
    }
}

impl From<Term> for PatternTerm {
    fn from(t: Term) -> Self {
        PatternTerm::Term(t)
    }
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Var(v) => write!(f, "?{v}"),
            PatternTerm::Term(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn new(
        subject: impl Into<PatternTerm>,
        predicate: impl Into<PatternTerm>,
        object: impl Into<PatternTerm>,
    ) -> Self {
        TriplePattern {
            subject: subject.into(),
            predicate: predicate.into(),
            object: object.into(),
        }
    }

    pub fn positions(&self) -> [&PatternTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// `VALUES ?var { term ... }`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Values {
    pub var: String,
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QueryAst {
    pub prefixes: Namespaces,
    pub distinct: bool,
    pub projection: Vec<String>,
    pub dataset: Option<String>,
    pub values: Option<Values>,
    pub patterns: Vec<TriplePattern>,
}

impl QueryAst {
    /// Variables in order of first appearance: the VALUES variable, then
    /// pattern positions.
    pub fn variables(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let values_var = self.values.iter().map(|v| v.var.as_str());
        let pattern_vars = self
            .patterns
            .iter()
            .flat_map(|p| p.positions())
            .filter_map(PatternTerm::as_var);
        for v in values_var.chain(pattern_vars) {
            if seen.insert(v) {
                out.push(v.to_string());
            }
        }
        out
    }
}
