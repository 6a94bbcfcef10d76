use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::rdf::{Graph, Term};

use super::ast::{PatternTerm, QueryAst, TriplePattern};
use super::QueryError;

/// Looks up the graph a query runs against; `None` asks for the default graph.
pub trait GraphResolver {
    fn resolve(&self, iri: Option<&str>) -> Option<&Graph>;
}

/// A single graph answers for the default graph and for its own name.
impl GraphResolver for Graph {
    fn resolve(&self, iri: Option<&str>) -> Option<&Graph> {
        match iri {
            None => Some(self),
            Some(i) if self.name.as_deref() == Some(i) => Some(self),
            Some(_) => None,
        }
    }
}

/// Named graphs plus a default graph.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub default: Graph,
    pub named: BTreeMap<String, Graph>,
}

impl Dataset {
    pub fn insert(&mut self, graph: Graph) {
        let name = graph.name.clone().unwrap_or_default();
        self.named.insert(name, graph);
    }
}

impl GraphResolver for Dataset {
    fn resolve(&self, iri: Option<&str>) -> Option<&Graph> {
        match iri {
            None => Some(&self.default),
            Some(i) => self.named.get(i),
        }
    }
}

impl<R: GraphResolver + ?Sized> GraphResolver for &R {
    fn resolve(&self, iri: Option<&str>) -> Option<&Graph> {
        (**self).resolve(iri)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResultTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Term>>,
}

impl ResultTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Values of one column.
    pub fn column(&self, var: &str) -> Option<Vec<&Term>> {
        let i = self.header.iter().position(|h| h == var)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }
}

type Binding = Vec<Option<Term>>;

fn resolve<'a>(pt: &'a PatternTerm, b: &'a Binding, slots: &HashMap<&str, usize>) -> Option<&'a Term> {
    match pt {
        PatternTerm::Term(t) => Some(t),
        PatternTerm::Var(v) => b[slots[v.as_str()]].as_ref(),
    }
}

/// Extends `b` so that the pattern maps onto `(s, p, o)`, or returns `None`
/// when a variable repeated within the pattern would need two values.
fn unify(pattern: &TriplePattern, values: [&Term; 3], b: &Binding, slots: &HashMap<&str, usize>) -> Option<Binding> {
    let mut out = b.clone();
    for (pt, val) in pattern.positions().into_iter().zip(values) {
        if let PatternTerm::Var(v) = pt {
            let slot = &mut out[slots[v.as_str()]];
            match slot {
                Some(existing) if existing != val => return None,
                Some(_) => {}
                None => *slot = Some(val.clone()),
            }
        }
    }
    Some(out)
}

/// Nested-loop evaluation: VALUES rows (or one empty row) joined with each
/// pattern in turn, then projection, DISTINCT and lexicographic row order.
pub fn evaluate<R: GraphResolver + ?Sized>(ast: &QueryAst, store: &R) -> Result<ResultTable, QueryError> {
    let graph = store
        .resolve(ast.dataset.as_deref())
        .ok_or_else(|| QueryError::UnknownGraph(ast.dataset.clone().unwrap_or_default()))?;
    let vars = ast.variables();
    let slots: HashMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();

    let mut bindings: Vec<Binding> = match &ast.values {
        Some(values) => values
            .terms
            .iter()
            .map(|t| {
                let mut b = vec![None; vars.len()];
                b[slots[values.var.as_str()]] = Some(t.clone());
                b
            })
            .collect(),
        None => vec![vec![None; vars.len()]],
    };

    for pattern in &ast.patterns {
        let mut next = Vec::new();
        for b in &bindings {
            let s = resolve(&pattern.subject, b, &slots);
            let p = resolve(&pattern.predicate, b, &slots);
            let o = resolve(&pattern.object, b, &slots);
            for t in graph.matching(s, p, o) {
                if let Some(nb) = unify(pattern, [&t.subject, &t.predicate, &t.object], b, &slots) {
                    next.push(nb);
                }
            }
        }
        bindings = next;
        if bindings.is_empty() {
            break;
        }
    }

    let proj: Vec<usize> = ast.projection.iter().map(|v| slots[v.as_str()]).collect();
    let mut rows: Vec<Vec<Term>> = bindings
        .into_iter()
        .map(|b| {
            proj.iter()
                .map(|&i| b[i].clone().expect("projected variables are bound by every solution"))
                .collect()
        })
        .collect();
    sort_rows(&mut rows);
    if ast.distinct {
        rows.dedup();
    }
    Ok(ResultTable {
        header: ast.projection.clone(),
        rows,
    })
}

pub(crate) fn sort_rows(rows: &mut [Vec<Term>]) {
    rows.sort_by_cached_key(|r| r.iter().map(|t| (t.sort_key(), t.clone())).collect::<Vec<_>>());
}
