//! Forward-chaining materialization of subclass membership and inverse
//! relationships, so queries can stay plain pattern matches.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::ontology::ClassGraph;
use crate::rdf::{Graph, Term, Triple, RDFS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferenceError {
    #[error("cyclic class hierarchy through {}", .0.join(", "))]
    CyclicHierarchy(Vec<String>),
}

/// Class IRI to its reflexive-transitive set of superclasses.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClosureTable {
    ancestors: BTreeMap<Term, BTreeSet<Term>>,
}

impl ClosureTable {
    pub fn get(&self, class: &Term) -> Option<&BTreeSet<Term>> {
        self.ancestors.get(class)
    }

    pub fn contains_class(&self, class: &Term) -> bool {
        self.ancestors.contains_key(class)
    }

    /// True when `sub` is `sup` or one of its descendants.
    pub fn is_subclass(&self, sub: &Term, sup: &Term) -> bool {
        self.ancestors.get(sub).is_some_and(|a| a.contains(sup))
    }

    pub fn len(&self) -> usize {
        self.ancestors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ancestors.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Term, &BTreeSet<Term>)> {
        self.ancestors.iter()
    }
}

/// Computes `closure(C) = {C} ∪ {D reachable from C via rdfs:subClassOf}` for
/// every declared class and every subClassOf endpoint.
pub fn subclass_closure(ontology: &ClassGraph) -> Result<ClosureTable, InferenceError> {
    let sub_class_of = Term::iri(format!("{RDFS}subClassOf"));
    let mut parents: BTreeMap<Term, BTreeSet<Term>> = BTreeMap::new();
    for class in ontology.classes() {
        parents.entry(class).or_default();
    }
    for t in ontology.matching(None, Some(&sub_class_of), None) {
        parents.entry(t.object.clone()).or_default();
        parents.entry(t.subject).or_default().insert(t.object);
    }
    closure_from_parents(&parents)
}

#[derive(Clone, Copy, PartialEq)]
enum Mark {
    Visiting,
    Done,
}

pub(crate) fn closure_from_parents(parents: &BTreeMap<Term, BTreeSet<Term>>) -> Result<ClosureTable, InferenceError> {
    fn visit(
        node: &Term,
        parents: &BTreeMap<Term, BTreeSet<Term>>,
        marks: &mut BTreeMap<Term, Mark>,
        stack: &mut Vec<Term>,
        out: &mut BTreeMap<Term, BTreeSet<Term>>,
    ) -> Result<(), InferenceError> {
        match marks.get(node) {
            Some(Mark::Done) => return Ok(()),
            Some(Mark::Visiting) => {
                let start = stack.iter().position(|n| n == node).unwrap_or(0);
                let mut cycle: Vec<String> = stack[start..].iter().map(Term::sort_key).collect();
                cycle.push(node.sort_key());
                return Err(InferenceError::CyclicHierarchy(cycle));
            }
            None => {}
        }
        marks.insert(node.clone(), Mark::Visiting);
        stack.push(node.clone());
        let mut acc = BTreeSet::from([node.clone()]);
        for p in parents.get(node).into_iter().flatten() {
            visit(p, parents, marks, stack, out)?;
            acc.extend(out[p].iter().cloned());
        }
        stack.pop();
        marks.insert(node.clone(), Mark::Done);
        out.insert(node.clone(), acc);
        Ok(())
    }

    let mut marks = BTreeMap::new();
    let mut out = BTreeMap::new();
    for node in parents.keys() {
        visit(node, parents, &mut marks, &mut Vec::new(), &mut out)?;
    }
    Ok(ClosureTable { ancestors: out })
}

/// Symmetric predicate/inverse lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InversePairTable {
    map: BTreeMap<Term, Term>,
}

/// Relationship pairs shipped by default, as brick local names.
pub const DEFAULT_INVERSE_PAIRS: [(&str, &str); 4] = [
    ("feeds", "isFedBy"),
    ("hasPart", "isPartOf"),
    ("hasPoint", "isPointOf"),
    ("hasLocation", "isLocationOf"),
];

impl Default for InversePairTable {
    fn default() -> Self {
        let mut t = InversePairTable { map: BTreeMap::new() };
        for (p, q) in DEFAULT_INVERSE_PAIRS {
            t.add(Term::brick(p), Term::brick(q));
        }
        t
    }
}

impl InversePairTable {
    pub fn empty() -> Self {
        InversePairTable { map: BTreeMap::new() }
    }

    pub fn add(&mut self, p: Term, q: Term) {
        self.map.insert(p.clone(), q.clone());
        self.map.insert(q, p);
    }

    /// Default pairs plus extra brick-namespace pairs from a definition file.
    pub fn with_local_pairs(pairs: &[(String, String)]) -> Self {
        let mut t = Self::default();
        for (p, q) in pairs {
            t.add(Term::brick(p), Term::brick(q));
        }
        t
    }

    pub fn inverse(&self, p: &Term) -> Option<&Term> {
        self.map.get(p)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Term, &Term)> {
        self.map.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaterializeOptions {
    pub types: bool,
    pub inverses: bool,
}

impl Default for MaterializeOptions {
    fn default() -> Self {
        MaterializeOptions {
            types: true,
            inverses: true,
        }
    }
}

/// Why an entailed triple was added.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    /// `premise` is `(x, rdf:type, C)` and the added class is an ancestor of C.
    Subclass { premise: Triple },
    /// `premise` is `(y, p, x)` for an inverse pair `(p, q)`.
    Inverse { premise: Triple },
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct MaterializeReport {
    /// rdf:type objects with no entry in the class closure.
    pub unresolved_classes: BTreeSet<String>,
    pub added: usize,
}

#[derive(Debug, Clone)]
pub struct Materialized {
    pub graph: Graph,
    pub report: MaterializeReport,
    pub provenance: BTreeMap<Triple, Justification>,
}

/// Closure and pair table prepared once per ontology.
#[derive(Debug, Clone)]
pub struct Reasoner {
    closure: ClosureTable,
    pairs: InversePairTable,
}

impl Reasoner {
    pub fn new(ontology: &ClassGraph) -> Result<Self, InferenceError> {
        Ok(Reasoner {
            closure: subclass_closure(ontology)?,
            pairs: InversePairTable::default(),
        })
    }

    pub fn with_pairs(mut self, pairs: InversePairTable) -> Self {
        self.pairs = pairs;
        self
    }

    pub fn closure(&self) -> &ClosureTable {
        &self.closure
    }

    pub fn pairs(&self) -> &InversePairTable {
        &self.pairs
    }

    pub fn materialize(&self, model: &Graph, options: MaterializeOptions) -> Materialized {
        let rdf_type = Term::rdf_type();
        let mut graph = model.clone();
        let mut report = MaterializeReport::default();
        let mut provenance = BTreeMap::new();

        if options.types {
            for premise in model.matching(None, Some(&rdf_type), None) {
                let Some(ancestors) = self.closure.get(&premise.object) else {
                    report.unresolved_classes.insert(premise.object.sort_key());
                    continue;
                };
                for sup in ancestors.iter().filter(|a| **a != premise.object) {
                    let t = Triple {
                        subject: premise.subject.clone(),
                        predicate: rdf_type.clone(),
                        object: sup.clone(),
                    };
                    if graph.insert(t.clone()) {
                        provenance.insert(
                            t,
                            Justification::Subclass {
                                premise: premise.clone(),
                            },
                        );
                    }
                }
            }
        }

        if options.inverses {
            let mut added = Vec::new();
            for (p, q) in self.pairs.pairs() {
                for premise in graph.matching(None, Some(p), None) {
                    // Literal objects cannot become subjects.
                    if premise.object.is_literal() {
                        continue;
                    }
                    added.push((
                        Triple {
                            subject: premise.object.clone(),
                            predicate: q.clone(),
                            object: premise.subject.clone(),
                        },
                        premise,
                    ));
                }
            }
            for (t, premise) in added {
                if graph.insert(t.clone()) {
                    provenance.insert(t, Justification::Inverse { premise });
                }
            }
        }

        report.added = graph.len() - model.len();
        Materialized {
            graph,
            report,
            provenance,
        }
    }
}

/// One-shot materialization against an ontology with the default pair table.
pub fn materialize(
    model: &Graph,
    ontology: &ClassGraph,
    options: MaterializeOptions,
) -> Result<Materialized, InferenceError> {
    Ok(Reasoner::new(ontology)?.materialize(model, options))
}
