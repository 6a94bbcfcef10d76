use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::term::{Namespaces, Term};
use super::RdfError;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    /// Builds a triple, rejecting literal subjects and non-IRI predicates.
    pub fn new(subject: Term, predicate: Term, object: Term) -> Result<Self, RdfError> {
        if subject.is_literal() {
            return Err(RdfError::InvalidTriple(format!("literal subject {subject}")));
        }
        if !predicate.is_iri() {
            return Err(RdfError::InvalidTriple(format!("non-IRI predicate {predicate}")));
        }
        Ok(Triple {
            subject,
            predicate,
            object,
        })
    }

    /// Shorthand for IRI-only triples; panics are impossible since all three
    /// positions are IRIs.
    pub fn iris(s: &str, p: &str, o: &str) -> Self {
        Triple {
            subject: Term::iri(s),
            predicate: Term::iri(p),
            object: Term::iri(o),
        }
    }
}

type Index = BTreeMap<Term, BTreeMap<Term, BTreeSet<Term>>>;

/// A set of triples with subject-, predicate- and object-first indexes.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    pub name: Option<String>,
    pub namespaces: Namespaces,
    spo: Index,
    pos: Index,
    osp: Index,
    len: usize,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.namespaces == other.namespaces && self.spo == other.spo
    }
}

impl Eq for Graph {}

fn index_insert(index: &mut Index, a: &Term, b: &Term, c: &Term) -> bool {
    index
        .entry(a.clone())
        .or_default()
        .entry(b.clone())
        .or_default()
        .insert(c.clone())
}

fn index_remove(index: &mut Index, a: &Term, b: &Term, c: &Term) -> bool {
    let Some(second) = index.get_mut(a) else {
        return false;
    };
    let Some(third) = second.get_mut(b) else {
        return false;
    };
    let removed = third.remove(c);
    if third.is_empty() {
        second.remove(b);
    }
    if second.is_empty() {
        index.remove(a);
    }
    removed
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn named(name: impl Into<String>) -> Self {
        Graph {
            name: Some(name.into()),
            ..Self::default()
        }
    }

    pub fn with_namespaces(mut self, namespaces: Namespaces) -> Self {
        self.namespaces = namespaces;
        self
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Inserts a triple; returns false when it was already present.
    pub fn insert(&mut self, t: Triple) -> bool {
        let Triple {
            subject: s,
            predicate: p,
            object: o,
        } = t;
        if !index_insert(&mut self.spo, &s, &p, &o) {
            return false;
        }
        index_insert(&mut self.pos, &p, &o, &s);
        index_insert(&mut self.osp, &o, &s, &p);
        self.len += 1;
        true
    }

    pub fn remove(&mut self, t: &Triple) -> bool {
        if !index_remove(&mut self.spo, &t.subject, &t.predicate, &t.object) {
            return false;
        }
        index_remove(&mut self.pos, &t.predicate, &t.object, &t.subject);
        index_remove(&mut self.osp, &t.object, &t.subject, &t.predicate);
        self.len -= 1;
        true
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.spo
            .get(&t.subject)
            .and_then(|m| m.get(&t.predicate))
            .is_some_and(|s| s.contains(&t.object))
    }

    pub fn extend<I: IntoIterator<Item = Triple>>(&mut self, triples: I) {
        for t in triples {
            self.insert(t);
        }
    }

    /// Triples in subject, predicate, object order.
    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        self.spo.iter().flat_map(|(s, pm)| {
            pm.iter().flat_map(move |(p, os)| {
                os.iter().map(move |o| Triple {
                    subject: s.clone(),
                    predicate: p.clone(),
                    object: o.clone(),
                })
            })
        })
    }

    pub fn triples(&self) -> BTreeSet<Triple> {
        self.iter().collect()
    }

    /// Triples matching a pattern where `None` is a wildcard.
    pub fn matching(&self, s: Option<&Term>, p: Option<&Term>, o: Option<&Term>) -> Vec<Triple> {
        let mk = |s: &Term, p: &Term, o: &Term| Triple {
            subject: s.clone(),
            predicate: p.clone(),
            object: o.clone(),
        };
        let mut out = Vec::new();
        match (s, p, o) {
            (Some(s), _, _) => {
                let Some(pm) = self.spo.get(s) else {
                    return out;
                };
                for (pk, os) in pm {
                    if p.is_some_and(|p| p != pk) {
                        continue;
                    }
                    match o {
                        Some(o) => {
                            if os.contains(o) {
                                out.push(mk(s, pk, o));
                            }
                        }
                        None => out.extend(os.iter().map(|ok| mk(s, pk, ok))),
                    }
                }
            }
            (None, Some(p), _) => {
                let Some(om) = self.pos.get(p) else {
                    return out;
                };
                match o {
                    Some(o) => {
                        if let Some(ss) = om.get(o) {
                            out.extend(ss.iter().map(|sk| mk(sk, p, o)));
                        }
                    }
                    None => {
                        for (ok, ss) in om {
                            out.extend(ss.iter().map(|sk| mk(sk, p, ok)));
                        }
                    }
                }
            }
            (None, None, Some(o)) => {
                if let Some(sm) = self.osp.get(o) {
                    for (sk, ps) in sm {
                        out.extend(ps.iter().map(|pk| mk(sk, pk, o)));
                    }
                }
            }
            (None, None, None) => out.extend(self.iter()),
        }
        out
    }

    /// Objects of `(subject, predicate, ?)`.
    pub fn objects(&self, subject: &Term, predicate: &Term) -> Vec<Term> {
        self.spo
            .get(subject)
            .and_then(|m| m.get(predicate))
            .map(|s| s.iter().cloned().collect())
            .unwrap_or_default()
    }

    /// Subjects of `(?, predicate, object)`.
    pub fn subjects(&self, predicate: &Term, object: &Term) -> Vec<Term> {
        self.pos
            .get(predicate)
            .and_then(|m| m.get(object))
            .map(|s| s.iter().cloned().collect())
            .unwrap_or_default()
    }

    pub fn subject_terms(&self) -> impl Iterator<Item = &Term> {
        self.spo.keys()
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        g.extend(iter);
        g
    }
}
