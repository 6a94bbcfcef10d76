use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::ClassGraph;
use crate::rdf::{Term, RDFS, TAG};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    MissingLabel {
        class: String,
    },
    MultipleLabels {
        class: String,
        count: usize,
    },
    /// Members of one strongly connected subClassOf component.
    Cycle {
        classes: Vec<String>,
    },
    TagOutsideNamespace {
        class: String,
        tag: String,
    },
    DanglingSuperclass {
        class: String,
        target: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingLabel { class } => write!(f, "{class}: no rdfs:label"),
            Violation::MultipleLabels { class, count } => {
                write!(f, "{class}: {count} rdfs:label values")
            }
            Violation::Cycle { classes } => write!(f, "subClassOf cycle: {}", classes.join(", ")),
            Violation::TagOutsideNamespace { class, tag } => {
                write!(f, "{class}: tag {tag} outside the tag namespace")
            }
            Violation::DanglingSuperclass { class, target } => {
                write!(f, "{class}: superclass {target} is not a declared class")
            }
        }
    }
}

fn name(t: &Term) -> String {
    t.as_iri().map_or_else(|| t.to_string(), str::to_string)
}

/// Lists every invariant violation of a class graph; empty means valid.
pub fn validate_ontology(g: &ClassGraph) -> Vec<Violation> {
    let classes = g.classes();
    let label = Term::iri(format!("{RDFS}label"));
    let sub_class_of = Term::iri(format!("{RDFS}subClassOf"));
    let has_tag = Term::brick("hasAssociatedTag");
    let mut out = Vec::new();

    for class in &classes {
        match g.objects(class, &label).len() {
            0 => out.push(Violation::MissingLabel { class: name(class) }),
            1 => {}
            count => out.push(Violation::MultipleLabels {
                class: name(class),
                count,
            }),
        }
        for tag in g.objects(class, &has_tag) {
            if !tag.as_iri().is_some_and(|i| i.starts_with(TAG)) {
                out.push(Violation::TagOutsideNamespace {
                    class: name(class),
                    tag: name(&tag),
                });
            }
        }
    }

    let mut edges: BTreeMap<Term, BTreeSet<Term>> = BTreeMap::new();
    for t in g.matching(None, Some(&sub_class_of), None) {
        if !classes.contains(&t.object) {
            out.push(Violation::DanglingSuperclass {
                class: name(&t.subject),
                target: name(&t.object),
            });
        }
        edges.entry(t.subject).or_default().insert(t.object);
    }

    let reach = |start: &Term| -> BTreeSet<Term> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<&Term> = edges.get(start).into_iter().flatten().collect();
        while let Some(n) = stack.pop() {
            if seen.insert(n.clone()) {
                stack.extend(edges.get(n).into_iter().flatten());
            }
        }
        seen
    };
    let reachable: BTreeMap<&Term, BTreeSet<Term>> = edges.keys().map(|k| (k, reach(k))).collect();
    let mut reported: BTreeSet<Term> = BTreeSet::new();
    for (node, r) in &reachable {
        if !r.contains(*node) || reported.contains(*node) {
            continue;
        }
        let component: BTreeSet<Term> = r
            .iter()
            .filter(|m| reachable.get(m).is_some_and(|mr| mr.contains(*node)))
            .cloned()
            .collect();
        reported.extend(component.iter().cloned());
        out.push(Violation::Cycle {
            classes: component.iter().map(name).collect(),
        });
    }

    out.sort();
    out
}
