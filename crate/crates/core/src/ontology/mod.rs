//! Tag-based class definitions and their compilation into a class graph.

mod defs;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Deref;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::rdf::{default_namespaces, Graph, Term, Triple, OWL, RDFS, SKOS};

pub use defs::{brick_core_defs, default_ontology, vrf_module_defs, BRICK_CORE_JSON, VRF_MODULE_JSON};
pub use validate::{validate_ontology, Violation};

/// Parents that resolve even when no definition in the set declares them.
pub const ROOT_CLASSES: [&str; 13] = [
    "Equipment",
    "HVAC_Equipment",
    "Point",
    "Sensor",
    "Command",
    "Setpoint",
    "Location",
    "Substance",
    "Fluid",
    "Liquid",
    "Gas",
    "System",
    "Valve",
];

/// One class in the definition source. `parent` is `None` only for top-level
/// roots; nested subclasses always take the enclosing class as parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDef {
    pub name: String,
    pub tags: Vec<String>,
    pub parent: Option<String>,
    pub subclasses: Vec<ClassDef>,
    pub definition: Option<String>,
}

impl ClassDef {
    pub fn new(name: &str, parent: Option<&str>, tags: &[&str]) -> Self {
        ClassDef {
            name: name.to_string(),
            tags: tags.iter().map(|t| t.to_string()).collect(),
            parent: parent.map(str::to_string),
            subclasses: Vec::new(),
            definition: None,
        }
    }

    pub fn with_subclass(mut self, mut sub: ClassDef) -> Self {
        sub.parent = Some(self.name.clone());
        self.subclasses.push(sub);
        self
    }

    pub fn with_definition(mut self, text: &str) -> Self {
        self.definition = Some(text.to_string());
        self
    }

    /// This class followed by all nested subclasses, depth first.
    pub fn flatten(&self) -> Vec<&ClassDef> {
        let mut out = vec![self];
        for sub in &self.subclasses {
            out.extend(sub.flatten());
        }
        out
    }

    pub fn label(&self) -> String {
        self.name.replace('_', " ")
    }
}

/// Find a definition by name anywhere in a nested set.
pub fn find_class<'a>(defs: &'a [ClassDef], name: &str) -> Option<&'a ClassDef> {
    defs.iter().flat_map(ClassDef::flatten).find(|d| d.name == name)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OntologyError {
    #[error("duplicate class {0}")]
    DuplicateClass(String),
    #[error("class {0} has an unresolved parent")]
    UnresolvedParent(String),
    #[error("cyclic class hierarchy: {}", .0.join(" -> "))]
    CyclicHierarchy(Vec<String>),
    #[error("definition file: {0}")]
    Format(String),
}

/// A graph holding class axioms only.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClassGraph(Graph);

impl ClassGraph {
    pub fn from_graph(graph: Graph) -> Self {
        ClassGraph(graph)
    }

    pub fn into_inner(self) -> Graph {
        self.0
    }

    pub fn graph(&self) -> &Graph {
        &self.0
    }

    /// Every IRI declared `a owl:Class`.
    pub fn classes(&self) -> BTreeSet<Term> {
        self.0
            .subjects(&Term::rdf_type(), &Term::iri(format!("{OWL}Class")))
            .into_iter()
            .collect()
    }
}

impl Deref for ClassGraph {
    type Target = Graph;

    fn deref(&self) -> &Graph {
        &self.0
    }
}

/// Compiles definitions into class triples: type, label, subClassOf, one
/// hasAssociatedTag per tag and an optional skos:definition.
pub fn compile_ontology(defs: &[ClassDef]) -> Result<ClassGraph, OntologyError> {
    let mut flat: BTreeMap<&str, (&ClassDef, Option<&str>)> = BTreeMap::new();
    fn collect<'a>(
        def: &'a ClassDef,
        parent: Option<&'a str>,
        flat: &mut BTreeMap<&'a str, (&'a ClassDef, Option<&'a str>)>,
    ) -> Result<(), OntologyError> {
        if flat.insert(&def.name, (def, parent)).is_some() {
            return Err(OntologyError::DuplicateClass(def.name.clone()));
        }
        for sub in &def.subclasses {
            collect(sub, Some(&def.name), flat)?;
        }
        Ok(())
    }
    for def in defs {
        collect(def, def.parent.as_deref(), &mut flat)?;
    }

    for (name, (_, parent)) in &flat {
        if let Some(p) = parent {
            if !flat.contains_key(p) && !ROOT_CLASSES.contains(p) {
                return Err(OntologyError::UnresolvedParent(name.to_string()));
            }
        }
    }

    for start in flat.keys() {
        let mut path = vec![start.to_string()];
        let mut cur = *start;
        while let Some((_, Some(p))) = flat.get(cur) {
            if path.iter().any(|n| n == p) {
                path.push(p.to_string());
                return Err(OntologyError::CyclicHierarchy(path));
            }
            path.push(p.to_string());
            cur = p;
        }
    }

    let rdf_type = Term::rdf_type();
    let label = Term::iri(format!("{RDFS}label"));
    let sub_class_of = Term::iri(format!("{RDFS}subClassOf"));
    let definition = Term::iri(format!("{SKOS}definition"));
    let has_tag = Term::brick("hasAssociatedTag");
    let owl_class = Term::iri(format!("{OWL}Class"));

    let mut g = Graph::new().with_namespaces(default_namespaces());
    for (name, (def, parent)) in &flat {
        let class = Term::brick(name);
        let mut emit = |p: &Term, o: Term| {
            g.insert(Triple {
                subject: class.clone(),
                predicate: p.clone(),
                object: o,
            });
        };
        emit(&rdf_type, owl_class.clone());
        emit(&label, Term::literal(def.label()));
        if let Some(p) = parent {
            emit(&sub_class_of, Term::brick(p));
        }
        for tag in &def.tags {
            emit(&has_tag, Term::tag(tag));
        }
        if let Some(text) = &def.definition {
            emit(&definition, Term::lang_literal(text.clone(), "en"));
        }
    }
    Ok(ClassGraph(g))
}

/// Contents of a definition file: classes plus extra inverse relation pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DefinitionSet {
    pub classes: Vec<ClassDef>,
    /// `(predicate, inverse)` local names in the brick namespace.
    pub inverses: Vec<(String, String)>,
}

/// Reserved top-level key holding `[["feeds", "isFedBy"], ...]`.
pub const INVERSES_KEY: &str = "@inverses";

/// Parses the JSON definition format: class name to
/// `{"tags": [...], "parent": "...", "subclasses": {...}, "definition": "..."}`.
/// Tags may be written `TAG.Name` or `Name`.
pub fn load_definitions(json: &str) -> Result<DefinitionSet, OntologyError> {
    let value: Value = serde_json::from_str(json).map_err(|e| OntologyError::Format(e.to_string()))?;
    let Value::Object(map) = value else {
        return Err(OntologyError::Format("top level must be an object".into()));
    };
    let mut set = DefinitionSet::default();
    for (name, body) in &map {
        if name == INVERSES_KEY {
            set.inverses = parse_inverses(body)?;
            continue;
        }
        set.classes.push(parse_class(name, body, None)?);
    }
    Ok(set)
}

fn parse_inverses(body: &Value) -> Result<Vec<(String, String)>, OntologyError> {
    let err = || OntologyError::Format(format!("{INVERSES_KEY} must be a list of [predicate, inverse] pairs"));
    let list = body.as_array().ok_or_else(err)?;
    list.iter()
        .map(|pair| match pair.as_array().map(Vec::as_slice) {
            Some([Value::String(p), Value::String(q)]) => Ok((p.clone(), q.clone())),
            _ => Err(err()),
        })
        .collect()
}

fn parse_class(name: &str, body: &Value, parent: Option<&str>) -> Result<ClassDef, OntologyError> {
    let obj = body
        .as_object()
        .ok_or_else(|| OntologyError::Format(format!("{name}: expected an object")))?;
    let tags = match obj.get("tags") {
        None => Vec::new(),
        Some(Value::Array(items)) => items
            .iter()
            .map(|t| {
                t.as_str()
                    .map(|s| s.strip_prefix("TAG.").unwrap_or(s).to_string())
                    .ok_or_else(|| OntologyError::Format(format!("{name}: tags must be strings")))
            })
            .collect::<Result<_, _>>()?,
        Some(_) => return Err(OntologyError::Format(format!("{name}: tags must be a list"))),
    };
    let own_parent = match obj.get("parent") {
        None => None,
        Some(Value::String(p)) => Some(p.clone()),
        Some(_) => return Err(OntologyError::Format(format!("{name}: parent must be a string"))),
    };
    let parent = match (parent, own_parent) {
        (Some(enclosing), Some(p)) if p != enclosing => {
            return Err(OntologyError::Format(format!(
                "{name}: nested subclass declares parent {p} but is nested under {enclosing}"
            )))
        }
        (Some(enclosing), _) => Some(enclosing.to_string()),
        (None, p) => p,
    };
    let definition = match obj.get("definition") {
        None => None,
        Some(Value::String(d)) => Some(d.clone()),
        Some(_) => return Err(OntologyError::Format(format!("{name}: definition must be a string"))),
    };
    let subclasses = match obj.get("subclasses") {
        None => Vec::new(),
        Some(Value::Object(subs)) => subs
            .iter()
            .map(|(n, b)| parse_class(n, b, Some(name)))
            .collect::<Result<_, _>>()?,
        Some(_) => return Err(OntologyError::Format(format!("{name}: subclasses must be an object"))),
    };
    Ok(ClassDef {
        name: name.to_string(),
        tags,
        parent,
        subclasses,
        definition,
    })
}

/// Writes definitions back into the JSON file format.
pub fn definitions_to_json(set: &DefinitionSet) -> String {
    fn class_value(def: &ClassDef, nested: bool) -> Value {
        let mut obj = Map::new();
        if let (false, Some(p)) = (nested, &def.parent) {
            obj.insert("parent".into(), Value::String(p.clone()));
        }
        obj.insert(
            "tags".into(),
            Value::Array(def.tags.iter().cloned().map(Value::String).collect()),
        );
        if let Some(d) = &def.definition {
            obj.insert("definition".into(), Value::String(d.clone()));
        }
        if !def.subclasses.is_empty() {
            let subs = def
                .subclasses
                .iter()
                .map(|s| (s.name.clone(), class_value(s, true)))
                .collect();
            obj.insert("subclasses".into(), Value::Object(subs));
        }
        Value::Object(obj)
    }
    let mut top = Map::new();
    for def in &set.classes {
        top.insert(def.name.clone(), class_value(def, false));
    }
    if !set.inverses.is_empty() {
        top.insert(
            INVERSES_KEY.into(),
            Value::Array(
                set.inverses
                    .iter()
                    .map(|(p, q)| Value::Array(vec![Value::String(p.clone()), Value::String(q.clone())]))
                    .collect(),
            ),
        );
    }
    serde_json::to_string_pretty(&Value::Object(top)).expect("JSON values always serialize")
}

/// Class IRI for a local name in the brick namespace.
pub fn class_iri(name: &str) -> Term {
    Term::brick(name)
}
