use std::collections::BTreeMap;

use serde::Serialize;

use crate::rdf::Term;

use super::ResultTable;

#[derive(Serialize)]
struct Envelope<'a> {
    head: Head<'a>,
    results: Results<'a>,
}

#[derive(Serialize)]
struct Head<'a> {
    vars: &'a [String],
}

#[derive(Serialize)]
struct Results<'a> {
    bindings: Vec<BTreeMap<&'a str, JsonTerm<'a>>>,
}

#[derive(Serialize)]
struct JsonTerm<'a> {
    #[serde(rename = "type")]
    kind: &'static str,
    value: &'a str,
    #[serde(rename = "xml:lang", skip_serializing_if = "Option::is_none")]
    lang: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    datatype: Option<&'a str>,
}

fn json_term(t: &Term) -> JsonTerm<'_> {
    match t {
        Term::Iri(i) => JsonTerm {
            kind: "uri",
            value: i,
            lang: None,
            datatype: None,
        },
        Term::Blank(l) => JsonTerm {
            kind: "bnode",
            value: l,
            lang: None,
            datatype: None,
        },
        Term::Literal(lit) => JsonTerm {
            kind: "literal",
            value: &lit.lexical,
            lang: lit.lang.as_deref(),
            datatype: lit.datatype.as_deref(),
        },
    }
}

/// SPARQL 1.1 JSON results document, rows in table order.
pub fn results_to_json(rt: &ResultTable) -> String {
    let bindings = rt
        .rows
        .iter()
        .map(|row| {
            rt.header
                .iter()
                .map(String::as_str)
                .zip(row.iter().map(json_term))
                .collect()
        })
        .collect();
    let doc = Envelope {
        head: Head { vars: &rt.header },
        results: Results { bindings },
    };
    serde_json::to_string(&doc).expect("result documents always serialize")
}
