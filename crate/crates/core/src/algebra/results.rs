//! SPARQL JSON results and N-Triples output.

use serde_json::{json, Map, Value};

use super::{QueryResult, SolutionSequence};
use crate::syntax::{Literal, Term, Triple, Variable};

pub const JSON_RESULTS: &str = "application/sparql-results+json";
pub const NTRIPLES: &str = "application/n-triples";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResultsError {
    #[error("malformed results document: {0}")]
    Malformed(String),
}

fn term_json(t: &Term) -> Value {
    match t {
        Term::Iri { value } => json!({"type": "uri", "value": value}),
        Term::Blank { label } => json!({"type": "bnode", "value": label}),
        Term::Literal(l) => {
            let mut o = Map::new();
            o.insert("type".into(), "literal".into());
            o.insert("value".into(), l.lexical.clone().into());
            if let Some(lang) = &l.language {
                o.insert("xml:lang".into(), lang.clone().into());
            } else if let Some(dt) = &l.datatype {
                o.insert("datatype".into(), dt.clone().into());
            }
            Value::Object(o)
        }
        Term::Variable { name } => json!({"type": "variable", "value": name.name()}),
    }
}

/// JSON results document for SELECT and ASK results; `None` for graphs.
pub fn to_json(r: &QueryResult) -> Option<Value> {
    match r {
        QueryResult::Boolean(b) => Some(json!({"head": {}, "boolean": b})),
        QueryResult::Solutions(s) => {
            let vars: Vec<&str> = s.variables.iter().map(Variable::name).collect();
            let bindings: Vec<Value> = s
                .rows
                .iter()
                .map(|row| {
                    let mut o = Map::new();
                    for (v, c) in s.variables.iter().zip(row) {
                        if let Some(t) = c {
                            o.insert(v.name().to_string(), term_json(t));
                        }
                    }
                    Value::Object(o)
                })
                .collect();
            Some(json!({"head": {"vars": vars}, "results": {"bindings": bindings}}))
        }
        QueryResult::Graph(_) => None,
    }
}

pub fn to_ntriples(triples: &[Triple]) -> String {
    let mut s = String::new();
    for t in triples {
        s.push_str(&t.to_string());
        s.push('\n');
    }
    s
}

fn parse_term(v: &Value) -> Result<Term, ResultsError> {
    let bad = || ResultsError::Malformed(format!("bad term {v}"));
    let kind = v.get("type").and_then(Value::as_str).ok_or_else(bad)?;
    let value = v.get("value").and_then(Value::as_str).ok_or_else(bad)?;
    Ok(match kind {
        "uri" => Term::iri(value),
        "bnode" => Term::blank(value),
        "literal" | "typed-literal" => {
            if let Some(lang) = v.get("xml:lang").and_then(Value::as_str) {
                Term::literal(Literal::lang(value, lang))
            } else if let Some(dt) = v.get("datatype").and_then(Value::as_str) {
                Term::literal(Literal::typed(value, dt))
            } else {
                Term::literal(Literal::simple(value))
            }
        }
        _ => return Err(bad()),
    })
}

/// Reads a JSON results document (SELECT or ASK).
pub fn from_json(text: &str) -> Result<QueryResult, ResultsError> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| ResultsError::Malformed(e.to_string()))?;
    if let Some(b) = v.get("boolean") {
        return b
            .as_bool()
            .map(QueryResult::Boolean)
            .ok_or_else(|| ResultsError::Malformed("boolean is not a bool".into()));
    }
    let vars: Vec<Variable> = v
        .pointer("/head/vars")
        .and_then(Value::as_array)
        .ok_or_else(|| ResultsError::Malformed("missing head.vars".into()))?
        .iter()
        .map(|x| x.as_str().map(Variable::new))
        .collect::<Option<_>>()
        .ok_or_else(|| ResultsError::Malformed("non-string variable".into()))?;
    let bindings = v
        .pointer("/results/bindings")
        .and_then(Value::as_array)
        .ok_or_else(|| ResultsError::Malformed("missing results.bindings".into()))?;
    let mut rows = Vec::with_capacity(bindings.len());
    for b in bindings {
        let mut row = Vec::with_capacity(vars.len());
        for var in &vars {
            row.push(match b.get(var.name()) {
                Some(t) => Some(parse_term(t)?),
                None => None,
            });
        }
        rows.push(row);
    }
    Ok(QueryResult::Solutions(SolutionSequence {
        variables: vars,
        rows,
    }))
}
