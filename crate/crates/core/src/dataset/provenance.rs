//! Predicate-to-graph maps used for GRAPH localization.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::syntax::{Term, Triple};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceMap {
    #[serde(rename = "predicates", default)]
    pub predicate_to_graph: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProvenanceViolation {
    pub predicate: String,
    pub graph: String,
    /// Triples with the predicate visible in the default graph but not in
    /// the mapped graph, or the reverse.
    pub missing_from_graph: usize,
    pub extra_in_graph: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ProvenanceInference {
    pub map: ProvenanceMap,
    /// Predicates occurring in more than one named graph, with those graphs.
    pub spanning: BTreeMap<String, Vec<String>>,
}

impl ProvenanceMap {
    pub fn graph_for(&self, predicate: &str) -> Option<&str> {
        self.predicate_to_graph.get(predicate).map(String::as_str)
    }

    /// Checks that matching each mapped predicate in its graph gives the
    /// same triples as matching it in the default graph.
    pub fn validate(&self, d: &Dataset) -> Vec<ProvenanceViolation> {
        let mut out = Vec::new();
        for (p, g) in &self.predicate_to_graph {
            let pred = Term::iri(p.clone());
            let in_default: BTreeSet<&Triple> = d
                .default_graph()
                .triples_matching(None, Some(&pred), None)
                .collect();
            let in_graph: BTreeSet<&Triple> = d
                .named_graph(g)
                .map(|gr| gr.triples_matching(None, Some(&pred), None).collect())
                .unwrap_or_default();
            let missing = in_default.difference(&in_graph).count();
            let extra = in_graph.difference(&in_default).count();
            if missing + extra > 0 {
                out.push(ProvenanceViolation {
                    predicate: p.clone(),
                    graph: g.clone(),
                    missing_from_graph: missing,
                    extra_in_graph: extra,
                });
            }
        }
        out
    }
}

/// Maps every predicate that occurs in exactly one named graph to it.
pub fn infer_provenance(d: &Dataset) -> ProvenanceInference {
    let mut seen: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for name in d.graph_names() {
        let g = d.named_graph(name).expect("listed graph");
        let preds: BTreeSet<&str> = g.iter().filter_map(|t| t.predicate.as_iri()).collect();
        for p in preds {
            seen.entry(p.to_string()).or_default().push(name.to_string());
        }
    }
    let mut inf = ProvenanceInference::default();
    for (p, graphs) in seen {
        if graphs.len() == 1 {
            inf.map.predicate_to_graph.insert(p, graphs[0].clone());
        } else {
            inf.spanning.insert(p, graphs);
        }
    }
    inf
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tr(p: &str) -> Triple {
        Triple::new(Term::iri("http://s"), Term::iri(p), Term::iri("http://o")).unwrap()
    }

    #[test]
    fn spanning_predicates_reported() {
        let mut d = Dataset::new();
        d.insert(Some("http://A"), tr("http://p1"));
        d.insert(Some("http://A"), tr("http://p2"));
        d.insert(Some("http://B"), tr("http://p2"));
        let inf = infer_provenance(&d);
        assert_eq!(inf.map.graph_for("http://p1"), Some("http://A"));
        assert_eq!(inf.map.graph_for("http://p2"), None);
        assert_eq!(inf.spanning["http://p2"], vec!["http://A", "http://B"]);
        assert!(inf.map.validate(&d).is_empty());
    }

    #[test]
    fn wrong_mapping_flagged() {
        let mut d = Dataset::new();
        d.insert(Some("http://A"), tr("http://p1"));
        d.insert(None, Triple::new(Term::iri("http://x"), Term::iri("http://p1"), Term::iri("http://o")).unwrap());
        let inf = infer_provenance(&d);
        let v = inf.map.validate(&d);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].missing_from_graph, 1);
    }
}
