//! In-memory RDF dataset with named graphs and per-position indices.

mod manifest;
mod ntriples;
mod provenance;

use std::collections::HashMap;

use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};

use crate::algebra::Mapping;
use crate::syntax::{Term, Triple, Variable};

pub use manifest::{load, load_manifest, FileFormat, LoadError, Manifest, ManifestFile, Source};
pub use ntriples::{parse_nquads, parse_ntriples, Quad};
pub use provenance::{infer_provenance, ProvenanceInference, ProvenanceMap, ProvenanceViolation};

/// What the default graph contains.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefaultGraph {
    /// Union of every named graph plus triples loaded without a graph.
    #[default]
    Union,
    /// Only triples loaded without a graph.
    Unassigned,
}

/// A set of triples, kept in insertion order, indexed by subject,
/// predicate and object.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    triples: IndexSet<Triple>,
    by_subject: HashMap<Term, Vec<usize>>,
    by_predicate: HashMap<Term, Vec<usize>>,
    by_object: HashMap<Term, Vec<usize>>,
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    /// Returns false when the triple was already present.
    pub fn insert(&mut self, t: Triple) -> bool {
        let (idx, fresh) = self.triples.insert_full(t);
        if fresh {
            let t = &self.triples[idx];
            self.by_subject.entry(t.subject.clone()).or_default().push(idx);
            self.by_predicate.entry(t.predicate.clone()).or_default().push(idx);
            self.by_object.entry(t.object.clone()).or_default().push(idx);
        }
        fresh
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.triples.contains(t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    /// Triples matching the given constants (`None` is a wildcard).
    pub fn triples_matching<'a>(
        &'a self,
        s: Option<&'a Term>,
        p: Option<&'a Term>,
        o: Option<&'a Term>,
    ) -> Box<dyn Iterator<Item = &'a Triple> + 'a> {
        let candidates = [
            s.map(|t| self.by_subject.get(t)),
            p.map(|t| self.by_predicate.get(t)),
            o.map(|t| self.by_object.get(t)),
        ];
        let mut best: Option<&Vec<usize>> = None;
        for c in candidates.into_iter().flatten() {
            match c {
                None => return Box::new(std::iter::empty()),
                Some(list) => {
                    if best.is_none_or(|b| list.len() < b.len()) {
                        best = Some(list);
                    }
                }
            }
        }
        let keep = move |t: &&Triple| {
            s.is_none_or(|x| &t.subject == x)
                && p.is_none_or(|x| &t.predicate == x)
                && o.is_none_or(|x| &t.object == x)
        };
        match best {
            Some(list) => Box::new(list.iter().map(|&i| &self.triples[i]).filter(keep)),
            None => Box::new(self.triples.iter().filter(keep)),
        }
    }
}

/// Where a triple pattern is matched.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scope {
    Default,
    Named(String),
    /// Every named graph; results carry the graph name.
    AnyNamed,
}

#[derive(Clone, Debug, Default)]
pub struct Dataset {
    named: IndexMap<String, Graph>,
    unassigned: Graph,
    default: Graph,
    mode: DefaultGraph,
}

impl Dataset {
    pub fn new() -> Self {
        Dataset::default()
    }

    pub fn with_default_graph(mode: DefaultGraph) -> Self {
        Dataset {
            mode,
            ..Dataset::default()
        }
    }

    pub fn default_graph_mode(&self) -> DefaultGraph {
        self.mode
    }

    pub fn set_default_graph_mode(&mut self, mode: DefaultGraph) {
        if mode == self.mode {
            return;
        }
        self.mode = mode;
        let mut default = Graph::new();
        for t in self.unassigned.iter() {
            default.insert(t.clone());
        }
        if mode == DefaultGraph::Union {
            for g in self.named.values() {
                for t in g.iter() {
                    default.insert(t.clone());
                }
            }
        }
        self.default = default;
    }

    /// Adds a triple to a named graph, or to the default graph when `graph`
    /// is `None`.
    pub fn insert(&mut self, graph: Option<&str>, t: Triple) {
        match graph {
            Some(g) => {
                if self.mode == DefaultGraph::Union {
                    self.default.insert(t.clone());
                }
                self.named.entry(g.to_string()).or_default().insert(t);
            }
            None => {
                self.default.insert(t.clone());
                self.unassigned.insert(t);
            }
        }
    }

    /// Registers an empty named graph.
    pub fn create_graph(&mut self, name: &str) {
        self.named.entry(name.to_string()).or_default();
    }

    pub fn graph_names(&self) -> impl Iterator<Item = &str> {
        self.named.keys().map(String::as_str)
    }

    pub fn named_graph(&self, name: &str) -> Option<&Graph> {
        self.named.get(name)
    }

    pub fn default_graph(&self) -> &Graph {
        &self.default
    }

    /// Triple counts per named graph in load order, then the default graph.
    pub fn counts(&self) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> =
            self.named.iter().map(|(n, g)| (n.clone(), g.len())).collect();
        out.push(("(default)".to_string(), self.default.len()));
        out
    }

    pub fn graph(&self, scope: &Scope) -> Option<&Graph> {
        match scope {
            Scope::Default => Some(&self.default),
            Scope::Named(n) => self.named.get(n),
            Scope::AnyNamed => None,
        }
    }

    /// Every mapping μ with dom(μ) = var(t) and μ(t) in the scoped graph(s).
    ///
    /// Blank nodes in `t` act as existential variables and are not part of
    /// the returned mappings. An unknown graph yields no results.
    pub fn match_triple(
        &self,
        scope: &Scope,
        s: &Term,
        p: &Term,
        o: &Term,
    ) -> Vec<(Mapping, Option<String>)> {
        let mut out = IndexSet::new();
        let mut run = |name: Option<&str>, g: &Graph| {
            for m in match_in_graph(g, s, p, o, &Mapping::new()) {
                out.insert((m.without_internal(), name.map(str::to_owned)));
            }
        };
        match scope {
            Scope::AnyNamed => {
                for (n, g) in &self.named {
                    run(Some(n), g);
                }
            }
            other => {
                if let Some(g) = self.graph(other) {
                    let name = match other {
                        Scope::Named(n) => Some(n.as_str()),
                        _ => None,
                    };
                    run(name, g);
                }
            }
        }
        out.into_iter().collect()
    }
}

fn pattern_var(t: &Term) -> Option<Variable> {
    match t {
        Term::Variable { name } => Some(name.clone()),
        Term::Blank { label } => Some(Variable::internal(label.clone())),
        _ => None,
    }
}

/// Extensions of `base` that map the pattern `(s, p, o)` onto a triple in
/// `g`. Blank nodes in the pattern bind internal variables.
pub(crate) fn match_in_graph(
    g: &Graph,
    s: &Term,
    p: &Term,
    o: &Term,
    base: &Mapping,
) -> Vec<Mapping> {
    let slots = [s, p, o].map(|t| match pattern_var(t) {
        Some(v) => match base.get(&v) {
            Some(val) => (None, Some(val.clone())),
            None => (Some(v), None),
        },
        None => (None, Some(t.clone())),
    });
    let mut out = Vec::new();
    for t in g.triples_matching(slots[0].1.as_ref(), slots[1].1.as_ref(), slots[2].1.as_ref()) {
        let mut m = base.clone();
        let mut ok = true;
        for ((var, _), val) in slots.iter().zip([&t.subject, &t.predicate, &t.object]) {
            if let Some(v) = var {
                match m.get(v) {
                    Some(existing) if existing != val => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => m.insert(v.clone(), val.clone()),
                }
            }
        }
        if ok {
            out.push(m);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Literal;

    fn t(s: &str, p: &str, o: Term) -> Triple {
        Triple::new(Term::iri(s), Term::iri(p), o).unwrap()
    }

    #[test]
    fn union_default_deduplicates() {
        let mut d = Dataset::new();
        let tr = t("http://s", "http://p", Term::iri("http://o"));
        d.insert(Some("http://g1"), tr.clone());
        d.insert(Some("http://g2"), tr.clone());
        assert_eq!(d.named_graph("http://g1").unwrap().len(), 1);
        assert_eq!(d.named_graph("http://g2").unwrap().len(), 1);
        assert_eq!(d.default_graph().len(), 1);
        d.set_default_graph_mode(DefaultGraph::Unassigned);
        assert!(d.default_graph().is_empty());
    }

    #[test]
    fn blank_pattern_is_existential() {
        let mut d = Dataset::new();
        let label = "http://www.w3.org/2000/01/rdf-schema#label";
        for v in ["foo", "bar"] {
            let tr = Triple::new(
                Term::blank("foo"),
                Term::iri(label),
                Term::literal(Literal::simple(v)),
            )
            .unwrap();
            d.insert(None, tr);
        }
        let r = d.match_triple(&Scope::Default, &Term::blank("b"), &Term::iri(label), &Term::var("o"));
        let got: Vec<String> = r.iter().map(|(m, _)| m.to_string()).collect();
        assert_eq!(got, vec!["{?o -> \"foo\"}", "{?o -> \"bar\"}"]);
    }

    #[test]
    fn repeated_variable_must_agree() {
        let mut d = Dataset::new();
        d.insert(None, t("http://a", "http://p", Term::iri("http://a")));
        d.insert(None, t("http://a", "http://p", Term::iri("http://b")));
        let r = d.match_triple(&Scope::Default, &Term::var("x"), &Term::iri("http://p"), &Term::var("x"));
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn unknown_graph_is_empty() {
        let mut d = Dataset::new();
        d.insert(Some("http://g"), t("http://a", "http://p", Term::iri("http://b")));
        let r = d.match_triple(
            &Scope::Named("http://nope".into()),
            &Term::var("s"),
            &Term::var("p"),
            &Term::var("o"),
        );
        assert!(r.is_empty());
        let any = d.match_triple(&Scope::AnyNamed, &Term::var("s"), &Term::var("p"), &Term::var("o"));
        assert_eq!(any[0].1.as_deref(), Some("http://g"));
    }
}
