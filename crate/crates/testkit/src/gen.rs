//! proptest strategies over a tiny vocabulary.

use proptest::prelude::*;
use sparqlopt::algebra::{Mapping, MappingSet};
use sparqlopt::dataset::{Dataset, ProvenanceMap};
use sparqlopt::syntax::{
    CompareOp, Condition, GraphPattern, Literal, Term, Triple, TriplePattern, UnaryTest, Variable,
};

pub const NS: &str = "http://example.org/";
pub const VARS: [&str; 3] = ["x", "y", "z"];

pub fn node(i: usize) -> Term {
    Term::iri(format!("{NS}n{i}"))
}

pub fn pred(i: usize) -> Term {
    Term::iri(format!("{NS}p{i}"))
}

pub fn graph_name(i: usize) -> String {
    format!("{NS}g{i}")
}

pub fn lit(i: usize) -> Term {
    Term::literal(Literal::simple(["a", "b"][i % 2]))
}

pub fn var(i: usize) -> Term {
    Term::var(VARS[i % VARS.len()])
}

/// Objects 0..4 are nodes, 4..6 literals.
fn object(i: usize) -> Term {
    if i < 4 {
        node(i)
    } else {
        lit(i - 4)
    }
}

fn raw_triples() -> impl Strategy<Value = Vec<(usize, usize, usize)>> {
    prop::collection::vec((0..4usize, 0..3usize, 0..6usize), 0..14)
}

fn ground(s: usize, p: usize, o: usize) -> Triple {
    Triple::new(node(s), pred(p), object(o)).unwrap()
}

/// Default-graph-only dataset over n0..n3, p0..p2 and two literals.
pub fn arb_dataset() -> impl Strategy<Value = Dataset> {
    raw_triples().prop_map(|ts| {
        let mut d = Dataset::new();
        for (s, p, o) in ts {
            d.insert(None, ground(s, p, o));
        }
        d
    })
}

/// The predicate-to-graph assignment used by [`arb_graph_dataset`].
pub fn graph_of_pred(p: usize) -> usize {
    usize::from(p == 2)
}

pub fn provenance() -> ProvenanceMap {
    let mut m = ProvenanceMap::default();
    for p in 0..3 {
        m.predicate_to_graph.insert(
            pred(p).as_iri().unwrap().to_string(),
            graph_name(graph_of_pred(p)),
        );
    }
    m
}

/// Named-graph dataset (union default graph) for which [`provenance`] is
/// valid.
pub fn arb_graph_dataset() -> impl Strategy<Value = Dataset> {
    raw_triples().prop_map(|ts| {
        let mut d = Dataset::new();
        for g in 0..2 {
            d.create_graph(&graph_name(g));
        }
        for (s, p, o) in ts {
            d.insert(Some(&graph_name(graph_of_pred(p))), ground(s, p, o));
        }
        d
    })
}

fn arb_subject() -> impl Strategy<Value = Term> {
    prop_oneof![3 => (0..3usize).prop_map(var), 1 => (0..4usize).prop_map(node)]
}

fn arb_object() -> impl Strategy<Value = Term> {
    prop_oneof![
        4 => (0..3usize).prop_map(var),
        1 => (0..4usize).prop_map(node),
        1 => (0..2usize).prop_map(lit),
    ]
}

pub fn arb_triple() -> impl Strategy<Value = TriplePattern> {
    (arb_subject(), 0..3usize, arb_object())
        .prop_map(|(s, p, o)| TriplePattern::new(s, pred(p), o))
}

fn arb_operand() -> impl Strategy<Value = Term> {
    prop_oneof![
        2 => (0..3usize).prop_map(var),
        1 => (0..4usize).prop_map(node),
        1 => (0..2usize).prop_map(lit),
    ]
}

pub fn arb_condition() -> impl Strategy<Value = Condition> {
    let leaf = prop_oneof![
        ((0..3usize).prop_map(var), arb_operand(), any::<bool>()).prop_map(|(a, b, eq)| {
            Condition::Compare(if eq { CompareOp::Eq } else { CompareOp::NotEq }, a, b)
        }),
        (0..3usize).prop_map(|i| Condition::Bound(Variable::new(VARS[i]))),
        ((0..3usize).prop_map(var), any::<bool>()).prop_map(|(v, iri)| {
            Condition::Test(if iri { UnaryTest::IsIri } else { UnaryTest::IsLiteral }, v)
        }),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Condition::negate),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Condition::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Condition::or(a, b)),
        ]
    })
}

/// AND/OPT/UNION/FILTER patterns of depth at most `depth`.
pub fn arb_pattern(depth: u32) -> impl Strategy<Value = GraphPattern> {
    arb_triple()
        .prop_map(GraphPattern::triple)
        .prop_recursive(depth, 16, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| GraphPattern::And(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| GraphPattern::opt(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| GraphPattern::union(a, b)),
                (inner, arb_condition()).prop_map(|(a, c)| GraphPattern::filter(a, c)),
            ]
        })
}

pub fn arb_mapping() -> impl Strategy<Value = Mapping> {
    prop::collection::vec(prop::option::of(0..3usize), 3).prop_map(|vals| {
        let mut m = Mapping::new();
        for (i, v) in vals.into_iter().enumerate() {
            if let Some(k) = v {
                m.insert(Variable::new(VARS[i]), node(k));
            }
        }
        m
    })
}

pub fn arb_mapping_set() -> impl Strategy<Value = MappingSet> {
    prop::collection::vec(arb_mapping(), 0..5).prop_map(|v| v.into_iter().collect())
}
