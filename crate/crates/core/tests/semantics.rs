use proptest::prelude::*;
use sparqlopt::algebra::{evaluate, evaluate_with, EvalOptions, MappingSet, Semantics};
use sparqlopt::analysis::{
    check_pattern, classify_fragment, is_union_normal_form, to_union_normal_form,
    unions_only_at_top_or_in_optional_right, Complexity,
};
use sparqlopt::dataset::Scope;
use sparqlopt::syntax::{parse_query, serialize_query, GraphPattern, Projection, Query, Term};
use sparqlopt_testkit::gen::{self, arb_dataset, arb_graph_dataset, arb_mapping_set, arb_pattern, arb_triple};
use sparqlopt_testkit::oracle::{from_mappings, from_set};
use sparqlopt_testkit::Oracle;

fn same(a: &MappingSet, b: &MappingSet) -> bool {
    from_set(a) == from_set(b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn engine_matches_oracle(d in arb_dataset(), p in arb_pattern(4)) {
        let want = Oracle::for_pattern(&d, &p).eval(&p);
        prop_assert_eq!(from_set(&evaluate(&p, &d, &Scope::Default)), want);
    }

    #[test]
    fn engine_matches_oracle_inside_graph(d in arb_graph_dataset(), p in arb_pattern(3), g in 0..2usize) {
        let p = GraphPattern::graph(Term::iri(gen::graph_name(g)), p);
        let want = Oracle::for_pattern(&d, &p).eval(&p);
        prop_assert_eq!(from_set(&evaluate(&p, &d, &Scope::Default)), want);
    }

    #[test]
    fn bag_results_have_set_support(d in arb_dataset(), p in arb_pattern(3)) {
        let bag = EvalOptions { semantics: Semantics::Bag, ..EvalOptions::default() };
        let b = evaluate_with(&p, &d, &Scope::Default, &bag).unwrap();
        let s = evaluate(&p, &d, &Scope::Default);
        prop_assert!(b.len() >= s.len());
        prop_assert_eq!(from_mappings(&b), from_set(&s));
    }

    #[test]
    fn opt_distributes_on_the_left(d in arb_dataset(), a in arb_triple(), b in arb_triple(), c in arb_triple()) {
        let (a, b, c) = (GraphPattern::triple(a), GraphPattern::triple(b), GraphPattern::triple(c));
        let lhs = GraphPattern::opt(GraphPattern::union(a.clone(), b.clone()), c.clone());
        let rhs = GraphPattern::union(GraphPattern::opt(a, c.clone()), GraphPattern::opt(b, c));
        prop_assert!(same(&evaluate(&lhs, &d, &Scope::Default), &evaluate(&rhs, &d, &Scope::Default)));
    }

    #[test]
    fn join_distributes_over_union(a in arb_mapping_set(), b in arb_mapping_set(), c in arb_mapping_set()) {
        prop_assert!(same(&a.join(&b.union(&c)), &a.join(&b).union(&a.join(&c))));
        prop_assert!(same(&a.left_outer_join(&MappingSet::new()), &a));
    }

    #[test]
    fn unf_is_sound_and_shaped(d in arb_dataset(), p in arb_pattern(4)) {
        let u = to_union_normal_form(&p);
        prop_assert!(is_union_normal_form(&u));
        prop_assert!(unions_only_at_top_or_in_optional_right(&u));
        let oracle = Oracle::for_pattern(&d, &p);
        prop_assert_eq!(oracle.eval(&u), oracle.eval(&p));
    }

    #[test]
    fn unf_of_unf_keeps_branch_count(p in arb_pattern(3)) {
        let u = to_union_normal_form(&p);
        let uu = to_union_normal_form(&u);
        prop_assert_eq!(u.union_branches().len(), uu.union_branches().len());
        prop_assert!(is_union_normal_form(&uu));
    }

    #[test]
    fn adding_opt_never_lowers_the_label(p in arb_pattern(3), t in arb_triple(), left in any::<bool>()) {
        let before = classify_fragment(&p, &check_pattern(&p)).label;
        let q = if left {
            GraphPattern::opt(p, GraphPattern::triple(t))
        } else {
            GraphPattern::opt(GraphPattern::triple(t), p)
        };
        let after = classify_fragment(&q, &check_pattern(&q)).label;
        prop_assert!(after >= before);
        prop_assert!(after >= Complexity::CoNpWellDesignedUnf);
    }

    #[test]
    fn well_designedness_survives_printing(p in arb_pattern(4)) {
        let q = Query::select(Projection::All, p);
        let text = serialize_query(&q);
        let back = parse_query(&text, None).unwrap();
        prop_assert_eq!(&back, &q);
        prop_assert_eq!(check_pattern(&back.pattern).well_designed, check_pattern(&q.pattern).well_designed);
    }
}
