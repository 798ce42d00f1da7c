//! Acceptance suite: one PASS/FAIL line per criterion.

use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use sparqlopt::algebra::{evaluate, evaluate_query, MappingSet, Semantics};
use sparqlopt::analysis::{check_pattern, classify_fragment, to_union_normal_form, Complexity};
use sparqlopt::bench::{compare_variants, run_benchmark, sample_resources, BenchPlan};
use sparqlopt::dataset::{load_manifest, Dataset, ProvenanceMap, Scope};
use sparqlopt::endpoint::Endpoint;
use sparqlopt::rewrite::{
    generate_pagination, localize_graphs, merge_sequence_paths, minimize_optionals,
    naive_optional, reduce_cartesian, rewrite_alternatives, view_variants, AlternativeForm,
    AskProbe, LocalExecutor, Placement, ViewSpec,
};
use sparqlopt::syntax::{
    parse_query, parse_template, render_template, serialize_query, GraphPattern, Projection,
    Query, QueryTemplate, Term, Triple, TriplePattern, Variable,
};
use sparqlopt_testkit::fixtures::{corpus, dataset_from_nquads, hand_built, triple_count};
use sparqlopt_testkit::gen::{self, arb_dataset, arb_graph_dataset, arb_pattern, arb_triple};
use sparqlopt_testkit::oracle::{from_result, from_set};
use sparqlopt_testkit::Oracle;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run_cases<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(text: &str) -> Query {
    parse_query(text, None).unwrap_or_else(|e| panic!("{e}\n{text}"))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let fixtures = hand_built();
    check(fixtures.len() >= 5, || format!("only {} fixtures", fixtures.len()))?;
    let mut queries = 0;
    for f in &fixtures {
        let n = triple_count(&f.dataset);
        check(n <= 50, || format!("fixture {} has {n} triples", f.name))?;
        for text in &f.queries {
            let query = q(text);
            let oracle = Oracle::for_pattern(&f.dataset, &query.pattern);
            let engine = from_result(&evaluate_query(&query, &f.dataset).map_err(|e| e.to_string())?);
            let expected = oracle.eval_query(&query);
            check(engine == expected, || format!("fixture {}: {text}", f.name))?;
            queries += 1;
        }
    }
    run_cases(200, (arb_dataset(), arb_pattern(4)), |(d, p)| {
        let expected = Oracle::for_pattern(&d, &p).eval(&p);
        let got = from_set(&evaluate(&p, &d, &Scope::Default));
        prop_assert_eq!(got, expected);
        Ok(())
    })?;
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} fixtures / {queries} queries + 200 random patterns agree with the oracle in {:.2}s",
        fixtures.len(),
        elapsed.as_secs_f64()
    ))
}

fn criterion_2() -> Outcome {
    let sets = || gen::arb_mapping_set();
    run_cases(1000, (sets(), sets(), sets()), |(a, b, c)| {
        let eq = |x: &MappingSet, y: &MappingSet| from_set(x) == from_set(y);
        prop_assert!(eq(&a.join(&b), &b.join(&a)), "join commutes");
        prop_assert!(eq(&a.join(&b).join(&c), &a.join(&b.join(&c))), "join associates");
        prop_assert!(eq(&a.union(&b), &b.union(&a)), "union commutes");
        prop_assert!(eq(&a.union(&b).union(&c), &a.union(&b.union(&c))), "union associates");
        prop_assert!(eq(&a.left_outer_join(&MappingSet::new()), &a), "left outer join with empty");
        Ok(())
    })?;
    Ok("1000 random triples of mapping sets, zero law violations".into())
}

/// True when no Union node sits below And, Opt or Filter.
fn unions_only_on_top(p: &GraphPattern) -> bool {
    fn below(p: &GraphPattern) -> bool {
        match p {
            GraphPattern::Union(..) => false,
            GraphPattern::And(a, b) | GraphPattern::Opt(a, b) => below(a) && below(b),
            GraphPattern::Filter(a, _) => below(a),
            _ => true,
        }
    }
    match p {
        GraphPattern::Union(a, b) => unions_only_on_top(a) && unions_only_on_top(b),
        other => below(other),
    }
}

fn shared_fixture() -> Dataset {
    let mut d = Dataset::new();
    let mut idx = 0;
    for s in 0..4 {
        for p in 0..3 {
            for o in 0..6 {
                idx += 1;
                if idx % 7 < 2 {
                    let obj = if o < 4 { gen::node(o) } else { gen::lit(o - 4) };
                    d.insert(None, Triple::new(gen::node(s), gen::pred(p), obj).unwrap());
                }
            }
        }
    }
    d
}

fn criterion_3() -> Outcome {
    let d = shared_fixture();
    run_cases(200, arb_pattern(4), |p| {
        let u = to_union_normal_form(&p);
        prop_assert!(unions_only_on_top(&u), "union below and/opt/filter");
        let oracle = Oracle::for_pattern(&d, &p);
        prop_assert_eq!(oracle.eval(&u), oracle.eval(&p));
        Ok(())
    })?;
    let table = [
        ("SELECT * { ?a <http://e/p> ?b . ?b <http://e/q> ?c }", Complexity::Ptime),
        ("SELECT * { ?a <http://e/p> ?b FILTER(?b != <http://e/x>) }", Complexity::Ptime),
        (
            "SELECT * { ?a <http://e/p> ?b { ?b <http://e/q> ?c } UNION { ?b <http://e/r> ?c } }",
            Complexity::NpComplete,
        ),
        (
            "PREFIX ex: <http://www.example.org#> PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#> \
             SELECT ?label { { ex:123 rdfs:label ?label } UNION { ex:456 rdfs:label ?label } }",
            Complexity::Ptime,
        ),
        (
            "SELECT * { ?a <http://e/p> ?b OPTIONAL { ?b <http://e/q> ?c } }",
            Complexity::CoNpWellDesignedUnf,
        ),
        (
            "SELECT * { { ?a <http://e/p> ?b OPTIONAL { ?b <http://e/q> ?c } } ?c <http://e/r> ?d }",
            Complexity::PspaceComplete,
        ),
    ];
    for (text, want) in &table {
        let p = q(text).pattern;
        let got = classify_fragment(&p, &check_pattern(&p)).label;
        check(got == *want, || format!("{text}: got {got}, want {want}"))?;
    }
    Ok(format!(
        "200 random patterns normalized soundly; {}/6 fragment labels match",
        table.len()
    ))
}

const ITEM_VIEW: &str = r#"
resource_type = "http://ex.org/Item"
core = ["name"]

[prefixes]
ex = "http://ex.org/"

[[element]]
name = "name"
chain = "?resource ex:name ?name"

[[element]]
name = "code"
chain = "?resource ex:code ?code"

[[element]]
name = "note"
chain = "?resource ex:note ?note"

[[element]]
name = "maker"
chain = "?resource ex:maker ?maker . ?maker ex:country ?country"
"#;

fn item_fixture() -> Dataset {
    let mut nq = String::new();
    for i in 1..=6 {
        let r = format!("<http://ex.org/i{i}>");
        nq += &format!("{r} <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://ex.org/Item> .\n");
        nq += &format!("{r} <http://ex.org/name> \"item {i}\" .\n");
        nq += &format!("{r} <http://ex.org/code> \"C{i}\" .\n");
        if i % 2 == 1 {
            nq += &format!("{r} <http://ex.org/note> \"note {i}\" .\n");
        }
        if i == 2 || i == 3 {
            nq += &format!("{r} <http://ex.org/maker> <http://ex.org/m{i}> .\n");
            nq += &format!("<http://ex.org/m{i}> <http://ex.org/country> \"NL\" .\n");
        }
    }
    dataset_from_nquads(&nq)
}

fn criterion_4() -> Outcome {
    let spec = ViewSpec::from_toml(ITEM_VIEW).map_err(|e| e.to_string())?;
    let d = item_fixture();
    let mut probe = AskProbe::new(LocalExecutor(&d));
    let min = minimize_optionals(
        &spec.pattern().unwrap(),
        &spec.core_pattern().unwrap(),
        &mut probe,
        &spec.prefixes,
    )
    .map_err(|e| e.to_string())?;
    let naive = naive_optional(&spec).map_err(|e| e.to_string())?;

    // Hand trace: code (false, required), note (true, new group),
    // maker (true, new group), country (false, joins the maker group).
    let expected = [
        ("?resource ex:code ?code .", false, Placement::Required),
        ("?resource ex:note ?note .", true, Placement::NewOptional { group: 0 }),
        ("?resource ex:maker ?maker .", true, Placement::NewOptional { group: 1 }),
        ("?maker ex:country ?country .", false, Placement::JoinedOptional { group: 1 }),
    ];
    let trace: Vec<(&str, bool, Placement)> = min
        .decisions
        .iter()
        .map(|d| (d.pattern.as_str(), d.answer, d.placement.clone()))
        .collect();
    check(trace == expected, || format!("trace {trace:?}"))?;
    check(probe.executed() == 4, || format!("{} probes, hand trace has 4", probe.executed()))?;

    let opened = min
        .decisions
        .iter()
        .filter(|d| matches!(d.placement, Placement::NewOptional { .. } | Placement::NestedOptional { .. }))
        .count();
    let trues = min.decisions.iter().filter(|d| d.answer).count();
    let blocks = min.query.pattern.optional_count();
    check(opened == trues && blocks == trues, || {
        format!("{blocks} OPTIONAL blocks for {trues} true probes")
    })?;

    let oracle = Oracle::for_pattern(&d, &naive.pattern);
    let (a, b) = (oracle.eval(&naive.pattern), oracle.eval(&min.query.pattern));
    check(a == b, || "minimized differs from naive on the fixture".into())?;
    check(!a.is_empty(), || "empty result".into())?;
    let naive_blocks = naive.pattern.optional_count();
    check(blocks < naive_blocks, || format!("{blocks} vs naive {naive_blocks}"))?;
    Ok(format!(
        "4 probes as traced; {blocks} OPTIONAL blocks vs {naive_blocks} naive; {} equal solutions",
        a.len()
    ))
}

fn chain_query() -> impl Strategy<Value = (Dataset, Query)> {
    (
        arb_dataset(),
        2..=3usize,
        prop::collection::vec(0..3usize, 3),
        prop::collection::vec(arb_triple(), 0..2),
        any::<bool>(),
        prop::collection::vec(any::<bool>(), 4),
        any::<bool>(),
    )
        .prop_map(|(d, k, preds, extra, opt, mask, filter)| {
            let mut chain = Vec::new();
            let nodes: Vec<Term> = match k {
                2 => vec![Term::var("x"), Term::var("m1"), Term::var("y")],
                _ => vec![Term::var("x"), Term::var("m1"), Term::var("m2"), Term::var("y")],
            };
            for i in 0..k {
                chain.push(GraphPattern::triple(TriplePattern::new(
                    nodes[i].clone(),
                    gen::pred(preds[i]),
                    nodes[i + 1].clone(),
                )));
            }
            let chain = GraphPattern::and_all(chain);
            let extra = GraphPattern::and_all(extra.into_iter().map(GraphPattern::triple));
            let mut pattern = if opt {
                GraphPattern::opt(extra, chain)
            } else {
                GraphPattern::and(chain, extra)
            };
            if filter {
                pattern = GraphPattern::filter(
                    pattern,
                    sparqlopt::syntax::Condition::Bound(Variable::new("m1")),
                );
            }
            let names = ["x", "y", "z", "m1"];
            let picked: Vec<Variable> = names
                .iter()
                .zip(&mask)
                .filter(|(_, m)| **m)
                .map(|(n, _)| Variable::new(*n))
                .collect();
            let query = if picked.is_empty() {
                Query::select(Projection::All, pattern)
            } else {
                Query::select_vars(picked, pattern)
            };
            (d, query)
        })
}

fn labels_fixture() -> Dataset {
    let mut nq = String::new();
    for i in 0..55 {
        let r = format!("<http://www.example.org#r{i}>");
        if i % 3 != 0 {
            nq += &format!("{r} <http://www.w3.org/2000/01/rdf-schema#label> \"label {i}\" .\n");
        }
        if i % 5 == 0 {
            nq += &format!("{r} <http://www.w3.org/2000/01/rdf-schema#label> \"alt {}\" .\n", i % 4);
        }
    }
    dataset_from_nquads(&nq)
}

fn union_query(ids: &[usize]) -> Query {
    let branches: Vec<String> = ids
        .iter()
        .map(|i| format!("{{ ex:r{i} rdfs:label ?label }}"))
        .collect();
    q(&format!(
        "PREFIX ex: <http://www.example.org#> PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#> \
         SELECT ?label {{ {} }}",
        branches.join(" UNION ")
    ))
}

fn criterion_5() -> Outcome {
    let prov = gen::provenance();
    let localized = Cell::new(0usize);
    run_cases(150, (arb_graph_dataset(), arb_pattern(3)), |(d, p)| {
        prop_assert!(prov.validate(&d).is_empty());
        let query = Query::select(Projection::All, p);
        let r = localize_graphs(&query, &prov);
        let mut wrapped = false;
        r.query.pattern.visit(&mut |n| wrapped |= matches!(n, GraphPattern::NamedGraph(..)));
        localized.set(localized.get() + usize::from(wrapped));
        let oracle = Oracle::for_pattern(&d, &query.pattern);
        prop_assert_eq!(oracle.eval(&r.query.pattern), oracle.eval(&query.pattern));
        Ok(())
    })?;
    let mut broken = shared_fixture();
    broken.insert(
        Some(&gen::graph_name(1)),
        Triple::new(gen::node(0), gen::pred(0), gen::node(1)).unwrap(),
    );
    check(!prov.validate(&broken).is_empty(), || "invalid map not flagged".into())?;

    let merged = Cell::new(0usize);
    run_cases(150, chain_query(), |(d, query)| {
        let r = merge_sequence_paths(&query);
        merged.set(merged.get() + usize::from(!r.report.actions.is_empty()));
        let oracle = Oracle::for_pattern(&d, &query.pattern);
        prop_assert_eq!(oracle.eval_query(&r.query), oracle.eval_query(&query));
        Ok(())
    })?;

    let d = labels_fixture();
    let ids: Vec<usize> = (0..55).collect();
    let sized = prop::sample::select(vec![10usize, 20, 50])
        .prop_flat_map(move |k| prop::sample::subsequence(ids.clone(), k));
    run_cases(120, sized, |chosen| {
        let union = union_query(&chosen);
        let oracle = Oracle::for_pattern(&d, &union.pattern);
        let want = oracle.eval_query(&union);
        let rw = |q: &Query, f| rewrite_alternatives(q, f).map(|r| r.query).map_err(|e| e.to_string());
        let filter = rw(&union, AlternativeForm::Filter).map_err(TestCaseError::fail)?;
        let values = rw(&union, AlternativeForm::Values).map_err(TestCaseError::fail)?;
        let back_f = rw(&filter, AlternativeForm::Union).map_err(TestCaseError::fail)?;
        let back_v = rw(&values, AlternativeForm::Union).map_err(TestCaseError::fail)?;
        for (name, form) in [("filter", &filter), ("values", &values), ("union<-filter", &back_f), ("union<-values", &back_v)] {
            prop_assert_eq!(&oracle.eval_query(form), &want, "{}", name);
        }
        Ok(())
    })?;
    check(localized.get() > 0 && merged.get() > 0, || {
        format!("vacuous run: {} localized, {} merged", localized.get(), merged.get())
    })?;
    Ok(format!(
        "H2 150 cases ({} localized), H3 150 cases ({} merged), H5 120 cases over 10/20/50 constants; 0 counterexamples",
        localized.get(),
        merged.get()
    ))
}

type Groups = BTreeMap<Vec<Option<String>>, BTreeMap<String, Vec<String>>>;

/// Per group key: every aggregated column's values, sorted.
fn value_groups(
    rows: &[sparqlopt::algebra::Mapping],
    keys: &[Variable],
    agg: &[Variable],
    split: Option<&str>,
) -> Groups {
    let mut out = Groups::new();
    for row in rows {
        let key = keys.iter().map(|k| row.get(k).map(|t| t.lexical().to_string())).collect();
        let entry = out.entry(key).or_default();
        for a in agg {
            let cell = row.get(a).map(|t| t.lexical().to_string()).unwrap_or_default();
            let vals = entry.entry(a.name().to_string()).or_default();
            match split {
                Some(sep) if !cell.is_empty() => vals.extend(cell.split(sep).map(str::to_string)),
                Some(_) => {}
                None => vals.push(cell),
            }
        }
    }
    for cols in out.values_mut() {
        cols.values_mut().for_each(|v| v.sort());
    }
    out
}

fn criterion_6() -> Outcome {
    let d = load_data(&corpus("queries/cartesian.nt"))?;
    let query = q(&std::fs::read_to_string(corpus("queries/cartesian.rq")).unwrap());
    let r = reduce_cartesian(&query, &[Variable::new("o")], ", ").map_err(|e| e.to_string())?;
    let res = evaluate_query(&r.query, &d).map_err(|e| e.to_string())?;
    let rows = res.solutions().ok_or("no solutions")?;
    check(rows.rows.len() == 1, || format!("{} rows", rows.rows.len()))?;
    let o = rows.column(&Variable::new("o"))[0].map(|t| t.lexical().to_string());
    check(o.as_deref() == Some("foo, bar"), || format!("?o = {o:?}"))?;

    let shapes: [(&str, &[&str], &[&str]); 3] = [
        ("SELECT ?s ?p ?o { ?s ?p ?o }", &["s", "p"], &["o"]),
        ("SELECT ?s ?a ?b { ?s <http://example.org/p0> ?a . ?s <http://example.org/p1> ?b }", &["s"], &["a", "b"]),
        ("SELECT ?s ?a ?b { ?s <http://example.org/p0> ?a . ?s <http://example.org/p1> ?b }", &["s", "a"], &["b"]),
    ];
    run_cases(120, (arb_dataset(), 0..3usize), |(d, shape)| {
        let (text, keys, agg) = shapes[shape];
        let query = q(text);
        let keys: Vec<Variable> = keys.iter().map(|k| Variable::new(*k)).collect();
        let agg: Vec<Variable> = agg.iter().map(|k| Variable::new(*k)).collect();
        let before = evaluate_query(&query, &d).unwrap();
        let rewritten = reduce_cartesian(&query, &agg, ", ").unwrap().query;
        let after = evaluate_query(&rewritten, &d).unwrap();
        let b = value_groups(&before.solutions().unwrap().to_mappings(), &keys, &agg, None);
        let a = value_groups(&after.solutions().unwrap().to_mappings(), &keys, &agg, Some(", "));
        prop_assert_eq!(a, b);
        Ok(())
    })?;
    Ok("§ cartesian example gives one row ?o = \"foo, bar\"; 120 random groupings conserve values".replace("§ ", ""))
}

fn criterion_7() -> Outcome {
    let mut nq = String::new();
    for i in 1..=25 {
        let r = format!("<http://ex.org/item{i:02}>");
        nq += &format!("{r} <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://ex.org/Item> .\n");
        nq += &format!("{r} <http://ex.org/name> \"name {:02}\" .\n", (i * 7) % 25);
    }
    let d = dataset_from_nquads(&nq);
    let query = q("PREFIX ex: <http://ex.org/> SELECT ?item ?name { ?item a ex:Item . ?item ex:name ?name } ORDER BY ?name");
    let item = Variable::new("item");
    let full: Vec<Term> = evaluate_query(&query, &d)
        .map_err(|e| e.to_string())?
        .solutions()
        .unwrap()
        .column(&item)
        .into_iter()
        .map(|t| t.unwrap().clone())
        .collect();
    let mut pages = Vec::new();
    for idx in 0..3 {
        let p = generate_pagination(&query, 10, idx, &[], None).map_err(|e| e.to_string())?;
        let r = evaluate_query(&p.page_query, &d).map_err(|e| e.to_string())?;
        let page: Vec<Term> = r.solutions().unwrap().column(&item).into_iter().map(|t| t.unwrap().clone()).collect();
        pages.push(page);
    }
    let sizes: Vec<usize> = pages.iter().map(Vec::len).collect();
    check(sizes == [10, 10, 5], || format!("page sizes {sizes:?}"))?;
    let concat: Vec<Term> = pages.concat();
    let distinct: BTreeSet<&Term> = concat.iter().collect();
    check(concat == full && distinct.len() == 25, || "pages do not tile the ordered list".into())?;

    let p = generate_pagination(&query, 10, 0, &[], None).map_err(|e| e.to_string())?;
    let triples = evaluate_query(&p.fill(&pages[0]), &d).map_err(|e| e.to_string())?;
    let triples = triples.triples().ok_or("fill query gave no graph")?;
    let subjects: BTreeSet<&Term> = triples.iter().map(|t| &t.subject).collect();
    let page1: BTreeSet<&Term> = pages[0].iter().collect();
    check(subjects == page1, || format!("fill subjects {subjects:?}"))?;
    Ok(format!("pages 10/10/5 tile 25 items; fill query returned {} triples about page 1 only", triples.len()))
}

fn load_data(path: &Path) -> Result<Dataset, String> {
    if path.extension().is_some_and(|e| e == "toml") {
        return load_manifest(path).map_err(|e| e.to_string());
    }
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    Ok(dataset_from_nquads(&text))
}

const TARGET_TYPE: &str = "http://example.org/Target";

fn targets() -> Result<(Dataset, ViewSpec, ProvenanceMap), String> {
    let d = load_manifest(&corpus("targets/manifest.toml")).map_err(|e| e.to_string())?;
    let spec = ViewSpec::from_toml(&std::fs::read_to_string(corpus("targets/view.toml")).unwrap())
        .map_err(|e| e.to_string())?;
    let prov: ProvenanceMap =
        toml::from_str(&std::fs::read_to_string(corpus("targets/provenance.toml")).unwrap())
            .map_err(|e| e.to_string())?;
    Ok((d, spec, prov))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let (d, spec, prov) = targets()?;
    let violations = prov.validate(&d);
    check(violations.is_empty(), || format!("provenance invalid: {violations:?}"))?;
    let variants = view_variants(&spec, &prov, &mut AskProbe::new(LocalExecutor(&d)))
        .map_err(|e| e.to_string())?;
    let sample = sample_resources(&d, TARGET_TYPE, 20, 42);
    let server = Endpoint::new(d, "127.0.0.1:0", Semantics::Set, Duration::from_secs(10))
        .map_err(|e| e.to_string())?
        .spawn()
        .map_err(|e| e.to_string())?;

    let mut plan = BenchPlan::load(&corpus("targets/bench.toml")).map_err(|e| e.to_string())?;
    plan.endpoint = server.url();
    let sampled: Vec<String> = sample.resources.iter().map(|t| t.lexical().to_string()).collect();
    check(plan.resources == sampled, || "resources.txt differs from the seeded sample".into())?;
    check(plan.resources.len() >= 20, || "fewer than 20 resources".into())?;
    for (spec_v, fresh) in plan.variants.iter().zip(&variants) {
        check(spec_v.name == fresh.name && spec_v.template == fresh.template, || {
            format!("stale variant file for {}", fresh.name)
        })?;
    }
    let names: Vec<&str> = plan.variants.iter().map(|v| v.name.as_str()).collect();
    check(names == sparqlopt::rewrite::VARIANT_NAMES, || format!("variants {names:?}"))?;

    let report = run_benchmark(&plan).map_err(|e| e.to_string())?;
    check(report.aborted.is_none(), || format!("aborted: {:?}", report.aborted))?;
    check(report.protocol_errors() == 0, || format!("{} protocol errors", report.protocol_errors()))?;
    for v in &report.variants {
        let s = &v.summary;
        let (Some(mean), Some(min), Some(max)) = (s.mean, s.min, s.max) else {
            return Err(format!("{}: missing summary", v.name));
        };
        check(min <= mean && mean <= max, || format!("{}: {min} {mean} {max}", v.name))?;
        check(s.count == plan.resources.len(), || format!("{}: {} ok samples", v.name, s.count))?;
    }
    let cmp = compare_variants(&report, plan.baseline.as_deref().unwrap_or("")).map_err(|e| e.to_string())?;
    check(cmp.baseline == "Initial Query", || format!("baseline {}", cmp.baseline))?;
    let base = cmp.rows.iter().find(|r| r.variant == cmp.baseline).ok_or("baseline row missing")?;
    check(base.mean_speedup == Some(1.0), || "baseline speedup is not 1".into())?;
    drop(server);
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "5 variants x {} resources, 0 protocol errors, baseline {}, {:.2}s",
        plan.resources.len(),
        cmp.baseline,
        elapsed.as_secs_f64()
    ))
}

fn roundtrip_template(t: &QueryTemplate) -> Result<(), String> {
    let (q1, table) = parse_template(t).map_err(|e| e.to_string())?;
    let text = render_template(&q1, &table);
    let (q2, _) = parse_template(&text).map_err(|e| format!("{e}\n{}", text.text))?;
    check(q1 == q2, || format!("round trip changed:\n{}", text.text))
}

fn roundtrip(q1: &Query) -> Result<(), String> {
    let text = serialize_query(q1);
    let q2 = parse_query(&text, None).map_err(|e| format!("{e}\n{text}"))?;
    check(*q1 == q2, || format!("round trip changed:\n{text}"))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sparqlopt"))
}

fn run(cmd: &mut Command) -> Result<Vec<u8>, String> {
    let out = cmd.output().map_err(|e| e.to_string())?;
    check(out.status.success(), || {
        format!("{cmd:?} failed: {}", String::from_utf8_lossy(&out.stderr))
    })?;
    Ok(out.stdout)
}

/// The bench report minus wall-clock fields.
fn stable_report(dir: &Path) -> Result<serde_json::Value, String> {
    let text = std::fs::read_to_string(dir.join("report.json")).map_err(|e| e.to_string())?;
    let mut v: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    fn strip(v: &mut serde_json::Value) {
        match v {
            serde_json::Value::Object(map) => {
                for k in ["timestamp", "warmup_ms", "elapsed_ms", "summary"] {
                    map.remove(k);
                }
                map.values_mut().for_each(strip);
            }
            serde_json::Value::Array(items) => items.iter_mut().for_each(strip),
            _ => {}
        }
    }
    strip(&mut v);
    Ok(v)
}

fn criterion_9() -> Outcome {
    let mut files: Vec<PathBuf> = Vec::new();
    for dir in ["queries", "targets/variants"] {
        for e in std::fs::read_dir(corpus(dir)).map_err(|e| e.to_string())? {
            let p = e.map_err(|e| e.to_string())?.path();
            if p.extension().is_some_and(|x| x == "rq") {
                files.push(p);
            }
        }
    }
    files.sort();
    for f in &files {
        let t = QueryTemplate::new(std::fs::read_to_string(f).unwrap());
        roundtrip_template(&t).map_err(|e| format!("{}: {e}", f.display()))?;
    }

    let (d, spec, prov) = targets()?;
    let mut generated = 0;
    for v in view_variants(&spec, &prov, &mut AskProbe::new(LocalExecutor(&d))).map_err(|e| e.to_string())? {
        roundtrip(&v.query)?;
        roundtrip_template(&v.template)?;
        generated += 1;
    }
    let union = q(&std::fs::read_to_string(corpus("queries/alternatives-union.rq")).unwrap());
    for f in [AlternativeForm::Filter, AlternativeForm::Values] {
        roundtrip(&rewrite_alternatives(&union, f).map_err(|e| e.to_string())?.query)?;
        generated += 1;
    }
    let cart = q(&std::fs::read_to_string(corpus("queries/cartesian.rq")).unwrap());
    roundtrip(&reduce_cartesian(&cart, &[Variable::new("o")], ", ").unwrap().query)?;
    let (chained, _) = parse_template(&QueryTemplate::new(
        std::fs::read_to_string(corpus("queries/seqpath-chained.rq")).unwrap(),
    ))
    .map_err(|e| e.to_string())?;
    roundtrip(&merge_sequence_paths(&chained).query)?;
    let pq = q("PREFIX ex: <http://ex.org/> SELECT ?item ?name { ?item a ex:Item ; ex:name ?name } ORDER BY ?name");
    let pg = generate_pagination(&pq, 10, 1, &[], None).map_err(|e| e.to_string())?;
    roundtrip(&pg.page_query)?;
    roundtrip(&pg.fill_query)?;
    generated += 4;

    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let manifest = corpus("targets/manifest.toml");
    let mut sample_out = Vec::new();
    let mut rewrite_out = Vec::new();
    let mut analyze_out = Vec::new();
    for _ in 0..2 {
        sample_out.push(run(bin()
            .arg("sample")
            .arg(&manifest)
            .args(["--type", TARGET_TYPE, "--count", "20", "--seed", "42", "--format", "json"]))?);
        let vdir = tmp.path().join("variants");
        let report = tmp.path().join("rewrite.json");
        run(bin()
            .arg("rewrite")
            .arg("--view")
            .arg(corpus("targets/view.toml"))
            .arg("--probe")
            .arg(format!("local:{}", manifest.display()))
            .arg("--provenance")
            .arg(corpus("targets/provenance.toml"))
            .arg("--variants")
            .arg(&vdir)
            .arg("--report")
            .arg(&report))?;
        let mut bytes = std::fs::read(&report).map_err(|e| e.to_string())?;
        let mut names: Vec<PathBuf> = std::fs::read_dir(&vdir).unwrap().map(|e| e.unwrap().path()).collect();
        names.sort();
        for n in names {
            bytes.extend(std::fs::read(n).unwrap());
        }
        rewrite_out.push(bytes);
        let mut a = Vec::new();
        for f in files.iter().filter(|f| f.starts_with(corpus("queries"))) {
            if std::fs::read_to_string(f).unwrap().contains("[RESOURCE]") {
                continue;
            }
            a.extend(run(bin().arg("analyze").arg(f).args(["--unf", "--format", "json"]))?);
        }
        analyze_out.push(a);
    }
    check(sample_out[0] == sample_out[1], || "sample output differs".into())?;
    check(rewrite_out[0] == rewrite_out[1], || "rewrite report differs".into())?;
    check(analyze_out[0] == analyze_out[1], || "analyze output differs".into())?;

    let d = load_manifest(&manifest).map_err(|e| e.to_string())?;
    let server = Endpoint::new(d, "127.0.0.1:0", Semantics::Set, Duration::from_secs(10))
        .map_err(|e| e.to_string())?
        .spawn()
        .map_err(|e| e.to_string())?;
    let base = corpus("targets");
    let plan_text = std::fs::read_to_string(base.join("bench.toml"))
        .unwrap()
        .replace("http://127.0.0.1:7878/sparql", &server.url())
        .replace("\"resources.txt\"", &format!("{:?}", base.join("resources.txt")))
        .replace("\"variants/", &format!("\"{}/variants/", base.display()));
    let plan = tmp.path().join("bench.toml");
    std::fs::write(&plan, plan_text).unwrap();
    let mut reports = Vec::new();
    for i in 0..2 {
        let out = tmp.path().join(format!("bench{i}"));
        run(bin().arg("bench").arg(&plan).arg("--out").arg(&out).arg("--quiet"))?;
        reports.push(stable_report(&out)?);
    }
    check(reports[0] == reports[1], || "bench reports differ beyond timings".into())?;
    Ok(format!(
        "{} corpus files + {generated} generated queries round-trip; sample/rewrite/analyze/bench reruns identical",
        files.len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("semantics oracle", criterion_1),
        ("algebra laws", criterion_2),
        ("union normal form and fragment labels", criterion_3),
        ("OPTIONAL minimization", criterion_4),
        ("graph, sequence-path and alternative-URI equivalences", criterion_5),
        ("cartesian reduction", criterion_6),
        ("pagination", criterion_7),
        ("end-to-end harness", criterion_8),
        ("round trip and determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
