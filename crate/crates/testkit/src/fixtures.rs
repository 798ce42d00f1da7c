//! Hand-built datasets with queries, and paths into the repository corpus.

use std::path::PathBuf;

use sparqlopt::dataset::{parse_nquads, Dataset};

pub struct Fixture {
    pub name: &'static str,
    pub dataset: Dataset,
    pub queries: Vec<&'static str>,
}

pub fn dataset_from_nquads(text: &str) -> Dataset {
    let mut d = Dataset::new();
    for q in parse_nquads(text).expect("fixture data parses") {
        d.insert(q.graph.as_deref(), q.triple);
    }
    d
}

pub fn triple_count(d: &Dataset) -> usize {
    let named: usize = d
        .graph_names()
        .map(|g| d.named_graph(g).unwrap().len())
        .sum();
    named.max(d.default_graph().len())
}

pub fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn corpus(rel: &str) -> PathBuf {
    workspace_root().join("corpus").join(rel)
}

const PEOPLE: &str = r#"
<http://ex.org/alice> <http://xmlns.com/foaf/0.1/name> "Alice" .
<http://ex.org/alice> <http://xmlns.com/foaf/0.1/mbox> <mailto:alice@ex.org> .
<http://ex.org/alice> <http://xmlns.com/foaf/0.1/knows> <http://ex.org/bob> .
<http://ex.org/bob> <http://xmlns.com/foaf/0.1/name> "Bob" .
<http://ex.org/bob> <http://xmlns.com/foaf/0.1/knows> <http://ex.org/carol> .
<http://ex.org/carol> <http://xmlns.com/foaf/0.1/name> "Carol" .
<http://ex.org/carol> <http://xmlns.com/foaf/0.1/mbox> <mailto:carol@ex.org> .
<http://ex.org/carol> <http://xmlns.com/foaf/0.1/homepage> <http://carol.example/> .
<http://ex.org/dave> <http://xmlns.com/foaf/0.1/mbox> <mailto:dave@ex.org> .
"#;

const LABELS: &str = r#"
<http://www.example.org#123> <http://www.w3.org/2000/01/rdf-schema#label> "one two three" .
<http://www.example.org#123> <http://www.w3.org/2000/01/rdf-schema#label> "123"@en .
<http://www.example.org#456> <http://www.w3.org/2000/01/rdf-schema#label> "four five six" .
<http://www.example.org#789> <http://www.w3.org/2000/01/rdf-schema#label> "seven eight nine" .
<http://www.example.org#789> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://www.example.org#Number> .
<http://www.example.org#456> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://www.example.org#Number> .
"#;

const CARTESIAN: &str = r#"
_:foo <http://www.w3.org/2000/01/rdf-schema#label> "foo" .
_:foo <http://www.w3.org/2000/01/rdf-schema#label> "bar" .
_:baz <http://www.w3.org/2000/01/rdf-schema#comment> "baz" .
"#;

const TARGETS: &str = r#"
<http://cw.org/t1> <http://www.w3.org/2004/02/skos/core#exactMatch> <http://chembl.org/c1> <http://g.org/links> .
<http://cw.org/t1> <http://www.w3.org/2004/02/skos/core#exactMatch> <http://db.org/b1> <http://g.org/links> .
<http://cw.org/t2> <http://www.w3.org/2004/02/skos/core#exactMatch> <http://chembl.org/c2> <http://g.org/links> .
<http://cw.org/t3> <http://www.w3.org/2004/02/skos/core#exactMatch> <http://db.org/b3> <http://g.org/links> .
<http://chembl.org/c1> <http://www.w3.org/2000/01/rdf-schema#label> "kinase" <http://g.org/chembl> .
<http://chembl.org/c1> <http://www.w3.org/2000/01/rdf-schema#label> "K1" <http://g.org/chembl> .
<http://chembl.org/c2> <http://www.w3.org/2000/01/rdf-schema#label> "receptor" <http://g.org/chembl> .
<http://db.org/b1> <http://db.org/cellularLocation> "Membrane" <http://g.org/drugbank> .
<http://db.org/b3> <http://db.org/cellularLocation> "Nucleus" <http://g.org/drugbank> .
<http://cw.org/t1> <http://www.w3.org/2004/02/skos/core#prefLabel> "Target one" <http://g.org/cw> .
<http://cw.org/t2> <http://www.w3.org/2004/02/skos/core#prefLabel> "Target two" <http://g.org/cw> .
<http://cw.org/t3> <http://www.w3.org/2004/02/skos/core#prefLabel> "Target three" <http://g.org/cw> .
"#;

const CHAIN: &str = r#"
<http://e.org/a> <http://e.org/p> <http://e.org/b> .
<http://e.org/b> <http://e.org/p> <http://e.org/c> .
<http://e.org/c> <http://e.org/p> <http://e.org/a> .
<http://e.org/b> <http://e.org/q> "x" .
<http://e.org/c> <http://e.org/q> "y" .
<http://e.org/c> <http://e.org/q> <http://e.org/a> .
<http://e.org/a> <http://e.org/r> <http://e.org/a> .
"#;

/// Five small datasets, each with queries in the AND/OPT/UNION/FILTER
/// fragment.
pub fn hand_built() -> Vec<Fixture> {
    vec![
        Fixture {
            name: "people",
            dataset: dataset_from_nquads(PEOPLE),
            queries: vec![
                "PREFIX foaf: <http://xmlns.com/foaf/0.1/> SELECT * { ?p foaf:name ?n OPTIONAL { ?p foaf:mbox ?m } }",
                "PREFIX foaf: <http://xmlns.com/foaf/0.1/> SELECT * { { ?p foaf:name ?n OPTIONAL { ?p foaf:mbox ?m } } OPTIONAL { ?p foaf:homepage ?h } }",
                "PREFIX foaf: <http://xmlns.com/foaf/0.1/> SELECT * { ?p foaf:knows ?q OPTIONAL { ?q foaf:mbox ?m FILTER(!bound(?n)) } ?q foaf:name ?n }",
                "PREFIX foaf: <http://xmlns.com/foaf/0.1/> SELECT * { { ?p foaf:name ?n } UNION { ?p foaf:mbox ?m } FILTER(!bound(?n) || ?n != \"Bob\") }",
                "PREFIX foaf: <http://xmlns.com/foaf/0.1/> SELECT * { ?p foaf:mbox ?m OPTIONAL { ?p foaf:name ?n OPTIONAL { ?p foaf:knows ?q } } }",
            ],
        },
        Fixture {
            name: "labels",
            dataset: dataset_from_nquads(LABELS),
            queries: vec![
                "PREFIX ex: <http://www.example.org#> PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#> SELECT ?label { { ex:123 rdfs:label ?label } UNION { ex:456 rdfs:label ?label } }",
                "PREFIX ex: <http://www.example.org#> PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#> SELECT ?label { ?s rdfs:label ?label FILTER(?s = ex:123 || ?s = ex:456) }",
                "PREFIX ex: <http://www.example.org#> PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#> SELECT * { ?s rdfs:label ?l OPTIONAL { ?s a ?t } FILTER(isLiteral(?l) && !bound(?t)) }",
                "PREFIX ex: <http://www.example.org#> PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#> SELECT * { ?s a ex:Number { ?s rdfs:label ?l } UNION { ?s a ?l } }",
            ],
        },
        Fixture {
            name: "cartesian",
            dataset: dataset_from_nquads(CARTESIAN),
            queries: vec![
                "SELECT ?s ?p ?o { ?s ?p ?o }",
                "SELECT * { ?s <http://www.w3.org/2000/01/rdf-schema#label> ?a . ?t <http://www.w3.org/2000/01/rdf-schema#comment> ?b }",
                "SELECT * { ?s ?p ?o OPTIONAL { ?s ?p ?o2 FILTER(?o2 != ?o) } }",
            ],
        },
        Fixture {
            name: "targets",
            dataset: dataset_from_nquads(TARGETS),
            queries: vec![
                "PREFIX skos: <http://www.w3.org/2004/02/skos/core#> PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#> SELECT ?t ?syn ?loc { ?t skos:prefLabel ?l OPTIONAL { ?t skos:exactMatch ?c . ?c rdfs:label ?syn } OPTIONAL { ?t skos:exactMatch ?d . ?d <http://db.org/cellularLocation> ?loc } }",
                "PREFIX skos: <http://www.w3.org/2004/02/skos/core#> SELECT * { GRAPH <http://g.org/cw> { ?t skos:prefLabel ?l } OPTIONAL { GRAPH <http://g.org/links> { ?t skos:exactMatch ?x } } }",
                "PREFIX skos: <http://www.w3.org/2004/02/skos/core#> PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#> SELECT ?t ?syn { ?t skos:exactMatch/rdfs:label ?syn }",
            ],
        },
        Fixture {
            name: "chain",
            dataset: dataset_from_nquads(CHAIN),
            queries: vec![
                "PREFIX e: <http://e.org/> SELECT * { ?a e:p ?b . ?b e:p ?c OPTIONAL { ?c e:q ?d } }",
                "PREFIX e: <http://e.org/> SELECT * { ?a e:p ?b OPTIONAL { ?b e:q ?d } FILTER(!bound(?d) || isIRI(?d)) }",
                "PREFIX e: <http://e.org/> SELECT * { { ?a e:r ?b } UNION { ?a e:p ?b OPTIONAL { ?a e:q ?c } } }",
                "PREFIX e: <http://e.org/> SELECT * { ?a e:p ?b OPTIONAL { ?b e:p ?c OPTIONAL { ?c e:q ?a } } }",
            ],
        },
    ]
}
