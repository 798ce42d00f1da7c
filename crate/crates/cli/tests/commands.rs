use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

use sparqlopt::algebra::Semantics;
use sparqlopt::bench::SparqlClient;
use sparqlopt::dataset::load_manifest;
use sparqlopt::endpoint::Endpoint;
use sparqlopt::syntax::{parse_template, QueryTemplate};

fn corpus(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel)
}

fn sparqlopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparqlopt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = sparqlopt(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn same_query(a: &str, b: &str) -> bool {
    let parse = |t: &str| parse_template(&QueryTemplate::new(t)).unwrap().0;
    parse(a) == parse(b)
}

#[test]
fn canonical_form_is_a_fixed_point() {
    for entry in std::fs::read_dir(corpus("queries")).unwrap() {
        let file = entry.unwrap().path();
        if file.extension().is_none_or(|e| e != "rq") {
            continue;
        }
        let once = ok(&["parse", path(&file), "--canonical"]);
        let tmp = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(tmp.path(), &once).unwrap();
        let twice = ok(&["parse", path(tmp.path()), "--canonical"]);
        assert_eq!(once, twice, "{}", file.display());
    }
}

#[test]
fn parse_reports_syntax_errors() {
    let tmp = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(tmp.path(), "SELECT * WHERE { ?s ?p }").unwrap();
    let out = sparqlopt(&["parse", path(tmp.path())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn analyze_labels_corpus_queries() {
    let label = |rel: &str| {
        let json: serde_json::Value =
            serde_json::from_str(&ok(&["analyze", path(&corpus(rel)), "--format", "json"])).unwrap();
        json["fragment"]["label"].as_str().unwrap().to_string()
    };
    assert_eq!(label("queries/alternatives-union.rq"), "PTIME");
    assert_eq!(label("queries/alternatives-filter.rq"), "PTIME");
    assert_eq!(label("targets/variants/naive-optional.rq"), "coNP-complete-wd-UNF");
}

#[test]
fn sequence_paths_merge_chains_only() {
    let merged = std::fs::read_to_string(corpus("queries/seqpath-merged.rq")).unwrap();
    let out = ok(&["rewrite", path(&corpus("queries/seqpath-chained.rq")), "--heuristics", "seqpath"]);
    assert!(same_query(&out, &merged), "{out}");

    let out = ok(&["rewrite", path(&corpus("queries/seqpath-original.rq")), "--heuristics", "seqpath"]);
    assert!(out.contains("[RESOURCE] rdfs:label ?synonym"), "{out}");
    assert!(out.contains("skos:exactMatch/db:cellularLocation"), "{out}");
    assert!(!out.contains("exactMatch/rdfs:label"), "{out}");
}

#[test]
fn no_heuristics_is_the_identity() {
    let file = corpus("queries/alternatives-union.rq");
    let canonical = ok(&["parse", path(&file), "--canonical"]);
    assert_eq!(ok(&["rewrite", path(&file), "--heuristics", "none"]), canonical);
}

#[test]
fn alternatives_and_aggregate_from_the_command_line() {
    let values = ok(&[
        "rewrite",
        path(&corpus("queries/alternatives-union.rq")),
        "--heuristics",
        "alternatives",
        "--target",
        "values",
    ]);
    assert!(values.contains("VALUES"));
    let expected = std::fs::read_to_string(corpus("queries/alternatives-values.rq")).unwrap();
    assert!(same_query(&values, &expected), "{values}");

    let agg = ok(&[
        "rewrite",
        path(&corpus("queries/cartesian.rq")),
        "--aggregate",
        "o",
        "--format",
        "json",
    ]);
    let json: serde_json::Value = serde_json::from_str(&agg).unwrap();
    assert!(json["query"].as_str().unwrap().contains("GROUP_CONCAT"));
    let reports = json["reports"].as_array().unwrap();
    assert!(reports.iter().any(|r| r["heuristic"] == "aggregate"));
}

#[test]
fn unknown_heuristic_fails() {
    let out = sparqlopt(&["rewrite", path(&corpus("queries/cartesian.rq")), "--heuristics", "magic"]);
    assert!(!out.status.success());
}

#[test]
fn sampling_is_reproducible() {
    let manifest = corpus("targets/manifest.toml");
    let args = [
        "sample",
        path(&manifest),
        "--type",
        "http://example.org/Target",
        "--count",
        "20",
        "--seed",
        "42",
    ];
    let first = ok(&args);
    assert_eq!(first, ok(&args));
    let listed = std::fs::read_to_string(corpus("targets/resources.txt")).unwrap();
    assert_eq!(first.trim(), listed.trim());
    let other = ok(&["sample", path(&manifest), "--type", "http://example.org/Target", "--count", "20", "--seed", "7"]);
    assert_ne!(first, other);
}

#[test]
fn bench_writes_reports() {
    let d = load_manifest(&corpus("targets/manifest.toml")).unwrap();
    let server = Endpoint::new(d, "127.0.0.1:0", Semantics::Set, Duration::from_secs(10))
        .unwrap()
        .spawn()
        .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.toml");
    let initial = std::fs::read_to_string(corpus("targets/variants/initial-query.rq")).unwrap();
    let optimised = std::fs::read_to_string(corpus("targets/variants/optimised-optional.rq")).unwrap();
    std::fs::write(
        &plan,
        format!(
            "endpoint = {:?}\nresources = [\"http://www.conceptwiki.org/concept/t001\", \"http://www.conceptwiki.org/concept/t002\"]\n\
             [[variant]]\nname = \"Initial Query\"\ntemplate = {:?}\n\
             [[variant]]\nname = \"Optimised Optional\"\ntemplate = {:?}\n",
            server.url(),
            initial,
            optimised
        ),
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let stdout = ok(&["bench", path(&plan), "--out", path(&out_dir), "--quiet", "--baseline", "Initial Query"]);
    assert!(stdout.contains("Optimised Optional"));
    for f in ["report.json", "samples.csv", "errorbars.csv", "comparison.csv"] {
        assert!(out_dir.join(f).exists(), "{f} missing");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["variants"].as_array().unwrap().len(), 2);
}

#[test]
fn serve_answers_queries() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let addr = format!("127.0.0.1:{port}");
    let mut child = Command::new(env!("CARGO_BIN_EXE_sparqlopt"))
        .args(["serve", "--manifest", path(&corpus("targets/manifest.toml")), "--addr", &addr])
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let client = SparqlClient::new(format!("http://{addr}/sparql"), Duration::from_secs(5)).unwrap();
    let deadline = Instant::now() + Duration::from_secs(20);
    let answer = loop {
        match client.execute("ASK { ?s a <http://example.org/Target> }") {
            Ok(r) => break r,
            Err(e) if Instant::now() > deadline => panic!("endpoint never came up: {e}"),
            Err(_) => std::thread::sleep(Duration::from_millis(50)),
        }
    };
    child.kill().unwrap();
    child.wait().unwrap();
    assert_eq!(answer.boolean(), Some(true));
}

#[test]
fn serve_rejects_a_missing_manifest() {
    let out = sparqlopt(&["serve", "--manifest", "/nonexistent/manifest.toml", "--addr", "127.0.0.1:0"]);
    assert!(!out.status.success());
}

#[test]
fn serve_rejects_a_busy_port() {
    let busy = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = busy.local_addr().unwrap().to_string();
    let out = sparqlopt(&["serve", "--manifest", path(&corpus("targets/manifest.toml")), "--addr", &addr]);
    assert!(!out.status.success());
    drop(busy);
}
