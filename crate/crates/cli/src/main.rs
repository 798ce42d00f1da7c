use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use sparqlopt::algebra::{evaluate_query, QueryResult, Semantics};
use sparqlopt::analysis::analyze;
use sparqlopt::bench::{compare_variants, run_benchmark_with, sample_resources, BenchPlan, SparqlClient, Status};
use sparqlopt::dataset::{load, load_manifest, Dataset, DefaultGraph, FileFormat, ProvenanceMap, Source};
use sparqlopt::endpoint::{Endpoint, EndpointConfig};
use sparqlopt::rewrite::{
    localize_graphs, merge_sequence_paths, minimize_optionals, reduce_cartesian,
    rewrite_alternatives, view_variants, AlternativeForm, AskExecutor, AskProbe, ProbeError,
    RewriteReport, ViewSpec,
};
use sparqlopt::syntax::{
    parse_template, render_template, Query, QueryTemplate, Term, Variable,
};

#[derive(Parser)]
#[command(name = "sparqlopt", version, about = "SPARQL query analysis, rewriting and benchmarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a query or template and optionally print its canonical form.
    Parse {
        file: PathBuf,
        #[arg(long)]
        canonical: bool,
    },
    /// Well-designedness, UNION normal form and complexity fragment.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        unf: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Apply rewrite heuristics in the given order.
    Rewrite {
        file: Option<PathBuf>,
        /// Comma-separated: optional, graph, seqpath, alternatives, aggregate, or none.
        #[arg(long)]
        heuristics: Option<String>,
        /// View spec (TOML) naming the core elements.
        #[arg(long)]
        view: Option<PathBuf>,
        /// `local:<manifest or data file>` or `remote:<endpoint url>`.
        #[arg(long)]
        probe: Option<String>,
        /// Predicate-to-graph map (TOML).
        #[arg(long)]
        provenance: Option<PathBuf>,
        #[arg(long)]
        target: Option<AlternativeForm>,
        /// Comma-separated variables to collapse with GROUP_CONCAT.
        #[arg(long)]
        aggregate: Option<String>,
        #[arg(long, default_value = ", ")]
        separator: String,
        /// Write the five view variants as templates into this directory.
        #[arg(long)]
        variants: Option<PathBuf>,
        /// Also write the rewrite report (JSON) to this file.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run a benchmark plan against a SPARQL endpoint.
    Bench {
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Variant used as the comparison baseline (default: plan baseline or first variant).
        #[arg(long)]
        baseline: Option<String>,
        #[arg(long)]
        quiet: bool,
    },
    /// Serve a dataset over the SPARQL protocol until interrupted.
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        addr: Option<String>,
        #[arg(long, value_enum)]
        semantics: Option<SemanticsArg>,
        #[arg(long)]
        timeout_ms: Option<u64>,
    },
    /// Draw a seeded uniform sample of resources of one rdf:type.
    Sample {
        /// Manifest (.toml) or an N-Triples / N-Quads file.
        data: PathBuf,
        #[arg(long = "type")]
        type_iri: String,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SemanticsArg {
    Set,
    Bag,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Parse { file, canonical } => cmd_parse(&file, canonical),
        Command::Analyze { file, unf, format } => cmd_analyze(&file, unf, format),
        Command::Rewrite {
            file,
            heuristics,
            view,
            probe,
            provenance,
            target,
            aggregate,
            separator,
            variants,
            report,
            format,
        } => {
            let opts = RewriteOpts {
                view: view.as_deref().map(read_view).transpose()?,
                probe,
                provenance: provenance.as_deref().map(read_provenance).transpose()?,
                target,
                aggregate: aggregate.as_deref().map(parse_vars).unwrap_or_default(),
                separator,
            };
            if let Some(dir) = variants {
                return cmd_variants(&opts, &dir, report.as_deref());
            }
            let file = file.ok_or_else(|| anyhow!("a query file is required unless --variants is given"))?;
            cmd_rewrite(&file, heuristics.as_deref(), &opts, report.as_deref(), format)
        }
        Command::Bench {
            plan,
            out,
            baseline,
            quiet,
        } => cmd_bench(&plan, &out, baseline, quiet),
        Command::Serve {
            config,
            manifest,
            addr,
            semantics,
            timeout_ms,
        } => cmd_serve(config, manifest, addr, semantics, timeout_ms),
        Command::Sample {
            data,
            type_iri,
            count,
            seed,
            format,
        } => cmd_sample(&data, &type_iri, count, seed, format),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_template(path: &Path) -> Result<(Query, BTreeMap<Variable, String>)> {
    let t = QueryTemplate::new(read(path)?);
    parse_template(&t).with_context(|| format!("{}", path.display()))
}

fn cmd_parse(file: &Path, canonical: bool) -> Result<ExitCode> {
    let (q, table) = read_template(file)?;
    if canonical {
        print!("{}", render_template(&q, &table).text);
    } else {
        println!(
            "ok: {:?} query, {} triple pattern(s), {} placeholder(s)",
            q.form,
            q.pattern.triple_patterns().len(),
            table.len()
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_analyze(file: &Path, unf: bool, format: Format) -> Result<ExitCode> {
    let (q, _) = read_template(file)?;
    let report = analyze(&q, unf);
    match format {
        Format::Text => print!("{}", report.render_text()),
        Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(ExitCode::SUCCESS)
}

struct RewriteOpts {
    view: Option<ViewSpec>,
    probe: Option<String>,
    provenance: Option<ProvenanceMap>,
    target: Option<AlternativeForm>,
    aggregate: Vec<Variable>,
    separator: String,
}

fn read_view(path: &Path) -> Result<ViewSpec> {
    ViewSpec::from_toml(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn read_provenance(path: &Path) -> Result<ProvenanceMap> {
    toml::from_str(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn parse_vars(s: &str) -> Vec<Variable> {
    s.split([',', ' '])
        .filter(|v| !v.is_empty())
        .map(Variable::new)
        .collect()
}

fn load_data(path: &Path) -> Result<Dataset> {
    let is_manifest = path.extension().is_some_and(|e| e == "toml");
    let d = if is_manifest {
        load_manifest(path)?
    } else {
        load(
            &[Source {
                path: path.to_path_buf(),
                format: FileFormat::from_path(path),
                graph: None,
            }],
            DefaultGraph::Union,
        )?
    };
    Ok(d)
}

enum Probe {
    Local(Box<Dataset>),
    Remote(SparqlClient),
}

impl AskExecutor for Probe {
    fn ask(&self, q: &Query) -> Result<bool, ProbeError> {
        match self {
            Probe::Local(d) => match evaluate_query(q, d) {
                Ok(QueryResult::Boolean(b)) => Ok(b),
                Ok(_) => Err(ProbeError("probe is not an ASK query".into())),
                Err(e) => Err(ProbeError(e.to_string())),
            },
            Probe::Remote(c) => c.ask(q),
        }
    }
}

fn open_probe(spec: Option<&str>) -> Result<Probe> {
    let spec = spec.ok_or_else(|| anyhow!("--probe is required for the optional heuristic"))?;
    if let Some(path) = spec.strip_prefix("local:") {
        Ok(Probe::Local(Box::new(load_data(Path::new(path))?)))
    } else if let Some(url) = spec.strip_prefix("remote:") {
        Ok(Probe::Remote(SparqlClient::new(url, Duration::from_secs(1800))?))
    } else {
        bail!("--probe must be local:<path> or remote:<url>, got `{spec}`")
    }
}

const DEFAULT_ORDER: [&str; 5] = ["optional", "graph", "seqpath", "alternatives", "aggregate"];

fn heuristic_list(given: Option<&str>, opts: &RewriteOpts) -> Result<Vec<String>> {
    let Some(given) = given else {
        return Ok(DEFAULT_ORDER
            .iter()
            .filter(|h| match **h {
                "optional" => opts.view.is_some(),
                "graph" => opts.provenance.is_some(),
                "alternatives" => opts.target.is_some(),
                "aggregate" => !opts.aggregate.is_empty(),
                _ => true,
            })
            .map(|h| h.to_string())
            .collect());
    };
    let mut out = Vec::new();
    for h in given.split(',').map(str::trim).filter(|h| !h.is_empty()) {
        let name = match h {
            "none" => continue,
            "optional" | "minimize-optionals" => "optional",
            "graph" | "localize-graphs" => "graph",
            "seqpath" | "sequence-paths" => "seqpath",
            "alternatives" => "alternatives",
            "aggregate" | "group-concat" => "aggregate",
            other => bail!("unknown heuristic `{other}`"),
        };
        out.push(name.to_string());
    }
    Ok(out)
}

fn cmd_rewrite(
    file: &Path,
    heuristics: Option<&str>,
    opts: &RewriteOpts,
    report_path: Option<&Path>,
    format: Format,
) -> Result<ExitCode> {
    let (mut q, table) = read_template(file)?;
    let mut reports: Vec<RewriteReport> = Vec::new();
    let mut probe: Option<AskProbe<Probe>> = None;
    for h in heuristic_list(heuristics, opts)? {
        let r = match h.as_str() {
            "optional" => {
                let view = opts
                    .view
                    .as_ref()
                    .ok_or_else(|| anyhow!("--view is required for the optional heuristic"))?;
                if probe.is_none() {
                    probe = Some(AskProbe::new(open_probe(opts.probe.as_deref())?));
                }
                let probe = probe.as_mut().expect("set above");
                let mut core = view.core_pattern()?;
                let resource = Term::from(view.resource());
                if let Some((placeholder, _)) = table.iter().find(|(_, n)| *n == "RESOURCE") {
                    let placeholder = Term::from(placeholder.clone());
                    core.map_terms(&mut |t| {
                        if *t == resource {
                            *t = placeholder.clone();
                        }
                    });
                }
                let before = probe.executed();
                let m = minimize_optionals(&q.pattern, &core, probe, &q.prefixes)?;
                let mut report = RewriteReport {
                    heuristic: "optional".into(),
                    ..RewriteReport::default()
                };
                for d in &m.decisions {
                    report.actions.push(format!(
                        "{} -> {} (probe answered {})",
                        d.pattern,
                        serde_json::to_value(&d.placement)?["kind"].as_str().unwrap_or(""),
                        d.answer
                    ));
                }
                report
                    .actions
                    .push(format!("{} probe(s) executed", probe.executed() - before));
                let mut out = m.query;
                out.projection = q.projection.clone();
                out.distinct = q.distinct;
                out.order_by = q.order_by.clone();
                out.limit = q.limit;
                out.offset = q.offset;
                q = out;
                report
            }
            "graph" => {
                let prov = opts
                    .provenance
                    .as_ref()
                    .ok_or_else(|| anyhow!("--provenance is required for the graph heuristic"))?;
                let mut r = localize_graphs(&q, prov);
                if let Some(Probe::Local(d)) = probe.as_ref().map(AskProbe::executor) {
                    for v in prov.validate(d) {
                        r.report.warnings.push(format!(
                            "provenance map invalid for <{}> in <{}>: {} missing, {} extra",
                            v.predicate, v.graph, v.missing_from_graph, v.extra_in_graph
                        ));
                    }
                }
                q = r.query;
                r.report
            }
            "seqpath" => {
                let r = merge_sequence_paths(&q);
                q = r.query;
                r.report
            }
            "alternatives" => {
                let target = opts
                    .target
                    .ok_or_else(|| anyhow!("--target is required for the alternatives heuristic"))?;
                let r = rewrite_alternatives(&q, target)?;
                q = r.query;
                r.report
            }
            "aggregate" => {
                let r = reduce_cartesian(&q, &opts.aggregate, &opts.separator)?;
                q = r.query;
                r.report
            }
            _ => unreachable!("validated by heuristic_list"),
        };
        reports.push(r);
    }
    let text = render_template(&q, &table).text;
    let report_json = serde_json::to_string_pretty(&reports)?;
    if let Some(p) = report_path {
        std::fs::write(p, report_json + "\n").with_context(|| format!("writing {}", p.display()))?;
    }
    match format {
        Format::Text => {
            print!("{text}");
            for r in &reports {
                for w in &r.warnings {
                    eprintln!("warning [{}]: {w}", r.heuristic);
                }
            }
        }
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({"query": text, "reports": reports}))?
        ),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_variants(opts: &RewriteOpts, dir: &Path, report_path: Option<&Path>) -> Result<ExitCode> {
    let view = opts
        .view
        .as_ref()
        .ok_or_else(|| anyhow!("--variants needs --view"))?;
    let mut probe = AskProbe::new(open_probe(opts.probe.as_deref())?);
    let prov = opts.provenance.clone().unwrap_or_default();
    let variants = view_variants(view, &prov, &mut probe)?;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for v in &variants {
        let name = v.name.to_ascii_lowercase().replace(' ', "-");
        let path = dir.join(format!("{name}.rq"));
        std::fs::write(&path, &v.template.text).with_context(|| format!("writing {}", path.display()))?;
        println!("{}\t{}", v.name, path.display());
    }
    if let Some(p) = report_path {
        let report = json!({
            "variants": variants.iter().map(|v| json!({"name": v.name, "template": v.template.text})).collect::<Vec<_>>(),
            "probes": probe.log(),
        });
        std::fs::write(p, serde_json::to_string_pretty(&report)? + "\n")
            .with_context(|| format!("writing {}", p.display()))?;
    }
    eprintln!("{} probe(s) executed", probe.executed());
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(plan_path: &Path, out: &Path, baseline: Option<String>, quiet: bool) -> Result<ExitCode> {
    let plan = BenchPlan::load(plan_path)?;
    let mut n = 0usize;
    let report = run_benchmark_with(&plan, &mut |s| {
        n += 1;
        if !quiet {
            let status = match s.status {
                Status::Ok => "ok",
                Status::Timeout => "timeout",
                Status::Error => "error",
            };
            eprintln!("[{n}] {} {} {:.1} ms {status}", s.variant, s.resource, s.elapsed_ms);
        }
    })?;
    let mut report = report;
    let baseline = baseline
        .or_else(|| plan.baseline.clone())
        .unwrap_or_else(|| plan.variants[0].name.clone());
    report.baseline = Some(baseline.clone());
    let files = report.write(out)?;
    let comparison = compare_variants(&report, &baseline)?;
    let mut stdout = std::io::stdout().lock();
    for v in &report.variants {
        let f = |x: Option<f64>| x.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into());
        writeln!(
            stdout,
            "{}: n={} mean={} min={} max={} timeouts={} errors={}",
            v.name,
            v.summary.count,
            f(v.summary.mean),
            f(v.summary.min),
            f(v.summary.max),
            v.timeouts,
            v.errors
        )?;
    }
    write!(stdout, "{}", comparison.render())?;
    writeln!(stdout, "report: {}", files.json.display())?;
    if let Some(reason) = &report.aborted {
        eprintln!("error: run aborted: {reason}");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_serve(
    config: Option<PathBuf>,
    manifest: Option<PathBuf>,
    addr: Option<String>,
    semantics: Option<SemanticsArg>,
    timeout_ms: Option<u64>,
) -> Result<ExitCode> {
    let mut cfg = match (&config, &manifest) {
        (Some(c), _) => EndpointConfig::load(c)?,
        (None, Some(m)) => EndpointConfig {
            addr: "127.0.0.1:7878".into(),
            manifest: m.clone(),
            semantics: Semantics::Set,
            timeout_ms: 30_000,
        },
        (None, None) => bail!("serve needs --config or --manifest"),
    };
    if config.is_some() {
        if let Some(m) = manifest {
            cfg.manifest = m;
        }
    }
    if let Some(a) = addr {
        cfg.addr = a;
    }
    if let Some(s) = semantics {
        cfg.semantics = match s {
            SemanticsArg::Set => Semantics::Set,
            SemanticsArg::Bag => Semantics::Bag,
        };
    }
    if let Some(t) = timeout_ms {
        cfg.timeout_ms = t;
    }
    let endpoint = Endpoint::from_config(&cfg)?;
    println!("listening on {}", endpoint.url());
    std::io::stdout().flush()?;
    endpoint.serve()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sample(data: &Path, type_iri: &str, count: usize, seed: u64, format: Format) -> Result<ExitCode> {
    let d = load_data(data)?;
    let s = sample_resources(&d, type_iri, count, seed);
    eprintln!("seed: {seed}; population: {}", s.population);
    if let Some(w) = &s.warning {
        eprintln!("warning: {w}");
    }
    match format {
        Format::Text => {
            let mut out = std::io::stdout().lock();
            for r in &s.resources {
                writeln!(out, "{}", r.as_iri().unwrap_or(r.lexical()))?;
            }
        }
        Format::Json => println!("{}", serde_json::to_string_pretty(&s)?),
    }
    Ok(ExitCode::SUCCESS)
}
