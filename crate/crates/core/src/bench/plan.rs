use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::BenchError;
use crate::syntax::{instantiate_with, QueryTemplate};

/// Issued once before a run when `warmup` is set.
pub const WARMUP_QUERY: &str = "SELECT ( COUNT ( DISTINCT * ) AS ?count ) WHERE { ?s ?p ?o }";

/// A benchmark plan. In the TOML form `template_file` and `resources_file`
/// may replace the inline fields; paths are relative to the plan file.
///
/// ```toml
/// endpoint = "http://127.0.0.1:7878/sparql"
/// timeout_ms = 5000
/// resources = ["http://example.org/t1", "http://example.org/t2"]
///
/// [[variant]]
/// name = "Initial Query"
/// template = "SELECT * WHERE { [RESOURCE] ?p ?o }"
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchPlan {
    pub endpoint: String,
    #[serde(rename = "variant")]
    pub variants: Vec<VariantSpec>,
    #[serde(default)]
    pub resources: Vec<String>,
    /// Alternative-URI set sizes. When non-empty each job binds `[RESOURCES]`
    /// to the first `k` resources instead of one job per resource.
    #[serde(default)]
    pub set_sizes: Vec<usize>,
    #[serde(default = "yes")]
    pub warmup: bool,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
    #[serde(default = "one")]
    pub repetitions: usize,
    #[serde(default = "one")]
    pub concurrency: usize,
    #[serde(default)]
    pub baseline: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantSpec {
    pub name: String,
    pub template: QueryTemplate,
}

fn yes() -> bool {
    true
}

fn one() -> usize {
    1
}

fn default_timeout_ms() -> u64 {
    30 * 60 * 1000
}

#[derive(Deserialize)]
struct RawPlan {
    endpoint: String,
    #[serde(default)]
    resources: Vec<String>,
    #[serde(default)]
    resources_file: Option<PathBuf>,
    #[serde(default)]
    set_sizes: Vec<usize>,
    #[serde(default = "yes")]
    warmup: bool,
    #[serde(default = "default_timeout_ms")]
    timeout_ms: u64,
    #[serde(default = "one")]
    repetitions: usize,
    #[serde(default = "one")]
    concurrency: usize,
    #[serde(default)]
    baseline: Option<String>,
    #[serde(rename = "variant", default)]
    variants: Vec<RawVariant>,
}

#[derive(Deserialize)]
struct RawVariant {
    name: String,
    template: Option<String>,
    template_file: Option<PathBuf>,
}

/// One unit of work: a label and the placeholder bindings.
#[derive(Clone, Debug)]
pub(crate) struct Job {
    pub resource: String,
    pub one: String,
    pub all: String,
}

impl BenchPlan {
    pub fn from_toml(text: &str, base: &Path) -> Result<Self, BenchError> {
        let raw: RawPlan = toml::from_str(text).map_err(|e| BenchError::Plan(e.to_string()))?;
        let read = |p: &Path| {
            let path = base.join(p);
            std::fs::read_to_string(&path).map_err(|source| BenchError::Io {
                path: path.display().to_string(),
                source,
            })
        };
        let mut resources = raw.resources;
        if let Some(f) = &raw.resources_file {
            resources.extend(
                read(f)?
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#'))
                    .map(|l| l.trim_start_matches('<').trim_end_matches('>').to_string()),
            );
        }
        let mut variants = Vec::new();
        for v in raw.variants {
            let text = match (v.template, v.template_file) {
                (Some(t), None) => t,
                (None, Some(f)) => read(&f)?,
                _ => {
                    return Err(BenchError::Plan(format!(
                        "variant `{}` needs exactly one of template, template_file",
                        v.name
                    )))
                }
            };
            variants.push(VariantSpec {
                name: v.name,
                template: QueryTemplate::new(text),
            });
        }
        let plan = BenchPlan {
            endpoint: raw.endpoint,
            variants,
            resources,
            set_sizes: raw.set_sizes,
            warmup: raw.warmup,
            timeout_ms: raw.timeout_ms,
            repetitions: raw.repetitions,
            concurrency: raw.concurrency,
            baseline: raw.baseline,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
            path: path.display().to_string(),
            source,
        })?;
        BenchPlan::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_millis(self.timeout_ms)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::Plan(m));
        if self.timeout_ms == 0 {
            return bad("timeout_ms must be positive".into());
        }
        if self.repetitions == 0 || self.concurrency == 0 {
            return bad("repetitions and concurrency must be positive".into());
        }
        if self.variants.is_empty() {
            return bad("no variants".into());
        }
        let mut names = BTreeSet::new();
        for v in &self.variants {
            if !names.insert(&v.name) {
                return bad(format!("duplicate variant `{}`", v.name));
            }
        }
        if let Some(b) = &self.baseline {
            if !names.contains(b) {
                return Err(BenchError::UnknownBaseline(b.clone()));
            }
        }
        for r in &self.resources {
            if !is_valid_iri(r) {
                return bad(format!("resource `{r}` is not a valid IRI"));
            }
        }
        if let Some(&k) = self.set_sizes.iter().find(|&&k| k == 0 || k > self.resources.len()) {
            return bad(format!(
                "set size {k} outside 1..={} resources",
                self.resources.len()
            ));
        }
        for j in self.jobs().iter().take(1) {
            for v in &self.variants {
                j.instantiate(&v.template).map_err(|source| BenchError::Template {
                    variant: v.name.clone(),
                    source,
                })?;
            }
        }
        Ok(())
    }

    /// SHA-256 of the plan's canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("plan serializes");
        hex::encode(Sha256::digest(&json))
    }

    pub(crate) fn jobs(&self) -> Vec<Job> {
        let iri = |r: &str| format!("<{r}>");
        if self.set_sizes.is_empty() {
            return self
                .resources
                .iter()
                .map(|r| Job {
                    resource: r.clone(),
                    one: iri(r),
                    all: iri(r),
                })
                .collect();
        }
        self.set_sizes
            .iter()
            .map(|&k| Job {
                resource: format!("set of {k}"),
                one: iri(&self.resources[0]),
                all: self.resources[..k].iter().map(|r| iri(r)).collect::<Vec<_>>().join(" "),
            })
            .collect()
    }
}

impl Job {
    pub fn instantiate(
        &self,
        t: &QueryTemplate,
    ) -> Result<String, crate::syntax::TemplateError> {
        instantiate_with(t, |name| match name {
            "RESOURCE" => Some(self.one.clone()),
            "RESOURCES" => Some(self.all.clone()),
            _ => None,
        })
    }
}

fn is_valid_iri(s: &str) -> bool {
    let Some((scheme, rest)) = s.split_once(':') else {
        return false;
    };
    let mut chars = scheme.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || "+-.".contains(c))
        && !rest.is_empty()
        && !s
            .chars()
            .any(|c| c.is_whitespace() || c.is_control() || "<>\"{}|^`\\".contains(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLAN: &str = r#"
endpoint = "http://localhost:1/sparql"
resources = ["http://ex.org/a", "http://ex.org/b"]

[[variant]]
name = "Initial Query"
template = "SELECT * WHERE { [RESOURCE] ?p ?o }"
"#;

    #[test]
    fn defaults() {
        let p = BenchPlan::from_toml(PLAN, Path::new(".")).unwrap();
        assert_eq!(p.timeout(), Duration::from_secs(1800));
        assert!(p.warmup);
        assert_eq!(p.repetitions, 1);
        assert_eq!(p.jobs().len(), 2);
    }

    #[test]
    fn invalid_iri_rejected() {
        let text = PLAN.replace("http://ex.org/b", "not an iri");
        assert!(matches!(
            BenchPlan::from_toml(&text, Path::new(".")),
            Err(BenchError::Plan(_))
        ));
    }

    #[test]
    fn zero_timeout_rejected() {
        let text = format!("timeout_ms = 0\n{PLAN}");
        assert!(BenchPlan::from_toml(&text, Path::new(".")).is_err());
    }

    #[test]
    fn set_sizes_bind_resources() {
        let text = format!(
            "set_sizes = [1, 2]\n{}",
            PLAN.replace("[RESOURCE] ?p ?o", "VALUES ?s { [RESOURCES] } ?s ?p ?o")
        );
        let p = BenchPlan::from_toml(&text, Path::new(".")).unwrap();
        let jobs = p.jobs();
        assert_eq!(jobs.len(), 2);
        let q = jobs[1].instantiate(&p.variants[0].template).unwrap();
        assert!(q.contains("VALUES ?s { <http://ex.org/a> <http://ex.org/b> }"));
    }

    #[test]
    fn hash_is_stable() {
        let p = BenchPlan::from_toml(PLAN, Path::new(".")).unwrap();
        assert_eq!(p.hash(), p.clone().hash());
        assert_eq!(p.hash().len(), 64);
    }
}
