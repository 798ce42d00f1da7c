use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::plan::BenchPlan;
use super::runner::{Sample, Status};
use super::stats::{summarize, Summary};
use super::BenchError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub endpoint: String,
    pub timestamp: String,
    pub plan_hash: String,
    pub warmup_ms: Option<f64>,
    /// Set when the run stopped early.
    pub aborted: Option<String>,
    pub baseline: Option<String>,
    pub variants: Vec<VariantReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantReport {
    pub name: String,
    /// Over `ok` samples only.
    pub summary: Summary,
    pub timeouts: usize,
    pub errors: usize,
    pub samples: Vec<Sample>,
}

impl BenchReport {
    pub fn new(
        plan: &BenchPlan,
        samples: Vec<Sample>,
        warmup_ms: Option<f64>,
        aborted: Option<String>,
    ) -> Self {
        let variants = plan
            .variants
            .iter()
            .map(|v| {
                let mine: Vec<Sample> =
                    samples.iter().filter(|s| s.variant == v.name).cloned().collect();
                VariantReport::new(v.name.clone(), mine)
            })
            .collect();
        BenchReport {
            endpoint: plan.endpoint.clone(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            plan_hash: plan.hash(),
            warmup_ms,
            aborted,
            baseline: plan.baseline.clone(),
            variants,
        }
    }

    pub fn variant(&self, name: &str) -> Option<&VariantReport> {
        self.variants.iter().find(|v| v.name == name)
    }

    pub fn protocol_errors(&self) -> usize {
        self.variants.iter().map(|v| v.errors).sum()
    }

    pub fn to_json(&self) -> Result<String, BenchError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes `report.json`, `samples.csv`, `errorbars.csv` and, when the
    /// report names a baseline, `comparison.csv`.
    pub fn write(&self, dir: &Path) -> Result<ReportFiles, BenchError> {
        let io = |path: &Path| {
            let path = path.display().to_string();
            move |source| BenchError::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let json = dir.join("report.json");
        std::fs::write(&json, self.to_json()? + "\n").map_err(io(&json))?;

        let samples = dir.join("samples.csv");
        let mut w = csv::Writer::from_path(&samples)?;
        w.write_record(["variant", "resource", "elapsed_ms", "status"])?;
        for v in &self.variants {
            for s in &v.samples {
                w.write_record([
                    s.variant.as_str(),
                    s.resource.as_str(),
                    &format!("{:.3}", s.elapsed_ms),
                    status_name(s.status),
                ])?;
            }
        }
        w.flush().map_err(io(&samples))?;

        let errorbars = dir.join("errorbars.csv");
        let mut w = csv::Writer::from_path(&errorbars)?;
        w.write_record(["position", "variant", "mean_ms", "min_ms", "max_ms", "ok", "timeouts", "errors"])?;
        for (i, v) in self.variants.iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                v.name.clone(),
                fmt_opt(v.summary.mean),
                fmt_opt(v.summary.min),
                fmt_opt(v.summary.max),
                v.summary.count.to_string(),
                v.timeouts.to_string(),
                v.errors.to_string(),
            ])?;
        }
        w.flush().map_err(io(&errorbars))?;

        let comparison = match &self.baseline {
            Some(b) => {
                let path = dir.join("comparison.csv");
                compare_variants(self, b)?.write_csv(&path)?;
                Some(path)
            }
            None => None,
        };
        Ok(ReportFiles {
            json,
            samples,
            errorbars,
            comparison,
        })
    }
}

impl VariantReport {
    pub fn new(name: String, samples: Vec<Sample>) -> Self {
        let ok: Vec<f64> = samples
            .iter()
            .filter(|s| s.status == Status::Ok)
            .map(|s| s.elapsed_ms)
            .collect();
        VariantReport {
            name,
            summary: summarize(&ok),
            timeouts: samples.iter().filter(|s| s.status == Status::Timeout).count(),
            errors: samples.iter().filter(|s| s.status == Status::Error).count(),
            samples,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportFiles {
    pub json: PathBuf,
    pub samples: PathBuf,
    pub errorbars: PathBuf,
    pub comparison: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub variant: String,
    pub mean_ms: Option<f64>,
    pub max_ms: Option<f64>,
    /// Baseline mean over variant mean; above 1 is faster.
    pub mean_speedup: Option<f64>,
    pub max_speedup: Option<f64>,
    pub regression: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub baseline: String,
    pub rows: Vec<ComparisonRow>,
}

/// Speedup of every variant relative to `baseline`.
pub fn compare_variants(r: &BenchReport, baseline: &str) -> Result<Comparison, BenchError> {
    let base = r
        .variant(baseline)
        .ok_or_else(|| BenchError::UnknownBaseline(baseline.to_string()))?;
    let ratio = |b: Option<f64>, v: Option<f64>| match (b, v) {
        (Some(b), Some(v)) if v > 0.0 => Some(b / v),
        (Some(b), Some(v)) if b == v => Some(1.0),
        _ => None,
    };
    let rows = r
        .variants
        .iter()
        .map(|v| {
            let mean_speedup = ratio(base.summary.mean, v.summary.mean);
            ComparisonRow {
                variant: v.name.clone(),
                mean_ms: v.summary.mean,
                max_ms: v.summary.max,
                mean_speedup,
                max_speedup: ratio(base.summary.max, v.summary.max),
                regression: mean_speedup.is_some_and(|s| s < 1.0),
            }
        })
        .collect();
    Ok(Comparison {
        baseline: baseline.to_string(),
        rows,
    })
}

impl Comparison {
    /// Plain-text table.
    pub fn render(&self) -> String {
        let width = self
            .rows
            .iter()
            .map(|r| r.variant.len())
            .max()
            .unwrap_or(0)
            .max("variant".len());
        let mut out = format!(
            "baseline: {}\n{:<width$}  {:>12}  {:>12}  {:>9}  {:>9}\n",
            self.baseline, "variant", "mean_ms", "max_ms", "mean_x", "max_x"
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:<width$}  {:>12}  {:>12}  {:>9}  {:>9}{}\n",
                r.variant,
                fmt_opt(r.mean_ms),
                fmt_opt(r.max_ms),
                fmt_opt(r.mean_speedup),
                fmt_opt(r.max_speedup),
                if r.regression { "  regression" } else { "" }
            ));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), BenchError> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["variant", "mean_ms", "max_ms", "mean_speedup", "max_speedup", "regression"])?;
        for r in &self.rows {
            w.write_record([
                r.variant.clone(),
                fmt_opt(r.mean_ms),
                fmt_opt(r.max_ms),
                fmt_opt(r.mean_speedup),
                fmt_opt(r.max_speedup),
                r.regression.to_string(),
            ])?;
        }
        w.flush().map_err(|source| BenchError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.3}")).unwrap_or_default()
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Ok => "ok",
        Status::Timeout => "timeout",
        Status::Error => "error",
    }
}
