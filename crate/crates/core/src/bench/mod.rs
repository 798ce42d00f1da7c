//! Benchmark harness for SPARQL-protocol endpoints.

mod client;
mod plan;
mod report;
mod runner;
mod sample;
mod stats;

pub use client::{ClientError, Response, SparqlClient};
pub use plan::{BenchPlan, VariantSpec, WARMUP_QUERY};
pub use report::{compare_variants, BenchReport, Comparison, ComparisonRow, ReportFiles, VariantReport};
pub use runner::{run_benchmark, run_benchmark_with, Sample, Status};
pub use sample::{sample_resources, type_population, SampleOutcome};
pub use stats::{summarize, Summary};

use crate::syntax::TemplateError;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid bench plan: {0}")]
    Plan(String),
    #[error("template for variant `{variant}`: {source}")]
    Template {
        variant: String,
        source: TemplateError,
    },
    #[error("unknown baseline variant `{0}`")]
    UnknownBaseline(String),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Client(#[from] ClientError),
}
