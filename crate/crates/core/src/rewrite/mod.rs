//! Query rewrites: OPTIONAL minimization, GRAPH localization, sequence
//! paths, GROUP_CONCAT aggregation, alternative-URI forms and pagination.

mod alternatives;
mod cartesian;
mod localize;
mod optional;
mod pagination;
mod seqpath;
mod variants;
mod view;

use serde::Serialize;

use crate::syntax::{ParseError, Query, Variable};

pub use alternatives::{rewrite_alternatives, AlternativeForm};
pub use cartesian::reduce_cartesian;
pub use localize::localize_graphs;
pub use optional::{
    minimize_optionals, AskExecutor, AskProbe, Decision, LocalExecutor, Minimized, Placement,
    ProbeError, ProbeRecord,
};
pub use pagination::{generate_pagination, page_skeleton, Pagination};
pub use seqpath::merge_sequence_paths;
pub use variants::{naive_optional, view_variants, Variant, VARIANT_NAMES};
pub use view::{ViewElement, ViewSpec};

/// A rewritten query with a log of what changed.
#[derive(Clone, Debug)]
pub struct Rewritten {
    pub query: Query,
    pub report: RewriteReport,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RewriteReport {
    pub heuristic: String,
    pub actions: Vec<String>,
    pub warnings: Vec<String>,
}

impl RewriteReport {
    pub(crate) fn new(heuristic: &str) -> Self {
        RewriteReport {
            heuristic: heuristic.to_string(),
            ..RewriteReport::default()
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RewriteError {
    #[error("patterns not connected to any required or optional pattern: {}", .0.join("; "))]
    Unconnected(Vec<String>),
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error("input must be a conjunction of triple patterns")]
    NotConjunctive,
    #[error("core pattern `{0}` does not occur in the input")]
    CoreNotInPattern(String),
    #[error("invalid view spec: {0}")]
    ViewSpec(String),
    #[error("query already uses aggregates")]
    AlreadyAggregated,
    #[error("{0} is not a projected variable")]
    NotProjected(Variable),
    #[error("aggregated variable {0} is used in ORDER BY")]
    AggregatedOrderVariable(Variable),
    #[error("query does not match the alternative-URI shape: {0}")]
    ShapeMismatch(String),
    #[error("no item variable: the query projects nothing")]
    MissingItemVariable,
    #[error("{0} is not bound by the query pattern")]
    UnboundVariable(Variable),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
