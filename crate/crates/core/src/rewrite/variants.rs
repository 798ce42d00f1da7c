//! The five query variants compared per view.

use std::collections::BTreeMap;

use serde::Serialize;

use super::optional::{minimize_optionals, AskExecutor, AskProbe};
use super::view::{and_triples, ViewSpec};
use super::{localize_graphs, RewriteError};
use crate::dataset::ProvenanceMap;
use crate::syntax::{render_template, GraphPattern, Projection, Query, QueryTemplate};

pub const VARIANT_NAMES: [&str; 5] = [
    "Initial Query",
    "Graph",
    "Naive Optional",
    "Optimised Optional",
    "Graph Optional",
];

#[derive(Clone, Debug, Serialize)]
pub struct Variant {
    pub name: String,
    #[serde(skip)]
    pub query: Query,
    /// The query with the resource variable written as `[RESOURCE]`.
    pub template: QueryTemplate,
}

/// Core patterns required, each non-core element chain in its own OPTIONAL.
pub fn naive_optional(spec: &ViewSpec) -> Result<Query, RewriteError> {
    let mut pattern = spec.core_pattern()?;
    for (_, chain) in spec.optional_elements()? {
        pattern = GraphPattern::opt(pattern, and_triples(chain));
    }
    Ok(Query::select(Projection::All, pattern).with_prefixes(spec.prefixes.clone()))
}

/// Builds the variants in [`VARIANT_NAMES`] order. The probe answers the
/// OPTIONAL placement questions for the optimised variants.
pub fn view_variants<E: AskExecutor>(
    spec: &ViewSpec,
    prov: &ProvenanceMap,
    probe: &mut AskProbe<E>,
) -> Result<Vec<Variant>, RewriteError> {
    let pattern = spec.pattern()?;
    let initial = Query::select(Projection::All, pattern.clone()).with_prefixes(spec.prefixes.clone());
    let graph = localize_graphs(&initial, prov).query;
    let naive = naive_optional(spec)?;
    let optimised = minimize_optionals(&pattern, &spec.core_pattern()?, probe, &spec.prefixes)?.query;
    let graph_optional = localize_graphs(&optimised, prov).query;
    let table = BTreeMap::from([(spec.resource(), "RESOURCE".to_string())]);
    Ok(VARIANT_NAMES
        .iter()
        .zip([initial, graph, naive, optimised, graph_optional])
        .map(|(name, query)| Variant {
            name: name.to_string(),
            template: render_template(&query, &table),
            query,
        })
        .collect())
}
