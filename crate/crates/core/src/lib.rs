//! Parsing, analysis, rewriting and benchmarking of SPARQL queries, with a
//! reference evaluator used as the correctness oracle.

pub mod algebra;
pub mod analysis;
pub mod bench;
pub mod dataset;
pub mod endpoint;
pub mod rewrite;
pub mod syntax;
