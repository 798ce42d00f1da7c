//! Shared test support: a brute-force reference evaluator, proptest
//! generators and small fixtures.

pub mod fixtures;
pub mod gen;
pub mod oracle;

pub use oracle::{Oracle, Solution, Solutions};
