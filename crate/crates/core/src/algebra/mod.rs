//! Reference evaluator: mapping-set operators, pattern evaluation, query
//! forms and result serialization.

mod condition;
mod eval;
mod mapping;
mod query;
pub mod results;

pub use condition::{evaluate_condition, Truth};
pub use eval::{evaluate, evaluate_with, EvalError, EvalOptions, Semantics};
pub use mapping::{Mapping, MappingSet};
pub use query::{
    evaluate_query, evaluate_query_with, term_order, visible_variables, QueryResult,
    SolutionSequence,
};
