//! Abstract syntax, parser, serializer and templates for the supported
//! SPARQL fragment.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod serializer;
pub mod template;
pub mod term;

pub use ast::*;
pub use parser::{parse_pattern, parse_query};
pub use serializer::{
    serialize_condition, serialize_pattern, serialize_query, serialize_query_with, serialize_term,
    serialize_triple_pattern,
    SerializeOptions, ValuesKeyword,
};
pub use template::{
    instantiate_template, instantiate_with, parse_template, render_template, QueryTemplate,
    TemplateError,
};
pub use term::{vocab, Literal, Term, Triple, TripleError, Variable};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{col} near `{token}`: {message}")]
    Syntax {
        line: usize,
        col: usize,
        token: String,
        message: String,
    },
    #[error("unknown prefix `{prefix}:` at {line}:{col}")]
    UnknownPrefix {
        line: usize,
        col: usize,
        prefix: String,
    },
    #[error("uninstantiated placeholder [{name}] at {line}:{col}")]
    Placeholder { line: usize, col: usize, name: String },
}
