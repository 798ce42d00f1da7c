//! `[NAME]` placeholder templates.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::lexer::{Lexer, Tok};
use super::parser::parse_query;
use super::ParseError;
use super::ast::Query;
use super::serializer::{serialize_query_with, SerializeOptions};
use super::term::{Term, Variable};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QueryTemplate {
    pub text: String,
}

#[derive(Debug, thiserror::Error)]
pub enum TemplateError {
    #[error("no binding for placeholder [{0}]")]
    MissingBinding(String),
    #[error("instantiated query does not parse: {0}")]
    Parse(#[from] ParseError),
}

impl QueryTemplate {
    pub fn new(text: impl Into<String>) -> Self {
        QueryTemplate { text: text.into() }
    }

    /// Placeholder names in first-occurrence order, deduplicated.
    pub fn placeholders(&self) -> Result<Vec<String>, ParseError> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for t in Lexer::tokenize(&self.text)? {
            if let Tok::Placeholder(name) = t.tok {
                if seen.insert(name.clone()) {
                    out.push(name);
                }
            }
        }
        Ok(out)
    }
}

/// Substitutes every placeholder with the N-Triples form of its bound term
/// and checks that the result parses.
pub fn instantiate_template(
    t: &QueryTemplate,
    bindings: &BTreeMap<String, Term>,
) -> Result<String, TemplateError> {
    instantiate_with(t, |name| bindings.get(name).map(Term::to_string))
}

/// Like [`instantiate_template`] but the replacement text is produced by
/// `lookup`, which lets one placeholder expand to several terms.
pub fn instantiate_with(
    t: &QueryTemplate,
    lookup: impl Fn(&str) -> Option<String>,
) -> Result<String, TemplateError> {
    let tokens = Lexer::tokenize(&t.text)?;
    let mut out = String::with_capacity(t.text.len());
    let mut last = 0;
    for tok in &tokens {
        if let Tok::Placeholder(name) = &tok.tok {
            let text =
                lookup(name).ok_or_else(|| TemplateError::MissingBinding(name.clone()))?;
            out.push_str(&t.text[last..tok.start]);
            out.push_str(&text);
            last = tok.end;
        }
    }
    out.push_str(&t.text[last..]);
    parse_query(&out, None)?;
    Ok(out)
}

const PLACEHOLDER_VAR_PREFIX: &str = "__";

/// Parses a template with each `[NAME]` read as the variable `?__NAME`.
/// Returns the query and the variable-to-placeholder table that
/// [`render_template`] uses to write the placeholders back.
pub fn parse_template(
    t: &QueryTemplate,
) -> Result<(Query, BTreeMap<Variable, String>), TemplateError> {
    let names = t.placeholders()?;
    let text = instantiate_with(t, |name| Some(format!("?{PLACEHOLDER_VAR_PREFIX}{name}")))?;
    let q = parse_query(&text, None)?;
    let table = names
        .into_iter()
        .map(|n| (Variable::new(format!("{PLACEHOLDER_VAR_PREFIX}{n}")), n))
        .collect();
    Ok((q, table))
}

/// Serializes `q`, writing the variables in `placeholders` as `[NAME]`.
pub fn render_template(q: &Query, placeholders: &BTreeMap<Variable, String>) -> QueryTemplate {
    let opts = SerializeOptions {
        placeholders: placeholders.clone(),
        ..SerializeOptions::default()
    };
    QueryTemplate::new(serialize_query_with(q, &opts))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SEQ: &str = "PREFIX skos: <http://www.w3.org/2004/02/skos/core#>\n\
        PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>\n\
        SELECT * WHERE { [RESOURCE] skos:exactMatch/rdfs:label ?synonym }";

    #[test]
    fn substitutes_resource() {
        let mut b = BTreeMap::new();
        b.insert("RESOURCE".to_string(), Term::iri("http://ex.org/t1"));
        let s = instantiate_template(&QueryTemplate::new(SEQ), &b).unwrap();
        assert!(s.contains("<http://ex.org/t1> skos:exactMatch/rdfs:label ?synonym"));
    }

    #[test]
    fn missing_binding_named() {
        let e = instantiate_template(&QueryTemplate::new(SEQ), &BTreeMap::new()).unwrap_err();
        assert!(matches!(e, TemplateError::MissingBinding(ref n) if n == "RESOURCE"));
    }

    #[test]
    fn leaves_strings_comments_and_iris_alone() {
        let text = "SELECT * { ?s <http://x/[A]> \"[A]\" . # [A]\n [A] <http://p> ?o }";
        let mut b = BTreeMap::new();
        b.insert("A".to_string(), Term::iri("http://a"));
        let s = instantiate_template(&QueryTemplate::new(text), &b).unwrap();
        assert_eq!(
            s,
            "SELECT * { ?s <http://x/[A]> \"[A]\" . # [A]\n <http://a> <http://p> ?o }"
        );
    }

    #[test]
    fn template_parse_render_roundtrip() {
        let t = QueryTemplate::new(SEQ);
        let (q, table) = parse_template(&t).unwrap();
        let back = render_template(&q, &table);
        assert!(back.text.contains("[RESOURCE] skos:exactMatch/rdfs:label ?synonym"), "{}", back.text);
        assert_eq!(parse_template(&back).unwrap().0, q);
    }

    #[test]
    fn no_placeholders_is_identity() {
        let text = "SELECT * WHERE { ?s ?p ?o }";
        let s = instantiate_template(&QueryTemplate::new(text), &BTreeMap::new()).unwrap();
        assert_eq!(s, text);
    }

    #[test]
    fn parse_failure_propagates() {
        let mut b = BTreeMap::new();
        b.insert("X".to_string(), Term::literal(crate::syntax::Literal::simple("s")));
        let e = instantiate_template(&QueryTemplate::new("SELECT * { [X] <http://p> ?o }"), &b)
            .unwrap_err();
        assert!(matches!(e, TemplateError::Parse(_)));
    }
}
