//! RDF terms, variables and ground triples.

use std::fmt;

use serde::{Deserialize, Serialize};

pub mod vocab {
    pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const RDF_FIRST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#first";
    pub const RDF_REST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#rest";
    pub const RDF_NIL: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#nil";
    pub const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
    pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
    pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
    pub const XSD_DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
    pub const XSD_BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";

    pub fn is_numeric(datatype: &str) -> bool {
        matches!(
            datatype,
            XSD_INTEGER
                | XSD_DECIMAL
                | XSD_DOUBLE
                | "http://www.w3.org/2001/XMLSchema#float"
                | "http://www.w3.org/2001/XMLSchema#int"
                | "http://www.w3.org/2001/XMLSchema#long"
                | "http://www.w3.org/2001/XMLSchema#short"
                | "http://www.w3.org/2001/XMLSchema#nonNegativeInteger"
                | "http://www.w3.org/2001/XMLSchema#positiveInteger"
        )
    }
}

/// A query variable. The name never carries the leading `?`/`$`.
///
/// Names starting with `_:` are reserved for evaluator-internal variables
/// (blank nodes in patterns, path intermediates). They cannot be written in
/// query text and are hidden from `SELECT *`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Variable(String);

impl Variable {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        let name = name
            .strip_prefix('?')
            .or_else(|| name.strip_prefix('$'))
            .map(str::to_owned)
            .unwrap_or(name);
        debug_assert!(!name.is_empty(), "empty variable name");
        Variable(name)
    }

    pub(crate) fn internal(name: impl Into<String>) -> Self {
        Variable(format!("_:{}", name.into()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_internal(&self) -> bool {
        self.0.starts_with("_:")
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub lexical: String,
    pub datatype: Option<String>,
    pub language: Option<String>,
}

impl Literal {
    pub fn simple(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: None,
            language: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: Some(datatype.into()),
            language: None,
        }
    }

    pub fn lang(lexical: impl Into<String>, language: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: None,
            language: Some(language.into().to_ascii_lowercase()),
        }
    }

    pub fn integer(value: i64) -> Self {
        Literal::typed(value.to_string(), vocab::XSD_INTEGER)
    }

    /// Numeric value when the datatype is numeric and the lexical form parses.
    pub fn numeric_value(&self) -> Option<f64> {
        let dt = self.datatype.as_deref()?;
        if !vocab::is_numeric(dt) {
            return None;
        }
        self.lexical.trim().parse::<f64>().ok()
    }

    /// Datatype IRI under RDF 1.1 rules (simple literals are `xsd:string`).
    pub fn effective_datatype(&self) -> &str {
        match (&self.datatype, &self.language) {
            (Some(dt), _) => dt,
            (None, Some(_)) => vocab::RDF_LANG_STRING,
            (None, None) => vocab::XSD_STRING,
        }
    }
}

/// An RDF term or a variable: the sets U, B, L and V.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Term {
    Iri { value: String },
    Blank { label: String },
    Literal(Literal),
    Variable { name: Variable },
}

impl Term {
    pub fn iri(value: impl Into<String>) -> Self {
        Term::Iri {
            value: value.into(),
        }
    }

    pub fn blank(label: impl Into<String>) -> Self {
        Term::Blank {
            label: label.into(),
        }
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::Variable {
            name: Variable::new(name),
        }
    }

    pub fn literal(lit: Literal) -> Self {
        Term::Literal(lit)
    }

    pub fn as_variable(&self) -> Option<&Variable> {
        match self {
            Term::Variable { name } => Some(name),
            _ => None,
        }
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri { value } => Some(value),
            _ => None,
        }
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable { .. })
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri { .. })
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::Blank { .. })
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    /// Ground terms are members of U ∪ B ∪ L.
    pub fn is_ground(&self) -> bool {
        !self.is_variable()
    }

    /// The lexical form used when a term is rendered as a plain string
    /// (e.g. by `GROUP_CONCAT`).
    pub fn lexical(&self) -> &str {
        match self {
            Term::Iri { value } => value,
            Term::Blank { label } => label,
            Term::Literal(l) => &l.lexical,
            Term::Variable { name } => name.name(),
        }
    }
}

impl From<Variable> for Term {
    fn from(name: Variable) -> Self {
        Term::Variable { name }
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

impl fmt::Display for Term {
    /// N-Triples style rendering.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri { value } => write!(f, "<{value}>"),
            Term::Blank { label } => write!(f, "_:{label}"),
            Term::Variable { name } => write!(f, "{name}"),
            Term::Literal(l) => {
                write!(f, "\"{}\"", escape_string(&l.lexical))?;
                if let Some(lang) = &l.language {
                    write!(f, "@{lang}")
                } else if let Some(dt) = &l.datatype {
                    write!(f, "^^<{dt}>")
                } else {
                    Ok(())
                }
            }
        }
    }
}

pub(crate) fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

/// A ground RDF triple: (U ∪ B) × U × (U ∪ B ∪ L).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TripleError {
    #[error("subject must be an IRI or blank node, found {0}")]
    Subject(Term),
    #[error("predicate must be an IRI, found {0}")]
    Predicate(Term),
    #[error("object must be ground, found {0}")]
    Object(Term),
}

impl Triple {
    /// Builds a triple, enforcing the RDF position constraints.
    pub fn new(subject: Term, predicate: Term, object: Term) -> Result<Self, TripleError> {
        if !(subject.is_iri() || subject.is_blank()) {
            return Err(TripleError::Subject(subject));
        }
        if !predicate.is_iri() {
            return Err(TripleError::Predicate(predicate));
        }
        if object.is_variable() {
            return Err(TripleError::Object(object));
        }
        Ok(Triple {
            subject,
            predicate,
            object,
        })
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}
