use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::RewriteError;
use crate::syntax::{parse_pattern, vocab, GraphPattern, Term, TriplePattern, Variable};

/// A view template over one resource type.
///
/// ```toml
/// resource_type = "http://example.org/Target"
/// core = ["label"]
///
/// [prefixes]
/// rdfs = "http://www.w3.org/2000/01/rdf-schema#"
///
/// [[element]]
/// name = "label"
/// chain = "?resource rdfs:label ?label"
/// ```
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ViewSpec {
    pub resource_type: String,
    #[serde(default = "default_resource_var")]
    pub resource_var: String,
    #[serde(default)]
    pub prefixes: BTreeMap<String, String>,
    pub core: Vec<String>,
    #[serde(rename = "element")]
    pub elements: Vec<ViewElement>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ViewElement {
    pub name: String,
    pub chain: String,
}

fn default_resource_var() -> String {
    "resource".to_string()
}

impl ViewSpec {
    pub fn from_toml(text: &str) -> Result<Self, RewriteError> {
        let spec: ViewSpec =
            toml::from_str(text).map_err(|e| RewriteError::ViewSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn resource(&self) -> Variable {
        Variable::new(self.resource_var.clone())
    }

    pub fn validate(&self) -> Result<(), RewriteError> {
        if self.core.is_empty() {
            return Err(RewriteError::ViewSpec("core is empty".into()));
        }
        for c in &self.core {
            if !self.elements.iter().any(|e| &e.name == c) {
                return Err(RewriteError::ViewSpec(format!("unknown core element `{c}`")));
            }
        }
        let resource = Term::from(self.resource());
        for e in &self.elements {
            let chain = self.chain(e)?;
            if chain.first().map(|t| &t.subject) != Some(&resource) {
                return Err(RewriteError::ViewSpec(format!(
                    "element `{}` does not start at {}",
                    e.name, resource
                )));
            }
        }
        Ok(())
    }

    fn chain(&self, e: &ViewElement) -> Result<Vec<TriplePattern>, RewriteError> {
        let p = parse_pattern(&e.chain, &self.prefixes)?;
        conjunctive_triples(&p)
    }

    /// `?resource rdf:type <resource_type>`
    pub fn type_triple(&self) -> TriplePattern {
        TriplePattern::new(
            self.resource().into(),
            Term::iri(vocab::RDF_TYPE),
            Term::iri(self.resource_type.clone()),
        )
    }

    pub fn element_triples(&self, name: &str) -> Result<Vec<TriplePattern>, RewriteError> {
        let e = self
            .elements
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| RewriteError::ViewSpec(format!("unknown element `{name}`")))?;
        self.chain(e)
    }

    fn triples_where(&self, keep: impl Fn(&ViewElement) -> bool) -> Result<Vec<TriplePattern>, RewriteError> {
        let mut out = vec![self.type_triple()];
        for e in self.elements.iter().filter(|e| keep(e)) {
            for t in self.chain(e)? {
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
        Ok(out)
    }

    /// P(r, v): the type triple and every element chain, in listed order.
    pub fn pattern(&self) -> Result<GraphPattern, RewriteError> {
        Ok(and_triples(self.triples_where(|_| true)?))
    }

    /// P(r, core(v)).
    pub fn core_pattern(&self) -> Result<GraphPattern, RewriteError> {
        Ok(and_triples(self.triples_where(|e| self.core.contains(&e.name))?))
    }

    /// Non-core elements with their chains.
    pub fn optional_elements(&self) -> Result<Vec<(String, Vec<TriplePattern>)>, RewriteError> {
        self.elements
            .iter()
            .filter(|e| !self.core.contains(&e.name))
            .map(|e| Ok((e.name.clone(), self.chain(e)?)))
            .collect()
    }
}

pub(crate) fn and_triples(ts: impl IntoIterator<Item = TriplePattern>) -> GraphPattern {
    GraphPattern::and_all(ts.into_iter().map(GraphPattern::triple))
}

/// The triple patterns of a pattern built only from AND.
pub(crate) fn conjunctive_triples(p: &GraphPattern) -> Result<Vec<TriplePattern>, RewriteError> {
    p.conjuncts()
        .into_iter()
        .filter(|c| !matches!(c, GraphPattern::Empty))
        .map(|c| match c {
            GraphPattern::Triple(t) => Ok(t.clone()),
            _ => Err(RewriteError::NotConjunctive),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPEC: &str = r#"
resource_type = "http://ex.org/Target"
core = ["label"]
[prefixes]
ex = "http://ex.org/"
[[element]]
name = "label"
chain = "?resource ex:label ?label"
[[element]]
name = "location"
chain = "?resource ex:loc ?loc . ?loc ex:name ?locName"
"#;

    #[test]
    fn patterns_include_type_triple() {
        let v = ViewSpec::from_toml(SPEC).unwrap();
        assert_eq!(v.pattern().unwrap().triple_patterns().len(), 4);
        assert_eq!(v.core_pattern().unwrap().triple_patterns().len(), 2);
        assert_eq!(v.optional_elements().unwrap()[0].1.len(), 2);
    }

    #[test]
    fn chain_must_start_at_resource() {
        let bad = SPEC.replace("?resource ex:loc ?loc", "?x ex:loc ?loc");
        assert!(matches!(ViewSpec::from_toml(&bad), Err(RewriteError::ViewSpec(_))));
    }

    #[test]
    fn empty_core_rejected() {
        let bad = SPEC.replace("core = [\"label\"]", "core = []");
        assert!(ViewSpec::from_toml(&bad).is_err());
    }
}
