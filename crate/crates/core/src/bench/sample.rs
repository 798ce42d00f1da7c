use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dataset::Dataset;
use crate::syntax::{vocab, Term};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleOutcome {
    pub type_iri: String,
    pub seed: u64,
    pub population: usize,
    pub resources: Vec<Term>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Distinct subjects typed `type_iri` in the default graph, in term order.
pub fn type_population(d: &Dataset, type_iri: &str) -> Vec<Term> {
    let p = Term::iri(vocab::RDF_TYPE);
    let o = Term::iri(type_iri);
    d.default_graph()
        .triples_matching(None, Some(&p), Some(&o))
        .map(|t| t.subject.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Uniform sample without replacement, returned in population order.
pub fn sample_resources(d: &Dataset, type_iri: &str, count: usize, seed: u64) -> SampleOutcome {
    let population = type_population(d, type_iri);
    let n = population.len();
    let (resources, warning) = if count >= n {
        let warning = (count > n).then(|| {
            format!("requested {count} resources but only {n} are typed <{type_iri}>; returning all")
        });
        (population, warning)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = rand::seq::index::sample(&mut rng, n, count).into_vec();
        picked.sort_unstable();
        (picked.into_iter().map(|i| population[i].clone()).collect(), None)
    };
    SampleOutcome {
        type_iri: type_iri.to_string(),
        seed,
        population: n,
        resources,
        warning,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Triple;

    fn dataset(n: usize) -> Dataset {
        let mut d = Dataset::new();
        for i in 0..n {
            d.insert(
                None,
                Triple::new(
                    Term::iri(format!("http://ex.org/t{i}")),
                    Term::iri(vocab::RDF_TYPE),
                    Term::iri("http://ex.org/Target"),
                )
                .unwrap(),
            );
        }
        d
    }

    #[test]
    fn seeded_sample_repeats() {
        let d = dataset(40);
        let a = sample_resources(&d, "http://ex.org/Target", 10, 7);
        let b = sample_resources(&d, "http://ex.org/Target", 10, 7);
        assert_eq!(a, b);
        assert_eq!(a.resources.len(), 10);
        assert_eq!(a.resources.iter().collect::<BTreeSet<_>>().len(), 10);
    }

    #[test]
    fn oversized_request_returns_everything() {
        let d = dataset(3);
        let s = sample_resources(&d, "http://ex.org/Target", 5, 1);
        assert_eq!(s.resources.len(), 3);
        assert!(s.warning.is_some());
    }
}
