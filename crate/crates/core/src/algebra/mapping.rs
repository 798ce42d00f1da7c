use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexSet;

use crate::syntax::{Term, Variable};

/// A partial function from variables to ground terms.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mapping(BTreeMap<Variable, Term>);

impl Mapping {
    pub fn new() -> Self {
        Mapping::default()
    }

    pub fn get(&self, v: &Variable) -> Option<&Term> {
        self.0.get(v)
    }

    pub fn insert(&mut self, v: Variable, t: Term) {
        debug_assert!(t.is_ground());
        self.0.insert(v, t);
    }

    pub fn with(mut self, v: impl Into<String>, t: Term) -> Self {
        self.insert(Variable::new(v), t);
        self
    }

    pub fn contains(&self, v: &Variable) -> bool {
        self.0.contains_key(v)
    }

    pub fn domain(&self) -> impl Iterator<Item = &Variable> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &Term)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Agreement on every shared variable.
    pub fn compatible(&self, other: &Mapping) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .0
            .iter()
            .all(|(v, t)| large.0.get(v).is_none_or(|u| u == t))
    }

    pub fn shares_variable(&self, other: &Mapping) -> bool {
        self.0.keys().any(|v| other.0.contains_key(v))
    }

    /// μ1 ∪ μ2; callers check compatibility first.
    pub fn merge(&self, other: &Mapping) -> Mapping {
        let mut m = self.clone();
        for (v, t) in &other.0 {
            m.0.entry(v.clone()).or_insert_with(|| t.clone());
        }
        m
    }

    pub fn project(&self, vars: &BTreeSet<Variable>) -> Mapping {
        Mapping(
            self.0
                .iter()
                .filter(|(v, _)| vars.contains(*v))
                .map(|(v, t)| (v.clone(), t.clone()))
                .collect(),
        )
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&Variable) -> bool) {
        self.0.retain(|v, _| keep(v));
    }

    pub fn without_internal(mut self) -> Mapping {
        self.retain(|v| !v.is_internal());
        self
    }

    /// Replaces bound variables in `t` by their values.
    pub fn apply(&self, t: &Term) -> Term {
        match t.as_variable().and_then(|v| self.0.get(v)) {
            Some(val) => val.clone(),
            None => t.clone(),
        }
    }
}

impl FromIterator<(Variable, Term)> for Mapping {
    fn from_iter<I: IntoIterator<Item = (Variable, Term)>>(iter: I) -> Self {
        Mapping(iter.into_iter().collect())
    }
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} -> {t}")?;
        }
        f.write_str("}")
    }
}

/// A set of mappings. Iteration follows insertion order; equality ignores it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MappingSet(IndexSet<Mapping>);

impl MappingSet {
    pub fn new() -> Self {
        MappingSet::default()
    }

    /// The set containing only the empty mapping (the join identity).
    pub fn unit() -> Self {
        std::iter::once(Mapping::new()).collect()
    }

    pub fn insert(&mut self, m: Mapping) -> bool {
        self.0.insert(m)
    }

    pub fn contains(&self, m: &Mapping) -> bool {
        self.0.contains(m)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> indexmap::set::Iter<'_, Mapping> {
        self.0.iter()
    }

    pub fn to_vec(&self) -> Vec<Mapping> {
        self.0.iter().cloned().collect()
    }

    /// Ω1 ⋈ Ω2
    pub fn join(&self, other: &MappingSet) -> MappingSet {
        ops::join(&self.to_vec(), &other.to_vec()).into_iter().collect()
    }

    /// Ω1 ∪ Ω2
    pub fn union(&self, other: &MappingSet) -> MappingSet {
        self.iter().chain(other.iter()).cloned().collect()
    }

    /// Ω1 \ Ω2: mappings of Ω1 compatible with no mapping of Ω2.
    pub fn difference(&self, other: &MappingSet) -> MappingSet {
        ops::difference(&self.to_vec(), &other.to_vec())
            .into_iter()
            .collect()
    }

    /// Ω1 ⟕ Ω2 = (Ω1 ⋈ Ω2) ∪ (Ω1 \ Ω2)
    pub fn left_outer_join(&self, other: &MappingSet) -> MappingSet {
        ops::left_join(&self.to_vec(), &other.to_vec())
            .into_iter()
            .collect()
    }

    /// SPARQL 1.1 MINUS: only compatible mappings sharing a variable remove.
    pub fn minus(&self, other: &MappingSet) -> MappingSet {
        ops::minus(&self.to_vec(), &other.to_vec())
            .into_iter()
            .collect()
    }
}

impl FromIterator<Mapping> for MappingSet {
    fn from_iter<I: IntoIterator<Item = Mapping>>(iter: I) -> Self {
        MappingSet(iter.into_iter().collect())
    }
}

impl IntoIterator for MappingSet {
    type Item = Mapping;
    type IntoIter = indexmap::set::IntoIter<Mapping>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a MappingSet {
    type Item = &'a Mapping;
    type IntoIter = indexmap::set::Iter<'a, Mapping>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Operators over mapping sequences. They keep duplicates; set semantics
/// is obtained by deduplicating the inputs and the output.
pub(crate) mod ops {
    use std::collections::{BTreeSet, HashMap};

    use super::Mapping;
    use crate::syntax::{Term, Variable};

    /// Variables bound in every mapping of `ms`.
    fn certain_vars(ms: &[Mapping]) -> BTreeSet<Variable> {
        let mut it = ms.iter();
        let Some(first) = it.next() else {
            return BTreeSet::new();
        };
        let mut vars: BTreeSet<Variable> = first.domain().cloned().collect();
        for m in it {
            vars.retain(|v| m.contains(v));
            if vars.is_empty() {
                break;
            }
        }
        vars
    }

    fn key(m: &Mapping, vars: &[Variable]) -> Vec<Term> {
        vars.iter().map(|v| m.get(v).cloned().expect("certain")).collect()
    }

    /// Buckets `right` by the variables certainly bound on both sides.
    /// Every compatible pair lands in the same bucket.
    fn buckets<'a>(
        left: &[Mapping],
        right: &'a [Mapping],
    ) -> (Vec<Variable>, HashMap<Vec<Term>, Vec<&'a Mapping>>) {
        let shared: Vec<Variable> = certain_vars(left)
            .intersection(&certain_vars(right))
            .cloned()
            .collect();
        let mut map: HashMap<Vec<Term>, Vec<&Mapping>> = HashMap::new();
        for m in right {
            map.entry(key(m, &shared)).or_default().push(m);
        }
        (shared, map)
    }

    pub fn join(left: &[Mapping], right: &[Mapping]) -> Vec<Mapping> {
        let (shared, map) = buckets(left, right);
        let mut out = Vec::new();
        for l in left {
            if let Some(bucket) = map.get(&key(l, &shared)) {
                for r in bucket {
                    if l.compatible(r) {
                        out.push(l.merge(r));
                    }
                }
            }
        }
        out
    }

    pub fn difference(left: &[Mapping], right: &[Mapping]) -> Vec<Mapping> {
        let (shared, map) = buckets(left, right);
        left.iter()
            .filter(|l| {
                map.get(&key(l, &shared))
                    .is_none_or(|b| !b.iter().any(|r| l.compatible(r)))
            })
            .cloned()
            .collect()
    }

    pub fn left_join(left: &[Mapping], right: &[Mapping]) -> Vec<Mapping> {
        let (shared, map) = buckets(left, right);
        let mut out = Vec::new();
        for l in left {
            let mut matched = false;
            if let Some(bucket) = map.get(&key(l, &shared)) {
                for r in bucket {
                    if l.compatible(r) {
                        matched = true;
                        out.push(l.merge(r));
                    }
                }
            }
            if !matched {
                out.push(l.clone());
            }
        }
        out
    }

    pub fn minus(left: &[Mapping], right: &[Mapping]) -> Vec<Mapping> {
        left.iter()
            .filter(|l| {
                !right
                    .iter()
                    .any(|r| l.shares_variable(r) && l.compatible(r))
            })
            .cloned()
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Term {
        Term::iri(format!("http://ex/{s}"))
    }

    #[test]
    fn join_compatible_extension() {
        let a: MappingSet = [Mapping::new().with("x", iri("a"))].into_iter().collect();
        let b: MappingSet = [Mapping::new().with("x", iri("a")).with("y", iri("b"))]
            .into_iter()
            .collect();
        assert_eq!(a.join(&b), b);
    }

    #[test]
    fn difference_removes_compatible() {
        let a: MappingSet = [Mapping::new().with("x", iri("a"))].into_iter().collect();
        assert!(a.difference(&a).is_empty());
    }

    #[test]
    fn minus_keeps_disjoint_domains() {
        let a: MappingSet = [Mapping::new().with("x", iri("a"))].into_iter().collect();
        let b: MappingSet = [Mapping::new().with("y", iri("b"))].into_iter().collect();
        assert_eq!(a.minus(&b), a);
        assert!(a.difference(&b).is_empty());
    }

    #[test]
    fn partial_bindings_join_through_buckets() {
        let a: MappingSet = [Mapping::new(), Mapping::new().with("x", iri("a"))]
            .into_iter()
            .collect();
        let b: MappingSet = [Mapping::new().with("x", iri("b"))].into_iter().collect();
        let j = a.join(&b);
        assert_eq!(j.len(), 1);
        assert!(j.contains(&Mapping::new().with("x", iri("b"))));
    }

    #[test]
    fn set_equality_ignores_order() {
        let m1 = Mapping::new().with("x", iri("a"));
        let m2 = Mapping::new().with("x", iri("b"));
        let a: MappingSet = [m1.clone(), m2.clone()].into_iter().collect();
        let b: MappingSet = [m2, m1].into_iter().collect();
        assert_eq!(a, b);
    }
}
