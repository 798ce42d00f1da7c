use std::collections::{BTreeMap, BTreeSet};

use crate::syntax::{Condition, GraphPattern, Projection, Term, TriplePattern, Variable};

/// Anything with a variable set.
pub trait HasVars {
    fn for_each_var(&self, f: &mut dyn FnMut(&Variable));
}

/// var(x): every variable occurring in `x`.
pub fn vars_of(x: &impl HasVars) -> BTreeSet<Variable> {
    let mut out = BTreeSet::new();
    x.for_each_var(&mut |v| {
        out.insert(v.clone());
    });
    out
}

/// Occurrence counts per variable.
pub fn occurrences(x: &impl HasVars) -> BTreeMap<Variable, usize> {
    let mut out = BTreeMap::new();
    x.for_each_var(&mut |v| *out.entry(v.clone()).or_insert(0) += 1);
    out
}

/// Two fragments are connected when they share a variable.
pub fn connected(a: &impl HasVars, b: &impl HasVars) -> bool {
    let va = vars_of(a);
    let mut hit = false;
    b.for_each_var(&mut |v| hit |= va.contains(v));
    hit
}

fn term_var(t: &Term, f: &mut dyn FnMut(&Variable)) {
    if let Some(v) = t.as_variable() {
        f(v);
    }
}

impl HasVars for Term {
    fn for_each_var(&self, f: &mut dyn FnMut(&Variable)) {
        term_var(self, f);
    }
}

impl HasVars for TriplePattern {
    fn for_each_var(&self, f: &mut dyn FnMut(&Variable)) {
        term_var(&self.subject, f);
        for s in &self.predicate.steps {
            term_var(s, f);
        }
        term_var(&self.object, f);
    }
}

impl HasVars for Condition {
    fn for_each_var(&self, f: &mut dyn FnMut(&Variable)) {
        match self {
            Condition::Bound(v) => f(v),
            other => other.for_each_term(&mut |t| term_var(t, f)),
        }
    }
}

impl HasVars for GraphPattern {
    fn for_each_var(&self, f: &mut dyn FnMut(&Variable)) {
        match self {
            GraphPattern::Empty => {}
            GraphPattern::Triple(t) => t.for_each_var(f),
            GraphPattern::And(l, r)
            | GraphPattern::Opt(l, r)
            | GraphPattern::Union(l, r)
            | GraphPattern::Minus(l, r) => {
                l.for_each_var(f);
                r.for_each_var(f);
            }
            GraphPattern::Filter(inner, c) => {
                inner.for_each_var(f);
                c.for_each_var(f);
            }
            GraphPattern::NamedGraph(g, inner) => {
                term_var(g, f);
                inner.for_each_var(f);
            }
            GraphPattern::Values(b) => b.vars.iter().for_each(f),
            GraphPattern::SubSelect(q) => match &q.projection {
                Projection::Items(items) => items.iter().for_each(|i| f(i.output())),
                Projection::All => q.pattern.for_each_var(f),
            },
        }
    }
}

impl<T: HasVars> HasVars for [T] {
    fn for_each_var(&self, f: &mut dyn FnMut(&Variable)) {
        for x in self {
            x.for_each_var(f);
        }
    }
}

impl<T: HasVars> HasVars for Vec<T> {
    fn for_each_var(&self, f: &mut dyn FnMut(&Variable)) {
        self.as_slice().for_each_var(f);
    }
}

impl<T: HasVars + ?Sized> HasVars for &T {
    fn for_each_var(&self, f: &mut dyn FnMut(&Variable)) {
        (**self).for_each_var(f);
    }
}
