use std::collections::BTreeSet;

use serde::Serialize;

use super::vars::{occurrences, vars_of};
use crate::syntax::{GraphPattern, Query, Variable};

/// Position of a node as child indices from the root (0 = left, 1 = right).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Location(pub Vec<usize>);

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return f.write_str("/");
        }
        for i in &self.0 {
            write!(f, "/{i}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub location: Location,
    pub variables: BTreeSet<Variable>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WellDesignedReport {
    pub well_designed: bool,
    /// FILTERs using variables their pattern does not mention.
    pub filter_violations: Vec<Violation>,
    /// OPTs whose right side shares variables with the outside that the
    /// left side lacks.
    pub opt_violations: Vec<Violation>,
}

pub fn check_well_designed(q: &Query) -> WellDesignedReport {
    check_pattern(&q.pattern)
}

/// Checks both conditions. Each UNION operand is its own scope for the
/// "occurs outside" test.
pub fn check_pattern(p: &GraphPattern) -> WellDesignedReport {
    let mut r = WellDesignedReport::default();
    let mut path = Vec::new();
    walk(p, p, &mut path, &mut r);
    r.well_designed = r.filter_violations.is_empty() && r.opt_violations.is_empty();
    r
}

fn walk(
    node: &GraphPattern,
    scope: &GraphPattern,
    path: &mut Vec<usize>,
    r: &mut WellDesignedReport,
) {
    match node {
        GraphPattern::Filter(inner, c) => {
            let bad: BTreeSet<Variable> =
                vars_of(c).difference(&vars_of(&**inner)).cloned().collect();
            if !bad.is_empty() {
                r.filter_violations.push(Violation {
                    location: Location(path.clone()),
                    variables: bad,
                });
            }
            child(inner, scope, path, 0, r);
        }
        GraphPattern::Opt(left, right) => {
            let inside = occurrences(node);
            let total = occurrences(scope);
            let left_vars = vars_of(&**left);
            let bad: BTreeSet<Variable> = vars_of(&**right)
                .into_iter()
                .filter(|v| {
                    let outside = total.get(v).copied().unwrap_or(0) > inside[v];
                    outside && !left_vars.contains(v)
                })
                .collect();
            if !bad.is_empty() {
                r.opt_violations.push(Violation {
                    location: Location(path.clone()),
                    variables: bad,
                });
            }
            child(left, scope, path, 0, r);
            child(right, scope, path, 1, r);
        }
        GraphPattern::Union(l, rr) => {
            path.push(0);
            walk(l, l, path, r);
            path.pop();
            path.push(1);
            walk(rr, rr, path, r);
            path.pop();
        }
        GraphPattern::And(l, rr) | GraphPattern::Minus(l, rr) => {
            child(l, scope, path, 0, r);
            child(rr, scope, path, 1, r);
        }
        GraphPattern::NamedGraph(_, inner) => child(inner, scope, path, 0, r),
        GraphPattern::Empty
        | GraphPattern::Triple(_)
        | GraphPattern::Values(_)
        | GraphPattern::SubSelect(_) => {}
    }
}

fn child(
    node: &GraphPattern,
    scope: &GraphPattern,
    path: &mut Vec<usize>,
    idx: usize,
    r: &mut WellDesignedReport,
) {
    path.push(idx);
    walk(node, scope, path, r);
    path.pop();
}
