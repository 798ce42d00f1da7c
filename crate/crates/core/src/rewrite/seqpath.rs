//! Merging of chained triple patterns into sequence paths.

use std::collections::{BTreeMap, BTreeSet};

use super::{RewriteReport, Rewritten};
use crate::algebra::visible_variables;
use crate::analysis::{occurrences, HasVars};
use crate::syntax::{
    serialize_triple_pattern, AggregateArg, GraphPattern, PathExpr, Projection, Query, QueryForm,
    SelectItem, TriplePattern, Variable,
};

/// Rewrites `s p1 ?x . ?x p2 o` as `s p1/p2 o` when `?x` occurs in exactly
/// those two patterns, is not projected and appears in no filter, order or
/// group clause. Chains are merged until no pair qualifies.
pub fn merge_sequence_paths(q: &Query) -> Rewritten {
    let mut ctx = Ctx {
        counts: query_occurrences(q),
        projected: projected(q),
        prefixes: q.prefixes.clone(),
        report: RewriteReport::new("seqpath"),
        blocked: BTreeSet::new(),
    };
    let mut query = q.clone();
    query.pattern = ctx.pattern(&q.pattern);
    Rewritten {
        query,
        report: ctx.report,
    }
}

fn query_occurrences(q: &Query) -> BTreeMap<Variable, usize> {
    let mut counts = occurrences(&q.pattern);
    let mut bump = |v: &Variable| *counts.entry(v.clone()).or_insert(0) += 1;
    if let Projection::Items(items) = &q.projection {
        for item in items {
            bump(item.output());
            if let SelectItem::Aggregate { aggregate, .. } = item {
                if let AggregateArg::Var(v) = &aggregate.arg {
                    bump(v);
                }
            }
        }
    }
    q.group_by.iter().for_each(&mut bump);
    q.order_by.iter().for_each(|o| bump(&o.var));
    q.construct_template.for_each_var(&mut bump);
    counts
}

fn projected(q: &Query) -> BTreeSet<Variable> {
    match (&q.form, &q.projection) {
        (QueryForm::Ask, _) => BTreeSet::new(),
        (QueryForm::Construct, _) => q.construct_template.iter().flat_map(|t| {
            let mut vs = Vec::new();
            t.for_each_var(&mut |v| vs.push(v.clone()));
            vs
        }).collect(),
        (QueryForm::Select, Projection::All) => visible_variables(&q.pattern).into_iter().collect(),
        (QueryForm::Select, Projection::Items(_)) => {
            q.projected_vars().into_iter().cloned().collect()
        }
    }
}

struct Ctx {
    counts: BTreeMap<Variable, usize>,
    projected: BTreeSet<Variable>,
    prefixes: BTreeMap<String, String>,
    report: RewriteReport,
    blocked: BTreeSet<(Variable, String)>,
}

impl Ctx {
    fn pattern(&mut self, p: &GraphPattern) -> GraphPattern {
        match p {
            GraphPattern::And(..) | GraphPattern::Triple(_) => self.conjunction(p),
            GraphPattern::Opt(l, r) => GraphPattern::opt(self.pattern(l), self.pattern(r)),
            GraphPattern::Union(l, r) => GraphPattern::union(self.pattern(l), self.pattern(r)),
            GraphPattern::Minus(l, r) => GraphPattern::minus(self.pattern(l), self.pattern(r)),
            GraphPattern::Filter(inner, c) => GraphPattern::filter(self.pattern(inner), c.clone()),
            GraphPattern::NamedGraph(g, inner) => GraphPattern::graph(g.clone(), self.pattern(inner)),
            GraphPattern::Empty | GraphPattern::Values(_) | GraphPattern::SubSelect(_) => p.clone(),
        }
    }

    fn conjunction(&mut self, p: &GraphPattern) -> GraphPattern {
        let mut items: Vec<GraphPattern> = p
            .conjuncts()
            .into_iter()
            .map(|c| match c {
                GraphPattern::Triple(_) => c.clone(),
                other => self.pattern(other),
            })
            .collect();
        while let Some((i, j)) = self.find_pair(&items) {
            let (GraphPattern::Triple(a), GraphPattern::Triple(b)) = (&items[i], &items[j]) else {
                unreachable!()
            };
            let mut steps = a.predicate.steps.clone();
            steps.extend(b.predicate.steps.iter().cloned());
            let merged = TriplePattern::with_path(
                a.subject.clone(),
                PathExpr::sequence(steps),
                b.object.clone(),
            );
            self.report.actions.push(format!(
                "merged `{}` and `{}` into `{}`",
                serialize_triple_pattern(a, &self.prefixes),
                serialize_triple_pattern(b, &self.prefixes),
                serialize_triple_pattern(&merged, &self.prefixes)
            ));
            items[i] = GraphPattern::Triple(merged);
            items.remove(j);
        }
        GraphPattern::and_all(items)
    }

    fn find_pair(&mut self, items: &[GraphPattern]) -> Option<(usize, usize)> {
        for (i, a) in items.iter().enumerate() {
            let GraphPattern::Triple(a) = a else { continue };
            let Some(x) = a.object.as_variable() else { continue };
            for (j, b) in items.iter().enumerate() {
                let GraphPattern::Triple(b) = b else { continue };
                if i == j || b.subject.as_variable() != Some(x) {
                    continue;
                }
                match self.blocker(x, a, b) {
                    None => return Some((i, j)),
                    Some(reason) => {
                        if self.blocked.insert((x.clone(), reason.clone())) {
                            self.report
                                .warnings
                                .push(format!("chain through {x} not merged: {reason}"));
                        }
                    }
                }
            }
        }
        None
    }

    fn blocker(&self, x: &Variable, a: &TriplePattern, b: &TriplePattern) -> Option<String> {
        if !a.predicate.is_constant() || !b.predicate.is_constant() {
            return Some("variable predicate".into());
        }
        if self.projected.contains(x) {
            return Some("variable is projected".into());
        }
        let n = self.counts.get(x).copied().unwrap_or(0);
        if n != 2 {
            return Some(format!(
                "variable occurs {n} times in the query (filter, order, group or other patterns)"
            ));
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_query, serialize_query};

    fn merged(text: &str) -> (String, RewriteReport) {
        let q = parse_query(text, None).unwrap();
        let r = merge_sequence_paths(&q);
        (serialize_query(&r.query), r.report)
    }

    #[test]
    fn chain_of_three_merges() {
        let (q, report) = merged(
            "PREFIX : <http://ex.org/> SELECT ?s ?o WHERE { ?s :a ?x . ?y :c ?o . ?x :b ?y }",
        );
        assert!(q.contains("?s :a/:b/:c ?o"), "{q}");
        assert_eq!(report.actions.len(), 2);
    }

    #[test]
    fn projected_intermediate_blocks() {
        let (q, report) =
            merged("PREFIX : <http://ex.org/> SELECT ?s ?x WHERE { ?s :a ?x . ?x :b ?o }");
        assert!(!q.contains(":a/"), "{q}");
        assert_eq!(report.warnings, ["chain through ?x not merged: variable is projected"]);
    }

    #[test]
    fn filtered_intermediate_blocks() {
        let (q, _) = merged(
            "PREFIX : <http://ex.org/> SELECT ?s WHERE { ?s :a ?x . ?x :b ?o FILTER(?x != :z) }",
        );
        assert!(!q.contains(":a/"), "{q}");
    }

    #[test]
    fn select_star_blocks() {
        let (q, _) = merged("PREFIX : <http://ex.org/> SELECT * WHERE { ?s :a ?x . ?x :b ?o }");
        assert!(!q.contains(":a/"), "{q}");
    }
}
