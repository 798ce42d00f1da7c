//! GRAPH localization from a predicate-to-graph map.

use super::{RewriteReport, Rewritten};
use crate::dataset::ProvenanceMap;
use crate::syntax::{serialize_triple_pattern, GraphPattern, Query, Term, TriplePattern};

/// Wraps runs of adjacent triple patterns whose predicates map to the same
/// named graph in one `GRAPH` block. Patterns already inside a `GRAPH`
/// block are left alone.
pub fn localize_graphs(q: &Query, prov: &ProvenanceMap) -> Rewritten {
    let mut ctx = Ctx {
        prov,
        q,
        report: RewriteReport::new("localize-graphs"),
    };
    let mut query = q.clone();
    query.pattern = ctx.pattern(&q.pattern);
    Rewritten {
        query,
        report: ctx.report,
    }
}

struct Ctx<'a> {
    prov: &'a ProvenanceMap,
    q: &'a Query,
    report: RewriteReport,
}

impl Ctx<'_> {
    fn graph_of(&mut self, t: &TriplePattern) -> Option<String> {
        let mut graphs = Vec::new();
        for step in &t.predicate.steps {
            match step.as_iri() {
                None => {
                    self.skip(t, "variable predicate");
                    return None;
                }
                Some(p) => match self.prov.graph_for(p) {
                    Some(g) => graphs.push(g),
                    None => {
                        self.skip(t, &format!("predicate <{p}> has no mapped graph"));
                        return None;
                    }
                },
            }
        }
        if graphs.windows(2).any(|w| w[0] != w[1]) {
            self.skip(t, "path steps map to different graphs");
            return None;
        }
        graphs.first().map(|g| g.to_string())
    }

    fn skip(&mut self, t: &TriplePattern, reason: &str) {
        let text = serialize_triple_pattern(t, &self.q.prefixes);
        self.report.warnings.push(format!("not localized: {text} ({reason})"));
    }

    fn pattern(&mut self, p: &GraphPattern) -> GraphPattern {
        match p {
            GraphPattern::And(..) | GraphPattern::Triple(_) => self.conjunction(p),
            GraphPattern::Opt(l, r) => GraphPattern::opt(self.pattern(l), self.pattern(r)),
            GraphPattern::Union(l, r) => GraphPattern::union(self.pattern(l), self.pattern(r)),
            GraphPattern::Minus(l, r) => GraphPattern::minus(self.pattern(l), self.pattern(r)),
            GraphPattern::Filter(inner, c) => GraphPattern::filter(self.pattern(inner), c.clone()),
            GraphPattern::SubSelect(sub) => {
                let mut sub = (**sub).clone();
                sub.pattern = self.pattern(&sub.pattern);
                GraphPattern::SubSelect(Box::new(sub))
            }
            GraphPattern::Empty | GraphPattern::NamedGraph(..) | GraphPattern::Values(_) => {
                p.clone()
            }
        }
    }

    fn conjunction(&mut self, p: &GraphPattern) -> GraphPattern {
        let mut out: Vec<GraphPattern> = Vec::new();
        let mut run: Option<(String, Vec<GraphPattern>)> = None;
        for c in p.conjuncts() {
            let target = match c {
                GraphPattern::Triple(t) => self.graph_of(t),
                _ => None,
            };
            match (target, &mut run) {
                (Some(g), Some((current, items))) if *current == g => items.push(c.clone()),
                (Some(g), _) => {
                    self.flush(&mut run, &mut out);
                    run = Some((g, vec![c.clone()]));
                }
                (None, _) => {
                    self.flush(&mut run, &mut out);
                    out.push(match c {
                        GraphPattern::Triple(_) => c.clone(),
                        other => self.pattern(other),
                    });
                }
            }
        }
        self.flush(&mut run, &mut out);
        GraphPattern::and_all(out)
    }

    fn flush(&mut self, run: &mut Option<(String, Vec<GraphPattern>)>, out: &mut Vec<GraphPattern>) {
        if let Some((g, items)) = run.take() {
            self.report
                .actions
                .push(format!("GRAPH <{g}> wraps {} pattern(s)", items.len()));
            out.push(GraphPattern::graph(Term::iri(g), GraphPattern::and_all(items)));
        }
    }
}
