use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::vars_of;
use super::well_designed::WellDesignedReport;
use crate::syntax::{Condition, GraphPattern, Term, TriplePattern, Variable};

/// Rewrites `p` as a UNION of UNION-free branches.
///
/// AND and FILTER distribute over UNION on every side, OPT and MINUS on
/// their left operand. `P MINUS (Q1 UNION Q2)` becomes
/// `(P MINUS Q1) MINUS Q2`. `P OPT (Q1 UNION Q2)` becomes the union of
/// `P AND Q1`, `P AND Q2` and the mappings of `P` compatible with neither,
/// selected by `((P OPT (Q1 AND ?f1 ?a1 ?b1)) OPT (Q2 AND ?f2 ?a2 ?b2))
/// FILTER(!bound(?f1) && !bound(?f2))` over fresh variables. The last
/// branch is exact when every `Qi` only has solutions over a non-empty
/// active graph; when some `Qi` lacks a required triple pattern the UNION
/// is kept in the optional operand. GRAPH, VALUES and sub-selects are
/// leaves whose contents are normalized in place.
pub fn to_union_normal_form(p: &GraphPattern) -> GraphPattern {
    let mut fresh = Fresh {
        taken: vars_of(p),
        next: 0,
    };
    let out = branches(p, &mut fresh);
    GraphPattern::union_all(out).expect("at least one branch")
}

struct Fresh {
    taken: BTreeSet<Variable>,
    next: usize,
}

impl Fresh {
    fn var(&mut self) -> Variable {
        loop {
            let v = Variable::new(format!("_u{}", self.next));
            self.next += 1;
            if self.taken.insert(v.clone()) {
                return v;
            }
        }
    }
}

/// True when every solution of `p` implies a triple in the active graph.
fn needs_data(p: &GraphPattern) -> bool {
    match p {
        GraphPattern::Triple(_) => true,
        GraphPattern::And(l, r) => needs_data(l) || needs_data(r),
        GraphPattern::Union(l, r) => needs_data(l) && needs_data(r),
        GraphPattern::Opt(l, _) | GraphPattern::Minus(l, _) | GraphPattern::Filter(l, _) => {
            needs_data(l)
        }
        GraphPattern::Empty
        | GraphPattern::NamedGraph(..)
        | GraphPattern::Values(_)
        | GraphPattern::SubSelect(_) => false,
    }
}

fn normalize(p: &GraphPattern, fresh: &mut Fresh) -> GraphPattern {
    GraphPattern::union_all(branches(p, fresh)).expect("at least one branch")
}

fn branches(p: &GraphPattern, fresh: &mut Fresh) -> Vec<GraphPattern> {
    match p {
        GraphPattern::Union(l, r) => {
            let mut out = branches(l, fresh);
            out.extend(branches(r, fresh));
            out
        }
        GraphPattern::And(l, r) => {
            let (bl, br) = (branches(l, fresh), branches(r, fresh));
            let mut out = Vec::with_capacity(bl.len() * br.len());
            for a in &bl {
                for b in &br {
                    out.push(GraphPattern::And(Box::new(a.clone()), Box::new(b.clone())));
                }
            }
            out
        }
        GraphPattern::Filter(inner, c) => branches(inner, fresh)
            .into_iter()
            .map(|b| GraphPattern::Filter(Box::new(b), c.clone()))
            .collect(),
        GraphPattern::Opt(l, r) => {
            let left = branches(l, fresh);
            let right = branches(r, fresh);
            if right.len() == 1 || !right.iter().all(needs_data) {
                let right = GraphPattern::union_all(right).expect("at least one branch");
                return left
                    .into_iter()
                    .map(|b| GraphPattern::opt(b, right.clone()))
                    .collect();
            }
            let markers: Vec<(Variable, GraphPattern)> = right
                .iter()
                .map(|_| {
                    let f = fresh.var();
                    let t = TriplePattern::new(
                        Term::var(f.name()),
                        Term::var(fresh.var().name()),
                        Term::var(fresh.var().name()),
                    );
                    (f, GraphPattern::triple(t))
                })
                .collect();
            let mut out = Vec::new();
            for b in left {
                for q in &right {
                    out.push(GraphPattern::And(Box::new(b.clone()), Box::new(q.clone())));
                }
                let mut rest = b;
                let mut cond: Option<Condition> = None;
                for (q, (f, t)) in right.iter().zip(&markers) {
                    rest = GraphPattern::opt(
                        rest,
                        GraphPattern::And(Box::new(q.clone()), Box::new(t.clone())),
                    );
                    let c = Condition::negate(Condition::Bound(f.clone()));
                    cond = Some(match cond {
                        Some(prev) => Condition::and(prev, c),
                        None => c,
                    });
                }
                out.push(GraphPattern::filter(rest, cond.expect("two or more branches")));
            }
            out
        }
        GraphPattern::Minus(l, r) => {
            let right = branches(r, fresh);
            branches(l, fresh)
                .into_iter()
                .map(|b| {
                    right
                        .iter()
                        .fold(b, |acc, q| GraphPattern::minus(acc, q.clone()))
                })
                .collect()
        }
        GraphPattern::NamedGraph(g, inner) => vec![GraphPattern::NamedGraph(
            g.clone(),
            Box::new(normalize(inner, fresh)),
        )],
        GraphPattern::Empty
        | GraphPattern::Triple(_)
        | GraphPattern::Values(_)
        | GraphPattern::SubSelect(_) => vec![p.clone()],
    }
}

fn contains_union(p: &GraphPattern) -> bool {
    let mut found = false;
    p.visit(&mut |n| found |= matches!(n, GraphPattern::Union(..)));
    found
}

/// True when `p` is a UNION of UNION-free patterns.
pub fn is_union_normal_form(p: &GraphPattern) -> bool {
    p.union_branches().into_iter().all(|b| !contains_union(b))
}

/// True when no UNION sits under AND, FILTER, GRAPH or the left operand
/// of OPT/MINUS. [`to_union_normal_form`] always produces this shape.
pub fn unions_only_at_top_or_in_optional_right(p: &GraphPattern) -> bool {
    fn inner_ok(p: &GraphPattern) -> bool {
        match p {
            GraphPattern::Union(..) => false,
            GraphPattern::And(l, r) => inner_ok(l) && inner_ok(r),
            GraphPattern::Filter(i, _) | GraphPattern::NamedGraph(_, i) => inner_ok(i),
            GraphPattern::Opt(l, r) | GraphPattern::Minus(l, r) => {
                inner_ok(l) && unions_only_at_top_or_in_optional_right(r)
            }
            _ => true,
        }
    }
    p.union_branches().into_iter().all(inner_ok)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Operator {
    And,
    Filter,
    Union,
    Opt,
    Graph,
    Values,
    Minus,
    SubSelect,
}

/// Evaluation complexity classes, ordered by hardness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Complexity {
    #[serde(rename = "PTIME")]
    Ptime,
    #[serde(rename = "NP-complete")]
    NpComplete,
    #[serde(rename = "coNP-complete-wd-UNF")]
    CoNpWellDesignedUnf,
    #[serde(rename = "PSPACE-complete")]
    PspaceComplete,
}

impl fmt::Display for Complexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Complexity::Ptime => "PTIME",
            Complexity::NpComplete => "NP-complete",
            Complexity::CoNpWellDesignedUnf => "coNP-complete-wd-UNF",
            Complexity::PspaceComplete => "PSPACE-complete",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FragmentLabel {
    pub operators_used: BTreeSet<Operator>,
    pub label: Complexity,
}

pub fn operators_used(p: &GraphPattern) -> BTreeSet<Operator> {
    let mut ops = BTreeSet::new();
    p.visit(&mut |n| {
        let op = match n {
            GraphPattern::And(..) => Operator::And,
            GraphPattern::Filter(..) => Operator::Filter,
            GraphPattern::Union(..) => Operator::Union,
            GraphPattern::Opt(..) => Operator::Opt,
            GraphPattern::NamedGraph(..) => Operator::Graph,
            GraphPattern::Values(..) => Operator::Values,
            GraphPattern::Minus(..) => Operator::Minus,
            GraphPattern::SubSelect(..) => Operator::SubSelect,
            GraphPattern::Empty | GraphPattern::Triple(_) => return,
        };
        ops.insert(op);
    });
    ops
}

/// Assigns the complexity class of the operator fragment `p` falls in.
pub fn classify_fragment(p: &GraphPattern, wd: &WellDesignedReport) -> FragmentLabel {
    let ops = operators_used(p);
    let unf = is_union_normal_form(p);
    let label = if ops.contains(&Operator::Opt) {
        if unf && wd.well_designed {
            Complexity::CoNpWellDesignedUnf
        } else {
            Complexity::PspaceComplete
        }
    } else if ops.contains(&Operator::Union) && !unf {
        Complexity::NpComplete
    } else {
        Complexity::Ptime
    };
    FragmentLabel {
        operators_used: ops,
        label,
    }
}

#[cfg(test)]
mod tests {
    use super::super::check_pattern;
    use super::*;
    use crate::syntax::parse_query;

    fn pat(text: &str) -> GraphPattern {
        parse_query(text, None).unwrap().pattern
    }

    fn label(text: &str) -> Complexity {
        let p = pat(text);
        classify_fragment(&p, &check_pattern(&p)).label
    }

    #[test]
    fn and_distributes() {
        let p = pat("SELECT * { ?a <http://p0> ?b { ?b <http://p1> ?c } UNION { ?b <http://p2> ?c } }");
        let u = to_union_normal_form(&p);
        let expect = pat(
            "SELECT * { { ?a <http://p0> ?b . ?b <http://p1> ?c } UNION { ?a <http://p0> ?b . ?b <http://p2> ?c } }",
        );
        assert_eq!(u, expect);
    }

    #[test]
    fn union_unchanged() {
        let p = pat("SELECT * { { ?a <http://p> ?b } UNION { ?a <http://q> ?b } }");
        assert_eq!(to_union_normal_form(&p), p);
    }

    #[test]
    fn optional_right_union_split() {
        let p = pat("SELECT * { ?a <http://p> ?b OPTIONAL { { ?b <http://q> ?c } UNION { ?b <http://r> ?c } } }");
        let u = to_union_normal_form(&p);
        let expect = pat(
            "SELECT * { { ?a <http://p> ?b . ?b <http://q> ?c } UNION { ?a <http://p> ?b . ?b <http://r> ?c } UNION { \
             ?a <http://p> ?b \
             OPTIONAL { ?b <http://q> ?c . ?_u0 ?_u1 ?_u2 } \
             OPTIONAL { ?b <http://r> ?c . ?_u3 ?_u4 ?_u5 } \
             FILTER(!bound(?_u0) && !bound(?_u3)) } }",
        );
        assert_eq!(u, expect);
        assert!(is_union_normal_form(&u));
    }

    #[test]
    fn optional_right_union_without_data_kept() {
        let p = pat("SELECT * { ?a <http://p> ?b OPTIONAL { { VALUES ?c { 1 } } UNION { ?b <http://r> ?c } } }");
        let u = to_union_normal_form(&p);
        assert_eq!(u, p);
        assert!(!is_union_normal_form(&u));
        assert!(unions_only_at_top_or_in_optional_right(&u));
    }

    #[test]
    fn minus_right_union_chains() {
        let p = pat("SELECT * { ?a <http://p> ?b MINUS { { ?b <http://q> ?c } UNION { ?b <http://r> ?c } } }");
        let expect = pat("SELECT * { ?a <http://p> ?b MINUS { ?b <http://q> ?c } MINUS { ?b <http://r> ?c } }");
        assert_eq!(to_union_normal_form(&p), expect);
    }

    #[test]
    fn fresh_names_avoid_existing() {
        let p = pat("SELECT * { ?_u0 <http://p> ?b OPTIONAL { { ?b <http://q> ?c } UNION { ?b <http://r> ?c } } }");
        let last = to_union_normal_form(&p).union_branches().last().copied().cloned().unwrap();
        let expect = pat(
            "SELECT * { ?_u0 <http://p> ?b \
             OPTIONAL { ?b <http://q> ?c . ?_u1 ?_u2 ?_u3 } \
             OPTIONAL { ?b <http://r> ?c . ?_u4 ?_u5 ?_u6 } \
             FILTER(!bound(?_u1) && !bound(?_u4)) }",
        );
        assert_eq!(last, expect);
    }

    #[test]
    fn labels() {
        assert_eq!(label("SELECT * { ?s ?p ?o }"), Complexity::Ptime);
        assert_eq!(label("SELECT * { ?s ?p ?o FILTER(?o = 1) }"), Complexity::Ptime);
        assert_eq!(
            label("SELECT * { { ?s <http://a> ?o } UNION { ?s <http://b> ?o } }"),
            Complexity::Ptime
        );
        assert_eq!(
            label("SELECT * { ?s <http://c> ?x { ?s <http://a> ?o } UNION { ?s <http://b> ?o } }"),
            Complexity::NpComplete
        );
        assert_eq!(
            label("SELECT * { ?s <http://c> ?x OPTIONAL { ?x <http://a> ?o } }"),
            Complexity::CoNpWellDesignedUnf
        );
        assert_eq!(
            label("SELECT * { { ?a <http://p> ?b OPTIONAL { ?b <http://q> ?c } } ?c <http://r> ?d }"),
            Complexity::PspaceComplete
        );
    }
}
