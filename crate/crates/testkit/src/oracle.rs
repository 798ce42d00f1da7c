//! Brute-force reference semantics.
//!
//! Triple patterns are answered by trying every assignment of their
//! variables over a finite term universe; compound patterns follow the
//! set-builder definitions literally with nested loops. Nothing here shares
//! code with the engine's evaluator beyond the data types.

use std::collections::{BTreeMap, BTreeSet};

use sparqlopt::algebra::{Mapping, MappingSet, QueryResult};
use sparqlopt::dataset::{Dataset, Scope};
use sparqlopt::syntax::{
    CompareOp, Condition, GraphPattern, Projection, Query, QueryForm, SelectItem, Term, Triple,
    TriplePattern, UnaryTest, Variable,
};

pub type Solution = BTreeMap<Variable, Term>;
pub type Solutions = BTreeSet<Solution>;

pub struct Oracle<'a> {
    dataset: &'a Dataset,
    universe: Vec<Term>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Tv {
    T,
    F,
    E,
}

impl<'a> Oracle<'a> {
    /// Universe: every term stored in any graph plus `extra`.
    pub fn new(dataset: &'a Dataset, extra: impl IntoIterator<Item = Term>) -> Self {
        let mut set = BTreeSet::new();
        let mut add = |t: &Triple| {
            set.insert(t.subject.clone());
            set.insert(t.predicate.clone());
            set.insert(t.object.clone());
        };
        dataset.default_graph().iter().for_each(&mut add);
        for g in dataset.graph_names() {
            dataset.named_graph(g).unwrap().iter().for_each(&mut add);
        }
        set.extend(extra.into_iter().filter(|t| !t.is_variable()));
        Oracle {
            dataset,
            universe: set.into_iter().collect(),
        }
    }

    /// Oracle whose universe also covers the constants of `p`.
    pub fn for_pattern(dataset: &'a Dataset, p: &GraphPattern) -> Self {
        Oracle::new(dataset, constants(p))
    }

    pub fn universe_size(&self) -> usize {
        self.universe.len()
    }

    pub fn eval(&self, p: &GraphPattern) -> Solutions {
        self.eval_in(p, None)
    }

    /// SELECT/ASK evaluation under set semantics. Aggregates, ordering and
    /// slicing are not modeled.
    pub fn eval_query(&self, q: &Query) -> Solutions {
        assert!(q.group_by.is_empty() && !has_aggregates(q), "aggregates are outside the oracle");
        assert!(q.order_by.is_empty() && q.limit.is_none() && q.offset.is_none());
        let sols = self.eval(&q.pattern);
        match (&q.form, &q.projection) {
            (QueryForm::Select, Projection::Items(items)) => {
                let keep: BTreeSet<&Variable> = items.iter().map(SelectItem::output).collect();
                sols.into_iter()
                    .map(|s| s.into_iter().filter(|(v, _)| keep.contains(v)).collect())
                    .collect()
            }
            (QueryForm::Select, Projection::All) => sols,
            (QueryForm::Ask, _) => {
                if sols.is_empty() {
                    Solutions::new()
                } else {
                    Solutions::from([Solution::new()])
                }
            }
            (QueryForm::Construct, _) => panic!("CONSTRUCT is outside the oracle"),
        }
    }

    fn eval_in(&self, p: &GraphPattern, graph: Option<&str>) -> Solutions {
        match p {
            GraphPattern::Empty => Solutions::from([Solution::new()]),
            GraphPattern::Triple(t) => {
                let vars = vars(p);
                self.assignments(&vars)
                    .filter(|m| self.holds(t, m, graph))
                    .collect()
            }
            GraphPattern::And(a, b) => {
                let (sa, sb) = (self.eval_in(a, graph), self.eval_in(b, graph));
                joins(&sa, &sb)
            }
            GraphPattern::Union(a, b) => {
                let mut out = self.eval_in(a, graph);
                out.extend(self.eval_in(b, graph));
                out
            }
            GraphPattern::Opt(a, b) => {
                let (sa, sb) = (self.eval_in(a, graph), self.eval_in(b, graph));
                let mut out = joins(&sa, &sb);
                out.extend(
                    sa.iter()
                        .filter(|m| !sb.iter().any(|m2| compatible(m, m2)))
                        .cloned(),
                );
                out
            }
            GraphPattern::Filter(a, r) => self
                .eval_in(a, graph)
                .into_iter()
                .filter(|m| truth(r, m) == Tv::T)
                .collect(),
            GraphPattern::NamedGraph(Term::Iri { value }, inner) => {
                self.eval_in(inner, Some(value))
            }
            GraphPattern::Values(block) => block
                .rows
                .iter()
                .map(|row| {
                    block
                        .vars
                        .iter()
                        .zip(row)
                        .filter_map(|(v, c)| c.clone().map(|c| (v.clone(), c)))
                        .collect()
                })
                .collect(),
            other => panic!("outside the oracle fragment: {other:?}"),
        }
    }

    /// Every total assignment of `vars` over the universe.
    fn assignments<'b>(&'b self, vars: &'b [Variable]) -> impl Iterator<Item = Solution> + 'b {
        let n = self.universe.len();
        let total = n.checked_pow(vars.len() as u32).expect("assignment space overflow");
        (0..total).map(move |mut code| {
            let mut m = Solution::new();
            for v in vars {
                m.insert(v.clone(), self.universe[code % n].clone());
                code /= n;
            }
            m
        })
    }

    fn holds(&self, t: &TriplePattern, m: &Solution, graph: Option<&str>) -> bool {
        let scope = match graph {
            Some(g) => Scope::Named(g.to_string()),
            None => Scope::Default,
        };
        let Some(g) = self.dataset.graph(&scope) else {
            return false;
        };
        let subst = |x: &Term| match x.as_variable() {
            Some(v) => m[v].clone(),
            None => x.clone(),
        };
        let steps: Vec<Term> = t.predicate.steps.iter().map(subst).collect();
        if let [step] = steps.as_slice() {
            return Triple::new(subst(&t.subject), step.clone(), subst(&t.object))
                .is_ok_and(|tr| g.contains(&tr));
        }
        let mut frontier = vec![subst(&t.subject)];
        for step in &steps {
            let mut next = Vec::new();
            for node in &frontier {
                for cand in &self.universe {
                    let ok = Triple::new(node.clone(), step.clone(), cand.clone())
                        .map(|tr| g.contains(&tr))
                        .unwrap_or(false);
                    if ok && !next.contains(cand) {
                        next.push(cand.clone());
                    }
                }
            }
            frontier = next;
        }
        frontier.contains(&subst(&t.object))
    }
}

fn has_aggregates(q: &Query) -> bool {
    matches!(&q.projection, Projection::Items(items)
        if items.iter().any(|i| matches!(i, SelectItem::Aggregate { .. })))
}

fn compatible(a: &Solution, b: &Solution) -> bool {
    a.iter().all(|(v, t)| b.get(v).is_none_or(|u| u == t))
}

/// { μ1 ∪ μ2 | μ1 ∈ a, μ2 ∈ b, μ1 ~ μ2 }, by nested loops.
fn joins(a: &Solutions, b: &Solutions) -> Solutions {
    let mut out = Solutions::new();
    for l in a {
        for r in b {
            if compatible(l, r) {
                let mut m = l.clone();
                m.extend(r.iter().map(|(v, t)| (v.clone(), t.clone())));
                out.insert(m);
            }
        }
    }
    out
}

fn value(t: &Term, m: &Solution) -> Option<Term> {
    match t.as_variable() {
        Some(v) => m.get(v).cloned(),
        None => Some(t.clone()),
    }
}

fn truth(r: &Condition, m: &Solution) -> Tv {
    let b = |x: bool| if x { Tv::T } else { Tv::F };
    match r {
        Condition::Bound(v) => b(m.contains_key(v)),
        Condition::Not(c) => match truth(c, m) {
            Tv::T => Tv::F,
            Tv::F => Tv::T,
            Tv::E => Tv::E,
        },
        Condition::And(x, y) => match (truth(x, m), truth(y, m)) {
            (Tv::F, _) | (_, Tv::F) => Tv::F,
            (Tv::T, Tv::T) => Tv::T,
            _ => Tv::E,
        },
        Condition::Or(x, y) => match (truth(x, m), truth(y, m)) {
            (Tv::T, _) | (_, Tv::T) => Tv::T,
            (Tv::F, Tv::F) => Tv::F,
            _ => Tv::E,
        },
        Condition::Test(test, t) => match value(t, m) {
            None => Tv::E,
            Some(t) => b(match test {
                UnaryTest::IsIri => t.is_iri(),
                UnaryTest::IsBlank => t.is_blank(),
                UnaryTest::IsLiteral => t.is_literal(),
            }),
        },
        Condition::Compare(op, x, y) => {
            let (Some(x), Some(y)) = (value(x, m), value(y, m)) else {
                return Tv::E;
            };
            for t in [&x, &y] {
                if let Term::Literal(l) = t {
                    assert!(
                        l.datatype.is_none() && l.language.is_none(),
                        "oracle compares simple literals only"
                    );
                }
            }
            match op {
                CompareOp::Eq => b(x == y),
                CompareOp::NotEq => b(x != y),
                _ => match (&x, &y) {
                    (Term::Literal(a), Term::Literal(c)) => {
                        let o = a.lexical.cmp(&c.lexical);
                        b(match op {
                            CompareOp::Lt => o.is_lt(),
                            CompareOp::Gt => o.is_gt(),
                            CompareOp::Le => o.is_le(),
                            _ => o.is_ge(),
                        })
                    }
                    _ => Tv::E,
                },
            }
        }
    }
}

/// Variables of a pattern, collected syntactically in first-seen order.
pub fn vars(p: &GraphPattern) -> Vec<Variable> {
    fn term(t: &Term, out: &mut Vec<Variable>) {
        if let Some(v) = t.as_variable() {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
    }
    fn go(p: &GraphPattern, out: &mut Vec<Variable>) {
        match p {
            GraphPattern::Empty | GraphPattern::SubSelect(_) => {}
            GraphPattern::Triple(t) => {
                term(&t.subject, out);
                t.predicate.steps.iter().for_each(|s| term(s, out));
                term(&t.object, out);
            }
            GraphPattern::And(a, b)
            | GraphPattern::Opt(a, b)
            | GraphPattern::Union(a, b)
            | GraphPattern::Minus(a, b) => {
                go(a, out);
                go(b, out);
            }
            GraphPattern::Filter(a, _) => go(a, out),
            GraphPattern::NamedGraph(g, a) => {
                term(g, out);
                go(a, out);
            }
            GraphPattern::Values(b) => {
                for v in &b.vars {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    go(p, &mut out);
    out
}

/// Ground terms written in a pattern.
pub fn constants(p: &GraphPattern) -> Vec<Term> {
    let mut out = Vec::new();
    let mut copy = p.clone();
    copy.map_terms(&mut |t| {
        if !t.is_variable() {
            out.push(t.clone());
        }
    });
    out
}

pub fn from_mapping(m: &Mapping) -> Solution {
    m.iter().map(|(v, t)| (v.clone(), t.clone())).collect()
}

pub fn from_set(ms: &MappingSet) -> Solutions {
    ms.iter().map(from_mapping).collect()
}

pub fn from_mappings<'m>(ms: impl IntoIterator<Item = &'m Mapping>) -> Solutions {
    ms.into_iter().map(from_mapping).collect()
}

/// Rows of a SELECT result, or the single empty row of a true ASK.
pub fn from_result(r: &QueryResult) -> Solutions {
    if let Some(b) = r.boolean() {
        return if b {
            Solutions::from([Solution::new()])
        } else {
            Solutions::new()
        };
    }
    from_mappings(&r.solutions().expect("SELECT or ASK result").to_mappings())
}
