//! Query forms, grouping, aggregates and solution modifiers.

use std::cmp::Ordering;

use indexmap::{IndexMap, IndexSet};

use super::eval::{EResult, EvalOptions, Evaluator, Semantics};
use super::{EvalError, Mapping};
use crate::dataset::{Dataset, Scope};
use crate::syntax::{
    vocab, Aggregate, AggregateArg, AggregateFunction, GraphPattern, Literal, Projection, Query,
    QueryForm, SelectItem, Term, Triple, Variable,
};

/// Projected rows in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSequence {
    pub variables: Vec<Variable>,
    pub rows: Vec<Vec<Option<Term>>>,
}

impl SolutionSequence {
    pub fn to_mappings(&self) -> Vec<Mapping> {
        self.rows
            .iter()
            .map(|row| {
                self.variables
                    .iter()
                    .zip(row)
                    .filter_map(|(v, c)| c.clone().map(|t| (v.clone(), t)))
                    .collect()
            })
            .collect()
    }

    /// Values of one column, in row order.
    pub fn column(&self, v: &Variable) -> Vec<Option<&Term>> {
        match self.variables.iter().position(|x| x == v) {
            Some(i) => self.rows.iter().map(|r| r[i].as_ref()).collect(),
            None => vec![None; self.rows.len()],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QueryResult {
    Solutions(SolutionSequence),
    Boolean(bool),
    Graph(Vec<Triple>),
}

impl QueryResult {
    pub fn solutions(&self) -> Option<&SolutionSequence> {
        match self {
            QueryResult::Solutions(s) => Some(s),
            _ => None,
        }
    }

    pub fn boolean(&self) -> Option<bool> {
        match self {
            QueryResult::Boolean(b) => Some(*b),
            _ => None,
        }
    }

    pub fn triples(&self) -> Option<&[Triple]> {
        match self {
            QueryResult::Graph(t) => Some(t),
            _ => None,
        }
    }
}

pub fn evaluate_query(q: &Query, d: &Dataset) -> Result<QueryResult, EvalError> {
    evaluate_query_with(q, d, &EvalOptions::default())
}

pub fn evaluate_query_with(
    q: &Query,
    d: &Dataset,
    opts: &EvalOptions,
) -> Result<QueryResult, EvalError> {
    q.validate()?;
    let ev = Evaluator::new(d, opts);
    match q.form {
        QueryForm::Ask => {
            let ms = ev.eval(&q.pattern, &Scope::Default)?;
            Ok(QueryResult::Boolean(!ms.is_empty()))
        }
        QueryForm::Select => Ok(QueryResult::Solutions(select(&ev, q)?)),
        QueryForm::Construct => {
            let rows = solution_mappings(&ev, q)?;
            Ok(QueryResult::Graph(construct(q, &rows)))
        }
    }
}

/// Mappings produced by a sub-select, for use inside a pattern.
pub(crate) fn evaluate_select_rows(ev: &Evaluator<'_>, q: &Query) -> EResult<Vec<Mapping>> {
    q.validate()?;
    Ok(select(ev, q)?.to_mappings())
}

/// Solutions after grouping and ordering, before projection.
fn solution_mappings(ev: &Evaluator<'_>, q: &Query) -> EResult<Vec<Mapping>> {
    let ms = ev.eval(&q.pattern, &Scope::Default)?;
    let ms = ev.finish(ms);
    let mut rows = if q.is_grouped() { group(ev, q, ms)? } else { ms };
    if !q.order_by.is_empty() {
        rows.sort_by(|a, b| {
            for c in &q.order_by {
                let o = term_order(a.get(&c.var), b.get(&c.var));
                let o = if c.descending { o.reverse() } else { o };
                if o != Ordering::Equal {
                    return o;
                }
            }
            Ordering::Equal
        });
    }
    if q.form == QueryForm::Construct {
        let offset = q.offset.unwrap_or(0);
        let limit = q.limit.unwrap_or(usize::MAX);
        rows = rows.into_iter().skip(offset).take(limit).collect();
    }
    Ok(rows)
}

fn select(ev: &Evaluator<'_>, q: &Query) -> EResult<SolutionSequence> {
    let rows = solution_mappings(ev, q)?;
    let variables: Vec<Variable> = match &q.projection {
        Projection::Items(items) => items.iter().map(|i| i.output().clone()).collect(),
        Projection::All => visible_variables(&q.pattern),
    };
    let dedup = q.distinct || ev.opts.semantics == Semantics::Set;
    let mut seen = IndexSet::new();
    let mut out = Vec::new();
    for m in rows {
        let row: Vec<Option<Term>> = variables.iter().map(|v| m.get(v).cloned()).collect();
        if dedup && !seen.insert(row.clone()) {
            continue;
        }
        out.push(row);
    }
    let offset = q.offset.unwrap_or(0);
    let limit = q.limit.unwrap_or(usize::MAX);
    let rows = out.into_iter().skip(offset).take(limit).collect();
    Ok(SolutionSequence { variables, rows })
}

/// In-scope variables of a pattern in order of first occurrence.
pub fn visible_variables(p: &GraphPattern) -> Vec<Variable> {
    fn walk(p: &GraphPattern, out: &mut IndexSet<Variable>) {
        let mut add = |t: &Term| {
            if let Some(v) = t.as_variable() {
                if !v.is_internal() {
                    out.insert(v.clone());
                }
            }
        };
        match p {
            GraphPattern::Empty => {}
            GraphPattern::Triple(t) => {
                add(&t.subject);
                t.predicate.steps.iter().for_each(&mut add);
                add(&t.object);
            }
            GraphPattern::And(l, r) | GraphPattern::Opt(l, r) | GraphPattern::Union(l, r) => {
                walk(l, out);
                walk(r, out);
            }
            GraphPattern::Filter(inner, _) | GraphPattern::Minus(inner, _) => walk(inner, out),
            GraphPattern::NamedGraph(name, inner) => {
                add(name);
                walk(inner, out);
            }
            GraphPattern::Values(b) => {
                for v in &b.vars {
                    out.insert(v.clone());
                }
            }
            GraphPattern::SubSelect(q) => match &q.projection {
                Projection::All => {
                    for v in visible_variables(&q.pattern) {
                        out.insert(v);
                    }
                }
                Projection::Items(items) => {
                    for i in items {
                        out.insert(i.output().clone());
                    }
                }
            },
        }
    }
    let mut out = IndexSet::new();
    walk(p, &mut out);
    out.into_iter().collect()
}

fn group(ev: &Evaluator<'_>, q: &Query, ms: Vec<Mapping>) -> EResult<Vec<Mapping>> {
    let mut groups: IndexMap<Vec<Option<Term>>, Vec<Mapping>> = IndexMap::new();
    for m in ms {
        ev.tick()?;
        let key: Vec<Option<Term>> = q.group_by.iter().map(|v| m.get(v).cloned()).collect();
        groups.entry(key).or_default().push(m);
    }
    if groups.is_empty() && q.group_by.is_empty() {
        groups.insert(Vec::new(), Vec::new());
    }
    let items: &[SelectItem] = match &q.projection {
        Projection::Items(items) => items,
        Projection::All => &[],
    };
    let mut out = Vec::with_capacity(groups.len());
    for (key, members) in groups {
        let mut row = Mapping::new();
        for (v, t) in q.group_by.iter().zip(key) {
            if let Some(t) = t {
                row.insert(v.clone(), t);
            }
        }
        for item in items {
            if let SelectItem::Aggregate { aggregate, alias } = item {
                if let Some(t) = aggregate_value(aggregate, &members, &ev.opts.group_concat_separator) {
                    row.insert(alias.clone(), t);
                }
            }
        }
        out.push(row);
    }
    Ok(out)
}

fn aggregate_value(a: &Aggregate, members: &[Mapping], default_sep: &str) -> Option<Term> {
    if let AggregateArg::Star = a.arg {
        let n = if a.distinct {
            members.iter().collect::<IndexSet<_>>().len()
        } else {
            members.len()
        };
        return match a.function {
            AggregateFunction::Count => Some(Term::literal(Literal::integer(n as i64))),
            _ => None,
        };
    }
    let AggregateArg::Var(v) = &a.arg else {
        unreachable!()
    };
    let mut values: Vec<&Term> = members.iter().filter_map(|m| m.get(v)).collect();
    if a.distinct {
        let set: IndexSet<&Term> = values.into_iter().collect();
        values = set.into_iter().collect();
    }
    match a.function {
        AggregateFunction::Count => Some(Term::literal(Literal::integer(values.len() as i64))),
        AggregateFunction::Sample => values.first().map(|t| (*t).clone()),
        AggregateFunction::Min => values
            .iter()
            .min_by(|x, y| term_order(Some(x), Some(y)))
            .map(|t| (*t).clone()),
        AggregateFunction::Max => values
            .iter()
            .max_by(|x, y| term_order(Some(x), Some(y)))
            .map(|t| (*t).clone()),
        AggregateFunction::GroupConcat => {
            let sep = a.separator.as_deref().unwrap_or(default_sep);
            let parts: Vec<&str> = values.iter().map(|t| t.lexical()).collect();
            Some(Term::literal(Literal::simple(parts.join(sep))))
        }
        AggregateFunction::Sum | AggregateFunction::Avg => {
            let lits: Option<Vec<&Literal>> = values
                .iter()
                .map(|t| match t {
                    Term::Literal(l) if l.numeric_value().is_some() => Some(l),
                    _ => None,
                })
                .collect();
            let lits = lits?;
            let all_int = lits
                .iter()
                .all(|l| l.datatype.as_deref() == Some(vocab::XSD_INTEGER));
            let total: f64 = lits.iter().filter_map(|l| l.numeric_value()).sum();
            if a.function == AggregateFunction::Sum {
                if all_int {
                    let exact: Option<i64> = lits
                        .iter()
                        .try_fold(0i64, |acc, l| acc.checked_add(l.lexical.trim().parse().ok()?));
                    if let Some(s) = exact {
                        return Some(Term::literal(Literal::integer(s)));
                    }
                }
                Some(Term::literal(decimal(total)))
            } else if lits.is_empty() {
                Some(Term::literal(Literal::integer(0)))
            } else {
                Some(Term::literal(decimal(total / lits.len() as f64)))
            }
        }
    }
}

fn decimal(x: f64) -> Literal {
    if !x.is_finite() {
        let lex = if x.is_nan() {
            "NaN"
        } else if x > 0.0 {
            "INF"
        } else {
            "-INF"
        };
        return Literal::typed(lex, vocab::XSD_DOUBLE);
    }
    let mut s = format!("{x}");
    if !s.contains('.') {
        s.push_str(".0");
    }
    Literal::typed(s, vocab::XSD_DECIMAL)
}

fn kind_rank(t: Option<&Term>) -> u8 {
    match t {
        None => 0,
        Some(Term::Blank { .. }) => 1,
        Some(Term::Iri { .. }) => 2,
        Some(Term::Literal(_)) => 3,
        Some(Term::Variable { .. }) => 4,
    }
}

/// Total order used by ORDER BY, MIN and MAX: unbound < blank < IRI <
/// literal. Numeric literals compare by value, other literals by datatype,
/// then lexical form, then language.
pub fn term_order(a: Option<&Term>, b: Option<&Term>) -> Ordering {
    let rank = kind_rank(a).cmp(&kind_rank(b));
    if rank != Ordering::Equal {
        return rank;
    }
    match (a, b) {
        (Some(Term::Literal(x)), Some(Term::Literal(y))) => {
            if let (Some(nx), Some(ny)) = (x.numeric_value(), y.numeric_value()) {
                if let Some(o) = nx.partial_cmp(&ny) {
                    if o != Ordering::Equal {
                        return o;
                    }
                }
            }
            x.effective_datatype()
                .cmp(y.effective_datatype())
                .then_with(|| x.lexical.cmp(&y.lexical))
                .then_with(|| x.language.cmp(&y.language))
        }
        (Some(x), Some(y)) => x.lexical().cmp(y.lexical()),
        _ => Ordering::Equal,
    }
}

fn construct(q: &Query, rows: &[Mapping]) -> Vec<Triple> {
    let mut out = IndexSet::new();
    for (i, m) in rows.iter().enumerate() {
        for t in &q.construct_template {
            let inst = |term: &Term| match term {
                Term::Blank { label } => Some(Term::blank(format!("{label}_{i}"))),
                Term::Variable { name } => m.get(name).cloned(),
                other => Some(other.clone()),
            };
            let (Some(s), Some(o)) = (inst(&t.subject), inst(&t.object)) else {
                continue;
            };
            if !t.predicate.is_single() {
                continue;
            }
            let Some(p) = inst(t.predicate.first()) else {
                continue;
            };
            if let Ok(tr) = Triple::new(s, p, o) {
                out.insert(tr);
            }
        }
    }
    out.into_iter().collect()
}
