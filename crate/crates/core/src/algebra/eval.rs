//! Recursive evaluation of graph patterns.

use std::cell::Cell;
use std::time::Instant;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use super::condition::{evaluate_condition, Truth};
use super::mapping::ops;
use super::query::evaluate_select_rows;
use super::{Mapping, MappingSet};
use crate::dataset::{match_in_graph, Dataset, Graph, Scope};
use crate::syntax::{GraphPattern, QueryShapeError, Term, TriplePattern, Variable};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    #[default]
    Set,
    Bag,
}

#[derive(Clone, Debug)]
pub struct EvalOptions {
    pub semantics: Semantics,
    /// Separator used by `GROUP_CONCAT` when the query gives none.
    pub group_concat_separator: String,
    pub deadline: Option<Instant>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            semantics: Semantics::Set,
            group_concat_separator: ", ".to_string(),
            deadline: None,
        }
    }
}

impl EvalOptions {
    /// The SPARQL 1.1 default separator (a single space).
    pub fn standard_separator(mut self) -> Self {
        self.group_concat_separator = " ".to_string();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("evaluation exceeded its deadline")]
    Timeout,
    #[error(transparent)]
    Shape(#[from] QueryShapeError),
}

pub(crate) type EResult<T> = Result<T, EvalError>;

pub(crate) struct Evaluator<'a> {
    pub(crate) dataset: &'a Dataset,
    pub(crate) opts: &'a EvalOptions,
    ticks: Cell<u32>,
    fresh: Cell<usize>,
}

/// ⟦P⟧ over `d` with the given active graph, under set semantics.
pub fn evaluate(p: &GraphPattern, d: &Dataset, active: &Scope) -> MappingSet {
    let opts = EvalOptions::default();
    evaluate_with(p, d, active, &opts)
        .expect("no deadline set")
        .into_iter()
        .collect()
}

/// Evaluation with explicit options. In bag mode the result may contain
/// duplicates.
pub fn evaluate_with(
    p: &GraphPattern,
    d: &Dataset,
    active: &Scope,
    opts: &EvalOptions,
) -> Result<Vec<Mapping>, EvalError> {
    let ev = Evaluator::new(d, opts);
    let ms = ev.eval(p, active)?;
    Ok(ev.finish(ms))
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(dataset: &'a Dataset, opts: &'a EvalOptions) -> Self {
        Evaluator {
            dataset,
            opts,
            ticks: Cell::new(0),
            fresh: Cell::new(0),
        }
    }

    /// Drops internal variables and normalizes to the chosen semantics.
    pub(crate) fn finish(&self, ms: Vec<Mapping>) -> Vec<Mapping> {
        self.norm(ms.into_iter().map(Mapping::without_internal).collect())
    }

    pub(crate) fn tick(&self) -> EResult<()> {
        let n = self.ticks.get().wrapping_add(1);
        self.ticks.set(n);
        if n.is_multiple_of(512) {
            if let Some(d) = self.opts.deadline {
                if Instant::now() >= d {
                    return Err(EvalError::Timeout);
                }
            }
        }
        Ok(())
    }

    fn norm(&self, ms: Vec<Mapping>) -> Vec<Mapping> {
        match self.opts.semantics {
            Semantics::Bag => ms,
            Semantics::Set => {
                let set: IndexSet<Mapping> = ms.into_iter().collect();
                set.into_iter().collect()
            }
        }
    }

    fn graph(&self, scope: &Scope) -> Option<&'a Graph> {
        self.dataset.graph(scope)
    }

    pub(crate) fn eval(&self, p: &GraphPattern, scope: &Scope) -> EResult<Vec<Mapping>> {
        self.tick()?;
        let out = match p {
            GraphPattern::Empty => vec![Mapping::new()],
            GraphPattern::Triple(t) => self.extend(t, scope, &Mapping::new())?,
            GraphPattern::And(l, r) => {
                let left = self.eval(l, scope)?;
                match &**r {
                    GraphPattern::Triple(t) => {
                        let mut out = Vec::new();
                        for m in &left {
                            out.extend(self.extend(t, scope, m)?);
                        }
                        out
                    }
                    other => {
                        let right = self.eval(other, scope)?;
                        self.tick()?;
                        ops::join(&left, &right)
                    }
                }
            }
            GraphPattern::Opt(l, r) => {
                let left = self.eval(l, scope)?;
                match &**r {
                    GraphPattern::Triple(t) => {
                        let mut out = Vec::new();
                        for m in &left {
                            let ext = self.extend(t, scope, m)?;
                            if ext.is_empty() {
                                out.push(m.clone());
                            } else {
                                out.extend(ext);
                            }
                        }
                        out
                    }
                    other => {
                        let right = self.eval(other, scope)?;
                        self.tick()?;
                        ops::left_join(&left, &right)
                    }
                }
            }
            GraphPattern::Union(l, r) => {
                let mut left = self.eval(l, scope)?;
                left.extend(self.eval(r, scope)?);
                left
            }
            GraphPattern::Filter(inner, c) => self
                .eval(inner, scope)?
                .into_iter()
                .filter(|m| evaluate_condition(c, m) == Truth::True)
                .collect(),
            GraphPattern::Minus(l, r) => {
                let left = self.eval(l, scope)?;
                let right: Vec<Mapping> = self
                    .eval(r, scope)?
                    .into_iter()
                    .map(Mapping::without_internal)
                    .collect();
                ops::minus(&left, &right)
            }
            GraphPattern::NamedGraph(name, inner) => match name {
                Term::Variable { name: v } => {
                    let mut out = Vec::new();
                    for g in self.dataset.graph_names() {
                        let gname = Term::iri(g);
                        for mut m in self.eval(inner, &Scope::Named(g.to_string()))? {
                            match m.get(v) {
                                Some(t) if *t != gname => continue,
                                Some(_) => {}
                                None => m.insert(v.clone(), gname.clone()),
                            }
                            out.push(m);
                        }
                    }
                    out
                }
                Term::Iri { value } => self.eval(inner, &Scope::Named(value.clone()))?,
                _ => Vec::new(),
            },
            GraphPattern::Values(block) => block
                .rows
                .iter()
                .map(|row| {
                    block
                        .vars
                        .iter()
                        .zip(row)
                        .filter_map(|(v, c)| c.clone().map(|t| (v.clone(), t)))
                        .collect()
                })
                .collect(),
            GraphPattern::SubSelect(q) => evaluate_select_rows(self, q)?,
        };
        Ok(self.norm(out))
    }

    /// Extensions of `base` matching `t` (including sequence paths).
    pub(crate) fn extend(
        &self,
        t: &TriplePattern,
        scope: &Scope,
        base: &Mapping,
    ) -> EResult<Vec<Mapping>> {
        let Some(g) = self.graph(scope) else {
            return Ok(Vec::new());
        };
        let steps = &t.predicate.steps;
        if steps.len() == 1 {
            return Ok(match_in_graph(g, &t.subject, &steps[0], &t.object, base));
        }
        let mut nodes = vec![t.subject.clone()];
        let mut fresh = Vec::new();
        for _ in 1..steps.len() {
            let n = self.fresh.get();
            self.fresh.set(n + 1);
            let v = Variable::internal(format!("path{n}"));
            fresh.push(v.clone());
            nodes.push(v.into());
        }
        nodes.push(t.object.clone());
        let mut current = vec![base.clone()];
        for (i, step) in steps.iter().enumerate() {
            let mut next = Vec::new();
            for m in &current {
                self.tick()?;
                next.extend(match_in_graph(g, &nodes[i], step, &nodes[i + 1], m));
            }
            current = next;
        }
        for m in &mut current {
            m.retain(|v| !fresh.contains(v));
        }
        Ok(current)
    }
}
