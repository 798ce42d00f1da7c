//! Data-driven placement of OPTIONAL blocks.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::view::{and_triples, conjunctive_triples};
use super::RewriteError;
use crate::algebra::{evaluate_query, QueryResult};
use crate::analysis::vars_of;
use crate::dataset::Dataset;
use crate::syntax::{
    serialize_query, serialize_triple_pattern, GraphPattern, Projection, Query, TriplePattern,
    Variable,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct ProbeError(pub String);

/// Answers ASK queries against some dataset.
pub trait AskExecutor {
    fn ask(&self, query: &Query) -> Result<bool, ProbeError>;
}

/// Evaluates probes with the reference evaluator.
pub struct LocalExecutor<'a>(pub &'a Dataset);

impl AskExecutor for LocalExecutor<'_> {
    fn ask(&self, query: &Query) -> Result<bool, ProbeError> {
        match evaluate_query(query, self.0) {
            Ok(QueryResult::Boolean(b)) => Ok(b),
            Ok(_) => Err(ProbeError("probe is not an ASK query".into())),
            Err(e) => Err(ProbeError(e.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeRecord {
    pub query: String,
    pub answer: bool,
    pub cached: bool,
}

/// An executor with an answer cache keyed on the serialized probe.
pub struct AskProbe<E> {
    executor: E,
    cache: BTreeMap<String, bool>,
    log: Vec<ProbeRecord>,
}

impl<E: AskExecutor> AskProbe<E> {
    pub fn new(executor: E) -> Self {
        AskProbe {
            executor,
            cache: BTreeMap::new(),
            log: Vec::new(),
        }
    }

    pub fn ask(&mut self, q: &Query) -> Result<bool, ProbeError> {
        let key = serialize_query(q);
        if let Some(&answer) = self.cache.get(&key) {
            self.log.push(ProbeRecord {
                query: key,
                answer,
                cached: true,
            });
            return Ok(answer);
        }
        let answer = self.executor.ask(q)?;
        self.cache.insert(key.clone(), answer);
        self.log.push(ProbeRecord {
            query: key,
            answer,
            cached: false,
        });
        Ok(answer)
    }

    pub fn executor(&self) -> &E {
        &self.executor
    }

    /// Every probe asked, cached or not, in order.
    pub fn log(&self) -> &[ProbeRecord] {
        &self.log
    }

    /// Number of probes that reached the executor.
    pub fn executed(&self) -> usize {
        self.log.iter().filter(|r| !r.cached).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Placement {
    Required,
    NewOptional { group: usize },
    JoinedOptional { group: usize },
    NestedOptional { group: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decision {
    pub pattern: String,
    pub probe: String,
    pub answer: bool,
    pub placement: Placement,
}

#[derive(Clone, Debug)]
pub struct Minimized {
    pub query: Query,
    pub required: Vec<TriplePattern>,
    pub optional: Vec<GraphPattern>,
    pub decisions: Vec<Decision>,
}

struct Group {
    pattern: GraphPattern,
    vars: BTreeSet<Variable>,
}

/// Splits the non-core triples of `p` into required patterns and OPTIONAL
/// groups by probing the data.
///
/// The queue is scanned in document order. A pattern connected to the
/// required part is probed with `ASK { required MINUS { t } }`; a pattern
/// connected only to optional groups is probed against the first such
/// group. A pass that places nothing fails with the remaining patterns.
pub fn minimize_optionals<E: AskExecutor>(
    p: &GraphPattern,
    core: &GraphPattern,
    probe: &mut AskProbe<E>,
    prefixes: &BTreeMap<String, String>,
) -> Result<Minimized, RewriteError> {
    let all = conjunctive_triples(p)?;
    let core = conjunctive_triples(core)?;
    for c in &core {
        if !all.contains(c) {
            return Err(RewriteError::CoreNotInPattern(serialize_triple_pattern(c, prefixes)));
        }
    }
    let mut required = core.clone();
    let mut required_vars: BTreeSet<Variable> = vars_of(&required);
    let mut queue: Vec<TriplePattern> = all.into_iter().filter(|t| !core.contains(t)).collect();
    let mut groups: Vec<Group> = Vec::new();
    let mut decisions = Vec::new();
    let ask = |pattern: GraphPattern, t: &TriplePattern| {
        Query::ask(GraphPattern::minus(pattern, GraphPattern::triple(t.clone())))
            .with_prefixes(prefixes.clone())
    };

    while !queue.is_empty() {
        let mut moved = false;
        let mut i = 0;
        while i < queue.len() {
            let t = &queue[i];
            let tv = vars_of(t);
            let text = serialize_triple_pattern(t, prefixes);
            if !tv.is_disjoint(&required_vars) {
                let q = ask(and_triples(required.clone()), t);
                let answer = probe.ask(&q)?;
                let t = queue.remove(i);
                let placement = if answer {
                    groups.push(Group {
                        pattern: GraphPattern::triple(t.clone()),
                        vars: tv,
                    });
                    Placement::NewOptional {
                        group: groups.len() - 1,
                    }
                } else {
                    required_vars.extend(tv);
                    required.push(t);
                    Placement::Required
                };
                decisions.push(Decision {
                    pattern: text,
                    probe: serialize_query(&q),
                    answer,
                    placement,
                });
                moved = true;
                continue;
            }
            let Some(j) = groups.iter().position(|g| !tv.is_disjoint(&g.vars)) else {
                i += 1;
                continue;
            };
            let q = ask(groups[j].pattern.clone(), t);
            let answer = probe.ask(&q)?;
            let t = queue.remove(i);
            let g = &mut groups[j];
            let current = std::mem::replace(&mut g.pattern, GraphPattern::Empty);
            let placement = if answer {
                g.pattern = GraphPattern::opt(current, GraphPattern::triple(t));
                Placement::NestedOptional { group: j }
            } else {
                g.pattern = GraphPattern::and(current, GraphPattern::triple(t));
                Placement::JoinedOptional { group: j }
            };
            g.vars.extend(tv);
            decisions.push(Decision {
                pattern: text,
                probe: serialize_query(&q),
                answer,
                placement,
            });
            moved = true;
        }
        if !moved {
            return Err(RewriteError::Unconnected(
                queue
                    .iter()
                    .map(|t| serialize_triple_pattern(t, prefixes))
                    .collect(),
            ));
        }
    }

    let optional: Vec<GraphPattern> = groups.into_iter().map(|g| g.pattern).collect();
    let mut pattern = and_triples(required.clone());
    for g in &optional {
        pattern = GraphPattern::opt(pattern, g.clone());
    }
    let query = Query::select(Projection::All, pattern).with_prefixes(prefixes.clone());
    Ok(Minimized {
        query,
        required,
        optional,
        decisions,
    })
}
