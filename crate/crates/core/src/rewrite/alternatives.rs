//! Conversion among the UNION, FILTER and VALUES forms of alternative URIs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{RewriteError, RewriteReport, Rewritten};
use crate::analysis::vars_of;
use crate::syntax::{
    CompareOp, Condition, GraphPattern, Projection, Query, SelectItem, Term, ValuesBlock, Variable,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlternativeForm {
    Union,
    Filter,
    Values,
}

impl FromStr for AlternativeForm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "union" => Ok(AlternativeForm::Union),
            "filter" => Ok(AlternativeForm::Filter),
            "values" | "bindings" => Ok(AlternativeForm::Values),
            other => Err(format!("unknown alternative form `{other}`")),
        }
    }
}

impl fmt::Display for AlternativeForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlternativeForm::Union => "union",
            AlternativeForm::Filter => "filter",
            AlternativeForm::Values => "values",
        })
    }
}

/// A pattern `body` instantiated once per constant substituted for `var`.
struct Alternatives {
    var: Variable,
    constants: Vec<Term>,
    body: GraphPattern,
    from: &'static str,
}

/// Rewrites a query that selects alternative subject URIs into `target`.
pub fn rewrite_alternatives(q: &Query, target: AlternativeForm) -> Result<Rewritten, RewriteError> {
    let alt = recognize(q)?;
    let mut report = RewriteReport::new("alternatives");
    let mut query = q.clone();
    query.pattern = match target {
        AlternativeForm::Union => {
            if q.group_by.contains(&alt.var) || q.order_by.iter().any(|o| o.var == alt.var) {
                return Err(RewriteError::ShapeMismatch(format!(
                    "{} is used in GROUP BY or ORDER BY",
                    alt.var
                )));
            }
            if let Projection::Items(items) = &mut query.projection {
                let before = items.len();
                items.retain(|i| !matches!(i, SelectItem::Var(v) if *v == alt.var));
                if items.is_empty() {
                    return Err(RewriteError::ShapeMismatch(format!(
                        "{} is the only projected variable",
                        alt.var
                    )));
                }
                if items.len() != before {
                    report.actions.push(format!("removed {} from the projection", alt.var));
                }
            }
            if alt.from != "union" {
                report.warnings.push(format!(
                    "UNION form drops {}: results no longer show which URI they belong to",
                    alt.var
                ));
            }
            let branches = alt.constants.iter().map(|c| substitute(&alt.body, &alt.var, c));
            GraphPattern::union_all(branches).expect("at least one constant")
        }
        AlternativeForm::Filter => {
            let cond = Condition::any_of(
                alt.constants
                    .iter()
                    .map(|c| Condition::eq(alt.var.clone().into(), c.clone())),
            )
            .expect("at least one constant");
            GraphPattern::filter(alt.body.clone(), cond)
        }
        AlternativeForm::Values => GraphPattern::and(
            GraphPattern::Values(ValuesBlock {
                vars: vec![alt.var.clone()],
                rows: alt.constants.iter().map(|c| vec![Some(c.clone())]).collect(),
            }),
            alt.body.clone(),
        ),
    };
    report.actions.push(format!(
        "{} form with {} constant(s) rewritten as {target}",
        alt.from,
        alt.constants.len()
    ));
    Ok(Rewritten { query, report })
}

fn recognize(q: &Query) -> Result<Alternatives, RewriteError> {
    let p = &q.pattern;
    if let GraphPattern::Filter(body, cond) = p {
        if let Some((var, constants)) = equality_disjunction(cond) {
            return Ok(Alternatives {
                var,
                constants,
                body: (**body).clone(),
                from: "filter",
            });
        }
    }
    let conjuncts = p.conjuncts();
    let values: Vec<usize> = conjuncts
        .iter()
        .enumerate()
        .filter(|(_, c)| matches!(c, GraphPattern::Values(_)))
        .map(|(i, _)| i)
        .collect();
    if let [i] = values[..] {
        let GraphPattern::Values(block) = conjuncts[i] else { unreachable!() };
        if block.vars.len() != 1 {
            return Err(RewriteError::ShapeMismatch("VALUES binds more than one variable".into()));
        }
        let constants: Option<Vec<Term>> = block.rows.iter().map(|r| r[0].clone()).collect();
        let constants = constants
            .filter(|c| !c.is_empty())
            .ok_or_else(|| RewriteError::ShapeMismatch("VALUES has UNDEF or no rows".into()))?;
        let body = GraphPattern::and_all(
            conjuncts
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, c)| (*c).clone()),
        );
        return Ok(Alternatives {
            var: block.vars[0].clone(),
            constants,
            body,
            from: "values",
        });
    }
    let branches = p.union_branches();
    let var = fresh_variable(q);
    let mut body: Option<GraphPattern> = None;
    let mut constants = Vec::new();
    for b in &branches {
        let c = b
            .triple_patterns()
            .first()
            .map(|t| t.subject.clone())
            .filter(Term::is_iri)
            .ok_or_else(|| {
                RewriteError::ShapeMismatch("branch does not start with a constant subject".into())
            })?;
        let mut abstracted = (*b).clone();
        abstracted.map_terms(&mut |t| {
            if *t == c {
                *t = var.clone().into();
            }
        });
        match &body {
            None => body = Some(abstracted),
            Some(existing) if *existing == abstracted => {}
            Some(_) => {
                return Err(RewriteError::ShapeMismatch(
                    "UNION branches differ beyond their subject".into(),
                ))
            }
        }
        constants.push(c);
    }
    Ok(Alternatives {
        var,
        constants,
        body: body.expect("a pattern has at least one branch"),
        from: if branches.len() > 1 { "union" } else { "single-URI" },
    })
}

fn equality_disjunction(c: &Condition) -> Option<(Variable, Vec<Term>)> {
    fn collect<'a>(c: &'a Condition, out: &mut Vec<(&'a Variable, &'a Term)>) -> bool {
        match c {
            Condition::Or(a, b) => collect(a, out) && collect(b, out),
            Condition::Compare(CompareOp::Eq, a, b) => match (a.as_variable(), b.as_variable()) {
                (Some(v), None) if b.is_iri() => {
                    out.push((v, b));
                    true
                }
                (None, Some(v)) if a.is_iri() => {
                    out.push((v, a));
                    true
                }
                _ => false,
            },
            _ => false,
        }
    }
    let mut pairs = Vec::new();
    if !collect(c, &mut pairs) {
        return None;
    }
    let var = pairs[0].0;
    if pairs.iter().any(|(v, _)| *v != var) {
        return None;
    }
    Some((var.clone(), pairs.into_iter().map(|(_, t)| t.clone()).collect()))
}

fn substitute(p: &GraphPattern, var: &Variable, c: &Term) -> GraphPattern {
    let mut out = p.clone();
    out.map_terms(&mut |t| {
        if t.as_variable() == Some(var) {
            *t = c.clone();
        }
    });
    out
}

fn fresh_variable(q: &Query) -> Variable {
    let mut used = vars_of(&q.pattern);
    used.extend(q.projected_vars().into_iter().cloned());
    let base = Variable::new("s");
    if !used.contains(&base) {
        return base;
    }
    (1..)
        .map(|i| Variable::new(format!("s{i}")))
        .find(|v| !used.contains(v))
        .expect("unbounded")
}
