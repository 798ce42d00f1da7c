//! Collapsing repeated bindings with GROUP_CONCAT.

use super::{RewriteError, RewriteReport, Rewritten};
use crate::algebra::visible_variables;
use crate::syntax::{
    Aggregate, AggregateArg, AggregateFunction, GraphPattern, Projection, Query, QueryForm,
    SelectItem, Variable,
};

const DEFAULT_SEPARATOR: &str = ", ";

/// Replaces each aggregated variable `v` in the projection by
/// `(GROUP_CONCAT(v) AS v)` and groups by the remaining projected variables.
pub fn reduce_cartesian(
    q: &Query,
    aggregated: &[Variable],
    separator: &str,
) -> Result<Rewritten, RewriteError> {
    let mut report = RewriteReport::new("aggregate");
    if aggregated.is_empty() {
        return Ok(Rewritten {
            query: q.clone(),
            report,
        });
    }
    if q.form != QueryForm::Select {
        return Err(RewriteError::ShapeMismatch("aggregation needs a SELECT query".into()));
    }
    if q.is_grouped() {
        return Err(RewriteError::AlreadyAggregated);
    }
    let visible = visible_variables(&q.pattern);
    let projected: Vec<Variable> = match &q.projection {
        Projection::All => visible.clone(),
        Projection::Items(_) => q.projected_vars().into_iter().cloned().collect(),
    };
    for v in aggregated {
        if !projected.contains(v) {
            return Err(RewriteError::NotProjected(v.clone()));
        }
        if q.order_by.iter().any(|o| &o.var == v) {
            return Err(RewriteError::AggregatedOrderVariable(v.clone()));
        }
    }

    let hidden = visible.iter().any(|v| !projected.contains(v));
    let source = if hidden || q.distinct {
        let mut inner = Query::select_vars(projected.clone(), q.pattern.clone());
        inner.distinct = q.distinct;
        report
            .actions
            .push("projected the pattern in a sub-select before grouping".into());
        GraphPattern::SubSelect(Box::new(inner))
    } else {
        q.pattern.clone()
    };

    let separator = (separator != DEFAULT_SEPARATOR).then(|| separator.to_string());
    let items: Vec<SelectItem> = projected
        .iter()
        .map(|v| {
            if aggregated.contains(v) {
                SelectItem::Aggregate {
                    aggregate: Aggregate {
                        function: AggregateFunction::GroupConcat,
                        distinct: false,
                        arg: AggregateArg::Var(v.clone()),
                        separator: separator.clone(),
                    },
                    alias: v.clone(),
                }
            } else {
                SelectItem::Var(v.clone())
            }
        })
        .collect();
    let group_by: Vec<Variable> = projected
        .iter()
        .filter(|v| !aggregated.contains(v))
        .cloned()
        .collect();
    for v in aggregated {
        report.actions.push(format!("GROUP_CONCAT over {v}"));
    }
    if !group_by.is_empty() {
        let names: Vec<String> = group_by.iter().map(Variable::to_string).collect();
        report.actions.push(format!("GROUP BY {}", names.join(" ")));
    }

    let mut agg = Query::select(Projection::Items(items), source);
    agg.group_by = group_by;
    agg.prefixes = q.prefixes.clone();
    if q.order_by.is_empty() {
        agg.limit = q.limit;
        agg.offset = q.offset;
        if q.limit.is_some() || q.offset.is_some() {
            report
                .warnings
                .push("LIMIT/OFFSET now count groups rather than rows".into());
        }
        return Ok(Rewritten { query: agg, report });
    }
    let mut inner = agg;
    inner.prefixes.clear();
    let mut outer = Query::select_vars(projected, GraphPattern::SubSelect(Box::new(inner)));
    outer.order_by = q.order_by.clone();
    outer.limit = q.limit;
    outer.offset = q.offset;
    outer.prefixes = q.prefixes.clone();
    report
        .actions
        .push("moved ORDER BY to an outer query over the aggregation".into());
    Ok(Rewritten {
        query: outer,
        report,
    })
}
