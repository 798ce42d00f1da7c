//! Two-step pagination: a page query selecting item URIs and a CONSTRUCT
//! query filling in their descriptions.

use std::collections::BTreeSet;

use super::RewriteError;
use crate::algebra::visible_variables;
use crate::analysis::vars_of;
use crate::syntax::{
    vocab, GraphPattern, OrderCondition, PathExpr, Projection, Query, QueryForm, Term, Triple,
    TriplePattern, ValuesBlock, Variable,
};

#[derive(Clone, Debug)]
pub struct Pagination {
    pub item: Variable,
    pub page_query: Query,
    /// CONSTRUCT query whose leading `VALUES ?item {}` block is filled by
    /// [`Pagination::fill`].
    pub fill_query: Query,
}

impl Pagination {
    /// The fill query restricted to the given item URIs.
    pub fn fill(&self, items: &[Term]) -> Query {
        let mut q = self.fill_query.clone();
        let mut conjuncts = std::mem::replace(&mut q.pattern, GraphPattern::Empty).into_conjuncts();
        conjuncts[0] = GraphPattern::Values(ValuesBlock {
            vars: vec![self.item.clone()],
            rows: items.iter().map(|t| vec![Some(t.clone())]).collect(),
        });
        q.pattern = GraphPattern::and_all(conjuncts);
        q
    }
}

/// Builds the page query for page `page_index` (zero-based) and the fill
/// query. `item` defaults to the first projected variable; `order` defaults
/// to the query's own ORDER BY. The item variable is appended as a final
/// sort key so pages never overlap.
pub fn generate_pagination(
    q: &Query,
    page_size: usize,
    page_index: usize,
    order: &[OrderCondition],
    item: Option<&Variable>,
) -> Result<Pagination, RewriteError> {
    if q.form != QueryForm::Select {
        return Err(RewriteError::ShapeMismatch("pagination needs a SELECT query".into()));
    }
    let visible = visible_variables(&q.pattern);
    let outputs: Vec<Variable> = match &q.projection {
        Projection::All => visible.clone(),
        Projection::Items(_) => q.projected_vars().into_iter().cloned().collect(),
    };
    let item = match item {
        Some(v) => v.clone(),
        None => outputs.first().cloned().ok_or(RewriteError::MissingItemVariable)?,
    };
    let grouped = q.is_grouped();
    let bindable: BTreeSet<&Variable> = if grouped {
        outputs.iter().collect()
    } else {
        visible.iter().collect()
    };
    if !bindable.contains(&item) {
        return Err(RewriteError::UnboundVariable(item));
    }
    let mut order: Vec<OrderCondition> = if order.is_empty() {
        q.order_by.clone()
    } else {
        order.to_vec()
    };
    for o in &order {
        if !bindable.contains(&o.var) {
            return Err(RewriteError::UnboundVariable(o.var.clone()));
        }
    }
    if !order.iter().any(|o| o.var == item) {
        order.push(OrderCondition::asc(item.clone()));
    }

    let mut columns = vec![item.clone()];
    for o in &order {
        if !columns.contains(&o.var) {
            columns.push(o.var.clone());
        }
    }
    let source = if grouped {
        let mut inner = q.clone();
        inner.order_by.clear();
        inner.limit = None;
        inner.offset = None;
        inner.prefixes.clear();
        GraphPattern::SubSelect(Box::new(inner))
    } else {
        q.pattern.clone()
    };
    let mut page_query = Query::select_vars(columns, source);
    page_query.distinct = true;
    page_query.order_by = order;
    page_query.limit = Some(page_size);
    page_query.offset = Some(page_index * page_size);
    page_query.prefixes = q.prefixes.clone();

    let (template, pattern) = expand_paths(&q.pattern);
    let values = GraphPattern::Values(ValuesBlock {
        vars: vec![item.clone()],
        rows: Vec::new(),
    });
    let fill_query = Query::construct(template, GraphPattern::And(Box::new(values), Box::new(pattern)))
        .with_prefixes(q.prefixes.clone());
    Ok(Pagination {
        item,
        page_query,
        fill_query,
    })
}

/// Replaces every sequence path by a chain through fresh variables and
/// returns the resulting triple patterns alongside the pattern.
fn expand_paths(p: &GraphPattern) -> (Vec<TriplePattern>, GraphPattern) {
    let used = vars_of(p);
    let mut counter = 0usize;
    let mut fresh = || loop {
        counter += 1;
        let v = Variable::new(format!("step{counter}"));
        if !used.contains(&v) {
            return v;
        }
    };
    fn walk(p: &GraphPattern, fresh: &mut dyn FnMut() -> Variable) -> GraphPattern {
        match p {
            GraphPattern::Triple(t) if !t.predicate.is_single() => {
                let mut subject = t.subject.clone();
                let mut parts = Vec::new();
                let n = t.predicate.steps.len();
                for (i, step) in t.predicate.steps.iter().enumerate() {
                    let object = if i + 1 == n {
                        t.object.clone()
                    } else {
                        fresh().into()
                    };
                    parts.push(GraphPattern::triple(TriplePattern::with_path(
                        subject,
                        PathExpr::single(step.clone()),
                        object.clone(),
                    )));
                    subject = object;
                }
                GraphPattern::and_all(parts)
            }
            GraphPattern::And(l, r) => GraphPattern::and(walk(l, fresh), walk(r, fresh)),
            GraphPattern::Opt(l, r) => GraphPattern::opt(walk(l, fresh), walk(r, fresh)),
            GraphPattern::Union(l, r) => GraphPattern::union(walk(l, fresh), walk(r, fresh)),
            GraphPattern::Minus(l, r) => GraphPattern::minus(walk(l, fresh), walk(r, fresh)),
            GraphPattern::Filter(inner, c) => GraphPattern::filter(walk(inner, fresh), c.clone()),
            GraphPattern::NamedGraph(g, inner) => GraphPattern::graph(g.clone(), walk(inner, fresh)),
            other => other.clone(),
        }
    }
    let pattern = walk(p, &mut fresh);
    let mut template: Vec<TriplePattern> = Vec::new();
    for t in pattern.triple_patterns() {
        if !template.contains(t) {
            template.push(t.clone());
        }
    }
    (template, pattern)
}

/// `page rdf:first i1 ; rdf:rest _:b1 . _:b1 rdf:first i2 ; ...` ending in
/// `rdf:nil`. An empty page is a single `page rdf:rest rdf:nil` triple.
pub fn page_skeleton(page: &Term, items: &[Term]) -> Vec<Triple> {
    let first = Term::iri(vocab::RDF_FIRST);
    let rest = Term::iri(vocab::RDF_REST);
    let nil = Term::iri(vocab::RDF_NIL);
    let mut out = Vec::new();
    if items.is_empty() {
        out.push(triple(page.clone(), rest, nil));
        return out;
    }
    let mut node = page.clone();
    for (i, item) in items.iter().enumerate() {
        out.push(triple(node.clone(), first.clone(), item.clone()));
        let next = if i + 1 == items.len() {
            nil.clone()
        } else {
            Term::blank(format!("list{}", i + 1))
        };
        out.push(triple(node, rest.clone(), next.clone()));
        node = next;
    }
    out
}

fn triple(s: Term, p: Term, o: Term) -> Triple {
    Triple {
        subject: s,
        predicate: p,
        object: o,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_query, serialize_query};

    fn flat(q: &Query) -> String {
        serialize_query(q).split_whitespace().collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn first_page_limits() {
        let q = parse_query(
            "PREFIX : <http://ex.org/> SELECT ?i ?l WHERE { ?i :label ?l }",
            None,
        )
        .unwrap();
        let p = generate_pagination(&q, 10, 0, &[], None).unwrap();
        assert_eq!(
            flat(&p.page_query),
            "PREFIX : <http://ex.org/> SELECT DISTINCT ?i WHERE { ?i :label ?l . } ORDER BY ?i LIMIT 10 OFFSET 0"
        );
    }

    #[test]
    fn aggregate_query_orders_outside_subselect() {
        let q = parse_query(
            "PREFIX : <http://ex.org/> SELECT ?i (COUNT(?l) AS ?n) WHERE { ?i :label ?l } GROUP BY ?i",
            None,
        )
        .unwrap();
        let p = generate_pagination(&q, 5, 2, &[OrderCondition::desc(Variable::new("n"))], None)
            .unwrap();
        let text = flat(&p.page_query);
        assert!(text.contains("WHERE { SELECT ?i (COUNT(?l) AS ?n)"), "{text}");
        assert!(text.ends_with("ORDER BY DESC(?n) ?i LIMIT 5 OFFSET 10"), "{text}");
    }

    #[test]
    fn fill_query_expands_paths() {
        let q = parse_query(
            "PREFIX : <http://ex.org/> SELECT ?i ?o WHERE { ?i :a/:b ?o }",
            None,
        )
        .unwrap();
        let p = generate_pagination(&q, 10, 0, &[], None).unwrap();
        assert_eq!(p.fill_query.construct_template.len(), 2);
        let filled = p.fill(&[Term::iri("http://ex.org/x")]);
        assert!(serialize_query(&filled).contains("VALUES ?i { :x }"));
    }

    #[test]
    fn order_variable_must_be_bound() {
        let q = parse_query("SELECT ?i WHERE { ?i ?p ?o }", None).unwrap();
        let e = generate_pagination(&q, 10, 0, &[OrderCondition::asc(Variable::new("z"))], None)
            .unwrap_err();
        assert!(matches!(e, RewriteError::UnboundVariable(_)));
    }

    #[test]
    fn skeleton_is_a_list() {
        let page = Term::iri("http://ex.org/page1");
        let items = [Term::iri("http://ex.org/a"), Term::iri("http://ex.org/b")];
        let t = page_skeleton(&page, &items);
        assert_eq!(t.len(), 4);
        assert_eq!(t[3].object, Term::iri(vocab::RDF_NIL));
    }
}
