//! Abstract syntax for the supported SPARQL fragment.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::term::{Term, Variable};

/// A predicate position: a plain predicate (length 1) or a sequence path.
///
/// Steps of a path longer than one are IRIs; a single step may be a variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PathExpr {
    pub steps: Vec<Term>,
}

impl PathExpr {
    pub fn single(step: Term) -> Self {
        PathExpr { steps: vec![step] }
    }

    pub fn sequence(steps: Vec<Term>) -> Self {
        assert!(!steps.is_empty(), "path needs at least one step");
        PathExpr { steps }
    }

    pub fn is_single(&self) -> bool {
        self.steps.len() == 1
    }

    pub fn first(&self) -> &Term {
        &self.steps[0]
    }

    /// True when every step is a constant IRI.
    pub fn is_constant(&self) -> bool {
        self.steps.iter().all(Term::is_iri)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TriplePattern {
    pub subject: Term,
    pub predicate: PathExpr,
    pub object: Term,
}

impl TriplePattern {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Self {
        TriplePattern {
            subject,
            predicate: PathExpr::single(predicate),
            object,
        }
    }

    pub fn with_path(subject: Term, path: PathExpr, object: Term) -> Self {
        TriplePattern {
            subject,
            predicate: path,
            object,
        }
    }

    /// All terms in document order: subject, path steps, object.
    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        std::iter::once(&self.subject)
            .chain(self.predicate.steps.iter())
            .chain(std::iter::once(&self.object))
    }

    pub fn terms_mut(&mut self) -> impl Iterator<Item = &mut Term> {
        std::iter::once(&mut self.subject)
            .chain(self.predicate.steps.iter_mut())
            .chain(std::iter::once(&mut self.object))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CompareOp {
    Eq,
    NotEq,
    Lt,
    Gt,
    Le,
    Ge,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::NotEq => "!=",
            CompareOp::Lt => "<",
            CompareOp::Gt => ">",
            CompareOp::Le => "<=",
            CompareOp::Ge => ">=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum UnaryTest {
    IsIri,
    IsBlank,
    IsLiteral,
}

/// Built-in filter condition.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Condition {
    Compare(CompareOp, Term, Term),
    Bound(Variable),
    Test(UnaryTest, Term),
    Not(Box<Condition>),
    And(Box<Condition>, Box<Condition>),
    Or(Box<Condition>, Box<Condition>),
}

impl Condition {
    pub fn eq(a: Term, b: Term) -> Self {
        Condition::Compare(CompareOp::Eq, a, b)
    }

    pub fn or(a: Condition, b: Condition) -> Self {
        Condition::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Condition, b: Condition) -> Self {
        Condition::And(Box::new(a), Box::new(b))
    }

    pub fn negate(a: Condition) -> Self {
        Condition::Not(Box::new(a))
    }

    /// Left-associated disjunction of the given conditions.
    pub fn any_of(mut items: impl Iterator<Item = Condition>) -> Option<Condition> {
        let first = items.next()?;
        Some(items.fold(first, Condition::or))
    }

    pub fn for_each_term<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        match self {
            Condition::Compare(_, a, b) => {
                f(a);
                f(b);
            }
            Condition::Bound(_) => {}
            Condition::Test(_, t) => f(t),
            Condition::Not(c) => c.for_each_term(f),
            Condition::And(a, b) | Condition::Or(a, b) => {
                a.for_each_term(f);
                b.for_each_term(f);
            }
        }
    }

    pub fn map_terms(&mut self, f: &mut impl FnMut(&mut Term)) {
        match self {
            Condition::Compare(_, a, b) => {
                f(a);
                f(b);
            }
            Condition::Bound(_) => {}
            Condition::Test(_, t) => f(t),
            Condition::Not(c) => c.map_terms(f),
            Condition::And(a, b) | Condition::Or(a, b) => {
                a.map_terms(f);
                b.map_terms(f);
            }
        }
    }
}

/// Inline data: `VALUES (?a ?b) { (x UNDEF) ... }`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ValuesBlock {
    pub vars: Vec<Variable>,
    pub rows: Vec<Vec<Option<Term>>>,
}

/// Recursive graph pattern algebra.
///
/// `Empty` is the group `{}`; its evaluation is the singleton set holding the
/// empty mapping.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GraphPattern {
    Empty,
    Triple(TriplePattern),
    And(Box<GraphPattern>, Box<GraphPattern>),
    Opt(Box<GraphPattern>, Box<GraphPattern>),
    Union(Box<GraphPattern>, Box<GraphPattern>),
    Filter(Box<GraphPattern>, Condition),
    NamedGraph(Term, Box<GraphPattern>),
    Values(ValuesBlock),
    Minus(Box<GraphPattern>, Box<GraphPattern>),
    SubSelect(Box<Query>),
}

impl GraphPattern {
    pub fn triple(t: TriplePattern) -> Self {
        GraphPattern::Triple(t)
    }

    /// Conjunction, absorbing `Empty` on either side.
    pub fn and(left: GraphPattern, right: GraphPattern) -> Self {
        match (left, right) {
            (GraphPattern::Empty, r) => r,
            (l, GraphPattern::Empty) => l,
            (l, r) => GraphPattern::And(Box::new(l), Box::new(r)),
        }
    }

    pub fn opt(left: GraphPattern, right: GraphPattern) -> Self {
        GraphPattern::Opt(Box::new(left), Box::new(right))
    }

    pub fn union(left: GraphPattern, right: GraphPattern) -> Self {
        GraphPattern::Union(Box::new(left), Box::new(right))
    }

    pub fn filter(inner: GraphPattern, cond: Condition) -> Self {
        GraphPattern::Filter(Box::new(inner), cond)
    }

    pub fn graph(name: Term, inner: GraphPattern) -> Self {
        GraphPattern::NamedGraph(name, Box::new(inner))
    }

    pub fn minus(left: GraphPattern, right: GraphPattern) -> Self {
        GraphPattern::Minus(Box::new(left), Box::new(right))
    }

    /// Left-deep conjunction of the given patterns.
    pub fn and_all(items: impl IntoIterator<Item = GraphPattern>) -> Self {
        items.into_iter().fold(GraphPattern::Empty, GraphPattern::and)
    }

    /// Left-deep union of the given patterns; `None` when empty.
    pub fn union_all(items: impl IntoIterator<Item = GraphPattern>) -> Option<Self> {
        let mut it = items.into_iter();
        let first = it.next()?;
        Some(it.fold(first, GraphPattern::union))
    }

    /// Flattens nested `And` nodes into their operands, left to right.
    pub fn conjuncts(&self) -> Vec<&GraphPattern> {
        let mut out = Vec::new();
        fn go<'a>(p: &'a GraphPattern, out: &mut Vec<&'a GraphPattern>) {
            match p {
                GraphPattern::And(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                other => out.push(other),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn into_conjuncts(self) -> Vec<GraphPattern> {
        let mut out = Vec::new();
        fn go(p: GraphPattern, out: &mut Vec<GraphPattern>) {
            match p {
                GraphPattern::And(l, r) => {
                    go(*l, out);
                    go(*r, out);
                }
                other => out.push(other),
            }
        }
        go(self, &mut out);
        out
    }

    /// Flattens nested `Union` nodes into their branches.
    pub fn union_branches(&self) -> Vec<&GraphPattern> {
        let mut out = Vec::new();
        fn go<'a>(p: &'a GraphPattern, out: &mut Vec<&'a GraphPattern>) {
            match p {
                GraphPattern::Union(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                other => out.push(other),
            }
        }
        go(self, &mut out);
        out
    }

    /// Triple patterns in document order (not descending into sub-selects).
    pub fn triple_patterns(&self) -> Vec<&TriplePattern> {
        let mut out = Vec::new();
        self.visit(&mut |p| {
            if let GraphPattern::Triple(t) = p {
                out.push(t);
            }
        });
        out
    }

    /// Pre-order traversal. Sub-select bodies are not entered.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a GraphPattern)) {
        f(self);
        match self {
            GraphPattern::Empty
            | GraphPattern::Triple(_)
            | GraphPattern::Values(_)
            | GraphPattern::SubSelect(_) => {}
            GraphPattern::And(l, r)
            | GraphPattern::Opt(l, r)
            | GraphPattern::Union(l, r)
            | GraphPattern::Minus(l, r) => {
                l.visit(f);
                r.visit(f);
            }
            GraphPattern::Filter(inner, _) | GraphPattern::NamedGraph(_, inner) => inner.visit(f),
        }
    }

    /// Applies `f` to every term in the pattern (triples, conditions, graph
    /// names, inline data). Sub-select bodies are not entered.
    pub fn map_terms(&mut self, f: &mut impl FnMut(&mut Term)) {
        match self {
            GraphPattern::Empty | GraphPattern::SubSelect(_) => {}
            GraphPattern::Triple(t) => t.terms_mut().for_each(f),
            GraphPattern::And(l, r)
            | GraphPattern::Opt(l, r)
            | GraphPattern::Union(l, r)
            | GraphPattern::Minus(l, r) => {
                l.map_terms(f);
                r.map_terms(f);
            }
            GraphPattern::Filter(inner, c) => {
                inner.map_terms(f);
                c.map_terms(f);
            }
            GraphPattern::NamedGraph(g, inner) => {
                f(g);
                inner.map_terms(f);
            }
            GraphPattern::Values(v) => {
                for row in &mut v.rows {
                    for t in row.iter_mut().flatten() {
                        f(t);
                    }
                }
            }
        }
    }

    /// Number of `Opt` nodes in the pattern.
    pub fn optional_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |p| {
            if matches!(p, GraphPattern::Opt(..)) {
                n += 1;
            }
        });
        n
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AggregateFunction {
    Count,
    Sum,
    Min,
    Max,
    Avg,
    Sample,
    GroupConcat,
}

impl AggregateFunction {
    pub fn keyword(self) -> &'static str {
        match self {
            AggregateFunction::Count => "COUNT",
            AggregateFunction::Sum => "SUM",
            AggregateFunction::Min => "MIN",
            AggregateFunction::Max => "MAX",
            AggregateFunction::Avg => "AVG",
            AggregateFunction::Sample => "SAMPLE",
            AggregateFunction::GroupConcat => "GROUP_CONCAT",
        }
    }
}

/// Aggregate argument: a variable, or `*` (COUNT only).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AggregateArg {
    Star,
    Var(Variable),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Aggregate {
    pub function: AggregateFunction,
    pub distinct: bool,
    pub arg: AggregateArg,
    /// `GROUP_CONCAT` separator when written explicitly.
    pub separator: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SelectItem {
    Var(Variable),
    Aggregate { aggregate: Aggregate, alias: Variable },
}

impl SelectItem {
    /// The variable the item binds in the result.
    pub fn output(&self) -> &Variable {
        match self {
            SelectItem::Var(v) => v,
            SelectItem::Aggregate { alias, .. } => alias,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Projection {
    /// `SELECT *`
    All,
    Items(Vec<SelectItem>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum QueryForm {
    Select,
    Ask,
    Construct,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OrderCondition {
    pub var: Variable,
    pub descending: bool,
}

impl OrderCondition {
    pub fn asc(var: Variable) -> Self {
        OrderCondition {
            var,
            descending: false,
        }
    }

    pub fn desc(var: Variable) -> Self {
        OrderCondition {
            var,
            descending: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Query {
    pub form: QueryForm,
    pub distinct: bool,
    pub projection: Projection,
    pub construct_template: Vec<TriplePattern>,
    pub pattern: GraphPattern,
    pub group_by: Vec<Variable>,
    pub order_by: Vec<OrderCondition>,
    pub limit: Option<usize>,
    pub offset: Option<usize>,
    pub prefixes: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryShapeError {
    #[error("variable {0} is projected but neither grouped nor aggregated")]
    UngroupedProjection(Variable),
    #[error("ASK queries cannot carry a projection or solution modifiers")]
    AskModifiers,
    #[error("SELECT * is not allowed together with GROUP BY or aggregates")]
    StarWithGrouping,
}

impl Query {
    pub fn select(projection: Projection, pattern: GraphPattern) -> Self {
        Query {
            form: QueryForm::Select,
            distinct: false,
            projection,
            construct_template: Vec::new(),
            pattern,
            group_by: Vec::new(),
            order_by: Vec::new(),
            limit: None,
            offset: None,
            prefixes: BTreeMap::new(),
        }
    }

    pub fn select_vars(vars: impl IntoIterator<Item = Variable>, pattern: GraphPattern) -> Self {
        Query::select(
            Projection::Items(vars.into_iter().map(SelectItem::Var).collect()),
            pattern,
        )
    }

    pub fn ask(pattern: GraphPattern) -> Self {
        Query {
            form: QueryForm::Ask,
            projection: Projection::Items(Vec::new()),
            ..Query::select(Projection::All, pattern)
        }
    }

    pub fn construct(template: Vec<TriplePattern>, pattern: GraphPattern) -> Self {
        Query {
            form: QueryForm::Construct,
            projection: Projection::Items(Vec::new()),
            construct_template: template,
            ..Query::select(Projection::All, pattern)
        }
    }

    pub fn with_prefixes(mut self, prefixes: BTreeMap<String, String>) -> Self {
        self.prefixes = prefixes;
        self
    }

    pub fn has_aggregates(&self) -> bool {
        match &self.projection {
            Projection::All => false,
            Projection::Items(items) => items
                .iter()
                .any(|i| matches!(i, SelectItem::Aggregate { .. })),
        }
    }

    pub fn is_grouped(&self) -> bool {
        self.has_aggregates() || !self.group_by.is_empty()
    }

    /// Explicitly projected output variables (empty for `SELECT *`).
    pub fn projected_vars(&self) -> Vec<&Variable> {
        match &self.projection {
            Projection::All => Vec::new(),
            Projection::Items(items) => items.iter().map(SelectItem::output).collect(),
        }
    }

    /// Checks the structural invariants of a query.
    pub fn validate(&self) -> Result<(), QueryShapeError> {
        if self.form == QueryForm::Ask
            && (!self.group_by.is_empty()
                || !self.order_by.is_empty()
                || self.limit.is_some()
                || self.offset.is_some()
                || matches!(&self.projection, Projection::Items(i) if !i.is_empty()))
        {
            return Err(QueryShapeError::AskModifiers);
        }
        if self.is_grouped() {
            match &self.projection {
                Projection::All => return Err(QueryShapeError::StarWithGrouping),
                Projection::Items(items) => {
                    for item in items {
                        if let SelectItem::Var(v) = item {
                            if !self.group_by.contains(v) {
                                return Err(QueryShapeError::UngroupedProjection(v.clone()));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
