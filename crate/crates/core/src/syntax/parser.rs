//! Recursive-descent parser for the supported SPARQL fragment.
//!
//! Group graph patterns are translated into the algebra by folding their
//! elements left to right: triples and nested groups are conjoined, OPTIONAL
//! and MINUS take the pattern built so far as their left operand, and all
//! FILTERs of a group are applied to the whole group at the end.

use std::collections::{BTreeMap, HashMap};

use super::ast::*;
use super::lexer::{Lexer, Tok, Token};
use super::term::{vocab, Literal, Term, Variable};
use super::ParseError;

/// Parses query text into a [`Query`]. `base` resolves relative IRIs.
pub fn parse_query(text: &str, base: Option<&str>) -> Result<Query, ParseError> {
    let tokens = Lexer::tokenize(text)?;
    let mut p = Parser {
        tokens,
        idx: 0,
        prefixes: BTreeMap::new(),
        base: base.map(str::to_owned),
        blanks: HashMap::new(),
    };
    p.parse_prologue()?;
    let mut q = p.parse_query_body(true)?;
    p.expect_eof()?;
    q.prefixes = p.prefixes;
    Ok(q)
}

/// Parses a bare group body such as `?s ex:p ?o . ?o ex:q ?x` using the
/// given prefix table.
pub fn parse_pattern(
    text: &str,
    prefixes: &BTreeMap<String, String>,
) -> Result<GraphPattern, ParseError> {
    let wrapped = format!("{{ {text} }}");
    let tokens = Lexer::tokenize(&wrapped)?;
    let mut p = Parser {
        tokens,
        idx: 0,
        prefixes: prefixes.clone(),
        base: None,
        blanks: HashMap::new(),
    };
    let g = p.parse_group()?;
    p.expect_eof()?;
    Ok(g)
}

struct Parser {
    tokens: Vec<Token>,
    idx: usize,
    prefixes: BTreeMap<String, String>,
    base: Option<String>,
    blanks: HashMap<String, String>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.idx]
    }

    fn peek_tok(&self) -> &Tok {
        &self.tokens[self.idx].tok
    }

    fn peek_nth(&self, n: usize) -> &Tok {
        let i = (self.idx + n).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.idx].clone();
        if self.idx + 1 < self.tokens.len() {
            self.idx += 1;
        }
        t
    }

    fn error_at(&self, tok: &Token, message: impl Into<String>) -> ParseError {
        if let Tok::Placeholder(name) = &tok.tok {
            return ParseError::Placeholder {
                line: tok.line,
                col: tok.col,
                name: name.clone(),
            };
        }
        ParseError::Syntax {
            line: tok.line,
            col: tok.col,
            token: tok.tok.describe(),
            message: message.into(),
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        self.error_at(self.peek(), format!("expected {expected}"))
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek_tok(), Tok::Punct(x) if *x == p)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{p}'")))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek_tok(), Tok::Ident(x) if x.eq_ignore_ascii_case(kw))
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.unexpected(kw))
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if *self.peek_tok() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn parse_prologue(&mut self) -> PResult<()> {
        loop {
            if self.eat_kw("PREFIX") {
                let t = self.advance();
                let prefix = match &t.tok {
                    Tok::PName(p, l) if l.is_empty() => p.clone(),
                    _ => return Err(self.error_at(&t, "expected prefix name ending in ':'")),
                };
                let t = self.advance();
                let iri = match &t.tok {
                    Tok::Iri(i) => self.resolve(i, &t)?,
                    _ => return Err(self.error_at(&t, "expected IRI")),
                };
                self.prefixes.insert(prefix, iri);
            } else if self.eat_kw("BASE") {
                let t = self.advance();
                match &t.tok {
                    Tok::Iri(i) => {
                        let resolved = self.resolve(i, &t)?;
                        self.base = Some(resolved);
                    }
                    _ => return Err(self.error_at(&t, "expected IRI")),
                }
            } else {
                return Ok(());
            }
        }
    }

    fn resolve(&self, iri: &str, tok: &Token) -> PResult<String> {
        if has_scheme(iri) {
            return Ok(iri.to_string());
        }
        match &self.base {
            Some(base) => Ok(resolve_relative(base, iri)),
            None => Err(self.error_at(tok, "relative IRI without a base")),
        }
    }

    fn parse_query_body(&mut self, top_level: bool) -> PResult<Query> {
        let t = self.peek().clone();
        if self.eat_kw("SELECT") {
            let mut q = Query::select(Projection::All, GraphPattern::Empty);
            if self.eat_kw("DISTINCT") {
                q.distinct = true;
            } else {
                self.eat_kw("REDUCED");
            }
            q.projection = self.parse_projection()?;
            self.eat_kw("WHERE");
            q.pattern = self.parse_group()?;
            self.parse_modifiers(&mut q)?;
            if top_level {
                self.parse_trailing_values(&mut q)?;
            }
            Ok(q)
        } else if self.eat_kw("ASK") {
            self.eat_kw("WHERE");
            let mut q = Query::ask(self.parse_group()?);
            self.parse_modifiers(&mut q)?;
            if top_level {
                self.parse_trailing_values(&mut q)?;
            }
            q.validate().map_err(|e| self.error_at(&t, e.to_string()))?;
            Ok(q)
        } else if top_level && self.eat_kw("CONSTRUCT") {
            self.expect_punct("{")?;
            let mut template = Vec::new();
            while !self.is_punct("}") {
                self.parse_triples_same_subject(&mut template)?;
                if !self.eat_punct(".") {
                    break;
                }
            }
            self.expect_punct("}")?;
            self.eat_kw("WHERE");
            let mut q = Query::construct(template, self.parse_group()?);
            self.parse_modifiers(&mut q)?;
            self.parse_trailing_values(&mut q)?;
            for tp in &q.construct_template {
                if !tp.predicate.is_single() {
                    return Err(self.error_at(&t, "property paths are not allowed in templates"));
                }
            }
            Ok(q)
        } else {
            Err(self.unexpected("SELECT, ASK or CONSTRUCT"))
        }
    }

    fn parse_trailing_values(&mut self, q: &mut Query) -> PResult<()> {
        if self.is_kw("VALUES") || self.is_kw("BINDINGS") {
            let legacy = self.is_kw("BINDINGS");
            self.advance();
            let block = self.parse_data_block(legacy)?;
            let pattern = std::mem::replace(&mut q.pattern, GraphPattern::Empty);
            q.pattern = GraphPattern::and(pattern, GraphPattern::Values(block));
        }
        Ok(())
    }

    fn parse_projection(&mut self) -> PResult<Projection> {
        if self.eat_punct("*") {
            return Ok(Projection::All);
        }
        let mut items = Vec::new();
        loop {
            match self.peek_tok().clone() {
                Tok::Var(v) => {
                    self.advance();
                    items.push(SelectItem::Var(Variable::new(v)));
                }
                Tok::Punct("(") => {
                    self.advance();
                    let aggregate = self.parse_aggregate()?;
                    self.expect_kw("AS")?;
                    let alias = self.parse_var()?;
                    self.expect_punct(")")?;
                    items.push(SelectItem::Aggregate { aggregate, alias });
                }
                _ => break,
            }
        }
        if items.is_empty() {
            return Err(self.unexpected("'*' or projection"));
        }
        Ok(Projection::Items(items))
    }

    fn parse_var(&mut self) -> PResult<Variable> {
        let t = self.advance();
        match &t.tok {
            Tok::Var(v) => Ok(Variable::new(v.clone())),
            _ => Err(self.error_at(&t, "expected variable")),
        }
    }

    fn parse_aggregate(&mut self) -> PResult<Aggregate> {
        let t = self.advance();
        let function = match &t.tok {
            Tok::Ident(name) => match name.to_ascii_uppercase().as_str() {
                "COUNT" => AggregateFunction::Count,
                "SUM" => AggregateFunction::Sum,
                "MIN" => AggregateFunction::Min,
                "MAX" => AggregateFunction::Max,
                "AVG" => AggregateFunction::Avg,
                "SAMPLE" => AggregateFunction::Sample,
                "GROUP_CONCAT" => AggregateFunction::GroupConcat,
                _ => return Err(self.error_at(&t, "expected aggregate function")),
            },
            _ => return Err(self.error_at(&t, "expected aggregate function")),
        };
        self.expect_punct("(")?;
        let distinct = self.eat_kw("DISTINCT");
        let arg = if self.eat_punct("*") {
            if function != AggregateFunction::Count {
                return Err(self.error_at(&t, "'*' is only allowed in COUNT"));
            }
            AggregateArg::Star
        } else {
            AggregateArg::Var(self.parse_var()?)
        };
        let mut separator = None;
        if self.eat_punct(";") {
            if function != AggregateFunction::GroupConcat {
                return Err(self.error_at(&t, "SEPARATOR is only allowed in GROUP_CONCAT"));
            }
            self.expect_kw("SEPARATOR")?;
            self.expect_punct("=")?;
            let s = self.advance();
            match &s.tok {
                Tok::Str(v) => separator = Some(v.clone()),
                _ => return Err(self.error_at(&s, "expected separator string")),
            }
        }
        self.expect_punct(")")?;
        Ok(Aggregate {
            function,
            distinct,
            arg,
            separator,
        })
    }

    fn parse_count(&mut self) -> PResult<usize> {
        let t = self.advance();
        match &t.tok {
            Tok::Integer(n) => n
                .parse::<usize>()
                .map_err(|_| self.error_at(&t, "expected non-negative integer")),
            _ => Err(self.error_at(&t, "expected non-negative integer")),
        }
    }

    fn parse_modifiers(&mut self, q: &mut Query) -> PResult<()> {
        if self.is_kw("GROUP") {
            self.advance();
            self.expect_kw("BY")?;
            while let Tok::Var(v) = self.peek_tok().clone() {
                self.advance();
                q.group_by.push(Variable::new(v));
            }
            if q.group_by.is_empty() {
                return Err(self.unexpected("grouping variable"));
            }
        }
        if self.is_kw("ORDER") {
            self.advance();
            self.expect_kw("BY")?;
            loop {
                if let Tok::Var(v) = self.peek_tok().clone() {
                    self.advance();
                    q.order_by.push(OrderCondition::asc(Variable::new(v)));
                } else if self.is_kw("ASC") || self.is_kw("DESC") {
                    let descending = self.is_kw("DESC");
                    self.advance();
                    self.expect_punct("(")?;
                    let var = self.parse_var()?;
                    self.expect_punct(")")?;
                    q.order_by.push(OrderCondition { var, descending });
                } else {
                    break;
                }
            }
            if q.order_by.is_empty() {
                return Err(self.unexpected("ordering condition"));
            }
        }
        loop {
            if q.limit.is_none() && self.eat_kw("LIMIT") {
                q.limit = Some(self.parse_count()?);
            } else if q.offset.is_none() && self.eat_kw("OFFSET") {
                q.offset = Some(self.parse_count()?);
            } else {
                return Ok(());
            }
        }
    }

    fn parse_group(&mut self) -> PResult<GraphPattern> {
        self.expect_punct("{")?;
        if self.is_kw("SELECT") {
            let sub = self.parse_query_body(false)?;
            self.expect_punct("}")?;
            return Ok(GraphPattern::SubSelect(Box::new(sub)));
        }
        let mut g = GraphPattern::Empty;
        let mut filters = Vec::new();
        loop {
            if self.eat_punct("}") {
                break;
            }
            if self.eat_kw("OPTIONAL") {
                let right = self.parse_group()?;
                g = GraphPattern::opt(g, right);
            } else if self.eat_kw("MINUS") {
                let right = self.parse_group()?;
                g = GraphPattern::minus(g, right);
            } else if self.eat_kw("GRAPH") {
                let name = self.parse_var_or_iri()?;
                let inner = self.parse_group()?;
                g = GraphPattern::and(g, GraphPattern::graph(name, inner));
            } else if self.eat_kw("FILTER") {
                filters.push(self.parse_constraint()?);
            } else if self.is_kw("VALUES") || self.is_kw("BINDINGS") {
                let legacy = self.is_kw("BINDINGS");
                self.advance();
                let block = self.parse_data_block(legacy)?;
                g = GraphPattern::and(g, GraphPattern::Values(block));
            } else if self.is_punct("{") {
                let mut alt = self.parse_group()?;
                while self.eat_kw("UNION") {
                    let right = self.parse_group()?;
                    alt = GraphPattern::union(alt, right);
                }
                g = GraphPattern::and(g, alt);
            } else {
                let mut triples = Vec::new();
                self.parse_triples_same_subject(&mut triples)?;
                for t in triples {
                    g = GraphPattern::and(g, GraphPattern::Triple(t));
                }
                if !self.eat_punct(".") && !self.is_punct("}") && !self.starts_non_triple() {
                    return Err(self.unexpected("'.' or '}'"));
                }
                continue;
            }
            self.eat_punct(".");
        }
        for f in filters {
            g = GraphPattern::filter(g, f);
        }
        Ok(g)
    }

    fn starts_non_triple(&self) -> bool {
        ["OPTIONAL", "MINUS", "GRAPH", "FILTER", "VALUES", "BINDINGS"]
            .iter()
            .any(|k| self.is_kw(k))
            || self.is_punct("{")
    }

    fn parse_data_block(&mut self, legacy: bool) -> PResult<ValuesBlock> {
        let mut vars = Vec::new();
        let parenthesized = self.eat_punct("(");
        while let Tok::Var(v) = self.peek_tok().clone() {
            self.advance();
            vars.push(Variable::new(v));
            if !parenthesized && !legacy {
                break;
            }
        }
        if parenthesized {
            self.expect_punct(")")?;
        }
        if vars.is_empty() && !parenthesized {
            return Err(self.unexpected("variable"));
        }
        self.expect_punct("{")?;
        let mut rows = Vec::new();
        while !self.eat_punct("}") {
            if self.eat_punct("(") {
                let mut row = Vec::new();
                while !self.eat_punct(")") {
                    row.push(self.parse_data_value()?);
                }
                if row.len() != vars.len() {
                    return Err(self.error_at(
                        self.peek(),
                        format!("row has {} values for {} variables", row.len(), vars.len()),
                    ));
                }
                rows.push(row);
            } else {
                if vars.len() != 1 {
                    return Err(self.unexpected("'(' starting a data row"));
                }
                rows.push(vec![self.parse_data_value()?]);
            }
        }
        Ok(ValuesBlock { vars, rows })
    }

    fn parse_data_value(&mut self) -> PResult<Option<Term>> {
        if self.eat_kw("UNDEF") {
            return Ok(None);
        }
        let t = self.peek().clone();
        let term = self.parse_term()?;
        if term.is_variable() || term.is_blank() {
            return Err(self.error_at(&t, "expected IRI, literal or UNDEF"));
        }
        Ok(Some(term))
    }

    fn parse_var_or_iri(&mut self) -> PResult<Term> {
        let t = self.peek().clone();
        let term = self.parse_term()?;
        if term.is_variable() || term.is_iri() {
            Ok(term)
        } else {
            Err(self.error_at(&t, "expected variable or IRI"))
        }
    }

    fn parse_triples_same_subject(&mut self, out: &mut Vec<TriplePattern>) -> PResult<()> {
        let st = self.peek().clone();
        let subject = self.parse_term()?;
        if subject.is_literal() {
            return Err(self.error_at(&st, "literal in subject position"));
        }
        loop {
            let path = self.parse_path()?;
            loop {
                let object = self.parse_term()?;
                out.push(TriplePattern::with_path(subject.clone(), path.clone(), object));
                if !self.eat_punct(",") {
                    break;
                }
            }
            if !self.eat_punct(";") {
                return Ok(());
            }
            // Allow a dangling ';' before '.' or '}'.
            if self.is_punct(".") || self.is_punct("}") {
                return Ok(());
            }
        }
    }

    fn parse_path(&mut self) -> PResult<PathExpr> {
        let t = self.peek().clone();
        let first = self.parse_predicate_step()?;
        if first.is_variable() {
            if self.is_punct("/") {
                return Err(self.error_at(&t, "variables cannot appear in a sequence path"));
            }
            return Ok(PathExpr::single(first));
        }
        let mut steps = vec![first];
        while self.eat_punct("/") {
            let st = self.peek().clone();
            let step = self.parse_predicate_step()?;
            if !step.is_iri() {
                return Err(self.error_at(&st, "sequence path steps must be IRIs"));
            }
            steps.push(step);
        }
        Ok(PathExpr::sequence(steps))
    }

    fn parse_predicate_step(&mut self) -> PResult<Term> {
        if matches!(self.peek_tok(), Tok::Ident(a) if a == "a") {
            self.advance();
            return Ok(Term::iri(vocab::RDF_TYPE));
        }
        let t = self.peek().clone();
        let term = self.parse_term()?;
        if term.is_iri() || term.is_variable() {
            Ok(term)
        } else {
            Err(self.error_at(&t, "predicate must be an IRI or variable"))
        }
    }

    fn blank(&mut self, label: &str) -> Term {
        let n = self.blanks.len();
        let renamed = self
            .blanks
            .entry(label.to_string())
            .or_insert_with(|| format!("b{n}"))
            .clone();
        Term::blank(renamed)
    }

    fn parse_term(&mut self) -> PResult<Term> {
        let t = self.advance();
        let term = match &t.tok {
            Tok::Var(v) => Term::var(v.clone()),
            Tok::Iri(i) => Term::iri(self.resolve(i, &t)?),
            Tok::PName(p, l) => Term::iri(self.expand(p, l, &t)?),
            Tok::Blank(b) => self.blank(b),
            Tok::Str(s) => {
                let s = s.clone();
                match self.peek_tok().clone() {
                    Tok::LangTag(lang) => {
                        self.advance();
                        Term::literal(Literal::lang(s, lang))
                    }
                    Tok::Punct("^^") => {
                        self.advance();
                        let dt = self.advance();
                        let datatype = match &dt.tok {
                            Tok::Iri(i) => self.resolve(i, &dt)?,
                            Tok::PName(p, l) => self.expand(p, l, &dt)?,
                            _ => return Err(self.error_at(&dt, "expected datatype IRI")),
                        };
                        Term::literal(Literal::typed(s, datatype))
                    }
                    _ => Term::literal(Literal::simple(s)),
                }
            }
            Tok::Integer(n) => Term::literal(Literal::typed(n.clone(), vocab::XSD_INTEGER)),
            Tok::Decimal(n) => Term::literal(Literal::typed(n.clone(), vocab::XSD_DECIMAL)),
            Tok::Double(n) => Term::literal(Literal::typed(n.clone(), vocab::XSD_DOUBLE)),
            Tok::Ident(w) if w == "true" || w == "false" => {
                Term::literal(Literal::typed(w.clone(), vocab::XSD_BOOLEAN))
            }
            _ => return Err(self.error_at(&t, "expected RDF term or variable")),
        };
        Ok(term)
    }

    fn expand(&self, prefix: &str, local: &str, tok: &Token) -> PResult<String> {
        match self.prefixes.get(prefix) {
            Some(ns) => Ok(format!("{ns}{local}")),
            None => Err(ParseError::UnknownPrefix {
                line: tok.line,
                col: tok.col,
                prefix: prefix.to_string(),
            }),
        }
    }

    fn parse_constraint(&mut self) -> PResult<Condition> {
        if self.is_punct("(") {
            self.advance();
            let c = self.parse_or()?;
            self.expect_punct(")")?;
            Ok(c)
        } else if self.is_builtin() {
            self.parse_builtin()
        } else {
            Err(self.unexpected("'(' or built-in call after FILTER"))
        }
    }

    fn is_builtin(&self) -> bool {
        ["BOUND", "ISIRI", "ISURI", "ISBLANK", "ISLITERAL"]
            .iter()
            .any(|k| self.is_kw(k))
            && matches!(self.peek_nth(1), Tok::Punct("("))
    }

    fn parse_builtin(&mut self) -> PResult<Condition> {
        let t = self.advance();
        let name = match &t.tok {
            Tok::Ident(n) => n.to_ascii_uppercase(),
            _ => unreachable!("checked by is_builtin"),
        };
        self.expect_punct("(")?;
        let c = if name == "BOUND" {
            Condition::Bound(self.parse_var()?)
        } else {
            let test = match name.as_str() {
                "ISIRI" | "ISURI" => UnaryTest::IsIri,
                "ISBLANK" => UnaryTest::IsBlank,
                _ => UnaryTest::IsLiteral,
            };
            Condition::Test(test, self.parse_term()?)
        };
        self.expect_punct(")")?;
        Ok(c)
    }

    fn parse_or(&mut self) -> PResult<Condition> {
        let mut c = self.parse_and()?;
        while self.eat_punct("||") {
            let r = self.parse_and()?;
            c = Condition::or(c, r);
        }
        Ok(c)
    }

    fn parse_and(&mut self) -> PResult<Condition> {
        let mut c = self.parse_unary()?;
        while self.eat_punct("&&") {
            let r = self.parse_unary()?;
            c = Condition::and(c, r);
        }
        Ok(c)
    }

    fn parse_unary(&mut self) -> PResult<Condition> {
        if self.eat_punct("!") {
            return Ok(Condition::negate(self.parse_unary()?));
        }
        if self.eat_punct("(") {
            let c = self.parse_or()?;
            self.expect_punct(")")?;
            return Ok(c);
        }
        if self.is_builtin() {
            return self.parse_builtin();
        }
        let lhs = self.parse_term()?;
        let op = match self.peek_tok() {
            Tok::Punct("=") => CompareOp::Eq,
            Tok::Punct("!=") => CompareOp::NotEq,
            Tok::Punct("<") => CompareOp::Lt,
            Tok::Punct(">") => CompareOp::Gt,
            Tok::Punct("<=") => CompareOp::Le,
            Tok::Punct(">=") => CompareOp::Ge,
            _ => return Err(self.unexpected("comparison operator")),
        };
        self.advance();
        let rhs = self.parse_term()?;
        Ok(Condition::Compare(op, lhs, rhs))
    }
}

fn has_scheme(iri: &str) -> bool {
    match iri.find(':') {
        Some(i) if i > 0 => {
            let scheme = &iri[..i];
            scheme.starts_with(|c: char| c.is_ascii_alphabetic())
                && scheme
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
        }
        _ => false,
    }
}

fn resolve_relative(base: &str, rel: &str) -> String {
    if rel.is_empty() {
        return base.split('#').next().unwrap_or(base).to_string();
    }
    if rel.starts_with('#') {
        let b = base.split('#').next().unwrap_or(base);
        return format!("{b}{rel}");
    }
    if rel.starts_with('/') {
        // scheme://authority
        if let Some(idx) = base.find("://") {
            let after = &base[idx + 3..];
            let auth_end = after.find('/').map(|i| idx + 3 + i).unwrap_or(base.len());
            return format!("{}{rel}", &base[..auth_end]);
        }
    }
    match base.rfind('/') {
        Some(i) => format!("{}{rel}", &base[..=i]),
        None => format!("{base}{rel}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(n: &str) -> Term {
        Term::var(n)
    }

    #[test]
    fn minimal_select_star() {
        let q = parse_query("SELECT * WHERE { ?s ?p ?o }", None).unwrap();
        assert_eq!(q.projection, Projection::All);
        assert_eq!(
            q.pattern,
            GraphPattern::Triple(TriplePattern::new(var("s"), var("p"), var("o")))
        );
    }

    #[test]
    fn optional_takes_group_prefix_as_left_operand() {
        let q = parse_query(
            "PREFIX : <http://e/> SELECT * { ?a :p ?b OPTIONAL { ?b :q ?c } ?c :r ?d }",
            None,
        )
        .unwrap();
        match q.pattern {
            GraphPattern::And(l, r) => {
                assert!(matches!(*l, GraphPattern::Opt(..)));
                assert!(matches!(*r, GraphPattern::Triple(_)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn filters_wrap_whole_group() {
        let q = parse_query(
            "PREFIX : <http://e/> SELECT * { FILTER(?a = 1) ?a :p ?b . ?b :q ?c }",
            None,
        )
        .unwrap();
        match q.pattern {
            GraphPattern::Filter(inner, _) => assert!(matches!(*inner, GraphPattern::And(..))),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_prefix_reported() {
        let e = parse_query("SELECT * { ?s ex:p ?o }", None).unwrap_err();
        assert!(matches!(e, ParseError::UnknownPrefix { ref prefix, .. } if prefix == "ex"));
    }

    #[test]
    fn placeholder_rejected() {
        let e = parse_query(
            "PREFIX ex: <http://e/> SELECT * { [RESOURCE] ex:p ?o }",
            None,
        )
        .unwrap_err();
        assert!(matches!(e, ParseError::Placeholder { ref name, .. } if name == "RESOURCE"));
    }

    #[test]
    fn syntax_error_has_position() {
        let e = parse_query("SELECT * WHERE {\n  ?s ?p }", None).unwrap_err();
        match e {
            ParseError::Syntax { line, col, token, .. } => {
                assert_eq!((line, col), (2, 9));
                assert_eq!(token, "}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn relative_iri_uses_base() {
        let q = parse_query("SELECT * { <a> <p> ?o }", Some("http://ex.org/dir/doc")).unwrap();
        let t = q.pattern.triple_patterns()[0].clone();
        assert_eq!(t.subject, Term::iri("http://ex.org/dir/a"));
        assert!(parse_query("SELECT * { <a> <p> ?o }", None).is_err());
    }

    #[test]
    fn bindings_alias_accepted() {
        let q = parse_query(
            "PREFIX ex: <http://e/> SELECT ?l { ?s ex:l ?l } BINDINGS ?s { (ex:1) (ex:2) }",
            None,
        )
        .unwrap();
        let GraphPattern::And(_, r) = q.pattern else {
            panic!()
        };
        let GraphPattern::Values(v) = *r else { panic!() };
        assert_eq!(v.rows.len(), 2);
    }

    #[test]
    fn values_arity_checked() {
        assert!(parse_query("SELECT * { VALUES (?a ?b) { (1) } }", None).is_err());
    }

    #[test]
    fn blank_nodes_renamed_in_order() {
        let q = parse_query("SELECT * { _:x <http://p> _:y . _:y <http://p> _:x }", None).unwrap();
        let ts = q.pattern.triple_patterns();
        assert_eq!(ts[0].subject, Term::blank("b0"));
        assert_eq!(ts[0].object, Term::blank("b1"));
        assert_eq!(ts[1].subject, Term::blank("b1"));
    }

    #[test]
    fn ask_with_modifiers_rejected() {
        assert!(parse_query("ASK { ?s ?p ?o } LIMIT 1", None).is_err());
    }

    #[test]
    fn semicolon_and_comma_shorthand() {
        let q = parse_query("SELECT * { ?s <http://p> ?a , ?b ; <http://q> ?c }", None).unwrap();
        assert_eq!(q.pattern.triple_patterns().len(), 3);
    }
}
