//! Deterministic SPARQL text output.
//!
//! The writer mirrors the parser's group translation so that parsing the
//! output reproduces the same algebra tree.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::ast::*;
use super::term::{escape_string, vocab, Literal, Term, Variable};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ValuesKeyword {
    #[default]
    Values,
    /// Pre-recommendation `BINDINGS` spelling.
    Bindings,
}

#[derive(Clone, Debug, Default)]
pub struct SerializeOptions {
    pub values_keyword: ValuesKeyword,
    /// Variables written as `[NAME]` placeholders instead of `?var`.
    pub placeholders: BTreeMap<Variable, String>,
}

pub fn serialize_query(q: &Query) -> String {
    serialize_query_with(q, &SerializeOptions::default())
}

pub fn serialize_query_with(q: &Query, opts: &SerializeOptions) -> String {
    let mut w = Writer {
        out: String::new(),
        prefixes: &q.prefixes,
        opts,
    };
    for (p, ns) in &q.prefixes {
        let _ = writeln!(w.out, "PREFIX {p}: <{ns}>");
    }
    w.query_body(q, 0);
    w.out.push('\n');
    w.out
}

/// Renders a single pattern as group text (`{ ... }`).
pub fn serialize_pattern(p: &GraphPattern, prefixes: &BTreeMap<String, String>) -> String {
    let opts = SerializeOptions::default();
    let mut w = Writer {
        out: String::new(),
        prefixes,
        opts: &opts,
    };
    w.group(p, 0);
    w.out
}

/// Renders a term in query syntax, compacting IRIs with `prefixes`.
pub fn serialize_term(t: &Term, prefixes: &BTreeMap<String, String>) -> String {
    let opts = SerializeOptions::default();
    let w = Writer {
        out: String::new(),
        prefixes,
        opts: &opts,
    };
    w.term(t)
}

pub fn serialize_triple_pattern(t: &TriplePattern, prefixes: &BTreeMap<String, String>) -> String {
    let opts = SerializeOptions::default();
    let w = Writer {
        out: String::new(),
        prefixes,
        opts: &opts,
    };
    w.triple(t)
}

pub fn serialize_condition(c: &Condition, prefixes: &BTreeMap<String, String>) -> String {
    let opts = SerializeOptions::default();
    let w = Writer {
        out: String::new(),
        prefixes,
        opts: &opts,
    };
    w.condition(c, 0)
}

struct Writer<'a> {
    out: String,
    prefixes: &'a BTreeMap<String, String>,
    opts: &'a SerializeOptions,
}

fn pad(indent: usize) -> String {
    "  ".repeat(indent)
}

fn valid_local(local: &str) -> bool {
    if local.is_empty() {
        return true;
    }
    let ok_chars = local
        .chars()
        .all(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '.');
    ok_chars && !local.starts_with(['.', '-']) && !local.ends_with('.')
}

impl Writer<'_> {
    fn line(&mut self, indent: usize, text: &str) {
        self.out.push_str(&pad(indent));
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn iri(&self, iri: &str) -> String {
        let best = self
            .prefixes
            .iter()
            .filter(|(_, ns)| iri.starts_with(ns.as_str()) && valid_local(&iri[ns.len()..]))
            .max_by_key(|(p, ns)| (ns.len(), std::cmp::Reverse((*p).clone())));
        match best {
            Some((p, ns)) => format!("{p}:{}", &iri[ns.len()..]),
            None => format!("<{iri}>"),
        }
    }

    fn literal(&self, l: &Literal) -> String {
        if let Some(dt) = &l.datatype {
            let lex = l.lexical.as_str();
            let bare = match dt.as_str() {
                vocab::XSD_INTEGER => is_integer(lex),
                vocab::XSD_DECIMAL => is_decimal(lex),
                vocab::XSD_DOUBLE => is_double(lex),
                vocab::XSD_BOOLEAN => lex == "true" || lex == "false",
                _ => false,
            };
            if bare {
                return lex.to_string();
            }
            return format!("\"{}\"^^{}", escape_string(lex), self.iri(dt));
        }
        match &l.language {
            Some(lang) => format!("\"{}\"@{lang}", escape_string(&l.lexical)),
            None => format!("\"{}\"", escape_string(&l.lexical)),
        }
    }

    fn term(&self, t: &Term) -> String {
        match t {
            Term::Iri { value } => self.iri(value),
            Term::Blank { label } => format!("_:{label}"),
            Term::Literal(l) => self.literal(l),
            Term::Variable { name } => match self.opts.placeholders.get(name) {
                Some(p) => format!("[{p}]"),
                None => name.to_string(),
            },
        }
    }

    fn predicate_step(&self, t: &Term) -> String {
        if t.as_iri() == Some(vocab::RDF_TYPE) {
            "a".to_string()
        } else {
            self.term(t)
        }
    }

    fn triple(&self, t: &TriplePattern) -> String {
        let path: Vec<String> = t
            .predicate
            .steps
            .iter()
            .map(|s| self.predicate_step(s))
            .collect();
        format!(
            "{} {} {} .",
            self.term(&t.subject),
            path.join("/"),
            self.term(&t.object)
        )
    }

    fn condition(&self, c: &Condition, min_prec: u8) -> String {
        let (text, prec) = match c {
            Condition::Or(a, b) => (
                format!("{} || {}", self.condition(a, 1), self.condition(b, 2)),
                1,
            ),
            Condition::And(a, b) => (
                format!("{} && {}", self.condition(a, 2), self.condition(b, 3)),
                2,
            ),
            Condition::Not(inner) => {
                let body = match **inner {
                    Condition::Compare(..) | Condition::Or(..) | Condition::And(..) => {
                        format!("({})", self.condition(inner, 0))
                    }
                    _ => self.condition(inner, 3),
                };
                (format!("!{body}"), 3)
            }
            Condition::Compare(op, a, b) => (
                format!("{} {} {}", self.term(a), op.symbol(), self.term(b)),
                3,
            ),
            Condition::Bound(v) => (format!("bound({})", self.term(&v.clone().into())), 3),
            Condition::Test(test, t) => {
                let name = match test {
                    UnaryTest::IsIri => "isIRI",
                    UnaryTest::IsBlank => "isBlank",
                    UnaryTest::IsLiteral => "isLiteral",
                };
                (format!("{name}({})", self.term(t)), 3)
            }
        };
        if prec < min_prec {
            format!("({text})")
        } else {
            text
        }
    }

    fn aggregate(&self, a: &Aggregate) -> String {
        let mut s = String::from(a.function.keyword());
        s.push('(');
        if a.distinct {
            s.push_str("DISTINCT ");
        }
        match &a.arg {
            AggregateArg::Star => s.push('*'),
            AggregateArg::Var(v) => s.push_str(&self.term(&v.clone().into())),
        }
        if let Some(sep) = &a.separator {
            let _ = write!(s, "; SEPARATOR=\"{}\"", escape_string(sep));
        }
        s.push(')');
        s
    }

    fn query_body(&mut self, q: &Query, indent: usize) {
        let head = match q.form {
            QueryForm::Ask => "ASK".to_string(),
            QueryForm::Construct => {
                self.line(indent, "CONSTRUCT {");
                for t in &q.construct_template {
                    let text = self.triple(t);
                    self.line(indent + 1, &text);
                }
                "}".to_string()
            }
            QueryForm::Select => {
                let mut s = String::from("SELECT ");
                if q.distinct {
                    s.push_str("DISTINCT ");
                }
                match &q.projection {
                    Projection::All => s.push('*'),
                    Projection::Items(items) => {
                        let parts: Vec<String> = items
                            .iter()
                            .map(|i| match i {
                                SelectItem::Var(v) => self.term(&v.clone().into()),
                                SelectItem::Aggregate { aggregate, alias } => format!(
                                    "({} AS {})",
                                    self.aggregate(aggregate),
                                    self.term(&alias.clone().into())
                                ),
                            })
                            .collect();
                        s.push_str(&parts.join(" "));
                    }
                }
                s
            }
        };
        self.out.push_str(&pad(indent));
        self.out.push_str(&head);
        self.out.push_str(" WHERE ");
        self.group_inline(&q.pattern, indent);
        if !q.group_by.is_empty() {
            let vars: Vec<String> = q.group_by.iter().map(|v| self.term(&v.clone().into())).collect();
            self.out.push('\n');
            self.out.push_str(&pad(indent));
            let _ = write!(self.out, "GROUP BY {}", vars.join(" "));
        }
        if !q.order_by.is_empty() {
            let conds: Vec<String> = q
                .order_by
                .iter()
                .map(|c| {
                    let v = self.term(&c.var.clone().into());
                    if c.descending {
                        format!("DESC({v})")
                    } else {
                        v
                    }
                })
                .collect();
            self.out.push('\n');
            self.out.push_str(&pad(indent));
            let _ = write!(self.out, "ORDER BY {}", conds.join(" "));
        }
        if let Some(l) = q.limit {
            self.out.push('\n');
            self.out.push_str(&pad(indent));
            let _ = write!(self.out, "LIMIT {l}");
        }
        if let Some(o) = q.offset {
            self.out.push('\n');
            self.out.push_str(&pad(indent));
            let _ = write!(self.out, "OFFSET {o}");
        }
    }

    /// Writes `{ ... }` starting at the current cursor (no leading pad); the
    /// closing brace is padded to `indent` and not followed by a newline.
    fn group_inline(&mut self, p: &GraphPattern, indent: usize) {
        if let GraphPattern::SubSelect(q) = p {
            self.out.push_str("{\n");
            self.query_body(q, indent + 1);
            self.out.push('\n');
            self.out.push_str(&pad(indent));
            self.out.push('}');
            return;
        }
        self.out.push_str("{\n");
        self.content(p, indent + 1);
        self.out.push_str(&pad(indent));
        self.out.push('}');
    }

    fn group(&mut self, p: &GraphPattern, indent: usize) {
        self.out.push_str(&pad(indent));
        self.group_inline(p, indent);
        self.out.push('\n');
    }

    fn content(&mut self, p: &GraphPattern, indent: usize) {
        match p {
            GraphPattern::Empty => {}
            GraphPattern::Filter(inner, c) => {
                self.content(inner, indent);
                let text = format!("FILTER ({})", self.condition(c, 0));
                self.line(indent, &text);
            }
            other => self.sequence(other, indent),
        }
    }

    fn left_operand(&mut self, l: &GraphPattern, indent: usize) {
        match l {
            GraphPattern::Empty => {}
            GraphPattern::Filter(..) => self.element(l, indent),
            other => self.sequence(other, indent),
        }
    }

    fn sequence(&mut self, p: &GraphPattern, indent: usize) {
        match p {
            GraphPattern::And(l, x) => {
                self.left_operand(l, indent);
                self.element(x, indent);
            }
            GraphPattern::Opt(l, x) => {
                self.left_operand(l, indent);
                self.out.push_str(&pad(indent));
                self.out.push_str("OPTIONAL ");
                self.group_inline(x, indent);
                self.out.push('\n');
            }
            GraphPattern::Minus(l, x) => {
                self.left_operand(l, indent);
                self.out.push_str(&pad(indent));
                self.out.push_str("MINUS ");
                self.group_inline(x, indent);
                self.out.push('\n');
            }
            other => self.element(other, indent),
        }
    }

    fn element(&mut self, p: &GraphPattern, indent: usize) {
        match p {
            GraphPattern::Triple(t) => {
                let text = self.triple(t);
                self.line(indent, &text);
            }
            GraphPattern::Union(..) => {
                let mut branches = Vec::new();
                let mut cur = p;
                while let GraphPattern::Union(l, r) = cur {
                    branches.push(&**r);
                    cur = l;
                }
                branches.push(cur);
                branches.reverse();
                for (i, b) in branches.iter().enumerate() {
                    if i > 0 {
                        self.line(indent, "UNION");
                    }
                    self.group(b, indent);
                }
            }
            GraphPattern::NamedGraph(name, inner) => {
                self.out.push_str(&pad(indent));
                let _ = write!(self.out, "GRAPH {} ", self.term(name));
                self.group_inline(inner, indent);
                self.out.push('\n');
            }
            GraphPattern::Values(v) => {
                let text = self.values(v);
                self.line(indent, &text);
            }
            GraphPattern::SubSelect(_)
            | GraphPattern::Empty
            | GraphPattern::And(..)
            | GraphPattern::Opt(..)
            | GraphPattern::Minus(..)
            | GraphPattern::Filter(..) => self.group(p, indent),
        }
    }

    fn values(&self, v: &ValuesBlock) -> String {
        let keyword = match self.opts.values_keyword {
            ValuesKeyword::Values => "VALUES",
            ValuesKeyword::Bindings => "BINDINGS",
        };
        let cell = |c: &Option<Term>| match c {
            Some(t) => self.term(t),
            None => "UNDEF".to_string(),
        };
        let vars: Vec<String> = v.vars.iter().map(|x| self.term(&x.clone().into())).collect();
        let single = v.vars.len() == 1 && self.opts.values_keyword == ValuesKeyword::Values;
        if single {
            let cells: Vec<String> = v.rows.iter().map(|r| cell(&r[0])).collect();
            let body = if cells.is_empty() {
                String::new()
            } else {
                format!("{} ", cells.join(" "))
            };
            return format!("{keyword} {} {{ {body}}}", vars[0]);
        }
        let rows: Vec<String> = v
            .rows
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(cell).collect();
                format!("({})", cells.join(" "))
            })
            .collect();
        let head = if self.opts.values_keyword == ValuesKeyword::Bindings && !vars.is_empty() {
            vars.join(" ")
        } else {
            format!("({})", vars.join(" "))
        };
        let body = if rows.is_empty() {
            String::new()
        } else {
            format!("{} ", rows.join(" "))
        };
        format!("{keyword} {head} {{ {body}}}")
    }
}

fn is_integer(s: &str) -> bool {
    let d = s.strip_prefix(['+', '-']).unwrap_or(s);
    !d.is_empty() && d.chars().all(|c| c.is_ascii_digit())
}

fn is_decimal(s: &str) -> bool {
    let d = s.strip_prefix(['+', '-']).unwrap_or(s);
    match d.split_once('.') {
        Some((a, b)) => {
            a.chars().all(|c| c.is_ascii_digit())
                && !b.is_empty()
                && b.chars().all(|c| c.is_ascii_digit())
        }
        None => false,
    }
}

fn is_double(s: &str) -> bool {
    let Some(idx) = s.find(['e', 'E']) else {
        return false;
    };
    let (mant, exp) = (&s[..idx], &s[idx + 1..]);
    let exp_ok = is_integer(exp);
    let mant_ok = is_integer(mant) || is_decimal(mant);
    exp_ok && mant_ok
}
