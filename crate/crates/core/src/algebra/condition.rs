//! Three-valued evaluation of built-in conditions.

use std::cmp::Ordering;

use super::Mapping;
use crate::syntax::{vocab, CompareOp, Condition, Literal, Term, UnaryTest};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Error,
}

impl std::ops::Not for Truth {
    type Output = Truth;

    fn not(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Error => Truth::Error,
        }
    }
}

impl Truth {
    fn from_bool(b: bool) -> Truth {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    pub fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Error,
        }
    }

    pub fn or(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::True, _) | (_, Truth::True) => Truth::True,
            (Truth::False, Truth::False) => Truth::False,
            _ => Truth::Error,
        }
    }
}

pub fn evaluate_condition(r: &Condition, m: &Mapping) -> Truth {
    match r {
        Condition::Bound(v) => Truth::from_bool(m.contains(v)),
        Condition::Not(c) => !evaluate_condition(c, m),
        Condition::And(a, b) => evaluate_condition(a, m).and(evaluate_condition(b, m)),
        Condition::Or(a, b) => evaluate_condition(a, m).or(evaluate_condition(b, m)),
        Condition::Test(test, t) => match resolve(t, m) {
            None => Truth::Error,
            Some(t) => Truth::from_bool(match test {
                UnaryTest::IsIri => t.is_iri(),
                UnaryTest::IsBlank => t.is_blank(),
                UnaryTest::IsLiteral => t.is_literal(),
            }),
        },
        Condition::Compare(op, a, b) => match (resolve(a, m), resolve(b, m)) {
            (Some(a), Some(b)) => compare(*op, &a, &b),
            _ => Truth::Error,
        },
    }
}

fn resolve(t: &Term, m: &Mapping) -> Option<Term> {
    match t.as_variable() {
        Some(v) => m.get(v).cloned(),
        None => Some(t.clone()),
    }
}

fn is_plain_string(l: &Literal) -> bool {
    l.language.is_none() && l.effective_datatype() == vocab::XSD_STRING
}

/// Value comparison when the pair is comparable.
fn value_order(a: &Term, b: &Term) -> Option<Ordering> {
    let (Term::Literal(la), Term::Literal(lb)) = (a, b) else {
        return None;
    };
    if let (Some(x), Some(y)) = (la.numeric_value(), lb.numeric_value()) {
        return x.partial_cmp(&y);
    }
    if is_plain_string(la) && is_plain_string(lb) {
        return Some(la.lexical.cmp(&lb.lexical));
    }
    if la.datatype.as_deref() == Some(vocab::XSD_BOOLEAN)
        && lb.datatype.as_deref() == Some(vocab::XSD_BOOLEAN)
    {
        return Some(la.lexical.cmp(&lb.lexical));
    }
    None
}

fn compare(op: CompareOp, a: &Term, b: &Term) -> Truth {
    match op {
        CompareOp::Eq => equals(a, b),
        CompareOp::NotEq => !equals(a, b),
        _ => match value_order(a, b) {
            None => Truth::Error,
            Some(o) => Truth::from_bool(match op {
                CompareOp::Lt => o == Ordering::Less,
                CompareOp::Gt => o == Ordering::Greater,
                CompareOp::Le => o != Ordering::Greater,
                CompareOp::Ge => o != Ordering::Less,
                CompareOp::Eq | CompareOp::NotEq => unreachable!(),
            }),
        },
    }
}

/// RDF term equality, with numeric literals compared by value. Two
/// distinct literals of an unknown datatype cannot be decided.
fn equals(a: &Term, b: &Term) -> Truth {
    if a == b {
        return Truth::True;
    }
    match (a, b) {
        (Term::Literal(_), Term::Literal(_)) => match value_order(a, b) {
            Some(o) => Truth::from_bool(o == Ordering::Equal),
            None => {
                let (Term::Literal(la), Term::Literal(lb)) = (a, b) else {
                    unreachable!()
                };
                let known = |l: &Literal| {
                    l.language.is_some()
                        || is_plain_string(l)
                        || l.numeric_value().is_some()
                        || l.datatype.as_deref() == Some(vocab::XSD_BOOLEAN)
                };
                if known(la) && known(lb) {
                    Truth::False
                } else {
                    Truth::Error
                }
            }
        },
        _ => Truth::False,
    }
}
