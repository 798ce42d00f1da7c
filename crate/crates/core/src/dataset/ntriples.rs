//! Line-based N-Triples and N-Quads reader.

use crate::syntax::lexer::{Lexer, Tok};
use crate::syntax::{Literal, ParseError, Term, Triple, TripleError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quad {
    pub triple: Triple,
    /// `None` is the default graph.
    pub graph: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LineError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Position {
        line: usize,
        #[source]
        source: TripleError,
    },
}

pub fn parse_ntriples(text: &str) -> Result<Vec<Triple>, LineError> {
    parse_lines(text, false).map(|qs| qs.into_iter().map(|q| q.triple).collect())
}

pub fn parse_nquads(text: &str) -> Result<Vec<Quad>, LineError> {
    parse_lines(text, true)
}

fn parse_lines(text: &str, quads: bool) -> Result<Vec<Quad>, LineError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let syntax = |message: String| LineError::Syntax { line, message };
        let tokens = Lexer::tokenize(raw).map_err(|e| match e {
            ParseError::Syntax { message, .. } => syntax(message),
            other => syntax(other.to_string()),
        })?;
        let toks: Vec<Tok> = tokens.into_iter().map(|t| t.tok).collect();
        if toks.len() == 1 {
            continue;
        }
        let mut pos = 0;
        let subject = term(&toks, &mut pos).map_err(syntax)?;
        let predicate = term(&toks, &mut pos).map_err(syntax)?;
        let object = term(&toks, &mut pos).map_err(syntax)?;
        let graph = match &toks[pos] {
            Tok::Iri(g) if quads => {
                pos += 1;
                Some(g.clone())
            }
            Tok::Blank(b) if quads => {
                pos += 1;
                Some(format!("_:{b}"))
            }
            _ => None,
        };
        if toks[pos] != Tok::Punct(".") {
            return Err(syntax(format!("expected `.`, found {}", toks[pos].describe())));
        }
        if toks[pos + 1] != Tok::Eof {
            return Err(syntax(format!(
                "unexpected {} after `.`",
                toks[pos + 1].describe()
            )));
        }
        let triple = Triple::new(subject, predicate, object)
            .map_err(|source| LineError::Position { line, source })?;
        out.push(Quad { triple, graph });
    }
    Ok(out)
}

fn term(toks: &[Tok], pos: &mut usize) -> Result<Term, String> {
    let t = match &toks[*pos] {
        Tok::Iri(i) => Term::iri(i.clone()),
        Tok::Blank(b) => Term::blank(b.clone()),
        Tok::Str(s) => {
            let lit = match toks.get(*pos + 1) {
                Some(Tok::LangTag(l)) => {
                    *pos += 1;
                    Literal::lang(s.clone(), l.clone())
                }
                Some(Tok::Punct("^^")) => match toks.get(*pos + 2) {
                    Some(Tok::Iri(dt)) => {
                        *pos += 2;
                        Literal::typed(s.clone(), dt.clone())
                    }
                    _ => return Err("datatype must be an IRI".to_string()),
                },
                _ => Literal::simple(s.clone()),
            };
            Term::literal(lit)
        }
        other => return Err(format!("unexpected {}", other.describe())),
    };
    *pos += 1;
    Ok(t)
}
