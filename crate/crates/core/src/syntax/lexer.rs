//! Tokenizer shared by the query parser, the template instantiator and the
//! N-Triples loader.

use super::ParseError;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Iri(String),
    PName(String, String),
    Var(String),
    Blank(String),
    Str(String),
    LangTag(String),
    Integer(String),
    Decimal(String),
    Double(String),
    Ident(String),
    /// `[NAME]` template placeholder.
    Placeholder(String),
    Punct(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Iri(i) => format!("<{i}>"),
            Tok::PName(p, l) => format!("{p}:{l}"),
            Tok::Var(v) => format!("?{v}"),
            Tok::Blank(b) => format!("_:{b}"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::LangTag(l) => format!("@{l}"),
            Tok::Integer(n) | Tok::Decimal(n) | Tok::Double(n) => n.clone(),
            Tok::Ident(i) => i.clone(),
            Tok::Placeholder(p) => format!("[{p}]"),
            Tok::Punct(p) => (*p).to_string(),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
    /// Byte span in the source text.
    pub start: usize,
    pub end: usize,
}

pub struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

const PUNCT: &[&str] = &[
    "^^", "&&", "||", "!=", "<=", ">=", "{", "}", "(", ")", ".", ",", ";", "*", "/", "=", "<",
    ">", "!", "[", "]", "+", "-",
];

fn is_iri_char(c: char) -> bool {
    !(c.is_whitespace() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '\u{B7}'
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str) -> Self {
        Lexer {
            src,
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    pub fn tokenize(src: &'a str) -> Result<Vec<Token>, ParseError> {
        let mut lx = Lexer::new(src);
        let mut out = Vec::new();
        loop {
            let t = lx.next_token()?;
            let eof = t.tok == Tok::Eof;
            out.push(t);
            if eof {
                return Ok(out);
            }
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, line: usize, col: usize, token: &str, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line,
            col,
            token: token.to_string(),
            message: message.into(),
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    pub fn next_token(&mut self) -> Result<Token, ParseError> {
        self.skip_trivia();
        let (line, col, start) = (self.line, self.col, self.pos);
        let tok = match self.peek() {
            None => Tok::Eof,
            Some(c) => self.lex_one(c, line, col)?,
        };
        Ok(Token {
            tok,
            line,
            col,
            start,
            end: self.pos,
        })
    }

    fn lex_one(&mut self, c: char, line: usize, col: usize) -> Result<Tok, ParseError> {
        match c {
            '<' => {
                if let Some(iri) = self.try_iri() {
                    return Ok(Tok::Iri(iri));
                }
            }
            '?' | '$' => {
                self.bump();
                let name = self.take_while(|c| c.is_alphanumeric() || c == '_');
                if name.is_empty() {
                    return Err(self.err(line, col, &c.to_string(), "empty variable name"));
                }
                return Ok(Tok::Var(name));
            }
            '"' | '\'' => return self.lex_string(c, line, col).map(Tok::Str),
            '@' => {
                self.bump();
                let tag = self.take_while(|c| c.is_ascii_alphanumeric() || c == '-');
                if tag.is_empty() {
                    return Err(self.err(line, col, "@", "empty language tag"));
                }
                return Ok(Tok::LangTag(tag));
            }
            '[' => {
                if let Some(name) = self.try_placeholder() {
                    return Ok(Tok::Placeholder(name));
                }
            }
            '_' if self.peek_at(1) == Some(':') => {
                self.bump();
                self.bump();
                let label = self.take_while(|c| c.is_alphanumeric() || c == '_' || c == '-');
                if label.is_empty() {
                    return Err(self.err(line, col, "_:", "empty blank node label"));
                }
                return Ok(Tok::Blank(label));
            }
            c if c.is_ascii_digit() => return Ok(self.lex_number()),
            '+' | '-' if self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) => {
                return Ok(self.lex_number())
            }
            '.' if self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) => {
                return Ok(self.lex_number())
            }
            c if is_name_start(c) || c == ':' => return self.lex_word(line, col),
            _ => {}
        }
        for p in PUNCT {
            if self.rest().starts_with(p) {
                for _ in 0..p.len() {
                    self.bump();
                }
                return Ok(Tok::Punct(p));
            }
        }
        Err(self.err(line, col, &c.to_string(), "unexpected character"))
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if f(c) {
                self.bump();
            } else {
                break;
            }
        }
        self.src[start..self.pos].to_string()
    }

    fn try_iri(&mut self) -> Option<String> {
        let rest = self.rest();
        let body = &rest[1..];
        let end = body.find(|c: char| !is_iri_char(c))?;
        if !body[end..].starts_with('>') {
            return None;
        }
        let iri = body[..end].to_string();
        for _ in 0..iri.chars().count() + 2 {
            self.bump();
        }
        Some(iri)
    }

    fn try_placeholder(&mut self) -> Option<String> {
        let body = &self.rest()[1..];
        let end = body.find(|c: char| !(c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_'))?;
        if end == 0 || !body[end..].starts_with(']') || !body.as_bytes()[0].is_ascii_uppercase() {
            return None;
        }
        let name = body[..end].to_string();
        for _ in 0..end + 2 {
            self.bump();
        }
        Some(name)
    }

    fn lex_string(&mut self, quote: char, line: usize, col: usize) -> Result<String, ParseError> {
        let long = self.rest().starts_with(&format!("{quote}{quote}{quote}"));
        let n = if long { 3 } else { 1 };
        for _ in 0..n {
            self.bump();
        }
        let mut out = String::new();
        loop {
            if long && self.rest().starts_with(&format!("{quote}{quote}{quote}")) {
                for _ in 0..3 {
                    self.bump();
                }
                return Ok(out);
            }
            let c = self
                .bump()
                .ok_or_else(|| self.err(line, col, &quote.to_string(), "unterminated string"))?;
            match c {
                c if c == quote && !long => return Ok(out),
                '\n' | '\r' if !long => {
                    return Err(self.err(line, col, &quote.to_string(), "newline in string"))
                }
                '\\' => {
                    let e = self
                        .bump()
                        .ok_or_else(|| self.err(line, col, "\\", "unterminated escape"))?;
                    match e {
                        't' => out.push('\t'),
                        'n' => out.push('\n'),
                        'r' => out.push('\r'),
                        'b' => out.push('\u{8}'),
                        'f' => out.push('\u{c}'),
                        '"' => out.push('"'),
                        '\'' => out.push('\''),
                        '\\' => out.push('\\'),
                        'u' | 'U' => {
                            let len = if e == 'u' { 4 } else { 8 };
                            let hex: String = (0..len).filter_map(|_| self.bump()).collect();
                            let ch = u32::from_str_radix(&hex, 16)
                                .ok()
                                .and_then(char::from_u32)
                                .ok_or_else(|| {
                                    self.err(line, col, &hex, "invalid unicode escape")
                                })?;
                            out.push(ch);
                        }
                        other => {
                            return Err(self.err(
                                line,
                                col,
                                &format!("\\{other}"),
                                "invalid escape sequence",
                            ))
                        }
                    }
                }
                c => out.push(c),
            }
        }
    }

    fn lex_number(&mut self) -> Tok {
        let start = self.pos;
        if matches!(self.peek(), Some('+' | '-')) {
            self.bump();
        }
        self.take_while(|c| c.is_ascii_digit());
        let mut decimal = false;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) {
            decimal = true;
            self.bump();
            self.take_while(|c| c.is_ascii_digit());
        }
        let mut double = false;
        if matches!(self.peek(), Some('e' | 'E')) {
            let sign = matches!(self.peek_at(1), Some('+' | '-'));
            let digit_at = if sign { 2 } else { 1 };
            if self.peek_at(digit_at).is_some_and(|d| d.is_ascii_digit()) {
                double = true;
                for _ in 0..digit_at {
                    self.bump();
                }
                self.take_while(|c| c.is_ascii_digit());
            }
        }
        let text = self.src[start..self.pos].to_string();
        if double {
            Tok::Double(text)
        } else if decimal {
            Tok::Decimal(text)
        } else {
            Tok::Integer(text)
        }
    }

    fn lex_word(&mut self, line: usize, col: usize) -> Result<Tok, ParseError> {
        // Prefix candidate: letters, digits, '_', '-', '.'.
        let rest = self.rest();
        let cand_len = rest
            .find(|c: char| !(is_name_char(c) || c == '.'))
            .unwrap_or(rest.len());
        let cand = &rest[..cand_len];
        if rest[cand_len..].starts_with(':') && !cand.ends_with('.') {
            let prefix = cand.to_string();
            for _ in 0..prefix.chars().count() + 1 {
                self.bump();
            }
            let local_rest = self.rest();
            let mut len = local_rest
                .find(|c: char| !(is_name_char(c) || c == '.' || c == ':' || c == '%'))
                .unwrap_or(local_rest.len());
            while len > 0 && local_rest[..len].ends_with('.') {
                len -= 1;
            }
            let local = local_rest[..len].to_string();
            for _ in 0..local.chars().count() {
                self.bump();
            }
            return Ok(Tok::PName(prefix, local));
        }
        let word = self.take_while(|c| c.is_alphanumeric() || c == '_');
        if word.is_empty() {
            return Err(self.err(line, col, ":", "unexpected character"));
        }
        Ok(Tok::Ident(word))
    }
}
