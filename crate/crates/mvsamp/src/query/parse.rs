//! Query expression parser.
//!
//! Grammar (AND binds tighter than OR):
//!
//! ```text
//! query      := or_expr
//! or_expr    := and_expr (OR and_expr)*
//! and_expr   := primary (AND primary)*
//! primary    := '(' or_expr ')' | comparison
//! comparison := IDENT relop NUMBER
//!             | NUMBER relop IDENT
//!             | NUMBER relop IDENT relop NUMBER
//! relop      := '<' | '<=' | '>' | '>='
//! ```
//!
//! Keywords are case-insensitive. A chained comparison whose bounds are
//! reversed (`-100 < p < -4900`) is canonicalized by swapping the bounds, and
//! the swap is reported as a warning.

use crate::error::{Error, Result};
use crate::query::{QueryExpr, RangePredicate};

/// A parsed query plus any canonicalization warnings.
#[derive(Debug, Clone)]
pub struct ParsedQuery {
    pub expr: QueryExpr,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Number(f64),
    Less,
    LessEq,
    Greater,
    GreaterEq,
    LParen,
    RParen,
    And,
    Or,
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokenize(text: &'a str) -> Result<Vec<(usize, Token)>> {
        let mut lx = Lexer { text, pos: 0 };
        let mut out = Vec::new();
        while let Some(t) = lx.next_token()? {
            out.push(t);
        }
        Ok(out)
    }

    fn error(&self, pos: usize, message: impl Into<String>) -> Error {
        Error::SyntaxError {
            position: pos,
            message: message.into(),
        }
    }

    fn next_token(&mut self) -> Result<Option<(usize, Token)>> {
        let bytes = self.text.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= bytes.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = bytes[self.pos];
        let tok = match c {
            b'(' => {
                self.pos += 1;
                Token::LParen
            }
            b')' => {
                self.pos += 1;
                Token::RParen
            }
            b'<' => {
                self.pos += 1;
                if bytes.get(self.pos) == Some(&b'=') {
                    self.pos += 1;
                    Token::LessEq
                } else {
                    Token::Less
                }
            }
            b'>' => {
                self.pos += 1;
                if bytes.get(self.pos) == Some(&b'=') {
                    self.pos += 1;
                    Token::GreaterEq
                } else {
                    Token::Greater
                }
            }
            b'=' | b'!' => {
                return Err(self.error(start, format!("unknown operator starting with {:?}", c as char)));
            }
            b'&' | b'|' => {
                return Err(self.error(
                    start,
                    "unknown operator; use the AND / OR keywords".to_string(),
                ));
            }
            _ if c == b'-' || c == b'+' || c == b'.' || c.is_ascii_digit() => {
                let mut end = self.pos + 1;
                while end < bytes.len()
                    && (bytes[end].is_ascii_digit()
                        || bytes[end] == b'.'
                        || bytes[end] == b'e'
                        || bytes[end] == b'E'
                        || ((bytes[end] == b'+' || bytes[end] == b'-')
                            && (bytes[end - 1] == b'e' || bytes[end - 1] == b'E')))
                {
                    end += 1;
                }
                let s = &self.text[self.pos..end];
                let v: f64 = s
                    .parse()
                    .map_err(|_| self.error(start, format!("bad number {s:?}")))?;
                self.pos = end;
                Token::Number(v)
            }
            _ if c.is_ascii_alphabetic() || c == b'_' => {
                let mut end = self.pos + 1;
                while end < bytes.len()
                    && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_')
                {
                    end += 1;
                }
                let word = &self.text[self.pos..end];
                self.pos = end;
                if word.eq_ignore_ascii_case("and") {
                    Token::And
                } else if word.eq_ignore_ascii_case("or") {
                    Token::Or
                } else {
                    Token::Ident(word.to_string())
                }
            }
            _ => {
                return Err(self.error(start, format!("unexpected character {:?}", c as char)));
            }
        };
        Ok(Some((start, tok)))
    }
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    warnings: Vec<String>,
}

impl Parser {
    fn error_here(&self, message: impl Into<String>) -> Error {
        let position = self
            .tokens
            .get(self.pos)
            .map(|&(p, _)| p)
            .unwrap_or(self.end);
        Error::SyntaxError {
            position,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn or_expr(&mut self) -> Result<QueryExpr> {
        let mut terms = vec![self.and_expr()?];
        while matches!(self.peek(), Some(Token::Or)) {
            self.advance();
            terms.push(self.and_expr()?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            QueryExpr::Or(terms)
        })
    }

    fn and_expr(&mut self) -> Result<QueryExpr> {
        let mut terms = vec![self.primary()?];
        while matches!(self.peek(), Some(Token::And)) {
            self.advance();
            terms.push(self.primary()?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            QueryExpr::And(terms)
        })
    }

    fn primary(&mut self) -> Result<QueryExpr> {
        match self.peek() {
            Some(Token::LParen) => {
                self.advance();
                let inner = self.or_expr()?;
                match self.advance() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(self.error_here("expected ')'")),
                }
            }
            Some(Token::Ident(_)) => self.variable_first(),
            Some(Token::Number(_)) => self.number_first(),
            _ => Err(self.error_here("expected a comparison or '('")),
        }
    }

    /// `VAR relop NUMBER`
    fn variable_first(&mut self) -> Result<QueryExpr> {
        let variable = match self.advance() {
            Some(Token::Ident(v)) => v,
            _ => unreachable!(),
        };
        let op = self.relop()?;
        let value = self.number()?;
        let mut p = unbounded(variable);
        apply_var_side(&mut p, op, value);
        Ok(QueryExpr::Leaf(p))
    }

    /// `NUMBER relop VAR` or `NUMBER relop VAR relop NUMBER`
    fn number_first(&mut self) -> Result<QueryExpr> {
        let first = match self.advance() {
            Some(Token::Number(v)) => v,
            _ => unreachable!(),
        };
        let op1 = self.relop()?;
        let variable = match self.advance() {
            Some(Token::Ident(v)) => v,
            _ => return Err(self.error_here("expected a variable name")),
        };
        let mut p = unbounded(variable);
        // `a < V` puts `a` on the low side; `a > V` on the high side.
        apply_number_side(&mut p, op1.clone(), first);

        if matches!(
            self.peek(),
            Some(Token::Less | Token::LessEq | Token::Greater | Token::GreaterEq)
        ) {
            let op2 = self.relop()?;
            if ascending(&op1) != ascending(&op2) {
                return Err(self.error_here(
                    "chained comparison must point one way (a < V < b or a > V > b)",
                ));
            }
            let second = self.number()?;
            apply_var_side(&mut p, op2, second);
            if p.lo > p.hi {
                let canonical = RangePredicate {
                    variable: p.variable.clone(),
                    lo: p.hi,
                    hi: p.lo,
                    lo_inclusive: p.hi_inclusive,
                    hi_inclusive: p.lo_inclusive,
                };
                self.warnings.push(format!(
                    "bounds for {:?} were reversed; canonicalized to \"{}\"",
                    canonical.variable, canonical
                ));
                p = canonical;
            }
        }
        Ok(QueryExpr::Leaf(p))
    }

    fn relop(&mut self) -> Result<Token> {
        match self.advance() {
            Some(t @ (Token::Less | Token::LessEq | Token::Greater | Token::GreaterEq)) => Ok(t),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.error_here("expected a comparison operator (<, <=, >, >=)"))
            }
        }
    }

    fn number(&mut self) -> Result<f64> {
        match self.advance() {
            Some(Token::Number(v)) => Ok(v),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.error_here("expected a number"))
            }
        }
    }
}

fn unbounded(variable: String) -> RangePredicate {
    RangePredicate {
        variable,
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
        lo_inclusive: false,
        hi_inclusive: false,
    }
}

fn ascending(op: &Token) -> bool {
    matches!(op, Token::Less | Token::LessEq)
}

/// Apply `VAR op value`: `V < b` bounds above, `V > a` bounds below.
fn apply_var_side(p: &mut RangePredicate, op: Token, value: f64) {
    match op {
        Token::Less => {
            p.hi = value;
            p.hi_inclusive = false;
        }
        Token::LessEq => {
            p.hi = value;
            p.hi_inclusive = true;
        }
        Token::Greater => {
            p.lo = value;
            p.lo_inclusive = false;
        }
        Token::GreaterEq => {
            p.lo = value;
            p.lo_inclusive = true;
        }
        _ => unreachable!(),
    }
}

/// Apply `value op VAR`: `a < V` bounds below, `a > V` bounds above.
fn apply_number_side(p: &mut RangePredicate, op: Token, value: f64) {
    match op {
        Token::Less => {
            p.lo = value;
            p.lo_inclusive = false;
        }
        Token::LessEq => {
            p.lo = value;
            p.lo_inclusive = true;
        }
        Token::Greater => {
            p.hi = value;
            p.hi_inclusive = false;
        }
        Token::GreaterEq => {
            p.hi = value;
            p.hi_inclusive = true;
        }
        _ => unreachable!(),
    }
}

/// Parse a query string into a canonicalized expression.
pub fn parse_query(text: &str) -> Result<ParsedQuery> {
    let tokens = Lexer::tokenize(text)?;
    if tokens.is_empty() {
        return Err(Error::SyntaxError {
            position: 0,
            message: "empty query".into(),
        });
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
        warnings: Vec::new(),
    };
    let expr = parser.or_expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.error_here("unexpected trailing input"));
    }
    Ok(ParsedQuery {
        expr,
        warnings: parser.warnings,
    })
}
