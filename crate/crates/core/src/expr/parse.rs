//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := power ('*' power)*
//! power   := postfix ('^' power)?
//! postfix := primary '!'*
//! primary := integer | 'k' | 'n' | '(' sum ')'
//! ```

use num_bigint::BigUint;

use super::{Expr, ExprError, Var};

/// Parses an expression over `k` and `n`.
pub fn parse_expr(text: &str) -> Result<Expr, ExprError> {
    Parser::new(text, false).parse()
}

/// Like [`parse_expr`], but also accepts the auxiliary index `j`.
pub fn parse_expr_with_aux(text: &str) -> Result<Expr, ExprError> {
    Parser::new(text, true).parse()
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigUint),
    Ident(String),
    Bang,
    Caret,
    Star,
    Plus,
    Minus,
    LParen,
    RParen,
    End,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    allow_aux: bool,
    peeked: Option<(usize, Tok)>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, allow_aux: bool) -> Self {
        Parser {
            src,
            pos: 0,
            allow_aux,
            peeked: None,
        }
    }

    fn parse(mut self) -> Result<Expr, ExprError> {
        let e = self.sum()?;
        match self.next()? {
            (_, Tok::End) => Ok(e),
            (offset, tok) => Err(syntax(offset, format!("unexpected {}", describe(&tok)))),
        }
    }

    fn lex(&mut self) -> Result<(usize, Tok), ExprError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = bytes.get(start) else {
            return Ok((start, Tok::End));
        };
        let single = match c {
            b'!' => Some(Tok::Bang),
            b'^' => Some(Tok::Caret),
            b'*' => Some(Tok::Star),
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            self.pos += 1;
            return Ok((start, tok));
        }
        if c.is_ascii_digit() {
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let digits = &self.src[start..self.pos];
            let value = digits
                .parse::<BigUint>()
                .map_err(|_| syntax(start, "malformed integer literal"))?;
            return Ok((start, Tok::Int(value)));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_') {
                self.pos += 1;
            }
            return Ok((start, Tok::Ident(self.src[start..self.pos].to_string())));
        }
        let ch = self.src[start..].chars().next().unwrap_or('?');
        Err(syntax(start, format!("unexpected character `{ch}`")))
    }

    fn peek(&mut self) -> Result<&Tok, ExprError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lex()?);
        }
        Ok(&self.peeked.as_ref().unwrap().1)
    }

    fn next(&mut self) -> Result<(usize, Tok), ExprError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lex(),
        }
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.product()?;
        loop {
            match self.peek()? {
                Tok::Plus => {
                    self.next()?;
                    acc = acc + self.product()?;
                }
                Tok::Minus => {
                    self.next()?;
                    acc = acc - self.product()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.power()?;
        while *self.peek()? == Tok::Star {
            self.next()?;
            acc = acc * self.power()?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.postfix()?;
        if *self.peek()? == Tok::Caret {
            self.next()?;
            let exponent = self.power()?;
            return Ok(base.pow(exponent));
        }
        Ok(base)
    }

    fn postfix(&mut self) -> Result<Expr, ExprError> {
        let mut e = self.primary()?;
        while *self.peek()? == Tok::Bang {
            self.next()?;
            e = e.fact();
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let (offset, tok) = self.next()?;
        match tok {
            Tok::Int(v) => Ok(Expr::Const(v)),
            Tok::Ident(name) => match name.as_str() {
                "k" => Ok(Expr::Var(Var::K)),
                "n" => Ok(Expr::Var(Var::N)),
                "j" if self.allow_aux => Ok(Expr::Var(Var::J)),
                _ => Err(ExprError::UnknownIdentifier { offset, name }),
            },
            Tok::LParen => {
                let inner = self.sum()?;
                match self.next()? {
                    (_, Tok::RParen) => Ok(inner),
                    (at, other) => Err(syntax(at, format!("expected `)`, found {}", describe(&other)))),
                }
            }
            other => Err(syntax(offset, format!("expected operand, found {}", describe(&other)))),
        }
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Int(v) => format!("integer `{v}`"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Bang => "`!`".into(),
        Tok::Caret => "`^`".into(),
        Tok::Star => "`*`".into(),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::End => "end of input".into(),
    }
}

fn syntax(offset: usize, message: impl Into<String>) -> ExprError {
    ExprError::Syntax {
        offset,
        message: message.into(),
    }
}
