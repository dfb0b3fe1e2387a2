//! Infix expression grammar for user-supplied fields.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | name | name '(' expr ')' | '(' expr ')'
//! ```
//!
//! Names are the coordinates `x y z t`, the constants `pi` and `e`, the
//! functions `sin cos tan sinh cosh tanh exp ln sqrt`, and any parameter
//! declared by the caller.

use thiserror::Error;

use super::{Coord, Func, ScalarField};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ParseError {
    #[error("unexpected character `{ch}` at offset {pos}")]
    BadChar { ch: char, pos: usize },
    #[error("unexpected end of expression")]
    UnexpectedEnd,
    #[error("unexpected token `{token}` at offset {pos}")]
    Unexpected { token: String, pos: usize },
    #[error("unknown name `{0}` (not a coordinate, constant, function or declared parameter)")]
    UnknownName(String),
    #[error("invalid number `{0}`")]
    BadNumber(String),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Name(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let (pos, ch) = chars[k];
        if ch.is_whitespace() {
            k += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = k;
            while k < chars.len() && (chars[k].1.is_ascii_digit() || chars[k].1 == '.') {
                k += 1;
            }
            // exponent part: 1e-5, 2.5E3
            if k < chars.len() && (chars[k].1 == 'e' || chars[k].1 == 'E') {
                let mut j = k + 1;
                if j < chars.len() && (chars[j].1 == '+' || chars[j].1 == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].1.is_ascii_digit() {
                    k = j;
                    while k < chars.len() && chars[k].1.is_ascii_digit() {
                        k += 1;
                    }
                }
            }
            let text: String = chars[start..k].iter().map(|c| c.1).collect();
            let v = text.parse::<f64>().map_err(|_| ParseError::BadNumber(text.clone()))?;
            out.push((Tok::Num(v), pos));
        } else if ch.is_alphabetic() || ch == '_' {
            let start = k;
            while k < chars.len() && (chars[k].1.is_alphanumeric() || chars[k].1 == '_') {
                k += 1;
            }
            out.push((Tok::Name(chars[start..k].iter().map(|c| c.1).collect()), pos));
        } else if "+-*/^(),".contains(ch) {
            out.push((Tok::Op(ch), pos));
            k += 1;
        } else {
            return Err(ParseError::BadChar { ch, pos });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    params: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn unexpected(&self) -> ParseError {
        match self.toks.get(self.at) {
            None => ParseError::UnexpectedEnd,
            Some((tok, pos)) => ParseError::Unexpected {
                token: match tok {
                    Tok::Num(v) => v.to_string(),
                    Tok::Name(n) => n.clone(),
                    Tok::Op(c) => c.to_string(),
                },
                pos: *pos,
            },
        }
    }

    fn expr(&mut self) -> Result<ScalarField, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<ScalarField, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if self.eat('/') {
                acc = acc / self.unary()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<ScalarField, ParseError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<ScalarField, ParseError> {
        let base = self.primary()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(base.pow(&exp));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<ScalarField, ParseError> {
        let Some((tok, _)) = self.toks.get(self.at).cloned() else {
            return Err(ParseError::UnexpectedEnd);
        };
        match tok {
            Tok::Num(v) => {
                self.at += 1;
                Ok(ScalarField::constant(v))
            }
            Tok::Op('(') => {
                self.at += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.unexpected());
                }
                Ok(inner)
            }
            Tok::Name(name) => {
                self.at += 1;
                if let Some(func) = Func::from_name(&name) {
                    if !self.eat('(') {
                        return Err(self.unexpected());
                    }
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return Err(self.unexpected());
                    }
                    return Ok(arg.apply(func));
                }
                match name.as_str() {
                    "x" => Ok(ScalarField::coord(Coord::X)),
                    "y" => Ok(ScalarField::coord(Coord::Y)),
                    "z" => Ok(ScalarField::coord(Coord::Z)),
                    "t" => Ok(ScalarField::coord(Coord::T)),
                    "pi" => Ok(ScalarField::constant(std::f64::consts::PI)),
                    "e" => Ok(ScalarField::constant(std::f64::consts::E)),
                    other if self.params.contains(&other) => Ok(ScalarField::param(other)),
                    other => Err(ParseError::UnknownName(other.to_string())),
                }
            }
            Tok::Op(_) => Err(self.unexpected()),
        }
    }
}

/// Parse an infix expression over `x, y, z, t` and the declared parameters.
pub fn parse_expr(src: &str, params: &[&str]) -> Result<ScalarField, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        at: 0,
        params,
    };
    let f = p.expr()?;
    if p.at != p.toks.len() {
        return Err(p.unexpected());
    }
    Ok(f)
}
