//! Recursive-descent parser with Pratt-style precedence climbing.
//!
//! Grammar: infix with precedence `^` (right assoc) > unary `-` > `*` `/` >
//! `+` `-`, explicit function application `f(arg)`, no implicit
//! multiplication. `pi` and `e` are reserved constants; `C`, `b` and
//! `c<digits>` parse as inert arbitrary constants; `int(f, v)` denotes an
//! unevaluated antiderivative. The token `y'` is accepted as a variable only
//! when parsing an ODE right-hand side.

use super::{canonical, Expr, Func, NamedConst};
use num_rational::Rational64;
use std::fmt;

/// Parse error with byte offset and a description of what was expected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    /// Unexpected input; carries byte offset and the expected-token set.
    Syntax { offset: usize, expected: String },
    /// A function name outside the supported catalog.
    UnknownFunction { offset: usize, name: String },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { offset, expected } => {
                write!(f, "syntax error at byte {offset}: expected {expected}")
            }
            ParseError::UnknownFunction { offset, name } => {
                write!(f, "unknown function `{name}` at byte {offset}")
            }
        }
    }
}

impl std::error::Error for ParseError {}

/// Parse an expression in the plain grammar (no `y'`).
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    Parser::new(text, false).parse_all()
}

/// Parse an ODE right-hand side, where `y'` is a legal variable token.
pub fn parse_ode_rhs(text: &str) -> Result<Expr, ParseError> {
    Parser::new(text, true).parse_all()
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(Rational64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    allow_yprime: bool,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, allow_yprime: bool) -> Self {
        Parser {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            allow_yprime,
        }
    }

    fn parse_all(mut self) -> Result<Expr, ParseError> {
        let e = self.expr_bp(0)?;
        self.skip_ws();
        if self.pos != self.bytes.len() {
            return Err(self.syntax("end of input or operator"));
        }
        Ok(canonical(&e))
    }

    fn syntax(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            expected: expected.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Result<Option<(Tok, usize)>, ParseError> {
        let save = self.pos;
        let tok = self.next_token()?;
        let consumed = self.pos;
        self.pos = save;
        Ok(tok.map(|t| (t, consumed)))
    }

    fn next_token(&mut self) -> Result<Option<Tok>, ParseError> {
        self.skip_ws();
        if self.pos >= self.bytes.len() {
            return Ok(None);
        }
        let b = self.bytes[self.pos];
        let tok = match b {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'/' => {
                self.pos += 1;
                Tok::Slash
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b',' => {
                self.pos += 1;
                Tok::Comma
            }
            b'0'..=b'9' | b'.' => return self.number().map(Some),
            _ if b.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.bytes.len()
                    && (self.bytes[self.pos].is_ascii_alphanumeric())
                {
                    self.pos += 1;
                }
                let mut name = self.src[start..self.pos].to_string();
                // `y'` is a single variable token in ODE right-hand sides.
                if self.allow_yprime
                    && self.pos < self.bytes.len()
                    && self.bytes[self.pos] == b'\''
                {
                    self.pos += 1;
                    name.push('\'');
                }
                Tok::Ident(name)
            }
            _ => return Err(self.syntax("number, identifier or operator")),
        };
        Ok(Some(tok))
    }

    fn number(&mut self) -> Result<Tok, ParseError> {
        let start = self.pos;
        let mut seen_dot = false;
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'0'..=b'9' => self.pos += 1,
                b'.' if !seen_dot => {
                    seen_dot = true;
                    self.pos += 1;
                }
                _ => break,
            }
        }
        let text = &self.src[start..self.pos];
        if text == "." {
            self.pos = start;
            return Err(self.syntax("digits"));
        }
        let value = if seen_dot {
            let (int_part, frac_part) = text.split_once('.').unwrap();
            let int_val: i64 = if int_part.is_empty() {
                0
            } else {
                int_part.parse().map_err(|_| self.syntax("smaller number"))?
            };
            let mut denom: i64 = 1;
            let mut num: i64 = 0;
            for d in frac_part.bytes() {
                num = num
                    .checked_mul(10)
                    .and_then(|n| n.checked_add((d - b'0') as i64))
                    .ok_or_else(|| self.syntax("smaller number"))?;
                denom = denom.checked_mul(10).ok_or_else(|| self.syntax("smaller number"))?;
            }
            Rational64::new(int_val * denom + num, denom)
        } else {
            Rational64::from_integer(text.parse().map_err(|_| self.syntax("smaller number"))?)
        };
        Ok(Tok::Number(value))
    }

    /// Pratt loop. Binding powers: `+ -` 1, `* /` 3, unary `-` 5, `^` 7
    /// (right associative, so its right operand binds at 6).
    fn expr_bp(&mut self, min_bp: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.prefix()?;
        loop {
            let save = self.pos;
            let tok = match self.next_token()? {
                Some(t) => t,
                None => break,
            };
            let (l_bp, r_bp) = match tok {
                Tok::Plus | Tok::Minus => (1, 2),
                Tok::Star | Tok::Slash => (3, 4),
                Tok::Caret => (7, 6),
                _ => {
                    self.pos = save;
                    break;
                }
            };
            if l_bp < min_bp {
                self.pos = save;
                break;
            }
            let rhs = self.expr_bp(r_bp)?;
            lhs = match tok {
                Tok::Plus => Expr::Sum(vec![lhs, rhs]),
                Tok::Minus => Expr::Sum(vec![lhs, Expr::Product(vec![Expr::Integer(-1), rhs])]),
                Tok::Star => Expr::Product(vec![lhs, rhs]),
                Tok::Slash => Expr::Product(vec![
                    lhs,
                    Expr::Power(Box::new(rhs), Box::new(Expr::Integer(-1))),
                ]),
                Tok::Caret => Expr::Power(Box::new(lhs), Box::new(rhs)),
                _ => unreachable!(),
            };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr, ParseError> {
        let save = self.pos;
        let tok = self
            .next_token()?
            .ok_or_else(|| self.syntax("expression"))?;
        match tok {
            Tok::Number(r) => Ok(Expr::from_ratio(r)),
            Tok::Minus => {
                let operand = self.expr_bp(5)?;
                Ok(Expr::Product(vec![Expr::Integer(-1), operand]))
            }
            Tok::LParen => {
                let inner = self.expr_bp(0)?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => self.ident(save, name),
            _ => {
                self.pos = save;
                Err(self.syntax("expression"))
            }
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        let save = self.pos;
        match self.next_token()? {
            Some(Tok::RParen) => Ok(()),
            _ => {
                self.pos = save;
                Err(self.syntax("`)`"))
            }
        }
    }

    fn ident(&mut self, ident_offset: usize, name: String) -> Result<Expr, ParseError> {
        let followed_by_paren = matches!(self.peek()?, Some((Tok::LParen, _)));
        if followed_by_paren {
            if name == "int" {
                // int(integrand, var)
                self.next_token()?;
                let integrand = self.expr_bp(0)?;
                let save = self.pos;
                match self.next_token()? {
                    Some(Tok::Comma) => {}
                    _ => {
                        self.pos = save;
                        return Err(self.syntax("`,`"));
                    }
                }
                let var = match self.next_token()? {
                    Some(Tok::Ident(v)) => v,
                    _ => return Err(self.syntax("integration variable")),
                };
                self.expect_rparen()?;
                return Ok(Expr::Integral(Box::new(integrand), var));
            }
            let tag = Func::from_name(&name).ok_or(ParseError::UnknownFunction {
                offset: ident_offset,
                name: name.clone(),
            })?;
            self.next_token()?;
            let arg = self.expr_bp(0)?;
            self.expect_rparen()?;
            return Ok(Expr::Func(tag, Box::new(arg)));
        }
        Ok(match name.as_str() {
            "pi" => Expr::Const(NamedConst::Pi),
            "e" => Expr::Const(NamedConst::E),
            _ if is_arb_const_name(&name) => Expr::ArbConst(name),
            _ => Expr::Var(name),
        })
    }
}

/// Names reserved for inert arbitrary constants: `C`, `b`, `c1`, `c2`, ...
pub(crate) fn is_arb_const_name(name: &str) -> bool {
    if name == "C" || name == "b" {
        return true;
    }
    let mut chars = name.chars();
    chars.next() == Some('c') && !name[1..].is_empty() && name[1..].bytes().all(|b| b.is_ascii_digit())
}
