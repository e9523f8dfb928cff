//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (('+'|'-') term)* ;
//! term   := unary (('*'|'/') unary)* ;
//! unary  := '-' unary | power ;
//! power  := atom ('^' unary)? ;
//! atom   := NUMBER | 'r' | 's' | IDENT '(' expr (',' expr)* ')' | '(' expr ')' ;
//! IDENT  := 'sqrt' | 'exp' | 'ln_abs' | 'arctanh_re' | 'abs' | 'pow' ;
//! ```

use super::ast::{BinOp, Expr, Func};
use crate::error::{Error, Result};

/// Nesting limit that keeps recursion depth bounded on hostile input.
const MAX_DEPTH: usize = 200;

const PRIMARY_START: &[&str] = &["number", "'r'", "'s'", "function name", "'('", "'-'"];

/// Parse an expression in `r` and `s`.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        depth: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(&["operator", "end of input"]));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn error(&self, expected: &[&'static str]) -> Error {
        Error::ParseError {
            offset: self.pos,
            expected: expected.to_vec(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.depth >= MAX_DEPTH {
            return Err(self.error(&["shallower nesting"]));
        }
        self.depth += 1;
        let out = if self.eat(b'-') {
            self.unary().map(|e| Expr::Neg(Box::new(e)))
        } else {
            self.power()
        };
        self.depth -= 1;
        out
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error(&["operator", "')'"]));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.word(),
            _ => Err(self.error(PRIMARY_START)),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            self.pos = start;
            return Err(self.error(&["digit"]));
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            if digits(self) == 0 {
                return Err(self.error(&["exponent digits"]));
            }
        }
        // The slice is pure ASCII by construction.
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Expr::Num(v)),
            _ => {
                self.pos = start;
                Err(self.error(&["finite number"]))
            }
        }
    }

    fn word(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        match word {
            "r" => return Ok(Expr::R),
            "s" => return Ok(Expr::S),
            _ => {}
        }
        let Some(func) = Func::from_name(word) else {
            self.pos = start;
            return Err(self.error(&["'r'", "'s'", "function name"]));
        };
        if !self.eat(b'(') {
            return Err(self.error(&["'('"]));
        }
        let mut args = vec![self.expr()?];
        loop {
            if self.eat(b',') {
                if args.len() >= func.arity() {
                    self.pos -= 1;
                    return Err(self.error(&["')'"]));
                }
                args.push(self.expr()?);
            } else if self.peek() == Some(b')') {
                if args.len() < func.arity() {
                    return Err(self.error(&["','"]));
                }
                self.pos += 1;
                return Ok(Expr::Call(func, args));
            } else {
                let expected: &[&'static str] = if args.len() < func.arity() {
                    &["operator", "','"]
                } else {
                    &["operator", "')'"]
                };
                return Err(self.error(expected));
            }
        }
    }
}
