//! Surface syntax for generator-algebra expressions.
//!
//! Generators are `a b c d`, adjoint is postfix `'`, multiplication `*`,
//! powers `^`, Gaussian-rational literals like `3`, `1/2`, `3/4*i`, the
//! deformation symbol `s`, and the tensor-leg separator `(x)`.

use crate::ncalg::{NCPoly, LA, LB, LC, LD};
use crate::scalar::{GRat, SCoeff};
use crate::tensor::TensorPoly;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntaxError {
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at column {}: {}", self.pos + 1, self.msg)
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Gen(u8),
    S,
    Imag,
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    Prime,
    LParen,
    RParen,
    TensorSep,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        match ch {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            'a' => {
                toks.push((i, Tok::Gen(LA)));
                i += 1;
            }
            'b' => {
                toks.push((i, Tok::Gen(LB)));
                i += 1;
            }
            'c' => {
                toks.push((i, Tok::Gen(LC)));
                i += 1;
            }
            'd' => {
                toks.push((i, Tok::Gen(LD)));
                i += 1;
            }
            's' => {
                toks.push((i, Tok::S));
                i += 1;
            }
            'i' => {
                toks.push((i, Tok::Imag));
                i += 1;
            }
            '+' => {
                toks.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                toks.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                toks.push((i, Tok::Star));
                i += 1;
            }
            '^' => {
                toks.push((i, Tok::Caret));
                i += 1;
            }
            '/' => {
                toks.push((i, Tok::Slash));
                i += 1;
            }
            '\'' => {
                toks.push((i, Tok::Prime));
                i += 1;
            }
            '(' => {
                if i + 2 < bytes.len() && bytes[i + 1] == b'x' && bytes[i + 2] == b')' {
                    toks.push((i, Tok::TensorSep));
                    i += 3;
                } else {
                    toks.push((i, Tok::LParen));
                    i += 1;
                }
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().unwrap();
                toks.push((start, Tok::Int(n)));
            }
            _ => {
                return Err(SyntaxError { pos: i, msg: format!("unexpected character '{}'", ch) })
            }
        }
    }
    Ok(toks)
}

/// A parsed value: rank-1 polynomial or a 2/3-leg tensor element.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Poly(NCPoly),
    Tensor2(TensorPoly<2>),
    Tensor3(TensorPoly<3>),
}

impl Value {
    pub fn into_poly(self) -> Option<NCPoly> {
        match self {
            Value::Poly(p) => Some(p),
            _ => None,
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek_pos(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: &str) -> Result<T, SyntaxError> {
        Err(SyntaxError { pos: self.peek_pos(), msg: msg.into() })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), SyntaxError> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.err(what)
            }
        }
    }

    fn parse_nat(&mut self) -> Result<BigInt, SyntaxError> {
        match self.next() {
            Some(Tok::Int(n)) => Ok(n),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.err("expected integer")
            }
        }
    }

    // tensor := sum ('(x)' sum)*
    fn parse_tensor(&mut self) -> Result<Value, SyntaxError> {
        let first = self.parse_sum()?;
        let mut legs = vec![first];
        while matches!(self.peek(), Some(Tok::TensorSep)) {
            self.next();
            legs.push(self.parse_sum()?);
        }
        match legs.len() {
            1 => Ok(Value::Poly(legs.pop().unwrap())),
            2 => Ok(Value::Tensor2(TensorPoly::of(&legs[0], &legs[1]))),
            3 => {
                let t2 = TensorPoly::of(&legs[0], &legs[1]);
                let mut t3 = TensorPoly::<3>::zero();
                for (key, c) in t2.terms() {
                    for (m, c2) in legs[2].terms() {
                        t3.add_term([key[0], key[1], *m], c.mul(c2));
                    }
                }
                Ok(Value::Tensor3(t3))
            }
            _ => self.err("at most 3 tensor legs supported"),
        }
    }

    // sum := ['-'] product (('+'|'-') product)*
    fn parse_sum(&mut self) -> Result<NCPoly, SyntaxError> {
        let mut acc = if matches!(self.peek(), Some(Tok::Minus)) {
            self.next();
            self.parse_product()?.neg()
        } else {
            self.parse_product()?
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.next();
                    acc = acc.add(&self.parse_product()?);
                }
                Some(Tok::Minus) => {
                    self.next();
                    acc = acc.sub(&self.parse_product()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_product(&mut self) -> Result<NCPoly, SyntaxError> {
        let mut acc = self.parse_postfix()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.next();
            acc = acc.mul(&self.parse_postfix()?);
        }
        Ok(acc)
    }

    // postfix := atom (''' | '^' nat)*
    fn parse_postfix(&mut self) -> Result<NCPoly, SyntaxError> {
        let mut acc = self.parse_atom()?;
        loop {
            match self.peek() {
                Some(Tok::Prime) => {
                    self.next();
                    acc = acc.adjoint();
                }
                Some(Tok::Caret) => {
                    self.next();
                    let n = self.parse_nat()?;
                    let mut k: u64 = 0;
                    let mut p = NCPoly::one();
                    let limit: BigInt = 64.into();
                    if n > limit {
                        return self.err("exponent too large");
                    }
                    let n64: u64 = n.to_string().parse().unwrap();
                    while k < n64 {
                        p = p.mul(&acc);
                        k += 1;
                    }
                    acc = p;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_atom(&mut self) -> Result<NCPoly, SyntaxError> {
        match self.next() {
            Some(Tok::Gen(l)) => Ok(NCPoly::letter(l)),
            Some(Tok::S) => Ok(NCPoly::scalar(SCoeff::s())),
            Some(Tok::Imag) => Ok(NCPoly::scalar(SCoeff::from_grat(GRat::i()))),
            Some(Tok::Int(n)) => {
                let num = n;
                let den = if matches!(self.peek(), Some(Tok::Slash)) {
                    self.next();
                    let d = self.parse_nat()?;
                    if d.is_zero() {
                        return self.err("zero denominator");
                    }
                    d
                } else {
                    1.into()
                };
                let g = GRat::new(BigRational::new(num, den), BigRational::zero());
                Ok(NCPoly::scalar(SCoeff::from_grat(g)))
            }
            Some(Tok::LParen) => {
                let v = self.parse_sum()?;
                self.expect(Tok::RParen, "expected ')'")?;
                Ok(v)
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.err("expected generator, scalar, or '('")
            }
        }
    }
}

/// Parses an expression to a canonical value.
pub fn parse(text: &str) -> Result<Value, SyntaxError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len() };
    let v = p.parse_tensor()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(v)
}

/// Parses an expression that must be a plain (rank-1) polynomial.
pub fn parse_poly(text: &str) -> Result<NCPoly, SyntaxError> {
    let pos0 = text.len();
    match parse(text)? {
        Value::Poly(p) => Ok(p),
        _ => Err(SyntaxError { pos: pos0, msg: "expected a rank-1 expression".into() }),
    }
}
