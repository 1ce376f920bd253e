//! Text grammar for polynomials and maps.
//!
//! ```text
//! poly    := term (("+"|"-") term)*        (a leading "-" is allowed)
//! term    := coeff ("*"? varpow)* | varpow ("*" varpow)*
//! varpow  := ident ("^" nat)?
//! coeff   := int ("/" nat)?
//! ident   := letter (letter | digit | "_")*
//! ```
//!
//! Whitespace is insignificant. Maps are written `[p1; p2; ...; pn]`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::arith::Ring;
use crate::error::{Error, Result};
use crate::poly::{Monomial, Polynomial, VariableSet};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokenize(src: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (t, at) = lx.next()?;
            let end = t == Tok::End;
            out.push((t, at));
            if end {
                return Ok(out);
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize)> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&b) = bytes.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        let single = match b {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'^' => Some(Tok::Caret),
            b'/' => Some(Tok::Slash),
            _ => None,
        };
        if let Some(t) = single {
            self.pos += 1;
            return Ok((t, start));
        }
        if b.is_ascii_digit() {
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let v: BigInt = self.src[start..self.pos].parse().expect("digits");
            return Ok((Tok::Int(v), start));
        }
        if b.is_ascii_alphabetic() {
            while self.pos < bytes.len()
                && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
            {
                self.pos += 1;
            }
            return Ok((Tok::Ident(self.src[start..self.pos].to_string()), start));
        }
        let ch = self.src[start..].chars().next().unwrap();
        Err(Error::Syntax { offset: start, message: format!("unexpected character `{ch}`") })
    }
}

struct Parser<'v> {
    toks: Vec<(Tok, usize)>,
    i: usize,
    vars: &'v VariableSet,
    ring: Ring,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn offset(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if t != Tok::End {
            self.i += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { offset: self.offset(), message: message.into() })
    }

    fn poly(&mut self) -> Result<Polynomial> {
        let mut acc = Polynomial::zero(self.ring, self.vars);
        let mut negate = false;
        if *self.peek() == Tok::Minus {
            self.bump();
            negate = true;
        }
        loop {
            let t = self.term()?;
            acc = if negate { &acc - &t } else { &acc + &t };
            match self.peek() {
                Tok::Plus => negate = false,
                Tok::Minus => negate = true,
                Tok::End => return Ok(acc),
                _ => return self.err("expected `+`, `-` or end of input"),
            }
            self.bump();
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut exps = vec![0u32; self.vars.len()];
        match self.peek().clone() {
            Tok::Int(n) => {
                let at = self.offset();
                self.bump();
                let mut value = BigRational::from_integer(n);
                if *self.peek() == Tok::Slash {
                    self.bump();
                    let Tok::Int(d) = self.peek().clone() else {
                        return self.err("expected a denominator");
                    };
                    if d.is_zero() {
                        return self.err("zero denominator");
                    }
                    self.bump();
                    value /= BigRational::from_integer(d);
                }
                let coeff = self.ring.from_rational(&value).map_err(|_| {
                    Error::CoefficientNotInRing(format!("{value} (offset {at})"), self.ring.to_string())
                })?;
                loop {
                    match self.peek() {
                        Tok::Star => {
                            self.bump();
                            self.varpow(&mut exps)?;
                        }
                        Tok::Ident(_) => self.varpow(&mut exps)?,
                        _ => break,
                    }
                }
                let m = Monomial::from_exponents(exps);
                Polynomial::from_terms(self.ring, self.vars, [(m, coeff)])
            }
            Tok::Ident(_) => {
                self.varpow(&mut exps)?;
                while *self.peek() == Tok::Star {
                    self.bump();
                    self.varpow(&mut exps)?;
                }
                let m = Monomial::from_exponents(exps);
                Polynomial::from_terms(self.ring, self.vars, [(m, self.ring.one())])
            }
            _ => self.err("expected a term"),
        }
    }

    fn varpow(&mut self, exps: &mut [u32]) -> Result<()> {
        let Tok::Ident(name) = self.peek().clone() else {
            return self.err("expected a variable");
        };
        let i = self.vars.index_of(&name).ok_or_else(|| Error::UnknownVariable(name.clone()))?;
        self.bump();
        let mut e = 1u32;
        if *self.peek() == Tok::Caret {
            self.bump();
            let Tok::Int(n) = self.peek().clone() else {
                return self.err("expected an exponent");
            };
            e = match n.to_u32() {
                Some(e) => e,
                None => return self.err("exponent too large"),
            };
            self.bump();
        }
        exps[i] += e;
        Ok(())
    }
}

impl Polynomial {
    pub fn parse(text: &str, vars: &VariableSet, ring: Ring) -> Result<Polynomial> {
        let toks = Lexer::tokenize(text)?;
        let mut p = Parser { toks, i: 0, vars, ring };
        p.poly()
    }
}

/// Splits `[p1; p2; ...]` into component texts with their byte offsets.
pub fn split_map_text(text: &str) -> Result<Vec<(usize, &str)>> {
    let trimmed_start = text.len() - text.trim_start().len();
    let inner = text.trim();
    if !inner.starts_with('[') {
        return Err(Error::Syntax { offset: trimmed_start, message: "expected `[`".into() });
    }
    if !inner.ends_with(']') {
        return Err(Error::Syntax { offset: text.trim_end().len(), message: "expected `]`".into() });
    }
    let body = &inner[1..inner.len() - 1];
    let mut out = Vec::new();
    let mut offset = trimmed_start + 1;
    for part in body.split(';') {
        out.push((offset, part));
        offset += part.len() + 1;
    }
    Ok(out)
}

pub(crate) fn parse_components(text: &str, vars: &VariableSet, ring: Ring) -> Result<Vec<Polynomial>> {
    split_map_text(text)?
        .into_iter()
        .map(|(offset, part)| {
            Polynomial::parse(part, vars, ring).map_err(|e| match e {
                Error::Syntax { offset: o, message } => Error::Syntax { offset: o + offset, message },
                other => other,
            })
        })
        .collect()
}
