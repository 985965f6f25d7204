//! Polynomial expression parser.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' '-'? integer)?
//! atom  := integer | identifier | '(' expr ')'
//! ```
//!
//! Division is only by nonzero constants and negative powers only of rho or
//! of constants. Decimal literals are rejected so everything stays exact.

use num_bigint::BigInt;
use num_traits::Zero;

use super::poly::LaurentPolynomial;
use super::symbol::Symbol;
use super::Rational;
use crate::error::{Error, Result};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { offset: self.pos, message: message.into() })
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

    fn expr(&mut self) -> Result<LaurentPolynomial> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc += &self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc -= &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<LaurentPolynomial> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                b'/' => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.unary()?;
                    match d.as_constant() {
                        Some(c) if !c.is_zero() => acc = acc.scale(&c.recip()),
                        Some(_) => {
                            self.pos = at;
                            return self.err("division by zero");
                        }
                        None => {
                            self.pos = at;
                            return self.err("division is only allowed by a nonzero constant");
                        }
                    }
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<LaurentPolynomial> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        if self.peek() == Some(b'+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<LaurentPolynomial> {
        let (base, sym) = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let negative = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let start = self.pos;
        let n = self.integer()?;
        let n: i32 = match n.try_into() {
            Ok(n) => n,
            Err(_) => {
                self.pos = start;
                return self.err("exponent too large");
            }
        };
        if !negative {
            return Ok(base.pow(n as u32));
        }
        if let Some(c) = base.as_constant() {
            if c.is_zero() {
                return self.err("zero raised to a negative power");
            }
            return Ok(LaurentPolynomial::constant(num_traits::pow(c.recip(), n as usize)));
        }
        match sym {
            Some(s) if s.is_rho() => Ok(LaurentPolynomial::rho_pow(-n)),
            _ => {
                self.pos = start;
                self.err("negative powers are only allowed on rho or constants")
            }
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'.' | b'e' | b'E') {
            return self.err("decimal literals are not exact; write a fraction such as 3/2");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(text.parse().unwrap())
    }

    fn atom(&mut self) -> Result<(LaurentPolynomial, Option<Symbol>)> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok((e, None))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok((LaurentPolynomial::constant(Rational::from_integer(n)), None))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let s = Symbol::new(name);
                Ok((LaurentPolynomial::var(s), Some(s)))
            }
            Some(b'.') => self.err("decimal literals are not exact; write a fraction such as 3/2"),
            Some(c) => self.err(format!("unexpected character '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parse an exact polynomial expression such as `kappa - 1` or `3/2*rho^-1`.
pub fn parse_poly(text: &str) -> Result<LaurentPolynomial> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Parse an exact rational such as `-3/2` or `7`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let p = parse_poly(text)?;
    p.as_constant().ok_or(Error::Parse { offset: 0, message: format!("`{text}` is not a rational constant") })
}
