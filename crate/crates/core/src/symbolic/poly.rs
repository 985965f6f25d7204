use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::symbol::{Symbol, RHO};
use super::Rational;
use crate::error::{Error, Result};

/// A power product, stored as `(symbol, exponent)` pairs sorted by symbol id
/// with no zero exponents.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial(SmallVec<[(Symbol, i32); 4]>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(SmallVec::new())
    }

    pub fn var(sym: Symbol, exp: i32) -> Monomial {
        let mut m = Monomial::one();
        if exp != 0 {
            m.0.push((sym, exp));
        }
        m
    }

    /// Build from arbitrary pairs; repeated symbols are merged.
    pub fn from_pairs(pairs: &[(Symbol, i32)]) -> Result<Monomial> {
        let mut m = Monomial::one();
        for &(s, e) in pairs {
            m = m.mul(&Monomial::var(s, e));
        }
        for &(s, e) in m.0.iter() {
            if e < 0 && !s.is_rho() {
                return Err(Error::NegativeExponent {
                    symbol: s.name().to_string(),
                    exponent: e,
                });
            }
        }
        Ok(m)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(Symbol, i32)] {
        &self.0
    }

    pub fn exponent(&self, sym: Symbol) -> i32 {
        self.0
            .iter()
            .find(|(s, _)| *s == sym)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().map(|&(_, e)| e as i64).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e != 0 {
                        out.push((a[i].0, e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// The monomial with `sym` removed, together with its exponent.
    pub fn split_off(&self, sym: Symbol) -> (i32, Monomial) {
        let mut rest = self.clone();
        match rest.0.iter().position(|(s, _)| *s == sym) {
            Some(pos) => {
                let (_, e) = rest.0.remove(pos);
                (e, rest)
            }
            None => (0, rest),
        }
    }
}

/// Sparse multivariate Laurent polynomial with exact rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is
/// mathematical equality. Only [`RHO`] may appear with a negative exponent.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPolynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl LaurentPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::constant(Rational::new(num.into(), den.into()))
    }

    pub fn var(sym: Symbol) -> Self {
        Self::term(Rational::one(), Monomial::var(sym, 1))
    }

    /// `sym^exp`; negative `exp` is only allowed for rho.
    pub fn var_pow(sym: Symbol, exp: i32) -> Result<Self> {
        Ok(Self::term(Rational::one(), Monomial::from_pairs(&[(sym, exp)])?))
    }

    pub fn rho_pow(exp: i32) -> Self {
        Self::term(Rational::one(), Monomial::var(RHO, exp))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPolynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map_or(false, |c| c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// `Some(c)` when the polynomial is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    /// Coefficient of the empty monomial.
    pub fn constant_part(&self) -> Rational {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.terms
            .keys()
            .flat_map(|m| m.pairs().iter().map(|&(s, _)| s))
            .collect()
    }

    pub fn contains_symbol(&self, sym: Symbol) -> bool {
        self.terms.keys().any(|m| m.exponent(sym) != 0)
    }

    /// `(min, max)` exponent of `sym` over all terms, `None` for zero.
    pub fn exponent_range(&self, sym: Symbol) -> Option<(i32, i32)> {
        let mut it = self.terms.keys().map(|m| m.exponent(sym));
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), e| (lo.min(e), hi.max(e))))
    }

    pub fn degree_in(&self, sym: Symbol) -> Option<i32> {
        self.exponent_range(sym).map(|(_, hi)| hi)
    }

    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    /// Group terms by the exponent of `sym`; the values no longer contain `sym`.
    pub fn split(&self, sym: Symbol) -> BTreeMap<i32, LaurentPolynomial> {
        let mut out: BTreeMap<i32, LaurentPolynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(sym);
            out.entry(e).or_default().terms.insert(rest, c.clone());
        }
        out
    }

    /// Coefficient of `sym^exp` as a polynomial in the remaining symbols.
    pub fn coefficient(&self, sym: Symbol, exp: i32) -> LaurentPolynomial {
        let mut out = LaurentPolynomial::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(sym);
            if e == exp {
                out.terms.insert(rest, c.clone());
            }
        }
        out
    }

    /// Coefficient of rho^0.
    pub fn constant_term_rho(&self) -> LaurentPolynomial {
        self.coefficient(RHO, 0)
    }

    pub fn scale(&self, c: &Rational) -> LaurentPolynomial {
        if c.is_zero() {
            return LaurentPolynomial::zero();
        }
        LaurentPolynomial {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Multiply by a monomial. The caller keeps non-rho exponents nonnegative.
    pub fn mul_monomial(&self, m: &Monomial) -> LaurentPolynomial {
        LaurentPolynomial {
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect(),
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &LaurentPolynomial, c: &Rational) {
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn pow(&self, n: u32) -> LaurentPolynomial {
        let mut result = LaurentPolynomial::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Substitute each bound symbol by a polynomial. A symbol raised to a
    /// negative power may only be bound to a monomial unit `c * rho^k`.
    pub fn substitute(&self, bindings: &HashMap<Symbol, LaurentPolynomial>) -> Result<LaurentPolynomial> {
        let mut inverses: HashMap<Symbol, LaurentPolynomial> = HashMap::new();
        let mut powers: HashMap<(Symbol, i32), LaurentPolynomial> = HashMap::new();
        let mut out = LaurentPolynomial::zero();
        for (m, c) in &self.terms {
            let mut kept = Monomial::one();
            let mut acc = LaurentPolynomial::constant(c.clone());
            for &(s, e) in m.pairs() {
                let Some(b) = bindings.get(&s) else {
                    kept = kept.mul(&Monomial::var(s, e));
                    continue;
                };
                if let Some(p) = powers.get(&(s, e)) {
                    acc = &acc * p;
                    continue;
                }
                let p = if e >= 0 {
                    b.pow(e as u32)
                } else {
                    if !inverses.contains_key(&s) {
                        inverses.insert(s, invert_monomial_unit(s, b)?);
                    }
                    inverses[&s].pow((-e) as u32)
                };
                acc = &acc * &p;
                powers.insert((s, e), p);
            }
            out += &acc.mul_monomial(&kept);
        }
        Ok(out)
    }

    /// Substitute a single symbol.
    pub fn substitute_one(&self, sym: Symbol, value: &LaurentPolynomial) -> Result<LaurentPolynomial> {
        let mut b = HashMap::new();
        b.insert(sym, value.clone());
        self.substitute(&b)
    }

    /// Division with remainder by a polynomial monic in `var`, treating all
    /// other symbols as coefficients. Both inputs must have nonnegative
    /// exponents of `var`.
    pub fn div_rem_monic(&self, divisor: &LaurentPolynomial, var: Symbol) -> Result<(LaurentPolynomial, LaurentPolynomial)> {
        let dsplit = divisor.split(var);
        let (&deg, lead) = dsplit
            .iter()
            .next_back()
            .ok_or(Error::NotMonic { symbol: var.name().to_string() })?;
        if !lead.is_one() || dsplit.keys().next().map_or(false, |&e| e < 0) {
            return Err(Error::NotMonic { symbol: var.name().to_string() });
        }
        let mut rem = self.split(var);
        let mut quot = LaurentPolynomial::zero();
        while let Some((&top, _)) = rem.iter().next_back() {
            if top < deg {
                break;
            }
            let c = rem.remove(&top).unwrap();
            let shift = top - deg;
            quot += &c.mul_monomial(&Monomial::var(var, shift));
            for (&e, dc) in dsplit.iter().filter(|(&e, _)| e != deg) {
                let entry = rem.entry(e + shift).or_default();
                *entry -= &(&c * dc);
                if entry.is_zero() {
                    rem.remove(&(e + shift));
                }
            }
        }
        let remainder = join(var, rem);
        Ok((quot, remainder))
    }
}

/// Inverse of `split`: sum of `coeff * var^e`.
pub fn join(var: Symbol, parts: BTreeMap<i32, LaurentPolynomial>) -> LaurentPolynomial {
    let mut out = LaurentPolynomial::zero();
    for (e, p) in parts {
        let m = Monomial::var(var, e);
        for (k, c) in p.terms {
            out.terms.insert(k.mul(&m), c);
        }
    }
    out
}

fn invert_monomial_unit(sym: Symbol, b: &LaurentPolynomial) -> Result<LaurentPolynomial> {
    let err = || Error::NonInvertibleSubstitution {
        symbol: sym.name().to_string(),
        binding: b.to_string(),
    };
    if b.terms.len() != 1 {
        return Err(err());
    }
    let (m, c) = b.terms.iter().next().unwrap();
    if m.pairs().iter().any(|&(s, _)| !s.is_rho()) {
        return Err(err());
    }
    Ok(LaurentPolynomial::term(c.recip(), Monomial::var(RHO, -m.exponent(RHO))))
}

impl From<Rational> for LaurentPolynomial {
    fn from(c: Rational) -> Self {
        LaurentPolynomial::constant(c)
    }
}

impl From<i64> for LaurentPolynomial {
    fn from(n: i64) -> Self {
        LaurentPolynomial::from_int(n)
    }
}

impl From<Symbol> for LaurentPolynomial {
    fn from(s: Symbol) -> Self {
        LaurentPolynomial::var(s)
    }
}

impl AddAssign<&LaurentPolynomial> for LaurentPolynomial {
    fn add_assign(&mut self, rhs: &LaurentPolynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&LaurentPolynomial> for LaurentPolynomial {
    fn sub_assign(&mut self, rhs: &LaurentPolynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPolynomial::zero();
        }
        if let Some(c) = self.as_constant() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.as_constant() {
            return self.scale(&c);
        }
        let mut out = LaurentPolynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        LaurentPolynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for LaurentPolynomial {
            type Output = LaurentPolynomial;
            fn $method(self, rhs: LaurentPolynomial) -> LaurentPolynomial {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&LaurentPolynomial> for LaurentPolynomial {
            type Output = LaurentPolynomial;
            fn $method(self, rhs: &LaurentPolynomial) -> LaurentPolynomial {
                (&self).$method(rhs)
            }
        }
        impl $tr<LaurentPolynomial> for &LaurentPolynomial {
            type Output = LaurentPolynomial;
            fn $method(self, rhs: LaurentPolynomial) -> LaurentPolynomial {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        -&self
    }
}

impl std::iter::Sum for LaurentPolynomial {
    fn sum<I: Iterator<Item = LaurentPolynomial>>(iter: I) -> Self {
        let mut out = LaurentPolynomial::zero();
        for p in iter {
            out += &p;
        }
        out
    }
}

impl std::iter::Product for LaurentPolynomial {
    fn product<I: Iterator<Item = LaurentPolynomial>>(iter: I) -> Self {
        iter.fold(LaurentPolynomial::one(), |acc, p| &acc * &p)
    }
}

/// Whether every coefficient is an integer.
pub fn has_integer_coefficients(p: &LaurentPolynomial) -> bool {
    p.terms().all(|(_, c)| c.is_integer())
}

/// Sum of absolute values of coefficients; a cheap size measure for reports.
pub fn coefficient_mass(p: &LaurentPolynomial) -> Rational {
    p.terms().map(|(_, c)| c.abs()).fold(Rational::zero(), |a, b| a + b)
}
