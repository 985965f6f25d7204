use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::poly::{LaurentPolynomial, Monomial};
use super::symbol::{Symbol, RHO};
use crate::error::{Error, Result};

/// A Laurent series in one variable, truncated after a given exponent.
///
/// Coefficients are polynomials in the remaining symbols. Coefficients of
/// exponents `start..=order` are exact; nothing is known beyond `order`.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    var: Symbol,
    start: i64,
    coeffs: Vec<LaurentPolynomial>,
    order: i64,
}

impl TruncatedSeries {
    /// Expansion of an exact polynomial, truncated at `order`.
    pub fn from_poly(p: &LaurentPolynomial, var: Symbol, order: i64) -> TruncatedSeries {
        let parts = p.split(var);
        let start = parts.keys().next().map_or(0, |&e| e as i64);
        let mut s = TruncatedSeries { var, start, coeffs: Vec::new(), order };
        for (e, c) in parts {
            let e = e as i64;
            if e > order {
                break;
            }
            s.set(e, c);
        }
        s
    }

    pub fn var(&self) -> Symbol {
        self.var
    }

    /// Highest exponent whose coefficient is known.
    pub fn order(&self) -> i64 {
        self.order
    }

    /// Lowest exponent that may be nonzero.
    pub fn start(&self) -> i64 {
        self.start
    }

    fn set(&mut self, e: i64, c: LaurentPolynomial) {
        let idx = (e - self.start) as usize;
        if self.coeffs.len() <= idx {
            self.coeffs.resize(idx + 1, LaurentPolynomial::zero());
        }
        self.coeffs[idx] = c;
    }

    /// Coefficient of `var^n`. Exponents below the start are zero; asking
    /// beyond the truncation order is an error.
    pub fn coefficient(&self, n: i64) -> Result<LaurentPolynomial> {
        if n > self.order {
            return Err(Error::TruncationInsufficient { needed: n, have: self.order });
        }
        Ok(self.coeff_unchecked(n))
    }

    fn coeff_unchecked(&self, n: i64) -> LaurentPolynomial {
        if n < self.start {
            return LaurentPolynomial::zero();
        }
        self.coeffs.get((n - self.start) as usize).cloned().unwrap_or_default()
    }

    /// Nonzero `(exponent, coefficient)` pairs within the known range.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &LaurentPolynomial)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.start + i as i64, c))
            .filter(|(_, c)| !c.is_zero())
    }

    pub fn to_map(&self) -> BTreeMap<i64, LaurentPolynomial> {
        self.terms().map(|(e, c)| (e, c.clone())).collect()
    }

    /// The coefficient of `var^0`.
    pub fn constant_term(&self) -> Result<LaurentPolynomial> {
        if self.order < 0 {
            return Err(Error::TruncationInsufficient { needed: 0, have: self.order });
        }
        Ok(self.coeff_unchecked(0))
    }

    /// The known part as a polynomial (requires `var` to be rho or the
    /// series to have no negative exponents).
    pub fn truncated_polynomial(&self) -> Result<LaurentPolynomial> {
        let mut out = LaurentPolynomial::zero();
        for (e, c) in self.terms() {
            let m = Monomial::from_pairs(&[(self.var, e as i32)])?;
            out += &c.mul_monomial(&m);
        }
        Ok(out)
    }

    /// Product of two series in the same variable; the result is known up to
    /// the smaller of the two guaranteed orders.
    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        assert_eq!(self.var, other.var, "series in different variables");
        let order = (self.order + other.start).min(other.order + self.start);
        let start = self.start + other.start;
        let mut out = TruncatedSeries { var: self.var, start, coeffs: Vec::new(), order };
        for n in start..=order {
            let mut acc = LaurentPolynomial::zero();
            for (i, a) in self.terms() {
                let j = n - i;
                if j < other.start {
                    break;
                }
                if j > other.order {
                    continue;
                }
                let b = other.coeff_unchecked(j);
                if !b.is_zero() {
                    acc += &(a * &b);
                }
            }
            out.set(n, acc);
        }
        out
    }

    /// Forget every coefficient beyond `order`.
    pub fn truncate(&self, order: i64) -> TruncatedSeries {
        let order = order.min(self.order);
        let keep = (order - self.start + 1).max(0) as usize;
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(keep);
        TruncatedSeries { var: self.var, start: self.start, coeffs, order }
    }

    /// Multiply by an exact polynomial in the series variable.
    pub fn mul_poly(&self, p: &LaurentPolynomial) -> TruncatedSeries {
        let exact = TruncatedSeries::from_poly(p, self.var, i64::MAX / 4);
        self.mul(&exact)
    }
}

/// Expansion of `1/d` about the origin in `var`, valid in the innermost
/// annulus.
///
/// Writing `d = var^m * (c_0 + c_1 var + ...)`, the lowest coefficient `c_0`
/// must be a nonzero rational; the result is `var^-m * (c_0 + ...)^-1` with
/// the bracket inverted through order `order`, so `d * s = 1 + O(var^(order+1))`.
pub fn series_invert(d: &LaurentPolynomial, var: Symbol, order: i64) -> Result<TruncatedSeries> {
    let parts = d.split(var);
    let Some((&m, lead)) = parts.iter().next() else {
        return Err(Error::NonUnitLeadingCoefficient { coefficient: "0".into() });
    };
    let inv_lead = match lead.as_constant() {
        Some(c) if !c.is_zero() => c.recip(),
        _ => return Err(Error::NonUnitLeadingCoefficient { coefficient: lead.to_string() }),
    };
    let m = m as i64;
    let tail: Vec<(i64, &LaurentPolynomial)> =
        parts.iter().skip(1).map(|(&e, c)| (e as i64 - m, c)).collect();

    let mut inv: Vec<LaurentPolynomial> = Vec::new();
    for n in 0..=order.max(-1) {
        if n == 0 {
            inv.push(LaurentPolynomial::constant(inv_lead.clone()));
            continue;
        }
        let mut acc = LaurentPolynomial::zero();
        for &(i, c) in &tail {
            if i > n {
                break;
            }
            let prev = &inv[(n - i) as usize];
            if !prev.is_zero() {
                acc += &(c * prev);
            }
        }
        inv.push(acc.scale(&(-inv_lead.clone())));
    }
    Ok(TruncatedSeries { var, start: -m, coeffs: inv, order: order - m })
}

/// Coefficient of `var^n` in the innermost-annulus expansion of `num / den`,
/// inverting `den` through relative order `order`.
///
/// Fails with `TruncationInsufficient` if `order` is too small to determine
/// the coefficient exactly.
pub fn coefficient_of_ratio(
    num: &LaurentPolynomial,
    den: &LaurentPolynomial,
    var: Symbol,
    n: i64,
    order: i64,
) -> Result<LaurentPolynomial> {
    let inv = series_invert(den, var, order)?;
    let parts = num.split(var);
    let Some((&lowest, _)) = parts.iter().next() else {
        return Ok(LaurentPolynomial::zero());
    };
    let needed = n - lowest as i64;
    if needed > inv.order() {
        return Err(Error::TruncationInsufficient { needed, have: inv.order() });
    }
    let mut acc = LaurentPolynomial::zero();
    for (e, c) in parts {
        let s = inv.coeff_unchecked(n - e as i64);
        if !s.is_zero() {
            acc += &(&c * &s);
        }
    }
    Ok(acc)
}

/// Smallest inversion order for which [`coefficient_of_ratio`] is exact.
pub fn required_order(num: &LaurentPolynomial, den: &LaurentPolynomial, var: Symbol, n: i64) -> i64 {
    let lo_num = num.exponent_range(var).map_or(0, |(lo, _)| lo as i64);
    let lo_den = den.exponent_range(var).map_or(0, |(lo, _)| lo as i64);
    (n - lo_num + lo_den).max(0)
}

/// Constant term in rho of `num / den`.
pub fn ct_rho_of_ratio(num: &LaurentPolynomial, den: &LaurentPolynomial, order: i64) -> Result<LaurentPolynomial> {
    coefficient_of_ratio(num, den, RHO, 0, order)
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let known = self.truncated_polynomial().unwrap_or_default();
        if known.is_zero() {
            write!(f, "O({}^{})", self.var, self.order + 1)
        } else {
            write!(f, "{} + O({}^{})", known, self.var, self.order + 1)
        }
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedSeries({self})")
    }
}
