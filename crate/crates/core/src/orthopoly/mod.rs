//! Orthogonal polynomials of the three-term recurrence
//!
//! ```text
//! P_k^(j) = (x - b_{k+j-1}) P_{k-1}^(j) - lambda_{k+j-1} P_{k-2}^(j),
//! P_1^(j) = x - b_j,  P_0^(j) = 1,
//! ```
//!
//! their reciprocals, the undecorated Chebyshev-type family `S_k`, and the
//! Laurent forms obtained by substituting `x = rho + b + lambda/rho`.

mod weights;

use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

pub use weights::WeightSpec;

use crate::error::{Error, Result};
use crate::symbolic::{LaurentPolynomial, Monomial, Rational, X};

/// `P_k^(j)(x)` together with its indices.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthoPoly {
    pub k: usize,
    pub j: usize,
    pub poly: LaurentPolynomial,
}

fn x_minus(c: &LaurentPolynomial) -> LaurentPolynomial {
    &LaurentPolynomial::var(X) - c
}

/// `[P_0^(j), ..., P_kmax^(j)]`.
pub fn ortho_table(kmax: usize, j: usize, w: &WeightSpec) -> Vec<LaurentPolynomial> {
    let mut table = Vec::with_capacity(kmax + 1);
    table.push(LaurentPolynomial::one());
    if kmax == 0 {
        return table;
    }
    table.push(x_minus(&w.b(j)));
    for k in 2..=kmax {
        let next = &(&x_minus(&w.b(k + j - 1)) * &table[k - 1]) - &(&w.lambda(k + j - 1) * &table[k - 2]);
        table.push(next);
    }
    table
}

pub fn ortho_poly(k: usize, j: usize, w: &WeightSpec) -> OrthoPoly {
    let poly = ortho_table(k, j, w).pop().unwrap();
    OrthoPoly { k, j, poly }
}

/// `P_k^(j)` with the convention `P_k = 0` for negative `k`.
pub fn ortho_poly_signed(k: i64, j: usize, w: &WeightSpec) -> LaurentPolynomial {
    if k < 0 {
        LaurentPolynomial::zero()
    } else {
        ortho_poly(k as usize, j, w).poly
    }
}

/// `[S_0, ..., S_kmax]` for `S_{k+1} = (x - b) S_k - lambda S_{k-1}`.
pub fn chebyshev_table(kmax: usize, b: &LaurentPolynomial, lambda: &LaurentPolynomial) -> Vec<LaurentPolynomial> {
    let step = x_minus(b);
    let mut table = vec![LaurentPolynomial::one()];
    if kmax >= 1 {
        table.push(step.clone());
    }
    for k in 2..=kmax {
        let next = &(&step * &table[k - 1]) - &(lambda * &table[k - 2]);
        table.push(next);
    }
    table
}

pub fn chebyshev_s(k: usize, b: &LaurentPolynomial, lambda: &LaurentPolynomial) -> LaurentPolynomial {
    chebyshev_table(k, b, lambda).pop().unwrap()
}

/// `x^k p(1/x)` for a polynomial of degree at most `k` in `x`.
pub fn reciprocal_of(p: &LaurentPolynomial, k: usize) -> LaurentPolynomial {
    let mut out = LaurentPolynomial::zero();
    for (e, c) in p.split(X) {
        assert!(e >= 0 && e as usize <= k, "degree in x exceeds {k}");
        out += &c.mul_monomial(&Monomial::var(X, k as i32 - e));
    }
    out
}

pub fn reciprocal(p: &OrthoPoly) -> LaurentPolynomial {
    reciprocal_of(&p.poly, p.k)
}

/// `p(rho + b + lambda/rho)` for rational `b` and nonzero `lambda`.
pub fn laurent_form(p: &LaurentPolynomial, b: &Rational, lambda: &Rational) -> Result<LaurentPolynomial> {
    if lambda.is_zero() {
        return Err(Error::ZeroLambda { context: "x = rho + b + lambda/rho".into() });
    }
    let sub = &(&LaurentPolynomial::rho_pow(1) + &LaurentPolynomial::constant(b.clone()))
        + &LaurentPolynomial::rho_pow(-1).scale(lambda);
    // Horner in x keeps intermediate sizes small.
    let parts = p.split(X);
    let top = parts.keys().next_back().copied().unwrap_or(0);
    let mut acc = LaurentPolynomial::zero();
    for e in (0..=top).rev() {
        acc = &acc * &sub;
        if let Some(c) = parts.get(&e) {
            acc += c;
        }
    }
    Ok(acc)
}

/// `R_k^(j)(rho) = P_k^(j)(rho + b + lambda/rho)`.
pub fn to_laurent(p: &OrthoPoly, b: &Rational, lambda: &Rational) -> Result<LaurentPolynomial> {
    laurent_form(&p.poly, b, lambda)
}

/// Evaluate `S_k(x0)` (with `b = 0`, `lambda = 1`) two ways: by the exact
/// recurrence at the binary rational `x0`, and by the surd formula
/// `((x + s)^(k+1) - (x - s)^(k+1)) / (2^(k+1) s)` with `s = sqrt(x^2 - 4)`.
pub fn chebyshev_closed_form_check(k: usize, x0: f64) -> Result<(f64, f64)> {
    if !x0.is_finite() || (x0 * x0 - 4.0).abs() < 1e-6 {
        return Err(Error::NearBranchPoint { x0 });
    }
    let xr = Rational::from_float(x0).ok_or(Error::NearBranchPoint { x0 })?;
    let (mut prev, mut cur) = (Rational::zero(), Rational::one());
    for _ in 0..k {
        let next = &xr * &cur - &prev;
        prev = cur;
        cur = next;
    }
    let exact = cur.to_f64().unwrap_or(f64::NAN);

    let s = Complex64::new(x0 * x0 - 4.0, 0.0).sqrt();
    let x = Complex64::new(x0, 0.0);
    let n = (k + 1) as i32;
    let closed = ((x + s).powi(n) - (x - s).powi(n)) / (s * 2f64.powi(n));
    Ok((exact, closed.re))
}

/// Evaluate a polynomial in `x` alone at a rational point.
pub fn eval_at(p: &LaurentPolynomial, x0: &Rational) -> Option<Rational> {
    let mut acc = Rational::zero();
    for (e, c) in p.split(X) {
        let c = c.as_constant()?;
        acc += c * num_traits::pow(x0.clone(), e as usize);
    }
    Some(acc)
}
