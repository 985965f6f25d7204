//! Exact sparse Laurent polynomials over the rationals, truncated Laurent
//! series in one variable, and constant-term extraction.

mod parse;
mod poly;
mod render;
mod series;
mod symbol;

pub use parse::{parse_poly, parse_rational};
pub use poly::{coefficient_mass, has_integer_coefficients, join, LaurentPolynomial, Monomial};
pub use render::{canonical_terms, to_latex};
pub use series::{coefficient_of_ratio, ct_rho_of_ratio, required_order, series_invert, TruncatedSeries};
pub use symbol::{Symbol, RHO, X};

/// Arbitrary-precision rational coefficients.
pub type Rational = num_rational::BigRational;

/// Ring operation selector for [`poly_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

pub fn poly_arith(a: &LaurentPolynomial, b: &LaurentPolynomial, op: ArithOp) -> LaurentPolynomial {
    match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
    }
}

/// Shorthand for a rational `num/den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}
