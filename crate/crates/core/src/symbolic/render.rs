//! Canonical text rendering.
//!
//! Terms are ordered by descending total degree, ties broken by lexicographic
//! order over symbol names (alphabetical variables, larger exponent first).
//! Factors inside a term appear in alphabetical order, e.g.
//! `kappa^2 + kappa*omega`, `rho^2 + 4*rho + 6 + 4*rho^-1 + rho^-2`.
//! The output is deterministic and parses back to the same polynomial.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed};

use super::poly::{LaurentPolynomial, Monomial};
use super::Rational;

fn named(m: &Monomial) -> Vec<(&'static str, i32)> {
    let mut v: Vec<_> = m.pairs().iter().map(|&(s, e)| (s.name(), e)).collect();
    v.sort_by(|a, b| a.0.cmp(b.0));
    v
}

fn lex_desc(a: &[(&str, i32)], b: &[(&str, i32)]) -> Ordering {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some(&(_, ea)), None) => return if ea > 0 { Ordering::Less } else { Ordering::Greater },
            (None, Some(&(_, eb))) => return if eb > 0 { Ordering::Greater } else { Ordering::Less },
            (Some(&(na, ea)), Some(&(nb, eb))) => match na.cmp(nb) {
                Ordering::Equal => {
                    if ea != eb {
                        return eb.cmp(&ea);
                    }
                    i += 1;
                    j += 1;
                }
                // `a` has a variable `b` lacks (exponent 0 there)
                Ordering::Less => return if ea > 0 { Ordering::Less } else { Ordering::Greater },
                Ordering::Greater => return if eb > 0 { Ordering::Greater } else { Ordering::Less },
            },
        }
    }
}

/// Terms in canonical order.
pub fn canonical_terms(p: &LaurentPolynomial) -> Vec<(Vec<(&'static str, i32)>, Rational)> {
    let mut terms: Vec<_> = p
        .terms()
        .map(|(m, c)| (m.total_degree(), named(m), c.clone()))
        .collect();
    terms.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| lex_desc(&a.1, &b.1)));
    terms.into_iter().map(|(_, m, c)| (m, c)).collect()
}

fn monomial_text(m: &[(&str, i32)]) -> String {
    m.iter()
        .map(|&(n, e)| if e == 1 { n.to_string() } else { format!("{n}^{e}") })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = canonical_terms(self);
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in terms.iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            let body = if m.is_empty() {
                abs.to_string()
            } else if abs.is_one() {
                monomial_text(m)
            } else {
                format!("{}*{}", abs, monomial_text(m))
            };
            match (i, negative) {
                (0, false) => f.write_str(&body)?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPolynomial({self})")
    }
}

const GREEK: &[&str] = &[
    "alpha", "beta", "gamma", "delta", "epsilon", "kappa", "lambda", "mu", "nu", "omega", "rho",
    "sigma", "tau", "theta", "phi", "chi", "psi",
];

fn latex_symbol(name: &str) -> String {
    let (base, sub) = match name.split_once('_') {
        Some((b, s)) => (b, Some(s)),
        None => (name, None),
    };
    let base = if GREEK.contains(&base) { format!("\\{base}") } else { base.to_string() };
    match sub {
        Some(s) => format!("{base}_{{{}}}", s.replace('_', ",")),
        None => base,
    }
}

fn latex_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
    }
}

/// LaTeX rendering, presentation only. Same term order as `Display`.
pub fn to_latex(p: &LaurentPolynomial) -> String {
    let terms = canonical_terms(p);
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in terms.iter().enumerate() {
        let abs = c.abs();
        let mono = m
            .iter()
            .map(|&(n, e)| {
                let s = latex_symbol(n);
                if e == 1 { s } else { format!("{s}^{{{e}}}") }
            })
            .collect::<Vec<_>>()
            .join(" ");
        let body = if m.is_empty() {
            latex_rational(&abs)
        } else if abs.is_one() {
            mono
        } else {
            format!("{} {}", latex_rational(&abs), mono)
        };
        match (i, c.is_negative()) {
            (0, false) => out.push_str(&body),
            (0, true) => out.push_str(&format!("-{body}")),
            (_, false) => out.push_str(&format!(" + {body}")),
            (_, true) => out.push_str(&format!(" - {body}")),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse_poly;

    fn p(s: &str) -> LaurentPolynomial {
        parse_poly(s).unwrap()
    }

    #[test]
    fn dmr_style_rendering() {
        assert_eq!(p("kappa*omega + kappa^2").to_string(), "kappa^2 + kappa*omega");
    }

    #[test]
    fn rho_powers_descend() {
        assert_eq!(
            p("rho^-2 + 4*rho^-1 + 6 + 4*rho + rho^2").to_string(),
            "rho^2 + 4*rho + 6 + 4*rho^-1 + rho^-2"
        );
    }

    #[test]
    fn signs_and_fractions() {
        assert_eq!(p("-x + 3/2").to_string(), "-x + 3/2");
        assert_eq!(p("0").to_string(), "0");
        assert_eq!(p("-2*kappa*x").to_string(), "-2*kappa*x");
    }

    #[test]
    fn latex_greek_and_subscripts() {
        assert_eq!(to_latex(&p("kappa_1^2 - 1/2*omega")), "\\kappa_{1}^{2} - \\frac{1}{2} \\omega");
    }
}
