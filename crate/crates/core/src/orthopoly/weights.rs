use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::symbolic::{LaurentPolynomial, Rational, Symbol, RHO, X};

/// Edge weights of paths in a strip of height `L`.
///
/// Across steps at height `i` weigh `b_i = b + bhat_i` and down steps from
/// height `i` weigh `lambda_i = lambda + lhat_i`, where `(b, lambda)` is the
/// background and the hatted values are decorations present only at the
/// listed heights. Every weight may be a rational or a polynomial in
/// decoration symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSpec {
    background_b: LaurentPolynomial,
    background_lambda: LaurentPolynomial,
    across: BTreeMap<usize, LaurentPolynomial>,
    down: BTreeMap<usize, LaurentPolynomial>,
    strip_height: usize,
}

fn check_value(what: &str, v: &LaurentPolynomial) -> Result<()> {
    if v.contains_symbol(X) || v.contains_symbol(RHO) {
        return Err(Error::InvalidWeights(format!(
            "{what} = `{v}` uses a reserved symbol (x or rho)"
        )));
    }
    Ok(())
}

impl WeightSpec {
    pub fn new(
        b: impl Into<LaurentPolynomial>,
        lambda: impl Into<LaurentPolynomial>,
        strip_height: usize,
    ) -> Result<WeightSpec> {
        let (b, lambda) = (b.into(), lambda.into());
        check_value("b", &b)?;
        check_value("lambda", &lambda)?;
        Ok(WeightSpec {
            background_b: b,
            background_lambda: lambda,
            across: BTreeMap::new(),
            down: BTreeMap::new(),
            strip_height,
        })
    }

    /// Dyck/Ballot background `b = 0, lambda = 1` with no decorations.
    pub fn dyck(strip_height: usize) -> WeightSpec {
        WeightSpec::new(0, 1, strip_height).unwrap()
    }

    /// Every weight an independent symbol: `b_i` for across steps and
    /// `lambda_i` for down steps.
    pub fn generic(strip_height: usize) -> WeightSpec {
        let mut w = WeightSpec::new(0, 0, strip_height).unwrap();
        for i in 0..=strip_height {
            w.across.insert(i, Symbol::new(&format!("b_{i}")).into());
        }
        for i in 1..=strip_height {
            w.down.insert(i, Symbol::new(&format!("lambda_{i}")).into());
        }
        w
    }

    /// Add the across decoration `bhat_height`; heights range over `0..=L`.
    pub fn with_across(mut self, height: usize, value: impl Into<LaurentPolynomial>) -> Result<WeightSpec> {
        if height > self.strip_height {
            return Err(Error::InvalidWeights(format!(
                "across decoration at height {height} outside 0..={}",
                self.strip_height
            )));
        }
        let value = value.into();
        check_value(&format!("across[{height}]"), &value)?;
        self.across.insert(height, value);
        Ok(self)
    }

    /// Add the down decoration `lhat_height`; heights range over `1..=L`.
    pub fn with_down(mut self, height: usize, value: impl Into<LaurentPolynomial>) -> Result<WeightSpec> {
        if height == 0 || height > self.strip_height {
            return Err(Error::InvalidWeights(format!(
                "down decoration at height {height} outside 1..={}",
                self.strip_height
            )));
        }
        let value = value.into();
        check_value(&format!("down[{height}]"), &value)?;
        self.down.insert(height, value);
        Ok(self)
    }

    pub fn strip_height(&self) -> usize {
        self.strip_height
    }

    pub fn background_b(&self) -> &LaurentPolynomial {
        &self.background_b
    }

    pub fn background_lambda(&self) -> &LaurentPolynomial {
        &self.background_lambda
    }

    pub fn across_decorations(&self) -> &BTreeMap<usize, LaurentPolynomial> {
        &self.across
    }

    pub fn down_decorations(&self) -> &BTreeMap<usize, LaurentPolynomial> {
        &self.down
    }

    /// Effective across weight at height `i`.
    pub fn b(&self, i: usize) -> LaurentPolynomial {
        match self.across.get(&i) {
            Some(d) => &self.background_b + d,
            None => self.background_b.clone(),
        }
    }

    /// Effective down weight from height `i`.
    pub fn lambda(&self, i: usize) -> LaurentPolynomial {
        match self.down.get(&i) {
            Some(d) => &self.background_lambda + d,
            None => self.background_lambda.clone(),
        }
    }

    /// `(b, lambda)` when both backgrounds are rational.
    pub fn background_rationals(&self) -> Option<(Rational, Rational)> {
        Some((self.background_b.as_constant()?, self.background_lambda.as_constant()?))
    }

    /// Fails if some effective `lambda_i`, `1 <= i <= L`, is the rational zero.
    pub fn check_nonzero_lambdas(&self) -> Result<()> {
        for i in 1..=self.strip_height {
            if self.lambda(i).is_zero() {
                return Err(Error::ZeroLambda { context: format!("lambda_{i} = 0") });
            }
        }
        Ok(())
    }

    /// Decorations moved down by `j` heights (those below `j` are dropped),
    /// so that weight index `i` of the result is index `i + j` of `self`.
    pub fn shifted(&self, j: usize) -> WeightSpec {
        let shift = |m: &BTreeMap<usize, LaurentPolynomial>| {
            m.iter()
                .filter(|(&i, _)| i >= j)
                .map(|(&i, v)| (i - j, v.clone()))
                .collect::<BTreeMap<_, _>>()
        };
        let mut down = shift(&self.down);
        down.remove(&0);
        WeightSpec {
            background_b: self.background_b.clone(),
            background_lambda: self.background_lambda.clone(),
            across: shift(&self.across),
            down,
            strip_height: self.strip_height.saturating_sub(j),
        }
    }

    /// Same weights in a different strip height; decorations above the new
    /// height are rejected.
    pub fn with_strip_height(&self, strip_height: usize) -> Result<WeightSpec> {
        let mut w = WeightSpec::new(self.background_b.clone(), self.background_lambda.clone(), strip_height)?;
        for (&i, v) in &self.across {
            w = w.with_across(i, v.clone())?;
        }
        for (&i, v) in &self.down {
            w = w.with_down(i, v.clone())?;
        }
        Ok(w)
    }

    /// Symbols appearing anywhere in the weights.
    pub fn symbols(&self) -> std::collections::BTreeSet<Symbol> {
        let mut s = self.background_b.symbols();
        s.extend(self.background_lambda.symbols());
        for v in self.across.values().chain(self.down.values()) {
            s.extend(v.symbols());
        }
        s
    }
}
