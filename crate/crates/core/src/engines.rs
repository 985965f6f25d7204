//! Weight polynomials `Z_t(y', y; L)` of Motzkin paths in a strip, computed
//! five ways: path enumeration, transfer-matrix powers, the Viennot ratio of
//! reciprocal polynomials, the constant term in `rho`, and the truncated
//! generating function.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::orthopoly::{laurent_form, ortho_table, reciprocal_of, WeightSpec};
use crate::symbolic::{required_order, series_invert, LaurentPolynomial, Monomial, Rational, TruncatedSeries, RHO, X};

/// Default bound on `t` for path enumeration.
pub const DEFAULT_MAX_T: usize = 18;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StripQuery {
    pub t: usize,
    pub y_start: usize,
    pub y_end: usize,
    pub strip_height: usize,
}

impl StripQuery {
    pub fn new(t: usize, y_start: usize, y_end: usize, strip_height: usize) -> Result<StripQuery> {
        if y_start > strip_height || y_end > strip_height {
            return Err(Error::InvalidQuery(format!(
                "heights {y_start} -> {y_end} must lie in 0..={strip_height}"
            )));
        }
        Ok(StripQuery { t, y_start, y_end, strip_height })
    }

    /// `Y' = min(y', y)`.
    pub fn y_min(&self) -> usize {
        self.y_start.min(self.y_end)
    }

    /// `Y = max(y', y)`.
    pub fn y_max(&self) -> usize {
        self.y_start.max(self.y_end)
    }

    fn check(&self, w: &WeightSpec) -> Result<()> {
        if self.y_start > self.strip_height || self.y_end > self.strip_height {
            return Err(Error::InvalidQuery(format!("{self}: heights outside the strip")));
        }
        if w.strip_height() != self.strip_height {
            return Err(Error::InvalidQuery(format!(
                "{self}: weights are for L = {}",
                w.strip_height()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for StripQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t={} y'={} y={} L={}", self.t, self.y_start, self.y_end, self.strip_height)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Up,
    Across,
    Down,
}

/// A path given by its vertex heights `h_0, ..., h_t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticePath {
    heights: Vec<usize>,
    strip_height: usize,
}

impl LatticePath {
    pub fn from_heights(heights: Vec<usize>, strip_height: usize) -> Result<LatticePath> {
        if heights.is_empty() {
            return Err(Error::InvalidQuery("a path has at least one vertex".into()));
        }
        if let Some(h) = heights.iter().find(|&&h| h > strip_height) {
            return Err(Error::InvalidQuery(format!("height {h} outside 0..={strip_height}")));
        }
        if heights.windows(2).any(|p| p[0].abs_diff(p[1]) > 1) {
            return Err(Error::InvalidQuery("consecutive heights differ by more than one".into()));
        }
        Ok(LatticePath { heights, strip_height })
    }

    pub fn from_steps(start: usize, steps: &[Step], strip_height: usize) -> Result<LatticePath> {
        let mut heights = vec![start];
        let mut h = start as i64;
        for s in steps {
            h += match s {
                Step::Up => 1,
                Step::Across => 0,
                Step::Down => -1,
            };
            if h < 0 {
                return Err(Error::InvalidQuery("path drops below height 0".into()));
            }
            heights.push(h as usize);
        }
        LatticePath::from_heights(heights, strip_height)
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.heights.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn heights(&self) -> &[usize] {
        &self.heights
    }

    pub fn start(&self) -> usize {
        self.heights[0]
    }

    pub fn end(&self) -> usize {
        *self.heights.last().unwrap()
    }

    pub fn strip_height(&self) -> usize {
        self.strip_height
    }

    pub fn max_height(&self) -> usize {
        *self.heights.iter().max().unwrap()
    }

    /// `(step index, height)` for every vertex.
    pub fn vertices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.heights.iter().copied().enumerate()
    }

    pub fn steps(&self) -> Vec<Step> {
        self.heights
            .windows(2)
            .map(|p| match p[1] as i64 - p[0] as i64 {
                1 => Step::Up,
                0 => Step::Across,
                _ => Step::Down,
            })
            .collect()
    }
}

/// Product of edge weights: up steps weigh 1, an across step at height `k`
/// weighs `b_k` and a down step from height `k` weighs `lambda_k`.
pub fn path_weight(p: &LatticePath, w: &WeightSpec) -> LaurentPolynomial {
    let mut acc = LaurentPolynomial::one();
    for pair in p.heights.windows(2) {
        let (from, to) = (pair[0], pair[1]);
        if to == from {
            acc = &acc * &w.b(from);
        } else if to < from {
            acc = &acc * &w.lambda(from);
        }
    }
    acc
}

/// `prod_{y < l <= y'} lambda_l` when `y' > y`, otherwise 1.
pub fn h_factor(q: &StripQuery, w: &WeightSpec) -> LaurentPolynomial {
    (q.y_end + 1..=q.y_start).map(|l| w.lambda(l)).product()
}

// ---------------------------------------------------------------------------
// Path enumeration

/// Steps grouped by identical weight, so that each path is summarized by how
/// many times it uses each distinct weight value.
struct WeightClasses {
    values: Vec<LaurentPolynomial>,
    /// class of the across step at each height; `None` if its weight is zero
    across: Vec<Option<usize>>,
    down: Vec<Option<usize>>,
}

impl WeightClasses {
    fn new(w: &WeightSpec) -> WeightClasses {
        let mut values: Vec<LaurentPolynomial> = Vec::new();
        let mut class_of = |v: LaurentPolynomial| -> Option<usize> {
            if v.is_zero() {
                return None;
            }
            Some(match values.iter().position(|u| *u == v) {
                Some(i) => i,
                None => {
                    values.push(v);
                    values.len() - 1
                }
            })
        };
        let l = w.strip_height();
        let across = (0..=l).map(|h| class_of(w.b(h))).collect();
        let down = (0..=l).map(|h| if h == 0 { None } else { class_of(w.lambda(h)) }).collect();
        WeightClasses { values, across, down }
    }
}

trait Signature: Clone + Eq + Hash {
    fn get(&self, i: usize) -> u32;
    fn bump(&mut self, i: usize);
    fn unbump(&mut self, i: usize);
}

/// Exponent counts packed into one `u128`.
#[derive(Clone, PartialEq, Eq, Hash)]
struct Packed {
    v: u128,
    bits: u32,
}

impl Signature for Packed {
    fn get(&self, i: usize) -> u32 {
        ((self.v >> (self.bits as usize * i)) & ((1u128 << self.bits) - 1)) as u32
    }
    fn bump(&mut self, i: usize) {
        self.v += 1u128 << (self.bits as usize * i);
    }
    fn unbump(&mut self, i: usize) {
        self.v -= 1u128 << (self.bits as usize * i);
    }
}

impl Signature for Vec<u16> {
    fn get(&self, i: usize) -> u32 {
        self[i] as u32
    }
    fn bump(&mut self, i: usize) {
        self[i] += 1;
    }
    fn unbump(&mut self, i: usize) {
        self[i] -= 1;
    }
}

struct Walk<'a> {
    classes: &'a WeightClasses,
    strip: usize,
    t_max: usize,
    /// Record only paths of length `t_max` ending here (with pruning);
    /// `None` records every prefix.
    target: Option<usize>,
}

type Tally<S> = Vec<Vec<HashMap<S, u64>>>;

impl Walk<'_> {
    fn run<S: Signature>(&self, h: usize, d: usize, sig: &mut S, out: &mut Tally<S>) {
        match self.target {
            Some(y) => {
                if h.abs_diff(y) > self.t_max - d {
                    return;
                }
                if d == self.t_max {
                    *out[0][0].entry(sig.clone()).or_insert(0) += 1;
                    return;
                }
            }
            None => {
                *out[d][h].entry(sig.clone()).or_insert(0) += 1;
                if d == self.t_max {
                    return;
                }
            }
        }
        if h < self.strip {
            self.run(h + 1, d + 1, sig, out);
        }
        if let Some(c) = self.classes.across[h] {
            sig.bump(c);
            self.run(h, d + 1, sig, out);
            sig.unbump(c);
        }
        if let Some(c) = self.classes.down[h] {
            sig.bump(c);
            self.run(h - 1, d + 1, sig, out);
            sig.unbump(c);
        }
    }
}

fn expand<S: Signature>(classes: &WeightClasses, tally: &HashMap<S, u64>, powers: &mut [Vec<LaurentPolynomial>]) -> LaurentPolynomial {
    let mut total = LaurentPolynomial::zero();
    for (sig, &count) in tally {
        let mut term = LaurentPolynomial::from_int(count as i64);
        for (i, value) in classes.values.iter().enumerate() {
            let e = sig.get(i) as usize;
            if e == 0 {
                continue;
            }
            let cache = &mut powers[i];
            while cache.len() <= e {
                let next = &cache[cache.len() - 1] * value;
                cache.push(next);
            }
            term = &term * &cache[e];
        }
        total += &term;
    }
    total
}

fn walk_and_expand<S: Signature>(
    walk: &Walk,
    start: usize,
    rows: usize,
    cols: usize,
    mut sig: S,
) -> Vec<Vec<LaurentPolynomial>> {
    let mut tally: Tally<S> = vec![vec![HashMap::new(); cols]; rows];
    walk.run(start, 0, &mut sig, &mut tally);
    let mut powers: Vec<Vec<LaurentPolynomial>> = vec![vec![LaurentPolynomial::one()]; walk.classes.values.len()];
    tally
        .iter()
        .map(|row| row.iter().map(|m| expand(walk.classes, m, &mut powers)).collect())
        .collect()
}

fn enumerate_grouped(w: &WeightSpec, start: usize, t_max: usize, target: Option<usize>) -> Vec<Vec<LaurentPolynomial>> {
    let classes = WeightClasses::new(w);
    let walk = Walk { classes: &classes, strip: w.strip_height(), t_max, target };
    let (rows, cols) = match target {
        Some(_) => (1, 1),
        None => (t_max + 1, w.strip_height() + 1),
    };
    let bits = (usize::BITS - t_max.leading_zeros()).max(1);
    if classes.values.len() * bits as usize <= 128 {
        walk_and_expand(&walk, start, rows, cols, Packed { v: 0, bits })
    } else {
        walk_and_expand(&walk, start, rows, cols, vec![0u16; classes.values.len()])
    }
}

fn check_cap(t: usize, max_t: usize) -> Result<()> {
    if t > max_t {
        return Err(Error::SizeLimit { what: format!("path enumeration with t = {t}"), cap: max_t as u64 });
    }
    Ok(())
}

/// Sum of `path_weight` over every path of the query, by depth-first
/// enumeration with strip and reachability pruning. Steps of weight zero
/// are not followed. Paths using each weight value equally often are
/// tallied together and expanded once.
pub fn brute_force(q: &StripQuery, w: &WeightSpec) -> Result<LaurentPolynomial> {
    brute_force_capped(q, w, DEFAULT_MAX_T)
}

pub fn brute_force_capped(q: &StripQuery, w: &WeightSpec, max_t: usize) -> Result<LaurentPolynomial> {
    q.check(w)?;
    check_cap(q.t, max_t)?;
    let mut table = enumerate_grouped(w, q.y_start, q.t, Some(q.y_end));
    Ok(table.swap_remove(0).swap_remove(0))
}

/// `[t][y] -> Z_t(y_start, y; L)` for all `t <= t_max` from one enumeration.
pub fn brute_force_table(y_start: usize, t_max: usize, w: &WeightSpec, max_t: usize) -> Result<Vec<Vec<LaurentPolynomial>>> {
    StripQuery::new(t_max, y_start, y_start, w.strip_height())?;
    check_cap(t_max, max_t)?;
    Ok(enumerate_grouped(w, y_start, t_max, None))
}

/// Every path of the query whose weight is not identically zero.
pub fn enumerate_paths(q: &StripQuery, w: &WeightSpec, max_t: usize) -> Result<Vec<LatticePath>> {
    q.check(w)?;
    check_cap(q.t, max_t)?;
    let classes = WeightClasses::new(w);
    let mut out = Vec::new();
    let mut heights = vec![q.y_start];
    fn rec(q: &StripQuery, c: &WeightClasses, heights: &mut Vec<usize>, out: &mut Vec<LatticePath>) {
        let h = *heights.last().unwrap();
        let d = heights.len() - 1;
        if h.abs_diff(q.y_end) > q.t - d {
            return;
        }
        if d == q.t {
            out.push(LatticePath { heights: heights.clone(), strip_height: q.strip_height });
            return;
        }
        let mut next = Vec::with_capacity(3);
        if h < q.strip_height {
            next.push(h + 1);
        }
        if c.across[h].is_some() {
            next.push(h);
        }
        if c.down[h].is_some() {
            next.push(h - 1);
        }
        for n in next {
            heights.push(n);
            rec(q, c, heights, out);
            heights.pop();
        }
    }
    rec(q, &classes, &mut heights, &mut out);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Transfer matrix

/// The `(L+1) x (L+1)` Jacobi matrix: `b_i` on the diagonal, 1 above it and
/// `lambda_{i+1}` below it.
pub fn jacobi_matrix(w: &WeightSpec) -> Vec<Vec<LaurentPolynomial>> {
    let n = w.strip_height() + 1;
    let mut m = vec![vec![LaurentPolynomial::zero(); n]; n];
    for i in 0..n {
        m[i][i] = w.b(i);
        if i + 1 < n {
            m[i][i + 1] = LaurentPolynomial::one();
            m[i + 1][i] = w.lambda(i + 1);
        }
    }
    m
}

fn mat_mul(a: &[Vec<LaurentPolynomial>], b: &[Vec<LaurentPolynomial>]) -> Vec<Vec<LaurentPolynomial>> {
    let n = a.len();
    let mut out = vec![vec![LaurentPolynomial::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] += &(&a[i][k] * &b[k][j]);
                }
            }
        }
    }
    out
}

/// `T^t` by repeated multiplication.
pub fn matrix_power(m: &[Vec<LaurentPolynomial>], t: usize) -> Vec<Vec<LaurentPolynomial>> {
    let n = m.len();
    let mut acc: Vec<Vec<LaurentPolynomial>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { LaurentPolynomial::one() } else { LaurentPolynomial::zero() }).collect())
        .collect();
    for _ in 0..t {
        acc = mat_mul(&acc, m);
    }
    acc
}

/// Rows `e_{y'} T^t` for `t = 0..=t_max`, multiplying one step at a time.
pub fn transfer_matrix_rows(y_start: usize, t_max: usize, w: &WeightSpec) -> Vec<Vec<LaurentPolynomial>> {
    let n = w.strip_height() + 1;
    let m = jacobi_matrix(w);
    let mut row = vec![LaurentPolynomial::zero(); n];
    row[y_start] = LaurentPolynomial::one();
    let mut rows = vec![row.clone()];
    for _ in 0..t_max {
        let mut next = vec![LaurentPolynomial::zero(); n];
        for (k, r) in row.iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            for j in k.saturating_sub(1)..(k + 2).min(n) {
                if !m[k][j].is_zero() {
                    next[j] += &(r * &m[k][j]);
                }
            }
        }
        row = next;
        rows.push(row.clone());
    }
    rows
}

/// `(T^t)_{y', y}`.
pub fn transfer_matrix(q: &StripQuery, w: &WeightSpec) -> Result<LaurentPolynomial> {
    q.check(w)?;
    let mut rows = transfer_matrix_rows(q.y_start, q.t, w);
    Ok(rows.pop().unwrap().swap_remove(q.y_end))
}

// ---------------------------------------------------------------------------
// Viennot ratio and generating function

fn lambdas_nonzero(w: &WeightSpec) -> Result<()> {
    w.check_nonzero_lambdas()
}

/// Reciprocal polynomials of a weight spec with `1 / Pbar_{L+1}` expanded
/// once, for answering many queries.
pub struct ViennotContext {
    strip: usize,
    w: WeightSpec,
    base: Vec<LaurentPolynomial>,
    /// `shifted[j] = Pbar^(j)_{L+1-j}` for `1 <= j <= L+1`
    shifted: Vec<LaurentPolynomial>,
    inv: TruncatedSeries,
}

impl ViennotContext {
    pub fn new(w: &WeightSpec, order: usize) -> Result<ViennotContext> {
        lambdas_nonzero(w)?;
        let l = w.strip_height();
        let table = ortho_table(l + 1, 0, w);
        let base: Vec<_> = table.iter().enumerate().map(|(k, p)| reciprocal_of(p, k)).collect();
        let mut shifted = vec![LaurentPolynomial::zero()];
        for j in 1..=l + 1 {
            let k = l + 1 - j;
            shifted.push(reciprocal_of(&ortho_table(k, j, w)[k], k));
        }
        let inv = series_invert(&base[l + 1], X, order as i64)?;
        Ok(ViennotContext { strip: l, w: w.clone(), base, shifted, inv })
    }

    /// `x^{Y-Y'} Pbar_{Y'} h Pbar^(Y+1)_{L-Y}`.
    pub fn numerator(&self, y_start: usize, y_end: usize) -> Result<LaurentPolynomial> {
        let q = StripQuery::new(0, y_start, y_end, self.strip)?;
        let (lo, hi) = (q.y_min(), q.y_max());
        let shift = LaurentPolynomial::term(Rational::from_integer(1.into()), Monomial::var(X, (hi - lo) as i32));
        Ok(&(&(&shift * &self.base[lo]) * &h_factor(&q, &self.w)) * &self.shifted[hi + 1])
    }

    /// `[x^t]` of the ratio.
    pub fn query(&self, q: &StripQuery) -> Result<LaurentPolynomial> {
        q.check(&self.w)?;
        let num = self.numerator(q.y_start, q.y_end)?;
        let mut acc = LaurentPolynomial::zero();
        for (e, c) in num.split(X) {
            let n = q.t as i64 - e as i64;
            if n < 0 {
                continue;
            }
            let s = self.inv.coefficient(n)?;
            if !s.is_zero() {
                acc += &(&c * &s);
            }
        }
        Ok(acc)
    }

    pub fn series(&self, y_start: usize, y_end: usize, order: usize) -> Result<TruncatedSeries> {
        if order as i64 > self.inv.order() {
            return Err(Error::TruncationInsufficient { needed: order as i64, have: self.inv.order() });
        }
        let num = self.numerator(y_start, y_end)?;
        Ok(self.inv.mul_poly(&num).truncate(order as i64))
    }
}

/// `[x^t]` of `x^{Y-Y'} Pbar_{Y'} h Pbar^(Y+1)_{L-Y} / Pbar_{L+1}`, with the
/// denominator expanded as a power series (its constant term is 1).
pub fn viennot_ct(q: &StripQuery, w: &WeightSpec) -> Result<LaurentPolynomial> {
    q.check(w)?;
    ViennotContext::new(w, q.t)?.query(q)
}

/// `M_L(y', y; x) = sum_t Z_t x^t` through `x^order`.
pub fn generating_function(
    y_start: usize,
    y_end: usize,
    strip_height: usize,
    w: &WeightSpec,
    order: usize,
) -> Result<TruncatedSeries> {
    StripQuery::new(0, y_start, y_end, strip_height)?.check(w)?;
    ViennotContext::new(w, order)?.series(y_start, y_end, order)
}

// ---------------------------------------------------------------------------
// Constant term in rho

/// Laurent forms `R_k^(j)(rho)` and `1 / R_{L+1}` for rational backgrounds.
pub struct RhoCtContext {
    strip: usize,
    t_max: usize,
    w: WeightSpec,
    base: Vec<LaurentPolynomial>,
    shifted: Vec<LaurentPolynomial>,
    den: LaurentPolynomial,
    inv: TruncatedSeries,
    /// `kernel[t] = (rho + b + lambda/rho)^t (lambda/rho - rho)`
    kernel: Vec<LaurentPolynomial>,
}

impl RhoCtContext {
    pub fn new(w: &WeightSpec, t_max: usize) -> Result<RhoCtContext> {
        let Some((b, lambda)) = w.background_rationals() else {
            return Err(Error::SymbolicBackground {
                b: w.background_b().to_string(),
                lambda: w.background_lambda().to_string(),
            });
        };
        lambdas_nonzero(w)?;
        let l = w.strip_height();
        let base = ortho_table(l + 1, 0, w)
            .iter()
            .map(|p| laurent_form(p, &b, &lambda))
            .collect::<Result<Vec<_>>>()?;
        let mut shifted = vec![LaurentPolynomial::zero()];
        for j in 1..=l + 1 {
            let k = l + 1 - j;
            shifted.push(laurent_form(&ortho_table(k, j, w)[k], &b, &lambda)?);
        }
        let den = base[l + 1].clone();
        let inv = series_invert(&den, RHO, (t_max + l + 2) as i64)?;
        let x_of_rho = &(&LaurentPolynomial::rho_pow(1) + &LaurentPolynomial::constant(b))
            + &LaurentPolynomial::rho_pow(-1).scale(&lambda);
        let measure = &LaurentPolynomial::rho_pow(-1).scale(&lambda) - &LaurentPolynomial::rho_pow(1);
        let mut kernel = Vec::with_capacity(t_max + 1);
        let mut acc = measure;
        for _ in 0..=t_max {
            kernel.push(acc.clone());
            acc = &acc * &x_of_rho;
        }
        Ok(RhoCtContext { strip: l, t_max, w: w.clone(), base, shifted, den, inv, kernel })
    }

    pub fn query(&self, q: &StripQuery) -> Result<LaurentPolynomial> {
        q.check(&self.w)?;
        if q.t > self.t_max {
            return Err(Error::InvalidQuery(format!("{q}: context built for t <= {}", self.t_max)));
        }
        let (lo, hi) = (q.y_min(), q.y_max());
        let inner = &(&self.base[lo] * &h_factor(q, &self.w)) * &self.shifted[hi + 1];
        let num = &self.kernel[q.t] * &inner;
        let needed = required_order(&num, &self.den, RHO, 0);
        let have = (q.t + self.strip + 2) as i64;
        if needed > have {
            return Err(Error::TruncationInsufficient { needed, have });
        }
        let mut acc = LaurentPolynomial::zero();
        for (e, c) in num.split(RHO) {
            let s = self.inv.coefficient(-(e as i64))?;
            if !s.is_zero() {
                acc += &(&c * &s);
            }
        }
        Ok(acc)
    }
}

/// `CT_rho[(rho + b + lambda/rho)^t R_{Y'} h R^(Y+1)_{L-Y} / R_{L+1} (lambda/rho - rho)]`
/// with the background `b`, `lambda` of `w`, which must be rational.
pub fn rho_ct(q: &StripQuery, w: &WeightSpec) -> Result<LaurentPolynomial> {
    q.check(w)?;
    RhoCtContext::new(w, q.t)?.query(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{parse_poly, Symbol};

    fn p(s: &str) -> LaurentPolynomial {
        parse_poly(s).unwrap()
    }

    fn q(t: usize, a: usize, b: usize, l: usize) -> StripQuery {
        StripQuery::new(t, a, b, l).unwrap()
    }

    #[test]
    fn long_path_weight() {
        use Step::*;
        let steps = [Across, Across, Across, Up, Across, Up, Across, Across, Down, Down, Up, Up, Down, Down, Up];
        let path = LatticePath::from_steps(0, &steps, 2).unwrap();
        assert_eq!((path.len(), path.start(), path.end()), (15, 0, 1));
        let w = WeightSpec::generic(2);
        assert_eq!(path_weight(&path, &w), p("b_0^3*b_1*b_2^2*lambda_1^2*lambda_2^2"));
    }

    #[test]
    fn trivial_weights() {
        let w = WeightSpec::generic(2);
        assert!(path_weight(&LatticePath::from_heights(vec![1], 2).unwrap(), &w).is_one());
        assert!(path_weight(&LatticePath::from_heights(vec![0, 1], 2).unwrap(), &w).is_one());
        assert!(LatticePath::from_heights(vec![0, 2], 2).is_err());
        assert!(LatticePath::from_heights(vec![0, 3], 2).is_err());
    }

    #[test]
    fn brute_force_small() {
        let w = WeightSpec::generic(2);
        assert!(brute_force(&q(0, 1, 1, 2), &w).unwrap().is_one());
        assert!(brute_force(&q(0, 1, 2, 2), &w).unwrap().is_zero());
        assert_eq!(brute_force(&q(1, 0, 0, 2), &w).unwrap(), p("b_0"));
        for l in 2..5 {
            assert_eq!(brute_force(&q(4, 0, 0, l), &WeightSpec::dyck(l)).unwrap(), LaurentPolynomial::from_int(2));
        }
        assert!(matches!(brute_force_capped(&q(5, 0, 0, 2), &w, 4), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn packed_and_vec_signatures_agree() {
        let w = WeightSpec::generic(3);
        let classes = WeightClasses::new(&w);
        let walk = Walk { classes: &classes, strip: 3, t_max: 6, target: None };
        let a = walk_and_expand(&walk, 1, 7, 4, Packed { v: 0, bits: 3 });
        let b = walk_and_expand(&walk, 1, 7, 4, vec![0u16; classes.values.len()]);
        assert_eq!(a, b);
    }

    #[test]
    fn transfer_matrix_examples() {
        let w = WeightSpec::generic(2);
        assert!(transfer_matrix(&q(1, 0, 1, 2), &w).unwrap().is_one());
        assert_eq!(transfer_matrix(&q(2, 0, 0, 2), &w).unwrap(), p("b_0^2 + lambda_1"));
        let power = matrix_power(&jacobi_matrix(&w), 5);
        for a in 0..=2 {
            for b in 0..=2 {
                assert_eq!(power[a][b], transfer_matrix(&q(5, a, b, 2), &w).unwrap());
            }
        }
    }

    #[test]
    fn viennot_examples() {
        let w = WeightSpec::generic(2);
        assert_eq!(viennot_ct(&q(1, 0, 0, 2), &w).unwrap(), p("b_0"));
        let want = brute_force(&q(3, 1, 0, 2), &w).unwrap();
        assert_eq!(viennot_ct(&q(3, 1, 0, 2), &w).unwrap(), want);
        assert_eq!(want, p("lambda_1*(b_0^2 + b_0*b_1 + b_1^2 + lambda_1 + lambda_2)"));
    }

    #[test]
    fn rho_ct_examples() {
        assert_eq!(rho_ct(&q(4, 0, 0, 2), &WeightSpec::dyck(2)).unwrap(), LaurentPolynomial::from_int(2));
        let sym = WeightSpec::new(p("b"), 1, 2).unwrap();
        assert!(matches!(rho_ct(&q(1, 0, 0, 2), &sym), Err(Error::SymbolicBackground { .. })));
        let zero = WeightSpec::new(0, 0, 2).unwrap();
        assert!(matches!(rho_ct(&q(1, 0, 0, 2), &zero), Err(Error::ZeroLambda { .. })));
    }

    #[test]
    fn single_cell_generating_function() {
        let w = WeightSpec::new(0, 0, 1).unwrap().with_down(1, Symbol::new("mu")).unwrap();
        let s = generating_function(0, 0, 1, &w, 8).unwrap();
        assert_eq!(s.order(), 8);
        let mu = p("mu");
        for n in 0..=8 {
            let want = if n % 2 == 0 { mu.pow(n / 2) } else { LaurentPolynomial::zero() };
            assert_eq!(s.coefficient(n as i64).unwrap(), want);
        }
        assert!(s.coefficient(9).is_err());
    }

    #[test]
    fn h_factor_examples() {
        let w = WeightSpec::generic(3);
        assert!(h_factor(&q(0, 1, 2, 3), &w).is_one());
        assert!(h_factor(&q(0, 2, 2, 3), &w).is_one());
        assert_eq!(h_factor(&q(0, 2, 0, 3), &w), p("lambda_1*lambda_2"));
        let dec = WeightSpec::new(0, p("lambda"), 2).unwrap().with_down(1, p("khat")).unwrap();
        assert_eq!(h_factor(&q(0, 1, 0, 2), &dec), p("lambda + khat"));
    }

    #[test]
    fn query_validation() {
        assert!(StripQuery::new(1, 3, 0, 2).is_err());
        let w = WeightSpec::generic(3);
        assert!(matches!(brute_force(&q(1, 0, 0, 2), &w), Err(Error::InvalidQuery(_))));
    }

    #[test]
    fn enumerated_paths_sum_to_brute_force() {
        let w = WeightSpec::generic(2);
        let query = q(6, 0, 1, 2);
        let paths = enumerate_paths(&query, &w, 10).unwrap();
        let sum: LaurentPolynomial = paths.iter().map(|pp| path_weight(pp, &w)).sum();
        assert_eq!(sum, brute_force(&query, &w).unwrap());
    }
}
