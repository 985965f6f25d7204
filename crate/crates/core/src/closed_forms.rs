//! Closed forms for Dyck paths (`b = 0`, `lambda = 1`) with decorated
//! down steps: two wall weights (one per wall), four wall weights (two per
//! wall), and the general height-by-height formula.
//!
//! The wall-weight formulas are computed in the hatted variables
//! `khat = kappa - 1`, `what = omega - 1`, substituted back at the end.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::orthopoly::WeightSpec;
use crate::symbolic::{ct_rho_of_ratio, required_order, LaurentPolynomial, Monomial, Rational, Symbol, RHO};

/// Pascal's triangle grown on demand; out-of-range arguments give zero.
#[derive(Default)]
struct Pascal {
    rows: Vec<Vec<BigInt>>,
}

impl Pascal {
    fn get(&mut self, n: i64, k: i64) -> BigInt {
        if n < 0 || k < 0 || k > n {
            return BigInt::zero();
        }
        let n = n as usize;
        while self.rows.len() <= n {
            let next = match self.rows.last() {
                None => vec![BigInt::one()],
                Some(prev) => {
                    let mut row = Vec::with_capacity(prev.len() + 1);
                    row.push(BigInt::one());
                    for w in prev.windows(2) {
                        row.push(&w[0] + &w[1]);
                    }
                    row.push(BigInt::one());
                    row
                }
            };
            self.rows.push(next);
        }
        self.rows[n][k as usize].clone()
    }

    fn catalan(&mut self, n: i64, k: i64) -> BigInt {
        if n < 0 {
            return BigInt::zero();
        }
        self.get(2 * n, k) - self.get(2 * n, k - 1)
    }
}

/// `C(n, k)`, zero if `n < 0`, `k < 0` or `k > n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    Pascal::default().get(n, k)
}

/// `C_{n;k} = C(2n, k) - C(2n, k-1)` under the vanishing convention.
pub fn extended_catalan(n: i64, k: i64) -> BigInt {
    Pascal::default().catalan(n, k)
}

fn hat(name: &str) -> Symbol {
    Symbol::new(&format!("#{name}"))
}

fn minus_one(v: &LaurentPolynomial) -> LaurentPolynomial {
    v - &LaurentPolynomial::one()
}

/// Sparse accumulator keyed by exponent vectors of the hatted symbols.
struct Accumulator<const N: usize> {
    terms: HashMap<[u32; N], Rational>,
}

impl<const N: usize> Accumulator<N> {
    fn new() -> Self {
        Accumulator { terms: HashMap::new() }
    }

    fn add(&mut self, exps: [u32; N], c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exps).or_insert_with(Rational::zero);
        *slot += c;
    }

    fn is_zero(&self) -> bool {
        self.terms.values().all(Zero::is_zero)
    }

    fn into_poly(self, syms: [Symbol; N]) -> LaurentPolynomial {
        let mut out = LaurentPolynomial::zero();
        for (exps, c) in self.terms {
            let pairs: Vec<(Symbol, i32)> = syms.iter().zip(exps).map(|(&s, e)| (s, e as i32)).collect();
            out.add_term(Monomial::from_pairs(&pairs).unwrap(), c);
        }
        out
    }
}

fn big(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

// ---------------------------------------------------------------------------
// Two wall weights

/// Half-length `r`, strip height `L >= 2`, and the wall weights: `kappa`
/// on down steps from height 1, `omega` on down steps from height `L`.
#[derive(Clone, Debug, PartialEq)]
pub struct DmrParams {
    pub r: usize,
    pub strip_height: usize,
    pub kappa: LaurentPolynomial,
    pub omega: LaurentPolynomial,
}

impl DmrParams {
    pub fn new(
        r: usize,
        strip_height: usize,
        kappa: impl Into<LaurentPolynomial>,
        omega: impl Into<LaurentPolynomial>,
    ) -> Result<DmrParams> {
        if strip_height < 2 {
            return Err(Error::InvalidParams(format!(
                "two wall weights need L >= 2 so that heights 1 and L differ, got L = {strip_height}"
            )));
        }
        Ok(DmrParams { r, strip_height, kappa: kappa.into(), omega: omega.into() })
    }

    /// Symbolic `kappa`, `omega`.
    pub fn symbolic(r: usize, strip_height: usize) -> Result<DmrParams> {
        DmrParams::new(r, strip_height, Symbol::new("kappa"), Symbol::new("omega"))
    }

    pub fn weights(&self) -> WeightSpec {
        WeightSpec::dyck(self.strip_height)
            .with_down(1, minus_one(&self.kappa))
            .and_then(|w| w.with_down(self.strip_height, minus_one(&self.omega)))
            .expect("validated heights")
    }

    fn restore(&self, p: &LaurentPolynomial) -> LaurentPolynomial {
        let mut bind = HashMap::new();
        bind.insert(hat("khat"), minus_one(&self.kappa));
        bind.insert(hat("what"), minus_one(&self.omega));
        p.substitute(&bind).expect("nonnegative powers")
    }
}

/// `CT[(rho + 1/rho)^{2r} (1 - rho^2) (A rho^L - B rho^-L) / (AC rho^L - BD rho^-L)]`
/// with `A = rho^2 - what`, `B = 1 - what rho^2`, `C = rho^2 - khat`,
/// `D = 1 - khat rho^2`.
pub fn dmr_ct(p: &DmrParams) -> Result<LaurentPolynomial> {
    let l = p.strip_height as i32;
    let kh = LaurentPolynomial::var(hat("khat"));
    let wh = LaurentPolynomial::var(hat("what"));
    let r2 = LaurentPolynomial::rho_pow(2);
    let one = LaurentPolynomial::one();
    let a = &r2 - &wh;
    let b = &one - &(&wh * &r2);
    let c = &r2 - &kh;
    let d = &one - &(&kh * &r2);
    let up = LaurentPolynomial::rho_pow(l);
    let dn = LaurentPolynomial::rho_pow(-l);
    let num_frac = &(&a * &up) - &(&b * &dn);
    let den = &(&(&a * &c) * &up) - &(&(&b * &d) * &dn);
    let walk = (&LaurentPolynomial::rho_pow(1) + &LaurentPolynomial::rho_pow(-1)).pow(2 * p.r as u32);
    let num = &(&walk * &(&one - &r2)) * &num_frac;
    let order = required_order(&num, &den, RHO, 0);
    Ok(p.restore(&ct_rho_of_ratio(&num, &den, order)?))
}

fn dmr_inner(p: &DmrParams, pascal: &mut Pascal, acc: &mut Accumulator<2>, m: i64, p1: i64, p2: i64) {
    let r = p.r as i64;
    let l = p.strip_height as i64;
    for s1 in 0..=m {
        for s2 in 0..=m {
            let k = p1 + p2 - s1 - s2 + (l + 2) * m - 1;
            let sign = if (s1 + s2) % 2 == 0 { 1 } else { -1 };
            let binoms = pascal.get(m, s1) * pascal.get(m, s2) * pascal.get(m - 1 + p1, p1) * pascal.get(m + p2, p2);
            if binoms.is_zero() {
                continue;
            }
            let first = big(pascal.catalan(r, r - k - 1));
            let second = big(pascal.catalan(r, r - k)) * Rational::new((m - s2).into(), (m + p2).into());
            let c = big(binoms * sign) * (first - second);
            acc.add([(s2 + p2) as u32, (s1 + p1) as u32], c);
        }
    }
}

/// The five-fold binomial sum for the two-wall model. The infinite sums are
/// cut where the extended Catalan numbers vanish: the first sum at
/// `m <= r`, the second at `p1 + p2 + L m <= r + 1`; the next layer of each
/// is evaluated and must vanish.
pub fn dmr_sum(p: &DmrParams) -> Result<LaurentPolynomial> {
    let r = p.r as i64;
    let l = p.strip_height as i64;
    let mut pascal = Pascal::default();
    let mut acc = Accumulator::<2>::new();
    for m in 0..=r {
        acc.add([m as u32, 0], big(pascal.catalan(r, r - m)));
    }
    if !pascal.catalan(r, -1).is_zero() {
        return Err(Error::TruncationGuard(format!("first sum: layer m = {} is nonzero", r + 1)));
    }

    let mut guard = Accumulator::<2>::new();
    for m in 1..=(r + 2) / l {
        for p1 in 0..=(r + 2 - l * m) {
            for p2 in 0..=(r + 2 - l * m - p1) {
                if p1 + p2 + l * m <= r + 1 {
                    dmr_inner(p, &mut pascal, &mut acc, m, p1, p2);
                } else {
                    dmr_inner(p, &mut pascal, &mut guard, m, p1, p2);
                }
            }
        }
    }
    if !guard.is_zero() {
        return Err(Error::TruncationGuard(format!("second sum: layer p1 + p2 + L m = {} is nonzero", r + 2)));
    }
    Ok(p.restore(&acc.into_poly([hat("khat"), hat("what")])))
}

// ---------------------------------------------------------------------------
// Four wall weights

/// Down-step weights `kappa1`, `kappa2` at heights 1, 2 and `omega2`,
/// `omega1` at heights `L-1`, `L`; requires `L >= 4`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourWeightParams {
    pub r: usize,
    pub strip_height: usize,
    pub kappa1: LaurentPolynomial,
    pub kappa2: LaurentPolynomial,
    pub omega1: LaurentPolynomial,
    pub omega2: LaurentPolynomial,
}

impl FourWeightParams {
    pub fn new(
        r: usize,
        strip_height: usize,
        kappa1: impl Into<LaurentPolynomial>,
        kappa2: impl Into<LaurentPolynomial>,
        omega1: impl Into<LaurentPolynomial>,
        omega2: impl Into<LaurentPolynomial>,
    ) -> Result<FourWeightParams> {
        if strip_height < 4 {
            return Err(Error::InvalidParams(format!(
                "four wall weights need L >= 4 so that heights 1, 2, L-1, L differ, got L = {strip_height}"
            )));
        }
        Ok(FourWeightParams {
            r,
            strip_height,
            kappa1: kappa1.into(),
            kappa2: kappa2.into(),
            omega1: omega1.into(),
            omega2: omega2.into(),
        })
    }

    pub fn symbolic(r: usize, strip_height: usize) -> Result<FourWeightParams> {
        FourWeightParams::new(
            r,
            strip_height,
            Symbol::new("kappa1"),
            Symbol::new("kappa2"),
            Symbol::new("omega1"),
            Symbol::new("omega2"),
        )
    }

    pub fn weights(&self) -> WeightSpec {
        let l = self.strip_height;
        WeightSpec::dyck(l)
            .with_down(1, minus_one(&self.kappa1))
            .and_then(|w| w.with_down(2, minus_one(&self.kappa2)))
            .and_then(|w| w.with_down(l - 1, minus_one(&self.omega2)))
            .and_then(|w| w.with_down(l, minus_one(&self.omega1)))
            .expect("validated heights")
    }

    fn restore(&self, p: &LaurentPolynomial) -> LaurentPolynomial {
        let (k1, k2) = (minus_one(&self.kappa1), minus_one(&self.kappa2));
        let (w1, w2) = (minus_one(&self.omega1), minus_one(&self.omega2));
        let mut bind = HashMap::new();
        bind.insert(hat("ksum"), &k1 + &k2);
        bind.insert(hat("wsum"), &w1 + &w2);
        bind.insert(hat("k1hat"), k1);
        bind.insert(hat("k2hat"), k2);
        bind.insert(hat("w1hat"), w1);
        bind.insert(hat("w2hat"), w2);
        p.substitute(&bind).expect("nonnegative powers")
    }
}

/// `CT[(rho + 1/rho)^{2r} (A B rho^L - Abar Bbar rho^-L) / (C B rho^L - Cbar Bbar rho^-L) (1/rho - rho)]`.
pub fn four_weight_ct(p: &FourWeightParams) -> Result<LaurentPolynomial> {
    let l = p.strip_height as i32;
    let k1 = LaurentPolynomial::var(hat("k1hat"));
    let k2 = LaurentPolynomial::var(hat("k2hat"));
    let w1 = LaurentPolynomial::var(hat("w1hat"));
    let w2 = LaurentPolynomial::var(hat("w2hat"));
    let rp = LaurentPolynomial::rho_pow;
    let one = LaurentPolynomial::one();
    let ksum = &k1 + &k2;
    let wsum = &w1 + &w2;
    let a = &one - &(&k2 * &rp(-2));
    let a_bar = &one - &(&k2 * &rp(2));
    let b = &(&rp(1) - &(&wsum * &rp(-1))) - &(&w2 * &rp(-3));
    let b_bar = &(&rp(-1) - &(&wsum * &rp(1))) - &(&w2 * &rp(3));
    let c = &(&rp(1) - &(&ksum * &rp(-1))) - &(&k2 * &rp(-3));
    let c_bar = &(&rp(-1) - &(&ksum * &rp(1))) - &(&k2 * &rp(3));
    let num_frac = &(&(&a * &b) * &rp(l)) - &(&(&a_bar * &b_bar) * &rp(-l));
    let den = &(&(&c * &b) * &rp(l)) - &(&(&c_bar * &b_bar) * &rp(-l));
    let walk = (&rp(1) + &rp(-1)).pow(2 * p.r as u32);
    let num = &(&walk * &num_frac) * &(&rp(-1) - &rp(1));
    let order = required_order(&num, &den, RHO, 0);
    Ok(p.restore(&ct_rho_of_ratio(&num, &den, order)?))
}

/// Exponents of `(ksum, k2hat, wsum, w2hat)`.
type FourExps = [u32; 4];

/// Adds `c * k2^e (k2 C(2r, u+2) - (k2+1) C(2r, u+1) + C(2r, u))` style
/// brackets, given the three binomials `(top, mid, low)`.
fn add_bracket(acc: &mut Accumulator<4>, exps: FourExps, c: &Rational, top: BigInt, mid: BigInt, low: BigInt) {
    let mut up = exps;
    up[1] += 1;
    acc.add(up, c * big(top - &mid));
    acc.add(exps, c * big(low - mid));
}

#[allow(clippy::too_many_arguments)]
fn four_inner(p: &FourWeightParams, pascal: &mut Pascal, acc: &mut Accumulator<4>, m: i64, v1: i64, v2: i64) {
    let r = p.r as i64;
    let l = p.strip_height as i64;
    let two_r = 2 * r;
    for s1 in 0..=m {
        for i1 in 0..=s1 {
            for s2 in 0..=m {
                for i2 in 0..=s2 {
                    for j1 in 0..=v1 {
                        for j2 in 0..=v2 {
                            let binoms = pascal.get(s1, i1)
                                * pascal.get(m, s2)
                                * pascal.get(s2, i2)
                                * pascal.get(v1, j1)
                                * pascal.get(v2 + m - 1, m - 1)
                                * pascal.get(v2, j2);
                            if binoms.is_zero() {
                                continue;
                            }
                            let sign = if (s1 + s2 + i1 + i2) % 2 == 0 { 1 } else { -1 };
                            let base = big(binoms * sign);
                            let u1 = r + m * l + v1 + v2 + s1 + s2 + j1 + j2 - 2 * i1 - 2 * i2;
                            let e_ksum = m + v1 - 1 - s1 - j1;
                            let e_k2 = (i1 + j1) as u32;
                            let e_w2 = (i2 + j2) as u32;
                            let e_wsum = (m + v2 - s2 - j2) as u32;

                            // first brace term carries one extra factor of ksum
                            let c1 = &base * big(pascal.get(m, s1) * pascal.get(v1 + m, m));
                            if !c1.is_zero() {
                                let exps = [(e_ksum + 1) as u32, e_k2, e_wsum, e_w2];
                                let (top, mid, low) =
                                    (pascal.get(two_r, u1 + 2), pascal.get(two_r, u1 + 1), pascal.get(two_r, u1));
                                add_bracket(acc, exps, &c1, top, mid, low);
                            }
                            // the second vanishes whenever s1 = m, where ksum's exponent would be -1
                            let c2 = -(&base * big(pascal.get(m - 1, s1) * pascal.get(v1 + m - 1, m - 1)));
                            if !c2.is_zero() {
                                let exps = [e_ksum as u32, e_k2, e_wsum, e_w2];
                                let (top, mid, low) =
                                    (pascal.get(two_r, u1 - 1), pascal.get(two_r, u1), pascal.get(two_r, u1 + 1));
                                add_bracket(acc, exps, &c2, top, mid, low);
                            }
                        }
                    }
                }
            }
        }
    }
}

/// The nine-fold binomial sum for the four-wall model, with `ksum =
/// khat1 + khat2` and `wsum = what1 + what2` kept as single variables until
/// the end. The first sum stops at `i <= r`; the second at
/// `m (L-2) + v1 + v2 <= r + 1`, past which every `C(2r, u1 + d)` vanishes.
/// The next layer of each is evaluated and must vanish.
pub fn four_weight_sum(p: &FourWeightParams) -> Result<LaurentPolynomial> {
    let r = p.r as i64;
    let l = p.strip_height as i64;
    let two_r = 2 * r;
    let mut pascal = Pascal::default();
    let mut acc = Accumulator::<4>::new();
    let mut guard = Accumulator::<4>::new();

    for i in 0..=r + 1 {
        let target = if i <= r { &mut acc } else { &mut guard };
        for j in 0..=i {
            let c = big(pascal.get(i, j));
            let u0 = r + 2 * i - j;
            let exps = [j as u32, (i - j) as u32, 0, 0];
            let (top, mid, low) = (pascal.get(two_r, u0 + 2), pascal.get(two_r, u0 + 1), pascal.get(two_r, u0));
            add_bracket(target, exps, &c, top, mid, low);
        }
    }
    if !guard.is_zero() {
        return Err(Error::TruncationGuard(format!("first sum: layer i = {} is nonzero", r + 1)));
    }

    let step = l - 2;
    for m in 1..=(r + 2) / step {
        for v1 in 0..=(r + 2 - step * m) {
            for v2 in 0..=(r + 2 - step * m - v1) {
                if step * m + v1 + v2 <= r + 1 {
                    four_inner(p, &mut pascal, &mut acc, m, v1, v2);
                } else {
                    four_inner(p, &mut pascal, &mut guard, m, v1, v2);
                }
            }
        }
    }
    if !guard.is_zero() {
        return Err(Error::TruncationGuard(format!("second sum: layer m (L-2) + v1 + v2 = {} is nonzero", r + 2)));
    }
    Ok(p.restore(&acc.into_poly([hat("ksum"), hat("k2hat"), hat("wsum"), hat("w2hat")])))
}

// ---------------------------------------------------------------------------
// General down-step weights

/// Dyck weights with `lambda_i = kappa_i` for `1 <= i <= L`.
pub fn rogers_weights(strip_height: usize, kappas: &[LaurentPolynomial]) -> Result<WeightSpec> {
    if kappas.len() < strip_height {
        return Err(Error::InsufficientWeights { needed: strip_height, got: kappas.len() });
    }
    let mut w = WeightSpec::dyck(strip_height);
    for (i, k) in kappas.iter().take(strip_height).enumerate() {
        w = w.with_down(i + 1, minus_one(k))?;
    }
    Ok(w)
}

/// `kappa_1, ..., kappa_n` as symbols.
pub fn symbolic_kappas(n: usize) -> Vec<LaurentPolynomial> {
    (1..=n).map(|i| LaurentPolynomial::var(Symbol::new(&format!("kappa_{i}")))).collect()
}

/// Weight of the length-`2n` Dyck paths whose maximum height is exactly
/// `l + 1`: a sum over chains `n = j_0 > j_1 > ... > j_l >= 1 > j_{l+1} = 0`
/// of `prod_k C(j_k - j_{k+2} - 1, j_{k+1} - j_{k+2}) kappa_{k+1}^{j_k - j_{k+1}}`.
pub fn stratified_weight(n: usize, l: usize, kappas: &[LaurentPolynomial]) -> Result<LaurentPolynomial> {
    if l >= n {
        return Ok(LaurentPolynomial::zero());
    }
    if kappas.len() < l + 1 {
        return Err(Error::InsufficientWeights { needed: l + 1, got: kappas.len() });
    }
    let mut pascal = Pascal::default();
    // chain j_0..=j_{l+1}, tallied by the exponent vector (j_k - j_{k+1})_k
    let mut tally: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
    let mut chain = vec![0i64; l + 2];
    chain[0] = n as i64;

    fn rec(idx: usize, l: usize, chain: &mut Vec<i64>, pascal: &mut Pascal, tally: &mut BTreeMap<Vec<u32>, BigInt>) {
        if idx == l + 1 {
            let mut coeff = BigInt::one();
            for k in 0..l {
                coeff *= pascal.get(chain[k] - chain[k + 2] - 1, chain[k + 1] - chain[k + 2]);
                if coeff.is_zero() {
                    return;
                }
            }
            let exps: Vec<u32> = (0..=l).map(|k| (chain[k] - chain[k + 1]) as u32).collect();
            *tally.entry(exps).or_insert_with(BigInt::zero) += coeff;
            return;
        }
        // j_idx ranges over l + 1 - idx ..= j_{idx-1} - 1
        let lo = (l + 1 - idx) as i64;
        for j in lo..chain[idx - 1] {
            chain[idx] = j;
            rec(idx + 1, l, chain, pascal, tally);
        }
    }
    rec(1, l, &mut chain, &mut pascal, &mut tally);

    let mut powers: Vec<Vec<LaurentPolynomial>> = vec![vec![LaurentPolynomial::one()]; l + 1];
    let mut out = LaurentPolynomial::zero();
    for (exps, c) in tally {
        let mut term = LaurentPolynomial::constant(big(c));
        for (k, &e) in exps.iter().enumerate() {
            let cache = &mut powers[k];
            while cache.len() <= e as usize {
                let next = &cache[cache.len() - 1] * &kappas[k];
                cache.push(next);
            }
            term = &term * &cache[e as usize];
        }
        out += &term;
    }
    Ok(out)
}

/// `Z_{2n} = sum_{l=0}^{min(n-1, L-1)} s_l`; `None` for the half plane.
pub fn rogers(n: usize, strip_height: Option<usize>, kappas: &[LaurentPolynomial]) -> Result<LaurentPolynomial> {
    if n == 0 {
        return Ok(LaurentPolynomial::one());
    }
    let top = match strip_height {
        Some(0) => return Ok(LaurentPolynomial::zero()),
        Some(l) => (n - 1).min(l - 1),
        None => n - 1,
    };
    if kappas.len() < top + 1 {
        return Err(Error::InsufficientWeights { needed: top + 1, got: kappas.len() });
    }
    let mut out = LaurentPolynomial::zero();
    for l in 0..=top {
        out += &stratified_weight(n, l, kappas)?;
    }
    Ok(out)
}
