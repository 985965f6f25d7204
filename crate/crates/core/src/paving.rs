//! Paving representation of the orthogonal polynomials.
//!
//! A paving of order `k` places pavers on the path graph with vertices
//! `v_0..v_{k-1}` and edges `e_i = v_{i-1} v_i`, `1 <= i <= k-1`. With shift
//! `j` an uncovered vertex weighs `x`, a monomer on `v_i` weighs `-b_{i+j}`
//! and a dimer on `e_i` weighs `-lambda_{i+j}`; summing over all pavings
//! gives `P_k^(j)(x)`.
//!
//! Cutting at an edge or a vertex splits the sum into products of smaller
//! paving polynomials. Repeating the cut at every decorated element leaves
//! only undecorated runs, which are Chebyshev-type polynomials `S_m`.

use std::fmt;

use crate::error::{Error, Result};
use crate::orthopoly::{chebyshev_table, ortho_poly, WeightSpec};
use crate::symbolic::{LaurentPolynomial, X};

pub const DEFAULT_PAVING_CAP: u64 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PavingKind {
    /// Uncovered vertices and dimers only.
    Ballot,
    /// Uncovered vertices, monomers and dimers.
    Motzkin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Paver {
    Uncovered(usize),
    Monomer(usize),
    /// Dimer on edge `e_i`, covering `v_{i-1}` and `v_i`.
    Dimer(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Paving {
    pub order: usize,
    pub pavers: Vec<Paver>,
}

impl Paving {
    pub fn is_ballot(&self) -> bool {
        !self.pavers.iter().any(|p| matches!(p, Paver::Monomer(_)))
    }

    /// Every vertex covered exactly once, dimers on valid edges.
    pub fn is_valid(&self) -> bool {
        let mut seen = vec![0u8; self.order];
        for p in &self.pavers {
            match *p {
                Paver::Uncovered(v) | Paver::Monomer(v) => {
                    if v >= self.order {
                        return false;
                    }
                    seen[v] += 1;
                }
                Paver::Dimer(e) => {
                    if e == 0 || e >= self.order {
                        return false;
                    }
                    seen[e - 1] += 1;
                    seen[e] += 1;
                }
            }
        }
        seen.iter().all(|&c| c == 1)
    }

    /// Product of paver weights with shift `j`.
    pub fn weight(&self, j: usize, w: &WeightSpec) -> LaurentPolynomial {
        self.pavers
            .iter()
            .map(|p| match *p {
                Paver::Uncovered(_) => LaurentPolynomial::var(X),
                Paver::Monomer(v) => -w.b(v + j),
                Paver::Dimer(e) => -w.lambda(e + j),
            })
            .product()
    }
}

/// Diagram: `.` uncovered, `M` monomer, `D-` dimer.
impl fmt::Display for Paving {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut cells = vec!['?'; self.order];
        for p in &self.pavers {
            match *p {
                Paver::Uncovered(v) => cells[v] = '.',
                Paver::Monomer(v) => cells[v] = 'M',
                Paver::Dimer(e) => {
                    cells[e - 1] = 'D';
                    cells[e] = '-';
                }
            }
        }
        f.write_str(&cells.into_iter().collect::<String>())
    }
}

/// Number of pavings of order `k`: `a(k) = a(k-1) + a(k-2)` for Ballot and
/// `a(k) = 2a(k-1) + a(k-2)` for Motzkin, with `a(0) = 1`.
pub fn paving_count(k: usize, kind: PavingKind) -> u64 {
    let single = match kind {
        PavingKind::Ballot => 1u64,
        PavingKind::Motzkin => 2,
    };
    // seeded with a(-1) = 0
    let (mut prev, mut cur) = (0u64, 1u64);
    for _ in 0..k {
        let next = single.saturating_mul(cur).saturating_add(prev);
        prev = cur;
        cur = next;
    }
    cur
}

fn check_cap(k: usize, kind: PavingKind, cap: u64) -> Result<()> {
    let n = paving_count(k, kind);
    if n > cap {
        return Err(Error::SizeLimit { what: format!("{n} {kind:?} pavings of order {k}"), cap });
    }
    Ok(())
}

/// All pavings of order `k`; `k = 0` gives the single empty paving.
pub fn enumerate_pavings(k: usize, kind: PavingKind, cap: u64) -> Result<Vec<Paving>> {
    check_cap(k, kind, cap)?;
    let mut out = Vec::new();
    let mut stack = Vec::with_capacity(k);
    fn rec(v: usize, k: usize, kind: PavingKind, stack: &mut Vec<Paver>, out: &mut Vec<Paving>) {
        if v == k {
            out.push(Paving { order: k, pavers: stack.clone() });
            return;
        }
        stack.push(Paver::Uncovered(v));
        rec(v + 1, k, kind, stack, out);
        stack.pop();
        if kind == PavingKind::Motzkin {
            stack.push(Paver::Monomer(v));
            rec(v + 1, k, kind, stack, out);
            stack.pop();
        }
        if v + 1 < k {
            stack.push(Paver::Dimer(v + 1));
            rec(v + 2, k, kind, stack, out);
            stack.pop();
        }
    }
    rec(0, k, kind, &mut stack, &mut out);
    Ok(out)
}

/// Ballot pavings suffice when every across weight in the window is zero.
pub fn paving_kind_for(k: usize, j: usize, w: &WeightSpec) -> PavingKind {
    if (0..k).all(|v| w.b(v + j).is_zero()) {
        PavingKind::Ballot
    } else {
        PavingKind::Motzkin
    }
}

/// `sum over pavings p of w_j(p)`, enumerating pavings one by one with
/// the weight product shared along common prefixes.
pub fn paving_polynomial(k: usize, j: usize, w: &WeightSpec) -> Result<LaurentPolynomial> {
    paving_polynomial_capped(k, j, w, DEFAULT_PAVING_CAP)
}

pub fn paving_polynomial_capped(k: usize, j: usize, w: &WeightSpec, cap: u64) -> Result<LaurentPolynomial> {
    let kind = paving_kind_for(k, j, w);
    check_cap(k, kind, cap)?;
    let x = LaurentPolynomial::var(X);
    let mono: Vec<LaurentPolynomial> = (0..k).map(|v| -w.b(v + j)).collect();
    let dimer: Vec<LaurentPolynomial> = (0..k).map(|e| -w.lambda(e + j)).collect();
    let mut total = LaurentPolynomial::zero();
    struct Ctx<'a> {
        k: usize,
        kind: PavingKind,
        x: &'a LaurentPolynomial,
        mono: &'a [LaurentPolynomial],
        dimer: &'a [LaurentPolynomial],
    }
    fn rec(c: &Ctx, v: usize, prefix: &LaurentPolynomial, total: &mut LaurentPolynomial) {
        if prefix.is_zero() {
            return;
        }
        if v == c.k {
            *total += prefix;
            return;
        }
        rec(c, v + 1, &(prefix * c.x), total);
        if c.kind == PavingKind::Motzkin {
            rec(c, v + 1, &(prefix * &c.mono[v]), total);
        }
        if v + 1 < c.k {
            rec(c, v + 2, &(prefix * &c.dimer[v + 1]), total);
        }
    }
    let ctx = Ctx { k, kind, x: &x, mono: &mono, dimer: &dimer };
    rec(&ctx, 0, &LaurentPolynomial::one(), &mut total);
    Ok(total)
}

/// Which polynomial family the factors of a [`Decomposition`] refer to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// `P_order^(shift)` with the full (decorated) weights.
    Shifted,
    /// Background-only `S_order`; the shift records where the run sits.
    Chebyshev,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factor {
    pub shift: usize,
    pub order: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionTerm {
    pub coefficient: LaurentPolynomial,
    pub factors: Vec<Factor>,
}

/// `P_k^(j) = sum_i a_i * prod_f F_f`, with factors in the given basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub k: usize,
    pub j: usize,
    pub basis: Basis,
    pub terms: Vec<DecompositionTerm>,
}

impl Decomposition {
    /// Multiply out every term and sum.
    pub fn expand(&self, w: &WeightSpec) -> LaurentPolynomial {
        let max_order = self
            .terms
            .iter()
            .flat_map(|t| t.factors.iter().map(|f| f.order))
            .max()
            .unwrap_or(0);
        let cheb = match self.basis {
            Basis::Chebyshev => chebyshev_table(max_order, w.background_b(), w.background_lambda()),
            Basis::Shifted => Vec::new(),
        };
        self.terms
            .iter()
            .map(|t| {
                let mut acc = t.coefficient.clone();
                for f in &t.factors {
                    let p = match self.basis {
                        Basis::Chebyshev => cheb[f.order].clone(),
                        Basis::Shifted => ortho_poly(f.order, f.shift, w).poly,
                    };
                    acc = &acc * &p;
                }
                acc
            })
            .sum()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn max_factor_count(&self) -> usize {
        self.terms.iter().map(|t| t.factors.len()).max().unwrap_or(0)
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({})", t.coefficient)?;
            for fac in &t.factors {
                match self.basis {
                    Basis::Chebyshev => write!(f, "*S_{}", fac.order)?,
                    Basis::Shifted => write!(f, "*P_{}^({})", fac.order, fac.shift)?,
                }
            }
        }
        Ok(())
    }
}

fn shifted_term(coefficient: LaurentPolynomial, factors: &[(usize, i64)]) -> Option<DecompositionTerm> {
    if coefficient.is_zero() || factors.iter().any(|&(_, o)| o < 0) {
        return None;
    }
    Some(DecompositionTerm {
        coefficient,
        factors: factors.iter().map(|&(shift, o)| Factor { shift, order: o as usize }).collect(),
    })
}

/// Edge cut at `e_c`, `1 <= c <= k-1`:
/// `P_k^(j) = P_c^(j) P_{k-c}^(j+c) - lambda_{c+j} P_{c-1}^(j) P_{k-c-1}^(j+c+1)`.
pub fn edge_cut(k: usize, j: usize, c: usize, w: &WeightSpec) -> Result<Decomposition> {
    if c == 0 || c >= k {
        return Err(Error::CutOutOfRange { k, c });
    }
    let (ki, ci) = (k as i64, c as i64);
    let terms = [
        shifted_term(LaurentPolynomial::one(), &[(j, ci), (j + c, ki - ci)]),
        shifted_term(-w.lambda(c + j), &[(j, ci - 1), (j + c + 1, ki - ci - 1)]),
    ];
    Ok(Decomposition { k, j, basis: Basis::Shifted, terms: terms.into_iter().flatten().collect() })
}

/// Vertex cut at `v_c`, `0 <= c <= k-1`:
/// `P_k^(j) = (x - b_{c+j}) P_c^(j) P_{k-c-1}^(j+c+1)
///          - lambda_{j+c+1} P_c^(j) P_{k-c-2}^(j+c+2)
///          - lambda_{c+j} P_{c-1}^(j) P_{k-c-1}^(j+c+1)`;
/// terms with a negative order vanish.
pub fn vertex_cut(k: usize, j: usize, c: usize, w: &WeightSpec) -> Result<Decomposition> {
    if c >= k {
        return Err(Error::CutOutOfRange { k, c });
    }
    let (ki, ci) = (k as i64, c as i64);
    let x_minus_b = &LaurentPolynomial::var(X) - &w.b(c + j);
    let terms = [
        shifted_term(x_minus_b, &[(j, ci), (j + c + 1, ki - ci - 1)]),
        shifted_term(-w.lambda(j + c + 1), &[(j, ci), (j + c + 2, ki - ci - 2)]),
        shifted_term(-w.lambda(c + j), &[(j, ci - 1), (j + c + 1, ki - ci - 1)]),
    ];
    Ok(Decomposition { k, j, basis: Basis::Shifted, terms: terms.into_iter().flatten().collect() })
}

/// Decorated heights seen by `P_k^(j)`: across heights in `j..=j+k-1` and
/// down heights in `j..=j+k-1` (the count used by the term bound).
pub fn decoration_counts(k: usize, j: usize, w: &WeightSpec) -> (usize, usize) {
    let window = |i: &usize| *i >= j && *i + 1 <= j + k;
    let db = w.across_decorations().keys().filter(|i| window(i)).count();
    let dl = w.down_decorations().keys().filter(|i| window(i)).count();
    (dl, db)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum VertexState {
    Alone,
    DimerLeft,
    DimerRight,
}

/// Express `P_k^(j)` through background polynomials `S_m`.
///
/// Every decorated vertex is cut three ways (alone, or in a dimer to either
/// side) and every decorated edge two ways (open or dimer); inconsistent
/// combinations, such as two dimers sharing a vertex, are dropped, so
/// neighbouring decorations are resolved together. The undecorated runs left
/// over become `S` factors. A run of length one at either end of the graph
/// is written into the coefficient as `x - b`.
pub fn decompose(k: usize, j: usize, w: &WeightSpec) -> Result<Decomposition> {
    decompose_capped(k, j, w, DEFAULT_PAVING_CAP)
}

pub fn decompose_capped(k: usize, j: usize, w: &WeightSpec, cap: u64) -> Result<Decomposition> {
    let dec_vertices: Vec<usize> = (0..k).filter(|&v| w.across_decorations().contains_key(&(v + j))).collect();
    let dec_edges: Vec<usize> = (1..k).filter(|&e| w.down_decorations().contains_key(&(e + j))).collect();
    let combos = 3u64
        .saturating_pow(dec_vertices.len() as u32)
        .saturating_mul(2u64.saturating_pow(dec_edges.len() as u32));
    if combos > cap {
        return Err(Error::SizeLimit { what: format!("{combos} cut combinations"), cap });
    }

    let x = LaurentPolynomial::var(X);
    let background_step = &x - w.background_b();
    let mut terms = Vec::new();
    let nv = dec_vertices.len();
    let mut vstate = vec![VertexState::Alone; nv];
    let mut estate = vec![false; dec_edges.len()];

    loop {
        if let Some(t) = resolve(k, j, w, &dec_vertices, &vstate, &dec_edges, &estate, &x, &background_step) {
            terms.push(t);
        }
        // odometer over (vertex states, edge states)
        let mut carry = true;
        for s in vstate.iter_mut() {
            if !carry {
                break;
            }
            *s = match *s {
                VertexState::Alone => {
                    carry = false;
                    VertexState::DimerLeft
                }
                VertexState::DimerLeft => {
                    carry = false;
                    VertexState::DimerRight
                }
                VertexState::DimerRight => VertexState::Alone,
            };
        }
        for s in estate.iter_mut() {
            if !carry {
                break;
            }
            *s = !*s;
            carry = !*s;
        }
        if carry {
            break;
        }
    }
    Ok(Decomposition { k, j, basis: Basis::Chebyshev, terms })
}

#[allow(clippy::too_many_arguments)]
fn resolve(
    k: usize,
    j: usize,
    w: &WeightSpec,
    dec_vertices: &[usize],
    vstate: &[VertexState],
    dec_edges: &[usize],
    estate: &[bool],
    x: &LaurentPolynomial,
    background_step: &LaurentPolynomial,
) -> Option<DecompositionTerm> {
    // dimers[e] for e in 1..k
    let mut dimers = vec![false; k.max(1)];
    let mut open_cut = vec![false; k.max(1)];
    let mut removed = vec![false; k];
    for (&e, &on) in dec_edges.iter().zip(estate) {
        if on {
            dimers[e] = true;
        } else {
            open_cut[e] = true;
        }
    }
    for (&v, &s) in dec_vertices.iter().zip(vstate) {
        match s {
            VertexState::Alone => {}
            VertexState::DimerLeft => {
                if v == 0 || open_cut[v] {
                    return None;
                }
                dimers[v] = true;
            }
            VertexState::DimerRight => {
                if v + 1 >= k || open_cut[v + 1] {
                    return None;
                }
                dimers[v + 1] = true;
            }
        }
    }
    // dimers must be disjoint
    for e in 1..k {
        if dimers[e] && e + 1 < k && dimers[e + 1] {
            return None;
        }
    }
    // each decorated vertex's state must match the dimers touching it
    for (&v, &s) in dec_vertices.iter().zip(vstate) {
        let left = v >= 1 && dimers[v];
        let right = v + 1 < k && dimers[v + 1];
        let ok = match s {
            VertexState::Alone => !left && !right,
            VertexState::DimerLeft => left && !right,
            VertexState::DimerRight => right && !left,
        };
        if !ok {
            return None;
        }
    }

    let mut coefficient = LaurentPolynomial::one();
    for (&v, &s) in dec_vertices.iter().zip(vstate) {
        removed[v] = true;
        if s == VertexState::Alone {
            coefficient = &coefficient * &(x - &w.b(v + j));
        }
    }
    for e in 1..k {
        if dimers[e] {
            removed[e - 1] = true;
            removed[e] = true;
            coefficient = &coefficient * &(-w.lambda(e + j));
        }
    }
    if coefficient.is_zero() {
        return None;
    }

    // undecorated runs, split at removed vertices and open decorated edges
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut start: Option<usize> = None;
    for v in 0..=k {
        let breaks_here = v == k || removed[v] || (v >= 1 && open_cut[v]);
        if breaks_here {
            if let Some(s) = start.take() {
                runs.push((s, v - s));
            }
        }
        if v < k && !removed[v] && start.is_none() {
            start = Some(v);
        }
    }
    let mut factors = Vec::new();
    for (s, len) in runs {
        let at_end = s == 0 || s + len == k;
        if len == 1 && at_end && len < k {
            coefficient = &coefficient * background_step;
        } else {
            factors.push(Factor { shift: j + s, order: len });
        }
    }
    Some(DecompositionTerm { coefficient, factors })
}


#[cfg(test)]
mod props {
    use super::*;
    use crate::orthopoly::ortho_poly;
    use crate::symbolic::{rat, Symbol};
    use proptest::prelude::*;

    fn arb_weights() -> impl Strategy<Value = WeightSpec> {
        (2usize..8, -2i64..=2, -2i64..=2, proptest::collection::vec(any::<bool>(), 9), proptest::collection::vec(any::<bool>(), 9))
            .prop_map(|(l, b, lam, across, down)| {
                let mut w = WeightSpec::new(rat(b, 1), rat(lam, 1), l).unwrap();
                for h in 0..=l {
                    if across[h] {
                        w = w.with_across(h, Symbol::new(&format!("u_{h}"))).unwrap();
                    }
                    if h >= 1 && down[h] {
                        w = w.with_down(h, Symbol::new(&format!("d_{h}"))).unwrap();
                    }
                }
                w
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn paving_sum_matches_recurrence(w in arb_weights(), j in 0usize..3) {
            let l = w.strip_height();
            for k in 0..=(l + 1).saturating_sub(j) {
                prop_assert_eq!(paving_polynomial(k, j, &w).unwrap(), ortho_poly(k, j, &w).poly);
            }
        }

        #[test]
        fn cut_identities(w in arb_weights(), j in 0usize..2) {
            let k = w.strip_height() + 1 - j;
            let full = ortho_poly(k, j, &w).poly;
            for c in 1..k {
                prop_assert_eq!(edge_cut(k, j, c, &w).unwrap().expand(&w), full.clone());
            }
            for c in 0..k {
                prop_assert_eq!(vertex_cut(k, j, c, &w).unwrap().expand(&w), full.clone());
            }
        }

        #[test]
        fn decomposition_expands_within_bound(w in arb_weights(), j in 0usize..2) {
            let k = w.strip_height() + 1 - j;
            let d = decompose(k, j, &w).unwrap();
            prop_assert_eq!(d.expand(&w), ortho_poly(k, j, &w).poly);
            let (dl, db) = decoration_counts(k, j, &w);
            prop_assert!((d.term_count() as u64) <= 2u64.pow(dl as u32) * 3u64.pow(db as u32));
            prop_assert!(d.max_factor_count() <= dl + db + 1);
        }
    }
}
