//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use latpoly::closed_forms::{
    dmr_ct, dmr_sum, four_weight_ct, four_weight_sum, rogers, rogers_weights, stratified_weight, symbolic_kappas,
    DmrParams, FourWeightParams,
};
use latpoly::engines::{
    brute_force, brute_force_table, enumerate_paths, path_weight, transfer_matrix_rows, RhoCtContext, StripQuery,
    ViennotContext, DEFAULT_MAX_T,
};
use latpoly::orthopoly::{chebyshev_closed_form_check, ortho_poly, WeightSpec};
use latpoly::paving::{decompose, decoration_counts, edge_cut, paving_polynomial, vertex_cut};
use latpoly::symbolic::{parse_poly, rat, X};
use latpoly::{LaurentPolynomial, Symbol};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn p(s: &str) -> LaurentPolynomial {
    parse_poly(s).unwrap()
}

#[derive(Clone, Copy, Debug)]
enum Slot {
    Across(usize),
    Down(usize),
}

fn decorated(b: i64, l: usize, slots: &[Slot]) -> WeightSpec {
    let mut w = WeightSpec::new(b, 1, l).unwrap();
    for (i, s) in slots.iter().enumerate() {
        let sym = Symbol::new(&format!("d{i}"));
        w = match *s {
            Slot::Across(h) => w.with_across(h, sym),
            Slot::Down(h) => w.with_down(h, sym),
        }
        .unwrap();
    }
    w
}

/// Every engine on every query of one weight spec.
fn agree_on(w: &WeightSpec, t_max: usize) -> Result<usize, String> {
    let l = w.strip_height();
    let vc = ViennotContext::new(w, t_max).map_err(|e| e.to_string())?;
    let rc = RhoCtContext::new(w, t_max).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for a in 0..=l {
        let brute = brute_force_table(a, t_max, w, DEFAULT_MAX_T).map_err(|e| e.to_string())?;
        let tm = transfer_matrix_rows(a, t_max, w);
        for b in 0..=l {
            let gf = vc.series(a, b, t_max).map_err(|e| e.to_string())?;
            for t in 0..=t_max {
                let q = StripQuery::new(t, a, b, l).unwrap();
                let want = &brute[t][b];
                let others = [
                    ("transfer_matrix", tm[t][b].clone()),
                    ("viennot_ct", vc.query(&q).map_err(|e| e.to_string())?),
                    ("rho_ct", rc.query(&q).map_err(|e| e.to_string())?),
                    ("generating_function", gf.coefficient(t as i64).map_err(|e| e.to_string())?),
                ];
                for (name, got) in others {
                    ensure(&got == want, || format!("{q} {w:?}: brute {want} vs {name} {got}"))?;
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

fn five_way_agreement() -> Outcome {
    let mut specs = Vec::new();
    for l in 0..=5 {
        let slots: Vec<Slot> = (0..=l).map(Slot::Across).chain((1..=l).map(Slot::Down)).collect();
        let mut sets: Vec<Vec<Slot>> = vec![vec![]];
        for i in 0..slots.len() {
            sets.push(vec![slots[i]]);
            for j in i + 1..slots.len() {
                sets.push(vec![slots[i], slots[j]]);
            }
        }
        for b in [0, 1] {
            for s in &sets {
                specs.push(decorated(b, l, s));
            }
        }
    }
    let threads = std::thread::available_parallelism().map_or(4, |n| n.get());
    let chunks: Vec<&[WeightSpec]> = specs.chunks(specs.len().div_ceil(threads)).collect();
    let results: Vec<Result<usize, String>> = std::thread::scope(|s| {
        let handles: Vec<_> = chunks
            .iter()
            .map(|chunk| s.spawn(move || chunk.iter().map(|w| agree_on(w, 10)).sum::<Result<usize, String>>()))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let total: usize = results.into_iter().sum::<Result<usize, String>>()?;
    Ok(format!("{} weight specs, {total} queries, all five engines equal", specs.len()))
}

fn dmr_equivalence() -> Outcome {
    let mut n = 0;
    for l in 2..=6 {
        for r in 0..=8 {
            let prm = DmrParams::symbolic(r, l).unwrap();
            let brute = brute_force(&StripQuery::new(2 * r, 0, 0, l).unwrap(), &prm.weights()).unwrap();
            let ct = dmr_ct(&prm).map_err(|e| e.to_string())?;
            let sum = dmr_sum(&prm).map_err(|e| e.to_string())?;
            ensure(ct == brute && sum == brute, || format!("r={r} L={l}: brute {brute}, ct {ct}, sum {sum}"))?;
            if r == 1 {
                ensure(brute == p("kappa"), || format!("r=1 L={l}: {brute}"))?;
            }
            n += 1;
        }
    }
    let anchor = dmr_sum(&DmrParams::symbolic(2, 2).unwrap()).unwrap();
    ensure(anchor == p("kappa^2 + kappa*omega"), || format!("r=2 L=2: {anchor}"))?;
    Ok(format!("{n} cases; r=1 gives kappa, r=2 L=2 gives {anchor}"))
}

fn four_weight_equivalence() -> Outcome {
    let mut n = 0;
    for l in 4..=7 {
        for r in 0..=6 {
            let prm = FourWeightParams::symbolic(r, l).unwrap();
            let brute = brute_force(&StripQuery::new(2 * r, 0, 0, l).unwrap(), &prm.weights()).unwrap();
            let ct = four_weight_ct(&prm).map_err(|e| e.to_string())?;
            let sum = four_weight_sum(&prm).map_err(|e| e.to_string())?;
            ensure(ct == brute && sum == brute, || format!("r={r} L={l}: brute {brute}, ct {ct}, sum {sum}"))?;
            n += 1;
        }
    }
    Ok(format!("{n} cases, contour integral = nine-fold sum = brute force"))
}

fn rogers_equivalence() -> Outcome {
    let kappas = symbolic_kappas(8);
    let mut n_cases = 0;
    for n in 0..=7 {
        for l in 0..=6 {
            let w = rogers_weights(l, &kappas).unwrap();
            let brute = brute_force(&StripQuery::new(2 * n, 0, 0, l).unwrap(), &w).unwrap();
            let got = rogers(n, Some(l), &kappas).map_err(|e| e.to_string())?;
            ensure(got == brute, || format!("n={n} L={l}: brute {brute}, formula {got}"))?;
            n_cases += 1;
        }
        // a Dyck path of half-length n never rises above n
        let w = rogers_weights(n, &kappas).unwrap();
        let brute = brute_force(&StripQuery::new(2 * n, 0, 0, n).unwrap(), &w).unwrap();
        let unbounded = rogers(n, None, &kappas).map_err(|e| e.to_string())?;
        ensure(unbounded == brute, || format!("n={n} L=inf: brute {brute}, formula {unbounded}"))?;
        n_cases += 1;

        let paths = enumerate_paths(&StripQuery::new(2 * n, 0, 0, n).unwrap(), &w, DEFAULT_MAX_T).unwrap();
        for s in 0..n.max(1) {
            let want = paths
                .iter()
                .filter(|q| q.max_height() == s + 1)
                .fold(LaurentPolynomial::zero(), |acc, q| &acc + &path_weight(q, &w));
            let got = stratified_weight(n, s, &kappas).map_err(|e| e.to_string())?;
            ensure(got == want, || format!("s_{s} for n={n}: filtered {want}, formula {got}"))?;
        }
        if n >= 1 {
            let s0 = stratified_weight(n, 0, &kappas).unwrap();
            ensure(s0 == kappas[0].pow(n as u32), || format!("s_0 for n={n} is {s0}"))?;
        }
    }
    Ok(format!("{n_cases} cases plus stratified weights; s_0 = kappa_1^n"))
}

fn random_symbolic_spec(rng: &mut StdRng, l: usize) -> WeightSpec {
    let mut w = WeightSpec::new(rat(rng.gen_range(-2..=2), rng.gen_range(1..=3)), rat(rng.gen_range(1..=3), 1), l).unwrap();
    for h in 0..=l + 3 {
        if rng.gen_bool(0.3) {
            w = w.with_across(h.min(l), Symbol::new(&format!("u_{}", h.min(l)))).unwrap();
        }
        if h >= 1 && h <= l && rng.gen_bool(0.3) {
            w = w.with_down(h, Symbol::new(&format!("v_{h}"))).unwrap();
        }
    }
    w
}

fn paving_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0005);
    let cases = 120;
    let mut polys = 0;
    for _ in 0..cases {
        let l = rng.gen_range(0..=13);
        let w = random_symbolic_spec(&mut rng, l);
        for j in 0..=3 {
            for k in 0..=10 {
                let got = paving_polynomial(k, j, &w).map_err(|e| e.to_string())?;
                let want = ortho_poly(k, j, &w).poly;
                ensure(got == want, || format!("k={k} j={j} {w:?}: pavings {got} vs recurrence {want}"))?;
                polys += 1;
                if k <= 8 {
                    for c in 1..k {
                        let e = edge_cut(k, j, c, &w).unwrap().expand(&w);
                        ensure(e == want, || format!("edge cut k={k} j={j} c={c}: {e} vs {want}"))?;
                    }
                    for c in 0..k {
                        let v = vertex_cut(k, j, c, &w).unwrap().expand(&w);
                        ensure(v == want, || format!("vertex cut k={k} j={j} c={c}: {v} vs {want}"))?;
                    }
                }
            }
        }
    }
    Ok(format!("{cases} random specs, {polys} polynomials, all edge and vertex cuts for k <= 8"))
}

fn decomposition_bound() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    let cases = 150;
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let l = rng.gen_range(1..=8);
        let w = random_symbolic_spec(&mut rng, l);
        let j = rng.gen_range(0..=1.min(l));
        let k = l + 1 - j;
        let d = decompose(k, j, &w).map_err(|e| e.to_string())?;
        let (dl, db) = decoration_counts(k, j, &w);
        let bound = 2u64.pow(dl as u32) * 3u64.pow(db as u32);
        ensure(d.term_count() as u64 <= bound, || format!("{} terms > bound {bound} for {w:?}", d.term_count()))?;
        ensure(d.expand(&w) == ortho_poly(k, j, &w).poly, || format!("decomposition of {w:?} does not expand back"))?;
        worst = worst.max(d.term_count() as f64 / bound as f64);
    }
    for l in 4..=8 {
        let w = DmrParams::symbolic(0, l).unwrap().weights();
        let d = decompose(l + 1, 0, &w).unwrap();
        let mut got: Vec<String> = d
            .terms
            .iter()
            .map(|t| format!("{} S_{}", t.coefficient, t.factors.iter().map(|f| f.order.to_string()).collect::<String>()))
            .collect();
        let mut want = vec![
            format!("x^2 S_{}", l - 1),
            format!("-kappa*x S_{}", l - 2),
            format!("-omega*x S_{}", l - 2),
            format!("kappa*omega S_{}", l - 3),
        ];
        got.sort();
        want.sort();
        ensure(got == want, || format!("L={l}: {got:?}"))?;
    }
    Ok(format!(
        "{cases} random placements within 2^|D_lambda| 3^|D_b| (largest ratio {worst:.3}); wall-weight form x^2 S_(L-1) - kappa x S_(L-2) - omega x S_(L-2) + kappa omega S_(L-3) for L = 4..8"
    ))
}

fn divisibility() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0007);
    let mut n = 0;
    for _ in 0..4 {
        for l in 0..=8 {
            let mut w = WeightSpec::new(rat(rng.gen_range(-3..=3), rng.gen_range(1..=4)), rat(rng.gen_range(1..=5), rng.gen_range(1..=3)), l).unwrap();
            for h in 0..=l {
                w = w.with_across(h, rat(rng.gen_range(-5..=5), rng.gen_range(1..=4))).unwrap();
                if h >= 1 {
                    // keep lambda_h = lambda + d away from zero
                    let lam = w.background_rationals().unwrap().1;
                    let mut d = rat(rng.gen_range(-5..=5), rng.gen_range(1..=4));
                    if lam.clone() + d.clone() == rat(0, 1) {
                        d = d + rat(1, 1);
                    }
                    w = w.with_down(h, d).unwrap();
                }
            }
            let big = ortho_poly(l + 1, 0, &w).poly;
            for y in 0..=l {
                let prod = ((y + 1)..=l).fold(LaurentPolynomial::one(), |acc, i| &acc * &w.lambda(i));
                let lhs = &(&prod * &ortho_poly(y, 0, &w).poly) - &(&ortho_poly(l, 0, &w).poly * &ortho_poly(l - y, y + 1, &w).poly);
                let (_, rem) = lhs.div_rem_monic(&big, X).map_err(|e| e.to_string())?;
                ensure(rem.is_zero(), || format!("y={y} L={l}: remainder {rem}"))?;
                n += 1;
            }
        }
    }
    Ok(format!("{n} (y, L) pairs with random rational weights, remainder zero"))
}

fn numeric_closed_form() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0008);
    let points: Vec<f64> = (0..20)
        .map(|i| if i % 2 == 0 { rng.gen_range(-1.9..1.9) } else { rng.gen_range(2.1..4.0) })
        .collect();
    let mut worst = 0.0f64;
    for &x0 in &points {
        for k in 0..=12 {
            let (exact, closed) = chebyshev_closed_form_check(k, x0).map_err(|e| e.to_string())?;
            let rel = (closed - exact).abs() / exact.abs();
            ensure(rel <= 1e-9, || format!("k={k} x={x0}: exact {exact}, closed form {closed}, relative error {rel:e}"))?;
            worst = worst.max(rel);
        }
    }
    Ok(format!("20 points, k <= 12, worst relative error {worst:.2e}"))
}

/// `(t, L, micros)` rows of bench CSV, checking the header and every column.
fn parse_bench(text: &str) -> Result<Vec<(usize, usize, f64)>, String> {
    let mut lines = text.lines();
    ensure(lines.next() == Some("query,engine,micros,terms"), || "missing CSV header".into())?;
    let mut rows = Vec::new();
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        ensure(cols.len() == 4, || format!("bad row `{line}`"))?;
        let field = |key: &str| {
            cols[0]
                .split_whitespace()
                .find_map(|kv| kv.strip_prefix(key))
                .and_then(|v| v.parse::<usize>().ok())
                .ok_or_else(|| format!("bad query `{}`", cols[0]))
        };
        let (t, l) = (field("t=")?, field("L=")?);
        let micros: f64 = cols[2].parse().map_err(|_| format!("bad micros `{}`", cols[2]))?;
        cols[3].parse::<usize>().map_err(|_| format!("bad terms `{}`", cols[3]))?;
        ensure(micros > 0.0, || format!("nonpositive time in `{line}`"))?;
        rows.push((t, l, micros));
    }
    Ok(rows)
}

fn run_bench(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_latpoly")).arg("bench").args(args).output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    Ok(String::from_utf8(out.stdout).unwrap())
}

/// Least-squares slope of log(micros) against log(x).
fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    num / den
}

fn bench_sanity() -> Outcome {
    let rho = parse_bench(&run_bench(&["--t", "40", "--from", "4", "--L", "3", "--engines", "rho-ct"])?)?;
    ensure(rho.len() == 37, || format!("expected 37 rho-ct rows, got {}", rho.len()))?;
    let rho_pts: Vec<(f64, f64)> = rho.iter().map(|&(t, _, m)| (t as f64, m)).collect();
    let rho_slope = loglog_slope(&rho_pts);

    let csv = run_bench(&["--model", "rogers", "--t", "14", "--sweep", "l", "--from", "1", "--L", "7", "--engines", "closed-form"])?;
    let nest = parse_bench(&csv)?;
    ensure(nest.len() == 7, || format!("expected 7 rogers rows, got {}", nest.len()))?;
    let growth: Vec<String> = nest.iter().map(|(_, l, m)| format!("L={l}:{m:.0}us")).collect();
    ensure(rho_slope.is_finite(), || "rho-ct timings do not fit a power law".into())?;
    Ok(format!(
        "rho-ct at L=3 grows like t^{rho_slope:.2} over t = 4..40; rogers n=7 by nesting depth {}",
        growth.join(" ")
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("five-way engine agreement", five_way_agreement),
        ("two-wall closed forms vs brute force", dmr_equivalence),
        ("four-wall closed forms vs brute force", four_weight_equivalence),
        ("general down weights vs brute force", rogers_equivalence),
        ("paving oracle and cut identities", paving_oracle),
        ("decomposition bound", decomposition_bound),
        ("divisibility by P_(L+1)", divisibility),
        ("numeric closed form for S_k", numeric_closed_form),
        ("bench sanity", bench_sanity),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {}: PASS  {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
