//! Jobs behind the `latpoly` binary: compute, crosscheck, bench and gf, plus
//! the JSON weights format.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde_json::{json, Map, Value};

use crate::closed_forms::{dmr_sum, four_weight_sum, rogers, rogers_weights, DmrParams, FourWeightParams};
use crate::engines::{brute_force_capped, transfer_matrix, RhoCtContext, StripQuery, ViennotContext, DEFAULT_MAX_T};
use crate::error::{Error, Result};
use crate::orthopoly::WeightSpec;
use crate::symbolic::{parse_poly, parse_rational, to_latex, LaurentPolynomial, Rational, Symbol, TruncatedSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Compute,
    Crosscheck,
    Bench,
    Gf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Engine {
    Brute,
    TMatrix,
    ViennotCt,
    RhoCt,
    ClosedForm,
}

impl Engine {
    pub const ALL: [Engine; 5] = [Engine::Brute, Engine::TMatrix, Engine::ViennotCt, Engine::RhoCt, Engine::ClosedForm];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Brute => "brute",
            Engine::TMatrix => "tmatrix",
            Engine::ViennotCt => "viennot-ct",
            Engine::RhoCt => "rho-ct",
            Engine::ClosedForm => "closed-form",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Engine> {
        Engine::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidQuery(format!("unknown engine `{s}` (expected brute, tmatrix, viennot-ct, rho-ct, closed-form)")))
    }
}

/// Parse a comma-separated engine list.
pub fn parse_engines(list: &str) -> Result<Vec<Engine>> {
    let mut out: Vec<Engine> = list.split(',').map(|s| s.trim().parse()).collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Plain,
    Json,
    Latex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sweep {
    T,
    L,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Dmr,
    Four,
    Rogers,
}

/// A named model with its `key=value` parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub kind: ModelKind,
    pub params: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightSource {
    /// Dyck background with no decorations.
    Default,
    Spec(WeightSpec),
    Model(Model),
}

#[derive(Clone, Debug, PartialEq)]
pub struct JobSpec {
    pub mode: Mode,
    pub t: Option<usize>,
    pub strip_height: Option<usize>,
    pub y_start: Option<usize>,
    pub y_end: Option<usize>,
    pub weights: WeightSource,
    /// Empty means the mode's default set.
    pub engines: Vec<Engine>,
    pub format: Format,
    pub order: usize,
    pub cap: usize,
    pub sweep: Sweep,
    /// First point of a bench sweep.
    pub from: Option<usize>,
}

impl Default for JobSpec {
    fn default() -> Self {
        JobSpec {
            mode: Mode::Compute,
            t: None,
            strip_height: None,
            y_start: None,
            y_end: None,
            weights: WeightSource::Default,
            engines: Vec::new(),
            format: Format::Plain,
            order: 8,
            cap: DEFAULT_MAX_T,
            sweep: Sweep::T,
            from: None,
        }
    }
}

/// Outcome of a job that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Disagreement,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::Disagreement => 1,
        }
    }
}

// ---------------------------------------------------------------------------
// JSON weights

fn schema(pointer: &str, message: impl Into<String>) -> Error {
    Error::Schema { pointer: pointer.to_string(), message: message.into() }
}

fn json_rational(v: &Value, pointer: &str) -> Result<Rational> {
    match v {
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Rational::from_integer(i.into())),
            None if n.is_u64() => Err(schema(pointer, "integer out of range")),
            None => Err(schema(pointer, "floating-point literals are not exact; write a rational string such as \"3/2\"")),
        },
        Value::String(s) => parse_rational(s).map_err(|e| schema(pointer, e.to_string())),
        _ => Err(schema(pointer, "expected a rational (integer or string such as \"1/2\")")),
    }
}

fn json_decoration(v: &Value, pointer: &str) -> Result<LaurentPolynomial> {
    match v {
        Value::String(s) => parse_poly(s).map_err(|e| schema(pointer, e.to_string())),
        Value::Number(_) => Ok(LaurentPolynomial::constant(json_rational(v, pointer)?)),
        Value::Object(obj) => {
            for k in obj.keys() {
                if k != "sym" && k != "shift" {
                    return Err(schema(&format!("{pointer}/{k}"), "unknown field"));
                }
            }
            let name = match obj.get("sym") {
                Some(Value::String(s)) if Symbol::is_valid_name(s) => s,
                Some(_) => return Err(schema(&format!("{pointer}/sym"), "expected a symbol name")),
                None => return Err(schema(&format!("{pointer}/sym"), "missing field")),
            };
            let shift = match obj.get("shift") {
                Some(s) => json_rational(s, &format!("{pointer}/shift"))?,
                None => Rational::from_integer(0.into()),
            };
            Ok(&LaurentPolynomial::var(Symbol::new(name)) + &LaurentPolynomial::constant(shift))
        }
        _ => Err(schema(pointer, "expected a polynomial string, a rational, or {\"sym\", \"shift\"}")),
    }
}

fn json_decorations(v: Option<&Value>, pointer: &str) -> Result<BTreeMap<usize, LaurentPolynomial>> {
    let mut out = BTreeMap::new();
    let Some(v) = v else { return Ok(out) };
    let Value::Object(obj) = v else {
        return Err(schema(pointer, "expected an object mapping heights to values"));
    };
    for (k, val) in obj {
        let here = format!("{pointer}/{k}");
        let h: usize = k
            .parse()
            .ok()
            .filter(|_| k.chars().all(|c| c.is_ascii_digit()))
            .ok_or_else(|| schema(&here, "heights are decimal strings"))?;
        let poly = json_decoration(val, &here)?;
        out.insert(h, poly);
    }
    Ok(out)
}

/// Parse the weights document
/// `{"b", "lambda", "across_decorations", "down_decorations", "L"}`.
/// Without `"L"` the strip height is the largest decorated height.
pub fn parse_weights(text: &str) -> Result<WeightSpec> {
    let doc: Value = serde_json::from_str(text).map_err(|e| schema("", format!("invalid JSON: {e}")))?;
    let Value::Object(obj) = &doc else {
        return Err(schema("", "expected a JSON object"));
    };
    const KNOWN: [&str; 5] = ["b", "lambda", "across_decorations", "down_decorations", "L"];
    for k in obj.keys() {
        if !KNOWN.contains(&k.as_str()) {
            return Err(schema(&format!("/{k}"), "unknown field"));
        }
    }
    let b = json_rational(obj.get("b").ok_or_else(|| schema("/b", "missing field"))?, "/b")?;
    let lambda = json_rational(obj.get("lambda").ok_or_else(|| schema("/lambda", "missing field"))?, "/lambda")?;
    let across = json_decorations(obj.get("across_decorations"), "/across_decorations")?;
    let down = json_decorations(obj.get("down_decorations"), "/down_decorations")?;
    let strip_height = match obj.get("L") {
        Some(Value::Number(n)) => n.as_u64().ok_or_else(|| schema("/L", "expected a nonnegative integer"))? as usize,
        Some(_) => return Err(schema("/L", "expected a nonnegative integer")),
        None => across.keys().chain(down.keys()).copied().max().unwrap_or(0),
    };
    let mut w = WeightSpec::new(b, lambda, strip_height).map_err(|e| schema("", e.to_string()))?;
    for (h, v) in across {
        w = w.with_across(h, v).map_err(|e| schema(&format!("/across_decorations/{h}"), e.to_string()))?;
    }
    for (h, v) in down {
        w = w.with_down(h, v).map_err(|e| schema(&format!("/down_decorations/{h}"), e.to_string()))?;
    }
    Ok(w)
}

fn json_background(p: &LaurentPolynomial) -> Value {
    match p.as_constant() {
        Some(c) => Value::String(c.to_string()),
        None => Value::String(p.to_string()),
    }
}

/// Canonical JSON for a weight spec; `parse_weights` reads it back.
pub fn serialize_weights(w: &WeightSpec) -> String {
    let decorations = |m: &BTreeMap<usize, LaurentPolynomial>| {
        m.iter().map(|(h, v)| (h.to_string(), Value::String(v.to_string()))).collect::<Map<_, _>>()
    };
    let doc = json!({
        "b": json_background(w.background_b()),
        "lambda": json_background(w.background_lambda()),
        "across_decorations": decorations(w.across_decorations()),
        "down_decorations": decorations(w.down_decorations()),
        "L": w.strip_height(),
    });
    serde_json::to_string_pretty(&doc).unwrap()
}

// ---------------------------------------------------------------------------
// Models

fn param_poly(m: &Model, key: &str, default: &str) -> Result<LaurentPolynomial> {
    let text = m.params.get(key).map(String::as_str).unwrap_or(default);
    parse_poly(text).map_err(|e| Error::InvalidParams(format!("{key} = `{text}`: {e}")))
}

fn param_usize(m: &Model, key: &str) -> Result<Option<usize>> {
    match m.params.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| Error::InvalidParams(format!("{key} = `{v}` is not a nonnegative integer"))),
    }
}

/// A model instantiated for one half-length and strip height.
enum Instance {
    Dmr(DmrParams),
    Four(FourWeightParams),
    Rogers { n: usize, strip: Option<usize>, kappas: Vec<LaurentPolynomial> },
}

impl Instance {
    fn weights(&self) -> Result<WeightSpec> {
        match self {
            Instance::Dmr(p) => Ok(p.weights()),
            Instance::Four(p) => Ok(p.weights()),
            Instance::Rogers { n, strip, kappas } => rogers_weights(strip.unwrap_or(*n), kappas),
        }
    }

    fn closed_form(&self) -> Result<LaurentPolynomial> {
        match self {
            Instance::Dmr(p) => dmr_sum(p),
            Instance::Four(p) => four_weight_sum(p),
            Instance::Rogers { n, strip, kappas } => rogers(*n, *strip, kappas),
        }
    }
}

fn known_params(m: &Model) -> Result<()> {
    let allowed: &[&str] = match m.kind {
        ModelKind::Dmr => &["r", "L", "kappa", "omega"],
        ModelKind::Four => &["r", "L", "kappa1", "kappa2", "omega1", "omega2"],
        ModelKind::Rogers => &["r", "n", "L"],
    };
    for k in m.params.keys() {
        let kappa_i = m.kind == ModelKind::Rogers
            && k.strip_prefix("kappa_").is_some_and(|i| i.parse::<usize>().is_ok_and(|i| i >= 1));
        if !allowed.contains(&k.as_str()) && !kappa_i {
            return Err(Error::InvalidParams(format!("unknown parameter `{k}` for this model")));
        }
    }
    Ok(())
}

/// Strip height from `--L` or the `L` parameter; `None` is the half plane.
fn model_strip(m: &Model, flag: Option<usize>) -> Result<Option<usize>> {
    match (flag, m.params.get("L").map(String::as_str)) {
        (Some(l), _) => Ok(Some(l)),
        (None, Some("inf")) if m.kind == ModelKind::Rogers => Ok(None),
        (None, Some(v)) => v
            .parse()
            .map(Some)
            .map_err(|_| Error::InvalidParams(format!("L = `{v}` is not a nonnegative integer"))),
        (None, None) => Err(Error::InvalidParams("the model needs a strip height: pass --L or --param L=...".into())),
    }
}

/// Half-length from `r` (or `n`) or from an even `--t`.
fn model_half_length(m: &Model, t: Option<usize>) -> Result<usize> {
    if let Some(r) = param_usize(m, "r")?.or(param_usize(m, "n")?) {
        return Ok(r);
    }
    match t {
        Some(t) if t % 2 == 0 => Ok(t / 2),
        Some(t) => Err(Error::InvalidParams(format!("Dyck paths have even length, got t = {t}"))),
        None => Err(Error::InvalidParams("pass --param r=... or an even --t".into())),
    }
}

fn instantiate(m: &Model, r: usize, strip: Option<usize>) -> Result<Instance> {
    known_params(m)?;
    let need_strip = || strip.ok_or_else(|| Error::InvalidParams("L = inf is only meaningful for rogers".into()));
    Ok(match m.kind {
        ModelKind::Dmr => Instance::Dmr(DmrParams::new(
            r,
            need_strip()?,
            param_poly(m, "kappa", "kappa")?,
            param_poly(m, "omega", "omega")?,
        )?),
        ModelKind::Four => Instance::Four(FourWeightParams::new(
            r,
            need_strip()?,
            param_poly(m, "kappa1", "kappa1")?,
            param_poly(m, "kappa2", "kappa2")?,
            param_poly(m, "omega1", "omega1")?,
            param_poly(m, "omega2", "omega2")?,
        )?),
        ModelKind::Rogers => {
            let count = strip.unwrap_or(r).max(r).max(1);
            let kappas = (1..=count)
                .map(|i| {
                    let key = format!("kappa_{i}");
                    param_poly(m, &key, &key)
                })
                .collect::<Result<Vec<_>>>()?;
            Instance::Rogers { n: r, strip, kappas }
        }
    })
}

// ---------------------------------------------------------------------------
// Evaluation

fn is_dyck_query(q: &StripQuery) -> bool {
    q.y_start == 0 && q.y_end == 0 && q.t % 2 == 0
}

/// Engines prepared for one weight spec and a bound on `t`.
struct Prepared<'a> {
    w: WeightSpec,
    cap: usize,
    viennot: Option<ViennotContext>,
    rho: Option<RhoCtContext>,
    model: Option<(&'a Model, Option<usize>)>,
}

impl<'a> Prepared<'a> {
    fn new(w: WeightSpec, engines: &[Engine], t_max: usize, cap: usize, model: Option<(&'a Model, Option<usize>)>) -> Result<Self> {
        let viennot = if engines.contains(&Engine::ViennotCt) { Some(ViennotContext::new(&w, t_max)?) } else { None };
        let rho = if engines.contains(&Engine::RhoCt) { Some(RhoCtContext::new(&w, t_max)?) } else { None };
        Ok(Prepared { w, cap, viennot, rho, model })
    }

    fn run(&self, engine: Engine, q: &StripQuery) -> Result<LaurentPolynomial> {
        match engine {
            Engine::Brute => brute_force_capped(q, &self.w, self.cap),
            Engine::TMatrix => transfer_matrix(q, &self.w),
            Engine::ViennotCt => self.viennot.as_ref().expect("prepared").query(q),
            Engine::RhoCt => self.rho.as_ref().expect("prepared").query(q),
            Engine::ClosedForm => {
                let Some((m, strip)) = self.model else {
                    return Err(Error::InvalidQuery("the closed-form engine needs --model".into()));
                };
                if !is_dyck_query(q) {
                    return Err(Error::InvalidQuery(format!("{q}: closed forms cover even t with y' = y = 0")));
                }
                instantiate(m, q.t / 2, strip)?.closed_form()
            }
        }
    }
}

fn render(p: &LaurentPolynomial, format: Format) -> String {
    match format {
        Format::Latex => to_latex(p),
        _ => p.to_string(),
    }
}

fn query_json(q: &StripQuery) -> Value {
    json!({"t": q.t, "y_start": q.y_start, "y_end": q.y_end, "L": q.strip_height})
}

/// Weights and (for models) the model context for a given strip height.
fn resolve_weights<'a>(spec: &'a JobSpec, strip: Option<usize>, r: usize) -> Result<(WeightSpec, Option<(&'a Model, Option<usize>)>)> {
    match &spec.weights {
        WeightSource::Default => {
            let l = strip.ok_or_else(|| Error::InvalidQuery("pass --L or --weights".into()))?;
            Ok((WeightSpec::dyck(l), None))
        }
        WeightSource::Spec(w) => match strip {
            Some(l) if l != w.strip_height() => Ok((w.with_strip_height(l)?, None)),
            _ => Ok((w.clone(), None)),
        },
        WeightSource::Model(m) => {
            let strip = match strip {
                Some(l) => Some(l),
                None => model_strip(m, None)?,
            };
            let inst = instantiate(m, r, strip)?;
            Ok((inst.weights()?, Some((m, strip))))
        }
    }
}

fn default_engine(spec: &JobSpec, w: &WeightSpec) -> Engine {
    if matches!(spec.weights, WeightSource::Model(_)) {
        Engine::ClosedForm
    } else if w.background_rationals().is_some() {
        Engine::RhoCt
    } else {
        Engine::ViennotCt
    }
}

pub fn run_job(spec: &JobSpec, out: &mut dyn Write) -> Result<Outcome> {
    match spec.mode {
        Mode::Compute => compute(spec, out),
        Mode::Crosscheck => crosscheck(spec, out),
        Mode::Bench => bench(spec, out),
        Mode::Gf => gf(spec, out),
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn compute(spec: &JobSpec, out: &mut dyn Write) -> Result<Outcome> {
    let (t, r, strip) = match &spec.weights {
        WeightSource::Model(m) => {
            let r = model_half_length(m, spec.t)?;
            let strip = model_strip(m, spec.strip_height)?;
            (2 * r, r, strip)
        }
        _ => (spec.t.ok_or_else(|| Error::InvalidQuery("pass --t".into()))?, 0, spec.strip_height),
    };
    let (w, model) = resolve_weights(spec, strip, r)?;
    let l = w.strip_height();
    let q = StripQuery::new(t, spec.y_start.unwrap_or(0), spec.y_end.unwrap_or(0), l)?;
    let engine = spec.engines.first().copied().unwrap_or_else(|| default_engine(spec, &w));
    let prepared = Prepared::new(w, &[engine], t, spec.cap, model)?;
    let z = prepared.run(engine, &q)?;
    match spec.format {
        Format::Json => {
            let doc = json!({"query": query_json(&q), "engine": engine.name(), "result": z.to_string(), "latex": to_latex(&z)});
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap()).map_err(io)?;
        }
        f => writeln!(out, "{}", render(&z, f)).map_err(io)?,
    }
    Ok(Outcome::Ok)
}

/// Engine results for one query, in canonical rendering.
#[derive(Clone, Debug, PartialEq)]
pub struct QueryReport {
    pub query: StripQuery,
    pub results: BTreeMap<Engine, String>,
    pub millis: BTreeMap<Engine, f64>,
}

impl QueryReport {
    pub fn agree(&self) -> bool {
        let mut it = self.results.values();
        match it.next() {
            Some(first) => it.all(|r| r == first),
            None => true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CrosscheckReport {
    pub queries: Vec<QueryReport>,
}

impl CrosscheckReport {
    pub fn agree(&self) -> bool {
        self.queries.iter().all(QueryReport::agree)
    }

    pub fn first_disagreement(&self) -> Option<&QueryReport> {
        self.queries.iter().find(|q| !q.agree())
    }
}

/// All-symbolic grid weights: Dyck background with a decoration symbol at
/// every across and down height.
pub fn symbolic_grid_weights(strip_height: usize) -> WeightSpec {
    let mut w = WeightSpec::dyck(strip_height);
    for h in 0..=strip_height {
        w = w.with_across(h, Symbol::new(&format!("bh_{h}"))).unwrap();
        if h >= 1 {
            w = w.with_down(h, Symbol::new(&format!("lh_{h}"))).unwrap();
        }
    }
    w
}

/// Run every selected engine on the query grid.
pub fn crosscheck_report(spec: &JobSpec) -> Result<CrosscheckReport> {
    let t_max = spec.t.unwrap_or(6);
    let strips: Vec<Option<usize>> = match (&spec.weights, spec.strip_height) {
        (_, Some(l)) => vec![Some(l)],
        (WeightSource::Spec(w), None) => vec![Some(w.strip_height())],
        (WeightSource::Model(m), None) => vec![model_strip(m, None)?],
        (WeightSource::Default, None) => (0..=3).map(Some).collect(),
    };
    let mut engines = if spec.engines.is_empty() {
        let mut e = vec![Engine::Brute, Engine::TMatrix, Engine::ViennotCt, Engine::RhoCt];
        if matches!(spec.weights, WeightSource::Model(_)) {
            e.push(Engine::ClosedForm);
        }
        e
    } else {
        spec.engines.clone()
    };
    engines.sort();
    if engines.contains(&Engine::ClosedForm) && !matches!(spec.weights, WeightSource::Model(_)) {
        return Err(Error::InvalidQuery("the closed-form engine needs --model".into()));
    }
    let mut report = CrosscheckReport::default();
    for strip in strips {
        let (w, model) = match &spec.weights {
            WeightSource::Default => (symbolic_grid_weights(strip.unwrap()), None),
            _ => resolve_weights(spec, strip, 0)?,
        };
        let l = w.strip_height();
        let prepared = Prepared::new(w, &engines, t_max, spec.cap, model)?;
        let starts: Vec<usize> = spec.y_start.map_or((0..=l).collect(), |y| vec![y]);
        let ends: Vec<usize> = spec.y_end.map_or((0..=l).collect(), |y| vec![y]);
        for t in 0..=t_max {
            for &a in &starts {
                for &b in &ends {
                    let q = StripQuery::new(t, a, b, l)?;
                    let mut results = BTreeMap::new();
                    let mut millis = BTreeMap::new();
                    for &e in &engines {
                        if e == Engine::ClosedForm && !is_dyck_query(&q) {
                            continue;
                        }
                        let start = Instant::now();
                        let z = prepared.run(e, &q)?;
                        millis.insert(e, start.elapsed().as_secs_f64() * 1e3);
                        results.insert(e, z.to_string());
                    }
                    report.queries.push(QueryReport { query: q, results, millis });
                }
            }
        }
    }
    report.queries.sort_by_key(|r| r.query);
    Ok(report)
}

fn crosscheck(spec: &JobSpec, out: &mut dyn Write) -> Result<Outcome> {
    let report = crosscheck_report(spec)?;
    let outcome = if report.agree() { Outcome::Ok } else { Outcome::Disagreement };
    match spec.format {
        Format::Json => {
            let queries: Vec<Value> = report
                .queries
                .iter()
                .map(|r| {
                    json!({
                        "query": query_json(&r.query),
                        "results": r.results.iter().map(|(e, s)| (e.name().to_string(), Value::String(s.clone()))).collect::<Map<_, _>>(),
                        "millis": r.millis.iter().map(|(e, ms)| (e.name().to_string(), json!(ms))).collect::<Map<_, _>>(),
                        "agree": r.agree(),
                    })
                })
                .collect();
            let doc = json!({"agree": report.agree(), "queries": queries});
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap()).map_err(io)?;
        }
        f => {
            for r in &report.queries {
                let engines: Vec<String> = r.millis.iter().map(|(e, ms)| format!("{e} {ms:.3}ms")).collect();
                let status = if r.agree() { "agree" } else { "DIFFER" };
                let value = r.results.values().next().map(|s| match f {
                    Format::Latex => to_latex(&parse_poly(s).unwrap()),
                    _ => s.clone(),
                });
                writeln!(out, "{}: {status} [{}] {}", r.query, engines.join(", "), value.unwrap_or_default()).map_err(io)?;
            }
            writeln!(out, "{} queries, {}", report.queries.len(), if report.agree() { "all engines agree" } else { "engines disagree" })
                .map_err(io)?;
        }
    }
    if let Some(bad) = report.first_disagreement() {
        writeln!(out, "first disagreement at {}:", bad.query).map_err(io)?;
        let mut seen: Vec<(&Engine, &String)> = Vec::new();
        for (e, s) in &bad.results {
            if seen.iter().all(|(_, t)| *t != s) {
                seen.push((e, s));
            }
        }
        for (e, s) in seen.iter().take(2) {
            writeln!(out, "  {e}: {s}").map_err(io)?;
        }
    }
    Ok(outcome)
}

/// One bench row.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub query: StripQuery,
    pub engine: Engine,
    pub micros: f64,
    pub terms: usize,
}

pub const BENCH_HEADER: &str = "query,engine,micros,terms";

pub fn bench_rows(spec: &JobSpec) -> Result<Vec<BenchRow>> {
    let is_model = matches!(spec.weights, WeightSource::Model(_));
    let engines = if spec.engines.is_empty() {
        if is_model { vec![Engine::RhoCt, Engine::ClosedForm] } else { vec![Engine::RhoCt] }
    } else {
        spec.engines.clone()
    };
    if engines.contains(&Engine::ClosedForm) && !is_model {
        return Err(Error::InvalidQuery("the closed-form engine needs --model".into()));
    }
    // (t, strip) points of the sweep
    let points: Vec<(usize, Option<usize>)> = match spec.sweep {
        Sweep::T => {
            let t_max = spec.t.ok_or_else(|| Error::InvalidQuery("pass --t as the sweep end".into()))?;
            let strip = match (&spec.weights, spec.strip_height) {
                (WeightSource::Model(m), flag) => model_strip(m, flag)?,
                (_, flag) => flag,
            };
            let step = if is_model { 2 } else { 1 };
            (spec.from.unwrap_or(0)..=t_max).filter(|t| t % step == 0).map(|t| (t, strip)).collect()
        }
        Sweep::L => {
            let t = match &spec.weights {
                WeightSource::Model(m) => 2 * model_half_length(m, spec.t)?,
                _ => spec.t.ok_or_else(|| Error::InvalidQuery("pass --t".into()))?,
            };
            let l_max = spec.strip_height.ok_or_else(|| Error::InvalidQuery("pass --L as the sweep end".into()))?;
            (spec.from.unwrap_or(0)..=l_max).map(|l| (t, Some(l))).collect()
        }
    };
    let mut rows = Vec::new();
    for (t, strip) in points {
        let (w, model) = resolve_weights(spec, strip, t / 2)?;
        let q = StripQuery::new(t, spec.y_start.unwrap_or(0), spec.y_end.unwrap_or(0), w.strip_height())?;
        for &e in &engines {
            // context construction is part of the cost being measured
            let start = Instant::now();
            let prepared = Prepared::new(w.clone(), &[e], t, spec.cap, model)?;
            let z = prepared.run(e, &q)?;
            let micros = (start.elapsed().as_secs_f64() * 1e6).max(1e-3);
            rows.push(BenchRow { query: q, engine: e, micros, terms: z.len() });
        }
    }
    Ok(rows)
}

fn bench(spec: &JobSpec, out: &mut dyn Write) -> Result<Outcome> {
    let rows = bench_rows(spec)?;
    writeln!(out, "{BENCH_HEADER}").map_err(io)?;
    for r in rows {
        writeln!(out, "{},{},{:.3},{}", r.query, r.engine, r.micros, r.terms).map_err(io)?;
    }
    Ok(Outcome::Ok)
}

fn series_latex(s: &TruncatedSeries) -> String {
    let mut parts: Vec<String> = s
        .terms()
        .map(|(e, c)| {
            let xe = match e {
                0 => String::new(),
                1 => " x".to_string(),
                _ => format!(" x^{{{e}}}"),
            };
            format!("\\left({}\\right){xe}", to_latex(c))
        })
        .collect();
    parts.push(format!("O(x^{{{}}})", s.order() + 1));
    parts.join(" + ")
}

fn gf(spec: &JobSpec, out: &mut dyn Write) -> Result<Outcome> {
    let r = match &spec.weights {
        WeightSource::Model(m) => model_half_length(m, spec.t).unwrap_or(0),
        _ => 0,
    };
    let strip = match &spec.weights {
        WeightSource::Model(m) => model_strip(m, spec.strip_height)?,
        _ => spec.strip_height,
    };
    let (w, _) = resolve_weights(spec, strip, r)?;
    let (a, b) = (spec.y_start.unwrap_or(0), spec.y_end.unwrap_or(0));
    let s = ViennotContext::new(&w, spec.order)?.series(a, b, spec.order)?;
    match spec.format {
        Format::Plain => writeln!(out, "{s}").map_err(io)?,
        Format::Latex => writeln!(out, "{}", series_latex(&s)).map_err(io)?,
        Format::Json => {
            let coeffs: Map<String, Value> = (0..=spec.order as i64)
                .map(|n| (n.to_string(), Value::String(s.coefficient(n).unwrap().to_string())))
                .collect();
            let doc = json!({"y_start": a, "y_end": b, "L": w.strip_height(), "order": spec.order, "coefficients": coeffs});
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap()).map_err(io)?;
        }
    }
    Ok(Outcome::Ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(spec: &JobSpec) -> (Outcome, String) {
        let mut buf = Vec::new();
        let o = run_job(spec, &mut buf).unwrap();
        (o, String::from_utf8(buf).unwrap())
    }

    fn dmr(params: &[(&str, &str)]) -> WeightSource {
        WeightSource::Model(Model {
            kind: ModelKind::Dmr,
            params: params.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        })
    }

    #[test]
    fn dmr_compute() {
        let spec = JobSpec { weights: dmr(&[("r", "2")]), strip_height: Some(2), ..JobSpec::default() };
        assert_eq!(run(&spec), (Outcome::Ok, "kappa^2 + kappa*omega\n".to_string()));
    }

    #[test]
    fn dmr_rejects_small_strip() {
        let spec = JobSpec { weights: dmr(&[("r", "2")]), strip_height: Some(1), ..JobSpec::default() };
        let err = run_job(&spec, &mut Vec::new()).unwrap_err();
        assert!(matches!(err, Error::InvalidParams(ref m) if m.contains("L >= 2")), "{err}");
    }

    #[test]
    fn weights_round_trip() {
        let text = r#"{"b":0,"lambda":1,"down_decorations":{"1":"kappa-1","2":{"sym":"omega","shift":-1}}}"#;
        let w = parse_weights(text).unwrap();
        assert_eq!(w.strip_height(), 2);
        assert_eq!(w.lambda(2), parse_poly("omega").unwrap());
        let once = serialize_weights(&w);
        assert_eq!(parse_weights(&once).unwrap(), w);
        assert_eq!(serialize_weights(&parse_weights(&once).unwrap()), once);
    }

    #[test]
    fn schema_errors_point_at_field() {
        let missing = parse_weights(r#"{"b":0}"#).unwrap_err();
        assert_eq!(missing, Error::Schema { pointer: "/lambda".into(), message: "missing field".into() });
        let float = parse_weights(r#"{"b":0.5,"lambda":1}"#).unwrap_err();
        assert!(matches!(float, Error::Schema { ref pointer, .. } if pointer == "/b"));
        let bad = parse_weights(r#"{"b":0,"lambda":1,"down_decorations":{"1":{"sym":"k","shift":0.5}}}"#).unwrap_err();
        assert!(matches!(bad, Error::Schema { ref pointer, .. } if pointer == "/down_decorations/1/shift"));
        let reserved = parse_weights(r#"{"b":0,"lambda":1,"across_decorations":{"0":"x"}}"#).unwrap_err();
        assert!(matches!(reserved, Error::Schema { ref pointer, .. } if pointer == "/across_decorations/0"));
    }

    #[test]
    fn rational_background() {
        let w = parse_weights(r#"{"b":"1/2","lambda":"3","L":3}"#).unwrap();
        assert_eq!(w.background_rationals().unwrap().0, Rational::new(1.into(), 2.into()));
        assert_eq!(w.strip_height(), 3);
    }

    #[test]
    fn small_crosscheck_agrees() {
        let spec = JobSpec { mode: Mode::Crosscheck, t: Some(4), strip_height: Some(2), ..JobSpec::default() };
        let report = crosscheck_report(&spec).unwrap();
        assert_eq!(report.queries.len(), 5 * 9);
        assert!(report.agree());
    }

    #[test]
    fn bench_csv_shape() {
        let spec = JobSpec { mode: Mode::Bench, t: Some(5), strip_height: Some(2), ..JobSpec::default() };
        let (_, text) = run(&spec);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], BENCH_HEADER);
        assert_eq!(lines.len(), 1 + 6);
        for l in &lines[1..] {
            let cols: Vec<&str> = l.split(',').collect();
            assert_eq!(cols.len(), 4);
            assert!(cols[2].parse::<f64>().unwrap() > 0.0);
        }
    }
}
