//! Scenario files and batch check reports.
//!
//! A scenario is UTF-8 text with an optional `config` header line followed
//! by a `DECLARE` section and a `CHECK` section:
//!
//! ```text
//! # comments start with '#'
//! config cap=24 grid=8:48 nodes=512
//! DECLARE
//! scalar a = 1 + rho
//! set D = disc(0, 1)
//! func u = poly(z^2)
//! series g = geometric(0)
//! path C = circle(0, 1)
//! CHECK
//! second_derivative: cauchy(u, 0, 1, rho, 1, exact) => 2*rho
//! ```
//!
//! Each check line is `name: op(arg, ...) => expected`. Names must be
//! declared before they are used. Expected values are verdict words,
//! scalar expressions, numbers (optionally `+- tol`) or `error(Kind)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::analytic::characterize::{characterization_suite, entire_growth_analysis, truncated_exp, GrowthClaim, GrowthVerdict};
use crate::analytic::unicity::{unicity_check, UnicityVerdict};
use crate::analytic::{convergence_radius, sum_at, AnalyticError, PowerSeries, TailLaw};
use crate::contour::{self, ContourError, ConvexHomotopy, GenPath, HomotopyVerdict, Mode, DEFAULT_NODES};
use crate::func::{Domain, GenFunction, GenValue, GinftyVerdict, Holomorphy, Schedule, TruncatedSeries};
use crate::net::{EpsGrid, NetClass, OracleConfig, SampledNet};
use crate::parse::{default_cap, parse_poly_with, parse_rational, parse_scalar_with, ScalarEnv};
use crate::scalar::{AsymptoticScalar, ExtendedValuation, Rational};
use crate::sets::{self, InternalSetRep, Invertibility, Membership, SetError, SharpBall, SAMPLING_SEED};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("bad flag: {0}")]
    Flag(String),
}

fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T, ScenarioError> {
    Err(ScenarioError::Parse { line, msg: msg.into() })
}

/// Settings that may come from flags or from the scenario header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub cap: Option<Rational>,
    pub grid: Option<(i32, i32)>,
    pub nodes: Option<usize>,
    pub seed: Option<u64>,
}

impl ConfigOverrides {
    /// `self` wins over `other`.
    pub fn over(&self, other: &ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            cap: self.cap.or(other.cap),
            grid: self.grid.or(other.grid),
            nodes: self.nodes.or(other.nodes),
            seed: self.seed.or(other.seed),
        }
    }
}

pub fn parse_grid(s: &str) -> Result<(i32, i32), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("grid '{s}' is not jmin:jmax"))?;
    let a: i32 = a.trim().parse().map_err(|_| format!("bad jmin in '{s}'"))?;
    let b: i32 = b.trim().parse().map_err(|_| format!("bad jmax in '{s}'"))?;
    EpsGrid::new(a, b, 0.5)?;
    Ok((a, b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub cap: Rational,
    pub grid: EpsGrid,
    pub nodes: usize,
    /// Echoed only: sampling is seeded with a fixed constant.
    pub seed: Option<u64>,
    pub oracle: OracleConfig,
}

impl RunConfig {
    pub fn resolve(o: &ConfigOverrides) -> Result<Self, ScenarioError> {
        let (a, b) = o.grid.unwrap_or((8, 48));
        let grid = EpsGrid::new(a, b, 0.5).map_err(ScenarioError::Flag)?;
        let nodes = o.nodes.unwrap_or(DEFAULT_NODES);
        if nodes == 0 {
            return Err(ScenarioError::Flag("nodes must be positive".into()));
        }
        let cap = o.cap.unwrap_or_else(default_cap);
        if cap <= Rational::from_integer(0) {
            return Err(ScenarioError::Flag("cap must be positive".into()));
        }
        Ok(RunConfig {
            cap,
            grid,
            nodes,
            seed: o.seed,
            oracle: OracleConfig::default(),
        })
    }

    fn snapshot(&self) -> ConfigSnapshot {
        ConfigSnapshot {
            cap: self.cap.to_string(),
            grid: format!("{}:{}", self.grid.j_min, self.grid.j_max),
            nodes: self.nodes,
            seed: self.seed,
            sampling_seed: SAMPLING_SEED,
            window: self.oracle.window,
            v_neg: self.oracle.v_neg,
            n_max: self.oracle.n_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigSnapshot {
    pub cap: String,
    pub grid: String,
    pub nodes: usize,
    pub seed: Option<u64>,
    pub sampling_seed: u64,
    pub window: usize,
    pub v_neg: f64,
    pub n_max: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Declaration {
    pub line: usize,
    pub kind: String,
    pub name: String,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckSpec {
    pub line: usize,
    pub name: String,
    pub op: String,
    pub args: Vec<String>,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioDoc {
    pub header: ConfigOverrides,
    pub declarations: Vec<Declaration>,
    pub checks: Vec<CheckSpec>,
}

/// Splits `a, f(b, c), d` at top-level commas.
pub fn split_args(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if ch == ',' && depth == 0 {
            out.push(cur.trim().to_string());
            cur.clear();
        } else {
            cur.push(ch);
        }
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

/// `head(args)` into `(head, args)`.
fn call(s: &str) -> Option<(String, Vec<String>)> {
    let s = s.trim();
    let open = s.find('(')?;
    if !s.ends_with(')') {
        return None;
    }
    let head = s[..open].trim();
    if head.is_empty() || !head.chars().all(|c| c.is_alphanumeric() || c == '_') {
        return None;
    }
    Some((head.to_string(), split_args(&s[open + 1..s.len() - 1])))
}

fn parse_header(line: usize, rest: &str) -> Result<ConfigOverrides, ScenarioError> {
    let mut o = ConfigOverrides::default();
    for kv in rest.split_whitespace() {
        let Some((k, v)) = kv.split_once('=') else {
            return perr(line, format!("config entry '{kv}' is not key=value"));
        };
        match k {
            "cap" => o.cap = Some(parse_rational(v).or_else(|e| perr(line, e.to_string()))?),
            "grid" => o.grid = Some(parse_grid(v).or_else(|e| perr(line, e))?),
            "nodes" => o.nodes = Some(v.parse().or_else(|_| perr(line, format!("bad node count '{v}'")))?),
            "seed" => o.seed = Some(v.parse().or_else(|_| perr(line, format!("bad seed '{v}'")))?),
            _ => return perr(line, format!("unknown config key '{k}'")),
        }
    }
    Ok(o)
}

pub fn parse_scenario(text: &str) -> Result<ScenarioDoc, ScenarioError> {
    #[derive(PartialEq)]
    enum Section {
        Header,
        Declare,
        Check,
    }
    let mut doc = ScenarioDoc::default();
    let mut section = Section::Header;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        match l {
            "DECLARE" => {
                if section != Section::Header {
                    return perr(line, "DECLARE must come first");
                }
                section = Section::Declare;
                continue;
            }
            "CHECK" => {
                if section == Section::Check {
                    return perr(line, "duplicate CHECK section");
                }
                section = Section::Check;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Header => match l.strip_prefix("config") {
                Some(rest) if rest.is_empty() || rest.starts_with(char::is_whitespace) => {
                    doc.header = parse_header(line, rest)?.over(&doc.header);
                }
                _ => return perr(line, "expected 'config', DECLARE or CHECK"),
            },
            Section::Declare => {
                let Some((lhs, body)) = l.split_once('=') else {
                    return perr(line, "declaration needs '='");
                };
                let mut words = lhs.split_whitespace();
                let (Some(kind), Some(name), None) = (words.next(), words.next(), words.next()) else {
                    return perr(line, "declaration is 'kind name = body'");
                };
                if !["scalar", "set", "func", "series", "path"].contains(&kind) {
                    return perr(line, format!("unknown declaration kind '{kind}'"));
                }
                doc.declarations.push(Declaration {
                    line,
                    kind: kind.into(),
                    name: name.into(),
                    body: body.trim().into(),
                });
            }
            Section::Check => {
                let Some((name, rest)) = l.split_once(':') else {
                    return perr(line, "check is 'name: op(args) => expected'");
                };
                let Some((lhs, expected)) = rest.split_once("=>") else {
                    return perr(line, "check needs '=> expected'");
                };
                let Some((op, args)) = call(lhs) else {
                    return perr(line, format!("'{}' is not op(args)", lhs.trim()));
                };
                doc.checks.push(CheckSpec {
                    line,
                    name: name.trim().into(),
                    op,
                    args,
                    expected: expected.trim().into(),
                });
            }
        }
    }
    Ok(doc)
}

/// Declared objects by name.
#[derive(Debug, Clone, Default)]
pub struct Env {
    pub scalars: ScalarEnv,
    pub sets: BTreeMap<String, InternalSetRep>,
    pub funcs: BTreeMap<String, GenFunction>,
    pub series: BTreeMap<String, PowerSeries>,
    pub paths: BTreeMap<String, GenPath>,
}

impl Env {
    fn has(&self, name: &str) -> bool {
        self.scalars.contains_key(name)
            || self.sets.contains_key(name)
            || self.funcs.contains_key(name)
            || self.series.contains_key(name)
            || self.paths.contains_key(name)
    }

    pub fn scalar(&self, s: &str, cap: Rational) -> Result<AsymptoticScalar, String> {
        parse_scalar_with(s, cap, &self.scalars).map_err(|e| format!("'{s}': {e}"))
    }

    pub fn func(&self, s: &str, cap: Rational) -> Result<GenFunction, String> {
        if let Some(f) = self.funcs.get(s) {
            return Ok(f.clone());
        }
        let body = call(s).filter(|(h, a)| h == "poly" && a.len() == 1).map(|(_, a)| a[0].clone());
        parse_poly_with(body.as_deref().unwrap_or(s), cap, &self.scalars)
            .map(GenFunction::Poly)
            .map_err(|e| format!("'{s}' is neither a declared function nor a polynomial: {e}"))
    }

    pub fn set(&self, s: &str) -> Result<InternalSetRep, String> {
        self.sets.get(s).cloned().ok_or_else(|| format!("no set named '{s}'"))
    }

    pub fn path(&self, s: &str) -> Result<GenPath, String> {
        self.paths.get(s).cloned().ok_or_else(|| format!("no path named '{s}'"))
    }

    pub fn power_series(&self, s: &str) -> Result<PowerSeries, String> {
        self.series.get(s).cloned().ok_or_else(|| format!("no series named '{s}'"))
    }
}

fn arity(head: &str, args: &[String], n: std::ops::RangeInclusive<usize>) -> Result<(), String> {
    if n.contains(&args.len()) {
        Ok(())
    } else {
        Err(format!("{head} takes {} to {} arguments, got {}", n.start(), n.end(), args.len()))
    }
}

fn build_set(env: &Env, body: &str, cap: Rational) -> Result<InternalSetRep, String> {
    let (head, args) = call(body).ok_or_else(|| format!("'{body}' is not shape(args)"))?;
    let sc = |i: usize| env.scalar(&args[i], cap);
    let set_err = |e: SetError| e.to_string();
    match head.as_str() {
        "disc" => {
            arity(&head, &args, 2..=2)?;
            InternalSetRep::disc(sc(0)?, sc(1)?).map_err(set_err)
        }
        "circle" => {
            arity(&head, &args, 2..=2)?;
            InternalSetRep::circle(sc(0)?, sc(1)?).map_err(set_err)
        }
        "annulus" => {
            arity(&head, &args, 3..=3)?;
            InternalSetRep::annulus(sc(0)?, sc(1)?, sc(2)?).map_err(set_err)
        }
        "rectangle" => {
            arity(&head, &args, 2..=2)?;
            InternalSetRep::rectangle(sc(0)?, sc(1)?).map_err(set_err)
        }
        "segment" => {
            arity(&head, &args, 2..=2)?;
            InternalSetRep::segment(sc(0)?, sc(1)?).map_err(set_err)
        }
        _ => Err(format!("unknown shape '{head}'")),
    }
}

fn build_series(env: &Env, body: &str, cap: Rational) -> Result<PowerSeries, String> {
    let (head, args) = call(body).ok_or_else(|| format!("'{body}' is not law(args)"))?;
    if args.is_empty() {
        return Err(format!("{head} needs a centre"));
    }
    let center = env.scalar(&args[0], cap)?;
    let s = match head.as_str() {
        "geometric" => {
            arity(&head, &args, 1..=1)?;
            PowerSeries::geometric(center)
        }
        "rho_nsq" => {
            arity(&head, &args, 1..=1)?;
            PowerSeries::rho_nsq(center)
        }
        "neg_n_over_ln_n" => {
            arity(&head, &args, 1..=1)?;
            PowerSeries::from_law(center, TailLaw::NegNOverLnN)
        }
        "affine" => {
            arity(&head, &args, 2..=2)?;
            let c = parse_rational(&args[1]).map_err(|e| e.to_string())?;
            PowerSeries::from_law(center, TailLaw::Affine(c))
        }
        "coeffs" => {
            let cs = args[1..].iter().map(|a| env.scalar(a, cap)).collect::<Result<Vec<_>, _>>()?;
            PowerSeries::polynomial(center, cs)
        }
        _ => return Err(format!("unknown series law '{head}'")),
    };
    Ok(s.with_cap(cap))
}

fn build_func(env: &Env, body: &str, cap: Rational) -> Result<GenFunction, String> {
    if body == "ks_net" {
        return Ok(GenFunction::ks_net());
    }
    match call(body) {
        Some((head, args)) if head == "kernel" => {
            arity(&head, &args, 3..=3)?;
            let order: u32 = args[2].parse().map_err(|_| format!("bad kernel order '{}'", args[2]))?;
            Ok(GenFunction::kernel(env.func(&args[0], cap)?, env.scalar(&args[1], cap)?, order))
        }
        Some((head, args)) if head == "series" => {
            arity(&head, &args, 1..=2)?;
            let schedule = match args.get(1).map(String::as_str) {
                None | Some("ceil") => Schedule::CeilLogInverse,
                Some("floor") => Schedule::FloorLogInverse,
                Some(n) => Schedule::Fixed(n.parse().map_err(|_| format!("bad schedule '{n}'"))?),
            };
            Ok(GenFunction::Series(TruncatedSeries {
                series: env.power_series(&args[0])?,
                schedule,
            }))
        }
        Some((head, args)) if head == "exp_trunc" => {
            arity(&head, &args, 1..=1)?;
            Ok(truncated_exp(args[0].parse().map_err(|_| format!("bad degree '{}'", args[0]))?))
        }
        _ => env.func(body, cap),
    }
}

fn build_path(env: &Env, body: &str, cap: Rational) -> Result<GenPath, String> {
    let (head, args) = call(body).ok_or_else(|| format!("'{body}' is not shape(args)"))?;
    let sc = |a: &String| env.scalar(a, cap);
    let ce = |e: ContourError| e.to_string();
    match head.as_str() {
        "circle" => {
            arity(&head, &args, 2..=3)?;
            let c = GenPath::circle(sc(&args[0])?, sc(&args[1])?).map_err(ce)?;
            match args.get(2).map(String::as_str) {
                None | Some("+") => Ok(c),
                Some("-") => Ok(c.reversed()),
                Some(o) => Err(format!("orientation must be + or -, got '{o}'")),
            }
        }
        "square" => {
            arity(&head, &args, 2..=2)?;
            GenPath::square(&sc(&args[0])?, &sc(&args[1])?).map_err(ce)
        }
        "polyline" | "closed" => {
            let v = args.iter().map(sc).collect::<Result<Vec<_>, _>>()?;
            GenPath::polyline(v, head == "closed").map_err(ce)
        }
        _ => Err(format!("unknown path shape '{head}'")),
    }
}

/// Evaluates the declarations in order.
pub fn build_env(doc: &ScenarioDoc, cap: Rational) -> Result<Env, ScenarioError> {
    let mut env = Env::default();
    for d in &doc.declarations {
        if env.has(&d.name) || ["i", "rho", "z", "zbar"].contains(&d.name.as_str()) {
            return perr(d.line, format!("'{}' is already declared or reserved", d.name));
        }
        let res = match d.kind.as_str() {
            "scalar" => env.scalar(&d.body, cap).map(|x| {
                env.scalars.insert(d.name.clone(), x);
            }),
            "set" => build_set(&env, &d.body, cap).map(|x| {
                env.sets.insert(d.name.clone(), x);
            }),
            "func" => build_func(&env, &d.body, cap).map(|x| {
                env.funcs.insert(d.name.clone(), x);
            }),
            "series" => build_series(&env, &d.body, cap).map(|x| {
                env.series.insert(d.name.clone(), x);
            }),
            "path" => build_path(&env, &d.body, cap).map(|x| {
                env.paths.insert(d.name.clone(), x);
            }),
            k => Err(format!("unknown declaration kind '{k}'")),
        };
        if let Err(msg) = res {
            return perr(d.line, msg);
        }
    }
    Ok(env)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub op: String,
    pub inputs: Vec<String>,
    pub expected: String,
    pub actual: String,
    pub verdict: Verdict,
    pub evidence: BTreeMap<String, Value>,
    /// Wall time; recorded only when timing is requested.
    pub ms: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub version: String,
    pub config: ConfigSnapshot,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.summary.passed == self.summary.total
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        let _ = writeln!(out, "colombeau {}  cap={} grid={} nodes={}", self.version, c.cap, c.grid, c.nodes);
        let w = self.checks.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
        let _ = writeln!(out, "{:<6} {:<w$}  {:<16} {:<24} actual", "", "check", "op", "expected");
        for r in &self.checks {
            let v = match r.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::Error => "ERROR",
            };
            let _ = write!(out, "{v:<6} {:<w$}  {:<16} {:<24} {}", r.name, r.op, r.expected, r.actual);
            if let Some(ms) = r.ms {
                let _ = write!(out, "  ({ms} ms)");
            }
            out.push('\n');
            if r.verdict != Verdict::Pass {
                for (k, val) in &r.evidence {
                    let _ = writeln!(out, "{:<6}   {k}: {val}", "");
                }
            }
        }
        let s = &self.summary;
        let _ = writeln!(out, "{} checks: {} passed, {} failed, {} errors", s.total, s.passed, s.failed, s.errors);
        out
    }
}

/// A check error: a kind for `error(Kind)` expectations and a message.
struct CheckError {
    kind: String,
    msg: String,
}

impl From<String> for CheckError {
    fn from(msg: String) -> Self {
        CheckError {
            kind: "Invalid".into(),
            msg,
        }
    }
}

impl From<ContourError> for CheckError {
    fn from(e: ContourError) -> Self {
        let kind = match &e {
            ContourError::InvalidPath(_) => "InvalidPath",
            ContourError::OutOfParameter(_) => "OutOfParameter",
            ContourError::DomainViolation(_) => "DomainViolation",
            ContourError::QuadratureUnstable { .. } => "QuadratureUnstable",
            ContourError::PointNotWellInside(_) => "PointNotWellInside",
            ContourError::HomotopyLeavesDomain { .. } => "HomotopyLeavesDomain",
            ContourError::NotHolomorphic(_) => "NotHolomorphic",
            ContourError::Unsupported(_) => "Unsupported",
            ContourError::Func(_) => "Func",
            ContourError::Net(_) => "Net",
        };
        CheckError {
            kind: kind.into(),
            msg: e.to_string(),
        }
    }
}

struct Outcome {
    pass: bool,
    actual: String,
    evidence: BTreeMap<String, Value>,
}

fn outcome(pass: bool, actual: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        actual: actual.into(),
        evidence: BTreeMap::new(),
    }
}

impl Outcome {
    fn with(mut self, k: &str, v: Value) -> Self {
        self.evidence.insert(k.into(), v);
        self
    }
}

fn word(pass_word: &str, expected: &str) -> Outcome {
    outcome(pass_word == expected, pass_word)
}

/// `x` or `x +- tol`.
fn number_expectation(expected: &str, default_tol: f64) -> Result<(f64, f64), String> {
    let (v, tol) = match expected.split_once("+-") {
        Some((v, t)) => (v.trim(), t.trim().parse::<f64>().map_err(|_| format!("bad tolerance '{t}'"))?),
        None => (expected, default_tol),
    };
    let x = match v {
        "inf" => f64::INFINITY,
        _ => match v.strip_prefix("e^") {
            Some(e) => e.parse::<f64>().map_err(|_| format!("bad number '{v}'"))?.exp(),
            None => v.parse::<f64>().map_err(|_| format!("bad number '{v}'"))?,
        },
    };
    Ok((x, tol))
}

fn close(actual: f64, want: f64, tol: f64) -> bool {
    if want.is_infinite() {
        return actual == want;
    }
    (actual - want).abs() <= tol
}

fn mode_arg(arg: Option<&String>, nodes: usize) -> Result<Mode, String> {
    match arg.map(String::as_str) {
        None | Some("quad") => Ok(Mode::Quadrature(nodes)),
        Some("exact") => Ok(Mode::Exact),
        Some(m) => Err(format!("mode must be exact or quad, got '{m}'")),
    }
}

fn sharp_radius(s: &str) -> Result<f64, String> {
    s.parse::<f64>().map_err(|_| format!("sharp radius '{s}' is not a number"))
}

/// Compares a computed value with an expected scalar: exact values
/// symbolically, sampled ones through the residual against the magnitude.
fn value_matches(
    v: &GenValue,
    magnitude: Option<&contour::Quadrature>,
    want: &AsymptoticScalar,
    rc: &RunConfig,
) -> Outcome {
    match v {
        GenValue::Exact { value, .. } => {
            let d = value - want;
            outcome(d.is_negligible() || value.approx_eq(want), value.to_string())
        }
        GenValue::Sampled { net, error_estimate } => {
            let exact = SampledNet::from_scalar(want, &rc.grid);
            let (res, worst) = match magnitude {
                Some(q) => q.residual(&exact),
                None => (SampledNet::difference(net, &exact, contour::RESIDUAL_TOLERANCE), f64::NAN),
            };
            let class = res.classify(&rc.oracle);
            outcome(class == NetClass::Negligible, v.describe())
                .with("residual_class", json!(class.to_string()))
                .with("worst_relative_residual", json!(worst))
                .with("node_doubling_estimate", json!(error_estimate))
        }
    }
}

fn run_check(env: &Env, spec: &CheckSpec, rc: &RunConfig) -> Result<Outcome, CheckError> {
    let (g, cfg, cap) = (&rc.grid, &rc.oracle, rc.cap);
    let a = &spec.args;
    let ex = spec.expected.as_str();
    let need = |n: std::ops::RangeInclusive<usize>| arity(&spec.op, a, n);
    let sc = |i: usize| env.scalar(&a[i], cap);
    let scalar_expect = || env.scalar(ex, cap);
    let k_arg = |i: usize| a[i].parse::<u32>().map_err(|_| format!("order '{}' is not a non-negative integer", a[i]));
    let out = match spec.op.as_str() {
        "compare" => {
            need(2..=2)?;
            let c = sc(0)?.compare(&sc(1)?);
            word(&c.to_string(), ex)
        }
        "equals" => {
            need(2..=2)?;
            let eq = sc(0)?.approx_eq(&sc(1)?);
            word(if eq { "true" } else { "false" }, ex)
        }
        "valuation" => {
            need(1..=1)?;
            let actual = match sc(0)?.valuation() {
                ExtendedValuation::Exact(v) => v.to_string(),
                ExtendedValuation::AtLeast(v) => format!(">= {v}"),
                ExtendedValuation::Infinite => "inf".to_string(),
            };
            let pass = actual == ex || parse_rational(ex).map(|r| r.to_string() == actual).unwrap_or(false);
            outcome(pass, actual)
        }
        "invert" => {
            need(1..=1)?;
            let x = sc(0)?;
            match x.invert() {
                Ok(inv) => {
                    let residual = &(&x * &inv) - &AsymptoticScalar::one().with_cap(cap);
                    let pass = if ex == "not_invertible" {
                        false
                    } else {
                        let want = scalar_expect()?;
                        residual.is_negligible() && (&inv - &want).is_negligible()
                    };
                    outcome(pass, inv.to_string()).with("residual", json!(residual.to_string()))
                }
                Err(e) => outcome(ex == "not_invertible", "not_invertible").with("reason", json!(e.to_string())),
            }
        }
        "estimate" => {
            need(1..=1)?;
            let x = sc(0)?;
            let net = SampledNet::from_scalar(&x, g);
            let (want, tol) = number_expectation(ex, 0.05)?;
            match net.estimate_valuation(cfg.window) {
                Ok(e) => outcome(close(e.slope, want, tol), format!("{:.6}", e.slope))
                    .with("slope", json!(e.slope))
                    .with("stderr", json!(e.stderr)),
                Err(e) => outcome(want.is_infinite(), "inf").with("oracle", json!(e.to_string())),
            }
        }
        "member" => {
            need(2..=2)?;
            let m = sets::contains(&env.set(&a[0])?, &sc(1)?, g, cfg);
            word(
                match m {
                    Membership::Yes => "yes",
                    Membership::No => "no",
                    Membership::Undecided => "undecided",
                },
                ex,
            )
        }
        "bounded" => {
            need(1..=1)?;
            match sets::is_sharply_bounded(&env.set(&a[0])?, g, cfg) {
                Ok(m) => word("yes", ex).with("exponent", json!(m)),
                Err(e) => word("no", ex).with("reason", json!(e.to_string())),
            }
        }
        "margin" => {
            need(2..=2)?;
            match sets::neighborhood_margin(&env.set(&a[0])?, &env.set(&a[1])?, g, cfg) {
                Ok(m) => word(&m.to_string(), ex),
                Err(SetError::NotNeighborhood) => word("none", ex),
                Err(e) => return Err(CheckError {
                    kind: "SetError".into(),
                    msg: e.to_string(),
                }),
            }
        }
        "holomorphic" => {
            need(2..=2)?;
            match env.func(&a[0], cap)?.dbar_test(&Domain::Set(env.set(&a[1])?), g, cfg) {
                Holomorphy::Holomorphic => word("yes", ex),
                Holomorphy::NotHolomorphic { witness } => word("no", ex).with("witness", json!(witness)),
            }
        }
        "ginfty" => {
            need(2..=3)?;
            let k_max = if a.len() == 3 { k_arg(2)? } else { 12 };
            match env.func(&a[0], cap)?.is_ginfty(&env.set(&a[1])?, k_max, g, cfg) {
                GinftyVerdict::Yes(n) => word("yes", ex).with("exponent", json!(n)),
                GinftyVerdict::No { witness_order, reason } => word("no", ex)
                    .with("witness_order", json!(witness_order))
                    .with("reason", json!(reason)),
            }
        }
        "invertible" => {
            need(2..=2)?;
            match sets::invertibility_on_set(&env.func(&a[0], cap)?, &env.set(&a[1])?, g, cfg) {
                Invertibility::Invertible { n, .. } => word("yes", ex).with("n", json!(n)),
                Invertibility::NotInvertible { witness, value } => word("no", ex)
                    .with("witness", json!(witness.to_string()))
                    .with("value", json!(value)),
            }
        }
        "radius" => {
            need(1..=1)?;
            let r = convergence_radius(&env.power_series(&a[0])?);
            let (want, tol) = number_expectation(ex, 1e-9)?;
            let tol = if want.is_finite() { tol * want.abs().max(1.0) } else { tol };
            let actual = if r.radius.is_infinite() { "inf".to_string() } else { format!("{}", r.radius) };
            outcome(close(r.radius, want, tol), actual).with("method", json!(format!("{:?}", r.method)))
        }
        "sum" => {
            need(2..=2)?;
            let s = env.power_series(&a[0])?;
            match sum_at(&s, &sc(1)?, cap) {
                Ok(v) => {
                    let pass = ex != "diverges" && (&v.value - &scalar_expect()?).is_negligible();
                    outcome(pass, v.value.to_string())
                        .with("terms_used", json!(v.terms_used))
                        .with("error_bound", json!(v.error_bound))
                }
                Err(AnalyticError::NotInRadius { norm, radius, .. }) => outcome(ex == "diverges", "diverges")
                    .with("norm", json!(norm))
                    .with("radius", json!(radius)),
                Err(e) => return Err(CheckError {
                    kind: "AnalyticError".into(),
                    msg: e.to_string(),
                }),
            }
        }
        "integral" => {
            need(2..=3)?;
            let (u, p) = (env.func(&a[0], cap)?, env.path(&a[1])?);
            match mode_arg(a.get(2), rc.nodes)? {
                Mode::Exact => {
                    let v = contour::path_integral(&u, &p, Mode::Exact, g, cfg)?;
                    value_matches(&v, None, &scalar_expect()?, rc)
                }
                Mode::Quadrature(m) => {
                    let q = contour::path_integral_quadrature(&u, &p, m, g, cfg)?;
                    value_matches(&q.clone().into_value(), Some(&q), &scalar_expect()?, rc)
                }
            }
        }
        "cauchy" => {
            need(5..=6)?;
            let u = env.func(&a[0], cap)?;
            let (c, r, z, k) = (sc(1)?, sc(2)?, sc(3)?, k_arg(4)?);
            match mode_arg(a.get(5), rc.nodes)? {
                Mode::Exact => {
                    let v = contour::cauchy_integral(&u, &c, &r, &z, k, Mode::Exact, g, cfg)?;
                    value_matches(&v, None, &scalar_expect()?, rc)
                }
                Mode::Quadrature(m) => {
                    let q = contour::cauchy_integral_quadrature(&u, &c, &r, &z, k, m, g)?;
                    value_matches(&q.clone().into_value(), Some(&q), &scalar_expect()?, rc)
                }
            }
        }
        "homotopy" => {
            need(3..=4)?;
            let u = env.func(&a[0], cap)?;
            let h = ConvexHomotopy::new(env.path(&a[1])?, env.path(&a[2])?)?;
            match contour::homotopy_invariance_check(&u, &h, mode_arg(a.get(3), rc.nodes)?, g, cfg) {
                Ok(r) => {
                    let v = match r.verdict {
                        HomotopyVerdict::Equal => "equal",
                        HomotopyVerdict::Different => "different",
                    };
                    word(v, ex)
                        .with("integral_from", json!(r.integral_from))
                        .with("integral_to", json!(r.integral_to))
                        .with("difference", json!(r.difference))
                }
                Err(ContourError::HomotopyLeavesDomain { t, s, eps }) => word("leaves_domain", ex)
                    .with("t", json!(t))
                    .with("s", json!(s))
                    .with("eps", json!(eps)),
                Err(e) => return Err(e.into()),
            }
        }
        "cauchy_estimate" => {
            need(5..=6)?;
            let u = env.func(&a[0], cap)?;
            let (c, r, z, k) = (sc(1)?, sc(2)?, sc(3)?, k_arg(4)?);
            let scale: f64 = match a.get(5) {
                Some(s) => s.parse().map_err(|_| format!("bad lhs scale '{s}'"))?,
                None => 1.0,
            };
            let (lhs, rhs) = contour::cauchy_estimate_sides(&u, &c, &r, &z, k, g)?;
            let lhs = lhs.into_iter().map(|x| x * scale).collect();
            let rep = contour::estimate_verdict(lhs, rhs, g, cfg.window);
            let worst = rep
                .lhs
                .iter()
                .zip(&rep.rhs)
                .skip(rep.lhs.len().saturating_sub(cfg.window))
                .map(|(l, r)| if *r > 0.0 { l / r } else if *l > 0.0 { f64::INFINITY } else { 0.0 })
                .fold(0.0, f64::max);
            word(if rep.holds { "holds" } else { "violated" }, ex)
                .with("max_ratio", json!(worst))
                .with("violation_eps", json!(rep.violation))
        }
        "unicity" => {
            need(3..=64)?;
            let u = env.func(&a[0], cap)?;
            let ball = SharpBall::new(sc(1)?, sharp_radius(&a[2])?).map_err(|e| e.to_string())?;
            let zeros = (3..a.len()).map(sc).collect::<Result<Vec<_>, _>>()?;
            let r = unicity_check(&u, &ball, &zeros, g, cfg);
            let v = match &r.verdict {
                UnicityVerdict::IdenticallyZero { .. } => "zero",
                UnicityVerdict::NonZeroAt { .. } => "nonzero",
                UnicityVerdict::HypothesisFails(_) => "hypothesis_fails",
                UnicityVerdict::NotApplicable(_) => "not_applicable",
            };
            word(v, ex)
                .with("hypothesis", json!(r.hypothesis.reason))
                .with("negligible_orders", json!(r.levels.iter().filter(|l| l.negligible).count()))
        }
        "characterize" => {
            need(3..=3)?;
            let u = env.func(&a[0], cap)?;
            let ball = SharpBall::new(sc(1)?, sharp_radius(&a[2])?).map_err(|e| e.to_string())?;
            let r = characterization_suite(&u, &ball, g, cfg);
            let holds: Vec<bool> = r.conditions.iter().map(|c| c.holds).collect();
            word(if r.all_hold() { "holds" } else { "fails" }, ex)
                .with("conditions", json!(holds))
                .with("agree", json!(r.all_agree()))
        }
        "growth" => {
            need(3..=4)?;
            let u = env.func(&a[0], cap)?;
            let claim = match a[1].as_str() {
                "bounded" => GrowthClaim::Bounded(sc(2)?),
                "poly" => {
                    need(4..=4)?;
                    GrowthClaim::PolyGrowth(sc(2)?, k_arg(3)?)
                }
                c => return Err(format!("growth claim must be bounded or poly, got '{c}'").into()),
            };
            let r = entire_growth_analysis(&u, &claim, g, cfg).map_err(|m| CheckError {
                kind: "GrowthError".into(),
                msg: m,
            })?;
            let v = match &r.verdict {
                GrowthVerdict::Constant { .. } => "constant",
                GrowthVerdict::Polynomial { .. } => "polynomial",
                GrowthVerdict::ClaimViolated { .. } => "violated",
                GrowthVerdict::Inconsistent { .. } => "inconsistent",
            };
            word(v, ex).with("detail", serde_json::to_value(&r.verdict).unwrap_or(Value::Null))
        }
        op => return Err(format!("unknown operation '{op}'").into()),
    };
    Ok(out)
}

/// Runs every check in declaration order. Configuration precedence is
/// `flags` over the scenario header over the defaults.
pub fn run_scenario(doc: &ScenarioDoc, flags: &ConfigOverrides, timing: bool) -> Result<Report, ScenarioError> {
    let rc = RunConfig::resolve(&flags.over(&doc.header))?;
    let env = build_env(doc, rc.cap)?;
    let mut checks = Vec::with_capacity(doc.checks.len());
    for spec in &doc.checks {
        let start = Instant::now();
        let result = run_check(&env, spec, &rc);
        let ms = timing.then(|| start.elapsed().as_millis() as u64);
        let wanted_error = spec
            .expected
            .strip_prefix("error(")
            .and_then(|s| s.strip_suffix(')'))
            .map(str::trim);
        let (verdict, actual, evidence) = match result {
            Ok(o) => {
                let v = if o.pass && wanted_error.is_none() { Verdict::Pass } else { Verdict::Fail };
                (v, o.actual, o.evidence)
            }
            Err(e) => {
                let v = if wanted_error == Some(e.kind.as_str()) { Verdict::Pass } else { Verdict::Error };
                let mut ev = BTreeMap::new();
                ev.insert("error".to_string(), json!(e.msg));
                (v, format!("error({})", e.kind), ev)
            }
        };
        checks.push(CheckRecord {
            name: spec.name.clone(),
            op: spec.op.clone(),
            inputs: spec.args.clone(),
            expected: spec.expected.clone(),
            actual,
            verdict,
            evidence,
            ms,
        });
    }
    let count = |v: Verdict| checks.iter().filter(|c| c.verdict == v).count();
    let summary = Summary {
        total: checks.len(),
        passed: count(Verdict::Pass),
        failed: count(Verdict::Fail),
        errors: count(Verdict::Error),
    };
    Ok(Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: rc.snapshot(),
        checks,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# sample
config cap=24 grid=8:40
DECLARE
scalar a = 1 + rho
set D = disc(0, 1)
func u = poly(z^2)
path C = circle(0, 1)
CHECK
cmp: compare(a, 1) => >>
d1: cauchy(u, 0, 1, rho, 1, exact) => 2*rho
far: cauchy(u, 0, 1, 2, 0, exact) => error(PointNotWellInside)
";

    #[test]
    fn parses_sections() {
        let doc = parse_scenario(SAMPLE).unwrap();
        assert_eq!(doc.header.grid, Some((8, 40)));
        assert_eq!(doc.declarations.len(), 4);
        assert_eq!(doc.checks[1].args, vec!["u", "0", "1", "rho", "1", "exact"]);
    }

    #[test]
    fn runs_and_reports() {
        let doc = parse_scenario(SAMPLE).unwrap();
        let r = run_scenario(&doc, &ConfigOverrides::default(), false).unwrap();
        assert_eq!(r.summary.passed, 3, "{}", r.to_human());
        assert_eq!(r.exit_code(), 0);
        assert_eq!(r.config.grid, "8:40");
        let flags = ConfigOverrides {
            grid: Some((8, 44)),
            ..Default::default()
        };
        assert_eq!(run_scenario(&doc, &flags, false).unwrap().config.grid, "8:44");
    }

    #[test]
    fn parse_failures() {
        assert!(parse_scenario("CHECK\nx compare(a, b) => <<").is_err());
        assert!(parse_scenario("DECLARE\nscalar a 1").is_err());
        let doc = parse_scenario("DECLARE\nscalar b = a + 1\nscalar a = 1").unwrap();
        assert!(matches!(build_env(&doc, default_cap()), Err(ScenarioError::Parse { line: 2, .. })));
    }

    #[test]
    fn empty_scenario() {
        let r = run_scenario(&ScenarioDoc::default(), &ConfigOverrides::default(), false).unwrap();
        assert_eq!(r.summary.total, 0);
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn splits_nested_args() {
        assert_eq!(split_args("a, f(b, c), d"), vec!["a", "f(b, c)", "d"]);
        assert!(split_args("").is_empty());
    }

    #[test]
    fn complex_literal_in_checks() {
        let doc = parse_scenario("CHECK\nx: equals(i*i, -1) => true").unwrap();
        let r = run_scenario(&doc, &ConfigOverrides::default(), false).unwrap();
        assert!(r.all_passed(), "{}", r.to_human());
    }
}
