//! Generalized paths and contour integrals.
//!
//! Paths are parametrized on `[0,1]`. Integrals are computed either in
//! closed form for polynomial integrands on circles and polylines, or per
//! `ε` by quadrature: the trapezoid rule on circles and composite
//! Gauss–Legendre panels elsewhere.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::func::{binomial, factorial, FuncError, Frozen, GenFunction, GenValue, Poly, DBAR_FLOOR, DBAR_STEP};
use crate::net::{EpsGrid, NetClass, NetError, NetPoint, OracleConfig, SampledNet};
use crate::scalar::{AsymptoticScalar, Comparison, GenComplex, Rational};

/// Default number of quadrature nodes.
pub const DEFAULT_NODES: usize = 512;
/// Relative node-doubling discrepancy above which quadrature is refused.
pub const UNSTABLE_THRESHOLD: f64 = 1e-6;
/// Relative tolerance for reading a quadrature residual as zero.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
/// Tolerance factor of the Cauchy estimate check.
pub const ESTIMATE_SLACK: f64 = 1.0 + 1e-9;
/// Points per `ε` for domain and homotopy sampling.
const PATH_SAMPLES: usize = 256;
const GAUSS_ORDER: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContourError {
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("parameter {0} outside [0,1]")]
    OutOfParameter(String),
    #[error("path leaves the domain: {0}")]
    DomainViolation(String),
    #[error("quadrature unstable: node-doubling discrepancy {estimate:e}")]
    QuadratureUnstable { estimate: f64 },
    #[error("point is not well inside the circle: {0}")]
    PointNotWellInside(String),
    #[error("homotopy leaves the domain near t = {t:.6}, s = {s:.6} at eps = {eps:e}")]
    HomotopyLeavesDomain { t: f64, s: f64, eps: f64 },
    #[error("not holomorphic: {0}")]
    NotHolomorphic(String),
    #[error("unsupported in exact mode: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// Per-`ε` parametrization `t ↦ γ_ε(t)` with its derivative.
pub type PathFn = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub struct SampledPath {
    pub label: String,
    pub gamma: PathFn,
    pub dgamma: PathFn,
    /// Interior break points of the piecewise-C¹ parametrization.
    pub breaks: Vec<f64>,
    pub closed: bool,
}

impl fmt::Debug for SampledPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SampledPath({})", self.label)
    }
}

#[derive(Debug, Clone)]
pub enum GenPath {
    Circle {
        center: GenComplex,
        radius: AsymptoticScalar,
        orientation: i8,
    },
    Polyline {
        vertices: Vec<GenComplex>,
        closed: bool,
    },
    Sampled(SampledPath),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    Exact,
    Quadrature(usize),
}

impl Default for Mode {
    fn default() -> Self {
        Mode::Quadrature(DEFAULT_NODES)
    }
}

impl fmt::Display for GenPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenPath::Circle { center, radius, orientation } => {
                let o = if *orientation > 0 { "+" } else { "-" };
                write!(f, "circle({center}, {radius}, {o})")
            }
            GenPath::Polyline { vertices, closed } => {
                let v: Vec<String> = vertices.iter().map(|v| v.to_string()).collect();
                let kind = if *closed { "closed polyline" } else { "polyline" };
                write!(f, "{kind}[{}]", v.join(", "))
            }
            GenPath::Sampled(s) => f.write_str(&s.label),
        }
    }
}

impl GenPath {
    pub fn circle(center: GenComplex, radius: AsymptoticScalar) -> Result<Self, ContourError> {
        if !radius.is_real() || !radius.is_strictly_positive() {
            return Err(ContourError::InvalidPath(format!("radius {radius} is not real and >> 0")));
        }
        Ok(GenPath::Circle {
            center,
            radius,
            orientation: 1,
        })
    }

    pub fn polyline(vertices: Vec<GenComplex>, closed: bool) -> Result<Self, ContourError> {
        if vertices.len() < 2 {
            return Err(ContourError::InvalidPath("a polyline needs at least 2 vertices".into()));
        }
        Ok(GenPath::Polyline { vertices, closed })
    }

    /// Closed axis-parallel square with centre `c` and half-side `h`,
    /// positively oriented.
    pub fn square(c: &GenComplex, h: &AsymptoticScalar) -> Result<Self, ContourError> {
        let ih = h.scale(Complex64::i());
        let v = vec![c + &(h - &ih), c + &(h + &ih), c + &(&ih - h), &(c - h) - &ih];
        Self::polyline(v, true)
    }

    pub fn sampled<G, D>(label: impl Into<String>, gamma: G, dgamma: D, breaks: Vec<f64>, closed: bool) -> Self
    where
        G: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
        D: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        GenPath::Sampled(SampledPath {
            label: label.into(),
            gamma: Arc::new(gamma),
            dgamma: Arc::new(dgamma),
            breaks,
            closed,
        })
    }

    pub fn is_closed(&self) -> bool {
        match self {
            GenPath::Circle { .. } => true,
            GenPath::Polyline { closed, .. } => *closed,
            GenPath::Sampled(s) => s.closed,
        }
    }

    pub fn reversed(&self) -> Self {
        match self {
            GenPath::Circle { center, radius, orientation } => GenPath::Circle {
                center: center.clone(),
                radius: radius.clone(),
                orientation: -orientation,
            },
            GenPath::Polyline { vertices, closed } => {
                let mut v = vertices.clone();
                if *closed {
                    // keep the start point, traverse the other way
                    v[1..].reverse();
                } else {
                    v.reverse();
                }
                GenPath::Polyline { vertices: v, closed: *closed }
            }
            GenPath::Sampled(s) => {
                let g = s.gamma.clone();
                let dg = s.dgamma.clone();
                GenPath::Sampled(SampledPath {
                    label: format!("reversed {}", s.label),
                    gamma: Arc::new(move |e, t| g(e, 1.0 - t)),
                    dgamma: Arc::new(move |e, t| -dg(e, 1.0 - t)),
                    breaks: s.breaks.iter().rev().map(|b| 1.0 - b).collect(),
                    closed: s.closed,
                })
            }
        }
    }

    fn segments(vertices: &[GenComplex], closed: bool) -> Vec<(GenComplex, GenComplex)> {
        let mut segs: Vec<_> = vertices.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
        if closed {
            segs.push((vertices[vertices.len() - 1].clone(), vertices[0].clone()));
        }
        segs
    }

    pub fn freeze(&self, eps: f64) -> FrozenPath<'_> {
        match self {
            GenPath::Circle { center, radius, orientation } => FrozenPath::Circle {
                center: center.eval(eps),
                radius: radius.eval(eps).re,
                sign: f64::from(*orientation),
            },
            GenPath::Polyline { vertices, closed } => {
                let mut v: Vec<Complex64> = vertices.iter().map(|x| x.eval(eps)).collect();
                if *closed {
                    v.push(v[0]);
                }
                FrozenPath::Polyline(v)
            }
            GenPath::Sampled(s) => FrozenPath::Sampled { path: s, eps },
        }
    }
}

/// A path at one `ε`.
pub enum FrozenPath<'a> {
    Circle { center: Complex64, radius: f64, sign: f64 },
    /// Vertices with the closing vertex repeated for closed paths.
    Polyline(Vec<Complex64>),
    Sampled { path: &'a SampledPath, eps: f64 },
}

impl FrozenPath<'_> {
    pub fn point(&self, t: f64) -> Complex64 {
        match self {
            FrozenPath::Circle { center, radius, sign } => center + Complex64::from_polar(*radius, sign * TAU * t),
            FrozenPath::Polyline(v) => {
                let n = v.len() - 1;
                let s = (t * n as f64).clamp(0.0, n as f64);
                let k = (s.floor() as usize).min(n - 1);
                v[k] + (v[k + 1] - v[k]) * (s - k as f64)
            }
            FrozenPath::Sampled { path, eps } => (path.gamma)(*eps, t),
        }
    }

    fn sample(&self, n: usize) -> Vec<Complex64> {
        (0..=n).map(|j| self.point(j as f64 / n as f64)).collect()
    }

    /// `(∫ f dz, ∫ |f| |dz|)` with `nodes` quadrature nodes; `None` when
    /// `f` has no value somewhere.
    fn integrate(&self, f: &dyn Fn(Complex64) -> Option<Complex64>, nodes: usize) -> Option<(Complex64, f64)> {
        let mut sum = Complex64::zero();
        let mut mag = 0.0;
        match self {
            FrozenPath::Circle { center, radius, sign } => {
                let h = TAU / nodes as f64;
                for j in 0..nodes {
                    let w = Complex64::from_polar(1.0, sign * h * j as f64);
                    let dz = Complex64::i() * sign * radius * w * h;
                    let v = f(center + w * radius)? * dz;
                    sum += v;
                    mag += v.norm();
                }
            }
            FrozenPath::Polyline(v) => {
                let nseg = v.len() - 1;
                let panels = (nodes / (GAUSS_ORDER * nseg)).max(1);
                for k in 0..nseg {
                    let d = v[k + 1] - v[k];
                    for_each_gauss_node(panels, |t, w| {
                        let x = f(v[k] + d * t)? * d * w;
                        sum += x;
                        mag += x.norm();
                        Some(())
                    })?;
                }
            }
            FrozenPath::Sampled { path, eps } => {
                let mut cuts = vec![0.0];
                cuts.extend(path.breaks.iter().copied().filter(|b| *b > 0.0 && *b < 1.0));
                cuts.push(1.0);
                let panels = (nodes / (GAUSS_ORDER * (cuts.len() - 1))).max(1);
                for c in cuts.windows(2) {
                    let len = c[1] - c[0];
                    for_each_gauss_node(panels, |t, w| {
                        let s = c[0] + len * t;
                        let x = f((path.gamma)(*eps, s))? * (path.dgamma)(*eps, s) * (w * len);
                        sum += x;
                        mag += x.norm();
                        Some(())
                    })?;
                }
            }
        }
        Some((sum, mag))
    }
}

/// Gauss–Legendre nodes and weights on `[0,1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out
}

fn for_each_gauss_node(panels: usize, mut g: impl FnMut(f64, f64) -> Option<()>) -> Option<()> {
    let rule = gauss_legendre(GAUSS_ORDER);
    let h = 1.0 / panels as f64;
    for p in 0..panels {
        for &(x, w) in &rule {
            g(h * (p as f64 + x), w * h)?;
        }
    }
    Some(())
}

fn is_unit_param(t: &AsymptoticScalar) -> bool {
    t.is_real() && t.ge_approx(&AsymptoticScalar::zero()) && AsymptoticScalar::one().ge_approx(t)
}

/// `γ(t̃)`: symbolic for circles and polylines, per `ε` for sampled paths.
pub fn path_eval(path: &GenPath, t: &AsymptoticScalar, grid: &EpsGrid) -> Result<GenValue, ContourError> {
    if !is_unit_param(t) {
        return Err(ContourError::OutOfParameter(t.to_string()));
    }
    match path {
        GenPath::Circle { center, radius, orientation } => {
            let phase = t
                .scale(Complex64::new(0.0, TAU * f64::from(*orientation)))
                .exp()
                .map_err(|e| ContourError::OutOfParameter(e.to_string()))?;
            Ok(GenValue::exact(center + &(radius * &phase)))
        }
        GenPath::Polyline { vertices, closed } => {
            let segs = GenPath::segments(vertices, *closed);
            let n = segs.len();
            let s = t.scale(Complex64::new(n as f64, 0.0));
            let s0 = s.coeff(Rational::from_integer(0)).re;
            let mut k = (s0.floor().max(0.0) as usize).min(n - 1);
            let before = &s - &AsymptoticScalar::real(k as f64);
            if k > 0 && before.compare(&AsymptoticScalar::zero()) == Comparison::MuchLess {
                k -= 1;
            }
            let local = &s - &AsymptoticScalar::real(k as f64);
            let (a, b) = &segs[k];
            Ok(GenValue::exact(a + &(&(b - a) * &local)))
        }
        GenPath::Sampled(sp) => {
            let net = SampledNet::sample(grid, format!("{}(t)", sp.label), |eps| {
                (sp.gamma)(eps, t.eval(eps).re)
            })?;
            Ok(GenValue::sampled(net))
        }
    }
}

/// Distance from `p` to the segment `[a, b]` and the minimizing parameter.
fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> (f64, f64) {
    let d = b - a;
    let len2 = d.norm_sqr();
    let s = if len2 == 0.0 {
        0.0
    } else {
        ((p - a) * d.conj()).re / len2
    }
    .clamp(0.0, 1.0);
    ((a + d * s - p).norm(), s)
}

/// Values below this fraction of the local scale are read as exact zeros.
const COINCIDENCE_FLOOR: f64 = 1e-12;

fn pole_distance_net(path: &GenPath, pole: &GenComplex, grid: &EpsGrid) -> Result<SampledNet, ContourError> {
    Ok(SampledNet::sample(grid, format!("distance of path to {pole}"), |eps| {
        let fp = path.freeze(eps);
        let p = pole.eval(eps);
        let d = match &fp {
            FrozenPath::Polyline(v) => v
                .windows(2)
                .map(|w| segment_distance(p, w[0], w[1]).0)
                .fold(f64::INFINITY, f64::min),
            FrozenPath::Circle { center, radius, .. } => ((p - center).norm() - radius).abs(),
            _ => fp.sample(PATH_SAMPLES).iter().map(|z| (z - p).norm()).fold(f64::INFINITY, f64::min),
        };
        let scale = fp.sample(8).iter().map(|z| z.norm()).fold(p.norm(), f64::max);
        Complex64::new(if d <= COINCIDENCE_FLOOR * scale { 0.0 } else { d }, 0.0)
    })?)
}

/// Sampled check that the image of `path` lies in the domain of `u`.
pub fn check_path_domain(u: &GenFunction, path: &GenPath, grid: &EpsGrid, cfg: &OracleConfig) -> Result<(), ContourError> {
    for pole in u.poles() {
        let net = pole_distance_net(path, &pole, grid)?;
        if !net.is_invertible(cfg) {
            return Err(ContourError::DomainViolation(format!(
                "{path} is not invertibly separated from the pole {pole}"
            )));
        }
    }
    if let Some(set) = u.declared_domain() {
        for eps in grid.tail(cfg.window).points() {
            let Ok(region) = set.concretize(eps) else { continue };
            let tol = COINCIDENCE_FLOOR * region.scale().max(1e-300);
            if let Some(z) = path.freeze(eps).sample(PATH_SAMPLES).into_iter().find(|z| region.distance(*z) > tol) {
                return Err(ContourError::DomainViolation(format!("{path} leaves {set} at {z} (eps = {eps:e})")));
            }
        }
    }
    Ok(())
}

/// A quadrature integral with its per-`ε` magnitude `∫|f||dz|` and the
/// node-doubling error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub net: SampledNet,
    pub magnitude: Vec<f64>,
    pub error_estimate: f64,
}

impl Quadrature {
    pub fn into_value(self) -> GenValue {
        GenValue::Sampled {
            net: self.net,
            error_estimate: Some(self.error_estimate),
        }
    }

    /// `self − exact` with entries below `RESIDUAL_TOLERANCE` of the
    /// magnitude set to zero; also returns the worst relative residual.
    pub fn residual(&self, exact: &SampledNet) -> (SampledNet, f64) {
        let mut worst = 0.0f64;
        let points = self
            .net
            .points
            .iter()
            .zip(&exact.points)
            .zip(&self.magnitude)
            .map(|((p, q), m)| {
                let d = p.value - q.value;
                let scale = m.max(q.value.norm());
                let rel = if scale > 0.0 { d.norm() / scale } else { d.norm() };
                worst = worst.max(rel);
                let v = if rel <= RESIDUAL_TOLERANCE { Complex64::zero() } else { d };
                NetPoint::from_value(p.eps, v)
            })
            .collect();
        let net = SampledNet {
            grid: self.net.grid,
            points,
            note: format!("residual of {}", self.net.note),
        };
        (net, worst)
    }
}

/// Per-`ε` quadrature of `∫_γ f_ε(z) dz` where `make(eps)` yields `f_ε`.
pub fn quadrature<'u, F>(path: &GenPath, nodes: usize, grid: &EpsGrid, label: &str, make: F) -> Result<Quadrature, ContourError>
where
    F: Fn(f64) -> Box<dyn Fn(Complex64) -> Option<Complex64> + 'u>,
{
    let mut magnitude = Vec::with_capacity(grid.len());
    let mut estimate = 0.0f64;
    let mut missing = false;
    let net = SampledNet::sample(grid, label.to_string(), |eps| {
        let fp = path.freeze(eps);
        let f = make(eps);
        match (fp.integrate(&*f, nodes), fp.integrate(&*f, 2 * nodes)) {
            (Some((a, m)), Some((b, _))) => {
                magnitude.push(m);
                if m > 0.0 {
                    estimate = estimate.max((a - b).norm() / m);
                }
                a
            }
            _ => {
                missing = true;
                magnitude.push(f64::NAN);
                Complex64::zero()
            }
        }
    })?;
    if missing {
        return Err(ContourError::Func(FuncError::Unsupported(format!("{label}: integrand has no value on the path"))));
    }
    if estimate > UNSTABLE_THRESHOLD {
        return Err(ContourError::QuadratureUnstable { estimate });
    }
    Ok(Quadrature {
        net,
        magnitude,
        error_estimate: estimate,
    })
}

fn frozen_integrand<'a>(u: &'a GenFunction, eps: f64) -> Box<dyn Fn(Complex64) -> Option<Complex64> + 'a> {
    let fr: Frozen<'a> = u.freeze(eps);
    Box::new(move |z| fr.value(z))
}

/// `∮ z^p z̄^q dz` over a circle, by the residue of the Laurent expansion
/// in `w = e^{iθ}`.
fn circle_monomial(c: &GenComplex, r: &AsymptoticScalar, p: u32, q: u32) -> AsymptoticScalar {
    let cc = c.conj();
    let mut acc = AsymptoticScalar::zero();
    for a in 0..=p {
        let b = a + 1;
        if b > q {
            break;
        }
        let k = binomial(p, a) * binomial(q, b) * TAU;
        let term = &(&c.powi(p - a) * &cc.powi(q - b)) * &r.powi(2 * a + 2);
        acc = &acc + &term.scale(Complex64::new(0.0, k));
    }
    acc
}

/// `∫_{[A,B]} z^p z̄^q dz`.
fn segment_monomial(a: &GenComplex, b: &GenComplex, p: u32, q: u32) -> AsymptoticScalar {
    let d = b - a;
    let (ac, dc) = (a.conj(), d.conj());
    let mut acc = AsymptoticScalar::zero();
    for i in 0..=p {
        for j in 0..=q {
            let k = binomial(p, i) * binomial(q, j) / f64::from(i + j + 1);
            let term = &(&(&a.powi(p - i) * &ac.powi(q - j)) * &d.powi(i + 1)) * &dc.powi(j);
            acc = &acc + &term.scale(Complex64::new(k, 0.0));
        }
    }
    acc
}

fn antiderivative(p: &Poly) -> Poly {
    Poly::from_terms(
        p.terms()
            .filter(|((_, q), _)| *q == 0)
            .map(|(&(n, _), c)| ((n + 1, 0), c.scale(Complex64::new(1.0 / f64::from(n + 1), 0.0)))),
    )
}

fn exact_poly_integral(p: &Poly, path: &GenPath) -> Result<AsymptoticScalar, ContourError> {
    match path {
        GenPath::Circle { center, radius, orientation } => {
            let mut acc = AsymptoticScalar::zero();
            for (&(a, b), c) in p.terms() {
                acc = &acc + &(c * &circle_monomial(center, radius, a, b));
            }
            Ok(if *orientation < 0 { -acc } else { acc })
        }
        GenPath::Polyline { vertices, closed } => {
            let hol = p.holomorphic_part();
            let rest = p.sub(&hol);
            let mut acc = AsymptoticScalar::zero();
            if !*closed {
                let f = antiderivative(&hol);
                acc = &f.eval(&vertices[vertices.len() - 1]) - &f.eval(&vertices[0]);
            }
            if !rest.is_zero() {
                // each segment in a canonical direction so that reversal
                // negates term by term
                let mut parts: Vec<(String, AsymptoticScalar)> = GenPath::segments(vertices, *closed)
                    .iter()
                    .map(|(a, b)| {
                        let (ka, kb) = (a.to_string(), b.to_string());
                        let (x, y, sign) = if ka <= kb { (a, b, 1.0) } else { (b, a, -1.0) };
                        let mut s = AsymptoticScalar::zero();
                        for (&(i, j), c) in rest.terms() {
                            s = &s + &(c * &segment_monomial(x, y, i, j));
                        }
                        (format!("{}|{}", ka.clone().min(kb.clone()), ka.max(kb)), s.scale(Complex64::new(sign, 0.0)))
                    })
                    .collect();
                parts.sort_by(|x, y| x.0.cmp(&y.0));
                for (_, s) in parts {
                    acc = &acc + &s;
                }
            }
            Ok(acc)
        }
        GenPath::Sampled(_) => Err(ContourError::Unsupported("sampled paths".into())),
    }
}

/// Position of `x` relative to the circle: `Some(true)` strictly inside,
/// `Some(false)` strictly outside.
fn inside_circle(x: &GenComplex, center: &GenComplex, radius: &AsymptoticScalar) -> Option<bool> {
    match (x - center).modulus_squared().compare(&radius.modulus_squared()) {
        Comparison::MuchLess => Some(true),
        Comparison::MuchGreater => Some(false),
        _ => None,
    }
}

fn exact_integral(u: &GenFunction, path: &GenPath) -> Result<AsymptoticScalar, ContourError> {
    match u {
        GenFunction::Poly(p) => exact_poly_integral(p, path),
        GenFunction::Kernel(k) => {
            let (GenFunction::Poly(num), GenPath::Circle { center, radius, orientation }) = (&k.numerator, path) else {
                return Err(ContourError::Unsupported("kernel integrals other than polynomial over a circle".into()));
            };
            if !num.is_holomorphic() {
                return Err(ContourError::Unsupported("kernel with a non-holomorphic numerator".into()));
            }
            match inside_circle(&k.pole, center, radius) {
                Some(false) => Ok(AsymptoticScalar::zero()),
                Some(true) => {
                    let taylor = num.taylor_at(&k.pole);
                    let c = k
                        .order
                        .checked_sub(1)
                        .and_then(|m| taylor.get(m as usize).cloned())
                        .unwrap_or_else(AsymptoticScalar::zero);
                    Ok(c.scale(Complex64::new(0.0, TAU * f64::from(*orientation))))
                }
                None => Err(ContourError::DomainViolation(format!("pole {} is not separated from {path}", k.pole))),
            }
        }
        _ => Err(ContourError::Unsupported(u.label())),
    }
}

/// `∫_γ u(z) dz`.
pub fn path_integral(
    u: &GenFunction,
    path: &GenPath,
    mode: Mode,
    grid: &EpsGrid,
    cfg: &OracleConfig,
) -> Result<GenValue, ContourError> {
    check_path_domain(u, path, grid, cfg)?;
    match mode {
        Mode::Exact => Ok(GenValue::exact(exact_integral(u, path)?)),
        Mode::Quadrature(m) => Ok(path_integral_quadrature(u, path, m, grid, cfg)?.into_value()),
    }
}

/// Quadrature form of `∫_γ u(z) dz` keeping the magnitudes for residuals.
pub fn path_integral_quadrature(
    u: &GenFunction,
    path: &GenPath,
    nodes: usize,
    grid: &EpsGrid,
    cfg: &OracleConfig,
) -> Result<Quadrature, ContourError> {
    check_path_domain(u, path, grid, cfg)?;
    let label = format!("integral of {} over {path}", u.label());
    match localized(u, path) {
        Some((lu, lp)) => quadrature(&lp, nodes, grid, &label, |eps| frozen_integrand(&lu, eps)),
        None => quadrature(path, nodes, grid, &label, |eps| frozen_integrand(u, eps)),
    }
}

fn check_well_inside(center: &GenComplex, radius: &AsymptoticScalar, z: &GenComplex) -> Result<(), ContourError> {
    if !radius.is_real() || !radius.is_strictly_positive() {
        return Err(ContourError::InvalidPath(format!("radius {radius} is not real and >> 0")));
    }
    if inside_circle(z, center, radius) != Some(true) {
        return Err(ContourError::PointNotWellInside(format!("|{z} - {center}| is not << {radius}")));
    }
    Ok(())
}

fn check_ball_in_domain(u: &GenFunction, center: &GenComplex, radius: &AsymptoticScalar) -> Result<(), ContourError> {
    for pole in u.poles() {
        if inside_circle(&pole, center, radius) != Some(false) {
            return Err(ContourError::DomainViolation(format!("pole {pole} is not outside the closed ball")));
        }
    }
    Ok(())
}

/// A polynomial re-expanded in `w = z − c`. Sampling it on a circle around
/// `c` avoids the cancellation of large coefficients when the radius is
/// infinitesimal compared with `c`.
fn local_poly(u: &GenFunction, c: &GenComplex) -> Option<GenFunction> {
    match u {
        GenFunction::Poly(p) => Some(GenFunction::Poly(p.compose(&Poly::z().add(&Poly::constant(c.clone()))))),
        _ => None,
    }
}

/// Polynomial integrand and circle moved to the centre of the circle.
fn localized(u: &GenFunction, path: &GenPath) -> Option<(GenFunction, GenPath)> {
    let GenPath::Circle { center, radius, orientation } = path else { return None };
    let local = local_poly(u, center)?;
    let circle = GenPath::Circle {
        center: AsymptoticScalar::zero(),
        radius: radius.clone(),
        orientation: *orientation,
    };
    Some((local, circle))
}

/// Quadrature form of `k!/(2πi) ∮ u(ζ)/(ζ − z)^{k+1} dζ` over the
/// positively oriented circle.
pub fn cauchy_quadrature(
    u: &GenFunction,
    center: &GenComplex,
    radius: &AsymptoticScalar,
    z: &GenComplex,
    k: u32,
    nodes: usize,
    grid: &EpsGrid,
) -> Result<Quadrature, ContourError> {
    // holomorphic monomials below degree k integrate to zero against (w − z)^{−k−1};
    // dropping them avoids cancelling their huge per-node contributions
    let local = local_poly(u, center).map(|l| match l {
        GenFunction::Poly(p) => GenFunction::Poly(Poly::from_terms(
            p.terms().filter(|((a, b), _)| *b > 0 || *a >= k).map(|(e, c)| (*e, c.clone())),
        )),
        other => other,
    });
    let (u, center, z) = match &local {
        Some(l) => (l, AsymptoticScalar::zero(), z - center),
        None => (u, center.clone(), z.clone()),
    };
    let circle = GenPath::circle(center, radius.clone())?;
    let scale = Complex64::new(factorial(k), 0.0) / Complex64::new(0.0, TAU);
    let mut q = quadrature(&circle, nodes, grid, &format!("Cauchy integral D^{k} {}", u.label()), |eps| {
        let fr = u.freeze(eps);
        let zz = z.eval(eps);
        Box::new(move |w: Complex64| fr.value(w).map(|v| v * scale / (w - zz).powu(k + 1)))
    })?;
    for m in q.magnitude.iter_mut() {
        *m *= scale.norm();
    }
    Ok(q)
}

/// `D^k u(z̃)` through the Cauchy formula on the circle `(ã, r̃)`.
#[allow(clippy::too_many_arguments)]
pub fn cauchy_integral(
    u: &GenFunction,
    center: &GenComplex,
    radius: &AsymptoticScalar,
    z: &GenComplex,
    k: u32,
    mode: Mode,
    grid: &EpsGrid,
    _cfg: &OracleConfig,
) -> Result<GenValue, ContourError> {
    check_well_inside(center, radius, z)?;
    check_ball_in_domain(u, center, radius)?;
    match mode {
        Mode::Exact => {
            let GenFunction::Poly(p) = u else {
                return Err(ContourError::Unsupported(u.label()));
            };
            if !p.is_holomorphic() {
                return Err(ContourError::NotHolomorphic(p.to_string()));
            }
            let c = p.taylor_at(z).get(k as usize).cloned().unwrap_or_else(AsymptoticScalar::zero);
            Ok(GenValue::exact(c.scale(Complex64::new(factorial(k), 0.0))))
        }
        Mode::Quadrature(m) => Ok(cauchy_quadrature(u, center, radius, z, k, m, grid)?.into_value()),
    }
}

/// `cauchy_quadrature` after the preconditions of `cauchy_integral`.
pub fn cauchy_integral_quadrature(
    u: &GenFunction,
    center: &GenComplex,
    radius: &AsymptoticScalar,
    z: &GenComplex,
    k: u32,
    nodes: usize,
    grid: &EpsGrid,
) -> Result<Quadrature, ContourError> {
    check_well_inside(center, radius, z)?;
    check_ball_in_domain(u, center, radius)?;
    cauchy_quadrature(u, center, radius, z, k, nodes, grid)
}

/// `H(t,s) = γ(t) + s(γ̃(t) − γ(t))`.
#[derive(Debug, Clone)]
pub struct ConvexHomotopy {
    pub from: GenPath,
    pub to: GenPath,
}

impl ConvexHomotopy {
    pub fn new(from: GenPath, to: GenPath) -> Result<Self, ContourError> {
        if !from.is_closed() || !to.is_closed() {
            return Err(ContourError::InvalidPath("homotopy endpoints must be closed paths".into()));
        }
        Ok(ConvexHomotopy { from, to })
    }

    pub fn at(&self, eps: f64, t: f64, s: f64) -> Complex64 {
        let a = self.from.freeze(eps).point(t);
        let b = self.to.freeze(eps).point(t);
        a + (b - a) * s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HomotopyVerdict {
    Equal,
    Different,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomotopyReport {
    pub integral_from: String,
    pub integral_to: String,
    pub difference: String,
    pub verdict: HomotopyVerdict,
}

/// Smallest distance from `p` to the homotopy image at one `ε`, refining
/// sign changes of the side of `p` between neighbouring parameter lines.
fn homotopy_distance(h: &ConvexHomotopy, eps: f64, p: Complex64) -> (f64, f64, f64) {
    let (fa, fb) = (h.from.freeze(eps), h.to.freeze(eps));
    let line = |t: f64| {
        let (a, b) = (fa.point(t), fb.point(t));
        let (d, s) = segment_distance(p, a, b);
        let side = ((b - a).conj() * (p - a)).im;
        (d, s, side)
    };
    let mut best = (f64::INFINITY, 0.0, 0.0);
    let mut prev = line(0.0);
    for j in 1..=PATH_SAMPLES {
        let t = j as f64 / PATH_SAMPLES as f64;
        let cur = line(t);
        if cur.0 < best.0 {
            best = (cur.0, t, cur.1);
        }
        if prev.2.signum() != cur.2.signum() {
            let (mut lo, mut hi) = ((j - 1) as f64 / PATH_SAMPLES as f64, t);
            let lo_side = prev.2;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if line(mid).2.signum() == lo_side.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let m = line(0.5 * (lo + hi));
            if m.0 < best.0 {
                best = (m.0, 0.5 * (lo + hi), m.1);
            }
        }
        prev = cur;
    }
    best
}

fn dbar_on_points(u: &GenFunction, h: &ConvexHomotopy, grid: &EpsGrid, cfg: &OracleConfig) -> Result<(), ContourError> {
    match u {
        GenFunction::Poly(p) if !p.is_holomorphic() => Err(ContourError::NotHolomorphic(p.to_string())),
        GenFunction::Kernel(k) => dbar_on_points(&k.numerator, h, grid, cfg),
        GenFunction::Sampled(f) if !f.holomorphic => {
            for eps in grid.tail(cfg.window).points() {
                let fr = u.freeze(eps);
                for j in 0..32 {
                    for i in 0..=4 {
                        let z = h.at(eps, j as f64 / 32.0, i as f64 / 4.0);
                        let step = DBAR_STEP * z.norm().max(eps);
                        let g = |w: Complex64| fr.value(w).unwrap_or(Complex64::new(f64::NAN, 0.0));
                        let dx = (g(z + step) - g(z - step)) / (2.0 * step);
                        let dy = (g(z + Complex64::i() * step) - g(z - Complex64::i() * step)) / (2.0 * step);
                        let dbar = 0.5 * (dx + Complex64::i() * dy);
                        if dbar.norm() > DBAR_FLOOR * (dx.norm() + dy.norm()).max(f64::MIN_POSITIVE) {
                            return Err(ContourError::NotHolomorphic(format!("{} at {z} (eps = {eps:e})", f.label)));
                        }
                    }
                }
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

/// Compares `∮_γ u` and `∮_γ̃ u` along a convex homotopy.
pub fn homotopy_invariance_check(
    u: &GenFunction,
    h: &ConvexHomotopy,
    mode: Mode,
    grid: &EpsGrid,
    cfg: &OracleConfig,
) -> Result<HomotopyReport, ContourError> {
    for pole in u.poles() {
        let mut witness = (0.0, 0.0, 0.0);
        let net = SampledNet::sample(grid, format!("distance of homotopy to {pole}"), |eps| {
            let p = pole.eval(eps);
            let (d, t, s) = homotopy_distance(h, eps, p);
            let scale = h.from.freeze(eps).sample(8).iter().map(|z| z.norm()).fold(p.norm(), f64::max);
            if d <= COINCIDENCE_FLOOR * scale {
                witness = (t, s, eps);
                Complex64::zero()
            } else {
                Complex64::new(d, 0.0)
            }
        })?;
        if !net.is_invertible(cfg) {
            if witness.2 == 0.0 {
                witness.2 = grid.points().last().unwrap_or(0.0);
                let (_, t, s) = homotopy_distance(h, witness.2, pole.eval(witness.2));
                witness.0 = t;
                witness.1 = s;
            }
            return Err(ContourError::HomotopyLeavesDomain {
                t: witness.0,
                s: witness.1,
                eps: witness.2,
            });
        }
    }
    if let Some(set) = u.declared_domain() {
        for eps in grid.tail(cfg.window).points() {
            let Ok(region) = set.concretize(eps) else { continue };
            let tol = COINCIDENCE_FLOOR * region.scale().max(1e-300);
            for j in 0..64 {
                for i in 0..=8 {
                    let (t, s) = (j as f64 / 64.0, i as f64 / 8.0);
                    if region.distance(h.at(eps, t, s)) > tol {
                        return Err(ContourError::HomotopyLeavesDomain { t, s, eps });
                    }
                }
            }
        }
    }
    dbar_on_points(u, h, grid, cfg)?;
    let (difference, equal, a, b) = match mode {
        Mode::Exact => {
            let a = path_integral(u, &h.from, mode, grid, cfg)?;
            let b = path_integral(u, &h.to, mode, grid, cfg)?;
            let d = a.as_exact().zip(b.as_exact()).map(|(x, y)| x - y).unwrap_or_else(AsymptoticScalar::zero);
            (d.to_string(), d.is_negligible(), a, b)
        }
        Mode::Quadrature(m) => {
            let quad = |p: &GenPath| path_integral_quadrature(u, p, m, grid, cfg);
            let (qa, qb) = (quad(&h.from)?, quad(&h.to)?);
            let mut diff = qa.clone();
            for (m, n) in diff.magnitude.iter_mut().zip(&qb.magnitude) {
                *m = m.max(*n);
            }
            let (res, _) = diff.residual(&qb.net);
            let class = res.classify(cfg);
            (class.to_string(), class == NetClass::Negligible, qa.into_value(), qb.into_value())
        }
    };
    Ok(HomotopyReport {
        integral_from: a.describe(),
        integral_to: b.describe(),
        difference,
        verdict: if equal { HomotopyVerdict::Equal } else { HomotopyVerdict::Different },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    /// `|D^k u_ε(z_ε)|` per grid point.
    pub lhs: Vec<f64>,
    /// `k! r_ε M_ε / (r_ε − |z_ε − a_ε|)^{k+1}` per grid point, `M_ε` the
    /// maximum of `|u_ε|` on the circle. Equals `k! r^{−k} M` at the center.
    pub rhs: Vec<f64>,
    pub holds: bool,
    /// First tail `ε` where the inequality fails.
    pub violation: Option<f64>,
}

/// Both sides of the Cauchy estimate as nets; the circle maximum uses 512
/// points per `ε`.
pub fn cauchy_estimate_sides(
    u: &GenFunction,
    center: &GenComplex,
    radius: &AsymptoticScalar,
    z: &GenComplex,
    k: u32,
    grid: &EpsGrid,
) -> Result<(Vec<f64>, Vec<f64>), ContourError> {
    check_well_inside(center, radius, z)?;
    check_ball_in_domain(u, center, radius)?;
    let local = local_poly(u, center);
    let mut lhs = Vec::with_capacity(grid.len());
    let mut rhs = Vec::with_capacity(grid.len());
    let quad = match u.freeze(grid.points().next().unwrap_or(0.5)).eval(Complex64::zero(), k, 0) {
        Some(_) => None,
        None => Some(cauchy_quadrature(u, center, radius, z, k, DEFAULT_NODES, grid)?),
    };
    for (i, eps) in grid.points().enumerate() {
        let fr = u.freeze(eps);
        let d = match &quad {
            Some(q) => q.net.points[i].value,
            None => fr.eval(z.eval(eps), k, 0).unwrap_or(Complex64::new(f64::NAN, 0.0)),
        };
        lhs.push(d.norm());
        let r = radius.eval(eps).re;
        let gap = r - (z - center).eval(eps).norm();
        let (on_circle, c) = match &local {
            Some(l) => (l.freeze(eps), Complex64::zero()),
            None => (u.freeze(eps), center.eval(eps)),
        };
        let max = (0..DEFAULT_NODES)
            .map(|j| {
                let w = c + Complex64::from_polar(r, TAU * j as f64 / DEFAULT_NODES as f64);
                on_circle.value(w).map(|v| v.norm()).unwrap_or(f64::NAN)
            })
            .fold(0.0, f64::max);
        rhs.push(factorial(k) * r * max / gap.powi(k as i32 + 1));
    }
    Ok((lhs, rhs))
}

/// Verdict of `lhs ≤ rhs · (1 + 1e-9)` on the tail of the grid.
pub fn estimate_verdict(lhs: Vec<f64>, rhs: Vec<f64>, grid: &EpsGrid, window: usize) -> EstimateReport {
    let start = lhs.len().saturating_sub(window);
    let eps: Vec<f64> = grid.points().collect();
    let violation = (start..lhs.len())
        .find(|&i| !(lhs[i] <= rhs[i] * ESTIMATE_SLACK))
        .map(|i| eps[i]);
    EstimateReport {
        lhs,
        rhs,
        holds: violation.is_none(),
        violation,
    }
}

pub fn cauchy_estimate_check(
    u: &GenFunction,
    center: &GenComplex,
    radius: &AsymptoticScalar,
    z: &GenComplex,
    k: u32,
    grid: &EpsGrid,
    cfg: &OracleConfig,
) -> Result<EstimateReport, ContourError> {
    let (lhs, rhs) = cauchy_estimate_sides(u, center, radius, z, k, grid)?;
    Ok(estimate_verdict(lhs, rhs, grid, cfg.window))
}
