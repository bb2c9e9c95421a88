//! Generalized functions on generalized domains.
//!
//! Three computable net classes are supported: polynomials in `z` and `z̄`
//! with generalized coefficients, truncated power series with an
//! `ε`-dependent degree schedule, and per-`ε` callables. A fourth variant
//! wraps a function into the Cauchy kernel `u(ζ)/(ζ − z̃)^m`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::analytic::{self, PowerSeries};
use crate::net::{EpsGrid, NetClass, OracleConfig, SampledNet};
use crate::scalar::{AsymptoticScalar, GenComplex, Rational, ScalarError};
use crate::sets::{self, Membership, SetError, SharpBall, InternalSetRep};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuncError {
    #[error("point outside the declared domain")]
    OutOfDomain,
    #[error("series did not converge: {0}")]
    NotConverged(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("range violation: u({point}) is not in the target domain")]
    RangeViolation { point: String },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Set(#[from] SetError),
}

pub(crate) fn falling(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    (n - k + 1..=n).fold(1.0, |acc, j| acc * j as f64)
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

pub(crate) fn factorial(n: u32) -> f64 {
    falling(n, n)
}

/// Polynomial `Σ c_{pq} z^p z̄^q` with generalized coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    coeffs: BTreeMap<(u32, u32), AsymptoticScalar>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = ((u32, u32), AsymptoticScalar)>,
    {
        let mut p = Poly::zero();
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    pub fn constant(c: AsymptoticScalar) -> Self {
        Self::from_terms([((0, 0), c)])
    }

    pub fn z() -> Self {
        Self::from_terms([((1, 0), AsymptoticScalar::one())])
    }

    pub fn zbar() -> Self {
        Self::from_terms([((0, 1), AsymptoticScalar::one())])
    }

    /// Holomorphic polynomial `Σ c_p z^p`.
    pub fn holomorphic(coeffs: &[AsymptoticScalar]) -> Self {
        Self::from_terms(
            coeffs
                .iter()
                .enumerate()
                .map(|(p, c)| ((p as u32, 0), c.clone())),
        )
    }

    fn add_term(&mut self, key: (u32, u32), c: AsymptoticScalar) {
        let merged = match self.coeffs.remove(&key) {
            Some(old) => &old + &c,
            None => c,
        };
        if !merged.is_empty() {
            self.coeffs.insert(key, merged);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &AsymptoticScalar)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, p: u32, q: u32) -> Option<&AsymptoticScalar> {
        self.coeffs.get(&(p, q))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Total degree in `z` and `z̄`.
    pub fn degree(&self) -> u32 {
        self.coeffs.keys().map(|(p, q)| p + q).max().unwrap_or(0)
    }

    /// No `z̄` monomial survives.
    pub fn is_holomorphic(&self) -> bool {
        self.coeffs.keys().all(|&(_, q)| q == 0)
    }

    pub fn holomorphic_part(&self) -> Poly {
        Poly::from_terms(
            self.coeffs
                .iter()
                .filter(|(k, _)| k.1 == 0)
                .map(|(k, c)| (*k, c.clone())),
        )
    }

    pub fn scale(&self, c: &AsymptoticScalar) -> Poly {
        Poly::from_terms(self.coeffs.iter().map(|(k, v)| (*k, v * c)))
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.add_term(*k, -c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for ((p1, q1), a) in &self.coeffs {
            for ((p2, q2), b) in &other.coeffs {
                out.add_term((p1 + p2, q1 + q2), a * b);
            }
        }
        out
    }

    pub fn powi(&self, n: u32) -> Poly {
        let mut out = Poly::constant(AsymptoticScalar::one());
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Complex conjugate as a function: `conj(u(z))`.
    pub fn conj(&self) -> Poly {
        Poly::from_terms(self.coeffs.iter().map(|((p, q), c)| ((*q, *p), c.conj())))
    }

    /// Wirtinger derivative `∂_z^a ∂_z̄^b`.
    pub fn derivative(&self, a: u32, b: u32) -> Poly {
        Poly::from_terms(self.coeffs.iter().filter_map(|((p, q), c)| {
            if *p < a || *q < b {
                return None;
            }
            let f = falling(*p, a) * falling(*q, b);
            Some(((p - a, q - b), c.scale(Complex64::new(f, 0.0))))
        }))
    }

    /// `∂̄u`.
    pub fn dbar(&self) -> Poly {
        self.derivative(0, 1)
    }

    /// Symbolic point value `u(z̃)`.
    pub fn eval(&self, z: &GenComplex) -> AsymptoticScalar {
        let zc = z.conj();
        let mut zp: Vec<AsymptoticScalar> = vec![AsymptoticScalar::constant_with_cap(Complex64::new(1.0, 0.0), z.cap())];
        let mut zq = zp.clone();
        let mut acc = AsymptoticScalar::zero_with_cap(Rational::from_integer(i64::MAX / 4));
        let mut any = false;
        for ((p, q), c) in &self.coeffs {
            while zp.len() <= *p as usize {
                let next = zp.last().unwrap() * z;
                zp.push(next);
            }
            while zq.len() <= *q as usize {
                let next = zq.last().unwrap() * &zc;
                zq.push(next);
            }
            let term = &(c * &zp[*p as usize]) * &zq[*q as usize];
            acc = if any { &acc + &term } else { term };
            any = true;
        }
        if any {
            acc
        } else {
            AsymptoticScalar::zero_with_cap(z.cap())
        }
    }

    /// `v ∘ u` by substituting `z ↦ u`, `z̄ ↦ conj(u)`.
    pub fn compose(&self, inner: &Poly) -> Poly {
        let inner_c = inner.conj();
        let mut out = Poly::zero();
        for ((p, q), c) in &self.coeffs {
            let t = inner.powi(*p).mul(&inner_c.powi(*q)).scale(c);
            out = out.add(&t);
        }
        out
    }

    /// Coefficients of `Σ b_n (z − z₀)^n` for the holomorphic part.
    pub fn taylor_at(&self, z0: &GenComplex) -> Vec<AsymptoticScalar> {
        let deg = self.holomorphic_part().degree();
        (0..=deg)
            .map(|n| {
                let d = self.holomorphic_part().derivative(n, 0);
                d.eval(z0).scale(Complex64::new(1.0 / factorial(n), 0.0))
            })
            .collect()
    }

    fn at_eps(&self, eps: f64) -> Vec<(u32, u32, Complex64)> {
        self.coeffs
            .iter()
            .map(|((p, q), c)| (*p, *q, c.eval(eps)))
            .collect()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (k, ((p, q), c)) in self.coeffs.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            if *p > 0 {
                write!(f, "*z^{p}")?;
            }
            if *q > 0 {
                write!(f, "*zbar^{q}")?;
            }
        }
        Ok(())
    }
}

/// Degree schedule `m_ε` of a polynomial representative.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub enum Schedule {
    /// `⌈ln(1/ε)⌉`
    #[default]
    CeilLogInverse,
    /// `⌊ln(1/ε)⌋`
    FloorLogInverse,
    Fixed(u32),
}

impl Schedule {
    pub fn degree(&self, eps: f64) -> u32 {
        match self {
            Schedule::CeilLogInverse => (-eps.ln()).ceil().max(0.0) as u32,
            Schedule::FloorLogInverse => (-eps.ln()).floor().max(0.0) as u32,
            Schedule::Fixed(n) => *n,
        }
    }
}

/// Power series truncated per `ε` at `m_ε`.
#[derive(Debug, Clone)]
pub struct TruncatedSeries {
    pub series: PowerSeries,
    pub schedule: Schedule,
}

pub type NetFn = Arc<dyn Fn(f64, Complex64) -> Complex64 + Send + Sync>;
/// `(ε, z, k) ↦ D^k u_ε(z)`.
pub type NetDerivFn = Arc<dyn Fn(f64, Complex64, u32) -> Complex64 + Send + Sync>;

/// A per-`ε` callable. Callables must be safe to call concurrently.
#[derive(Clone)]
pub struct SampledFn {
    pub label: String,
    pub value: NetFn,
    /// Holomorphic derivatives, when an analytic formula is known.
    pub derivative: Option<NetDerivFn>,
    /// Declared `∂̄u_ε = 0` for every `ε`.
    pub holomorphic: bool,
    pub domain: Option<InternalSetRep>,
}

impl fmt::Debug for SampledFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledFn")
            .field("label", &self.label)
            .field("has_derivative", &self.derivative.is_some())
            .field("holomorphic", &self.holomorphic)
            .finish()
    }
}

impl SampledFn {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64, Complex64) -> Complex64 + Send + Sync + 'static,
    {
        SampledFn {
            label: label.into(),
            value: Arc::new(f),
            derivative: None,
            holomorphic: false,
            domain: None,
        }
    }

    pub fn with_derivative<D>(mut self, d: D) -> Self
    where
        D: Fn(f64, Complex64, u32) -> Complex64 + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(d));
        self
    }

    pub fn holomorphic(mut self) -> Self {
        self.holomorphic = true;
        self
    }

    pub fn with_domain(mut self, d: InternalSetRep) -> Self {
        self.domain = Some(d);
        self
    }
}

/// `u(ζ) / (ζ − pole)^order`.
#[derive(Debug, Clone)]
pub struct CauchyKernel {
    pub numerator: GenFunction,
    pub pole: GenComplex,
    pub order: u32,
}

#[derive(Debug, Clone)]
pub enum GenFunction {
    Poly(Poly),
    Series(TruncatedSeries),
    Sampled(SampledFn),
    Kernel(Box<CauchyKernel>),
}

/// Point value `u(z̃)` and how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum GenValue {
    /// Symbolic result; `error_norm` bounds the omitted tail in sharp norm.
    Exact {
        value: AsymptoticScalar,
        error_norm: f64,
    },
    Sampled {
        net: SampledNet,
        error_estimate: Option<f64>,
    },
}

impl GenValue {
    pub fn exact(value: AsymptoticScalar) -> Self {
        GenValue::Exact {
            value,
            error_norm: 0.0,
        }
    }

    pub fn sampled(net: SampledNet) -> Self {
        GenValue::Sampled {
            net,
            error_estimate: None,
        }
    }

    pub fn as_exact(&self) -> Option<&AsymptoticScalar> {
        match self {
            GenValue::Exact { value, .. } => Some(value),
            GenValue::Sampled { .. } => None,
        }
    }

    pub fn to_net(&self, grid: &EpsGrid) -> SampledNet {
        match self {
            GenValue::Exact { value, .. } => SampledNet::from_scalar(value, grid),
            GenValue::Sampled { net, .. } => net.clone(),
        }
    }

    pub fn is_negligible(&self, cfg: &OracleConfig) -> bool {
        match self {
            GenValue::Exact { value, .. } => value.is_negligible(),
            GenValue::Sampled { net, .. } => net.classify(cfg) == NetClass::Negligible,
        }
    }

    pub fn is_invertible(&self, cfg: &OracleConfig) -> bool {
        match self {
            GenValue::Exact { value, .. } => !value.is_empty(),
            GenValue::Sampled { net, .. } => net.is_invertible(cfg),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            GenValue::Exact { value, .. } => value.to_string(),
            GenValue::Sampled { net, .. } => {
                let p = net.points.last().map(|p| p.value).unwrap_or_default();
                format!("sampled net (tail value {p})")
            }
        }
    }
}

/// A function frozen at one `ε`, for fast repeated evaluation.
pub enum Frozen<'a> {
    Poly(Vec<(u32, u32, Complex64)>),
    Series {
        center: Complex64,
        coeffs: Vec<Complex64>,
    },
    Sampled {
        f: &'a SampledFn,
        eps: f64,
    },
    Kernel {
        numerator: Box<Frozen<'a>>,
        pole: Complex64,
        order: u32,
    },
}

impl Frozen<'_> {
    /// `∂_z^a ∂_z̄^b u_ε(z)`, `None` when no formula is available.
    pub fn eval(&self, z: Complex64, a: u32, b: u32) -> Option<Complex64> {
        match self {
            Frozen::Poly(terms) => {
                let zc = z.conj();
                let mut s = Complex64::zero();
                for &(p, q, c) in terms {
                    if p < a || q < b {
                        continue;
                    }
                    let f = falling(p, a) * falling(q, b);
                    s += c * f * z.powu(p - a) * zc.powu(q - b);
                }
                Some(s)
            }
            Frozen::Series { center, coeffs } => {
                if b > 0 {
                    return Some(Complex64::zero());
                }
                let w = z - center;
                let mut s = Complex64::zero();
                for n in (a as usize..coeffs.len()).rev() {
                    s = s * w + coeffs[n] * falling(n as u32, a);
                }
                Some(s)
            }
            Frozen::Sampled { f, eps } => match (a, b) {
                (0, 0) => Some((f.value)(*eps, z)),
                (k, 0) => f.derivative.as_ref().map(|d| d(*eps, z, k)),
                (_, _) if f.holomorphic => Some(Complex64::zero()),
                _ => None,
            },
            Frozen::Kernel {
                numerator,
                pole,
                order,
            } => {
                if b > 0 {
                    return numerator.eval(z, 0, 1).filter(|d| *d == Complex64::zero());
                }
                let w = z - pole;
                let m = *order as f64;
                let mut s = Complex64::zero();
                for j in 0..=a {
                    let nj = numerator.eval(z, j, 0)?;
                    let kk = a - j;
                    // d^kk/dz^kk (z − p)^{−m} = (−m)(−m−1)…(−m−kk+1) (z − p)^{−m−kk}
                    let mut c = 1.0;
                    for i in 0..kk {
                        c *= -m - i as f64;
                    }
                    s += nj * binomial(a, j) * c * w.powf(-m - kk as f64);
                }
                Some(s)
            }
        }
    }

    pub fn value(&self, z: Complex64) -> Option<Complex64> {
        self.eval(z, 0, 0)
    }

    /// `ln |u_ε(z)|`, summed in log form for the polynomial variants so that
    /// large arguments do not overflow.
    pub fn ln_abs(&self, z: Complex64) -> Option<f64> {
        let phase = |v: Complex64| if v.norm() > 0.0 { v / v.norm() } else { Complex64::new(1.0, 0.0) };
        match self {
            Frozen::Poly(terms) => {
                let (lz, pz) = (z.norm().ln(), phase(z));
                Some(
                    analytic::log_sum(terms.iter().map(|&(p, q, c)| {
                        let l = c.norm().ln() + if p + q > 0 { (p + q) as f64 * lz } else { 0.0 };
                        (l, phase(c) * pz.powu(p) * pz.conj().powu(q))
                    }))
                    .0,
                )
            }
            Frozen::Series { center, coeffs } => {
                let w = z - center;
                let (lw, pw) = (w.norm().ln(), phase(w));
                Some(
                    analytic::log_sum(coeffs.iter().enumerate().map(|(n, &c)| {
                        let l = c.norm().ln() + if n > 0 { n as f64 * lw } else { 0.0 };
                        (l, phase(c) * pw.powu(n as u32))
                    }))
                    .0,
                )
            }
            _ => self.value(z).map(|v| v.norm().ln()),
        }
    }
}

/// Domain argument for holomorphy tests.
#[derive(Debug, Clone)]
pub enum Domain {
    Set(InternalSetRep),
    Ball(SharpBall),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Holomorphy {
    Holomorphic,
    NotHolomorphic { witness: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum GinftyVerdict {
    Yes(u32),
    No { witness_order: u32, reason: String },
}

/// Relative step of the numeric `∂̄` stencil.
pub(crate) const DBAR_STEP: f64 = 1e-4;
/// Numeric `∂̄` values below this fraction of the local gradient scale
/// are read as zero.
pub(crate) const DBAR_FLOOR: f64 = 1e-6;

impl GenFunction {
    pub fn poly(p: Poly) -> Self {
        GenFunction::Poly(p)
    }

    pub fn kernel(numerator: GenFunction, pole: GenComplex, order: u32) -> Self {
        GenFunction::Kernel(Box::new(CauchyKernel {
            numerator,
            pole,
            order,
        }))
    }

    /// The net `u_ε(z) = z^{⌊ln(1/ε)⌋}`: holomorphic, with `u(z̃) = 0`
    /// exactly when `‖z̃‖ < 1`.
    pub fn ks_net() -> Self {
        let deg = |eps: f64| Schedule::FloorLogInverse.degree(eps);
        GenFunction::Sampled(
            SampledFn::new("ks_net", move |eps, z| z.powu(deg(eps)))
                .with_derivative(move |eps, z, k| {
                    let m = deg(eps);
                    if k > m {
                        Complex64::zero()
                    } else {
                        z.powu(m - k) * falling(m, k)
                    }
                })
                .holomorphic(),
        )
    }

    pub fn label(&self) -> String {
        match self {
            GenFunction::Poly(p) => format!("poly {p}"),
            GenFunction::Series(s) => format!("series around {}", s.series.center),
            GenFunction::Sampled(s) => s.label.clone(),
            GenFunction::Kernel(k) => format!("({}) / (z - {})^{}", k.numerator.label(), k.pole, k.order),
        }
    }

    pub fn freeze(&self, eps: f64) -> Frozen<'_> {
        match self {
            GenFunction::Poly(p) => Frozen::Poly(p.at_eps(eps)),
            GenFunction::Series(ts) => {
                let m = ts.schedule.degree(eps) as usize;
                let coeffs = (0..=m).map(|n| ts.series.coeff_at_eps(n, eps)).collect();
                Frozen::Series {
                    center: ts.series.center.eval(eps),
                    coeffs,
                }
            }
            GenFunction::Sampled(f) => Frozen::Sampled { f, eps },
            GenFunction::Kernel(k) => Frozen::Kernel {
                numerator: Box::new(k.numerator.freeze(eps)),
                pole: k.pole.eval(eps),
                order: k.order,
            },
        }
    }

    /// Singular points excluded from the domain.
    pub fn poles(&self) -> Vec<GenComplex> {
        match self {
            GenFunction::Kernel(k) => {
                let mut v = k.numerator.poles();
                v.push(k.pole.clone());
                v
            }
            _ => Vec::new(),
        }
    }

    pub fn declared_domain(&self) -> Option<&InternalSetRep> {
        match self {
            GenFunction::Sampled(f) => f.domain.as_ref(),
            _ => None,
        }
    }

    /// Point value `u(z̃)`.
    pub fn eval(&self, z: &GenComplex, grid: &EpsGrid) -> Result<GenValue, FuncError> {
        if let Some(d) = self.declared_domain() {
            if sets::contains(d, z, grid, &OracleConfig::default()) == Membership::No {
                return Err(FuncError::OutOfDomain);
            }
        }
        match self {
            GenFunction::Poly(p) => Ok(GenValue::exact(p.eval(z))),
            GenFunction::Series(ts) => {
                let sum = analytic::sum_at(&ts.series, z, ts.series.cap)
                    .map_err(|e| FuncError::NotConverged(e.to_string()))?;
                Ok(GenValue::Exact {
                    value: sum.value,
                    error_norm: sum.error_bound,
                })
            }
            GenFunction::Sampled(_) => self.eval_sampled(z, grid, 0, 0),
            GenFunction::Kernel(k) => {
                let d = z - &k.pole;
                let inv = d.invert().map_err(|_| FuncError::OutOfDomain)?;
                match k.numerator.eval(z, grid)? {
                    GenValue::Exact { value, error_norm } => Ok(GenValue::Exact {
                        value: &value * &inv.powi(k.order),
                        error_norm,
                    }),
                    GenValue::Sampled { .. } => self.eval_sampled(z, grid, 0, 0),
                }
            }
        }
    }

    /// Per-`ε` evaluation of `∂^{(a,b)} u` at a representative of `z̃`.
    pub fn eval_sampled(&self, z: &GenComplex, grid: &EpsGrid, a: u32, b: u32) -> Result<GenValue, FuncError> {
        let mut missing = false;
        let net = SampledNet::sample(grid, format!("{} at {}", self.label(), z), |eps| {
            match self.freeze(eps).eval(z.eval(eps), a, b) {
                Some(v) => v,
                None => {
                    missing = true;
                    Complex64::zero()
                }
            }
        });
        // `missing` is only written inside the closure above
        let net = net.map_err(|e| FuncError::Unsupported(e.to_string()))?;
        if missing {
            return Err(FuncError::Unsupported(format!(
                "no formula for derivative ({a},{b}) of {}",
                self.label()
            )));
        }
        Ok(GenValue::sampled(net))
    }

    /// Wirtinger derivative `∂_z^a ∂_z̄^b u`.
    pub fn derivative(&self, a: u32, b: u32) -> Result<GenFunction, FuncError> {
        match self {
            GenFunction::Poly(p) => Ok(GenFunction::Poly(p.derivative(a, b))),
            GenFunction::Series(ts) => {
                if b > 0 {
                    return Ok(GenFunction::Poly(Poly::zero()));
                }
                Ok(GenFunction::Series(TruncatedSeries {
                    series: ts.series.derivative(a as usize),
                    schedule: ts.schedule,
                }))
            }
            GenFunction::Sampled(f) => {
                if (a, b) == (0, 0) {
                    return Ok(self.clone());
                }
                if b > 0 {
                    if f.holomorphic {
                        return Ok(GenFunction::Poly(Poly::zero()));
                    }
                    return Err(FuncError::Unsupported(format!("∂̄ of bare callable {}", f.label)));
                }
                let d = f
                    .derivative
                    .clone()
                    .ok_or_else(|| FuncError::Unsupported(format!("derivative of bare callable {}", f.label)))?;
                let d2 = d.clone();
                Ok(GenFunction::Sampled(SampledFn {
                    label: format!("D^{a} {}", f.label),
                    value: Arc::new(move |eps, z| d(eps, z, a)),
                    derivative: Some(Arc::new(move |eps, z, k| d2(eps, z, a + k))),
                    holomorphic: f.holomorphic,
                    domain: f.domain.clone(),
                }))
            }
            GenFunction::Kernel(_) => {
                if b > 0 {
                    return Err(FuncError::Unsupported("∂̄ of a kernel".into()));
                }
                let me = Arc::new(self.clone());
                let me2 = me.clone();
                Ok(GenFunction::Sampled(SampledFn {
                    label: format!("D^{a} {}", self.label()),
                    value: Arc::new(move |eps, z| me.freeze(eps).eval(z, a, 0).unwrap_or(Complex64::new(f64::NAN, 0.0))),
                    derivative: Some(Arc::new(move |eps, z, k| {
                        me2.freeze(eps).eval(z, a + k, 0).unwrap_or(Complex64::new(f64::NAN, 0.0))
                    })),
                    holomorphic: true,
                    domain: None,
                }))
            }
        }
    }

    /// Holomorphic derivative `D^k u`.
    pub fn d(&self, k: u32) -> Result<GenFunction, FuncError> {
        self.derivative(k, 0)
    }

    /// `∂̄u = 0` test on a domain.
    pub fn dbar_test(&self, domain: &Domain, grid: &EpsGrid, cfg: &OracleConfig) -> Holomorphy {
        match self {
            GenFunction::Poly(p) => {
                let dbar = p.dbar();
                if dbar.is_zero() {
                    return Holomorphy::Holomorphic;
                }
                if let Domain::Set(set) = domain {
                    let classes = sets::classify_on_set(&GenFunction::Poly(dbar.clone()), set, 0, None, grid, cfg);
                    if matches!(classes.first(), Some(c) if c.class == NetClass::Negligible) {
                        return Holomorphy::Holomorphic;
                    }
                }
                let at = domain_center(domain);
                Holomorphy::NotHolomorphic {
                    witness: format!("dbar u = {} (at {} : {})", dbar, at, dbar.eval(&at)),
                }
            }
            GenFunction::Series(_) => Holomorphy::Holomorphic,
            GenFunction::Kernel(k) => k.numerator.dbar_test(domain, grid, cfg),
            GenFunction::Sampled(f) => {
                if f.holomorphic {
                    return Holomorphy::Holomorphic;
                }
                self.numeric_dbar(domain, grid, cfg)
            }
        }
    }

    fn numeric_dbar(&self, domain: &Domain, grid: &EpsGrid, cfg: &OracleConfig) -> Holomorphy {
        let tail = grid.tail(cfg.window);
        let mut worst: Option<(f64, Complex64, f64)> = None;
        let net = SampledNet::sample(&tail, format!("dbar {}", self.label()), |eps| {
            let (pts, scale) = domain_points(domain, eps, 64);
            let fr = self.freeze(eps);
            let h = DBAR_STEP * scale;
            let mut sup = 0.0f64;
            for z in pts {
                let f = |w: Complex64| fr.value(w).unwrap_or(Complex64::new(f64::NAN, 0.0));
                let dx = (f(z + h) - f(z - h)) / (2.0 * h);
                let dy = (f(z + Complex64::i() * h) - f(z - Complex64::i() * h)) / (2.0 * h);
                let dbar = 0.5 * (dx + Complex64::i() * dy);
                let gauge = dx.norm() + dy.norm() + f(z).norm() / scale;
                let v = if dbar.norm() <= DBAR_FLOOR * gauge { 0.0 } else { dbar.norm() };
                if v > sup {
                    sup = v;
                    if worst.map(|w| v > w.0).unwrap_or(true) {
                        worst = Some((v, z, eps));
                    }
                }
            }
            Complex64::new(sup, 0.0)
        });
        match net {
            Ok(n) if n.classify(cfg) == NetClass::Negligible => Holomorphy::Holomorphic,
            Ok(_) => {
                let w = worst
                    .map(|(v, z, e)| format!("|dbar u| = {v:.3e} at z = {z} (eps = {e:.3e})"))
                    .unwrap_or_default();
                Holomorphy::NotHolomorphic { witness: w }
            }
            Err(e) => Holomorphy::NotHolomorphic {
                witness: e.to_string(),
            },
        }
    }

    /// `v ∘ u` where `u(A) ⊆ B` is checked at sampled member points of `A`.
    pub fn compose(
        outer: &GenFunction,
        inner: &GenFunction,
        a: &InternalSetRep,
        b: &InternalSetRep,
        grid: &EpsGrid,
        cfg: &OracleConfig,
    ) -> Result<GenFunction, FuncError> {
        let mut rng = ChaCha8Rng::seed_from_u64(sets::SAMPLING_SEED);
        for _ in 0..100 {
            let x = a.random_member(&mut rng);
            let ux = inner.eval(&x, grid)?;
            let verdict = match &ux {
                GenValue::Exact { value, .. } => sets::contains(b, value, grid, cfg),
                GenValue::Sampled { net, .. } => sets::contains_net(b, net, cfg),
            };
            if verdict == Membership::No {
                return Err(FuncError::RangeViolation {
                    point: x.to_string(),
                });
            }
        }
        if let (GenFunction::Poly(v), GenFunction::Poly(u)) = (outer, inner) {
            return Ok(GenFunction::Poly(v.compose(u)));
        }
        let (o, i) = (Arc::new(outer.clone()), Arc::new(inner.clone()));
        let holo = matches!(
            (outer, inner),
            (GenFunction::Poly(p), GenFunction::Poly(q)) if p.is_holomorphic() && q.is_holomorphic()
        );
        let label = format!("({}) o ({})", outer.label(), inner.label());
        let mut f = SampledFn::new(label, move |eps, z| {
            let w = i.freeze(eps).value(z).unwrap_or(Complex64::new(f64::NAN, 0.0));
            o.freeze(eps).value(w).unwrap_or(Complex64::new(f64::NAN, 0.0))
        });
        f.holomorphic = holo;
        Ok(GenFunction::Sampled(f))
    }

    /// Membership in `G̃^∞(A)`: one `N` bounding `sup_{A_ε} |∂^α u_ε|` for
    /// all orders up to `k_max`. Growth is judged on the estimated
    /// valuations (slopes) of the sup-nets, which ignore `ε`-independent
    /// factors such as `k!`.
    pub fn is_ginfty(&self, set: &InternalSetRep, k_max: u32, grid: &EpsGrid, cfg: &OracleConfig) -> GinftyVerdict {
        if let Err(e) = sets::is_sharply_bounded(set, grid, cfg) {
            return GinftyVerdict::No {
                witness_order: 0,
                reason: e.to_string(),
            };
        }
        let classes = sets::classify_on_set(self, set, k_max, None, grid, cfg);
        let mut bound = 0u32;
        let mut needed: Vec<i64> = Vec::new();
        for oc in &classes {
            match oc.class {
                NetClass::Neither => {
                    return GinftyVerdict::No {
                        witness_order: oc.order,
                        reason: format!("order {} sup-net is not moderate", oc.order),
                    }
                }
                NetClass::Moderate(n) => {
                    bound = bound.max(n);
                    needed.push(oc.slope.map(|s| (-s - 0.05).ceil().max(0.0) as i64).unwrap_or(n as i64));
                }
                NetClass::Negligible => needed.push(0),
            }
        }
        let half = needed.len() / 2;
        let upper = &needed[half..];
        let growing = upper.len() >= 2
            && upper.windows(2).all(|w| w[1] >= w[0])
            && upper.last() > upper.first();
        if growing {
            let top = *upper.last().unwrap();
            let order = needed.iter().position(|&n| n == top).unwrap_or(0) as u32;
            return GinftyVerdict::No {
                witness_order: order,
                reason: format!(
                    "required exponent keeps growing with the order: {:?}",
                    needed
                ),
            };
        }
        GinftyVerdict::Yes(bound)
    }
}

fn domain_center(d: &Domain) -> GenComplex {
    match d {
        Domain::Set(s) => s.anchor(),
        Domain::Ball(b) => b.center.clone(),
    }
}

/// Points of a domain at one `ε` and a length scale for stencils.
fn domain_points(d: &Domain, eps: f64, n: usize) -> (Vec<Complex64>, f64) {
    match d {
        Domain::Set(s) => match s.concretize(eps) {
            Ok(region) => {
                let scale = region.scale().max(1e-300);
                (region.sample_points(n, n, 0.0), scale)
            }
            Err(_) => (vec![s.anchor().eval(eps)], 1.0),
        },
        Domain::Ball(b) => {
            let pts: Vec<Complex64> = b.sample_points(n).iter().map(|p| p.eval(eps)).collect();
            let c = b.center.eval(eps);
            let scale = pts
                .iter()
                .map(|p| (p - c).norm())
                .fold(0.0, f64::max)
                .max(eps);
            (pts, scale)
        }
    }
}
