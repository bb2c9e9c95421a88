//! Power series over generalized numbers: convergence radius, summation in
//! the sharp topology, polynomial representatives and deflation.

pub mod characterize;
pub mod unicity;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::func::{GenFunction, Schedule, TruncatedSeries};
use crate::net::{EpsGrid, NetClass, OracleConfig, SampledNet};
use crate::scalar::{rat, rat_to_f64, AsymptoticScalar, GenComplex, Rational, DEFAULT_CAP};

/// Default number of stored coefficients considered for estimates.
pub const N_STORE: usize = 64;
/// How far past the stored coefficients a tail law is scanned for its
/// minimum term valuation.
const TAIL_SCAN: usize = 4096;
const MAX_TERMS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("point outside the convergence disc: norm {norm} >= radius {radius}")]
    NotInRadius {
        norm: f64,
        radius: f64,
        /// `(n, ‖a_n w^n‖)` pairs with non-vanishing term norms.
        certificate: Option<Vec<(usize, f64)>>,
    },
    #[error("series did not converge: {0}")]
    NotConverged(String),
    #[error("convergence radius {radius} is smaller than the ball radius {required}")]
    RadiusTooSmall { radius: f64, required: f64 },
    #[error("constant term {0} is not negligible")]
    ConstantTermNotZero(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Exact valuation law `v(a_n) = g(n)` of the coefficients.
#[derive(Debug, Clone, PartialEq)]
pub enum TailLaw {
    /// `a_n = ρ^{c n}`
    Affine(Rational),
    /// `a_n = ρ^{n²} / n!`
    SquareOverFactorial,
    /// `a_n = ρ^{−n / ln n}` for `n ≥ 2`, `a_0 = a_1 = 1`
    NegNOverLnN,
    /// `a_n = ρ^{v_n}` for the listed `v_n`; unknown beyond the table.
    Table(Vec<Rational>),
}

/// Denominator used for the symbolic form of irrational law exponents.
const LAW_DENOMINATOR: i64 = 1024;

fn ln_factorial(n: i64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

impl TailLaw {
    pub fn exponent_f64(&self, i: i64) -> Option<f64> {
        if i < 0 {
            return None;
        }
        match self {
            TailLaw::Affine(c) => Some(rat_to_f64(*c) * i as f64),
            TailLaw::SquareOverFactorial => Some((i * i) as f64),
            TailLaw::NegNOverLnN => Some(if i < 2 { 0.0 } else { -(i as f64) / (i as f64).ln() }),
            TailLaw::Table(v) => v.get(i as usize).map(|r| rat_to_f64(*r)),
        }
    }

    pub fn exponent(&self, i: i64) -> Option<Rational> {
        match self {
            TailLaw::Affine(c) if i >= 0 => Some(*c * i),
            TailLaw::SquareOverFactorial if i >= 0 => Some(rat(i * i)),
            TailLaw::NegNOverLnN if i >= 0 => {
                let e = self.exponent_f64(i)?;
                Some(Rational::new((e * LAW_DENOMINATOR as f64).round() as i64, LAW_DENOMINATOR))
            }
            TailLaw::Table(v) if i >= 0 => v.get(i as usize).copied(),
            _ => None,
        }
    }

    /// `ln` of the real positive factor in front of `ρ^{g(n)}`.
    pub fn ln_factor(&self, i: i64) -> f64 {
        match self {
            TailLaw::SquareOverFactorial => -ln_factorial(i),
            _ => 0.0,
        }
    }

    /// `1 / limsup ‖a_n‖^{1/n}` in closed form.
    pub fn radius(&self) -> Option<f64> {
        match self {
            TailLaw::Affine(c) => Some(rat_to_f64(*c).exp()),
            TailLaw::SquareOverFactorial => Some(f64::INFINITY),
            TailLaw::NegNOverLnN => Some(1.0),
            TailLaw::Table(_) => None,
        }
    }
}

/// Coefficients beyond the stored ones.
#[derive(Debug, Clone, PartialEq)]
pub enum Tail {
    /// `a_n = law(n + shift) · Π_w (n + w)`.
    Law { law: TailLaw, shift: i64, weights: Vec<i64> },
    /// All further coefficients vanish.
    Zero,
    /// Nothing is known beyond the stored coefficients.
    Unknown,
}

/// `Σ a_n (z − z₀)^n`.
#[derive(Debug, Clone)]
pub struct PowerSeries {
    pub center: GenComplex,
    pub stored: Vec<GenComplex>,
    pub tail: Tail,
    /// Relative knowledge cap of law coefficients and default precision.
    pub cap: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RadiusMethod {
    ExactLaw,
    EstimatedFromStored,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusReport {
    pub radius: f64,
    pub method: RadiusMethod,
    /// `‖a_n‖^{1/n}` for `n = 1, 2, …`
    pub norms: Vec<f64>,
    pub warning: Option<String>,
}

/// Result of `sum_at`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSum {
    pub value: AsymptoticScalar,
    pub terms_used: usize,
    /// Sharp-norm bound of the omitted tail.
    pub error_bound: f64,
}

/// `ln |Σ x_k|` and the sum, from terms in log-polar form `(ln|x_k|, x_k/|x_k|)`.
pub(crate) fn log_sum<I: IntoIterator<Item = (f64, Complex64)>>(terms: I) -> (f64, Complex64) {
    let terms: Vec<(f64, Complex64)> = terms.into_iter().filter(|t| t.0 > f64::NEG_INFINITY).collect();
    let m = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return (m, Complex64::zero());
    }
    if m == f64::INFINITY {
        return (m, Complex64::new(f64::INFINITY, 0.0));
    }
    let s: Complex64 = terms.iter().map(|(l, p)| p * (l - m).exp()).sum();
    let n = s.norm();
    if n == 0.0 {
        return (f64::NEG_INFINITY, Complex64::zero());
    }
    let ln = m + n.ln();
    (ln, if ln < 700.0 { s * m.exp() } else { s / n * f64::INFINITY })
}

impl PowerSeries {
    pub fn new(center: GenComplex, stored: Vec<GenComplex>, tail: Tail) -> Self {
        PowerSeries {
            center,
            stored,
            tail,
            cap: rat(DEFAULT_CAP),
        }
    }

    pub fn from_law(center: GenComplex, law: TailLaw) -> Self {
        Self::new(
            center,
            Vec::new(),
            Tail::Law {
                law,
                shift: 0,
                weights: Vec::new(),
            },
        )
    }

    /// `Σ (z − z₀)^n`.
    pub fn geometric(center: GenComplex) -> Self {
        Self::from_law(center, TailLaw::Affine(Rational::zero()))
    }

    /// `Σ ρ^{n²}/n! (z − z₀)^n`.
    pub fn rho_nsq(center: GenComplex) -> Self {
        Self::from_law(center, TailLaw::SquareOverFactorial)
    }

    /// Finite series.
    pub fn polynomial(center: GenComplex, coeffs: Vec<GenComplex>) -> Self {
        Self::new(center, coeffs, Tail::Zero)
    }

    pub fn with_cap(mut self, cap: Rational) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_coefficient(mut self, n: usize, a: GenComplex) -> Self {
        while self.stored.len() <= n {
            let k = self.stored.len();
            let c = self.coefficient(k).unwrap_or_else(|| AsymptoticScalar::zero_with_cap(self.cap));
            self.stored.push(c);
        }
        self.stored[n] = a;
        self
    }

    fn law_weight(weights: &[i64], n: usize) -> f64 {
        weights.iter().map(|w| (n as i64 + w) as f64).product()
    }

    /// `a_n`, `None` when unknown.
    pub fn coefficient(&self, n: usize) -> Option<AsymptoticScalar> {
        if n < self.stored.len() {
            return Some(self.stored[n].clone());
        }
        match &self.tail {
            Tail::Law { law, shift, weights } => {
                let i = n as i64 + shift;
                let e = law.exponent(i)?;
                let c = law.ln_factor(i).exp() * Self::law_weight(weights, n);
                Some(AsymptoticScalar::monomial(Complex64::new(c, 0.0), e).with_cap(e + self.cap))
            }
            Tail::Zero => Some(AsymptoticScalar::zero_with_cap(self.cap)),
            Tail::Unknown => None,
        }
    }

    /// Lower bound for `v(a_n)`; `+∞` for exactly vanishing coefficients.
    pub fn coeff_valuation(&self, n: usize) -> Option<f64> {
        if n < self.stored.len() {
            return Some(rat_to_f64(self.stored[n].valuation_or_cap()));
        }
        match &self.tail {
            Tail::Law { law, shift, .. } => law.exponent_f64(n as i64 + shift),
            Tail::Zero => Some(f64::INFINITY),
            Tail::Unknown => None,
        }
    }

    /// `a_{n,ε}` in log-polar form.
    pub fn coeff_log_at_eps(&self, n: usize, eps: f64) -> Option<(f64, Complex64)> {
        if n < self.stored.len() {
            let (l, v) = self.stored[n].eval_log(eps);
            let phase = if v.norm() > 0.0 { v / v.norm() } else { Complex64::one() };
            return Some((l, phase));
        }
        match &self.tail {
            Tail::Law { law, shift, weights } => {
                let i = n as i64 + shift;
                let e = law.exponent_f64(i)?;
                let w = Self::law_weight(weights, n);
                Some((e * eps.ln() + law.ln_factor(i) + w.ln(), Complex64::one()))
            }
            Tail::Zero => Some((f64::NEG_INFINITY, Complex64::one())),
            Tail::Unknown => None,
        }
    }

    /// `a_{n,ε}`, zero when unknown.
    pub fn coeff_at_eps(&self, n: usize, eps: f64) -> Complex64 {
        match self.coeff_log_at_eps(n, eps) {
            Some((l, p)) if l > f64::NEG_INFINITY => p * l.exp(),
            _ => Complex64::zero(),
        }
    }

    pub fn is_zero_series(&self) -> bool {
        self.tail == Tail::Zero && self.stored.iter().all(|c| c.is_empty())
    }

    /// Termwise `D^k`.
    pub fn derivative(&self, k: usize) -> PowerSeries {
        let stored = (0..self.stored.len().saturating_sub(k))
            .map(|n| {
                let f: f64 = (n + 1..=n + k).map(|j| j as f64).product();
                self.stored[n + k].scale(Complex64::new(f, 0.0))
            })
            .collect();
        let tail = match &self.tail {
            Tail::Law { law, shift, weights } => {
                let mut w: Vec<i64> = weights.iter().map(|w| w + k as i64).collect();
                w.extend(1..=k as i64);
                Tail::Law {
                    law: law.clone(),
                    shift: shift + k as i64,
                    weights: w,
                }
            }
            other => other.clone(),
        };
        PowerSeries {
            center: self.center.clone(),
            stored,
            tail,
            cap: self.cap,
        }
    }

    /// `Σ_{n≥1} a_n (z − z₀)^{n−1}`, defined when `a_0` is negligible.
    pub fn deflate(&self) -> Result<PowerSeries, AnalyticError> {
        match self.coefficient(0) {
            Some(a0) if a0.is_empty() => {}
            Some(a0) => return Err(AnalyticError::ConstantTermNotZero(a0.to_string())),
            None => return Err(AnalyticError::NotConverged("constant term unknown".into())),
        }
        let stored = self.stored.iter().skip(1).cloned().collect();
        let tail = match &self.tail {
            Tail::Law { law, shift, weights } => Tail::Law {
                law: law.clone(),
                shift: shift + 1,
                weights: weights.iter().map(|w| w + 1).collect(),
            },
            other => other.clone(),
        };
        Ok(PowerSeries {
            center: self.center.clone(),
            stored,
            tail,
            cap: self.cap,
        })
    }

    /// `(z − z₀) · s`.
    pub fn multiply_by_linear(&self) -> PowerSeries {
        let mut stored = vec![AsymptoticScalar::zero_with_cap(self.cap)];
        stored.extend(self.stored.iter().cloned());
        let tail = match &self.tail {
            Tail::Law { law, shift, weights } => Tail::Law {
                law: law.clone(),
                shift: shift - 1,
                weights: weights.iter().map(|w| w - 1).collect(),
            },
            other => other.clone(),
        };
        PowerSeries {
            center: self.center.clone(),
            stored,
            tail,
            cap: self.cap,
        }
    }

    /// Suffix minima of `v(a_k) + k·vw` for `k < len`; `None` entries mark
    /// unknown coefficients, and `unknown_beyond` is set when the data
    /// runs out before the tail is exhausted.
    fn term_valuation_suffix_min(&self, vw: f64) -> (Vec<f64>, bool) {
        let (len, unknown_beyond) = match &self.tail {
            Tail::Law { law: TailLaw::Table(v), shift, .. } => {
                (((v.len() as i64 - shift).max(0) as usize).max(self.stored.len()), true)
            }
            Tail::Law { .. } => (self.stored.len() + TAIL_SCAN, false),
            Tail::Zero => (self.stored.len(), false),
            Tail::Unknown => (self.stored.len(), true),
        };
        let mut vals: Vec<f64> = (0..len)
            .map(|k| {
                let v = self.coeff_valuation(k).unwrap_or(f64::NEG_INFINITY);
                if v == f64::INFINITY {
                    v
                } else {
                    v + k as f64 * vw
                }
            })
            .collect();
        for k in (0..vals.len().saturating_sub(1)).rev() {
            vals[k] = vals[k].min(vals[k + 1]);
        }
        (vals, unknown_beyond)
    }
}

/// `R = 1 / limsup ‖a_n‖^{1/n}`.
pub fn convergence_radius(s: &PowerSeries) -> RadiusReport {
    let known = match &s.tail {
        Tail::Law { law: TailLaw::Table(v), .. } => v.len().max(s.stored.len()),
        Tail::Law { .. } => N_STORE.max(s.stored.len()),
        _ => s.stored.len(),
    };
    let norms: Vec<f64> = (1..known)
        .filter_map(|n| s.coeff_valuation(n).map(|v| (-v / n as f64).exp()))
        .collect();
    let exact = match &s.tail {
        Tail::Zero => Some(f64::INFINITY),
        Tail::Law { law, .. } => law.radius(),
        Tail::Unknown => None,
    };
    match exact {
        Some(radius) => RadiusReport {
            radius,
            method: RadiusMethod::ExactLaw,
            norms,
            warning: None,
        },
        None => {
            let upper = &norms[norms.len() / 2..];
            let lim = upper.iter().copied().fold(0.0, f64::max);
            RadiusReport {
                radius: if lim == 0.0 { f64::INFINITY } else { 1.0 / lim },
                method: RadiusMethod::EstimatedFromStored,
                norms,
                warning: Some("radius estimated from stored coefficients only".into()),
            }
        }
    }
}

/// Term norms `‖a_n w^n‖ ≥ 1` for `n ∈ [32, 64]`, exhibiting that the terms
/// do not tend to zero.
pub fn divergence_certificate(s: &PowerSeries, w: &GenComplex) -> Option<Vec<(usize, f64)>> {
    if w.is_empty() {
        return None;
    }
    let vw = rat_to_f64(w.valuation_or_cap());
    let cert: Vec<(usize, f64)> = (32..=64)
        .filter_map(|n| s.coeff_valuation(n).map(|v| (n, (-(v + n as f64 * vw)).exp())))
        .collect();
    if cert.len() == 33 && cert.iter().all(|&(_, nrm)| nrm >= 1.0) {
        Some(cert)
    } else {
        None
    }
}

/// Partial sum until the remaining terms have sharp norm `≤ e^{−m}`.
pub fn sum_at(s: &PowerSeries, z: &GenComplex, m: Rational) -> Result<SeriesSum, AnalyticError> {
    let w = z - &s.center;
    let radius = convergence_radius(s).radius;
    let wn = w.sharp_norm().value;
    if !(wn < radius) {
        return Err(AnalyticError::NotInRadius {
            norm: wn,
            radius,
            certificate: divergence_certificate(s, &w),
        });
    }
    let vw = rat_to_f64(w.valuation_or_cap());
    let mf = rat_to_f64(m);
    let (suffix, unknown_beyond) = s.term_valuation_suffix_min(vw);
    let mut sum = AsymptoticScalar::zero_with_cap(m);
    let mut power = w.powi(0);
    let mut n = 0usize;
    let error_bound = loop {
        if n >= suffix.len() {
            if unknown_beyond {
                return Err(AnalyticError::NotConverged(format!(
                    "coefficients exhausted after {n} terms before precision {m}"
                )));
            }
            if s.tail == Tail::Zero {
                break 0.0;
            }
            // law tails are scanned far enough that the last term decides
            break (-suffix.last().copied().unwrap_or(f64::INFINITY)).exp();
        }
        if suffix[n] > mf {
            break (-suffix[n]).exp();
        }
        if n >= MAX_TERMS {
            return Err(AnalyticError::NotConverged(format!("no precision {m} after {n} terms")));
        }
        let a = s
            .coefficient(n)
            .ok_or_else(|| AnalyticError::NotConverged(format!("coefficient {n} unknown")))?;
        sum = &sum + &(&a * &power);
        power = &power * &w;
        n += 1;
    };
    Ok(SeriesSum {
        value: sum.truncate(m),
        terms_used: n,
        error_bound,
    })
}

/// Truncation `Σ_{n ≤ m_ε} a_{n,ε} (z − z₀)^n` as a generalized function.
pub fn polynomial_representative(s: &PowerSeries, schedule: Schedule, r: f64) -> Result<GenFunction, AnalyticError> {
    let rr = convergence_radius(s);
    if rr.radius < r {
        return Err(AnalyticError::RadiusTooSmall {
            radius: rr.radius,
            required: r,
        });
    }
    Ok(GenFunction::Series(TruncatedSeries {
        series: s.clone(),
        schedule,
    }))
}

/// Difference between the truncated representative and the partial sum of
/// `n_terms` terms at `z`, computed per `ε` from the index ranges where
/// the two differ, in log form.
pub fn representative_gap(s: &PowerSeries, schedule: Schedule, z: &GenComplex, n_terms: usize, grid: &EpsGrid) -> SampledNet {
    let w = z - &s.center;
    SampledNet::sample_log(grid, format!("representative gap at {z}"), |eps| {
        let m = schedule.degree(eps) as usize + 1;
        let (lo, hi) = (m.min(n_terms), m.max(n_terms));
        let (lw, wv) = w.eval_log(eps);
        let phase = if wv.norm() > 0.0 { wv / wv.norm() } else { Complex64::one() };
        log_sum((lo..hi).filter_map(|n| {
            let (la, pa) = s.coeff_log_at_eps(n, eps)?;
            let l = if n == 0 { la } else { la + n as f64 * lw };
            Some((l, pa * phase.powu(n as u32)))
        }))
    })
    .expect("log-form terms are never NaN")
}

/// Agreement of the representative with `sum_at` at `z`: the gap net is
/// negligible and the sum itself is accurate to its precision.
pub fn representative_agrees(
    s: &PowerSeries,
    schedule: Schedule,
    z: &GenComplex,
    grid: &EpsGrid,
    cfg: &OracleConfig,
) -> Result<(NetClass, SeriesSum), AnalyticError> {
    let sum = sum_at(s, z, s.cap)?;
    let gap = representative_gap(s, schedule, z, sum.terms_used, grid);
    Ok((gap.classify(cfg), sum))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        rat(n)
    }
    fn rho(e: Rational) -> AsymptoticScalar {
        AsymptoticScalar::rho_pow(e)
    }
    fn zero() -> AsymptoticScalar {
        AsymptoticScalar::zero()
    }

    #[test]
    fn radii() {
        for c in -2..=2 {
            let s = PowerSeries::from_law(zero(), TailLaw::Affine(r(c)));
            let rr = convergence_radius(&s);
            assert_eq!(rr.method, RadiusMethod::ExactLaw);
            assert!((rr.radius - (c as f64).exp()).abs() < 1e-12);
        }
        assert_eq!(convergence_radius(&PowerSeries::rho_nsq(zero())).radius, f64::INFINITY);
        assert_eq!(convergence_radius(&PowerSeries::from_law(zero(), TailLaw::NegNOverLnN)).radius, 1.0);
        let est = PowerSeries::new(zero(), vec![AsymptoticScalar::one(); 20], Tail::Unknown);
        let rr = convergence_radius(&est);
        assert_eq!(rr.method, RadiusMethod::EstimatedFromStored);
        assert!((rr.radius - 1.0).abs() < 1e-12 && rr.warning.is_some());
    }

    #[test]
    fn geometric_sums() {
        let g = PowerSeries::geometric(zero());
        for a in [Rational::new(1, 2), r(1), r(2)] {
            let x = rho(a);
            let s = sum_at(&g, &x, r(24)).unwrap();
            let oracle = (&AsymptoticScalar::one() - &x).invert().unwrap();
            assert!(s.value.approx_eq(&oracle), "{} vs {}", s.value, oracle);
        }
        match sum_at(&g, &AsymptoticScalar::real(2.0), r(24)) {
            Err(AnalyticError::NotInRadius { certificate: Some(c), .. }) => assert!(c.iter().all(|t| t.1 >= 1.0)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rho_nsq_derivatives() {
        let s = PowerSeries::rho_nsq(zero());
        for k in 0..=8usize {
            let d = s.derivative(k);
            let c0 = d.coefficient(0).unwrap();
            assert!(c0.approx_eq(&rho(r((k * k) as i64))), "k={k}: {c0}");
        }
    }

    #[test]
    fn deflation() {
        let s = PowerSeries::polynomial(zero(), vec![zero(), AsymptoticScalar::one()]);
        let d = s.deflate().unwrap();
        assert!(d.coefficient(0).unwrap().approx_eq(&AsymptoticScalar::one()));
        assert!(d.coefficient(1).unwrap().is_empty());
        let g = PowerSeries::geometric(zero());
        let minus_one = g.clone().with_coefficient(0, zero());
        let d = minus_one.deflate().unwrap();
        for n in 0..10 {
            assert!(d.coefficient(n).unwrap().approx_eq(&g.coefficient(n).unwrap()));
        }
        let s = PowerSeries::polynomial(zero(), vec![zero(), AsymptoticScalar::rho(), AsymptoticScalar::one()]);
        let d = s.deflate().unwrap();
        assert!(d.coefficient(0).unwrap().approx_eq(&AsymptoticScalar::rho()));
        assert!(d.coefficient(1).unwrap().approx_eq(&AsymptoticScalar::one()));
        assert!(matches!(g.deflate(), Err(AnalyticError::ConstantTermNotZero(_))));
    }

    #[test]
    fn multiply_then_deflate() {
        let s = PowerSeries::rho_nsq(zero()).derivative(2);
        let back = s.multiply_by_linear().deflate().unwrap();
        for n in 0..20 {
            assert_eq!(back.coefficient(n), s.coefficient(n));
        }
    }

    #[test]
    fn representative_matches_sum() {
        let g = PowerSeries::geometric(zero());
        let cfg = OracleConfig::default();
        let (class, _) = representative_agrees(&g, Schedule::default(), &AsymptoticScalar::rho(), &EpsGrid::default(), &cfg).unwrap();
        assert_eq!(class, NetClass::Negligible);
    }
}
