//! Numeric oracle: nets sampled on a geometric `ε` grid.
//!
//! All magnitude tests run on `ln|x_ε|`, so values far outside the double
//! range (`ε^{-50}` at `ε = 2^{-48}`, or `e^{-1/ε}`) are still classified.
//! Verdicts are read off the tail of the grid and are falsification-style:
//! no finite grid can prove a "for small ε" statement.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::scalar::AsymptoticScalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetError {
    #[error("net undefined at eps = {eps}: {reason}")]
    Evaluation { eps: f64, reason: String },
    #[error("all tail values vanish (valuation >= v_neg)")]
    AllZero,
    #[error("insufficient data: {usable} usable points, window {window}")]
    InsufficientData { usable: usize, window: usize },
}

/// Geometric grid `ε_j = q^j`, `j ∈ [j_min, j_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsGrid {
    pub j_min: i32,
    pub j_max: i32,
    pub q: f64,
}

impl Default for EpsGrid {
    fn default() -> Self {
        EpsGrid {
            j_min: 8,
            j_max: 48,
            q: 0.5,
        }
    }
}

impl EpsGrid {
    pub fn new(j_min: i32, j_max: i32, q: f64) -> Result<Self, String> {
        if j_min >= j_max {
            return Err(format!("grid needs j_min < j_max, got {j_min}:{j_max}"));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(format!("grid base must lie in (0,1), got {q}"));
        }
        Ok(EpsGrid { j_min, j_max, q })
    }

    pub fn len(&self) -> usize {
        (self.j_max - self.j_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid points in order of decreasing `ε` (the tail comes last).
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (self.j_min..=self.j_max).map(move |j| self.q.powi(j))
    }

    /// The last `window` points of the grid as a grid of their own.
    pub fn tail(&self, window: usize) -> EpsGrid {
        let start = (self.j_max - window as i32 + 1).max(self.j_min);
        EpsGrid {
            j_min: start.min(self.j_max - 1),
            j_max: self.j_max,
            q: self.q,
        }
    }
}

/// One sample `x_ε` with its log-magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetPoint {
    pub eps: f64,
    pub value: Complex64,
    /// `ln|x_ε|`; `-∞` for an exact zero, `+∞` on overflow.
    pub ln_abs: f64,
    pub overflow: bool,
}

impl NetPoint {
    pub fn from_value(eps: f64, value: Complex64) -> Self {
        let n = value.norm();
        let overflow = !n.is_finite();
        NetPoint {
            eps,
            value,
            ln_abs: if overflow { f64::INFINITY } else { n.ln() },
            overflow,
        }
    }

    pub fn from_log(eps: f64, ln_abs: f64, value: Complex64) -> Self {
        NetPoint {
            eps,
            value,
            ln_abs,
            overflow: ln_abs == f64::INFINITY,
        }
    }
}

/// Complex values of a net on an [`EpsGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledNet {
    pub grid: EpsGrid,
    pub points: Vec<NetPoint>,
    pub note: String,
}

/// Tunable thresholds for the numeric verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConfig {
    pub window: usize,
    pub v_neg: f64,
    pub n_max: u32,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            window: 16,
            v_neg: 20.0,
            n_max: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValuationEstimate {
    pub slope: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NetClass {
    Moderate(u32),
    Negligible,
    Neither,
}

impl NetClass {
    pub fn is_moderate(&self) -> bool {
        !matches!(self, NetClass::Neither)
    }
}

impl std::fmt::Display for NetClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NetClass::Moderate(n) => write!(f, "moderate({n})"),
            NetClass::Negligible => f.write_str("negligible"),
            NetClass::Neither => f.write_str("neither"),
        }
    }
}

impl SampledNet {
    /// Samples a callable net pointwise. Non-finite values are flagged as
    /// overflow; NaN is an evaluation error.
    pub fn sample<F>(grid: &EpsGrid, note: impl Into<String>, mut f: F) -> Result<Self, NetError>
    where
        F: FnMut(f64) -> Complex64,
    {
        let mut points = Vec::with_capacity(grid.len());
        for eps in grid.points() {
            let v = f(eps);
            if v.re.is_nan() || v.im.is_nan() {
                return Err(NetError::Evaluation {
                    eps,
                    reason: "NaN".into(),
                });
            }
            points.push(NetPoint::from_value(eps, v));
        }
        Ok(SampledNet {
            grid: *grid,
            points,
            note: note.into(),
        })
    }

    /// Samples a net given in log-magnitude form `ε ↦ (ln|x_ε|, x_ε)`.
    pub fn sample_log<F>(grid: &EpsGrid, note: impl Into<String>, mut f: F) -> Result<Self, NetError>
    where
        F: FnMut(f64) -> (f64, Complex64),
    {
        let mut points = Vec::with_capacity(grid.len());
        for eps in grid.points() {
            let (l, v) = f(eps);
            if l.is_nan() {
                return Err(NetError::Evaluation {
                    eps,
                    reason: "NaN log-magnitude".into(),
                });
            }
            points.push(NetPoint::from_log(eps, l, v));
        }
        Ok(SampledNet {
            grid: *grid,
            points,
            note: note.into(),
        })
    }

    /// Samples the representative `Σ c ε^a` of a symbolic scalar.
    pub fn from_scalar(x: &AsymptoticScalar, grid: &EpsGrid) -> Self {
        Self::sample_log(grid, format!("scalar {x}"), |eps| x.eval_log(eps))
            .expect("scalar representatives are finite")
    }

    /// Pointwise difference `a − b`; entries below `rel_floor · max(|a|,|b|)`
    /// are set to exact zero (floating-point resolution of the comparison).
    pub fn difference(a: &SampledNet, b: &SampledNet, rel_floor: f64) -> SampledNet {
        let points = a
            .points
            .iter()
            .zip(&b.points)
            .map(|(p, q)| {
                let d = p.value - q.value;
                let scale = p.value.norm().max(q.value.norm());
                if d.norm() <= rel_floor * scale {
                    NetPoint::from_value(p.eps, Complex64::new(0.0, 0.0))
                } else {
                    NetPoint::from_value(p.eps, d)
                }
            })
            .collect();
        SampledNet {
            grid: a.grid,
            points,
            note: format!("({}) - ({})", a.note, b.note),
        }
    }

    fn tail_points(&self, window: usize) -> &[NetPoint] {
        let n = self.points.len();
        &self.points[n.saturating_sub(window)..]
    }

    /// Least-squares slope of `ln|x_ε|` against `ln ε` over the finite
    /// points of the last `window` points, summed in index order. Exact
    /// zeros are consistent with any decay and are skipped; a tail that is
    /// mostly zero reads as `AllZero`.
    pub fn estimate_valuation(&self, window: usize) -> Result<ValuationEstimate, NetError> {
        let tail = self.tail_points(window);
        let zeros = tail.iter().filter(|p| p.ln_abs == f64::NEG_INFINITY).count();
        let usable: Vec<(f64, f64)> = tail
            .iter()
            .filter(|p| p.ln_abs.is_finite())
            .map(|p| (p.eps.ln(), p.ln_abs))
            .collect();
        if usable.len() + zeros < tail.len() || tail.is_empty() {
            return Err(NetError::InsufficientData {
                usable: usable.len(),
                window,
            });
        }
        if usable.len() < (tail.len() / 2).max(3) {
            return Err(NetError::AllZero);
        }
        let n = usable.len() as f64;
        let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
        let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = usable.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = sxy / sxx;
        let ssr: f64 = usable
            .iter()
            .map(|p| {
                let r = p.1 - my - slope * (p.0 - mx);
                r * r
            })
            .sum();
        let stderr = (ssr / (n - 2.0) / sxx).sqrt();
        Ok(ValuationEstimate { slope, stderr })
    }

    /// Moderate / negligible / neither on the tail window.
    pub fn classify(&self, cfg: &OracleConfig) -> NetClass {
        match self.estimate_valuation(cfg.window) {
            Err(NetError::AllZero) => return NetClass::Negligible,
            Ok(est) if est.slope >= cfg.v_neg - 1e-9 * cfg.v_neg.abs() => return NetClass::Negligible,
            _ => {}
        }
        let tail = self.tail_points(cfg.window);
        if tail.iter().any(|p| p.overflow) {
            return NetClass::Neither;
        }
        (0..=cfg.n_max)
            .find(|&n| {
                tail.iter().all(|p| {
                    let bound = n as f64 * (-p.eps.ln());
                    p.ln_abs <= bound + 1e-9 * (1.0 + bound.abs())
                })
            })
            .map(NetClass::Moderate)
            .unwrap_or(NetClass::Neither)
    }

    /// `x_ε` invertible in the generalized sense: bounded below by some
    /// `ε^m` on the tail, read through the valuation estimate.
    pub fn is_invertible(&self, cfg: &OracleConfig) -> bool {
        let tail = self.tail_points(cfg.window);
        if tail.iter().any(|p| p.ln_abs == f64::NEG_INFINITY) {
            return false;
        }
        matches!(self.estimate_valuation(cfg.window), Ok(e) if e.slope < cfg.v_neg - 1e-9 * cfg.v_neg.abs())
    }

    /// Largest `|x_ε|` on the tail, in log form.
    pub fn tail_max_ln(&self, window: usize) -> f64 {
        self.tail_points(window)
            .iter()
            .map(|p| p.ln_abs)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn grid() -> EpsGrid {
        EpsGrid::default()
    }

    #[test]
    fn samples_powers_and_constants() {
        let x = AsymptoticScalar::rho_pow(Rational::new(3, 2));
        let net = SampledNet::from_scalar(&x, &grid());
        for p in &net.points {
            assert!((p.value.re - p.eps.powf(1.5)).abs() <= 1e-12 * p.eps.powf(1.5));
        }
        let one = SampledNet::sample(&grid(), "1", |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(one.points.iter().all(|p| p.value.re == 1.0));
        let tiny = SampledNet::sample(&grid(), "exp(-1/eps)", |e| Complex64::new((-1.0 / e).exp(), 0.0)).unwrap();
        assert!(tiny.points.last().unwrap().value.re == 0.0);
    }

    #[test]
    fn valuation_estimates() {
        let x = AsymptoticScalar::rho_pow(Rational::new(3, 2));
        let est = SampledNet::from_scalar(&x, &grid()).estimate_valuation(16).unwrap();
        assert!((est.slope - 1.5).abs() <= 0.05 && est.stderr <= 0.05);

        let one = SampledNet::from_scalar(&AsymptoticScalar::one(), &grid());
        let est = one.estimate_valuation(16).unwrap();
        assert!(est.slope.abs() <= 0.01 && est.stderr <= 0.01);

        let flat = SampledNet::sample_log(&grid(), "exp(-1/eps)", |e| (-1.0 / e, Complex64::new(0.0, 0.0))).unwrap();
        let est = flat.estimate_valuation(16).unwrap();
        assert!(est.slope > 20.0);
        assert_eq!(flat.classify(&OracleConfig::default()), NetClass::Negligible);
    }

    #[test]
    fn classification() {
        let cfg = OracleConfig::default();
        let m3 = SampledNet::from_scalar(&AsymptoticScalar::rho_pow(Rational::from_integer(-3)), &grid());
        assert_eq!(m3.classify(&cfg), NetClass::Moderate(3));
        let neg = SampledNet::sample(&grid(), "exp(-1/eps)", |e| Complex64::new((-1.0 / e).exp(), 0.0)).unwrap();
        assert_eq!(neg.classify(&cfg), NetClass::Negligible);
        let big = SampledNet::sample_log(&grid(), "exp(1/eps)", |e| (1.0 / e, Complex64::new(f64::INFINITY, 0.0))).unwrap();
        assert_eq!(big.classify(&cfg), NetClass::Neither);
        let zero = SampledNet::from_scalar(&AsymptoticScalar::zero(), &grid());
        assert_eq!(zero.classify(&cfg), NetClass::Negligible);
    }

    #[test]
    fn nan_is_an_error() {
        let r = SampledNet::sample(&grid(), "nan", |_| Complex64::new(f64::NAN, 0.0));
        assert!(matches!(r, Err(NetError::Evaluation { .. })));
    }

    #[test]
    fn bad_grids_rejected() {
        assert!(EpsGrid::new(10, 10, 0.5).is_err());
        assert!(EpsGrid::new(1, 10, 1.5).is_err());
    }
}
