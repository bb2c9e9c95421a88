//! Zeros accumulating at a point force a holomorphic function to vanish.
//!
//! The check reports the accumulation hypothesis and the derivative
//! cascade separately. All `D^k u(z₀)` negligible already implies `u ≡ 0`
//! on the ball, so the verdict follows the cascade whenever it succeeds;
//! a failed hypothesis then only makes the zero list irrelevant.

use num_complex::Complex64;
use serde::Serialize;

use super::{sum_at, PowerSeries};
use crate::func::{factorial, Domain, GenFunction, Holomorphy};
use crate::net::{EpsGrid, NetClass, OracleConfig, SampledNet};
use crate::scalar::GenComplex;
use crate::sets::SharpBall;

/// Cascade depth: orders `0..=K_MAX` are examined.
pub const K_MAX: u32 = 10;
/// The zero list must reach sharp distance `≤ e^{−3}` from the centre.
pub const ACCUMULATION_LN_RADIUS: f64 = -3.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypothesis {
    pub holds: bool,
    pub reason: String,
    /// `‖z_j − z₀‖` in list order.
    pub norms: Vec<f64>,
    /// `u(z_j)` confirmed negligible.
    pub zeros_confirmed: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeLevel {
    pub order: u32,
    /// `D^k u(z₀)/k!`
    pub coefficient: String,
    pub negligible: bool,
    /// Zeros at which the `k`-fold deflation is negligible.
    pub zeros_negligible: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum UnicityVerdict {
    /// All `D^k u(z₀)` negligible up to `depth`: `u ≡ 0` on the ball.
    IdenticallyZero { depth: u32 },
    /// The accumulation hypothesis holds but `D^order u(z₀)` is not negligible.
    NonZeroAt { order: u32 },
    /// No strict accumulation of zeros and no vanishing cascade: inconclusive.
    HypothesisFails(String),
    NotApplicable(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnicityReport {
    pub hypothesis: Hypothesis,
    pub levels: Vec<CascadeLevel>,
    pub verdict: UnicityVerdict,
}

fn check_hypothesis(u: &GenFunction, ball: &SharpBall, zeros: &[GenComplex], grid: &EpsGrid, cfg: &OracleConfig) -> Hypothesis {
    let norms: Vec<f64> = zeros.iter().map(|z| (z - &ball.center).sharp_norm().value).collect();
    let zeros_confirmed = zeros
        .iter()
        .map(|z| u.eval(z, grid).map(|v| v.is_negligible(cfg)).unwrap_or(false))
        .collect();
    let mut reason = String::new();
    if let Some(z) = zeros.iter().find(|z| (*z - &ball.center).is_empty()) {
        reason = format!("zero {z} is not invertibly separated from the centre");
    } else if let Some(z) = zeros.iter().find(|z| !ball.contains(z)) {
        reason = format!("zero {z} lies outside the ball");
    } else {
        let mut distinct = norms.clone();
        distinct.sort_by(|a, b| b.total_cmp(a));
        distinct.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        let min = distinct.last().copied().unwrap_or(f64::INFINITY);
        if distinct.len() < 3 {
            reason = format!("only {} distinct sharp distances; no accumulation", distinct.len());
        } else if min.ln() > ACCUMULATION_LN_RADIUS {
            reason = format!("sharp distances stall at {min:.4} > e^{ACCUMULATION_LN_RADIUS}");
        }
    }
    Hypothesis {
        holds: reason.is_empty(),
        reason: if reason.is_empty() { "zeros accumulate strictly at the centre".into() } else { reason },
        norms,
        zeros_confirmed,
    }
}

/// Series form around the centre for symbolic variants.
fn symbolic_series(u: &GenFunction, center: &GenComplex) -> Option<PowerSeries> {
    match u {
        GenFunction::Poly(p) if p.is_holomorphic() => Some(PowerSeries::polynomial(center.clone(), p.taylor_at(center))),
        GenFunction::Series(ts) if (&ts.series.center - center).is_empty() => Some(ts.series.clone()),
        _ => None,
    }
}

fn symbolic_cascade(s: PowerSeries, zeros: &[GenComplex]) -> Vec<CascadeLevel> {
    let mut levels = Vec::new();
    let mut cur = s;
    for k in 0..=K_MAX {
        let Some(a) = cur.coefficient(0) else {
            levels.push(CascadeLevel {
                order: k,
                coefficient: "unknown".into(),
                negligible: false,
                zeros_negligible: 0,
            });
            break;
        };
        let negligible = a.is_empty();
        let zeros_negligible = zeros
            .iter()
            .filter(|z| sum_at(&cur, z, cur.cap).map(|v| v.value.is_empty()).unwrap_or(false))
            .count();
        levels.push(CascadeLevel {
            order: k,
            coefficient: a.to_string(),
            negligible,
            zeros_negligible,
        });
        if !negligible {
            break;
        }
        match cur.deflate() {
            Ok(next) => cur = next,
            Err(_) => break,
        }
    }
    levels
}

/// Per-`ε` cascade from `D^k u_ε(z₀)/k!`; the deflated values at a zero
/// are `(u_ε(z) − Σ_{i<k} a_{i,ε} w^i) / w^k`.
fn sampled_cascade(
    u: &GenFunction,
    center: &GenComplex,
    zeros: &[GenComplex],
    grid: &EpsGrid,
    cfg: &OracleConfig,
) -> Result<Vec<CascadeLevel>, String> {
    let coeff_net = |k: u32| {
        let mut missing = false;
        let net = SampledNet::sample(grid, format!("D^{k} u(z0)/{k}!"), |eps| {
            match u.freeze(eps).eval(center.eval(eps), k, 0) {
                Some(v) => v / factorial(k),
                None => {
                    missing = true;
                    Complex64::new(0.0, 0.0)
                }
            }
        });
        match net {
            Ok(n) if !missing => Ok(n),
            Ok(_) => Err(format!("no derivative formula for order {k}")),
            Err(e) => Err(e.to_string()),
        }
    };
    let mut levels = Vec::new();
    let mut coeffs: Vec<SampledNet> = Vec::new();
    for k in 0..=K_MAX {
        let a = coeff_net(k)?;
        let negligible = a.classify(cfg) == NetClass::Negligible;
        coeffs.push(a);
        let zeros_negligible = zeros
            .iter()
            .filter(|z| {
                let net = SampledNet::sample(grid, "deflated value", |eps| {
                    let idx = grid.points().position(|e| e == eps).unwrap_or(0);
                    let w = z.eval(eps) - center.eval(eps);
                    let mut r = u.freeze(eps).value(z.eval(eps)).unwrap_or(Complex64::new(f64::NAN, 0.0));
                    for (i, c) in coeffs.iter().enumerate().take(k as usize) {
                        r -= c.points[idx].value * w.powu(i as u32);
                    }
                    r / w.powu(k)
                });
                matches!(net, Ok(n) if n.classify(cfg) == NetClass::Negligible)
            })
            .count();
        let last = coeffs.last().and_then(|n| n.points.last()).map(|p| p.value).unwrap_or_default();
        levels.push(CascadeLevel {
            order: k,
            coefficient: format!("sampled net (tail value {last})"),
            negligible,
            zeros_negligible,
        });
        if !negligible {
            break;
        }
    }
    Ok(levels)
}

pub fn unicity_check(u: &GenFunction, ball: &SharpBall, zeros: &[GenComplex], grid: &EpsGrid, cfg: &OracleConfig) -> UnicityReport {
    let hypothesis = check_hypothesis(u, ball, zeros, grid, cfg);
    if let Holomorphy::NotHolomorphic { witness } = u.dbar_test(&Domain::Ball(ball.clone()), grid, cfg) {
        return UnicityReport {
            hypothesis,
            levels: Vec::new(),
            verdict: UnicityVerdict::NotApplicable(format!("not holomorphic on the ball: {witness}")),
        };
    }
    let levels = match symbolic_series(u, &ball.center) {
        Some(s) => Ok(symbolic_cascade(s, zeros)),
        None => sampled_cascade(u, &ball.center, zeros, grid, cfg),
    };
    let levels = match levels {
        Ok(l) => l,
        Err(e) => {
            return UnicityReport {
                hypothesis,
                levels: Vec::new(),
                verdict: UnicityVerdict::NotApplicable(e),
            }
        }
    };
    let first_bad = levels.iter().find(|l| !l.negligible).map(|l| l.order);
    let verdict = match (first_bad, hypothesis.holds) {
        (None, _) => UnicityVerdict::IdenticallyZero { depth: K_MAX },
        (Some(order), true) => UnicityVerdict::NonZeroAt { order },
        (Some(_), false) => UnicityVerdict::HypothesisFails(hypothesis.reason.clone()),
    };
    UnicityReport {
        hypothesis,
        levels,
        verdict,
    }
}
