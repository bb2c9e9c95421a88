//! Four equivalent descriptions of holomorphy on a sharp ball, checked
//! independently, and growth analysis of entire functions through Cauchy
//! estimates on circles of growing radius.

use num_complex::Complex64;
use serde::Serialize;

use super::{convergence_radius, representative_agrees, sum_at, PowerSeries};
use crate::func::{factorial, Domain, GenFunction, Holomorphy, Poly};
use crate::net::{EpsGrid, NetClass, OracleConfig};
use crate::scalar::{rat, AsymptoticScalar, GenComplex};
use crate::sets::SharpBall;

/// Orders used for the limsup estimate of condition (2).
const GROWTH_ORDERS: std::ops::RangeInclusive<u32> = 6..=12;
const SUITE_POINTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub holds: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharacterizationReport {
    /// (1) `∂̄u = 0`, (2) derivative growth, (3) series form,
    /// (4) polynomial representative.
    pub conditions: [Condition; 4],
    /// `((i, j), agree)` for the six pairs.
    pub agreement: Vec<((usize, usize), bool)>,
}

impl CharacterizationReport {
    pub fn all_agree(&self) -> bool {
        self.agreement.iter().all(|(_, a)| *a)
    }

    pub fn all_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }
}

fn suite_points(ball: &SharpBall) -> Vec<GenComplex> {
    let mut pts = vec![ball.center.clone()];
    pts.extend(ball.sample_points(SUITE_POINTS - 1));
    pts
}

/// `‖∂^α u(z)‖` maximized over `|α| = k`; zero for vanishing derivatives.
fn derivative_norm(u: &GenFunction, z: &GenComplex, k: u32, grid: &EpsGrid) -> Option<f64> {
    match u {
        GenFunction::Poly(p) => Some(
            (0..=k)
                .map(|b| {
                    let d = p.derivative(k - b, b);
                    if d.is_zero() {
                        0.0
                    } else {
                        d.eval(z).sharp_norm().value
                    }
                })
                .fold(0.0, f64::max),
        ),
        GenFunction::Series(ts) => {
            let d = ts.series.derivative(k as usize);
            sum_at(&d, z, ts.series.cap).ok().map(|s| s.value.sharp_norm().value)
        }
        _ => {
            let v = u.d(k).ok()?.eval(z, grid).ok()?;
            v.as_exact().map(|x| x.sharp_norm().value)
        }
    }
}

fn condition_two(u: &GenFunction, ball: &SharpBall, pts: &[GenComplex], grid: &EpsGrid) -> Condition {
    let dbar_at_center = match u {
        GenFunction::Poly(p) => p.dbar().eval(&ball.center).is_empty(),
        GenFunction::Series(_) => true,
        _ => false,
    };
    if !dbar_at_center {
        return Condition {
            holds: false,
            note: "dbar u(z0) is not zero".into(),
        };
    }
    let bound = 1.0 / ball.radius;
    let mut worst = 0.0f64;
    for z in pts {
        for k in GROWTH_ORDERS {
            match derivative_norm(u, z, k, grid) {
                Some(n) => worst = worst.max(n.powf(1.0 / k as f64)),
                None => {
                    return Condition {
                        holds: false,
                        note: format!("order {k} derivative unavailable at {z}"),
                    }
                }
            }
        }
    }
    Condition {
        holds: worst <= bound * (1.0 + 1e-12),
        note: format!("max over orders {GROWTH_ORDERS:?} of ||D^a u||^(1/|a|) = {worst:.4}, bound 1/r = {bound:.4}"),
    }
}

fn condition_three(u: &GenFunction, ball: &SharpBall) -> Condition {
    match u {
        GenFunction::Poly(p) if p.is_holomorphic() => Condition {
            holds: true,
            note: "finite Taylor expansion".into(),
        },
        GenFunction::Poly(_) => Condition {
            holds: false,
            note: "zbar monomials admit no power series in z".into(),
        },
        GenFunction::Series(ts) => {
            let r = convergence_radius(&ts.series).radius;
            Condition {
                holds: r >= ball.radius,
                note: format!("convergence radius {r}"),
            }
        }
        _ => Condition {
            holds: false,
            note: "no symbolic series form".into(),
        },
    }
}

fn condition_four(u: &GenFunction, ball: &SharpBall, pts: &[GenComplex], grid: &EpsGrid, cfg: &OracleConfig) -> Condition {
    match u {
        GenFunction::Poly(p) => {
            let taylor = PowerSeries::polynomial(ball.center.clone(), p.taylor_at(&ball.center));
            for z in pts {
                let direct = p.eval(z);
                let via = match sum_at(&taylor, z, direct.cap()) {
                    Ok(s) => s.value,
                    Err(e) => {
                        return Condition {
                            holds: false,
                            note: e.to_string(),
                        }
                    }
                };
                if !direct.approx_eq(&via) {
                    return Condition {
                        holds: false,
                        note: format!("polynomial representative differs at {z}: {direct} vs {via}"),
                    };
                }
            }
            Condition {
                holds: true,
                note: format!("Taylor polynomial agrees at {} points", pts.len()),
            }
        }
        GenFunction::Series(ts) => {
            for z in pts {
                match representative_agrees(&ts.series, ts.schedule, z, grid, cfg) {
                    Ok((NetClass::Negligible, _)) => {}
                    Ok((c, _)) => {
                        return Condition {
                            holds: false,
                            note: format!("representative gap at {z} is {c}"),
                        }
                    }
                    Err(e) => {
                        return Condition {
                            holds: false,
                            note: e.to_string(),
                        }
                    }
                }
            }
            Condition {
                holds: true,
                note: format!("truncated representative matches the sum at {} points", pts.len()),
            }
        }
        _ => Condition {
            holds: false,
            note: "not symbolic".into(),
        },
    }
}

/// Evaluates the four conditions independently on a sharp ball.
pub fn characterization_suite(u: &GenFunction, ball: &SharpBall, grid: &EpsGrid, cfg: &OracleConfig) -> CharacterizationReport {
    let pts = suite_points(ball);
    let one = match u.dbar_test(&Domain::Ball(ball.clone()), grid, cfg) {
        Holomorphy::Holomorphic => Condition {
            holds: true,
            note: "dbar u = 0".into(),
        },
        Holomorphy::NotHolomorphic { witness } => Condition {
            holds: false,
            note: witness,
        },
    };
    let conditions = [
        one,
        condition_two(u, ball, &pts, grid),
        condition_three(u, ball),
        condition_four(u, ball, &pts, grid, cfg),
    ];
    let mut agreement = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            agreement.push(((i + 1, j + 1), conditions[i].holds == conditions[j].holds));
        }
    }
    CharacterizationReport { conditions, agreement }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GrowthClaim {
    /// `|u| ≤ C`
    Bounded(AsymptoticScalar),
    /// `|u(z)| ≤ C (1 + |z|)^m`
    PolyGrowth(AsymptoticScalar, u32),
}

impl GrowthClaim {
    fn parts(&self) -> (&AsymptoticScalar, u32) {
        match self {
            GrowthClaim::Bounded(c) => (c, 0),
            GrowthClaim::PolyGrowth(c, m) => (c, *m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum GrowthVerdict {
    /// `D u` negligible at every sampled point.
    Constant { value: String },
    /// `D^{m+1} u` negligible at every sampled point.
    Polynomial { max_degree: u32 },
    /// The growth bound fails on a sampled circle.
    ClaimViolated {
        radius_exponent: u32,
        point: String,
        detail: String,
        /// A non-negligible `D^{m+1} u` value, when one was found.
        derivative_witness: Option<String>,
    },
    /// The bound held on every circle but a derivative is not negligible.
    Inconsistent { point: String, value: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    /// Valuation estimates of the Cauchy bound for `D^{m+1}u(z)` per radius
    /// exponent `n` at the first point; they grow with `n`.
    pub bound_slopes: Vec<(u32, Option<f64>)>,
    pub verdict: GrowthVerdict,
}

fn growth_points() -> Vec<GenComplex> {
    let c = |re: f64, im: f64| AsymptoticScalar::constant(Complex64::new(re, im));
    let rho = |p: i64, q: i64| AsymptoticScalar::rho_pow(num_rational::Ratio::new(p, q));
    vec![
        c(0.0, 0.0),
        c(1.0, 0.0),
        c(0.0, 1.0),
        c(-1.0, 1.0),
        rho(1, 1),
        rho(1, 2).scale(Complex64::new(2.0, 0.0)),
        c(3.0, 0.0),
        c(0.0, -2.0),
        &c(1.0, 0.0) + &rho(1, 1),
        rho(-1, 1),
    ]
}

/// Growth analysis of an entire function against a claimed bound.
///
/// On circles `|ζ − z| = ρ^{−n}`, `n = 1..=8`, the claim is tested at
/// 64 points per tail `ε` in log form; the Cauchy estimate then bounds
/// `D^{m+1} u(z)` by `(m+1)! r^{−m−1} max|u|`, which is checked directly.
pub fn entire_growth_analysis(u: &GenFunction, claim: &GrowthClaim, grid: &EpsGrid, cfg: &OracleConfig) -> Result<GrowthReport, String> {
    if let GenFunction::Series(ts) = u {
        let r = convergence_radius(&ts.series).radius;
        if r.is_finite() {
            return Err(format!("not entire: convergence radius {r}"));
        }
    }
    let (c, m) = claim.parts();
    let k = m + 1;
    let dk = u.d(k).map_err(|e| e.to_string())?;
    let tail = grid.tail(cfg.window);
    let points = growth_points();
    let mut bound_slopes = Vec::new();
    let mut violation: Option<(u32, String, String)> = None;
    'outer: for (pi, z) in points.iter().enumerate() {
        for n in 1..=8u32 {
            let radius = AsymptoticScalar::rho_pow(rat(-(n as i64)));
            let mut bound_ln = Vec::new();
            for eps in tail.points() {
                let zc = z.eval(eps);
                let (lr, _) = radius.eval_log(eps);
                let fr = u.freeze(eps);
                let mut max_ln = f64::NEG_INFINITY;
                for j in 0..64 {
                    let th = std::f64::consts::TAU * j as f64 / 64.0;
                    // ζ = z + r e^{iθ}; for huge r the centre is below resolution
                    let zeta = zc + Complex64::from_polar(lr.exp().min(1e300), th);
                    let l = fr.ln_abs(zeta).unwrap_or(f64::INFINITY);
                    max_ln = max_ln.max(l);
                }
                let (lc, _) = c.eval_log(eps);
                let lside = (zc.norm() + lr.exp().min(1e300)).ln_1p();
                let claim_ln = lc + m as f64 * lside;
                if max_ln > claim_ln + 1e-9 * (1.0 + claim_ln.abs()) {
                    violation = Some((
                        n,
                        z.to_string(),
                        format!("max |u| on the circle = e^{max_ln:.3} > claimed e^{claim_ln:.3} at eps = {eps:.3e}"),
                    ));
                    break 'outer;
                }
                bound_ln.push((eps, factorial(k).ln() - k as f64 * lr + max_ln));
            }
            if pi == 0 {
                let net = crate::net::SampledNet::sample_log(&tail, "cauchy bound", |eps| {
                    let l = bound_ln.iter().find(|b| b.0 == eps).map(|b| b.1).unwrap_or(f64::NAN);
                    (l, Complex64::new(1.0, 0.0))
                });
                bound_slopes.push((n, net.ok().and_then(|n| n.estimate_valuation(cfg.window).ok()).map(|e| e.slope)));
            }
        }
    }
    let mut witness = None;
    for z in &points {
        match dk.eval(z, grid) {
            Ok(v) if v.is_negligible(cfg) => {}
            Ok(v) => {
                witness = Some((z.to_string(), v.describe()));
                break;
            }
            Err(e) => {
                witness = Some((z.to_string(), e.to_string()));
                break;
            }
        }
    }
    let verdict = match (violation, witness) {
        (Some((n, point, detail)), w) => GrowthVerdict::ClaimViolated {
            radius_exponent: n,
            point,
            detail,
            derivative_witness: w.map(|(p, v)| format!("D^{k} u({p}) = {v}")),
        },
        (None, Some((point, value))) => GrowthVerdict::Inconsistent { point, value },
        (None, None) if m == 0 => GrowthVerdict::Constant {
            value: u
                .eval(&AsymptoticScalar::zero(), grid)
                .map(|v| v.describe())
                .unwrap_or_else(|e| e.to_string()),
        },
        (None, None) => GrowthVerdict::Polynomial { max_degree: m },
    };
    Ok(GrowthReport { bound_slopes, verdict })
}

/// `Σ_{n ≤ d} z^n / n!`.
pub fn truncated_exp(d: u32) -> GenFunction {
    let coeffs: Vec<AsymptoticScalar> = (0..=d).map(|n| AsymptoticScalar::real(1.0 / factorial(n))).collect();
    GenFunction::Poly(Poly::holomorphic(&coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::{Schedule, TruncatedSeries};

    fn unit_ball() -> SharpBall {
        SharpBall::new(AsymptoticScalar::zero(), 1.0).unwrap()
    }

    #[test]
    fn holomorphic_polynomial_passes_all() {
        let u = GenFunction::Poly(Poly::z().powi(3).add(&Poly::z().scale(&AsymptoticScalar::rho())));
        let r = characterization_suite(&u, &unit_ball(), &EpsGrid::default(), &OracleConfig::default());
        assert!(r.all_hold(), "{r:?}");
    }

    #[test]
    fn zbar_fails_condition_one() {
        let u = GenFunction::Poly(Poly::zbar());
        let r = characterization_suite(&u, &unit_ball(), &EpsGrid::default(), &OracleConfig::default());
        assert!(!r.conditions[0].holds);
        assert!(!r.conditions[2].holds && !r.conditions[3].holds);
    }

    #[test]
    fn rho_nsq_series_passes_all() {
        let u = GenFunction::Series(TruncatedSeries {
            series: PowerSeries::rho_nsq(AsymptoticScalar::zero()),
            schedule: Schedule::default(),
        });
        let r = characterization_suite(&u, &unit_ball(), &EpsGrid::default(), &OracleConfig::default());
        assert!(r.all_hold(), "{r:?}");
    }

    #[test]
    fn growth_verdicts() {
        let g = EpsGrid::default();
        let cfg = OracleConfig::default();
        let three = AsymptoticScalar::real(3.0) + AsymptoticScalar::rho();
        let u = GenFunction::Poly(Poly::constant(three));
        let r = entire_growth_analysis(&u, &GrowthClaim::Bounded(AsymptoticScalar::real(4.0)), &g, &cfg).unwrap();
        assert!(matches!(r.verdict, GrowthVerdict::Constant { .. }), "{:?}", r.verdict);
        let sq = GenFunction::Poly(Poly::z().powi(2));
        let r = entire_growth_analysis(&sq, &GrowthClaim::PolyGrowth(AsymptoticScalar::one(), 2), &g, &cfg).unwrap();
        assert_eq!(r.verdict, GrowthVerdict::Polynomial { max_degree: 2 });
        let r = entire_growth_analysis(&truncated_exp(10), &GrowthClaim::PolyGrowth(AsymptoticScalar::one(), 1), &g, &cfg).unwrap();
        match r.verdict {
            GrowthVerdict::ClaimViolated { derivative_witness, .. } => assert!(derivative_witness.is_some()),
            other => panic!("{other:?}"),
        }
    }
}
