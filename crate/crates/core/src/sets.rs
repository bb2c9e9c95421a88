//! Internal sets with parametric representatives.
//!
//! Each set is one of five shapes whose parameters are generalized numbers;
//! evaluating the parameters at `ε` gives the concrete region `A_ε`.
//! Suprema and infima over `A_ε` are approximated on a fixed quasi-uniform
//! sample.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Ratio;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::func::{Frozen, GenFunction, GenValue, Poly, SampledFn};
use crate::net::{EpsGrid, NetClass, NetPoint, OracleConfig, SampledNet};
use crate::scalar::{AsymptoticScalar, Comparison, GenComplex, Rational};

pub const SAMPLING_SEED: u64 = 0x5EED;
pub const BOUNDARY_SAMPLES: usize = 512;
pub const INTERIOR_SAMPLES: usize = 512;
/// Upper end of the margin search in `neighborhood_margin`.
pub const MAX_MARGIN: u32 = 64;
/// Upper end of the `n` search in `invertibility_on_set`.
pub const MAX_INVERTIBILITY_N: u32 = 40;
/// Smallest samples polished by Newton steps before taking the infimum.
const REFINE_STARTS: usize = 8;
const NEWTON_STEPS: usize = 200;
/// Relative Newton step below which the iterate is read as an exact zero.
const NEWTON_CONVERGED: f64 = 1e-12;

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;
const R2_A1: f64 = 0.754_877_666_246_692_8;
const R2_A2: f64 = 0.569_840_290_998_053_2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SetError {
    #[error("invalid set: {0}")]
    Invalid(String),
    #[error("degenerate shape at eps = {eps:e}: {reason}")]
    DegenerateShape { eps: f64, reason: String },
    #[error("set is not sharply bounded")]
    NotSharplyBounded,
    #[error("not a neighborhood for any m <= {MAX_MARGIN}")]
    NotNeighborhood,
    #[error("no closed-form margin for {0}")]
    ShapePairUnsupported(String),
}

/// A radius given directly as a net through `ln r_ε`, for radii outside
/// the symbolic class (such as `e^{1/ε}`).
#[derive(Clone)]
pub struct NetRadius {
    pub label: String,
    pub ln_radius: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for NetRadius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NetRadius({})", self.label)
    }
}

#[derive(Debug, Clone)]
pub enum Radius {
    Scalar(AsymptoticScalar),
    Net(NetRadius),
}

impl Radius {
    pub fn ln_at(&self, eps: f64) -> f64 {
        match self {
            Radius::Scalar(r) => r.eval_log(eps).0,
            Radius::Net(n) => (n.ln_radius)(eps),
        }
    }

    pub fn at(&self, eps: f64) -> f64 {
        match self {
            Radius::Scalar(r) => r.eval(eps).re,
            Radius::Net(n) => (n.ln_radius)(eps).exp(),
        }
    }

    pub fn as_scalar(&self) -> Option<&AsymptoticScalar> {
        match self {
            Radius::Scalar(r) => Some(r),
            Radius::Net(_) => None,
        }
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Scalar(r) => write!(f, "{r}"),
            Radius::Net(n) => write!(f, "{}", n.label),
        }
    }
}

#[derive(Debug, Clone)]
pub enum InternalSetRep {
    Disc { center: GenComplex, radius: Radius },
    /// Positively oriented unless `negative` is set.
    Circle { center: GenComplex, radius: AsymptoticScalar, negative: bool },
    Annulus { center: GenComplex, inner: AsymptoticScalar, outer: AsymptoticScalar },
    /// Axis-parallel rectangle with corners `lo` and `hi`.
    Rectangle { lo: GenComplex, hi: GenComplex },
    Segment { a: GenComplex, b: GenComplex },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Membership {
    Yes,
    No,
    Undecided,
}

/// Open ball `{z : ‖z − center‖ < radius}` for the sharp norm.
#[derive(Debug, Clone)]
pub struct SharpBall {
    pub center: GenComplex,
    pub radius: f64,
}

fn check_radius(r: &AsymptoticScalar, what: &str) -> Result<(), SetError> {
    if !r.is_real() {
        return Err(SetError::Invalid(format!("{what} {r} is not real")));
    }
    if !r.is_strictly_positive() {
        return Err(SetError::Invalid(format!("{what} {r} is not >> 0")));
    }
    Ok(())
}

impl InternalSetRep {
    pub fn disc(center: GenComplex, radius: AsymptoticScalar) -> Result<Self, SetError> {
        check_radius(&radius, "radius")?;
        Ok(InternalSetRep::Disc {
            center,
            radius: Radius::Scalar(radius),
        })
    }

    /// Disc with a radius known only as a net `ε ↦ ln r_ε`.
    pub fn disc_net<F>(center: GenComplex, label: impl Into<String>, ln_radius: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        InternalSetRep::Disc {
            center,
            radius: Radius::Net(NetRadius {
                label: label.into(),
                ln_radius: Arc::new(ln_radius),
            }),
        }
    }

    pub fn circle(center: GenComplex, radius: AsymptoticScalar) -> Result<Self, SetError> {
        check_radius(&radius, "radius")?;
        Ok(InternalSetRep::Circle {
            center,
            radius,
            negative: false,
        })
    }

    pub fn reversed(self) -> Self {
        match self {
            InternalSetRep::Circle { center, radius, negative } => InternalSetRep::Circle {
                center,
                radius,
                negative: !negative,
            },
            InternalSetRep::Segment { a, b } => InternalSetRep::Segment { a: b, b: a },
            other => other,
        }
    }

    pub fn annulus(center: GenComplex, inner: AsymptoticScalar, outer: AsymptoticScalar) -> Result<Self, SetError> {
        check_radius(&inner, "inner radius")?;
        check_radius(&outer, "outer radius")?;
        if inner.compare(&outer) != Comparison::MuchLess {
            return Err(SetError::Invalid(format!("inner radius {inner} is not << outer radius {outer}")));
        }
        Ok(InternalSetRep::Annulus { center, inner, outer })
    }

    pub fn rectangle(lo: GenComplex, hi: GenComplex) -> Result<Self, SetError> {
        for (a, b, axis) in [(lo.re(), hi.re(), "real"), (lo.im(), hi.im(), "imaginary")] {
            if a.compare(&b) != Comparison::MuchLess {
                return Err(SetError::Invalid(format!("{axis} extent {a} .. {b} is not proper")));
            }
        }
        Ok(InternalSetRep::Rectangle { lo, hi })
    }

    pub fn segment(a: GenComplex, b: GenComplex) -> Result<Self, SetError> {
        if (&b - &a).is_empty() {
            return Err(SetError::Invalid("segment endpoints coincide".into()));
        }
        Ok(InternalSetRep::Segment { a, b })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            InternalSetRep::Disc { .. } => "disc",
            InternalSetRep::Circle { .. } => "circle",
            InternalSetRep::Annulus { .. } => "annulus",
            InternalSetRep::Rectangle { .. } => "rectangle",
            InternalSetRep::Segment { .. } => "segment",
        }
    }

    /// The set moved by `d`.
    pub fn translated(&self, d: &GenComplex) -> Self {
        match self {
            InternalSetRep::Disc { center, radius } => InternalSetRep::Disc {
                center: center + d,
                radius: radius.clone(),
            },
            InternalSetRep::Circle { center, radius, negative } => InternalSetRep::Circle {
                center: center + d,
                radius: radius.clone(),
                negative: *negative,
            },
            InternalSetRep::Annulus { center, inner, outer } => InternalSetRep::Annulus {
                center: center + d,
                inner: inner.clone(),
                outer: outer.clone(),
            },
            InternalSetRep::Rectangle { lo, hi } => InternalSetRep::Rectangle { lo: lo + d, hi: hi + d },
            InternalSetRep::Segment { a, b } => InternalSetRep::Segment { a: a + d, b: b + d },
        }
    }

    /// Some member point.
    pub fn anchor(&self) -> GenComplex {
        match self {
            InternalSetRep::Disc { center, .. } => center.clone(),
            InternalSetRep::Circle { center, radius, .. } => center + radius,
            InternalSetRep::Annulus { center, outer, .. } => center + outer,
            InternalSetRep::Rectangle { lo, .. } => lo.clone(),
            InternalSetRep::Segment { a, .. } => a.clone(),
        }
    }

    fn parameters(&self) -> Vec<&AsymptoticScalar> {
        match self {
            InternalSetRep::Disc { center, radius } => {
                let mut v = vec![center];
                if let Radius::Scalar(r) = radius {
                    v.push(r);
                }
                v
            }
            InternalSetRep::Circle { center, radius, .. } => vec![center, radius],
            InternalSetRep::Annulus { center, inner, outer } => vec![center, inner, outer],
            InternalSetRep::Rectangle { lo, hi } => vec![lo, hi],
            InternalSetRep::Segment { a, b } => vec![a, b],
        }
    }

    /// The concrete region `A_ε`.
    pub fn concretize(&self, eps: f64) -> Result<ConcreteRegion, SetError> {
        let radius = |r: f64, what: &str| {
            if r > 0.0 && r.is_finite() {
                Ok(r)
            } else {
                Err(SetError::DegenerateShape {
                    eps,
                    reason: format!("{what} evaluates to {r}"),
                })
            }
        };
        Ok(match self {
            InternalSetRep::Disc { center, radius: r } => ConcreteRegion::Disc {
                c: center.eval(eps),
                r: radius(r.at(eps), "radius")?,
            },
            InternalSetRep::Circle { center, radius: r, negative } => ConcreteRegion::Circle {
                c: center.eval(eps),
                r: radius(r.eval(eps).re, "radius")?,
                negative: *negative,
            },
            InternalSetRep::Annulus { center, inner, outer } => {
                let (a, b) = (radius(inner.eval(eps).re, "inner radius")?, radius(outer.eval(eps).re, "outer radius")?);
                if a >= b {
                    return Err(SetError::DegenerateShape {
                        eps,
                        reason: format!("inner radius {a} >= outer radius {b}"),
                    });
                }
                ConcreteRegion::Annulus { c: center.eval(eps), r_in: a, r_out: b }
            }
            InternalSetRep::Rectangle { lo, hi } => ConcreteRegion::Rectangle {
                lo: lo.eval(eps),
                hi: hi.eval(eps),
            },
            InternalSetRep::Segment { a, b } => ConcreteRegion::Segment {
                a: a.eval(eps),
                b: b.eval(eps),
            },
        })
    }

    /// Symbolic member point for a sample parameter (no padding).
    fn symbolic_point(&self, s: &Sample) -> Option<GenComplex> {
        let unit = |frac: f64| Complex64::from_polar(1.0, TAU * frac);
        Some(match (self, s) {
            (InternalSetRep::Disc { center, radius }, Sample::Boundary(a, _)) => {
                center + &radius.as_scalar()?.scale(unit(*a))
            }
            (InternalSetRep::Disc { center, radius }, Sample::Interior(t, th)) => {
                center + &radius.as_scalar()?.scale(Complex64::from_polar(*t, *th))
            }
            (InternalSetRep::Circle { center, radius, .. }, Sample::Boundary(a, _) | Sample::Interior(a, _)) => {
                center + &radius.scale(unit(*a))
            }
            (InternalSetRep::Annulus { center, inner, outer }, Sample::Boundary(a, side)) => {
                let r = if *side > 0.5 { outer } else { inner };
                center + &r.scale(unit(*a))
            }
            (InternalSetRep::Annulus { center, inner, outer }, Sample::Interior(t, th)) => {
                let r = inner + &(outer - inner).scale(Complex64::new(*t, 0.0));
                center + &r.scale(Complex64::from_polar(1.0, *th))
            }
            (InternalSetRep::Rectangle { lo, hi }, _) => {
                let (x, y) = rect_fractions(s);
                let d = hi - lo;
                lo + &(&d.re().scale(Complex64::new(x, 0.0)) + &d.im().scale(Complex64::new(0.0, y)))
            }
            (InternalSetRep::Segment { a, b }, Sample::Boundary(t, _) | Sample::Interior(t, _)) => {
                a + &(b - a).scale(Complex64::new(*t, 0.0))
            }
        })
    }

    /// A pseudo-random member point. Radial fractions are sometimes scaled
    /// by `ρ^a` so that infinitesimally close points are exercised too.
    pub fn random_member<R: Rng>(&self, rng: &mut R) -> GenComplex {
        let s = match self {
            InternalSetRep::Rectangle { .. } => Sample::Interior(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)),
            InternalSetRep::Segment { .. } | InternalSetRep::Circle { .. } => {
                Sample::Interior(rng.gen_range(0.0..1.0), 0.0)
            }
            _ => Sample::Interior(rng.gen_range(0.0..0.98), rng.gen_range(0.0..TAU)),
        };
        let base = self.symbolic_point(&s).unwrap_or_else(|| self.anchor());
        // infinitesimal offsets towards the interior of discs
        if let (InternalSetRep::Disc { center, radius: Radius::Scalar(r) }, Sample::Interior(t, th)) = (self, &s) {
            if rng.gen_bool(0.3) {
                let a = Ratio::new(rng.gen_range(1..=8), 2);
                let off = r.shift(a).scale(Complex64::from_polar(*t, *th));
                return center + &off;
            }
        }
        base
    }

    /// Quasi-uniform sample of `A_ε + pad` together with its parameters.
    pub fn sample_at(&self, eps: f64, pad: f64) -> Result<(Vec<Sample>, Vec<Complex64>), SetError> {
        let region = self.concretize(eps)?;
        let params = region.params(BOUNDARY_SAMPLES, INTERIOR_SAMPLES);
        let pts = params.iter().map(|s| region.point(s, pad)).collect();
        Ok((params, pts))
    }
}

impl fmt::Display for InternalSetRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InternalSetRep::Disc { center, radius } => write!(f, "disc({center}; {radius})"),
            InternalSetRep::Circle { center, radius, negative } => {
                write!(f, "circle({center}; {radius}{})", if *negative { "; -" } else { "" })
            }
            InternalSetRep::Annulus { center, inner, outer } => write!(f, "annulus({center}; {inner}; {outer})"),
            InternalSetRep::Rectangle { lo, hi } => write!(f, "rect({lo}; {hi})"),
            InternalSetRep::Segment { a, b } => write!(f, "segment({a}; {b})"),
        }
    }
}

/// Sample parameter, interpreted per shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sample {
    /// Boundary position in `[0,1)` and a side selector.
    Boundary(f64, f64),
    /// Two interior coordinates (radial fraction and angle, or unit-square
    /// coordinates, or segment parameter and normal offset).
    Interior(f64, f64),
}

fn rect_fractions(s: &Sample) -> (f64, f64) {
    match *s {
        Sample::Interior(x, y) => (x, y),
        Sample::Boundary(p, _) => {
            let q = 4.0 * p;
            match q as u32 {
                0 => (q, 0.0),
                1 => (1.0, q - 1.0),
                2 => (3.0 - q, 1.0),
                _ => (0.0, 4.0 - q),
            }
        }
    }
}

/// A planar region with numeric parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConcreteRegion {
    Disc { c: Complex64, r: f64 },
    Circle { c: Complex64, r: f64, negative: bool },
    Annulus { c: Complex64, r_in: f64, r_out: f64 },
    Rectangle { lo: Complex64, hi: Complex64 },
    Segment { a: Complex64, b: Complex64 },
}

impl ConcreteRegion {
    /// Characteristic length.
    pub fn scale(&self) -> f64 {
        match *self {
            ConcreteRegion::Disc { r, .. } | ConcreteRegion::Circle { r, .. } => r,
            ConcreteRegion::Annulus { r_out, .. } => r_out,
            ConcreteRegion::Rectangle { lo, hi } => (hi - lo).norm(),
            ConcreteRegion::Segment { a, b } => (b - a).norm(),
        }
    }

    /// `sup |x|` over the region.
    pub fn max_modulus(&self) -> f64 {
        match *self {
            ConcreteRegion::Disc { c, r } | ConcreteRegion::Circle { c, r, .. } => c.norm() + r,
            ConcreteRegion::Annulus { c, r_out, .. } => c.norm() + r_out,
            ConcreteRegion::Rectangle { lo, hi } => [lo, hi, Complex64::new(lo.re, hi.im), Complex64::new(hi.re, lo.im)]
                .iter()
                .map(|p| p.norm())
                .fold(0.0, f64::max),
            ConcreteRegion::Segment { a, b } => a.norm().max(b.norm()),
        }
    }

    /// Euclidean distance from `z` to the region.
    pub fn distance(&self, z: Complex64) -> f64 {
        match *self {
            ConcreteRegion::Disc { c, r } => ((z - c).norm() - r).max(0.0),
            ConcreteRegion::Circle { c, r, .. } => ((z - c).norm() - r).abs(),
            ConcreteRegion::Annulus { c, r_in, r_out } => {
                let d = (z - c).norm();
                (r_in - d).max(d - r_out).max(0.0)
            }
            ConcreteRegion::Rectangle { lo, hi } => {
                let dx = (lo.re - z.re).max(z.re - hi.re).max(0.0);
                let dy = (lo.im - z.im).max(z.im - hi.im).max(0.0);
                dx.hypot(dy)
            }
            ConcreteRegion::Segment { a, b } => {
                let d = b - a;
                let t = (((z - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
                (z - (a + d * t)).norm()
            }
        }
    }

    pub fn params(&self, nb: usize, ni: usize) -> Vec<Sample> {
        let mut out = Vec::with_capacity(nb + ni);
        match self {
            ConcreteRegion::Annulus { .. } => {
                for k in 0..nb {
                    out.push(Sample::Boundary((k / 2) as f64 / (nb / 2).max(1) as f64, (k % 2) as f64));
                }
            }
            ConcreteRegion::Segment { .. } => {
                for k in 0..nb {
                    out.push(Sample::Boundary((k % 2) as f64, (k / 2) as f64 / (nb / 2).max(1) as f64));
                }
            }
            _ => {
                for k in 0..nb {
                    out.push(Sample::Boundary(k as f64 / nb as f64, 0.0));
                }
            }
        }
        match self {
            ConcreteRegion::Rectangle { .. } => {
                for k in 0..ni {
                    let x = (0.5 + k as f64 * R2_A1).fract();
                    let y = (0.5 + k as f64 * R2_A2).fract();
                    out.push(Sample::Interior(x, y));
                }
            }
            ConcreteRegion::Segment { .. } | ConcreteRegion::Circle { .. } => {
                for k in 0..ni {
                    let t = k as f64 / (ni.max(2) - 1) as f64;
                    out.push(Sample::Interior(t, (k as f64 * R2_A1).fract() * 2.0 - 1.0));
                }
            }
            _ => {
                // Vogel spiral; k = 0 is the centre
                for k in 0..ni {
                    let t = (k as f64 / (ni.max(2) - 1) as f64).sqrt();
                    out.push(Sample::Interior(t, k as f64 * GOLDEN_ANGLE));
                }
            }
        }
        out
    }

    /// Sample point of `region + pad`.
    pub fn point(&self, s: &Sample, pad: f64) -> Complex64 {
        let unit = |frac: f64| Complex64::from_polar(1.0, TAU * frac);
        match (*self, *s) {
            (ConcreteRegion::Disc { c, r }, Sample::Boundary(a, _)) => c + unit(a) * (r + pad),
            (ConcreteRegion::Disc { c, r }, Sample::Interior(t, th)) => c + Complex64::from_polar(t * (r + pad), th),
            (ConcreteRegion::Circle { c, r, .. }, Sample::Boundary(a, _)) => c + unit(a) * r,
            (ConcreteRegion::Circle { c, r, .. }, Sample::Interior(a, off)) => c + unit(a) * (r + pad * off),
            (ConcreteRegion::Annulus { c, r_in, r_out }, Sample::Boundary(a, side)) => {
                let r = if side > 0.5 { r_out + pad } else { (r_in - pad).max(0.0) };
                c + unit(a) * r
            }
            (ConcreteRegion::Annulus { c, r_in, r_out }, Sample::Interior(t, th)) => {
                let a = (r_in - pad).max(0.0);
                c + Complex64::from_polar(a + (r_out + pad - a) * t, th)
            }
            (ConcreteRegion::Rectangle { lo, hi }, s) => {
                let (x, y) = rect_fractions(&s);
                let p = Complex64::new(pad, pad);
                let (lo, hi) = (lo - p, hi + p);
                Complex64::new(lo.re + (hi.re - lo.re) * x, lo.im + (hi.im - lo.im) * y)
            }
            (ConcreteRegion::Segment { a, b }, Sample::Boundary(t, side)) => {
                let d = b - a;
                let base = a + d * t;
                if pad == 0.0 {
                    base
                } else {
                    base + Complex64::from_polar(pad, d.arg() + std::f64::consts::PI * (side * 2.0 + t))
                }
            }
            (ConcreteRegion::Segment { a, b }, Sample::Interior(t, off)) => {
                let d = b - a;
                let n = d * Complex64::i() / d.norm();
                a + d * t + n * (pad * off)
            }
        }
    }

    pub fn sample_points(&self, nb: usize, ni: usize, pad: f64) -> Vec<Complex64> {
        self.params(nb, ni).iter().map(|s| self.point(s, pad)).collect()
    }
}

impl SharpBall {
    pub fn new(center: GenComplex, radius: f64) -> Result<Self, SetError> {
        if !(radius > 0.0) {
            return Err(SetError::Invalid(format!("sharp radius {radius} must be positive")));
        }
        Ok(SharpBall { center, radius })
    }

    pub fn contains(&self, z: &GenComplex) -> bool {
        (z - &self.center).sharp_norm().value < self.radius
    }

    /// Member points `center + ρ^e e^{iθ}` with `e^{−e} < radius`.
    pub fn sample_points(&self, n: usize) -> Vec<GenComplex> {
        let base = -self.radius.ln();
        (0..n)
            .map(|k| {
                let a = 0.125 + 1.875 * (k as f64 / n.max(1) as f64);
                let e = Ratio::new(((base + a) * 64.0).ceil() as i64, 64);
                let th = k as f64 * GOLDEN_ANGLE;
                &self.center + &AsymptoticScalar::monomial(Complex64::from_polar(1.0, th), e)
            })
            .collect()
    }
}

fn distance_net(set: &InternalSetRep, point: impl Fn(f64) -> Complex64, grid: &EpsGrid) -> Option<SampledNet> {
    SampledNet::sample(grid, format!("distance to {set}"), |eps| match set.concretize(eps) {
        // radii beyond floating range: every finite point is inside
        Err(_) if matches!(set, InternalSetRep::Disc { radius: Radius::Net(_), .. }) => {
            if let InternalSetRep::Disc { center, radius } = set {
                let d = (point(eps) - center.eval(eps)).norm() - radius.at(eps);
                Complex64::new(d.max(0.0), 0.0)
            } else {
                unreachable!()
            }
        }
        Ok(region) => {
            let z = point(eps);
            let d = region.distance(z);
            // below the resolution of the comparison
            let floor = 1e-12 * (region.max_modulus() + z.norm());
            Complex64::new(if d <= floor { 0.0 } else { d }, 0.0)
        }
        Err(_) => Complex64::new(f64::NAN, 0.0),
    })
    .ok()
}

fn numeric_membership(net: Option<SampledNet>, cfg: &OracleConfig) -> Membership {
    match net {
        Some(n) if n.classify(cfg) == NetClass::Negligible => Membership::Yes,
        Some(_) => Membership::No,
        None => Membership::Undecided,
    }
}

/// Sign test of a real difference `x − y` against zero: `Some(true)` when
/// `x ≥ y` up to negligibility, with the knowledge cap of the difference.
fn symbolic_ge(x: &AsymptoticScalar, y: &AsymptoticScalar) -> (Option<bool>, Option<Rational>) {
    let d = x - y;
    match x.compare(y) {
        Comparison::MuchGreater => (Some(true), None),
        Comparison::Approx => (Some(true), Some(d.cap())),
        Comparison::MuchLess => (Some(false), None),
        Comparison::Incomparable => (None, None),
    }
}

fn symbolic_membership(set: &InternalSetRep, z: &GenComplex) -> (Option<bool>, Option<Rational>) {
    let mut caps: Vec<Rational> = Vec::new();
    let mut all = |checks: Vec<(Option<bool>, Option<Rational>)>| -> Option<bool> {
        let mut ok = true;
        for (v, c) in checks {
            caps.extend(c);
            match v {
                Some(true) => {}
                Some(false) => ok = false,
                None => return None,
            }
        }
        Some(ok)
    };
    let verdict = match set {
        InternalSetRep::Disc { center, radius } => {
            let r = match radius.as_scalar() {
                Some(r) => r,
                None => return (None, None),
            };
            let d2 = (z - center).modulus_squared();
            all(vec![symbolic_ge(&r.modulus_squared(), &d2)])
        }
        InternalSetRep::Circle { center, radius, .. } => {
            let d2 = (z - center).modulus_squared();
            let r2 = radius.modulus_squared();
            all(vec![symbolic_ge(&r2, &d2), symbolic_ge(&d2, &r2)])
        }
        InternalSetRep::Annulus { center, inner, outer } => {
            let d2 = (z - center).modulus_squared();
            all(vec![
                symbolic_ge(&d2, &inner.modulus_squared()),
                symbolic_ge(&outer.modulus_squared(), &d2),
            ])
        }
        InternalSetRep::Rectangle { lo, hi } => all(vec![
            symbolic_ge(&z.re(), &lo.re()),
            symbolic_ge(&hi.re(), &z.re()),
            symbolic_ge(&z.im(), &lo.im()),
            symbolic_ge(&hi.im(), &z.im()),
        ]),
        InternalSetRep::Segment { a, b } => {
            let d = b - a;
            let w = &(z - a) * &d.conj();
            let l = d.modulus_squared();
            let zero = AsymptoticScalar::zero_with_cap(w.cap());
            let im = w.im();
            all(vec![
                symbolic_ge(&im, &zero),
                symbolic_ge(&zero, &im),
                symbolic_ge(&w.re(), &zero),
                symbolic_ge(&l, &w.re()),
            ])
        }
    };
    (verdict, caps.into_iter().min())
}

/// Membership `z̃ ∈ A` through negligibility of the distance.
///
/// Shapes with symbolic parameters are decided on leading terms. A verdict
/// that rests on an empty difference is only as good as its knowledge cap;
/// when that cap is below the negligibility threshold the answer is
/// `Undecided`.
pub fn contains(set: &InternalSetRep, z: &GenComplex, grid: &EpsGrid, cfg: &OracleConfig) -> Membership {
    match symbolic_membership(set, z) {
        (Some(true), Some(cap)) if (cap.to_integer() as f64) < cfg.v_neg => Membership::Undecided,
        (Some(true), _) => Membership::Yes,
        (Some(false), _) => Membership::No,
        (None, _) => numeric_membership(distance_net(set, |e| z.eval(e), grid), cfg),
    }
}

/// Membership of a point given only as a sampled net.
pub fn contains_net(set: &InternalSetRep, z: &SampledNet, cfg: &OracleConfig) -> Membership {
    let vals: Vec<(f64, Complex64)> = z.points.iter().map(|p| (p.eps, p.value)).collect();
    let lookup = |eps: f64| {
        vals.iter()
            .find(|(e, _)| *e == eps)
            .map(|(_, v)| *v)
            .unwrap_or(Complex64::new(f64::NAN, 0.0))
    };
    numeric_membership(distance_net(set, lookup, &z.grid), cfg)
}

/// Smallest `M` with `sup_{A_ε} |x| ≤ ε^{−M}`, read from the leading terms
/// of the parameters, or from the sampled sup for net-valued radii.
pub fn is_sharply_bounded(set: &InternalSetRep, grid: &EpsGrid, cfg: &OracleConfig) -> Result<u32, SetError> {
    if let InternalSetRep::Disc {
        center,
        radius: r @ Radius::Net(_),
    } = set
    {
        let net = SampledNet::sample_log(grid, format!("sup |x| on {set}"), |eps| {
            let (lc, _) = center.eval_log(eps);
            let lr = r.ln_at(eps);
            let m = lc.max(lr);
            let l = if m == f64::NEG_INFINITY { m } else { m + ((lc - m).exp() + (lr - m).exp()).ln() };
            (l, Complex64::new(1.0, 0.0))
        })
        .map_err(|_| SetError::NotSharplyBounded)?;
        return match net.classify(cfg) {
            NetClass::Moderate(m) => Ok(m),
            NetClass::Negligible => Ok(0),
            NetClass::Neither => Err(SetError::NotSharplyBounded),
        };
    }
    let v = set
        .parameters()
        .iter()
        .filter(|p| !p.is_empty())
        .map(|p| p.valuation_or_cap())
        .min();
    Ok(match v {
        Some(v) if v < Rational::from_integer(0) => (-v).ceil().to_integer() as u32,
        _ => 0,
    })
}

fn pad_scalar(m: u32) -> AsymptoticScalar {
    AsymptoticScalar::rho_pow(Rational::from_integer(m as i64))
}

/// All `points` lie in the disc `(c, r)` with room `extra + ρ^m`.
fn fits_in_disc(points: &[GenComplex], extra: &AsymptoticScalar, c: &GenComplex, r: &AsymptoticScalar, m: u32) -> bool {
    let room = &(r - extra) - &pad_scalar(m);
    if !room.ge_approx(&AsymptoticScalar::zero_with_cap(room.cap())) {
        return false;
    }
    let room2 = room.modulus_squared();
    points.iter().all(|p| room2.ge_approx(&(p - c).modulus_squared()))
}

/// The box `[lo − pad, hi + pad]` lies in the rectangle `(olo, ohi)`.
fn fits_in_rect(lo: &GenComplex, hi: &GenComplex, pad: &AsymptoticScalar, olo: &GenComplex, ohi: &GenComplex) -> bool {
    (&lo.re() - pad).ge_approx(&olo.re())
        && (&lo.im() - pad).ge_approx(&olo.im())
        && ohi.re().ge_approx(&(&hi.re() + pad))
        && ohi.im().ge_approx(&(&hi.im() + pad))
}

/// Smallest `m ≤ 64` such that the closed `ρ^m`-neighbourhood of `inner`
/// lies in `outer`.
pub fn neighborhood_margin(
    inner: &InternalSetRep,
    outer: &InternalSetRep,
    grid: &EpsGrid,
    cfg: &OracleConfig,
) -> Result<u32, SetError> {
    is_sharply_bounded(inner, grid, cfg)?;
    use InternalSetRep as S;
    let unsupported = || SetError::ShapePairUnsupported(format!("{} inside {}", inner.kind(), outer.kind()));
    let zero = AsymptoticScalar::zero();
    let test: Box<dyn Fn(u32) -> bool> = match (inner, outer) {
        (
            S::Disc { center: ci, radius: Radius::Scalar(ri) },
            S::Disc { center: co, radius: Radius::Scalar(ro) },
        )
        | (
            S::Circle { center: ci, radius: ri, .. },
            S::Disc { center: co, radius: Radius::Scalar(ro) },
        ) => Box::new(move |m| fits_in_disc(std::slice::from_ref(ci), ri, co, ro, m)),
        (S::Annulus { center: ci, outer: ri, .. }, S::Disc { center: co, radius: Radius::Scalar(ro) }) => {
            Box::new(move |m| fits_in_disc(std::slice::from_ref(ci), ri, co, ro, m))
        }
        (S::Segment { a, b }, S::Disc { center: co, radius: Radius::Scalar(ro) }) => {
            let pts = vec![a.clone(), b.clone()];
            Box::new(move |m| fits_in_disc(&pts, &zero, co, ro, m))
        }
        (S::Rectangle { lo, hi }, S::Disc { center: co, radius: Radius::Scalar(ro) }) => {
            let pts = vec![
                lo.clone(),
                hi.clone(),
                &lo.re() + &hi.im().scale(Complex64::i()),
                &hi.re() + &lo.im().scale(Complex64::i()),
            ];
            Box::new(move |m| fits_in_disc(&pts, &zero, co, ro, m))
        }
        (S::Rectangle { lo, hi }, S::Rectangle { lo: olo, hi: ohi }) => {
            Box::new(move |m| fits_in_rect(lo, hi, &pad_scalar(m), olo, ohi))
        }
        (S::Segment { a, b }, S::Rectangle { lo: olo, hi: ohi }) => Box::new(move |m| {
            let p = pad_scalar(m);
            [a, b].iter().all(|x| fits_in_rect(x, x, &p, olo, ohi))
        }),
        (
            S::Disc { center: c, radius: Radius::Scalar(r) } | S::Circle { center: c, radius: r, .. },
            S::Rectangle { lo: olo, hi: ohi },
        ) => Box::new(move |m| {
            let p = r + &pad_scalar(m);
            fits_in_rect(c, c, &p, olo, ohi)
        }),
        (
            S::Annulus { center: ci, inner: ii, outer: io } | S::Circle { center: ci, radius: ii @ io, .. },
            S::Annulus { center: co, inner: oi, outer: oo },
        ) if (ci - co).is_empty() => Box::new(move |m| {
            let p = pad_scalar(m);
            oo.ge_approx(&(io + &p)) && (ii - &p).ge_approx(oi)
        }),
        _ => return Err(unsupported()),
    };
    // beyond the coarsest cap ρ^m is invisible and every test passes vacuously
    let cap = inner
        .parameters()
        .into_iter()
        .chain(outer.parameters())
        .map(|p| p.cap().to_integer().max(1) as u32)
        .min()
        .unwrap_or(MAX_MARGIN + 1);
    (1..cap.min(MAX_MARGIN + 1)).find(|&m| test(m)).ok_or(SetError::NotNeighborhood)
}

/// Classification of one derivative order of `u` over a set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderClass {
    pub order: u32,
    pub class: NetClass,
    /// Estimated valuation of the sup-net.
    pub slope: Option<f64>,
    pub note: String,
}

/// Sup-nets `sup_{A_ε + ε^N} |∂^α u_ε|` for `|α| = 0..=k_max`, classified.
///
/// Holomorphic variants use `D^k`; polynomials with `z̄` terms take the
/// sup over all `(a, b)` with `a + b = k`.
pub fn classify_on_set(
    u: &GenFunction,
    set: &InternalSetRep,
    k_max: u32,
    pad: Option<u32>,
    grid: &EpsGrid,
    cfg: &OracleConfig,
) -> Vec<OrderClass> {
    let mixed = matches!(u, GenFunction::Poly(p) if !p.is_holomorphic());
    let orders = (k_max + 1) as usize;
    let mut sups: Vec<Vec<NetPoint>> = vec![Vec::with_capacity(grid.len()); orders];
    let mut notes: Vec<String> = vec![String::new(); orders];
    for eps in grid.points() {
        let padding = pad.map(|n| eps.powi(n as i32)).unwrap_or(0.0);
        let pts = match set.concretize(eps) {
            Ok(region) => region.sample_points(BOUNDARY_SAMPLES, INTERIOR_SAMPLES, padding),
            Err(e) => {
                for (k, s) in sups.iter_mut().enumerate() {
                    notes[k] = e.to_string();
                    s.push(NetPoint::from_value(eps, Complex64::new(f64::INFINITY, 0.0)));
                }
                continue;
            }
        };
        let fr = u.freeze(eps);
        for (k, s) in sups.iter_mut().enumerate() {
            let k = k as u32;
            let indices: Vec<(u32, u32)> = if mixed { (0..=k).map(|b| (k - b, b)).collect() } else { vec![(k, 0)] };
            let mut sup = 0.0f64;
            let mut missing = false;
            for &z in &pts {
                for &(a, b) in &indices {
                    match fr.eval(z, a, b) {
                        Some(v) => {
                            let n = v.norm();
                            if n.is_nan() || n > sup {
                                sup = if n.is_nan() { f64::INFINITY } else { n };
                            }
                        }
                        None => missing = true,
                    }
                }
            }
            if missing {
                notes[k as usize] = format!("no formula for order {k}");
                sup = f64::INFINITY;
            }
            s.push(NetPoint::from_value(eps, Complex64::new(sup, 0.0)));
        }
    }
    sups.into_iter()
        .zip(notes)
        .enumerate()
        .map(|(k, (points, note))| {
            let net = SampledNet {
                grid: *grid,
                points,
                note: format!("sup of order {k} on {set}"),
            };
            OrderClass {
                order: k as u32,
                class: net.classify(cfg),
                slope: net.estimate_valuation(cfg.window).ok().map(|e| e.slope),
                note,
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub enum Invertibility {
    /// `inf_{A_ε + ε^n} |u_ε| ≥ ε^n` on the tail.
    Invertible { n: u32, reciprocal: GenFunction },
    NotInvertible { witness: GenComplex, value: String },
}

/// Search for `n ∈ [1, 40]` with `inf_{A_ε + ε^n} |u_ε| ≥ ε^n` on the grid
/// tail, cross-checked by pointwise invertibility at random member points.
pub fn invertibility_on_set(u: &GenFunction, set: &InternalSetRep, grid: &EpsGrid, cfg: &OracleConfig) -> Invertibility {
    let tail = grid.tail(cfg.window);
    let describe = |x: &GenComplex| match u.eval(x, grid) {
        Ok(v) => v.describe(),
        Err(e) => e.to_string(),
    };
    let (shift, local_set, local) = local_form(u, set);
    let mut found = None;
    'search: for n in 1..=MAX_INVERTIBILITY_N {
        for eps in tail.points() {
            let pad = eps.powi(n as i32);
            let (region, pts) = match (local_set.concretize(eps), local_set.sample_at(eps, pad)) {
                (Ok(r), Ok((_, p))) => (r, p),
                _ => continue 'search,
            };
            let inf_ln = refined_inf(&local.freeze(eps), &region, &pts, pad).ln();
            if !(inf_ln >= n as f64 * eps.ln()) {
                continue 'search;
            }
        }
        found = Some(n);
        break;
    }
    let Some(n) = found else {
        return match minimizing_member(u, (&shift, &local_set, &local), set, grid, cfg) {
            Some(w) => {
                let value = describe(&w);
                Invertibility::NotInvertible { witness: w, value }
            }
            None => Invertibility::NotInvertible {
                witness: set.anchor(),
                value: "no symbolic minimizer".into(),
            },
        };
    };
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(SAMPLING_SEED);
    for _ in 0..100 {
        let x = set.random_member(&mut rng);
        let ok = match u.eval(&x, grid) {
            Ok(v) => v.is_invertible(cfg),
            Err(_) => false,
        };
        if !ok {
            let value = describe(&x);
            return Invertibility::NotInvertible { witness: x, value };
        }
    }
    let uu = Arc::new(u.clone());
    let reciprocal = GenFunction::Sampled(SampledFn::new(format!("1 / ({})", u.label()), move |eps, z| {
        uu.freeze(eps)
            .value(z)
            .map(|v| v.inv())
            .unwrap_or(Complex64::new(f64::NAN, 0.0))
    }));
    Invertibility::Invertible { n, reciprocal }
}

/// Centre of the shape used for local coordinates.
fn shape_center(set: &InternalSetRep) -> GenComplex {
    match set {
        InternalSetRep::Disc { center, .. } | InternalSetRep::Circle { center, .. } | InternalSetRep::Annulus { center, .. } => {
            center.clone()
        }
        InternalSetRep::Rectangle { lo: a, hi: b } | InternalSetRep::Segment { a, b } => (a + b).scale(Complex64::new(0.5, 0.0)),
    }
}

/// A holomorphic polynomial in the local coordinate `w = z − c` around the
/// centre `c` of `set`, together with `c` and the set translated by `−c`.
/// Values and geometry far below the size of `c` then survive rounding.
/// Other functions are returned unchanged with `c = 0`.
fn local_form(u: &GenFunction, set: &InternalSetRep) -> (GenComplex, InternalSetRep, GenFunction) {
    let unchanged = || (AsymptoticScalar::zero(), set.clone(), u.clone());
    let GenFunction::Poly(p) = u else { return unchanged() };
    if !p.is_holomorphic() {
        return unchanged();
    }
    let c = shape_center(set);
    let local = GenFunction::Poly(Poly::holomorphic(&p.taylor_at(&c)));
    let shifted = set.translated(&-&c);
    (c, shifted, local)
}

/// Sampled infimum of `|u_ε|` over `A_ε + pad`, with the smallest samples
/// moved by Newton steps while they decrease `|u_ε|` and stay in the
/// padded region. Zeros between sample points are found this way; a
/// converged iteration counts as `|u_ε| = 0`.
fn refined_inf(fr: &Frozen<'_>, region: &ConcreteRegion, pts: &[Complex64], pad: f64) -> f64 {
    let abs = |z: Complex64| fr.value(z).map(|v| v.norm()).unwrap_or(0.0);
    let mut vals: Vec<(f64, Complex64)> = pts.iter().map(|&z| (abs(z), z)).collect();
    vals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut inf = vals.first().map(|v| v.0).unwrap_or(f64::INFINITY);
    for &(mut best, mut z) in vals.iter().take(REFINE_STARTS) {
        for _ in 0..NEWTON_STEPS {
            let (Some(v), Some(d)) = (fr.value(z), fr.eval(z, 1, 0)) else { break };
            if best == 0.0 || d.norm() == 0.0 {
                break;
            }
            let step = v / d;
            if step.norm() <= NEWTON_CONVERGED * z.norm() {
                // converged to a zero up to rounding
                best = 0.0;
                break;
            }
            let next = z - step;
            let a = abs(next);
            if !(a < best) || region.distance(next) > pad {
                break;
            }
            (best, z) = (a, next);
        }
        inf = inf.min(best);
    }
    inf
}

/// Newton iteration on a polynomial in generalized arithmetic; returns a
/// point where the value is negligible up to the cap.
fn newton_zero(p: &Poly, start: GenComplex) -> Option<GenComplex> {
    let dp = p.derivative(1, 0);
    let mut z = start;
    for _ in 0..NEWTON_STEPS {
        let v = p.eval(&z);
        if v.is_empty() {
            return Some(z);
        }
        let step = &v * &dp.eval(&z).invert().ok()?;
        z = &z - &step;
    }
    None
}

/// Member sample minimizing `|u_ε|` at the smallest tail `ε`, lifted to a
/// generalized point through the shape parametrization. For holomorphic
/// polynomials the lift is then moved onto a nearby zero in the set.
fn minimizing_member(
    u: &GenFunction,
    (shift, local_set, local): (&GenComplex, &InternalSetRep, &GenFunction),
    set: &InternalSetRep,
    grid: &EpsGrid,
    cfg: &OracleConfig,
) -> Option<GenComplex> {
    let eps = grid.tail(cfg.window).points().last()?;
    let (params, pts) = local_set.sample_at(eps, 0.0).ok()?;
    let fr = local.freeze(eps);
    let (k, _) = pts
        .iter()
        .enumerate()
        .map(|(k, &z)| (k, fr.value(z).map(|v| v.norm()).unwrap_or(f64::INFINITY)))
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    let lift = &local_set.symbolic_point(&params[k])? + shift;
    if let GenFunction::Poly(p) = u {
        if p.is_holomorphic() {
            if let Some(z) = newton_zero(p, lift.clone()) {
                if contains(set, &z, grid, cfg) == Membership::Yes {
                    return Some(z);
                }
            }
        }
    }
    Some(lift)
}

/// `GenValue` of a point evaluation, classified against a set test.
pub fn value_in(set: &InternalSetRep, v: &GenValue, grid: &EpsGrid, cfg: &OracleConfig) -> Membership {
    match v {
        GenValue::Exact { value, .. } => contains(set, value, grid, cfg),
        GenValue::Sampled { net, .. } => contains_net(set, net, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::Poly;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }
    fn rho(n: i64) -> AsymptoticScalar {
        AsymptoticScalar::rho_pow(r(n))
    }
    fn c(x: f64) -> AsymptoticScalar {
        AsymptoticScalar::real(x)
    }
    fn g() -> EpsGrid {
        EpsGrid::default()
    }
    fn cfg() -> OracleConfig {
        OracleConfig::default()
    }

    #[test]
    fn concretize_shapes() {
        let e = 2f64.powi(-10);
        let d = InternalSetRep::disc(c(0.0), rho(1)).unwrap();
        assert_eq!(d.concretize(e).unwrap(), ConcreteRegion::Disc { c: Complex64::new(0.0, 0.0), r: e });
        let a = InternalSetRep::annulus(c(0.0), rho(2), rho(1)).unwrap();
        match a.concretize(e).unwrap() {
            ConcreteRegion::Annulus { r_in, r_out, .. } => {
                assert!((r_in - e * e).abs() < 1e-20 && (r_out - e).abs() < 1e-15)
            }
            other => panic!("{other:?}"),
        }
        let hi = &c(1.0) + &rho(1).scale(Complex64::i());
        let rect = InternalSetRep::rectangle(AsymptoticScalar::monomial(Complex64::new(0.0, -1.0), r(0)), hi).unwrap();
        match rect.concretize(e).unwrap() {
            ConcreteRegion::Rectangle { hi, .. } => assert!((hi - Complex64::new(1.0, e)).norm() < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_radii() {
        assert!(InternalSetRep::disc(c(0.0), c(-1.0)).is_err());
        assert!(InternalSetRep::disc(c(0.0), AsymptoticScalar::zero()).is_err());
        assert!(InternalSetRep::annulus(c(0.0), rho(1), rho(2)).is_err());
    }

    #[test]
    fn membership() {
        let half = InternalSetRep::disc(c(0.0), c(0.5)).unwrap();
        assert_eq!(contains(&half, &rho(1), &g(), &cfg()), Membership::Yes);
        let small = InternalSetRep::disc(c(0.0), rho(1)).unwrap();
        assert_eq!(contains(&small, &c(0.5), &g(), &cfg()), Membership::No);
        let d2 = InternalSetRep::disc(c(0.0), rho(2)).unwrap();
        assert_eq!(contains(&d2, &rho(3), &g(), &cfg()), Membership::Yes);
        assert_eq!(contains(&d2, &rho(1), &g(), &cfg()), Membership::No);
        let seg = InternalSetRep::segment(c(0.0), c(1.0)).unwrap();
        assert_eq!(contains(&seg, &rho(1), &g(), &cfg()), Membership::Yes);
        assert_eq!(contains(&seg, &rho(1).scale(Complex64::i()), &g(), &cfg()), Membership::No);
        let net_disc = InternalSetRep::disc_net(c(0.0), "e^(1/eps)", |e| 1.0 / e);
        assert_eq!(contains(&net_disc, &c(3.0), &g(), &cfg()), Membership::Yes);
    }

    #[test]
    fn sharp_bounds() {
        assert_eq!(is_sharply_bounded(&InternalSetRep::disc(c(0.0), rho(-2)).unwrap(), &g(), &cfg()), Ok(2));
        let net_disc = InternalSetRep::disc_net(c(0.0), "e^(1/eps)", |e| 1.0 / e);
        assert_eq!(is_sharply_bounded(&net_disc, &g(), &cfg()), Err(SetError::NotSharplyBounded));
        let k = InternalSetRep::rectangle(c(0.0), AsymptoticScalar::constant(Complex64::new(1.0, 1.0))).unwrap();
        assert_eq!(is_sharply_bounded(&k, &g(), &cfg()), Ok(0));
    }

    #[test]
    fn margins() {
        let d = |x: AsymptoticScalar| InternalSetRep::disc(c(0.0), x).unwrap();
        assert_eq!(neighborhood_margin(&d(rho(3)), &d(rho(2)), &g(), &cfg()), Ok(3));
        assert_eq!(neighborhood_margin(&d(c(1.0)), &d(c(2.0)), &g(), &cfg()), Ok(1));
        assert_eq!(neighborhood_margin(&d(c(1.0)), &d(c(1.0)), &g(), &cfg()), Err(SetError::NotNeighborhood));
        let seg = InternalSetRep::segment(c(0.0), c(1.0)).unwrap();
        let ann = InternalSetRep::annulus(c(0.0), c(1.0), c(2.0)).unwrap();
        assert!(matches!(
            neighborhood_margin(&seg, &ann, &g(), &cfg()),
            Err(SetError::ShapePairUnsupported(_))
        ));
    }

    #[test]
    fn classification_on_disc() {
        let disc = InternalSetRep::disc(c(0.0), c(1.0)).unwrap();
        let f = |label: &str, s: fn(f64) -> f64| {
            GenFunction::Sampled(SampledFn::new(label.to_string(), move |e, z| z * s(e)).holomorphic())
        };
        let cl = |u: &GenFunction| classify_on_set(u, &disc, 0, None, &g(), &cfg())[0].class;
        assert_eq!(cl(&f("eps^-3 z", |e| e.powi(-3))), NetClass::Moderate(3));
        assert_eq!(cl(&f("e^(-1/eps) z", |e| (-1.0 / e).exp())), NetClass::Negligible);
        let big = GenFunction::Sampled(SampledFn::new("e^(1/eps)", |e, _| Complex64::new((1.0 / e).exp(), 0.0)));
        assert_eq!(cl(&big), NetClass::Neither);
    }

    #[test]
    fn invertibility_examples() {
        let z = GenFunction::Poly(Poly::z());
        let d = InternalSetRep::disc(c(2.0), c(1.0)).unwrap();
        assert!(matches!(invertibility_on_set(&z, &d, &g(), &cfg()), Invertibility::Invertible { n: 1, .. }));
        let d0 = InternalSetRep::disc(c(0.0), c(1.0)).unwrap();
        match invertibility_on_set(&z, &d0, &g(), &cfg()) {
            Invertibility::NotInvertible { witness, .. } => assert!(witness.is_empty(), "{witness}"),
            other => panic!("{other:?}"),
        }
        let u = GenFunction::Poly(Poly::z().sub(&Poly::constant(rho(1))));
        let d2 = InternalSetRep::disc(c(0.0), rho(2)).unwrap();
        assert!(matches!(invertibility_on_set(&u, &d2, &g(), &cfg()), Invertibility::Invertible { n: 2, .. }));
    }
}
