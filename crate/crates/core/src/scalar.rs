//! Truncated asymptotic expansions `Σ c_k ρ^{a_k}` with a knowledge cap.
//!
//! An [`AsymptoticScalar`] stands for a generalized number whose
//! representative behaves like a finite sum of rational powers of `ε`.
//! Terms with exponent above the cap are unknown; an empty term list means
//! "negligible up to the cap", never "provably zero".

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact exponent type.
pub type Rational = Ratio<i64>;

/// Default knowledge horizon for freshly built scalars.
pub const DEFAULT_CAP: i64 = 24;

/// Relative tolerance under which combined coefficients cancel to zero.
pub const CANCEL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScalarError {
    #[error("not invertible: negligible up to cap {0}")]
    NotInvertible(Rational),
    #[error("not representable: {0}")]
    NonRepresentable(String),
}

/// A single term `coeff · ρ^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub exponent: Rational,
    pub coeff: Complex64,
}

/// Valuation `v(x̃)` of a scalar, as far as it is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtendedValuation {
    Exact(Rational),
    /// Nothing known below the cap: the value is negligible up to it.
    AtLeast(Rational),
    Infinite,
}

impl ExtendedValuation {
    /// The exact value, or the lower bound when only a bound is known.
    pub fn lower_bound(&self) -> Option<Rational> {
        match *self {
            ExtendedValuation::Exact(v) | ExtendedValuation::AtLeast(v) => Some(v),
            ExtendedValuation::Infinite => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ExtendedValuation::Exact(_))
    }
}

/// Sharp norm `e^{-v}`; `exact == false` means the value is only an upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpNorm {
    pub value: f64,
    pub exact: bool,
}

/// Outcome of [`AsymptoticScalar::compare`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Comparison {
    /// `x ≪ y`
    MuchLess,
    /// `x ≫ y`
    MuchGreater,
    /// `x − y` is negligible up to the cap.
    Approx,
    Incomparable,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Comparison::MuchLess => "<<",
            Comparison::MuchGreater => ">>",
            Comparison::Approx => "~",
            Comparison::Incomparable => "incomparable",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct AsymptoticScalar {
    terms: Vec<Term>,
    cap: Rational,
}

/// Generalized complex number; the real/imaginary split is derived on demand.
pub type GenComplex = AsymptoticScalar;

pub(crate) fn rat(n: i64) -> Rational {
    Rational::from_integer(n)
}

pub(crate) fn rat_to_f64(r: Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn rmin(a: Rational, b: Rational) -> Rational {
    if a < b {
        a
    } else {
        b
    }
}

/// Collects coefficient contributions per exponent and applies the
/// cancellation rule when finished.
#[derive(Default)]
struct Accumulator {
    slots: BTreeMap<Rational, (Complex64, f64)>,
}

impl Accumulator {
    fn push(&mut self, exponent: Rational, coeff: Complex64) {
        let slot = self
            .slots
            .entry(exponent)
            .or_insert((Complex64::zero(), 0.0));
        slot.0 += coeff;
        slot.1 = slot.1.max(coeff.norm());
    }

    fn finish(self, cap: Rational) -> AsymptoticScalar {
        let terms = self
            .slots
            .into_iter()
            .filter(|(e, (c, scale))| *e <= cap && c.norm() > CANCEL_TOL * scale && c.norm() > 0.0)
            .map(|(exponent, (coeff, _))| Term { exponent, coeff })
            .collect();
        AsymptoticScalar { terms, cap }
    }
}

impl AsymptoticScalar {
    /// Builds a canonical scalar from arbitrary terms: sorts, merges equal
    /// exponents, drops cancelled coefficients and anything above `cap`.
    pub fn from_terms<I>(terms: I, cap: Rational) -> Self
    where
        I: IntoIterator<Item = (Rational, Complex64)>,
    {
        let mut acc = Accumulator::default();
        for (e, c) in terms {
            acc.push(e, c);
        }
        acc.finish(cap)
    }

    /// The empty scalar: negligible up to `cap`.
    pub fn zero_with_cap(cap: Rational) -> Self {
        AsymptoticScalar {
            terms: Vec::new(),
            cap,
        }
    }

    pub fn zero() -> Self {
        Self::zero_with_cap(rat(DEFAULT_CAP))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(c, Rational::zero())
    }

    pub fn constant_with_cap(c: Complex64, cap: Rational) -> Self {
        Self::from_terms([(Rational::zero(), c)], cap)
    }

    pub fn real(x: f64) -> Self {
        Self::constant(Complex64::new(x, 0.0))
    }

    pub fn one() -> Self {
        Self::real(1.0)
    }

    pub fn i() -> Self {
        Self::constant(Complex64::i())
    }

    /// `ρ = [(ε)_ε]`.
    pub fn rho() -> Self {
        Self::monomial(Complex64::new(1.0, 0.0), Rational::one())
    }

    /// `c · ρ^e` with the default cap (raised to `e` if needed).
    pub fn monomial(c: Complex64, e: Rational) -> Self {
        let cap = if e > rat(DEFAULT_CAP) { e } else { rat(DEFAULT_CAP) };
        Self::from_terms([(e, c)], cap)
    }

    pub fn rho_pow(e: Rational) -> Self {
        Self::monomial(Complex64::new(1.0, 0.0), e)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn cap(&self) -> Rational {
        self.cap
    }

    /// Same value with a different knowledge horizon; terms above the new
    /// cap are dropped.
    pub fn with_cap(&self, cap: Rational) -> Self {
        AsymptoticScalar {
            terms: self.terms.iter().copied().filter(|t| t.exponent <= cap).collect(),
            cap,
        }
    }

    /// Lowers the cap to `cap` if that is smaller.
    pub fn truncate(&self, cap: Rational) -> Self {
        if cap < self.cap {
            self.with_cap(cap)
        } else {
            self.clone()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Negligible up to the cap.
    pub fn is_negligible(&self) -> bool {
        self.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.coeff.im.abs() <= CANCEL_TOL * t.coeff.norm())
    }

    pub fn leading(&self) -> Option<Term> {
        self.terms.first().copied()
    }

    /// Coefficient of `ρ^e`, zero if absent.
    pub fn coeff(&self, e: Rational) -> Complex64 {
        self.terms
            .iter()
            .find(|t| t.exponent == e)
            .map(|t| t.coeff)
            .unwrap_or_else(Complex64::zero)
    }

    pub fn valuation(&self) -> ExtendedValuation {
        match self.terms.first() {
            Some(t) => ExtendedValuation::Exact(t.exponent),
            None => ExtendedValuation::AtLeast(self.cap),
        }
    }

    /// Exact valuation, or the cap as a stand-in when nothing is known.
    pub(crate) fn valuation_or_cap(&self) -> Rational {
        self.terms.first().map(|t| t.exponent).unwrap_or(self.cap)
    }

    pub fn sharp_norm(&self) -> SharpNorm {
        match self.valuation() {
            ExtendedValuation::Exact(v) => SharpNorm {
                value: (-rat_to_f64(v)).exp(),
                exact: true,
            },
            ExtendedValuation::AtLeast(c) => SharpNorm {
                value: (-rat_to_f64(c)).exp(),
                exact: false,
            },
            ExtendedValuation::Infinite => SharpNorm {
                value: 0.0,
                exact: true,
            },
        }
    }

    pub fn conj(&self) -> Self {
        AsymptoticScalar {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    exponent: t.exponent,
                    coeff: t.coeff.conj(),
                })
                .collect(),
            cap: self.cap,
        }
    }

    pub fn re(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| (t.exponent, Complex64::new(t.coeff.re, 0.0))),
            self.cap,
        )
    }

    pub fn im(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| (t.exponent, Complex64::new(t.coeff.im, 0.0))),
            self.cap,
        )
    }

    /// `|x|²` computed with real coefficients only.
    pub fn modulus_squared(&self) -> Self {
        let mut acc = Accumulator::default();
        for a in &self.terms {
            for b in &self.terms {
                let c = a.coeff * b.coeff.conj();
                acc.push(a.exponent + b.exponent, Complex64::new(c.re, 0.0));
            }
        }
        let v = self.valuation_or_cap();
        acc.finish(self.cap + v)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|t| (t.exponent, t.coeff * c)), self.cap)
    }

    /// Multiplies by `ρ^e` (exact: shifts exponents and the cap).
    pub fn shift(&self, e: Rational) -> Self {
        AsymptoticScalar {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    exponent: t.exponent + e,
                    coeff: t.coeff,
                })
                .collect(),
            cap: self.cap + e,
        }
    }

    pub fn powi(&self, n: u32) -> Self {
        if n == 0 {
            return Self::constant_with_cap(Complex64::new(1.0, 0.0), self.cap);
        }
        let mut out = self.clone();
        for _ in 1..n {
            out = &out * self;
        }
        out
    }

    /// Splits `x = c ρ^a (1 + w)`; returns `(c, a, w)` with `w` of positive
    /// valuation and cap `cap(x) − a`.
    fn factor_leading(&self) -> Option<(Complex64, Rational, AsymptoticScalar)> {
        let lead = self.leading()?;
        let inv_c = lead.coeff.inv();
        let w = Self::from_terms(
            self.terms[1..]
                .iter()
                .map(|t| (t.exponent - lead.exponent, t.coeff * inv_c)),
            self.cap - lead.exponent,
        );
        Some((lead.coeff, lead.exponent, w))
    }

    /// Coefficients `y_e` over the exponents generated by `w` (up to `cap`)
    /// from `y_0 = 1` and `y_e = Σ_d f(e, d) w_d y_{e−d}`. Building the
    /// series in one pass avoids the cancellation of expanding powers of `w`
    /// one at a time.
    fn recurrence(w: &Self, cap: Rational, f: impl Fn(Rational, Rational) -> f64) -> Self {
        let mut exps = std::collections::BTreeSet::from([Rational::zero()]);
        let mut frontier = vec![Rational::zero()];
        while let Some(e) = frontier.pop() {
            for t in &w.terms {
                let n = e + t.exponent;
                if n <= cap && exps.insert(n) {
                    frontier.push(n);
                }
            }
        }
        let mut y: BTreeMap<Rational, Complex64> = BTreeMap::new();
        for &e in &exps {
            let v = if e.is_zero() {
                Complex64::one()
            } else {
                w.terms
                    .iter()
                    .filter_map(|t| y.get(&(e - t.exponent)).map(|yy| t.coeff * yy * f(e, t.exponent)))
                    .sum()
            };
            y.insert(e, v);
        }
        Self::from_terms(y, cap)
    }

    /// Multiplicative inverse by leading-term factorization; `1/(1 + w)`
    /// satisfies `y_e = −Σ_d w_d y_{e−d}`.
    pub fn invert(&self) -> Result<Self, ScalarError> {
        let (c, a, w) = self
            .factor_leading()
            .ok_or(ScalarError::NotInvertible(self.cap))?;
        let sum = Self::recurrence(&w, w.cap, |_, _| -1.0);
        Ok(sum.scale(c.inv()).shift(-a))
    }

    /// `x^q` for rational `q`, principal branch on the leading coefficient.
    pub fn powr(&self, q: Rational) -> Result<Self, ScalarError> {
        if q.is_integer() {
            let n = q.to_integer();
            if n >= 0 {
                return Ok(self.powi(n as u32));
            }
            return Ok(self.invert()?.powi((-n) as u32));
        }
        let (c, a, w) = self
            .factor_leading()
            .ok_or_else(|| ScalarError::NonRepresentable("fractional power of a negligible value".into()))?;
        let rel_cap = w.cap;
        let qf = rat_to_f64(q);
        // θ(1 + w)^q = q θw (1 + w)^{q−1} with θ multiplying ρ^e by e
        let sum = Self::recurrence(&w, rel_cap, |e, d| {
            let (e, d) = (rat_to_f64(e), rat_to_f64(d));
            ((qf + 1.0) * d - e) / e
        });
        let c_q = c.powf(qf);
        let shifted = a * q;
        Ok(sum.scale(c_q).shift(shifted).with_cap(rel_cap + shifted))
    }

    /// `exp(x)` for scalars without negative exponents.
    pub fn exp(&self) -> Result<Self, ScalarError> {
        if self.terms.iter().any(|t| t.exponent.is_negative()) {
            return Err(ScalarError::NonRepresentable(
                "exp of a scalar with negative exponents".into(),
            ));
        }
        let x0 = self.coeff(Rational::zero());
        let w = Self::from_terms(
            self.terms
                .iter()
                .filter(|t| t.exponent.is_positive())
                .map(|t| (t.exponent, t.coeff)),
            self.cap,
        );
        // θ exp(w) = θw exp(w)
        let sum = Self::recurrence(&w, self.cap, |e, d| rat_to_f64(d) / rat_to_f64(e));
        Ok(sum.scale(x0.exp()))
    }

    /// Order relation of real scalars: `x ≫ y` iff `x − y ≥ 0` and invertible.
    pub fn compare(&self, other: &Self) -> Comparison {
        let d = self - other;
        if !d.is_real() {
            return Comparison::Incomparable;
        }
        match d.leading() {
            None => Comparison::Approx,
            Some(t) if t.coeff.re > 0.0 => Comparison::MuchGreater,
            Some(_) => Comparison::MuchLess,
        }
    }

    /// Compares `|x|` with `|y|` through squared moduli.
    pub fn compare_modulus(&self, other: &Self) -> Comparison {
        self.modulus_squared().compare(&other.modulus_squared())
    }

    /// `x ≥ y` up to negligibility.
    pub fn ge_approx(&self, other: &Self) -> bool {
        matches!(
            self.compare(other),
            Comparison::MuchGreater | Comparison::Approx
        )
    }

    /// `x ≫ 0`.
    pub fn is_strictly_positive(&self) -> bool {
        self.compare(&Self::zero_with_cap(self.cap)) == Comparison::MuchGreater
    }

    /// Evaluates the representative `Σ c ε^a` at `eps`.
    pub fn eval(&self, eps: f64) -> Complex64 {
        let le = eps.ln();
        self.terms
            .iter()
            .map(|t| t.coeff * (rat_to_f64(t.exponent) * le).exp())
            .sum()
    }

    /// Evaluates in log-magnitude form: `(ln|x_ε|, x_ε)`. The leading power
    /// is factored out first so that huge or tiny values keep an accurate
    /// logarithm even when `x_ε` itself over- or underflows.
    pub fn eval_log(&self, eps: f64) -> (f64, Complex64) {
        let Some(lead) = self.leading() else {
            return (f64::NEG_INFINITY, Complex64::zero());
        };
        let le = eps.ln();
        let rel: Complex64 = self
            .terms
            .iter()
            .map(|t| t.coeff * (rat_to_f64(t.exponent - lead.exponent) * le).exp())
            .sum();
        let lead_log = rat_to_f64(lead.exponent) * le;
        let ln_abs = rel.norm().ln() + lead_log;
        (ln_abs, rel * lead_log.exp())
    }

    /// Equality up to the smaller cap, with relative coefficient tolerance.
    pub fn approx_eq(&self, other: &Self) -> bool {
        let cap = rmin(self.cap, other.cap);
        let a: Vec<_> = self.terms.iter().filter(|t| t.exponent <= cap).collect();
        let b: Vec<_> = other.terms.iter().filter(|t| t.exponent <= cap).collect();
        if a.len() != b.len() {
            return false;
        }
        a.iter().zip(b.iter()).all(|(x, y)| {
            x.exponent == y.exponent
                && (x.coeff - y.coeff).norm() <= 1e-9 * x.coeff.norm().max(y.coeff.norm())
        })
    }
}

impl PartialEq for AsymptoticScalar {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other)
    }
}

impl From<f64> for AsymptoticScalar {
    fn from(x: f64) -> Self {
        Self::real(x)
    }
}

impl From<Complex64> for AsymptoticScalar {
    fn from(c: Complex64) -> Self {
        Self::constant(c)
    }
}

fn add_impl(x: &AsymptoticScalar, y: &AsymptoticScalar, sign: f64) -> AsymptoticScalar {
    let mut acc = Accumulator::default();
    for t in &x.terms {
        acc.push(t.exponent, t.coeff);
    }
    for t in &y.terms {
        acc.push(t.exponent, t.coeff * sign);
    }
    acc.finish(rmin(x.cap, y.cap))
}

impl<'a> Add<&'a AsymptoticScalar> for &'a AsymptoticScalar {
    type Output = AsymptoticScalar;
    fn add(self, rhs: &'a AsymptoticScalar) -> AsymptoticScalar {
        add_impl(self, rhs, 1.0)
    }
}

impl<'a> Sub<&'a AsymptoticScalar> for &'a AsymptoticScalar {
    type Output = AsymptoticScalar;
    fn sub(self, rhs: &'a AsymptoticScalar) -> AsymptoticScalar {
        add_impl(self, rhs, -1.0)
    }
}

impl<'a> Mul<&'a AsymptoticScalar> for &'a AsymptoticScalar {
    type Output = AsymptoticScalar;
    fn mul(self, rhs: &'a AsymptoticScalar) -> AsymptoticScalar {
        let cap = rmin(
            self.cap + rhs.valuation_or_cap(),
            rhs.cap + self.valuation_or_cap(),
        );
        let mut acc = Accumulator::default();
        for a in &self.terms {
            for b in &rhs.terms {
                let e = a.exponent + b.exponent;
                if e <= cap {
                    acc.push(e, a.coeff * b.coeff);
                }
            }
        }
        acc.finish(cap)
    }
}

impl Neg for &AsymptoticScalar {
    type Output = AsymptoticScalar;
    fn neg(self) -> AsymptoticScalar {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<AsymptoticScalar> for AsymptoticScalar {
            type Output = AsymptoticScalar;
            fn $m(self, rhs: AsymptoticScalar) -> AsymptoticScalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a AsymptoticScalar> for AsymptoticScalar {
            type Output = AsymptoticScalar;
            fn $m(self, rhs: &'a AsymptoticScalar) -> AsymptoticScalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for AsymptoticScalar {
    type Output = AsymptoticScalar;
    fn neg(self) -> AsymptoticScalar {
        -&self
    }
}

fn fmt_coeff(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}*i", c.im)
    } else {
        format!("({}+{}*i)", c.re, c.im)
    }
}

fn fmt_exponent(e: Rational) -> String {
    if e.is_integer() && !e.is_negative() {
        format!("{}", e.to_integer())
    } else if e.is_integer() {
        format!("({})", e.to_integer())
    } else {
        format!("({}/{})", e.numer(), e.denom())
    }
}

/// Prints in the scalar expression grammar, so the output re-parses to an
/// equal value (given the same cap).
impl fmt::Display for AsymptoticScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            // real coefficients carry their sign into the separator
            let negative = t.coeff.im == 0.0 && t.coeff.re < 0.0;
            let coeff = if negative { -t.coeff } else { t.coeff };
            match (k, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let c = fmt_coeff(coeff);
            let power = if t.exponent.is_one() {
                "rho".to_string()
            } else {
                format!("rho^{}", fmt_exponent(t.exponent))
            };
            if t.exponent.is_zero() {
                f.write_str(&c)?;
            } else if coeff == Complex64::new(1.0, 0.0) {
                f.write_str(&power)?;
            } else {
                write!(f, "{c}*{power}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn cancellation_to_rho() {
        let x = AsymptoticScalar::rho() + AsymptoticScalar::one();
        let y = &x - &AsymptoticScalar::one();
        assert_eq!(y, AsymptoticScalar::rho());
        assert_eq!(y.terms().len(), 1);
    }

    #[test]
    fn exponents_add() {
        let p = AsymptoticScalar::rho_pow(r(1, 2)) * AsymptoticScalar::rho_pow(r(3, 2));
        assert_eq!(p.terms(), &[Term { exponent: rat(2), coeff: c(1.0) }]);
    }

    #[test]
    fn difference_of_squares() {
        let one = AsymptoticScalar::one();
        let rho = AsymptoticScalar::rho();
        let p = (&one + &rho) * (&one - &rho);
        // hand expansion: 1 + ρ − ρ − ρ²
        let expected = AsymptoticScalar::from_terms([(rat(0), c(1.0)), (rat(2), c(-1.0))], rat(24));
        assert_eq!(p, expected);
        assert_eq!(p.terms().len(), 2);
    }

    #[test]
    fn valuations() {
        assert_eq!(AsymptoticScalar::rho().valuation(), ExtendedValuation::Exact(rat(1)));
        let x = AsymptoticScalar::from_terms([(r(1, 2), c(3.0)), (rat(2), c(-2.0))], rat(24));
        assert_eq!(x.valuation(), ExtendedValuation::Exact(r(1, 2)));
        let e = AsymptoticScalar::zero_with_cap(rat(10));
        assert_eq!(e.valuation(), ExtendedValuation::AtLeast(rat(10)));
    }

    #[test]
    fn sharp_norms() {
        let n = AsymptoticScalar::rho().sharp_norm();
        assert!((n.value - (-1.0f64).exp()).abs() < 1e-15 && n.exact);
        let n = (AsymptoticScalar::real(5.0) + AsymptoticScalar::rho()).sharp_norm();
        assert_eq!(n.value, 1.0);
        let n = AsymptoticScalar::zero_with_cap(rat(8)).sharp_norm();
        assert!(!n.exact);
        assert!((n.value - (-8.0f64).exp()).abs() < 1e-18);
    }

    #[test]
    fn inverses() {
        let half = AsymptoticScalar::real(2.0).invert().unwrap();
        assert_eq!(half, AsymptoticScalar::real(0.5));
        let inv_rho = AsymptoticScalar::rho().invert().unwrap();
        assert_eq!(inv_rho.terms(), &[Term { exponent: rat(-1), coeff: c(1.0) }]);

        let x = (AsymptoticScalar::one() - AsymptoticScalar::rho()).with_cap(rat(3));
        let inv = x.invert().unwrap();
        let expected = AsymptoticScalar::from_terms((0..=3).map(|k| (rat(k), c(1.0))), rat(3));
        assert_eq!(inv, expected);
        assert_eq!(inv.cap(), rat(3));
        // multiply-back residual lies beyond the cap
        let residual = &(&x * &inv) - &AsymptoticScalar::one();
        assert!(residual.is_empty());
    }

    #[test]
    fn empty_is_not_invertible() {
        let e = AsymptoticScalar::zero_with_cap(rat(5));
        assert_eq!(e.invert(), Err(ScalarError::NotInvertible(rat(5))));
    }

    #[test]
    fn comparisons() {
        let one = AsymptoticScalar::one();
        let rho = AsymptoticScalar::rho();
        assert_eq!(one.compare(&rho), Comparison::MuchGreater);
        assert_eq!(rho.compare(&one), Comparison::MuchLess);
        assert_eq!(
            AsymptoticScalar::rho_pow(rat(2)).compare(&AsymptoticScalar::rho_pow(rat(3))),
            Comparison::MuchGreater
        );
        assert_eq!(rho.compare(&rho), Comparison::Approx);
        assert_eq!(AsymptoticScalar::i().compare(&one), Comparison::Incomparable);
    }

    #[test]
    fn fractional_power_matches_square() {
        let x = AsymptoticScalar::one() + AsymptoticScalar::rho();
        let s = x.powr(r(1, 2)).unwrap();
        let back = &s * &s;
        assert_eq!(back, x);
    }

    #[test]
    fn exp_of_imaginary_quarter_turn() {
        let t = AsymptoticScalar::constant(Complex64::new(0.0, std::f64::consts::FRAC_PI_2));
        let e = t.exp().unwrap();
        assert!((e.coeff(rat(0)) - Complex64::i()).norm() < 1e-15);
    }

    #[test]
    fn log_eval_survives_underflow() {
        let x = AsymptoticScalar::rho_pow(rat(400));
        let (l, v) = x.eval_log(2f64.powi(-48));
        assert!((l - 400.0 * (2f64.powi(-48)).ln()).abs() < 1e-9);
        assert_eq!(v, Complex64::zero());
    }

    #[test]
    fn display_form() {
        let x = AsymptoticScalar::from_terms([(r(1, 2), c(3.0)), (rat(2), c(-2.0))], rat(24));
        assert_eq!(x.to_string(), "3*rho^(1/2) - 2*rho^2");
        assert_eq!(AsymptoticScalar::zero().to_string(), "0");
    }
}
