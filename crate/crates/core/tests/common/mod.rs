#![allow(dead_code)]

use std::collections::BTreeMap;

use colombeau::func::Poly;
use colombeau::scalar::{AsymptoticScalar, Rational};
use num_complex::Complex64;
use proptest::prelude::*;

pub const CAP: i64 = 24;

pub fn cap() -> Rational {
    Rational::from_integer(CAP)
}

pub fn rho(p: i64, q: i64) -> AsymptoticScalar {
    AsymptoticScalar::rho_pow(Rational::new(p, q))
}

pub fn coeff() -> impl Strategy<Value = Complex64> + Clone {
    (0.5f64..2.0, 0.0f64..std::f64::consts::TAU).prop_map(|(m, t)| Complex64::from_polar(m, t))
}

pub fn real_coeff() -> impl Strategy<Value = Complex64> + Clone {
    (0.5f64..2.0, any::<bool>()).prop_map(|(m, s)| Complex64::new(if s { m } else { -m }, 0.0))
}

pub fn exponent(lo: i64, hi: i64) -> impl Strategy<Value = Rational> + Clone {
    prop_oneof![Just(1i64), Just(2), Just(3)].prop_flat_map(move |q| (lo * q..=hi * q).prop_map(move |p| Rational::new(p, q)))
}

/// Term maps with distinct exponents in `[lo, hi]`.
pub fn terms_with<C>(lo: i64, hi: i64, max: usize, c: C) -> impl Strategy<Value = BTreeMap<Rational, Complex64>> + Clone
where
    C: Strategy<Value = Complex64> + Clone,
{
    prop::collection::btree_map(exponent(lo, hi), c, 1..=max)
}

pub fn terms(lo: i64, hi: i64, max: usize) -> impl Strategy<Value = BTreeMap<Rational, Complex64>> + Clone {
    terms_with(lo, hi, max, coeff())
}

pub fn scalar_from(t: &BTreeMap<Rational, Complex64>) -> AsymptoticScalar {
    AsymptoticScalar::from_terms(t.iter().map(|(e, c)| (*e, *c)), cap())
}

pub fn scalar(lo: i64, hi: i64) -> impl Strategy<Value = AsymptoticScalar> + Clone {
    terms(lo, hi, 3).prop_map(|t| scalar_from(&t))
}

pub fn real_scalar(lo: i64, hi: i64) -> impl Strategy<Value = AsymptoticScalar> {
    terms_with(lo, hi, 3, real_coeff()).prop_map(|t| scalar_from(&t))
}

pub fn holo_poly(max_deg: usize, lo: i64, hi: i64) -> impl Strategy<Value = Poly> {
    prop::collection::vec(scalar(lo, hi), 1..=max_deg + 1).prop_map(|c| Poly::holomorphic(&c))
}

/// Polynomials in `z` and `z̄` with up to four monomials.
pub fn mixed_poly(max_deg: u32, lo: i64, hi: i64) -> impl Strategy<Value = Poly> {
    prop::collection::vec(((0..=max_deg), (0..=max_deg), scalar(lo, hi)), 1..=4)
        .prop_map(|m| Poly::from_terms(m.into_iter().map(|(p, q, c)| ((p, q), c))))
}
