mod common;

use colombeau::analytic::{convergence_radius, sum_at, PowerSeries, TailLaw};
use colombeau::scalar::{AsymptoticScalar, Rational};
use common::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn affine(c: Rational, center: AsymptoticScalar) -> PowerSeries {
    PowerSeries::from_law(center, TailLaw::Affine(c))
}

/// `1 / max_{100 ≤ n ≤ 200} ‖a_n‖^{1/n}` read off the coefficients themselves.
fn brute_radius(s: &PowerSeries) -> f64 {
    let lim = (100..=200)
        .map(|n| {
            let v = s.coefficient(n).unwrap().leading().unwrap().exponent;
            (-(*v.numer() as f64) / *v.denom() as f64 / n as f64).exp()
        })
        .fold(0.0, f64::max);
    1.0 / lim
}

fn law_exponent() -> impl Strategy<Value = Rational> {
    exponent(-3, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn affine_radius_matches_brute_force(c in law_exponent(), center in scalar(0, 2)) {
        let s = affine(c, center);
        let (r, b) = (convergence_radius(&s).radius, brute_radius(&s));
        prop_assert!((r - b).abs() <= 1e-9 * b, "{r} vs {b}");
    }

    #[test]
    fn more_precision_only_adds_small_terms(
        c in law_exponent(),
        gap in exponent(1, 3),
        coeff in coeff(),
        m in 1i64..12,
    ) {
        // ‖z‖ = e^{−(gap − c)} < e^{c} = R
        let z = AsymptoticScalar::from_terms([(gap - c, coeff)], cap());
        let s = affine(c, AsymptoticScalar::zero()).with_cap(Rational::from_integer(40));
        let m = Rational::from_integer(m);
        let lo = sum_at(&s, &z, m).unwrap().value;
        let hi = sum_at(&s, &z, m + 5).unwrap().value;
        let lo = AsymptoticScalar::from_terms(lo.terms().iter().map(|t| (t.exponent, t.coeff)), m + 5);
        let d = &hi - &lo;
        prop_assert!(d.sharp_norm().value <= (-*m.numer() as f64).exp() * (1.0 + 1e-12), "{d}");
    }

    #[test]
    fn deflate_undoes_multiply_by_linear(c in law_exponent(), stored in prop::collection::vec(scalar(-2, 4), 0..5)) {
        let mut s = affine(c, AsymptoticScalar::zero());
        for (n, a) in stored.into_iter().enumerate() {
            s = s.with_coefficient(n, a);
        }
        let back = s.multiply_by_linear().deflate().unwrap();
        for n in 0..60 {
            prop_assert!(back.coefficient(n).unwrap().approx_eq(&s.coefficient(n).unwrap()), "coefficient {n}");
        }
        prop_assert_eq!(convergence_radius(&back).radius, convergence_radius(&s).radius);
    }

    #[test]
    fn deflation_reads_taylor_coefficients(c in law_exponent(), k in 1usize..6) {
        let mut s = affine(c, AsymptoticScalar::zero());
        for _ in 0..k {
            s = s.multiply_by_linear();
        }
        let mut d = s.clone();
        for _ in 0..k {
            d = d.deflate().unwrap();
        }
        let k_fact: f64 = (1..=k).map(|j| j as f64).product();
        let taylor = s.derivative(k).coefficient(0).unwrap().scale(Complex64::new(1.0 / k_fact, 0.0));
        prop_assert!(d.coefficient(0).unwrap().approx_eq(&taylor), "{} vs {}", d.coefficient(0).unwrap(), taylor);
    }
}
