mod common;

use colombeau::net::{EpsGrid, NetClass, OracleConfig, SampledNet};
use colombeau::scalar::{AsymptoticScalar, Rational};
use common::*;
use proptest::prelude::*;

fn net(x: &AsymptoticScalar) -> SampledNet {
    SampledNet::from_scalar(x, &EpsGrid::default())
}

fn expected_class(a: Rational) -> NetClass {
    if a >= Rational::from_integer(20) {
        NetClass::Negligible
    } else {
        NetClass::Moderate((-a).ceil().to_integer().max(0) as u32)
    }
}

#[test]
fn empty_scalar_is_negligible() {
    let zero = AsymptoticScalar::zero();
    assert_eq!(net(&zero).classify(&OracleConfig::default()), NetClass::Negligible);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn slope_reads_the_leading_exponent(a in exponent(-10, 10), c in coeff()) {
        let x = AsymptoticScalar::from_terms([(a, c)], cap());
        let est = net(&x).estimate_valuation(16).unwrap();
        prop_assert!((est.slope - *a.numer() as f64 / *a.denom() as f64).abs() < 0.05, "{est:?} for {a}");
    }

    #[test]
    fn slopes_add_under_products(x in scalar(-6, 6), y in scalar(-6, 6)) {
        let s = |v: &AsymptoticScalar| net(v).estimate_valuation(16).unwrap().slope;
        prop_assert!((s(&(&x * &y)) - s(&x) - s(&y)).abs() < 0.1);
    }

    #[test]
    fn pure_powers_classify_by_exponent(a in exponent(-30, 30)) {
        let x = AsymptoticScalar::rho_pow(a);
        prop_assert_eq!(net(&x).classify(&OracleConfig::default()), expected_class(a));
    }

    #[test]
    fn sampling_is_deterministic(x in scalar(-8, 8)) {
        let (a, b) = (net(&x), net(&x));
        prop_assert_eq!(&a, &b);
        let cfg = OracleConfig::default();
        prop_assert_eq!(a.classify(&cfg), b.classify(&cfg));
    }

    #[test]
    fn self_difference_is_negligible(x in scalar(-8, 8)) {
        let n = net(&x);
        let d = SampledNet::difference(&n, &n, 1e-12);
        prop_assert_eq!(d.classify(&OracleConfig::default()), NetClass::Negligible);
    }

    #[test]
    fn invertible_iff_not_negligible(x in scalar(-8, 30)) {
        let n = net(&x);
        let cfg = OracleConfig::default();
        prop_assert_eq!(n.is_invertible(&cfg), n.classify(&cfg) != NetClass::Negligible);
    }
}
