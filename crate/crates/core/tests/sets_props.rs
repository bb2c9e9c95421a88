mod common;

use colombeau::func::{GenFunction, Poly};
use colombeau::net::{EpsGrid, NetClass, OracleConfig};
use colombeau::scalar::{AsymptoticScalar, Rational};
use colombeau::sets::{classify_on_set, contains, neighborhood_margin, InternalSetRep, Membership};
use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn radius() -> impl Strategy<Value = AsymptoticScalar> {
    (exponent(0, 3), 0.5f64..2.0).prop_map(|(a, c)| AsymptoticScalar::from_terms([(a, Complex64::new(c, 0.0))], cap()))
}

fn disc() -> impl Strategy<Value = InternalSetRep> {
    (scalar(0, 3), radius()).prop_map(|(c, r)| InternalSetRep::disc(c, r).unwrap())
}

/// Pointwise verdict through the same numeric oracle that classifies sup-nets.
fn oracle_negligible(u: &GenFunction, z: &AsymptoticScalar) -> bool {
    let grid = EpsGrid::default();
    u.eval(z, &grid).unwrap().to_net(&grid).classify(&OracleConfig::default()) == NetClass::Negligible
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn containment_is_monotone(inner in disc(), outer in disc(), seed in any::<u64>()) {
        let (grid, cfg) = (EpsGrid::default(), OracleConfig::default());
        prop_assume!(neighborhood_margin(&inner, &outer, &grid, &cfg).is_ok());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let z = inner.random_member(&mut rng);
            match contains(&inner, &z, &grid, &cfg) {
                Membership::Yes => prop_assert_eq!(contains(&outer, &z, &grid, &cfg), Membership::Yes, "{}", z),
                Membership::Undecided => prop_assert_ne!(contains(&outer, &z, &grid, &cfg), Membership::No),
                Membership::No => prop_assert!(false, "random member {} outside {}", z, inner),
            }
        }
    }

    #[test]
    fn negligible_on_a_set_is_negligible_at_members(p in mixed_poly(2, 16, 30), set in disc(), seed in any::<u64>()) {
        let (grid, cfg) = (EpsGrid::default(), OracleConfig::default());
        let u = GenFunction::poly(p);
        // a sup decaying right at the threshold may have members that fit just below it
        let sup = &classify_on_set(&u, &set, 0, None, &grid, &cfg)[0];
        prop_assume!(sup.class == NetClass::Negligible && sup.slope.is_none_or(|s| s >= cfg.v_neg + 1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            let z = set.random_member(&mut rng);
            prop_assert!(oracle_negligible(&u, &z), "{}", z);
        }
    }

    #[test]
    fn pointwise_and_set_negligibility_agree(a in exponent(0, 30), seed in any::<u64>()) {
        prop_assume!(a <= Rational::from_integer(19) || a >= Rational::from_integer(21));
        // |1 + z| ≥ 1/2 on the disc, so the sup and every point value share the decay of ρ^a
        let (grid, cfg) = (EpsGrid::default(), OracleConfig::default());
        let one = AsymptoticScalar::constant(Complex64::new(1.0, 0.0));
        let u = GenFunction::poly(Poly::holomorphic(&[one.clone(), one]).scale(&AsymptoticScalar::rho_pow(a)));
        let set = InternalSetRep::disc(AsymptoticScalar::zero(), AsymptoticScalar::real(0.5)).unwrap();
        let on_set = classify_on_set(&u, &set, 0, None, &grid, &cfg)[0].class == NetClass::Negligible;
        prop_assert_eq!(on_set, a >= Rational::from_integer(20));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            let z = set.random_member(&mut rng);
            prop_assert_eq!(oracle_negligible(&u, &z), on_set, "{}", z);
        }
    }
}
