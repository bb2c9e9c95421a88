mod common;

use colombeau::contour::{cauchy_estimate_check, cauchy_integral, cauchy_integral_quadrature, DEFAULT_NODES, path_integral, path_integral_quadrature, GenPath, Mode};
use colombeau::func::GenFunction;
use colombeau::net::{EpsGrid, NetClass, OracleConfig};
use colombeau::scalar::AsymptoticScalar;
use common::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn radius() -> impl Strategy<Value = AsymptoticScalar> {
    (exponent(0, 2), 0.5f64..2.0).prop_map(|(a, c)| AsymptoticScalar::from_terms([(a, Complex64::new(c, 0.0))], cap()))
}

fn circle() -> impl Strategy<Value = GenPath> {
    (scalar(0, 2), radius()).prop_map(|(c, r)| GenPath::circle(c, r).unwrap())
}

fn closed_path() -> impl Strategy<Value = GenPath> {
    prop_oneof![
        circle(),
        (scalar(0, 2), radius()).prop_map(|(c, h)| GenPath::square(&c, &h).unwrap()),
        prop::collection::vec(scalar(0, 2), 3..6).prop_map(|v| GenPath::polyline(v, true).unwrap()),
    ]
}

fn exact(u: &GenFunction, path: &GenPath) -> AsymptoticScalar {
    let (grid, cfg) = (EpsGrid::default(), OracleConfig::default());
    path_integral(u, path, Mode::Exact, &grid, &cfg).unwrap().as_exact().unwrap().clone()
}

/// Vanishing up to float noise relative to the integrand coefficients.
fn vanishes(x: &AsymptoticScalar, u: &GenFunction) -> bool {
    let GenFunction::Poly(p) = u else { unreachable!() };
    let scale = p.terms().flat_map(|(_, c)| c.terms().iter().map(|t| t.coeff.norm())).fold(1.0, f64::max);
    x.terms().iter().all(|t| t.coeff.norm() <= 1e-9 * scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn exact_and_quadrature_agree_on_circles(p in mixed_poly(3, 0, 2), path in circle()) {
        let (grid, cfg) = (EpsGrid::default(), OracleConfig::default());
        let u = GenFunction::poly(p);
        let q = path_integral_quadrature(&u, &path, 64, &grid, &cfg).unwrap();
        let reference = colombeau::func::GenValue::exact(exact(&u, &path)).to_net(&grid);
        let (residual, worst) = q.residual(&reference);
        prop_assert!(worst <= 1e-8, "worst relative residual {worst}");
        prop_assert_eq!(residual.classify(&cfg), NetClass::Negligible);
    }

    #[test]
    fn reversal_negates_the_integral(p in mixed_poly(3, -1, 2), path in closed_path(), open in any::<bool>()) {
        let path = match (open, &path) {
            (true, GenPath::Polyline { vertices, .. }) => GenPath::polyline(vertices.clone(), false).unwrap(),
            _ => path,
        };
        let u = GenFunction::poly(p);
        let (a, b) = (exact(&u, &path), exact(&u, &path.reversed()));
        prop_assert!(a.approx_eq(&-&b), "{a} vs {b}");
    }

    #[test]
    fn closed_holomorphic_integrals_vanish(p in holo_poly(4, -1, 2), path in closed_path()) {
        let u = GenFunction::poly(p);
        let v = exact(&u, &path);
        prop_assert!(vanishes(&v, &u), "{v}");
    }

    #[test]
    fn cauchy_estimate_holds_inside(p in holo_poly(4, 0, 2), center in scalar(0, 2), r in radius(), t in 0.0f64..0.9, th in 0.0f64..6.3, k in 0u32..4) {
        let z = &center + &r.scale(Complex64::from_polar(t, th));
        let u = GenFunction::poly(p);
        let rep = cauchy_estimate_check(&u, &center, &r, &z, k, &EpsGrid::default(), &OracleConfig::default()).unwrap();
        prop_assert!(rep.holds, "violation at {:?}", rep.violation);
    }

    #[test]
    fn cauchy_formula_exact_and_quadrature_agree(
        p in holo_poly(4, -2, 2),
        center in scalar(0, 2),
        r in radius(),
        t in 0.0f64..0.6,
        th in 0.0f64..6.3,
        k in 0u32..4,
    ) {
        let (grid, cfg) = (EpsGrid::default(), OracleConfig::default());
        let z = &center + &r.scale(Complex64::from_polar(t, th));
        let u = GenFunction::poly(p);
        let exact = cauchy_integral(&u, &center, &r, &z, k, Mode::Exact, &grid, &cfg).unwrap();
        let q = cauchy_integral_quadrature(&u, &center, &r, &z, k, DEFAULT_NODES, &grid).unwrap();
        let (residual, worst) = q.residual(&exact.to_net(&grid));
        prop_assert!(worst <= 1e-8, "worst relative residual {worst}");
        prop_assert_eq!(residual.classify(&cfg), NetClass::Negligible);
    }
}
