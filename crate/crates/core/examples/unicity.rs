//! Identity theorem checks: accumulating zeros, characterization and growth.

use colombeau::analytic::characterize::{characterization_suite, entire_growth_analysis, truncated_exp, GrowthClaim};
use colombeau::analytic::unicity::unicity_check;
use colombeau::func::{GenFunction, Poly};
use colombeau::net::{EpsGrid, OracleConfig};
use colombeau::scalar::{AsymptoticScalar, Rational};
use colombeau::sets::SharpBall;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (grid, cfg) = (EpsGrid::default(), OracleConfig::default());
    let ball = SharpBall::new(AsymptoticScalar::zero(), 1.0)?;

    // zᵐ with m = ⌊ln 1/ε⌋ vanishes at every ρ^{1/k}
    let zeros: Vec<_> = (1..=10).map(|k| AsymptoticScalar::rho_pow(Rational::new(1, k))).collect();
    let rep = unicity_check(&GenFunction::ks_net(), &ball, &zeros, &grid, &cfg);
    println!("KS net: {:?}", rep.verdict);

    // z² − ρ² has only the two zeros ±ρ
    let u = GenFunction::poly(Poly::z().powi(2).sub(&Poly::constant(AsymptoticScalar::rho_pow(2.into()))));
    let pm = [AsymptoticScalar::rho(), -&AsymptoticScalar::rho()];
    println!("z² - ρ²: {:?}", unicity_check(&u, &ball, &pm, &grid, &cfg).verdict);

    let report = characterization_suite(&u, &ball, &grid, &cfg);
    for (i, c) in report.conditions.iter().enumerate() {
        println!("condition {}: {} ({})", i + 1, c.holds, c.note);
    }

    let claim = GrowthClaim::PolyGrowth(AsymptoticScalar::one(), 1);
    println!("truncated exp vs linear growth: {:?}", entire_growth_analysis(&truncated_exp(10), &claim, &grid, &cfg)?.verdict);
    Ok(())
}
