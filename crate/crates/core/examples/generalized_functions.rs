//! Polynomials in z and z̄ with generalized coefficients: evaluation,
//! derivatives, the ∂̄ test and the G∞ test.

use colombeau::func::{Domain, GenFunction, Poly};
use colombeau::net::{EpsGrid, OracleConfig};
use colombeau::parse::parse_scalar_expr;
use colombeau::scalar::AsymptoticScalar;
use colombeau::sets::{InternalSetRep, SharpBall};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (grid, cfg) = (EpsGrid::default(), OracleConfig::default());
    let c = |e: &str| parse_scalar_expr(e).map(Poly::constant);

    // u = ρ^{-1} z² + z z̄
    let u = Poly::z().powi(2).mul(&c("rho^(-1)")?).add(&Poly::z().mul(&Poly::zbar()));
    let z = parse_scalar_expr("2 + rho")?;
    println!("u(z) = {u} at z = {z}: {}", u.eval(&z));
    println!("D u  = {}", u.derivative(1, 0));
    println!("Dbar u = {}", u.dbar());

    let ball = Domain::Ball(SharpBall::new(AsymptoticScalar::zero(), 1.0)?);
    println!("u holomorphic? {:?}", GenFunction::poly(u.clone()).dbar_test(&ball, &grid, &cfg));
    let h = GenFunction::poly(u.holomorphic_part());
    println!("holomorphic part: {:?}", h.dbar_test(&ball, &grid, &cfg));

    let set = InternalSetRep::disc(AsymptoticScalar::zero(), AsymptoticScalar::real(0.5))?;
    println!("G-infinity on {set}: {:?}", h.is_ginfty(&set, 12, &grid, &cfg));
    println!("KS net at 1/2: {}", GenFunction::ks_net().eval(&AsymptoticScalar::real(0.5), &grid)?.describe());
    Ok(())
}
