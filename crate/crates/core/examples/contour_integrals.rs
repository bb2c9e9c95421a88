//! Path integrals, the Cauchy formula, homotopy invariance and Cauchy estimates.

use colombeau::contour::{
    cauchy_estimate_check, cauchy_integral, homotopy_invariance_check, path_integral, ConvexHomotopy, GenPath, Mode,
};
use colombeau::func::{GenFunction, Poly};
use colombeau::net::{EpsGrid, OracleConfig};
use colombeau::parse::parse_scalar_expr;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (grid, cfg) = (EpsGrid::default(), OracleConfig::default());
    let s = |e: &str| parse_scalar_expr(e);

    let center = s("1")?;
    let radius = s("rho")?;
    let circle = GenPath::circle(center.clone(), radius.clone())?;
    // z̄ integrates to 2πi r² around a circle of radius r
    let zbar = GenFunction::poly(Poly::zbar());
    for mode in [Mode::Exact, Mode::Quadrature(64)] {
        println!("{mode:?}: {}", path_integral(&zbar, &circle, mode, &grid, &cfg)?.describe());
    }

    let u = GenFunction::poly(Poly::z().powi(3).add(&Poly::constant(s("rho^(-1)")?)));
    let z = s("1 + 1/2*rho")?;
    // off-centre points need many nodes: the aliasing error scales like (|z - c| / r)^nodes
    for mode in [Mode::Exact, Mode::default()] {
        let v = cauchy_integral(&u, &center, &radius, &z, 2, mode, &grid, &cfg)?;
        println!("D²u(z) via {mode:?}: {}", v.describe());
    }

    let square = GenPath::square(&center, &s("2*rho")?)?;
    let h = ConvexHomotopy::new(circle, square)?;
    println!("homotopy: {:?}", homotopy_invariance_check(&u, &h, Mode::Exact, &grid, &cfg)?.verdict);

    let rep = cauchy_estimate_check(&u, &center, &radius, &center, 3, &grid, &cfg)?;
    println!("Cauchy estimate for k = 3 holds: {}", rep.holds);
    Ok(())
}
