//! Sample nets on the ε grid and read their valuation numerically.

use colombeau::net::{EpsGrid, OracleConfig, SampledNet};
use colombeau::parse::parse_scalar_expr;
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = EpsGrid::default();
    let cfg = OracleConfig::default();

    for expr in ["rho^(-3/2) + 5", "rho^7", "rho^25"] {
        let net = SampledNet::from_scalar(&parse_scalar_expr(expr)?, &grid);
        let est = net.estimate_valuation(cfg.window)?;
        println!("{expr:>16}: slope {:7.3} ± {:.1e}, {}", est.slope, est.stderr, net.classify(&cfg));
    }

    // exp(-1/ε) decays faster than every power
    let flat = SampledNet::sample_log(&grid, "exp(-1/eps)", |eps| (-1.0 / eps, Complex64::new(1.0, 0.0)))?;
    println!("{:>16}: {}", "exp(-1/eps)", flat.classify(&cfg));

    // ε^{-ln ε} grows faster than every power
    let wild = SampledNet::sample_log(&grid, "eps^(-ln eps)", |eps| (eps.ln() * eps.ln(), Complex64::new(1.0, 0.0)))?;
    println!("{:>16}: {}", "eps^(-ln eps)", wild.classify(&cfg));
    Ok(())
}
