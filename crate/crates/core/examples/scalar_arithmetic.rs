//! Arithmetic on truncated ρ-expansions: sums, products, inverses,
//! fractional powers and comparison.

use colombeau::parse::parse_scalar_expr;
use colombeau::scalar::Rational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x = parse_scalar_expr("2*rho^(-1/2) + 3 + rho")?;
    let y = parse_scalar_expr("rho^(1/2) - i*rho^2")?;

    println!("x       = {x}");
    println!("y       = {y}");
    println!("x + y   = {}", &x + &y);
    println!("x * y   = {}", &x * &y);
    println!("1 / x   = {}", x.invert()?);
    println!("sqrt(x) = {}", x.powr(Rational::new(1, 2))?);
    println!("exp(y)  = {}", y.exp()?);
    println!("v(x) = {:?}, |x|# = {:.4}", x.valuation(), x.sharp_norm().value);
    println!("x vs y: {:?}", x.compare(&y));

    // the round trip is exact up to the knowledge cap
    let back = &x * &x.invert()?;
    println!("x * (1/x) = {back}");
    Ok(())
}
