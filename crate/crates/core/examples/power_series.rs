//! Power series with generalized coefficients: radius, sums and deflation.

use colombeau::analytic::{convergence_radius, sum_at, PowerSeries, TailLaw};
use colombeau::parse::parse_scalar_expr;
use colombeau::scalar::{AsymptoticScalar, Rational};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let zero = AsymptoticScalar::zero();

    // Σ ρ^{n/2} zⁿ has radius e^{1/2}
    let s = PowerSeries::from_law(zero.clone(), TailLaw::Affine(Rational::new(1, 2)));
    let r = convergence_radius(&s);
    println!("radius {:.6} ({:?})", r.radius, r.method);

    let z = parse_scalar_expr("rho^(-1/4)")?;
    let sum = sum_at(&s, &z, Rational::from_integer(6))?;
    println!("sum at {z}: {} ({} terms, tail ≤ {:.2e})", sum.value, sum.terms_used, sum.error_bound);

    // the geometric series diverges at 2
    match sum_at(&PowerSeries::geometric(zero.clone()), &AsymptoticScalar::real(2.0), Rational::from_integer(6)) {
        Ok(v) => println!("unexpected sum {}", v.value),
        Err(e) => println!("geometric at 2: {e}"),
    }

    let rn = PowerSeries::rho_nsq(zero);
    println!("radius of Σ ρ^(n²)/n! zⁿ: {}", convergence_radius(&rn).radius);
    let shifted = rn.multiply_by_linear().deflate()?;
    for k in 0..4 {
        println!("a_{k} = {}", shifted.coefficient(k).map(|a| a.to_string()).unwrap_or_default());
    }
    Ok(())
}
