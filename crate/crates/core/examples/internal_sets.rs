//! Internal sets: membership, margins and invertibility of a function on a set.

use colombeau::func::{GenFunction, Poly};
use colombeau::net::{EpsGrid, OracleConfig};
use colombeau::parse::parse_scalar_expr;
use colombeau::sets::{contains, invertibility_on_set, neighborhood_margin, InternalSetRep, Invertibility};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (grid, cfg) = (EpsGrid::default(), OracleConfig::default());
    let s = |e: &str| parse_scalar_expr(e);

    let small = InternalSetRep::disc(s("1 + rho")?, s("rho")?)?;
    let big = InternalSetRep::disc(s("1")?, s("3*rho")?)?;
    println!("margin of {small} in {big}: {:?}", neighborhood_margin(&small, &big, &grid, &cfg));

    for p in ["1 + 3/2*rho", "1 + 5*rho", "1 + rho + rho^30"] {
        println!("{p} in {small}: {:?}", contains(&small, &s(p)?, &grid, &cfg));
    }

    // z − (1 + ρ/2) vanishes inside the disc, z − 2 does not
    for zero in ["1 + 1/2*rho", "2"] {
        let u = GenFunction::poly(Poly::z().sub(&Poly::constant(s(zero)?)));
        match invertibility_on_set(&u, &small, &grid, &cfg) {
            Invertibility::Invertible { n, .. } => println!("z - ({zero}): invertible, bound eps^{n}"),
            Invertibility::NotInvertible { witness, value } => {
                println!("z - ({zero}): not invertible, witness {witness} with value {value}")
            }
        }
    }
    Ok(())
}
