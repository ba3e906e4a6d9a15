//! Torus measures on a two-band set and the bound 2 E^2 S.

use widom::isotorus::{torus_measure, verify_isolb, TorusPoint};
use widom::measures::FiniteGapSet;
use widom::potential::equilibrium;
use widom::szego::{eigenvalue_function, szego_entropy};

fn main() -> widom::Result<()> {
    let eq = equilibrium(&FiniteGapSet::new(&[(-2.0, -0.5), (0.3, 2.0)])?)?;
    for (gamma, flag) in [(-0.4, false), (-0.1, true), (0.3, false)] {
        let tp = TorusPoint::new(&eq, &[gamma], &[flag])?;
        let mu = torus_measure(&tp)?;
        let (s, e) = (szego_entropy(&mu, &eq)?, eigenvalue_function(&mu, &eq)?);
        let r = verify_isolb(&tp, &eq, 12)?;
        println!(
            "gamma = {gamma:5}, s = {}: a0^2 = {:.6}, S = {s:.6}, E = {e:.6}, min margin {:.3e}",
            u8::from(flag),
            tp.a0_squared,
            r.margin
        );
    }
    Ok(())
}
