//! Capacity, critical points and Green function of a few finite-gap sets.

use widom::measures::FiniteGapSet;
use widom::potential::equilibrium;

fn main() -> widom::Result<()> {
    for k in [0.2, 0.5, 0.8] {
        let set = FiniteGapSet::new(&[(-1.0, -k), (k, 1.0)])?;
        let eq = equilibrium(&set)?;
        let exact = (1.0f64 - k * k).sqrt() / 2.0;
        println!("k = {k}: cap = {:.15}  sqrt(1-k^2)/2 = {exact:.15}", eq.capacity());
    }
    let set = FiniteGapSet::new(&[(-2.0, -1.2), (-0.7, 0.4), (1.0, 2.5)])?;
    let eq = equilibrium(&set)?;
    println!("three bands: cap = {:.15}, critical points {:?}", eq.capacity(), eq.critical_points());
    println!("G_K(0.7) = {:.15}", eq.green(0.7)?);
    println!("{}", serde_json::to_string_pretty(&eq.summary())?);
    Ok(())
}
