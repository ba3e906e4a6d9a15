//! Integrals against singular weights, resolved at the singular points.

use widom::measures::{jacobi_measure, Singularity};
use widom::quadrature::{discretize, gauss_jacobi_rule, integrate};

fn main() -> widom::Result<()> {
    let rule = gauss_jacobi_rule(20, -1.0, 1.0, -0.5, -0.5)?;
    println!("int (1-x^2)^(-1/2) x^2 dx = {:.15} (pi/2 = {:.15})", rule.apply(|x| x * x), std::f64::consts::FRAC_PI_2);

    let mu = jacobi_measure(-0.9, 0.3)?;
    let est = integrate(|p| (p.x - 0.2).abs().powf(-0.4), &[Singularity::new(0.2, -0.4)], &mu, 1e-12)?;
    println!("int |x - 0.2|^-0.4 dmu = {:.15} +- {:.1e}", est.value, est.error);

    let dm = discretize(&mu, 40)?;
    println!("{} nodes exact to degree 40, mass {:.15}", dm.len(), dm.mass());
    Ok(())
}
