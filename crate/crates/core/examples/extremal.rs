//! Minimal monic polynomials in L^p and in the sup norm.

use widom::extremal::{minimal_monic_lp, minimal_monic_sup};
use widom::measures::{jacobi_measure, FiniteGapSet};
use widom::potential::equilibrium;

fn main() -> widom::Result<()> {
    let mu = jacobi_measure(0.5, -0.5)?;
    for p in [1.0, 1.5, 3.0, 4.0] {
        let r = minimal_monic_lp(&mu, 6, p)?;
        println!(
            "p = {p}: ||P_6||_p = {:.15}  iterations {}  residual {:.1e}",
            r.norm, r.diagnostics.iterations, r.diagnostics.residual
        );
    }

    let eq = equilibrium(&FiniteGapSet::new(&[(-1.0, -0.3), (0.1, 1.0)])?)?;
    for n in [4, 9, 15] {
        let r = minimal_monic_sup(&eq, n)?;
        let w = r.norm / eq.capacity().powi(n as i32);
        println!("sup norm n = {n}: W_n = {w:.12} (>= 2), zeros {:?}", r.polynomial.real_zeros(-1.0, 1.0).len());
    }
    Ok(())
}
