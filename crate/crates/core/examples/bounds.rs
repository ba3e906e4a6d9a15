//! Szego entropy and Widom factor reports against the lower bounds.

use widom::extremal::Order;
use widom::measures::{jacobi_measure, FiniteGapSet};
use widom::potential::equilibrium;
use widom::szego::{eq_bound_constant, jacobi_l, szego_entropy, verify_bounds, BoundKind};

fn main() -> widom::Result<()> {
    let eq = equilibrium(&FiniteGapSet::interval(-1.0, 1.0)?)?;
    let mu = jacobi_measure(0.3, 0.6)?;
    println!("S = {:.15}, L = {:.15}", szego_entropy(&mu, &eq)?, jacobi_l(0.3, 0.6));

    let report = verify_bounds(&mu, &eq, Order::Finite(2.0), 10, BoundKind::Jacobi)?;
    print!("{}", report.to_csv());
    println!("Jacobi bound margin {:.3e}, pass {}", report.margin, report.pass);

    let two = equilibrium(&FiniteGapSet::new(&[(-1.0, -0.4), (0.2, 1.0)])?)?;
    for p in [4.0 / 3.0, 3.0] {
        let r = verify_bounds(two.measure(), &two, Order::Finite(p), 8, BoundKind::Equilibrium)?;
        println!("mu_K, p = {p:.4}: min [W_n^p]^p - {:.6} = {:.3e}", eq_bound_constant(p)?.powf(p), r.margin);
    }
    Ok(())
}
