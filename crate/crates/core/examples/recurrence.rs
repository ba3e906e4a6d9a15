//! Jacobi parameters of a Jacobi weight against the closed-form norms.

use widom::measures::jacobi_measure;
use widom::orthopoly::{jacobi_norm_closed_form, recurrence};

fn main() -> widom::Result<()> {
    let (alpha, beta) = (1.5, -0.3);
    let rc = recurrence(&jacobi_measure(alpha, beta)?, 30)?;
    println!("{:>3} {:>22} {:>22} {:>10}", "k", "||P_k||", "closed form", "rel err");
    for k in (0..=30).step_by(5) {
        let exact = jacobi_norm_closed_form(alpha, beta, k as u32).sqrt();
        println!("{k:>3} {:>22.15e} {exact:>22.15e} {:>10.1e}", rc.norms[k], (rc.norms[k] / exact - 1.0).abs());
    }
    println!("a_30 = {:.15}, b_30 = {:.15}", rc.a[29], rc.b[29]);
    Ok(())
}
