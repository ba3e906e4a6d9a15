//! The universal bound is approached along the extremal families.

use widom::cli::sharpness_table;

fn main() -> widom::Result<()> {
    for r in sharpness_table(2, 2.0, &[1e-1, 1e-2, 1e-3, 1e-4])? {
        println!("eps = {:.0e}: [W]^p / S = {:.10}", r.eps.unwrap_or(0.0), r.ratio);
    }
    let r = &sharpness_table(1, 0.5, &[])?[0];
    println!("n = 1, p = 1/2: [W]^p / S = {:.15}", r.ratio);
    Ok(())
}
