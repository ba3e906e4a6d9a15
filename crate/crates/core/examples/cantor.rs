//! Widom factors of the Cantor measure for a few cover levels.

use widom::cli::cantor_table;

fn main() -> widom::Result<()> {
    let table = cantor_table(&[5, 6, 7], 12)?;
    for r in table.rows.iter().filter(|r| r.n % 4 == 0) {
        println!("level {} cap {:.10} n {:>2}: W_n^2 = {:.10}", r.level, r.capacity, r.n, r.widom);
    }
    println!("liminf estimate {:.6}", table.liminf_estimate);
    Ok(())
}
