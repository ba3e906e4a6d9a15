//! Measures round-trip through JSON.

use widom::measures::{sharpness_measure_eps, Measure};

fn main() -> widom::Result<()> {
    let mu = sharpness_measure_eps(2, 1.5, 0.05)?;
    let json = mu.to_json();
    println!("{json}");
    let back = Measure::from_json(&json)?;
    println!("identical after round trip: {}", back == mu);
    println!("density at 0.3: {:.15}", back.density_at(0.3));
    Ok(())
}
