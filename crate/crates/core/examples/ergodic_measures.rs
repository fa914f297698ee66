// Ergodic measures are the extreme invariant probabilities, one per
// terminal class. Any invariant probability splits over them.

use invariant_ideals::measures::{ergodic_decomposition, ergodic_measures, invariant_polytope, is_ergodic};
use invariant_ideals::system::{load_system, MeasureK, SystemSpec};

pub fn run_example() -> Result<Vec<f64>, Box<dyn std::error::Error>> {
    let s = load_system(&SystemSpec::from_float_rows(&[vec![
        vec![0.2, 0.3, 0.0, 0.5, 0.0],
        vec![0.0, 0.5, 0.5, 0.0, 0.0],
        vec![0.0, 0.25, 0.75, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 0.0, 1.0],
        vec![0.0, 0.0, 0.0, 1.0, 0.0],
    ]]))?;

    let ergodic = ergodic_measures(&s)?;
    for e in &ergodic {
        println!("support {} measure {:?}", e.support, e.measure.weights());
    }
    let poly = invariant_polytope(&s)?;
    println!("invariant span has dimension {}", poly.span_basis.len());

    let mixed: Vec<f64> = ergodic[0]
        .measure
        .weights()
        .iter()
        .zip(ergodic[1].measure.weights())
        .map(|(a, b)| 0.3 * a + 0.7 * b)
        .collect();
    let mixed = MeasureK::new(mixed, 1e-12)?;
    println!("mixture ergodic: {}", is_ergodic(&s, &mixed)?);
    let (coeffs, residual) = ergodic_decomposition(&s, &mixed)?;
    println!("decomposition {coeffs:?} (residual {residual:e})");
    Ok(coeffs)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
