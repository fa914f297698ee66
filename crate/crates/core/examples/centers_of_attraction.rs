// Orbit statistics of a finite map: visits to neighbourhoods of the
// minimal center and time averages along orbits.

use invariant_ideals::graph::StateSet;
use invariant_ideals::means::{almost_weak_stability, visit_frequency};
use invariant_ideals::spectrum::minimal_center_support;
use invariant_ideals::system::{FnK, Mode};
use invariant_ideals::systems::{build_koopman, MapSpec};

pub fn run_example() -> Result<f64, Box<dyn std::error::Error>> {
    let s = build_koopman(&MapSpec { n: 4, image: vec![1, 2, 3, 2] }, Mode::Rational)?;
    let m = minimal_center_support(&s)?;
    println!("M(S) = {m}");

    let n = 100;
    let hit = visit_frequency(&s, 0, &m, n)?;
    println!("time in M(S) from 0 over {n} steps: {hit}");
    for y in m.iter() {
        let u = m.difference(&StateSet::new(vec![y]));
        println!("without {y}: {}", visit_frequency(&s, 0, &u, n)?);
    }

    // Functions vanishing on M(S) average out along every orbit.
    let f = FnK(vec![1.0, 1.0, 0.0, 0.0]);
    let avg = almost_weak_stability(&s, &f, 0, n)?;
    println!("orbit average of {:?}: {avg}", f.values());
    Ok(hit)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
