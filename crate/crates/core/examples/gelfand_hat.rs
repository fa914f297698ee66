// Fixed functions on `M(S)` as continuous functions on the spectrum, and
// the mean ergodicity verdict.

use invariant_ideals::gelfand::{mean_ergodicity_verdict, verify_lattice_isomorphism, HatContext, HatFunction};
use invariant_ideals::means::ErgodicNetConfig;
use invariant_ideals::system::{FnK, Mode};
use invariant_ideals::systems::build_rotation;

pub fn run_example() -> Result<bool, Box<dyn std::error::Error>> {
    // Two orbits {0, 2, 4} and {1, 3, 5}.
    let s = build_rotation(6, 2, Mode::Rational)?;
    let ctx = HatContext::new(&s)?;

    let f = FnK(vec![3.0, -1.0, 3.0, -1.0, 3.0, -1.0]);
    let h = ctx.hat(&f)?;
    println!("hat f = {:?}", h.values);
    let back = ctx.hat_inverse(&HatFunction { values: vec![0.5, 2.0] })?;
    println!("extension of (0.5, 2) = {:?}", back.values());
    if let Err(e) = ctx.hat(&FnK(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0])) {
        println!("not fixed: {e}");
    }

    let report = verify_lattice_isomorphism(&s)?;
    println!(
        "dim fix = {}, #Prim = {}, isometry defect {:e}, round trip {:e}",
        report.fix_dim, report.prim_count, report.isometry, report.round_trip
    );

    let verdict = mean_ergodicity_verdict(&s, &ErgodicNetConfig::default())?;
    println!("{}", serde_json::to_string_pretty(&verdict)?);
    Ok(verdict.mean_ergodic && report.passed)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
