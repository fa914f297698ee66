// Cesàro, Abel and exact mean ergodic projections, and radical membership
// read off from the decay of `C_N|f|`.

use invariant_ideals::graph::StateSet;
use invariant_ideals::means::{
    abel_limit, abel_operator, cesaro_projection, decay_trace_csv, decay_trace_exact, exact_projection,
    radical_membership_via_means, ErgodicNetConfig,
};
use invariant_ideals::scalar::{format_rational, Field, Rational};
use invariant_ideals::system::{load_system, FnK, SystemSpec};

pub fn run_example() -> Result<f64, Box<dyn std::error::Error>> {
    let spec = SystemSpec::from_json(
        r#"{"n":3,"mode":"rational","generators":[[["0","1/2","1/2"],["0","1","0"],["0","0","1"]]]}"#,
    )?;
    let s = load_system(&spec)?;
    let cfg = ErgodicNetConfig::default();

    let exact = exact_projection(&s)?;
    let cesaro = cesaro_projection(&s, &cfg)?;
    let abel = abel_limit(&s, &cfg)?;
    println!("P = {:?}", exact.matrix.to_rows());
    println!("Cesàro converged at N = {:?}", cesaro.final_n);
    let gap = exact
        .matrix
        .max_abs_diff(&cesaro.matrix)
        .max(exact.matrix.max_abs_diff(&abel.matrix));
    println!("largest disagreement {gap:e}");

    let a = abel_operator(&s, 0.5)?;
    println!("A_1/2 = {:?}", a.matrix().to_rows());

    let k = StateSet::full(3);
    for f in [FnK(vec![1.0, 0.0, 0.0]), FnK(vec![0.0, 1.0, 0.0])] {
        let m = radical_membership_via_means(&s, &k, &f, &cfg)?;
        println!("f = {:?}: member {} (limit {:e})", f.values(), m.member, m.limit_max);
        if m.member {
            print!("{}", decay_trace_csv(&m.trace[..4.min(m.trace.len())]));
        }
    }

    // In exact arithmetic the probe decays like 1/N on the nose.
    let probe = [1, 0, 0].map(|v| Rational::from_ratio(v, 1));
    for (n, d) in decay_trace_exact(&s, &k, &probe, 6)? {
        println!("N = {n}: {}", format_rational(&d));
    }
    Ok(gap)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
