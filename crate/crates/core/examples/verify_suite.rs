// Property suite against brute-force oracles on fixtures and seeded
// random instances.

use invariant_ideals::verify::run_suite;

pub fn run_example() -> Result<bool, Box<dyn std::error::Error>> {
    let report = run_suite(42, 40, 8)?;
    print!("{}", report.table());
    for r in &report.reports {
        for f in &r.failures {
            println!("{}: {} on {}", r.id, f.detail, f.instance);
        }
    }
    Ok(report.passed)
}

#[allow(dead_code)]
fn main() {
    match run_example() {
        Ok(true) => {}
        Ok(false) => std::process::exit(4),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
