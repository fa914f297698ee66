// Load a system from JSON and run the whole pipeline on it.
//
// ```text
// cargo run --example analyze_system
// ```

use invariant_ideals::cli::analyze;
use invariant_ideals::means::ErgodicNetConfig;
use invariant_ideals::system::{load_system, SystemSpec};

// State 0 leaks into two absorbing states.
const FIX_B: &str = r#"{
  "n": 3,
  "mode": "rational",
  "generators": [[["0", "1/2", "1/2"], ["0", "1", "0"], ["0", "0", "1"]]],
  "labels": ["transient", "left", "right"]
}"#;

pub fn run_example() -> Result<serde_json::Value, Box<dyn std::error::Error>> {
    let spec = SystemSpec::from_json(FIX_B)?;
    let s = load_system(&spec)?;
    let report = analyze(&s, &ErgodicNetConfig::default())?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(report)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
