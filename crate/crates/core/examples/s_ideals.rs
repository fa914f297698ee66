// Self-supporting sets of the support digraph and the invariant ideals
// they carry.

use invariant_ideals::graph::StateSet;
use invariant_ideals::ideals::{
    enumerate_s_ideals, is_self_supporting, minimal_self_supporting_sets, restrict_to_ideal, SIdeal,
};
use invariant_ideals::systems::build_koopman;
use invariant_ideals::systems::MapSpec;
use invariant_ideals::system::Mode;

pub fn run_example() -> Result<usize, Box<dyn std::error::Error>> {
    // 0 -> 1 -> 2 -> 3 -> 2: a tail feeding a 2-cycle.
    let s = build_koopman(&MapSpec { n: 4, image: vec![1, 2, 3, 2] }, Mode::Rational)?;
    let g = s.digraph();

    for set in [vec![2, 3], vec![1, 2, 3], vec![0, 1]] {
        let set = StateSet::new(set);
        println!("{set} self-supporting: {}", is_self_supporting(g, &set));
    }
    if let Err(e) = SIdeal::new(g, StateSet::new(vec![0, 1])) {
        println!("rejected: {e}");
    }

    let ideals = enumerate_s_ideals(g)?;
    println!("{} invariant ideals:", ideals.len());
    for i in &ideals {
        println!("  I_L with L = {}", i.support());
    }
    let minimal = minimal_self_supporting_sets(g);
    println!("minimal self-supporting sets: {minimal:?}");

    // The smallest ideal's restriction is the swap on {2, 3}.
    let cycle = SIdeal::new(g, StateSet::new(vec![2, 3]))?;
    let sub = restrict_to_ideal(&s, &cycle)?;
    println!("restricted generator: {:?}", sub.generators()[0].matrix().to_rows());
    Ok(ideals.len())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
