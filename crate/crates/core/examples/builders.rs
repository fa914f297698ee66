// Instance builders: rotations, Ulam discretizations, products and
// seeded random systems.

use invariant_ideals::measures::ergodic_measures;
use invariant_ideals::spectrum::prim_spectrum;
use invariant_ideals::system::Mode;
use invariant_ideals::systems::{
    build_product, build_rotation, build_ulam, random_instance, ProductKind, RandomConfig, UlamMap, UlamSpec,
};

pub fn run_example() -> Result<Vec<usize>, Box<dyn std::error::Error>> {
    let mut counts = Vec::new();
    for a in 0..6 {
        let k = prim_spectrum(&build_rotation(6, a, Mode::Rational)?)?.len();
        println!("rotation x -> x + {a} mod 6: {k} orbits");
        counts.push(k);
    }

    let ulam = build_ulam(&UlamSpec { map: UlamMap::Doubling, cells: 16 }, Mode::Rational)?;
    let mu = &ergodic_measures(&ulam)?[0];
    println!("doubling map, 16 cells: invariant density {:?}", mu.measure.weights());

    let swap = build_rotation(2, 1, Mode::Rational)?;
    for kind in [ProductKind::Synchronous, ProductKind::Independent] {
        let p = build_product(&swap, &swap, kind)?;
        println!("{kind:?} product: {} generators, {} points", p.generators().len(), prim_spectrum(&p)?.len());
    }

    let r = random_instance(11, &RandomConfig::default())?;
    println!("random instance: {}", r.to_spec().to_json());
    Ok(counts)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
