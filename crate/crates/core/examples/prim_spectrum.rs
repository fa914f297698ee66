// The primitive spectrum, its closure operator, radicals and the minimal
// center.

use invariant_ideals::graph::StateSet;
use invariant_ideals::spectrum::{
    is_radical_free, minimal_center_support, prim_spectrum, radical_of_support, PointSet,
};
use invariant_ideals::system::{load_system, FnK, SystemSpec};

pub fn run_example() -> Result<StateSet, Box<dyn std::error::Error>> {
    let s = load_system(&SystemSpec::from_float_rows(&[vec![
        vec![0.0, 0.5, 0.5],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
    ]]))?;

    let prim = prim_spectrum(&s)?;
    for (i, p) in prim.points().iter().enumerate() {
        println!("point {i}: support {}", p.support);
    }
    let order = prim.specialization_order();
    println!("T0 {} Hausdorff {}", order.t0, order.hausdorff);
    println!("cl({{0}}) = {:?}", prim.closure(&PointSet::from([0])));

    let f = FnK(vec![5.0, 0.0, 1.0]);
    println!("basic open set of f: {:?}", prim.basic_open(&f, 1e-12));

    for set in [vec![0, 1, 2], vec![1]] {
        let r = radical_of_support(&s, &StateSet::new(set.clone()))?;
        println!("rad(I_{set:?}) has support {:?}", r.support());
    }
    println!("radical free: {}", is_radical_free(&s)?);
    let m = minimal_center_support(&s)?;
    println!("M(S) = {m}");
    println!("{}", prim.to_dot());
    Ok(m)
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
