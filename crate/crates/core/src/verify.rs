//! Brute-force oracles and the randomized proposition suite.
//!
//! The oracles share no code with the production paths they check: closed
//! sets come from scanning every subset against the edge list, and
//! invariant-polytope vertices from double description.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gelfand::{mean_ergodicity_verdict, verify_lattice_isomorphism};
use crate::graph::{StateSet, SupportDigraph};
use crate::ideals::{
    enumerate_s_ideals, lift_set, localize_set, minimal_self_supporting_sets, restrict_semigroup, SIdeal,
};
use crate::linalg::{Matrix, PIVOT_TOL};
use crate::means::{exact_projection, radical_membership_via_means, visit_frequency, ErgodicNetConfig};
use crate::measures::{
    embed_measure, ergodic_decomposition, ergodic_measures, fixed_space_dim, indicator_is_fixed, is_ergodic,
    is_ergodic_exact, is_extreme, is_extreme_exact, ErgodicMeasure,
};
use crate::scalar::{Field, Rational};
use crate::spectrum::{prim_spectrum, PointSet, PrimSpectrum, Radical};
use crate::system::{FnK, MarkovSemigroup, MeasureK, Mode, SystemSpec};
use crate::systems::{
    build_koopman, build_product, build_rotation, build_ulam, instance_rng, random_instance_from, MapSpec,
    ProductKind, RandomConfig, UlamMap, UlamSpec,
};

pub const CLOSED_SET_ORACLE_LIMIT: usize = 8;
pub const VERTEX_ORACLE_LIMIT: usize = 10;

/// Every proposition the suite checks, in report order.
pub const PROPOSITIONS: [&str; 20] = [
    "extreme-iff-ergodic",
    "maximal-ideals-are-primitive",
    "subsystem-embedding",
    "quotient-bijection",
    "invariant-kernel-is-radical",
    "radical-has-witness-measure",
    "radical-via-cesaro-decay",
    "minimal-center-of-attraction",
    "hull-kernel-closure-axioms",
    "spectrum-t0",
    "basic-open-sets",
    "closed-points-are-maximal",
    "ergodic-to-prim-surjective",
    "primitive-ideals-are-prime",
    "specialization-convergence",
    "indicator-is-fixed",
    "quotient-homeomorphism",
    "hat-lattice-isomorphism",
    "mean-ergodicity-equivalence",
    "radical-free-mean-ergodic",
];

/// Nonempty forward-closed sets by exhaustive scan of all subsets.
pub fn oracle_forward_closed_sets(g: &SupportDigraph) -> Result<Vec<StateSet>> {
    let n = g.n();
    if n > CLOSED_SET_ORACLE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: CLOSED_SET_ORACLE_LIMIT,
        });
    }
    let edges: Vec<(usize, usize)> = g.edges().collect();
    Ok((1u64..1 << n)
        .filter(|&m| edges.iter().all(|&(x, y)| m >> x & 1 == 0 || m >> y & 1 == 1))
        .map(|m| StateSet::from_mask(m, n))
        .collect())
}

/// Extreme rays of `{x ≥ 0 : a·x = 0 for every a}`, each scaled to sum 1.
pub fn double_description<T: Field>(n: usize, equalities: &[Vec<T>], tol: f64) -> Vec<Vec<T>> {
    let zero_mask = |r: &[T]| -> u64 {
        r.iter()
            .enumerate()
            .filter(|(_, v)| v.negligible(tol))
            .fold(0, |m, (i, _)| m | 1 << i)
    };
    let normalize = |mut r: Vec<T>| -> Vec<T> {
        for v in r.iter_mut() {
            if v.negligible(tol) {
                *v = T::zero();
            }
        }
        let total = r.iter().fold(T::zero(), |a, b| a + b.clone());
        r.into_iter().map(|v| v / total.clone()).collect()
    };
    let mut rays: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    for a in equalities {
        let vals: Vec<T> = rays
            .iter()
            .map(|r| a.iter().zip(r).fold(T::zero(), |s, (x, y)| s + x.clone() * y.clone()))
            .collect();
        let (mut zero, mut pos, mut neg) = (Vec::new(), Vec::new(), Vec::new());
        for (i, v) in vals.iter().enumerate() {
            if v.negligible(tol) {
                zero.push(i);
            } else if *v > T::zero() {
                pos.push(i);
            } else {
                neg.push(i);
            }
        }
        if pos.is_empty() && neg.is_empty() {
            continue;
        }
        let masks: Vec<u64> = rays.iter().map(|r| zero_mask(r)).collect();
        let mut next: Vec<Vec<T>> = zero.iter().map(|&i| rays[i].clone()).collect();
        for &p in &pos {
            for &q in &neg {
                let common = masks[p] & masks[q];
                let blocked = (0..rays.len()).any(|r| r != p && r != q && masks[r] & common == common);
                if blocked {
                    continue;
                }
                let w: Vec<T> = rays[q]
                    .iter()
                    .zip(&rays[p])
                    .map(|(rq, rp)| vals[p].clone() * rq.clone() - vals[q].clone() * rp.clone())
                    .collect();
                next.push(normalize(w));
            }
        }
        rays = next;
    }
    let mut out: Vec<Vec<T>> = Vec::new();
    for r in rays {
        let r = normalize(r);
        let dup = out.iter().any(|o| {
            o.iter()
                .zip(&r)
                .all(|(a, b)| (a.clone() - b.clone()).negligible(tol.max(1e-9)))
        });
        if !dup {
            out.push(r);
        }
    }
    out
}

fn stationarity_rows<T: Field>(gens: &[&Matrix<T>]) -> Vec<Vec<T>> {
    let n = gens[0].rows();
    gens.iter()
        .flat_map(|g| {
            (0..n).map(move |y| {
                (0..n)
                    .map(|x| {
                        let v = g[(x, y)].clone();
                        if x == y {
                            v - T::one()
                        } else {
                            v
                        }
                    })
                    .collect()
            })
        })
        .collect()
}

/// Vertices of the invariant-probability polytope by double description.
pub fn oracle_polytope_vertices(s: &MarkovSemigroup) -> Result<Vec<MeasureK>> {
    if let Some(exact) = oracle_polytope_vertices_exact(s)? {
        return Ok(exact
            .into_iter()
            .map(|v| MeasureK::from_weights_unchecked(v.iter().map(Field::to_f64).collect()))
            .collect());
    }
    let rows = stationarity_rows(&s.float_matrices());
    Ok(double_description(s.n(), &rows, 1e-11)
        .into_iter()
        .map(MeasureK::from_weights_unchecked)
        .collect())
}

/// Exact vertices for rational-mode systems, `None` in float mode.
pub fn oracle_polytope_vertices_exact(s: &MarkovSemigroup) -> Result<Option<Vec<Vec<Rational>>>> {
    if s.n() > VERTEX_ORACLE_LIMIT {
        return Err(Error::TooLarge {
            n: s.n(),
            limit: VERTEX_ORACLE_LIMIT,
        });
    }
    Ok(s.exact_matrices()
        .map(|ex| double_description(s.n(), &stationarity_rows(&ex), 0.0)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub instance: String,
    pub detail: String,
    /// The full instance, so the failure replays from the report alone.
    pub witness: SystemSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub id: String,
    pub instances: usize,
    pub failures: Vec<Failure>,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub instances: usize,
    pub reports: Vec<OracleReport>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn table(&self) -> String {
        let mut out = format!("{:<32} {:>9} {:>8} {:>10}\n", "proposition", "instances", "failures", "ms");
        for r in &self.reports {
            out.push_str(&format!(
                "{:<32} {:>9} {:>8} {:>10.1}\n",
                r.id,
                r.instances,
                r.failures.len(),
                r.runtime_ms
            ));
        }
        out.push_str(if self.passed { "all propositions pass\n" } else { "FAILURES present\n" });
        out
    }
}

/// Named fixtures covered on every suite run.
pub fn fixtures() -> Vec<(String, MarkovSemigroup)> {
    let mut out = Vec::new();
    let mut add = |name: &str, s: Result<MarkovSemigroup>| {
        out.push((name.to_string(), s.expect("fixture is valid")));
    };
    let rows = |g: Vec<Vec<Vec<f64>>>| crate::system::load_system(&SystemSpec::from_float_rows(&g));
    add("identity-3", build_rotation(3, 0, Mode::Rational));
    add("swap", build_rotation(2, 1, Mode::Rational));
    add(
        "fix-b",
        rows(vec![vec![vec![0.0, 0.5, 0.5], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]]),
    );
    add("koopman-2x-mod-3", build_koopman(&MapSpec { n: 3, image: vec![0, 2, 1] }, Mode::Rational));
    add(
        "koopman-tail-into-2-cycle",
        build_koopman(&MapSpec { n: 4, image: vec![1, 2, 3, 2] }, Mode::Rational),
    );
    add("rotation-6-2", build_rotation(6, 2, Mode::Rational));
    add("rotation-5-2", build_rotation(5, 2, Mode::Float));
    add("ulam-doubling-8", build_ulam(&UlamSpec { map: UlamMap::Doubling, cells: 8 }, Mode::Rational));
    let swap = build_rotation(2, 1, Mode::Rational).expect("valid");
    add("swap-x-swap", build_product(&swap, &swap, ProductKind::Synchronous));
    add(
        "z4-two-rotations",
        rows(vec![
            vec![
                vec![0.0, 1.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0],
                vec![0.0, 0.0, 0.0, 1.0],
                vec![1.0, 0.0, 0.0, 0.0],
            ],
            vec![
                vec![0.0, 0.0, 1.0, 0.0],
                vec![0.0, 0.0, 0.0, 1.0],
                vec![1.0, 0.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0, 0.0],
            ],
        ]),
    );
    add(
        "near-zero-entries",
        rows(vec![vec![
            vec![1.0 - 1e-13, 1e-13, 0.0],
            vec![0.0, 0.5, 0.5],
            vec![0.0, 0.5, 0.5],
        ]]),
    );
    add(
        "rational-2x2",
        SystemSpec::from_json(r#"{"n":2,"mode":"rational","generators":[[["1/3","2/3"],["1/2","1/2"]]]}"#)
            .and_then(|spec| crate::system::load_system(&spec)),
    );
    out
}

/// Fixtures followed by `count` seeded random instances.
pub fn suite_instances(seed: u64, count: usize, max_n: usize) -> Result<Vec<(String, MarkovSemigroup)>> {
    let mut out = fixtures();
    for i in 0..count {
        let cfg = RandomConfig {
            n_max: max_n,
            mode: if i % 4 == 3 { Mode::Rational } else { Mode::Float },
            ..Default::default()
        };
        let s = random_instance_from(&mut instance_rng(seed, i as u64), &cfg)?;
        out.push((format!("random[seed={seed},i={i}]"), s));
    }
    Ok(out)
}

pub fn run_suite(seed: u64, count: usize, max_n: usize) -> Result<SuiteReport> {
    Ok(run_suite_on(suite_instances(seed, count, max_n)?, seed))
}

type Outcome = Option<std::result::Result<(), String>>;

/// Runs every proposition on every instance, in parallel; results are
/// merged by proposition id and instance order.
pub fn run_suite_on(instances: Vec<(String, MarkovSemigroup)>, seed: u64) -> SuiteReport {
    let per_instance: Vec<Vec<(Outcome, f64)>> = instances
        .par_iter()
        .enumerate()
        .map(|(i, (_, s))| {
            let mut rng = instance_rng(seed ^ 0x5u64.rotate_right(4), i as u64);
            check_instance(s, &mut rng)
        })
        .collect();
    let mut reports: Vec<OracleReport> = PROPOSITIONS
        .iter()
        .map(|id| OracleReport {
            id: id.to_string(),
            instances: 0,
            failures: Vec::new(),
            runtime_ms: 0.0,
        })
        .collect();
    for ((label, s), outcomes) in instances.iter().zip(per_instance) {
        for (report, (outcome, ms)) in reports.iter_mut().zip(outcomes) {
            report.runtime_ms += ms;
            match outcome {
                None => {}
                Some(Ok(())) => report.instances += 1,
                Some(Err(detail)) => {
                    report.instances += 1;
                    report.failures.push(Failure {
                        instance: label.clone(),
                        detail,
                        witness: s.to_spec(),
                    });
                }
            }
        }
    }
    let passed = reports.iter().all(|r| r.instances > 0 && r.failures.is_empty());
    SuiteReport {
        seed,
        instances: instances.len(),
        reports,
        passed,
    }
}

struct Ctx<'a> {
    s: &'a MarkovSemigroup,
    ergodics: Vec<ErgodicMeasure>,
    spectrum: PrimSpectrum,
    /// Enumerated S-ideals, thinned to at most `IDEAL_CAP`.
    ideals: Vec<SIdeal>,
    center: StateSet,
}

const IDEAL_CAP: usize = 24;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn ensure(ok: bool, detail: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(detail())
    }
}

fn check_instance(s: &MarkovSemigroup, rng: &mut ChaCha8Rng) -> Vec<(Outcome, f64)> {
    let ctx = (|| -> Result<Ctx> {
        let ergodics = ergodic_measures(s)?;
        let spectrum = prim_spectrum(s)?;
        let all = enumerate_s_ideals(s.digraph())?;
        let step = all.len().div_ceil(IDEAL_CAP).max(1);
        let mut ideals: Vec<SIdeal> = all.iter().step_by(step).cloned().collect();
        if !ideals.iter().any(|i| i.is_zero_ideal(s.n())) {
            ideals.push(SIdeal::zero(s.n()));
        }
        let center = spectrum.union_of_supports();
        Ok(Ctx {
            s,
            ergodics,
            spectrum,
            ideals,
            center,
        })
    })();
    let ctx = match ctx {
        Ok(c) => c,
        Err(e) => {
            let msg = format!("analysis failed: {e}");
            return PROPOSITIONS.iter().map(|_| (Some(Err(msg.clone())), 0.0)).collect();
        }
    };
    type Check = fn(&Ctx, &mut ChaCha8Rng) -> Outcome;
    let checks: [Check; 20] = [
        extreme_iff_ergodic,
        maximal_ideals_are_primitive,
        subsystem_embedding,
        quotient_bijection,
        invariant_kernel_is_radical,
        radical_has_witness_measure,
        radical_via_cesaro_decay,
        minimal_center_of_attraction,
        closure_axioms,
        spectrum_t0,
        basic_open_sets,
        closed_points_are_maximal,
        ergodic_to_prim_surjective,
        primitive_ideals_are_prime,
        specialization_convergence,
        indicator_fixed,
        quotient_homeomorphism,
        hat_isomorphism,
        mean_ergodicity_equivalence,
        radical_free_mean_ergodic,
    ];
    checks
        .iter()
        .map(|check| {
            let t = Instant::now();
            let outcome = check(&ctx, rng);
            (outcome, t.elapsed().as_secs_f64() * 1e3)
        })
        .collect()
}

/// A random function vanishing on a random subset, nonzero values of
/// modulus in `[0.1, 1]`.
fn random_probe(n: usize, rng: &mut ChaCha8Rng) -> FnK {
    FnK((0..n)
        .map(|_| {
            if rng.random_bool(0.5) {
                0.0
            } else {
                let v: f64 = rng.random_range(0.1..1.0);
                if rng.random_bool(0.5) { v } else { -v }
            }
        })
        .collect())
}

fn random_mixture(ctx: &Ctx, rng: &mut ChaCha8Rng) -> MeasureK {
    let k = ctx.ergodics.len();
    let mut coeffs: Vec<f64> = (0..k)
        .map(|_| if rng.random_bool(0.6) { rng.random_range(0.1..1.0) } else { 0.0 })
        .collect();
    if coeffs.iter().all(|&c| c == 0.0) {
        coeffs[rng.random_range(0..k)] = 1.0;
    }
    let total: f64 = coeffs.iter().sum();
    let mut w = vec![0.0; ctx.s.n()];
    for (c, e) in coeffs.iter().zip(&ctx.ergodics) {
        for (wi, v) in w.iter_mut().zip(e.measure.weights()) {
            *wi += c / total * v;
        }
    }
    MeasureK::from_weights_unchecked(w)
}

fn extreme_iff_ergodic(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Outcome {
    let s = ctx.s;
    if s.n() > VERTEX_ORACLE_LIMIT {
        return None;
    }
    Some((|| {
        if let Some(vertices) = oracle_polytope_vertices_exact(s).map_err(err)? {
            let mut computed: Vec<Vec<Rational>> =
                ctx.ergodics.iter().map(|e| e.exact.clone().expect("exact")).collect();
            let mut oracle = vertices;
            computed.sort();
            oracle.sort();
            ensure(computed == oracle, || format!("vertices {oracle:?} vs ergodic {computed:?}"))?;
            for v in &oracle {
                ensure(is_ergodic_exact(s, v).map_err(err)?, || "vertex fails fixed-space test".into())?;
                ensure(is_extreme_exact(s, v).map_err(err)?, || "vertex fails vertex test".into())?;
            }
            if oracle.len() >= 2 {
                let half = Rational::from_ratio(1, 2);
                let mix: Vec<Rational> = oracle[0]
                    .iter()
                    .zip(&oracle[1])
                    .map(|(a, b)| (a.clone() + b.clone()) * half.clone())
                    .collect();
                ensure(!is_ergodic_exact(s, &mix).map_err(err)?, || "mixture passes fixed-space test".into())?;
                ensure(!is_extreme_exact(s, &mix).map_err(err)?, || "mixture passes vertex test".into())?;
            }
            return Ok(());
        }
        let oracle = oracle_polytope_vertices(s).map_err(err)?;
        ensure(oracle.len() == ctx.ergodics.len(), || {
            format!("{} vertices but {} ergodic measures", oracle.len(), ctx.ergodics.len())
        })?;
        for v in &oracle {
            let matched = ctx.ergodics.iter().any(|e| e.measure.max_abs_diff(v) <= 1e-8);
            ensure(matched, || format!("vertex {:?} has no ergodic match", v.weights()))?;
        }
        for e in &ctx.ergodics {
            let (a, b) = (is_ergodic(s, &e.measure).map_err(err)?, is_extreme(s, &e.measure).map_err(err)?);
            ensure(a && b, || format!("ergodic measure on {}: tests say {a}/{b}", e.support))?;
        }
        if ctx.ergodics.len() >= 2 {
            let mix = random_mixture(ctx, rng);
            let a = is_ergodic(s, &mix).map_err(err)?;
            let b = is_extreme(s, &mix).map_err(err)?;
            ensure(a == b, || format!("tests disagree on a mixture: {a}/{b}"))?;
        }
        Ok(())
    })())
}

fn maximal_ideals_are_primitive(ctx: &Ctx, _: &mut ChaCha8Rng) -> Outcome {
    Some((|| {
        let minimal = minimal_self_supporting_sets(ctx.s.digraph());
        ensure(minimal.len() == ctx.ergodics.len(), || {
            format!("{} minimal sets, {} ergodic measures", minimal.len(), ctx.ergodics.len())
        })?;
        for m in &minimal {
            let carried: Vec<&ErgodicMeasure> = ctx.ergodics.iter().filter(|e| &e.support == m).collect();
            ensure(carried.len() == 1, || format!("{m} carries {} measures", carried.len()))?;
            let w = carried[0].measure.weights();
            ensure((0..w.len()).all(|x| (w[x] > 0.0) == m.contains(x)), || {
                format!("measure on {m} is not strictly positive exactly there: {w:?}")
            })?;
            ensure(ctx.spectrum.find(m).is_some(), || format!("{m} is not a primitive point"))?;
        }
        Ok(())
    })())
}

fn subsystem_embedding(ctx: &Ctx, _: &mut ChaCha8Rng) -> Outcome {
    Some((|| {
        for ideal in &ctx.ideals {
            let l = ideal.support();
            let restricted = restrict_semigroup(ctx.s, l).map_err(err)?;
            let local = ergodic_measures(&restricted).map_err(err)?;
            let expected: Vec<&ErgodicMeasure> = ctx.ergodics.iter().filter(|e| e.support.is_subset(l)).collect();
            ensure(local.len() == expected.len(), || format!("{l}: {} vs {}", local.len(), expected.len()))?;
            for (nu, e) in local.iter().zip(expected) {
                let emb = embed_measure(ctx.s, ideal, &nu.measure).map_err(err)?;
                ensure(emb.max_abs_diff(&e.measure) <= 1e-9, || format!("{l}: embedded measure differs"))?;
                ensure(lift_set(l, &nu.support) == e.support, || format!("{l}: support mismatch"))?;
                ensure(is_ergodic(ctx.s, &emb).map_err(err)?, || format!("{l}: embedded measure not ergodic"))?;
            }
        }
        Ok(())
    })())
}

fn quotient_bijection(ctx: &Ctx, _: &mut ChaCha8Rng) -> Outcome {
    Some((|| {
        for ideal in &ctx.ideals {
            let l = ideal.support();
            let q = crate::spectrum::quotient_spectrum_bijection(ctx.s, ideal).map_err(err)?;
            let hull = ctx.spectrum.hull(l);
            ensure(q.pairs.len() == hull.len(), || format!("{l}: {} pairs for {} points", q.pairs.len(), hull.len()))?;
            let images: PointSet = q.pairs.iter().map(|p| p.1).collect();
            ensure(images.len() == q.pairs.len(), || format!("{l}: correspondence not injective"))?;
            let restricted = restrict_semigroup(ctx.s, l).map_err(err)?;
            let small = prim_spectrum(&restricted).map_err(err)?;
            let local_rad = small.radical_of(&StateSet::full(restricted.n()));
            let global_rad = ctx.spectrum.radical_of(l);
            let mapped = global_rad.support().map(|r| localize_set(l, r));
            ensure(local_rad.support().cloned() == mapped, || {
                format!("{l}: restricted radical {local_rad:?} vs image {mapped:?}")
            })?;
        }
        Ok(())
    })())
}

fn invariant_kernel_is_radical(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Outcome {
    Some((|| {
        for _ in 0..4 {
            let mu = random_mixture(ctx, rng);
            let supp = mu.support(ctx.s.tolerances().supp);
            let rad = ctx.spectrum.radical_of(&supp);
            ensure(rad.support() == Some(&supp), || format!("I_μ with support {supp} has radical {rad:?}"))?;
            let (_, residual) = ergodic_decomposition(ctx.s, &mu).map_err(err)?;
            ensure(residual <= 1e-10, || format!("decomposition residual {residual:e}"))?;
        }
        Ok(())
    })())
}

fn radical_has_witness_measure(ctx: &Ctx, _: &mut ChaCha8Rng) -> Outcome {
    Some((|| {
        for ideal in &ctx.ideals {
            let l = ideal.support();
            let Radical::Ideal(r) = ctx.spectrum.radical_of(l) else {
                return Err(format!("radical of self-supporting {l} is the full algebra"));
            };
            let w = crate::spectrum::radical_witness_measure(ctx.s, &r).map_err(err)?;
            let res = ctx.s.invariance_residual(&w).map_err(err)?;
            ensure(res <= 1e-9, || format!("witness for {} not invariant: {res:e}", r.support))?;
            ensure(w.support(ctx.s.tolerances().supp) == r.support, || {
                format!("witness support differs from {}", r.support)
            })?;
        }
        Ok(())
    })())
}

fn radical_via_cesaro_decay(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Outcome {
    Some((|| {
        let cfg = ErgodicNetConfig::default();
        for ideal in ctx.ideals.iter().take(12) {
            let l = ideal.support();
            let rad = ctx.spectrum.radical_of(l);
            let rad_support = rad.support().cloned().unwrap_or_else(StateSet::empty);
            for _ in 0..3 {
                let f = random_probe(ctx.s.n(), rng);
                let algebraic = rad_support.iter().all(|x| f.0[x] == 0.0);
                let via = radical_membership_via_means(ctx.s, l, &f, &cfg).map_err(err)?;
                ensure(algebraic == via.member, || {
                    format!("L = {l}, f = {:?}: algebraic {algebraic}, decay {:e}", f.0, via.limit_max)
                })?;
            }
        }
        Ok(())
    })())
}

/// Length of the cycle through `y`, if `y` is periodic under `phi`.
fn cycle_length(phi: &[usize], y: usize) -> Option<usize> {
    let mut z = phi[y];
    for len in 1..=phi.len() {
        if z == y {
            return Some(len);
        }
        z = phi[z];
    }
    None
}

fn minimal_center_of_attraction(ctx: &Ctx, _: &mut ChaCha8Rng) -> Outcome {
    Some((|| {
        let rad0 = ctx.spectrum.radical_of(&StateSet::full(ctx.s.n()));
        ensure(rad0.support() == Some(&ctx.center), || format!("M(S) = {} but rad(0) = {rad0:?}", ctx.center))?;
        let phi = match ctx.s.generators() {
            [g] => match g.koopman_map() {
                Some(phi) => phi,
                None => return Ok(()),
            },
            _ => return Ok(()),
        };
        let n_steps = 10_000u64;
        let c = ctx.s.n() as f64;
        for x in 0..ctx.s.n() {
            let f = visit_frequency(ctx.s, x, &ctx.center, n_steps).map_err(err)?;
            ensure(f >= 1.0 - c / n_steps as f64, || format!("x = {x}: frequency {f} in M(S)"))?;
        }
        for y in ctx.center.iter() {
            let len = cycle_length(&phi, y).ok_or_else(|| format!("{y} ∈ M(S) is not periodic"))?;
            let u = ctx.center.difference(&StateSet::new(vec![y]));
            let bound = 1.0 - 1.0 / len as f64 + 1.0 / n_steps as f64;
            let best = (0..ctx.s.n())
                .map(|x| visit_frequency(ctx.s, x, &u, n_steps))
                .collect::<Result<Vec<_>>>()
                .map_err(err)?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            ensure(best <= bound, || format!("omitting {y}: all frequencies ≥ {best}"))?;
        }
        Ok(())
    })())
}

fn subsets(k: usize) -> impl Iterator<Item = PointSet> {
    (0u32..1 << k).map(move |m| (0..k).filter(|i| m >> i & 1 == 1).collect())
}

fn closure_axioms(ctx: &Ctx, _: &mut ChaCha8Rng) -> Outcome {
    let sp = &ctx.spectrum;
    let k = sp.len();
    if k > 10 {
        return None;
    }
    Some((|| {
        ensure(sp.closure(&PointSet::new()).is_empty(), || "cl(∅) ≠ ∅".into())?;
        let all: Vec<PointSet> = subsets(k).collect();
        let closures: Vec<PointSet> = all.iter().map(|a| sp.closure(a)).collect();
        for (a, ca) in all.iter().zip(&closures) {
            ensure(a.is_subset(ca), || format!("{a:?} ⊄ cl = {ca:?}"))?;
            ensure(&sp.closure(ca) == ca, || format!("cl not idempotent at {a:?}"))?;
            let down: PointSet = (0..k)
                .filter(|&q| a.iter().any(|&p| sp.points()[q].support.is_subset(&sp.points()[p].support)))
                .collect();
            ensure(&down == ca, || format!("cl({a:?}) = {ca:?} but the order gives {down:?}"))?;
        }
        if k <= 6 {
            for (i, a) in all.iter().enumerate() {
                for (j, b) in all.iter().enumerate() {
                    let u: PointSet = a.union(b).copied().collect();
                    let lhs = sp.closure(&u);
                    let rhs: PointSet = closures[i].union(&closures[j]).copied().collect();
                    ensure(lhs == rhs, || format!("cl({a:?} ∪ {b:?}) ≠ cl ∪ cl"))?;
                }
            }
        }
        Ok(())
    })())
}

fn spectrum_t0(ctx: &Ctx, _: &mut ChaCha8Rng) -> Outcome {
    let order = ctx.spectrum.specialization_order();
    Some(ensure(order.t0 && order.is_discrete(), || format!("order {:?}", order.leq)))
}

fn basic_open_sets(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Outcome {
    let sp = &ctx.spectrum;
    Some((|| {
        for _ in 0..6 {
            let f = random_probe(ctx.s.n(), rng);
            let g = random_probe(ctx.s.n(), rng);
            let uf = sp.basic_open(&f, 0.0);
            let complement: PointSet = sp.all().difference(&uf).copied().collect();
            ensure(sp.closure(&complement) == complement, || format!("U_f = {uf:?} is not open"))?;
            ensure(sp.basic_open(&f.abs(), 0.0) == uf, || "U_|f| ≠ U_f".into())?;
            let fg = FnK(f.0.iter().zip(&g.0).map(|(a, b)| a * b).collect());
            let both: PointSet = uf.intersection(&sp.basic_open(&g, 0.0)).copied().collect();
            let ufg = sp.basic_open(&fg, 0.0);
            // supports may hold several states, so U_fg ⊆ U_f ∩ U_g with
            // equality on singleton supports
            ensure(ufg.is_subset(&both), || format!("U_fg = {ufg:?} ⊄ {both:?}"))?;
        }
        Ok(())
    })())
}

fn closed_points_are_maximal(ctx: &Ctx, _: &mut ChaCha8Rng) -> Outcome {
    let minimal = minimal_self_supporting_sets(ctx.s.digraph());
    Some((|| {
        for (i, p) in ctx.spectrum.points().iter().enumerate() {
            let closed = ctx.spectrum.closure(&PointSet::from([i])) == PointSet::from([i]);
            let maximal = minimal.contains(&p.support);
            ensure(closed == maximal, || format!("point {}: closed {closed}, maximal {maximal}", p.support))?;
        }
        Ok(())
    })())
}

fn ergodic_to_prim_surjective(ctx: &Ctx, _: &mut ChaCha8Rng) -> Outcome {
    Some((|| {
        let hit: PointSet = ctx
            .ergodics
            .iter()
            .map(|e| ctx.spectrum.find(&e.support).ok_or_else(|| format!("{} not in Prim", e.support)))
            .collect::<std::result::Result<_, _>>()?;
        ensure(hit == ctx.spectrum.all() && hit.len() == ctx.ergodics.len(), || {
            format!("image {hit:?} of {} ergodic measures", ctx.ergodics.len())
        })
    })())
}

fn primitive_ideals_are_prime(ctx: &Ctx, _: &mut ChaCha8Rng) -> Outcome {
    Some((|| {
        for a in &ctx.ideals {
            for b in &ctx.ideals {
                let u = a.support().union(b.support());
                for p in ctx.spectrum.points() {
                    if p.support.is_subset(&u) {
                        ensure(p.support.is_subset(a.support()) || p.support.is_subset(b.support()), || {
                            format!("{} ⊆ {} ∪ {} but in neither", p.support, a.support(), b.support())
                        })?;
                    }
                }
            }
        }
        Ok(())
    })())
}

fn specialization_convergence(ctx: &Ctx, _: &mut ChaCha8Rng) -> Outcome {
    let sp = &ctx.spectrum;
    let k = sp.len();
    if k > 10 {
        return None;
    }
    Some((|| {
        let mut closed: Vec<PointSet> = subsets(k).map(|a| sp.closure(&a)).collect();
        closed.sort();
        closed.dedup();
        let all = sp.all();
        let opens: Vec<PointSet> = closed.iter().map(|c| all.difference(c).copied().collect()).collect();
        for p in 0..k {
            for q in 0..k {
                let in_closure = sp.closure(&PointSet::from([q])).contains(&p);
                let by_nbhds = opens.iter().all(|u| !u.contains(&p) || u.contains(&q));
                let by_support = sp.points()[p].support.iter().all(|x| sp.points()[q].support.contains(x));
                ensure(in_closure == by_nbhds && by_nbhds == by_support, || {
                    format!("constant net at {q} → {p}: {in_closure}/{by_nbhds}/{by_support}")
                })?;
            }
        }
        Ok(())
    })())
}

fn indicator_fixed(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Outcome {
    Some((|| {
        let mut measures: Vec<MeasureK> = ctx.ergodics.iter().map(|e| e.measure.clone()).collect();
        measures.push(random_mixture(ctx, rng));
        for ideal in &ctx.ideals {
            for mu in &measures {
                ensure(indicator_is_fixed(ctx.s, mu, ideal.support()).map_err(err)?, || {
                    format!("1_L not fixed on supp μ for L = {}", ideal.support())
                })?;
            }
        }
        Ok(())
    })())
}

fn quotient_homeomorphism(ctx: &Ctx, _: &mut ChaCha8Rng) -> Outcome {
    Some((|| {
        for ideal in &ctx.ideals {
            let q = crate::spectrum::quotient_spectrum_bijection(ctx.s, ideal).map_err(err)?;
            ensure(q.closure_preserved, || format!("closure not preserved below {}", ideal.support()))?;
        }
        Ok(())
    })())
}

fn hat_isomorphism(ctx: &Ctx, _: &mut ChaCha8Rng) -> Outcome {
    Some((|| {
        let r = verify_lattice_isomorphism(ctx.s).map_err(err)?;
        ensure(r.passed, || r.failures.join("; "))
    })())
}

fn mean_ergodicity_equivalence(ctx: &Ctx, _: &mut ChaCha8Rng) -> Outcome {
    Some((|| {
        let v = mean_ergodicity_verdict(ctx.s, &ErgodicNetConfig::default()).map_err(err)?;
        ensure(v.mean_ergodic, || v.witnesses.join("; "))?;
        let p = exact_projection(ctx.s).map_err(err)?.matrix;
        // row x of P is Σ_E P𝟙_E(x)·μ_E
        let n = ctx.s.n();
        let mut rebuilt = Matrix::zeros(n, n);
        for e in &ctx.ergodics {
            let h = p.mul_vec(&FnK::indicator(n, &e.support).0);
            for x in 0..n {
                for y in 0..n {
                    rebuilt[(x, y)] += h[x] * e.measure.weights()[y];
                }
            }
        }
        let gap = rebuilt.max_abs_diff(&p);
        ensure(gap <= 1e-8, || format!("rows of P differ from absorption mixtures by {gap:e}"))
    })())
}

fn radical_free_mean_ergodic(ctx: &Ctx, _: &mut ChaCha8Rng) -> Outcome {
    Some((|| {
        let gens = ctx.s.float_matrices();
        let all: Vec<usize> = (0..ctx.s.n()).collect();
        let dim = fixed_space_dim(&gens, &all, PIVOT_TOL);
        ensure(dim == ctx.spectrum.len(), || format!("dim fix(S) = {dim}, #Prim = {}", ctx.spectrum.len()))?;
        if ctx.center.len() == ctx.s.n() {
            let restricted = restrict_semigroup(ctx.s, &ctx.center).map_err(err)?;
            let d = fixed_space_dim(&restricted.float_matrices(), &all, PIVOT_TOL);
            ensure(d == dim, || "radical-free system changed under restriction to M(S)".into())?;
        }
        Ok(())
    })())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::load_system;

    fn sys(gens: &[Vec<Vec<f64>>]) -> MarkovSemigroup {
        load_system(&SystemSpec::from_float_rows(gens)).unwrap()
    }

    #[test]
    fn closed_set_oracle_examples() {
        let id = build_rotation(3, 0, Mode::Float).unwrap();
        assert_eq!(oracle_forward_closed_sets(id.digraph()).unwrap().len(), 7);
        let swap = build_rotation(2, 1, Mode::Float).unwrap();
        assert_eq!(oracle_forward_closed_sets(swap.digraph()).unwrap(), vec![StateSet::full(2)]);
        let big = build_rotation(9, 0, Mode::Float).unwrap();
        assert!(matches!(oracle_forward_closed_sets(big.digraph()), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn vertex_oracle_examples() {
        let id = build_rotation(2, 0, Mode::Rational).unwrap();
        let mut v = oracle_polytope_vertices_exact(&id).unwrap().unwrap();
        v.sort();
        let (z, o) = (Rational::from_ratio(0, 1), Rational::from_ratio(1, 1));
        assert_eq!(v, vec![vec![z.clone(), o.clone()], vec![o, z]]);
        let swap = sys(&[vec![vec![0.0, 1.0], vec![1.0, 0.0]]]);
        let v = oracle_polytope_vertices(&swap).unwrap();
        assert_eq!(v.len(), 1);
        assert!((v[0].weights()[0] - 0.5).abs() < 1e-12);
        let fix_b = sys(&[vec![vec![0.0, 0.5, 0.5], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]]);
        assert_eq!(oracle_polytope_vertices(&fix_b).unwrap().len(), 2);
    }

    #[test]
    fn fixtures_pass_every_proposition() {
        let report = run_suite(42, 0, 8).unwrap();
        let bad: Vec<_> = report.reports.iter().filter(|r| !r.failures.is_empty()).collect();
        assert!(bad.is_empty(), "{bad:#?}");
        assert!(report.passed, "{}", report.table());
    }
}
