//! The hat map `fix(S_M) → C(Prim(S))`, `f ↦ (I_μ ↦ ⟨f, μ⟩)`, its inverse
//! through the mean projection, and the mean-ergodicity verdict.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::StateSet;
use crate::ideals::restrict_semigroup;
use crate::linalg::{Matrix, PIVOT_TOL};
use crate::means::{abel_limit, cesaro_projection, exact_projection, ErgodicNetConfig, NetKind};
use crate::measures::{ergodic_measures, fix_space_basis, fixed_space_dim, stationary_on};
use crate::spectrum::{prim_spectrum, PrimSpectrum};
use crate::system::{FnK, MarkovSemigroup};

/// Fixedness tolerance on `M(S)` for the argument of [`hat`].
pub const FIXED_TOL: f64 = 1e-10;
/// Tolerance for the isomorphism and round-trip checks.
pub const HAT_TOL: f64 = 1e-8;

/// A function on `Prim(S)`, one value per point in spectrum order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HatFunction {
    pub values: Vec<f64>,
}

impl HatFunction {
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Spectrum, `M(S)` and mean projection of one system, shared by repeated
/// hat computations.
pub struct HatContext<'a> {
    s: &'a MarkovSemigroup,
    spectrum: PrimSpectrum,
    center: StateSet,
    projection: Option<Matrix<f64>>,
}

impl<'a> HatContext<'a> {
    pub fn new(s: &'a MarkovSemigroup) -> Result<Self> {
        let spectrum = prim_spectrum(s)?;
        let center = spectrum.union_of_supports();
        let projection = exact_projection(s).ok().map(|p| p.matrix);
        Ok(Self {
            s,
            spectrum,
            center,
            projection,
        })
    }

    pub fn spectrum(&self) -> &PrimSpectrum {
        &self.spectrum
    }

    pub fn center(&self) -> &StateSet {
        &self.center
    }

    /// `f̂(p) = ⟨f, μ_p⟩` for `f` fixed on `M(S)`.
    pub fn hat(&self, f: &FnK) -> Result<HatFunction> {
        if f.len() != self.s.n() {
            return Err(Error::DimensionMismatch {
                expected: self.s.n(),
                found: f.len(),
            });
        }
        let residual = self.s.fixedness_residual(f, &self.center)?;
        if residual > FIXED_TOL {
            return Err(Error::NotFixed { residual });
        }
        let mut values = Vec::with_capacity(self.spectrum.len());
        for p in self.spectrum.points() {
            let on: Vec<f64> = p.support.iter().map(|x| f.0[x]).collect();
            let hi = on.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = on.iter().cloned().fold(f64::INFINITY, f64::min);
            if hi - lo > HAT_TOL {
                return Err(Error::NotConstantOnSupport {
                    support: p.support.as_slice().to_vec(),
                    spread: hi - lo,
                });
            }
            let value = match &p.witness {
                Some(w) => w.measure.pair(f),
                None => on.iter().sum::<f64>() / on.len() as f64,
            };
            values.push(value);
        }
        Ok(HatFunction { values })
    }

    /// `F = P·G` with `G = g(p)` on `supp p` and zero off `M(S)`.
    pub fn hat_inverse(&self, g: &HatFunction) -> Result<FnK> {
        let p = self.projection.as_ref().ok_or_else(|| {
            Error::ProjectionUnavailable("the mean projection could not be computed".into())
        })?;
        if g.values.len() != self.spectrum.len() {
            return Err(Error::DimensionMismatch {
                expected: self.spectrum.len(),
                found: g.values.len(),
            });
        }
        let mut ext = vec![0.0; self.s.n()];
        for (point, v) in self.spectrum.points().iter().zip(&g.values) {
            for x in point.support.iter() {
                ext[x] = *v;
            }
        }
        Ok(FnK(p.mul_vec(&ext)))
    }
}

pub fn hat(s: &MarkovSemigroup, f: &FnK) -> Result<HatFunction> {
    HatContext::new(s)?.hat(f)
}

pub fn hat_inverse(s: &MarkovSemigroup, g: &HatFunction) -> Result<FnK> {
    HatContext::new(s)?.hat_inverse(g)
}

/// Outcome of [`verify_lattice_isomorphism`]. Defects are maxima over all
/// sampled functions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeReport {
    /// `dim fix(S_M)` on the restriction to `M(S)`.
    pub fix_dim: usize,
    pub prim_count: usize,
    pub linearity: f64,
    pub unit: f64,
    pub isometry: f64,
    pub lattice: f64,
    pub round_trip: f64,
    pub extension: f64,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Audits the hat map on a basis of `fix(S_M)` and on seeded random
/// combinations. Failures are reported, not raised.
pub fn verify_lattice_isomorphism(s: &MarkovSemigroup) -> Result<LatticeReport> {
    let ctx = HatContext::new(s)?;
    let n = s.n();
    let center = ctx.center().clone();
    let basis: Vec<FnK> = fix_space_basis(&restrict_semigroup(s, &center)?)
        .into_iter()
        .map(|b| {
            let mut v = vec![0.0; n];
            for (i, x) in center.iter().enumerate() {
                v[x] = b.0[i];
            }
            FnK(v)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut samples = basis.clone();
    for _ in 0..8 {
        let mut v = vec![0.0; n];
        for b in &basis {
            let c: f64 = rng.random_range(-1.0..1.0);
            for (vi, bi) in v.iter_mut().zip(&b.0) {
                *vi += c * bi;
            }
        }
        samples.push(FnK(v));
    }

    let mut r = LatticeReport {
        fix_dim: basis.len(),
        prim_count: ctx.spectrum().len(),
        linearity: 0.0,
        unit: 0.0,
        isometry: 0.0,
        lattice: 0.0,
        round_trip: 0.0,
        extension: 0.0,
        passed: true,
        failures: Vec::new(),
    };
    let mut hats = Vec::with_capacity(samples.len());
    for f in &samples {
        let fh = match ctx.hat(f) {
            Ok(h) => h,
            Err(e) => {
                r.failures.push(format!("hat failed on a fixed function: {e}"));
                continue;
            }
        };
        r.isometry = r.isometry.max((fh.sup_norm() - f.sup_norm_on(&center)).abs());
        match ctx.hat(&f.abs()) {
            Ok(abs_hat) => {
                let pointwise = HatFunction {
                    values: fh.values.iter().map(|v| v.abs()).collect(),
                };
                r.lattice = r.lattice.max(abs_hat.max_abs_diff(&pointwise));
            }
            Err(e) => r.failures.push(format!("|f| not in the domain: {e}")),
        }
        hats.push((f.clone(), fh));
    }
    for w in hats.windows(2) {
        let (f, fh) = &w[0];
        let (g, gh) = &w[1];
        let (a, b) = (0.7, -1.3);
        let comb = FnK(f.0.iter().zip(&g.0).map(|(x, y)| a * x + b * y).collect());
        if let Ok(ch) = ctx.hat(&comb) {
            let expect = HatFunction {
                values: fh.values.iter().zip(&gh.values).map(|(x, y)| a * x + b * y).collect(),
            };
            r.linearity = r.linearity.max(ch.max_abs_diff(&expect));
        }
    }
    match ctx.hat(&FnK::ones(n)) {
        Ok(h) => r.unit = h.values.iter().fold(0.0, |m, v| m.max((v - 1.0).abs())),
        Err(e) => r.failures.push(format!("unit not in the domain: {e}")),
    }
    for (_, fh) in &hats {
        match ctx.hat_inverse(fh).and_then(|big| ctx.hat(&big)) {
            Ok(back) => r.round_trip = r.round_trip.max(back.max_abs_diff(fh)),
            Err(e) => r.failures.push(format!("round trip failed: {e}")),
        }
    }
    for f in fix_space_basis(s) {
        match ctx.hat(&f).and_then(|fh| ctx.hat_inverse(&fh)) {
            Ok(back) => {
                let d = back.0.iter().zip(&f.0).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                r.extension = r.extension.max(d);
            }
            Err(e) => r.failures.push(format!("extension failed: {e}")),
        }
    }
    if r.fix_dim != r.prim_count {
        r.failures.push(format!(
            "dim fix(S_M) = {} but Prim(S) has {} points",
            r.fix_dim, r.prim_count
        ));
    }
    for (name, v) in [
        ("linearity", r.linearity),
        ("unit", r.unit),
        ("isometry", r.isometry),
        ("lattice", r.lattice),
        ("round trip", r.round_trip),
        ("extension", r.extension),
    ] {
        if v > HAT_TOL {
            r.failures.push(format!("{name} defect {v:e}"));
        }
    }
    r.passed = r.failures.is_empty();
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Conditions {
    /// (a): a mean ergodic projection exists.
    pub a_mean_ergodic: bool,
    /// (b)(i): `μ ↦ I_μ` is a homeomorphism onto `Prim(S)`.
    pub b_i_homeomorphism: bool,
    /// (c)(i): `Prim(S)` is Hausdorff.
    pub c_i_hausdorff: bool,
    /// (c)(ii): each ergodic support carries a unique invariant measure.
    pub c_ii_uniquely_ergodic: bool,
    /// (c)(iii): every fixed function on `M(S)` extends to a fixed function.
    pub c_iii_extension: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanErgodicVerdict {
    pub mean_ergodic: bool,
    pub conditions: Conditions,
    pub fix_dim: usize,
    pub prim_count: usize,
    pub witnesses: Vec<String>,
}

/// Joins the separately computed conditions, insisting on
/// `(a) ⇔ (b)(i) ∧ (c)(iii) ⇔ (c)(i) ∧ (c)(ii) ∧ (c)(iii)`.
pub fn assemble_verdict(
    conditions: Conditions,
    fix_dim: usize,
    prim_count: usize,
    witnesses: Vec<String>,
) -> Result<MeanErgodicVerdict> {
    let c = conditions;
    let b = c.b_i_homeomorphism && c.c_iii_extension;
    let cc = c.c_i_hausdorff && c.c_ii_uniquely_ergodic && c.c_iii_extension;
    if c.a_mean_ergodic != b || b != cc {
        return Err(Error::EquivalenceViolation(format!(
            "(a) = {}, (b) = {b}, (c) = {cc}; conditions {c:?}; witnesses {witnesses:?}",
            c.a_mean_ergodic
        )));
    }
    Ok(MeanErgodicVerdict {
        mean_ergodic: c.a_mean_ergodic,
        conditions,
        fix_dim,
        prim_count,
        witnesses,
    })
}

/// `(b)(i)` and `(c)(i)` from a spectrum and the number of ergodic
/// measures. The measure side is a finite (discrete) set, so the bijection
/// `μ ↦ I_μ` is a homeomorphism iff it is injective and `Prim` is discrete.
pub fn spectral_conditions(spectrum: &PrimSpectrum, ergodic_count: usize) -> (bool, bool) {
    let hausdorff = spectrum.specialization_order().hausdorff;
    let bijective = ergodic_count == spectrum.len();
    (bijective && hausdorff, hausdorff)
}

/// Evaluates every condition independently and cross-checks them.
pub fn mean_ergodicity_verdict(s: &MarkovSemigroup, cfg: &ErgodicNetConfig) -> Result<MeanErgodicVerdict> {
    let mut witnesses = Vec::new();
    let ergodics = ergodic_measures(s)?;
    let spectrum = prim_spectrum(s)?;
    let gens = s.float_matrices();
    let fix_dim = fixed_space_dim(&gens, &(0..s.n()).collect::<Vec<_>>(), PIVOT_TOL);

    let a = match exact_projection(s) {
        Ok(p) => {
            let mut ok = true;
            let d = p.defects(s).max();
            if d > HAT_TOL {
                witnesses.push(format!("exact projection defect {d:e}"));
                ok = false;
            }
            let mut nets = vec![cesaro_projection(s, cfg)];
            if gens.len() == 1 {
                nets.push(abel_limit(
                    s,
                    &ErgodicNetConfig {
                        kind: NetKind::Abel,
                        ..*cfg
                    },
                ));
            }
            for net in nets {
                match net {
                    Ok(q) => {
                        let gap = q.matrix.max_abs_diff(&p.matrix);
                        if gap > HAT_TOL {
                            witnesses.push(format!("{:?} net differs from P by {gap:e}", q.kind));
                            ok = false;
                        }
                    }
                    Err(e) => {
                        witnesses.push(format!("net failed: {e}"));
                        ok = false;
                    }
                }
            }
            ok
        }
        Err(e) => {
            witnesses.push(format!("no projection: {e}"));
            false
        }
    };

    let (b_i, c_i) = spectral_conditions(&spectrum, ergodics.len());
    if !c_i {
        witnesses.push("specialization order is not discrete".into());
    }

    let mut c_ii = true;
    for e in &ergodics {
        let states = e.support.as_slice();
        let dim = match s.exact_matrices() {
            Some(ex) => stationary_on(&ex, states, 0.0).map(|(_, d)| d),
            None => stationary_on(&gens, states, PIVOT_TOL).map(|(_, d)| d),
        };
        if dim != Some(0) {
            c_ii = false;
            witnesses.push(format!("support {} is not uniquely ergodic", e.support));
        }
    }

    let mut c_iii = true;
    match HatContext::new(s) {
        Ok(ctx) => {
            for i in 0..ctx.spectrum().len() {
                let mut g = HatFunction {
                    values: vec![0.0; ctx.spectrum().len()],
                };
                g.values[i] = 1.0;
                let ok = ctx.hat_inverse(&g).and_then(|big| {
                    let res = s.fixedness_residual(&big, &StateSet::full(s.n()))?;
                    let back = ctx.hat(&big)?;
                    Ok(res <= HAT_TOL && back.max_abs_diff(&g) <= HAT_TOL)
                });
                if !matches!(ok, Ok(true)) {
                    c_iii = false;
                    witnesses.push(format!("indicator of point {i} has no fixed extension"));
                }
            }
        }
        Err(e) => {
            c_iii = false;
            witnesses.push(format!("hat map unavailable: {e}"));
        }
    }

    assemble_verdict(
        Conditions {
            a_mean_ergodic: a,
            b_i_homeomorphism: b_i,
            c_i_hausdorff: c_i,
            c_ii_uniquely_ergodic: c_ii,
            c_iii_extension: c_iii,
        },
        fix_dim,
        spectrum.len(),
        witnesses,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{load_system, SystemSpec};

    fn sys(gens: &[Vec<Vec<f64>>]) -> MarkovSemigroup {
        load_system(&SystemSpec::from_float_rows(gens)).unwrap()
    }

    fn perm(image: &[usize]) -> Vec<Vec<f64>> {
        let n = image.len();
        (0..n)
            .map(|x| (0..n).map(|y| if image[x] == y { 1.0 } else { 0.0 }).collect())
            .collect()
    }

    fn fix_b() -> MarkovSemigroup {
        sys(&[vec![vec![0.0, 0.5, 0.5], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]])
    }

    fn set(v: &[usize]) -> StateSet {
        StateSet::new(v.to_vec())
    }

    #[test]
    fn hat_examples() {
        let b = fix_b();
        assert_eq!(hat(&b, &FnK::ones(3)).unwrap().values, vec![1.0, 1.0]);
        // value at the transient state is ignored
        let h = hat(&b, &FnK(vec![7.0, 0.0, 1.0])).unwrap();
        assert_eq!(h.values, vec![0.0, 1.0]);
        let rot = sys(&[perm(&[2, 3, 4, 5, 0, 1])]);
        let h = hat(&rot, &FnK(vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0])).unwrap();
        assert!((h.values[0] - 1.0).abs() < 1e-12 && h.values[1].abs() < 1e-12);
        assert!(matches!(
            hat(&rot, &FnK(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0])),
            Err(Error::NotFixed { .. })
        ));
    }

    #[test]
    fn hat_inverse_examples() {
        let b = fix_b();
        let f = hat_inverse(&b, &HatFunction { values: vec![0.0, 1.0] }).unwrap();
        assert!(f.0.iter().zip([0.5, 0.0, 1.0]).all(|(a, b)| (a - b).abs() < 1e-12));
        let one = hat_inverse(&b, &HatFunction { values: vec![1.0, 1.0] }).unwrap();
        assert!(one.0.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn lattice_report_examples() {
        let id = sys(&[perm(&[0, 1, 2])]);
        let r = verify_lattice_isomorphism(&id).unwrap();
        assert!(r.passed, "{:?}", r.failures);
        assert_eq!((r.fix_dim, r.prim_count), (3, 3));
        let r = verify_lattice_isomorphism(&fix_b()).unwrap();
        assert!(r.passed, "{:?}", r.failures);
        assert_eq!((r.fix_dim, r.prim_count), (2, 2));
    }

    #[test]
    fn genuine_instances_are_mean_ergodic() {
        let cfg = ErgodicNetConfig::default();
        for s in [fix_b(), sys(&[perm(&[1, 0])]), sys(&[perm(&[0, 2, 1])])] {
            let v = mean_ergodicity_verdict(&s, &cfg).unwrap();
            assert!(v.mean_ergodic, "{:?}", v.witnesses);
            assert_eq!(v.fix_dim, v.prim_count);
        }
        let two = sys(&[perm(&[1, 2, 3, 0]), perm(&[2, 3, 0, 1])]);
        assert!(mean_ergodicity_verdict(&two, &cfg).unwrap().mean_ergodic);
    }

    #[test]
    fn mock_extension_failure_keeps_equivalence() {
        let v = assemble_verdict(
            Conditions {
                a_mean_ergodic: false,
                b_i_homeomorphism: true,
                c_i_hausdorff: true,
                c_ii_uniquely_ergodic: true,
                c_iii_extension: false,
            },
            1,
            2,
            vec!["mock: fixed function on M(S) without fixed extension".into()],
        )
        .unwrap();
        assert!(!v.mean_ergodic);
    }

    #[test]
    fn mock_unique_ergodicity_failure() {
        // one point carrying two ergodic measures of full support
        let spectrum = PrimSpectrum::mock(3, vec![set(&[0, 1, 2])]).unwrap();
        let (b_i, c_i) = spectral_conditions(&spectrum, 2);
        assert!(!b_i && c_i);
        let v = assemble_verdict(
            Conditions {
                a_mean_ergodic: false,
                b_i_homeomorphism: b_i,
                c_i_hausdorff: c_i,
                c_ii_uniquely_ergodic: false,
                c_iii_extension: true,
            },
            1,
            1,
            vec![],
        )
        .unwrap();
        assert!(!v.mean_ergodic);
    }

    #[test]
    fn mock_non_hausdorff_spectrum() {
        let spectrum = PrimSpectrum::mock(4, vec![set(&[1, 2]), set(&[1, 2, 3])]).unwrap();
        let (b_i, c_i) = spectral_conditions(&spectrum, 2);
        assert!(!b_i && !c_i);
        let v = assemble_verdict(
            Conditions {
                a_mean_ergodic: false,
                b_i_homeomorphism: b_i,
                c_i_hausdorff: c_i,
                c_ii_uniquely_ergodic: true,
                c_iii_extension: true,
            },
            2,
            2,
            vec![],
        )
        .unwrap();
        assert!(!v.mean_ergodic);
    }

    #[test]
    fn contradictory_conditions_are_rejected() {
        let c = Conditions {
            a_mean_ergodic: true,
            b_i_homeomorphism: true,
            c_i_hausdorff: false,
            c_ii_uniquely_ergodic: true,
            c_iii_extension: true,
        };
        assert!(matches!(assemble_verdict(c, 1, 1, vec![]), Err(Error::EquivalenceViolation(_))));
    }
}
