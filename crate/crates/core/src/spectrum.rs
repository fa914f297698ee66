//! The primitive spectrum and its hull-kernel topology.
//!
//! Points are the absolute kernels `I_μ` of ergodic measures, keyed by their
//! supports. Ideal inclusion reverses support inclusion, so
//! `hull(I_L) = {p : supp p ⊆ L}` and `ker(A) = I_{∪ supp p}`. The closure
//! `A ↦ hull(ker(A))` is computed directly from that definition.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::StateSet;
use crate::ideals::{localize_set, restrict_semigroup, SIdeal};
use crate::measures::{ergodic_measures, ErgodicMeasure};
use crate::system::{FnK, MarkovSemigroup, MeasureK};

/// A set of spectrum points, by index.
pub type PointSet = BTreeSet<usize>;

#[derive(Debug, Clone, PartialEq)]
pub struct PrimPoint {
    pub support: StateSet,
    /// `None` only for mocked spectra.
    pub witness: Option<ErgodicMeasure>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimSpectrum {
    n: usize,
    points: Vec<PrimPoint>,
    mocked: bool,
}

/// An ideal of `C(K)` given by support, with the full algebra as sentinel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Kernel {
    Proper(StateSet),
    FullAlgebra,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RadicalIdeal {
    pub support: StateSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Radical {
    Ideal(RadicalIdeal),
    /// No primitive ideal contains the input.
    FullAlgebra,
}

impl Radical {
    pub fn support(&self) -> Option<&StateSet> {
        match self {
            Radical::Ideal(r) => Some(&r.support),
            Radical::FullAlgebra => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpecializationOrder {
    /// `leq[p][q]` iff `q ∈ cl({p})`, i.e. `supp q ⊆ supp p`.
    pub leq: Vec<Vec<bool>>,
    pub t0: bool,
    pub hausdorff: bool,
    pub closed_singletons: Vec<usize>,
}

impl SpecializationOrder {
    pub fn is_discrete(&self) -> bool {
        self.hausdorff
    }
}

/// `Prim(S)`: one point per ergodic measure.
pub fn prim_spectrum(s: &MarkovSemigroup) -> Result<PrimSpectrum> {
    let points = ergodic_measures(s)?
        .into_iter()
        .map(|e| PrimPoint {
            support: e.support.clone(),
            witness: Some(e),
        })
        .collect();
    Ok(PrimSpectrum {
        n: s.n(),
        points,
        mocked: false,
    })
}

impl PrimSpectrum {
    /// A spectrum assembled from bare supports, for exercising topologies no
    /// finite Markov semigroup produces. Supports must be nonempty, distinct
    /// and inside `0..n`.
    pub fn mock(n: usize, supports: Vec<StateSet>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for s in &supports {
            if s.is_empty() {
                return Err(Error::EmptySupport);
            }
            if let Some(x) = s.iter().find(|&x| x >= n) {
                return Err(Error::OutOfRange { value: x, n });
            }
            if !seen.insert(s.clone()) {
                return Err(Error::InvalidConfig(format!("duplicate support {s}")));
            }
        }
        Ok(Self {
            n,
            points: supports
                .into_iter()
                .map(|support| PrimPoint {
                    support,
                    witness: None,
                })
                .collect(),
            mocked: true,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[PrimPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_mocked(&self) -> bool {
        self.mocked
    }

    pub fn all(&self) -> PointSet {
        (0..self.points.len()).collect()
    }

    /// Index of the point with exactly this support.
    pub fn find(&self, support: &StateSet) -> Option<usize> {
        self.points.iter().position(|p| &p.support == support)
    }

    /// `hull(I_L) = {p : I_L ⊆ p} = {p : supp p ⊆ L}`.
    pub fn hull(&self, support: &StateSet) -> PointSet {
        (0..self.points.len())
            .filter(|&i| self.points[i].support.is_subset(support))
            .collect()
    }

    pub fn hull_of(&self, kernel: &Kernel) -> PointSet {
        match kernel {
            Kernel::Proper(l) => self.hull(l),
            Kernel::FullAlgebra => PointSet::new(),
        }
    }

    /// `ker(A) = ∩_{p∈A} p`, the ideal supported on the union of supports.
    pub fn ker(&self, points: &PointSet) -> Result<StateSet> {
        if points.is_empty() {
            return Err(Error::EmptyFamily);
        }
        Ok(points
            .iter()
            .fold(StateSet::empty(), |acc, &i| acc.union(&self.points[i].support)))
    }

    pub fn ker_or_full(&self, points: &PointSet) -> Kernel {
        match self.ker(points) {
            Ok(l) => Kernel::Proper(l),
            Err(_) => Kernel::FullAlgebra,
        }
    }

    /// `cl(A) = hull(ker(A))`.
    pub fn closure(&self, points: &PointSet) -> PointSet {
        self.hull_of(&self.ker_or_full(points))
    }

    /// Radical of the ideal with the given support: `ker(hull(I))`.
    pub fn radical_of(&self, support: &StateSet) -> Radical {
        match self.ker(&self.hull(support)) {
            Ok(l) => Radical::Ideal(RadicalIdeal { support: l }),
            Err(_) => Radical::FullAlgebra,
        }
    }

    /// Union of all point supports (`M(S)` for genuine spectra).
    pub fn union_of_supports(&self) -> StateSet {
        self.points
            .iter()
            .fold(StateSet::empty(), |acc, p| acc.union(&p.support))
    }

    /// `p ∈ U_f` iff `f ∉ p` iff `f` does not vanish on `supp p`.
    pub fn in_basic_open(&self, point: usize, f: &FnK, tol: f64) -> bool {
        self.points[point].support.iter().any(|x| f.0[x].abs() > tol)
    }

    pub fn basic_open(&self, f: &FnK, tol: f64) -> PointSet {
        (0..self.points.len())
            .filter(|&i| self.in_basic_open(i, f, tol))
            .collect()
    }

    pub fn specialization_order(&self) -> SpecializationOrder {
        let k = self.points.len();
        let leq: Vec<Vec<bool>> = (0..k)
            .map(|p| {
                (0..k)
                    .map(|q| self.points[q].support.is_subset(&self.points[p].support))
                    .collect()
            })
            .collect();
        let t0 = (0..k).all(|p| (0..k).all(|q| p == q || !(leq[p][q] && leq[q][p])));
        let closed_singletons: Vec<usize> = (0..k)
            .filter(|&p| self.closure(&PointSet::from([p])) == PointSet::from([p]))
            .collect();
        SpecializationOrder {
            hausdorff: closed_singletons.len() == k,
            leq,
            t0,
            closed_singletons,
        }
    }

    /// Graphviz rendering: nodes labelled by support, edges `p -> q` for
    /// `q ∈ cl({p})`, `q ≠ p`.
    pub fn to_dot(&self) -> String {
        let order = self.specialization_order();
        let mut out = String::from("digraph prim {\n");
        for (i, p) in self.points.iter().enumerate() {
            out.push_str(&format!("  p{i} [label=\"{}\"];\n", p.support));
        }
        for p in 0..self.points.len() {
            for q in 0..self.points.len() {
                if p != q && order.leq[p][q] {
                    out.push_str(&format!("  p{p} -> p{q};\n"));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Radical of an invariant ideal.
pub fn radical(s: &MarkovSemigroup, ideal: &SIdeal) -> Result<Radical> {
    Ok(prim_spectrum(s)?.radical_of(ideal.support()))
}

/// Radical of the ideal `I_L` for an arbitrary support `L`.
pub fn radical_of_support(s: &MarkovSemigroup, support: &StateSet) -> Result<Radical> {
    Ok(prim_spectrum(s)?.radical_of(support))
}

/// True iff the ergodic supports cover `K`.
pub fn is_radical_free(s: &MarkovSemigroup) -> Result<bool> {
    Ok(minimal_center_support(s)?.len() == s.n())
}

/// `M(S)`: union of the ergodic supports, the support of `rad(0)`.
pub fn minimal_center_support(s: &MarkovSemigroup) -> Result<StateSet> {
    Ok(prim_spectrum(s)?.union_of_supports())
}

/// Uniform average of the ergodic measures inside `r`; an invariant
/// probability whose absolute kernel is `r`.
pub fn radical_witness_measure(s: &MarkovSemigroup, r: &RadicalIdeal) -> Result<MeasureK> {
    let inside: Vec<ErgodicMeasure> = ergodic_measures(s)?
        .into_iter()
        .filter(|e| e.support.is_subset(&r.support))
        .collect();
    if inside.is_empty() {
        return Err(Error::NoErgodicInside(r.support.as_slice().to_vec()));
    }
    let k = inside.len() as f64;
    let mut weights = vec![0.0; s.n()];
    for e in &inside {
        for (w, v) in weights.iter_mut().zip(e.measure.weights()) {
            *w += v / k;
        }
    }
    Ok(MeasureK::from_weights_unchecked(weights))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientCorrespondence {
    /// `(index in Prim(S), index in Prim(S_I))`.
    pub pairs: Vec<(usize, usize)>,
    pub closure_preserved: bool,
}

/// Matches `{p ∈ Prim(S) : supp p ⊆ supp I}` with `Prim(S_I)`, the latter
/// computed independently on the restricted system, and checks that the
/// matching carries closures to closures in both directions.
pub fn quotient_spectrum_bijection(
    s: &MarkovSemigroup,
    ideal: &SIdeal,
) -> Result<QuotientCorrespondence> {
    let support = ideal.support();
    let restricted = restrict_semigroup(s, support)?;
    let big = prim_spectrum(s)?;
    let small = prim_spectrum(&restricted)?;
    let domain: Vec<usize> = big.hull(support).into_iter().collect();
    if domain.len() != small.len() {
        return Err(Error::Inconsistent(format!(
            "{} points below {support} but {} in the restricted spectrum",
            domain.len(),
            small.len()
        )));
    }
    let mut pairs = Vec::with_capacity(domain.len());
    for &p in &domain {
        let local = localize_set(support, &big.points()[p].support);
        let q = small.find(&local).ok_or_else(|| {
            Error::Inconsistent(format!("no restricted point with support {local}"))
        })?;
        pairs.push((p, q));
    }
    let closure_preserved = closure_commutes(&big, &small, &pairs);
    Ok(QuotientCorrespondence {
        pairs,
        closure_preserved,
    })
}

/// For every subset `A` of the domain: `θ(cl(A) ∩ domain) = cl(θ(A))`.
fn closure_commutes(big: &PrimSpectrum, small: &PrimSpectrum, pairs: &[(usize, usize)]) -> bool {
    let k = pairs.len();
    if k > 16 {
        return pairs.iter().all(|&(p, q)| {
            let a = big.closure(&PointSet::from([p]));
            let b = small.closure(&PointSet::from([q]));
            map_points(&a, pairs) == b
        });
    }
    (0u32..1 << k).all(|mask| {
        let a: PointSet = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| pairs[i].0).collect();
        let b: PointSet = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| pairs[i].1).collect();
        map_points(&big.closure(&a), pairs) == small.closure(&b)
    })
}

fn map_points(a: &PointSet, pairs: &[(usize, usize)]) -> PointSet {
    pairs
        .iter()
        .filter(|(p, _)| a.contains(p))
        .map(|&(_, q)| q)
        .collect()
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

    fn pts(v: &[usize]) -> PointSet {
        v.iter().copied().collect()
    }

    #[test]
    fn spectrum_examples() {
        assert_eq!(prim_spectrum(&sys(&[perm(&[1, 0])])).unwrap().len(), 1);
        let b = prim_spectrum(&fix_b()).unwrap();
        let supports: Vec<_> = b.points().iter().map(|p| p.support.clone()).collect();
        assert_eq!(supports, vec![set(&[1]), set(&[2])]);
        assert_eq!(prim_spectrum(&sys(&[perm(&[2, 3, 4, 5, 0, 1])])).unwrap().len(), 2);
    }

    #[test]
    fn hull_and_ker_examples() {
        let b = prim_spectrum(&fix_b()).unwrap();
        assert_eq!(b.hull(&StateSet::full(3)), b.all());
        assert_eq!(b.hull(&set(&[1])), pts(&[0]));
        assert_eq!(b.ker(&pts(&[0])).unwrap(), set(&[1]));
        assert_eq!(b.ker(&pts(&[0, 1])).unwrap(), set(&[1, 2]));
        assert_eq!(b.ker(&pts(&[])), Err(Error::EmptyFamily));
        let id = prim_spectrum(&sys(&[perm(&[0, 1, 2])])).unwrap();
        assert_eq!(id.ker(&pts(&[0, 2])).unwrap(), set(&[0, 2]));
    }

    #[test]
    fn closure_examples() {
        let b = prim_spectrum(&fix_b()).unwrap();
        assert_eq!(b.closure(&pts(&[])), pts(&[]));
        assert_eq!(b.closure(&pts(&[0])), pts(&[0]));
    }

    #[test]
    fn radical_examples() {
        let b = fix_b();
        let zero = SIdeal::zero(3);
        assert_eq!(radical(&b, &zero).unwrap().support(), Some(&set(&[1, 2])));
        let p = SIdeal::new(b.digraph(), set(&[1, 2])).unwrap();
        assert_eq!(radical(&b, &p).unwrap().support(), Some(&set(&[1, 2])));
        assert_eq!(radical_of_support(&b, &set(&[0])).unwrap(), Radical::FullAlgebra);
    }

    #[test]
    fn radical_free_and_center() {
        assert!(is_radical_free(&sys(&[perm(&[1, 0])])).unwrap());
        assert!(!is_radical_free(&fix_b()).unwrap());
        assert!(is_radical_free(&sys(&[perm(&[0, 1, 2])])).unwrap());
        assert_eq!(minimal_center_support(&fix_b()).unwrap(), set(&[1, 2]));
        assert_eq!(
            minimal_center_support(&sys(&[perm(&[2, 3, 4, 5, 0, 1])])).unwrap(),
            StateSet::full(6)
        );
    }

    #[test]
    fn witness_examples() {
        let b = fix_b();
        let r = RadicalIdeal { support: set(&[1, 2]) };
        assert_eq!(radical_witness_measure(&b, &r).unwrap().weights(), &[0.0, 0.5, 0.5]);
        let sw = sys(&[perm(&[1, 0])]);
        let w = radical_witness_measure(&sw, &RadicalIdeal { support: set(&[0, 1]) }).unwrap();
        assert!((w.weights()[0] - 0.5).abs() < 1e-12);
        let id = sys(&[perm(&[0, 1, 2])]);
        let w = radical_witness_measure(&id, &RadicalIdeal { support: set(&[0, 2]) }).unwrap();
        assert_eq!(w.weights(), &[0.5, 0.0, 0.5]);
        assert!(matches!(
            radical_witness_measure(&b, &RadicalIdeal { support: set(&[0]) }),
            Err(Error::NoErgodicInside(_))
        ));
    }

    #[test]
    fn genuine_order_is_discrete() {
        let order = prim_spectrum(&fix_b()).unwrap().specialization_order();
        assert!(order.t0 && order.hausdorff);
        assert_eq!(order.closed_singletons, vec![0, 1]);
    }

    #[test]
    fn mocked_chain_is_not_hausdorff() {
        let mock = PrimSpectrum::mock(4, vec![set(&[1, 2]), set(&[1, 2, 3])]).unwrap();
        assert!(mock.is_mocked());
        let order = mock.specialization_order();
        assert!(order.t0);
        assert!(!order.hausdorff);
        // the smaller support is the closed point
        assert_eq!(order.closed_singletons, vec![0]);
        assert_eq!(mock.closure(&pts(&[1])), pts(&[0, 1]));
        assert!(PrimSpectrum::mock(4, vec![set(&[1]), set(&[1])]).is_err());
    }

    #[test]
    fn basic_open_sets() {
        let b = prim_spectrum(&fix_b()).unwrap();
        assert_eq!(b.basic_open(&FnK(vec![1.0, 0.0, 0.0]), 0.0), pts(&[]));
        assert_eq!(b.basic_open(&FnK(vec![0.0, 0.0, 3.0]), 0.0), pts(&[1]));
        assert_eq!(b.basic_open(&FnK::ones(3), 0.0), b.all());
    }

    #[test]
    fn quotient_examples() {
        let b = fix_b();
        let q = quotient_spectrum_bijection(&b, &SIdeal::zero(3)).unwrap();
        assert_eq!(q.pairs, vec![(0, 0), (1, 1)]);
        assert!(q.closure_preserved);
        let i = SIdeal::new(b.digraph(), set(&[1, 2])).unwrap();
        let q = quotient_spectrum_bijection(&b, &i).unwrap();
        assert_eq!(q.pairs, vec![(0, 0), (1, 1)]);
        let i = SIdeal::new(b.digraph(), set(&[2])).unwrap();
        assert_eq!(quotient_spectrum_bijection(&b, &i).unwrap().pairs, vec![(1, 0)]);
    }

    #[test]
    fn dot_has_nodes() {
        let dot = prim_spectrum(&fix_b()).unwrap().to_dot();
        assert!(dot.contains("p0 [label=\"{1}\"]"));
        assert!(!dot.contains("->"));
    }
}
