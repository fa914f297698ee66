//! Invariant and ergodic measures.
//!
//! Ergodic measures are found class by class: each minimal self-supporting
//! set carries exactly one invariant probability, obtained from the stacked
//! linear system `μ(S_i|_L - I) = 0`, `Σ μ = 1`. A second, independent
//! characterisation (the fixed space of the induced semigroup on
//! `L¹(μ)` being one-dimensional) is exposed as [`is_ergodic`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::StateSet;
use crate::ideals::{minimal_self_supporting_sets, restrict_to_ideal, SIdeal};
use crate::linalg::{gram_schmidt, Matrix, PIVOT_TOL};
use crate::scalar::{Field, Rational};
use crate::system::{FnK, MarkovSemigroup, MeasureK};

/// Tolerance on invariance and mass for user-supplied measures.
pub const INVARIANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicMeasure {
    pub support: StateSet,
    pub measure: MeasureK,
    /// Exact weights (full length) in rational mode.
    #[serde(skip)]
    pub exact: Option<Vec<Rational>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantPolytope {
    pub n: usize,
    /// Basis of the linear span of the invariant measures.
    pub span_basis: Vec<Vec<f64>>,
    pub vertices: Vec<MeasureK>,
}

/// Solution of the stationary system restricted to `states`, together with
/// the dimension of its affine solution set. `None` if inconsistent.
pub(crate) fn stationary_on<T: Field>(
    gens: &[&Matrix<T>],
    states: &[usize],
    tol: f64,
) -> Option<(Vec<T>, usize)> {
    let k = states.len();
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(gens.len() * k + 1);
    for g in gens {
        for (j, &sj) in states.iter().enumerate() {
            let mut row: Vec<T> = states
                .iter()
                .enumerate()
                .map(|(i, &si)| {
                    let v = g[(si, sj)].clone();
                    if i == j {
                        v - T::one()
                    } else {
                        v
                    }
                })
                .collect();
            row.push(T::zero());
            rows.push(row);
        }
    }
    let mut norm = vec![T::one(); k];
    norm.push(T::one());
    rows.push(norm);
    let mut aug = Matrix::from_rows(rows);
    let pivots = aug.rref(tol);
    if pivots.last() == Some(&k) {
        return None;
    }
    let mut sol = vec![T::zero(); k];
    for (r, &c) in pivots.iter().enumerate() {
        sol[c] = aug[(r, k)].clone();
    }
    Some((sol, k - pivots.len()))
}

/// Dimension of `∩_i ker(S_i|_L - I)` on functions over `states`.
pub(crate) fn fixed_space_dim<T: Field>(gens: &[&Matrix<T>], states: &[usize], tol: f64) -> usize {
    let blocks: Vec<Matrix<T>> = gens
        .iter()
        .map(|g| g.select(states, states).sub(&Matrix::identity(states.len())))
        .collect();
    states.len() - Matrix::vstack(&blocks).rank(tol)
}

/// The ergodic measures, one per minimal self-supporting set, in the order
/// of those sets.
pub fn ergodic_measures(s: &MarkovSemigroup) -> Result<Vec<ErgodicMeasure>> {
    let n = s.n();
    minimal_self_supporting_sets(s.digraph())
        .into_iter()
        .map(|class| {
            let idx = class.as_slice();
            let (weights, exact) = match s.exact_matrices() {
                Some(ex) => {
                    let (sol, dim) = stationary_on(&ex, idx, 0.0)
                        .ok_or_else(|| Error::Inconsistent("stationary system".into()))?;
                    if dim > 0 {
                        return Err(Error::NonUniqueOnMinimalClass {
                            support: idx.to_vec(),
                            dimension: dim,
                        });
                    }
                    let mut full = vec![Rational::from_ratio(0, 1); n];
                    for (&x, v) in idx.iter().zip(sol) {
                        full[x] = v;
                    }
                    (full.iter().map(Field::to_f64).collect::<Vec<_>>(), Some(full))
                }
                None => {
                    let (sol, dim) = stationary_on(&s.float_matrices(), idx, PIVOT_TOL)
                        .ok_or_else(|| Error::Inconsistent("stationary system".into()))?;
                    if dim > 0 {
                        return Err(Error::NonUniqueOnMinimalClass {
                            support: idx.to_vec(),
                            dimension: dim,
                        });
                    }
                    let mut full = vec![0.0; n];
                    for (&x, v) in idx.iter().zip(sol) {
                        full[x] = v.max(0.0);
                    }
                    let mass: f64 = full.iter().sum();
                    full.iter_mut().for_each(|v| *v /= mass);
                    (full, None)
                }
            };
            if let Some(&x) = idx.iter().find(|&&x| weights[x] <= 0.0) {
                return Err(Error::Inconsistent(format!(
                    "ergodic measure on {class} vanishes at state {x}"
                )));
            }
            Ok(ErgodicMeasure {
                support: class,
                measure: MeasureK::from_weights_unchecked(weights),
                exact,
            })
        })
        .collect()
}

fn check_invariant_probability(s: &MarkovSemigroup, mu: &MeasureK) -> Result<()> {
    if mu.len() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: s.n(),
            found: mu.len(),
        });
    }
    let residual = s
        .invariance_residual(mu)?
        .max((mu.mass() - 1.0).abs());
    if residual > INVARIANCE_TOL {
        return Err(Error::NotInvariant { residual });
    }
    Ok(())
}

fn supported_on_closed_set(s: &MarkovSemigroup, mu: &MeasureK) -> Result<StateSet> {
    let supp = mu.support(s.tolerances().supp);
    if s.digraph().leaving_edge(&supp).is_some() {
        return Err(Error::NotInvariant { residual: f64::NAN });
    }
    Ok(supp)
}

/// Fixed-space test: `μ` is ergodic iff the induced semigroup on its support
/// has a one-dimensional fixed space.
pub fn is_ergodic(s: &MarkovSemigroup, mu: &MeasureK) -> Result<bool> {
    check_invariant_probability(s, mu)?;
    let supp = supported_on_closed_set(s, mu)?;
    Ok(fixed_space_dim(&s.float_matrices(), supp.as_slice(), PIVOT_TOL) == 1)
}

/// Vertex test: `μ` is extreme in the invariant polytope iff it is the only
/// invariant probability vanishing off its support.
pub fn is_extreme(s: &MarkovSemigroup, mu: &MeasureK) -> Result<bool> {
    check_invariant_probability(s, mu)?;
    let supp = supported_on_closed_set(s, mu)?;
    Ok(stationary_on(&s.float_matrices(), supp.as_slice(), PIVOT_TOL).is_some_and(|(_, d)| d == 0))
}

fn exact_support<'a>(s: &'a MarkovSemigroup, mu: &[Rational]) -> Result<(Vec<&'a Matrix<Rational>>, StateSet)> {
    let ex = s
        .exact_matrices()
        .ok_or_else(|| Error::InvalidConfig("exact test needs a rational-mode system".into()))?;
    if mu.len() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: s.n(),
            found: mu.len(),
        });
    }
    let zero = Rational::from_ratio(0, 1);
    let one = Rational::from_ratio(1, 1);
    let mass = mu.iter().fold(zero.clone(), |a, b| a + b.clone());
    let invariant = ex.iter().all(|g| g.vec_mul(mu) == mu);
    if mass != one || !invariant || mu.iter().any(|v| *v < zero) {
        return Err(Error::NotInvariant { residual: f64::NAN });
    }
    let supp: StateSet = (0..mu.len()).filter(|&x| mu[x] > zero).collect();
    Ok((ex, supp))
}

/// Exact fixed-space test (rational mode).
pub fn is_ergodic_exact(s: &MarkovSemigroup, mu: &[Rational]) -> Result<bool> {
    let (ex, supp) = exact_support(s, mu)?;
    Ok(fixed_space_dim(&ex, supp.as_slice(), 0.0) == 1)
}

/// Exact vertex test (rational mode).
pub fn is_extreme_exact(s: &MarkovSemigroup, mu: &[Rational]) -> Result<bool> {
    let (ex, supp) = exact_support(s, mu)?;
    Ok(stationary_on(&ex, supp.as_slice(), 0.0).is_some_and(|(_, d)| d == 0))
}

/// Orthonormal basis of `fix(S) = ∩_i ker(S_i - I)`, starting with `𝟙/√n`.
pub fn fix_space_basis(s: &MarkovSemigroup) -> Vec<FnK> {
    fix_basis_of(&s.float_matrices(), s.n())
}

pub(crate) fn fix_basis_of(gens: &[&Matrix<f64>], n: usize) -> Vec<FnK> {
    let blocks: Vec<Matrix<f64>> = gens.iter().map(|g| g.sub(&Matrix::identity(n))).collect();
    let mut candidates = vec![vec![1.0; n]];
    candidates.extend(Matrix::vstack(&blocks).null_space(PIVOT_TOL));
    gram_schmidt(&candidates, 1e-8).into_iter().map(FnK).collect()
}

/// Span of the invariant measures plus the polytope's vertices.
pub fn invariant_polytope(s: &MarkovSemigroup) -> Result<InvariantPolytope> {
    let n = s.n();
    let blocks: Vec<Matrix<f64>> = s
        .float_matrices()
        .iter()
        .map(|g| g.sub(&Matrix::identity(n)).transpose())
        .collect();
    Ok(InvariantPolytope {
        n,
        span_basis: Matrix::vstack(&blocks).null_space(PIVOT_TOL),
        vertices: ergodic_measures(s)?.into_iter().map(|e| e.measure).collect(),
    })
}

/// Zero-pads an invariant measure of the system restricted to `ideal`.
pub fn embed_measure(s: &MarkovSemigroup, ideal: &SIdeal, nu: &MeasureK) -> Result<MeasureK> {
    let restricted = restrict_to_ideal(s, ideal)?;
    check_invariant_probability(&restricted, nu)?;
    let mut weights = vec![0.0; s.n()];
    for (x, w) in ideal.support().iter().zip(nu.weights()) {
        weights[x] = *w;
    }
    Ok(MeasureK::from_weights_unchecked(weights))
}

/// Checks `S_i 𝟙_L = 𝟙_L` on the support of `μ` for every generator.
pub fn indicator_is_fixed(s: &MarkovSemigroup, mu: &MeasureK, set: &StateSet) -> Result<bool> {
    if let Some((from, to)) = s.digraph().leaving_edge(set) {
        return Err(Error::NotSelfSupporting { from, to });
    }
    if set.is_empty() {
        return Err(Error::EmptySupport);
    }
    check_invariant_probability(s, mu)?;
    let supp = mu.support(s.tolerances().supp);
    let ind = FnK::indicator(s.n(), set);
    Ok(s.fixedness_residual(&ind, &supp)? <= INVARIANCE_TOL)
}

/// Coefficients of `μ` on the ergodic measures (the class masses) and the
/// max-entry reconstruction residual.
pub fn ergodic_decomposition(s: &MarkovSemigroup, mu: &MeasureK) -> Result<(Vec<f64>, f64)> {
    check_invariant_probability(s, mu)?;
    let ergodic = ergodic_measures(s)?;
    let coeffs: Vec<f64> = ergodic
        .iter()
        .map(|e| e.support.iter().map(|x| mu.weights()[x]).sum())
        .collect();
    let mut rebuilt = vec![0.0; s.n()];
    for (c, e) in coeffs.iter().zip(&ergodic) {
        for (r, w) in rebuilt.iter_mut().zip(e.measure.weights()) {
            *r += c * w;
        }
    }
    let residual = rebuilt
        .iter()
        .zip(mu.weights())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok((coeffs, residual))
}
