//! Instance builders: Koopman operators of finite maps, random walks on
//! digraphs, rotations, Ulam discretizations of piecewise-affine interval
//! maps, products, and seeded random instances.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{parse_rational, rational_from_f64, Field, Rational};
use crate::system::{Entry, MarkovSemigroup, Mode, Tolerances};

/// A finite map `φ`, `image[x] = φ(x)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapSpec {
    pub n: usize,
    pub image: Vec<usize>,
}

/// One affine branch `x ↦ slope·x + offset` on `[start, end)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub start: Entry,
    pub end: Entry,
    pub slope: Entry,
    pub offset: Entry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum UlamMap {
    Doubling,
    Rotation { alpha: Entry },
    Custom { branches: Vec<Branch> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UlamSpec {
    pub map: UlamMap,
    pub cells: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductKind {
    /// `S1ᵢ ⊗ S2ⱼ` for all pairs.
    #[default]
    Synchronous,
    /// `S1ᵢ ⊗ Id` and `Id ⊗ S2ⱼ`.
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomConfig {
    pub n_max: usize,
    pub m_max: usize,
    /// Probability of drawing a functional graph instead of a sparse
    /// stochastic matrix.
    pub koopman_bias: f64,
    pub mode: Mode,
}

impl Default for RandomConfig {
    fn default() -> Self {
        Self {
            n_max: 8,
            m_max: 3,
            koopman_bias: 0.3,
            mode: Mode::Float,
        }
    }
}

/// Largest state count for [`random_instance`].
pub const RANDOM_N_LIMIT: usize = 12;

fn assemble(mats: Vec<Matrix<Rational>>, mode: Mode, labels: Option<Vec<String>>) -> Result<MarkovSemigroup> {
    let tol = Tolerances::default();
    match mode {
        Mode::Rational => MarkovSemigroup::from_rational(mats, tol, labels),
        Mode::Float => MarkovSemigroup::from_float(
            mats.iter().map(|m| m.map(Field::to_f64)).collect(),
            tol,
            labels,
        ),
    }
}

fn koopman_matrix(image: &[usize]) -> Matrix<Rational> {
    let n = image.len();
    Matrix::from_fn(n, n, |x, y| {
        if image[x] == y {
            Rational::from_ratio(1, 1)
        } else {
            Rational::from_ratio(0, 1)
        }
    })
}

/// Single 0/1 generator with `matrix[x][φ(x)] = 1`.
pub fn build_koopman(spec: &MapSpec, mode: Mode) -> Result<MarkovSemigroup> {
    if spec.image.len() != spec.n {
        return Err(Error::DimensionMismatch {
            expected: spec.n,
            found: spec.image.len(),
        });
    }
    if let Some(&y) = spec.image.iter().find(|&&y| y >= spec.n) {
        return Err(Error::OutOfRange { value: y, n: spec.n });
    }
    assemble(vec![koopman_matrix(&spec.image)], mode, None)
}

/// `x ↦ x + a mod n`.
pub fn build_rotation(n: usize, a: usize, mode: Mode) -> Result<MarkovSemigroup> {
    if n == 0 {
        return Err(Error::InvalidConfig("rotation needs n ≥ 1".into()));
    }
    let image: Vec<usize> = (0..n).map(|x| (x + a) % n).collect();
    build_koopman(&MapSpec { n, image }, mode)
}

/// Simple random walk: uniform over the successors of each vertex.
pub fn build_random_walk(successors: &[Vec<usize>], mode: Mode) -> Result<MarkovSemigroup> {
    let n = successors.len();
    let mut m = Matrix::<Rational>::zeros(n, n);
    for (x, succ) in successors.iter().enumerate() {
        if succ.is_empty() {
            return Err(Error::InvalidConfig(format!("vertex {x} has no successors")));
        }
        let mut succ = succ.clone();
        succ.sort_unstable();
        succ.dedup();
        for &y in &succ {
            if y >= n {
                return Err(Error::OutOfRange { value: y, n });
            }
            m[(x, y)] = Rational::from_ratio(1, succ.len() as i64);
        }
    }
    assemble(vec![m], mode, None)
}

fn param(e: &Entry) -> Result<Rational> {
    match e {
        Entry::Text(s) => parse_rational(s),
        Entry::Number(v) => {
            rational_from_f64(*v).ok_or_else(|| Error::InvalidUlam(format!("non-finite parameter {v}")))
        }
    }
}

struct AffineBranch {
    start: Rational,
    end: Rational,
    slope: Rational,
    offset: Rational,
}

fn branches_of(map: &UlamMap) -> Result<Vec<AffineBranch>> {
    let r = Rational::from_ratio;
    let raw = match map {
        UlamMap::Doubling => vec![
            AffineBranch { start: r(0, 1), end: r(1, 2), slope: r(2, 1), offset: r(0, 1) },
            AffineBranch { start: r(1, 2), end: r(1, 1), slope: r(2, 1), offset: r(-1, 1) },
        ],
        UlamMap::Rotation { alpha } => {
            let a = param(alpha)?;
            let a = a.clone() - Rational::from_integer(a.floor().to_integer());
            let cut = r(1, 1) - a.clone();
            let mut v = vec![AffineBranch {
                start: r(0, 1),
                end: cut.clone(),
                slope: r(1, 1),
                offset: a.clone(),
            }];
            if cut < r(1, 1) {
                v.push(AffineBranch { start: cut, end: r(1, 1), slope: r(1, 1), offset: a - r(1, 1) });
            }
            v
        }
        UlamMap::Custom { branches } => branches
            .iter()
            .map(|b| {
                Ok(AffineBranch {
                    start: param(&b.start)?,
                    end: param(&b.end)?,
                    slope: param(&b.slope)?,
                    offset: param(&b.offset)?,
                })
            })
            .collect::<Result<_>>()?,
    };
    let mut at = r(0, 1);
    for (i, b) in raw.iter().enumerate() {
        if b.slope.is_zero() {
            return Err(Error::DegenerateBranch { index: i });
        }
        if b.start != at || b.end <= b.start {
            return Err(Error::InvalidUlam(format!(
                "branch {i} must start at {at} and have positive length"
            )));
        }
        let (lo, hi) = {
            let u = b.slope.clone() * b.start.clone() + b.offset.clone();
            let v = b.slope.clone() * b.end.clone() + b.offset.clone();
            if u < v { (u, v) } else { (v, u) }
        };
        if lo < r(0, 1) || hi > r(1, 1) {
            return Err(Error::InvalidUlam(format!("branch {i} maps outside [0, 1)")));
        }
        at = b.end.clone();
    }
    if at != r(1, 1) {
        return Err(Error::InvalidUlam("branches must cover [0, 1)".into()));
    }
    Ok(raw)
}

fn overlap(a: (&Rational, &Rational), b: (&Rational, &Rational)) -> Rational {
    let lo = if a.0 > b.0 { a.0 } else { b.0 };
    let hi = if a.1 < b.1 { a.1 } else { b.1 };
    if hi > lo {
        hi.clone() - lo.clone()
    } else {
        Rational::from_ratio(0, 1)
    }
}

/// `P[i][j] = |cell_i ∩ φ⁻¹(cell_j)| / |cell_i|`, exact for affine branches.
pub fn build_ulam(spec: &UlamSpec, mode: Mode) -> Result<MarkovSemigroup> {
    if spec.cells < 2 {
        return Err(Error::InvalidUlam("at least two cells are required".into()));
    }
    let branches = branches_of(&spec.map)?;
    let m = spec.cells;
    let edge = |k: usize| Rational::from_ratio(k as i64, m as i64);
    let mut p = Matrix::<Rational>::zeros(m, m);
    for i in 0..m {
        let (ci0, ci1) = (edge(i), edge(i + 1));
        for b in &branches {
            let dom = overlap((&ci0, &ci1), (&b.start, &b.end));
            if dom.is_zero() {
                continue;
            }
            let lo = if ci0 > b.start { ci0.clone() } else { b.start.clone() };
            let hi = if ci1 < b.end { ci1.clone() } else { b.end.clone() };
            for j in 0..m {
                let pre0 = (edge(j) - b.offset.clone()) / b.slope.clone();
                let pre1 = (edge(j + 1) - b.offset.clone()) / b.slope.clone();
                let (a0, a1) = if pre0 < pre1 { (pre0, pre1) } else { (pre1, pre0) };
                let len = overlap((&lo, &hi), (&a0, &a1));
                if !len.is_zero() {
                    p[(i, j)] = p[(i, j)].clone() + len * Rational::from_ratio(m as i64, 1);
                }
            }
        }
    }
    assemble(vec![p], mode, None)
}

/// Kronecker product `(A ⊗ B)[(i,k),(j,l)] = A[i][j]·B[k][l]`, state
/// `(i, k)` at index `i·n₂ + k`.
pub fn kronecker<T: Field>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let (n1, n2) = (a.rows(), b.rows());
    Matrix::from_fn(n1 * n2, n1 * n2, |r, c| {
        a[(r / n2, c / n2)].clone() * b[(r % n2, c % n2)].clone()
    })
}

pub fn build_product(s1: &MarkovSemigroup, s2: &MarkovSemigroup, kind: ProductKind) -> Result<MarkovSemigroup> {
    if s1.mode() != s2.mode() {
        return Err(Error::InvalidConfig("product factors must share a mode".into()));
    }
    let labels = match (s1.labels(), s2.labels()) {
        (Some(l1), Some(l2)) => Some(
            l1.iter()
                .flat_map(|a| l2.iter().map(move |b| format!("({a},{b})")))
                .collect(),
        ),
        _ => None,
    };
    fn combine<T: Field>(g1: &[&Matrix<T>], g2: &[&Matrix<T>], kind: ProductKind) -> Vec<Matrix<T>> {
        match kind {
            ProductKind::Synchronous => g1
                .iter()
                .flat_map(|a| g2.iter().map(move |b| kronecker(a, b)))
                .collect(),
            ProductKind::Independent => {
                let (i1, i2) = (Matrix::identity(g1[0].rows()), Matrix::identity(g2[0].rows()));
                g1.iter()
                    .map(|a| kronecker(a, &i2))
                    .chain(g2.iter().map(|b| kronecker(&i1, b)))
                    .collect()
            }
        }
    }
    let tol = *s1.tolerances();
    match (s1.exact_matrices(), s2.exact_matrices()) {
        (Some(e1), Some(e2)) => MarkovSemigroup::from_rational(combine(&e1, &e2, kind), tol, labels),
        _ => MarkovSemigroup::from_float(
            combine(&s1.float_matrices(), &s2.float_matrices(), kind),
            tol,
            labels,
        ),
    }
}

/// The generator for instance `index` of a sweep seeded with `seed`; each
/// index gets its own stream so sweeps parallelize reproducibly.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn random_instance(seed: u64, cfg: &RandomConfig) -> Result<MarkovSemigroup> {
    random_instance_from(&mut ChaCha8Rng::seed_from_u64(seed), cfg)
}

/// A random functional graph or sparse stochastic matrix `B`, and the
/// generators `B, B², …, B^m`.
pub fn random_instance_from(rng: &mut ChaCha8Rng, cfg: &RandomConfig) -> Result<MarkovSemigroup> {
    if cfg.n_max == 0 || cfg.n_max > RANDOM_N_LIMIT {
        return Err(Error::InvalidConfig(format!("n_max must lie in 1..={RANDOM_N_LIMIT}")));
    }
    if cfg.m_max == 0 {
        return Err(Error::InvalidConfig("m_max must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&cfg.koopman_bias) {
        return Err(Error::InvalidConfig("koopman_bias must lie in [0, 1]".into()));
    }
    let n = rng.random_range(1..=cfg.n_max);
    let m = rng.random_range(1..=cfg.m_max);
    let koopman = rng.random_bool(cfg.koopman_bias);
    let mut cols: Vec<usize> = (0..n).collect();
    let rows: Vec<Vec<(usize, u32, f64)>> = (0..n)
        .map(|_| {
            let k = if koopman { 1 } else { rng.random_range(1..=3.min(n)) };
            for i in 0..k {
                let j = rng.random_range(i..n);
                cols.swap(i, j);
            }
            cols[..k]
                .iter()
                .map(|&y| (y, rng.random_range(1..=9u32), rng.random_range(0.1..1.0)))
                .collect()
        })
        .collect();
    match cfg.mode {
        Mode::Rational => {
            let mut b = Matrix::<Rational>::zeros(n, n);
            for (x, row) in rows.iter().enumerate() {
                let total: u32 = row.iter().map(|e| e.1).sum();
                for &(y, w, _) in row {
                    b[(x, y)] = Rational::from_ratio(w as i64, total as i64);
                }
            }
            let mut gens = vec![b.clone()];
            for _ in 1..m {
                let next = gens.last().expect("nonempty").mul(&b);
                gens.push(next);
            }
            MarkovSemigroup::from_rational(gens, Tolerances::default(), None)
        }
        Mode::Float => {
            let mut b = Matrix::<f64>::zeros(n, n);
            for (x, row) in rows.iter().enumerate() {
                let total: f64 = row.iter().map(|e| e.2).sum();
                for &(y, _, w) in row {
                    b[(x, y)] = if koopman { 1.0 } else { w / total };
                }
            }
            let mut gens = vec![b.clone()];
            for _ in 1..m {
                let next = gens.last().expect("nonempty").mul(&b);
                gens.push(next);
            }
            MarkovSemigroup::from_float(gens, Tolerances::default(), None)
        }
    }
}
