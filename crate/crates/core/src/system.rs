//! Functions, measures, Markov operators and the validated semigroup.
//!
//! A [`MarkovSemigroup`] is the abelian semigroup generated by finitely many
//! commuting row-stochastic matrices. Row `x` of a generator is the
//! transition measure `S'δ_x`; the operator acts on functions by
//! `(Sf)(x) = Σ_y S[x][y] f(y)` and on measures by `μ ↦ μS`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{StateSet, SupportDigraph};
use crate::linalg::Matrix;
use crate::scalar::{format_rational, parse_rational, Field, Rational};

/// Numerical tolerances. Rational mode ignores all of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Entries above `-zero` are clipped to 0.
    pub zero: f64,
    /// Entries above `supp` count as support.
    pub supp: f64,
    /// Allowed row-sum deviation before renormalisation is refused.
    pub row: f64,
    /// Allowed entrywise commutator.
    pub comm: f64,
    /// Convergence tolerance for ergodic nets.
    pub conv: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            zero: 1e-12,
            supp: 1e-12,
            row: 1e-9,
            comm: 1e-9,
            conv: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Float,
    Rational,
}

/// A real function on `K = {0, …, n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FnK(pub Vec<f64>);

impl FnK {
    pub fn constant(n: usize, c: f64) -> Self {
        Self(vec![c; n])
    }

    pub fn ones(n: usize) -> Self {
        Self::constant(n, 1.0)
    }

    pub fn indicator(n: usize, set: &StateSet) -> Self {
        Self((0..n).map(|x| if set.contains(x) { 1.0 } else { 0.0 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn abs(&self) -> Self {
        Self(self.0.iter().map(|v| v.abs()).collect())
    }

    pub fn sup(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a.max(*b)).collect())
    }

    pub fn inf(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a.min(*b)).collect())
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sup norm over the states in `set` only.
    pub fn sup_norm_on(&self, set: &StateSet) -> f64 {
        set.iter().fold(0.0, |m, x| m.max(self.0[x].abs()))
    }

    pub fn restrict(&self, set: &StateSet) -> Self {
        Self(set.iter().map(|x| self.0[x]).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// A nonnegative measure on `K`, given by point weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MeasureK {
    weights: Vec<f64>,
}

impl MeasureK {
    /// Clips entries in `[-tol_zero, 0)` to zero; rejects anything more negative.
    pub fn new(weights: Vec<f64>, tol_zero: f64) -> Result<Self> {
        let mut weights = weights;
        for (x, w) in weights.iter_mut().enumerate() {
            if *w < -tol_zero || !w.is_finite() {
                return Err(Error::Parse(format!("measure weight {w} at state {x} is negative")));
            }
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        Ok(Self { weights })
    }

    pub fn dirac(n: usize, x: usize) -> Self {
        let mut weights = vec![0.0; n];
        weights[x] = 1.0;
        Self { weights }
    }

    /// Uniform probability on `set`.
    pub fn uniform_on(n: usize, set: &StateSet) -> Self {
        let w = 1.0 / set.len() as f64;
        Self {
            weights: (0..n).map(|x| if set.contains(x) { w } else { 0.0 }).collect(),
        }
    }

    pub(crate) fn from_weights_unchecked(weights: Vec<f64>) -> Self {
        Self { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_probability(&self, tol: f64) -> bool {
        (self.mass() - 1.0).abs() <= tol
    }

    pub fn support(&self, tol_supp: f64) -> StateSet {
        (0..self.weights.len()).filter(|&x| self.weights[x] > tol_supp).collect()
    }

    /// `⟨f, μ⟩ = Σ_x f(x) μ(x)`.
    pub fn pair(&self, f: &FnK) -> f64 {
        self.weights.iter().zip(&f.0).map(|(w, v)| w * v).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// A Markov operator: a row-stochastic matrix, with its exact entries kept
/// alongside in rational mode.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovOp {
    matrix: Matrix<f64>,
    exact: Option<Matrix<Rational>>,
}

impl MarkovOp {
    pub(crate) fn from_float_unchecked(matrix: Matrix<f64>) -> Self {
        Self { matrix, exact: None }
    }

    pub fn matrix(&self) -> &Matrix<f64> {
        &self.matrix
    }

    pub fn exact(&self) -> Option<&Matrix<Rational>> {
        self.exact.as_ref()
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    /// `(Sf)(x) = Σ_y S[x][y] f(y)`.
    pub fn apply(&self, f: &FnK) -> Result<FnK> {
        check_dim(self.n(), f.len())?;
        Ok(FnK(self.matrix.mul_vec(&f.0)))
    }

    /// `S'μ = μS`.
    pub fn adjoint_apply(&self, mu: &MeasureK) -> Result<MeasureK> {
        check_dim(self.n(), mu.len())?;
        Ok(MeasureK::from_weights_unchecked(self.matrix.vec_mul(&mu.weights)))
    }

    /// True when every row is a point mass (a Koopman operator).
    pub fn koopman_map(&self) -> Option<Vec<usize>> {
        (0..self.n())
            .map(|x| {
                let row = self.matrix.row(x);
                let ones: Vec<usize> = (0..row.len()).filter(|&y| row[y] == 1.0).collect();
                let rest_zero = row.iter().all(|&v| v == 0.0 || v == 1.0);
                (ones.len() == 1 && rest_zero).then(|| ones[0])
            })
            .collect()
    }
}

/// Raw matrix entry as read from a system file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Number(f64),
    Text(String),
}

/// On-disk description of a semigroup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub n: usize,
    #[serde(default)]
    pub mode: Mode,
    pub generators: Vec<Vec<Vec<Entry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl SystemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("system spec serialises")
    }

    pub fn from_float_rows(generators: &[Vec<Vec<f64>>]) -> Self {
        let n = generators.first().map_or(0, Vec::len);
        Self {
            n,
            mode: Mode::Float,
            generators: generators
                .iter()
                .map(|g| g.iter().map(|r| r.iter().map(|&v| Entry::Number(v)).collect()).collect())
                .collect(),
            labels: None,
        }
    }

    pub fn from_rational_rows(generators: &[Vec<Vec<Rational>>]) -> Self {
        let n = generators.first().map_or(0, Vec::len);
        Self {
            n,
            mode: Mode::Rational,
            generators: generators
                .iter()
                .map(|g| {
                    g.iter()
                        .map(|r| r.iter().map(|v| Entry::Text(format_rational(v))).collect())
                        .collect()
                })
                .collect(),
            labels: None,
        }
    }
}

/// The validated semigroup generated by commuting Markov operators.
#[derive(Debug, Clone)]
pub struct MarkovSemigroup {
    n: usize,
    generators: Vec<MarkovOp>,
    digraph: SupportDigraph,
    mode: Mode,
    labels: Option<Vec<String>>,
    tol: Tolerances,
}

/// Validates a system file with default tolerances.
pub fn load_system(spec: &SystemSpec) -> Result<MarkovSemigroup> {
    load_system_with(spec, Tolerances::default())
}

pub fn load_system_with(spec: &SystemSpec, tol: Tolerances) -> Result<MarkovSemigroup> {
    if spec.n == 0 {
        return Err(Error::InvalidConfig("n must be at least 1".into()));
    }
    if spec.generators.is_empty() {
        return Err(Error::InvalidConfig("at least one generator is required".into()));
    }
    if let Some(labels) = &spec.labels {
        check_dim(spec.n, labels.len())?;
    }
    for g in &spec.generators {
        check_dim(spec.n, g.len())?;
        for row in g {
            check_dim(spec.n, row.len())?;
        }
    }
    match spec.mode {
        Mode::Float => {
            let mats = spec
                .generators
                .iter()
                .map(|g| {
                    g.iter()
                        .map(|row| row.iter().map(entry_to_f64).collect::<Result<Vec<_>>>())
                        .collect::<Result<Vec<_>>>()
                        .map(Matrix::from_rows)
                })
                .collect::<Result<Vec<_>>>()?;
            MarkovSemigroup::from_float(mats, tol, spec.labels.clone())
        }
        Mode::Rational => {
            let mats = spec
                .generators
                .iter()
                .map(|g| {
                    g.iter()
                        .map(|row| row.iter().map(entry_to_rational).collect::<Result<Vec<_>>>())
                        .collect::<Result<Vec<_>>>()
                        .map(Matrix::from_rows)
                })
                .collect::<Result<Vec<_>>>()?;
            MarkovSemigroup::from_rational(mats, tol, spec.labels.clone())
        }
    }
}

fn entry_to_f64(e: &Entry) -> Result<f64> {
    match e {
        Entry::Number(v) if v.is_finite() => Ok(*v),
        Entry::Number(v) => Err(Error::Parse(format!("non-finite entry {v}"))),
        Entry::Text(s) => Ok(parse_rational(s)?.to_f64()),
    }
}

fn entry_to_rational(e: &Entry) -> Result<Rational> {
    match e {
        Entry::Text(s) => parse_rational(s),
        Entry::Number(v) if v.fract() == 0.0 && v.abs() < 1e15 => {
            Ok(Rational::from_ratio(*v as i64, 1))
        }
        Entry::Number(v) => Err(Error::Parse(format!(
            "rational mode needs \"p/q\" strings, found float {v}"
        ))),
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

impl MarkovSemigroup {
    /// Validates float generators: clips tiny negatives, renormalises rows
    /// within `tol.row`, and checks pairwise commutation.
    pub fn from_float(
        mats: Vec<Matrix<f64>>,
        tol: Tolerances,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let n = shape_check(&mats)?;
        let mut generators = Vec::with_capacity(mats.len());
        for (g, m) in mats.into_iter().enumerate() {
            let mut rows = m.to_rows();
            for (x, row) in rows.iter_mut().enumerate() {
                for v in row.iter_mut() {
                    if !v.is_finite() || *v < -tol.zero {
                        return Err(Error::NonStochastic {
                            generator: g,
                            row: x,
                            detail: format!("entry {v} is negative"),
                        });
                    }
                    if *v < tol.zero {
                        *v = v.max(0.0);
                    }
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > tol.row {
                    return Err(Error::NonStochastic {
                        generator: g,
                        row: x,
                        detail: format!("row sum {sum} deviates from 1"),
                    });
                }
                row.iter_mut().for_each(|v| *v /= sum);
            }
            generators.push(MarkovOp {
                matrix: Matrix::from_rows(rows),
                exact: None,
            });
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                let a = &generators[i].matrix;
                let b = &generators[j].matrix;
                let dev = a.mul(b).max_abs_diff(&b.mul(a));
                if dev > tol.comm {
                    return Err(Error::NonAbelian {
                        left: i,
                        right: j,
                        deviation: dev,
                    });
                }
            }
        }
        Ok(Self::assemble(n, generators, Mode::Float, labels, tol))
    }

    /// Validates exact generators: nonnegative entries, rows summing to 1
    /// and exact commutation.
    pub fn from_rational(
        mats: Vec<Matrix<Rational>>,
        tol: Tolerances,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let n = shape_check(&mats)?;
        for (g, m) in mats.iter().enumerate() {
            for x in 0..n {
                let row = m.row(x);
                if let Some(v) = row.iter().find(|v| **v < Rational::from_ratio(0, 1)) {
                    return Err(Error::NonStochastic {
                        generator: g,
                        row: x,
                        detail: format!("entry {v} is negative"),
                    });
                }
                let sum = row.iter().fold(Rational::from_ratio(0, 1), |a, b| a + b.clone());
                if sum != Rational::from_ratio(1, 1) {
                    return Err(Error::NonStochastic {
                        generator: g,
                        row: x,
                        detail: format!("row sum {sum} is not exactly 1"),
                    });
                }
            }
        }
        for i in 0..mats.len() {
            for j in i + 1..mats.len() {
                let ab = mats[i].mul(&mats[j]);
                let ba = mats[j].mul(&mats[i]);
                if ab != ba {
                    return Err(Error::NonAbelian {
                        left: i,
                        right: j,
                        deviation: ab.max_abs_diff(&ba),
                    });
                }
            }
        }
        let generators = mats
            .into_iter()
            .map(|m| MarkovOp {
                matrix: m.map(Field::to_f64),
                exact: Some(m),
            })
            .collect();
        Ok(Self::assemble(n, generators, Mode::Rational, labels, tol))
    }

    fn assemble(
        n: usize,
        generators: Vec<MarkovOp>,
        mode: Mode,
        labels: Option<Vec<String>>,
        tol: Tolerances,
    ) -> Self {
        let succ = (0..n)
            .map(|x| {
                (0..n)
                    .filter(|&y| {
                        generators.iter().any(|g| match &g.exact {
                            Some(e) => !e[(x, y)].negligible(0.0),
                            None => g.matrix[(x, y)] > tol.supp,
                        })
                    })
                    .collect()
            })
            .collect();
        Self {
            n,
            generators,
            digraph: SupportDigraph::from_successors(succ),
            mode,
            labels,
            tol,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[MarkovOp] {
        &self.generators
    }

    pub fn float_matrices(&self) -> Vec<&Matrix<f64>> {
        self.generators.iter().map(|g| &g.matrix).collect()
    }

    /// Exact generator matrices, present in rational mode.
    pub fn exact_matrices(&self) -> Option<Vec<&Matrix<Rational>>> {
        self.generators.iter().map(|g| g.exact.as_ref()).collect()
    }

    pub fn digraph(&self) -> &SupportDigraph {
        &self.digraph
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    /// Serialises back to the file schema (lossless in rational mode).
    pub fn to_spec(&self) -> SystemSpec {
        let mut spec = match self.exact_matrices() {
            Some(ex) => SystemSpec::from_rational_rows(
                &ex.iter().map(|m| m.to_rows()).collect::<Vec<_>>(),
            ),
            None => SystemSpec::from_float_rows(
                &self.generators.iter().map(|g| g.matrix.to_rows()).collect::<Vec<_>>(),
            ),
        };
        spec.labels = self.labels.clone();
        spec
    }

    /// Applies every generator and returns the results.
    pub fn apply_all(&self, f: &FnK) -> Result<Vec<FnK>> {
        self.generators.iter().map(|g| g.apply(f)).collect()
    }

    /// Largest `|μS - μ|` over generators and states.
    pub fn invariance_residual(&self, mu: &MeasureK) -> Result<f64> {
        let mut worst = 0.0f64;
        for g in &self.generators {
            worst = worst.max(g.adjoint_apply(mu)?.max_abs_diff(mu));
        }
        Ok(worst)
    }

    /// Largest `|Sf - f|` over generators, restricted to `on`.
    pub fn fixedness_residual(&self, f: &FnK, on: &StateSet) -> Result<f64> {
        let mut worst = 0.0f64;
        for sf in self.apply_all(f)? {
            for x in on.iter() {
                worst = worst.max((sf.0[x] - f.0[x]).abs());
            }
        }
        Ok(worst)
    }

    /// The single generator, or `MultiGenerator`.
    pub fn single_generator(&self) -> Result<&MarkovOp> {
        match self.generators.as_slice() {
            [g] => Ok(g),
            gs => Err(Error::MultiGenerator(gs.len())),
        }
    }
}

fn shape_check<T: Field>(mats: &[Matrix<T>]) -> Result<usize> {
    let n = mats
        .first()
        .ok_or_else(|| Error::InvalidConfig("at least one generator is required".into()))?
        .rows();
    if n == 0 {
        return Err(Error::InvalidConfig("n must be at least 1".into()));
    }
    for m in mats {
        check_dim(n, m.rows())?;
        check_dim(n, m.cols())?;
    }
    Ok(n)
}
