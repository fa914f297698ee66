//! Right ergodic nets: Cesàro and Abel means, the mean ergodic projection,
//! radical membership through mean decay, and orbit visit frequencies.
//!
//! Cesàro means are advanced by doubling, `C_{2N} = (C_N + S^N C_N) / 2`,
//! starting from a multiple `N0` of every cycle period so that the
//! peripheral spectrum averages out exactly. Along `N = N0·2^k` the error
//! `C_N - P` is a polynomial in `1/N` (degree = number of generators) up to
//! a geometrically small term, so Richardson extrapolation in `1/N`
//! recovers the limit long before `1/N` itself is below tolerance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{StateSet, SupportDigraph};
use crate::linalg::{gram_schmidt, Matrix, PIVOT_TOL};
use crate::scalar::Field;
use crate::system::{FnK, MarkovOp, MarkovSemigroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetKind {
    Cesaro,
    Abel,
    ComposedCesaro,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErgodicNetConfig {
    pub kind: NetKind,
    /// Largest Cesàro index `N` the net may reach.
    pub n_max: u64,
    pub tol_conv: f64,
    /// Threshold below which a mean decay counts as zero.
    pub tol_member: f64,
    /// Abel schedule `r_k = 1 - 2^{-k}`, `k ≤ abel_max_k`.
    pub abel_max_k: u32,
}

impl Default for ErgodicNetConfig {
    fn default() -> Self {
        Self {
            kind: NetKind::Cesaro,
            n_max: 1_000_000,
            tol_conv: 1e-9,
            tol_member: 1e-6,
            abel_max_k: 40,
        }
    }
}

impl ErgodicNetConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_max < 1 {
            return Err(Error::InvalidConfig("n_max must be at least 1".into()));
        }
        if !(self.tol_conv > 0.0 && self.tol_conv < 1.0) {
            return Err(Error::InvalidConfig("tol_conv must lie in (0, 1)".into()));
        }
        if !(1..=60).contains(&self.abel_max_k) {
            return Err(Error::InvalidConfig("abel_max_k must lie in 1..=60".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanProjection {
    pub matrix: Matrix<f64>,
    pub converged: bool,
    pub kind: Option<NetKind>,
    /// Final Cesàro index, when a Cesàro net was used.
    pub final_n: Option<u64>,
    /// Final Abel parameter, when the Abel net was used.
    pub final_r: Option<f64>,
    /// Distance between the last two limit estimates.
    pub residual: f64,
}

/// How far a matrix is from being the mean ergodic projection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionDefects {
    pub idempotence: f64,
    pub commutation: f64,
    pub stochasticity: f64,
}

impl ProjectionDefects {
    pub fn max(&self) -> f64 {
        self.idempotence.max(self.commutation).max(self.stochasticity)
    }
}

impl MeanProjection {
    /// `‖P² - P‖`, `max_i ‖PS_i - P‖, ‖S_iP - P‖`, and the distance to
    /// row-stochasticity.
    pub fn defects(&self, s: &MarkovSemigroup) -> ProjectionDefects {
        let p = &self.matrix;
        let idempotence = p.mul(p).max_abs_diff(p);
        let commutation = s
            .float_matrices()
            .iter()
            .map(|g| p.mul(g).max_abs_diff(p).max(g.mul(p).max_abs_diff(p)))
            .fold(0.0, f64::max);
        let stochasticity = (0..p.rows())
            .map(|i| {
                let row = p.row(i);
                let neg = row.iter().fold(0.0f64, |m, &v| m.max(-v));
                neg.max((row.iter().sum::<f64>() - 1.0).abs())
            })
            .fold(0.0, f64::max);
        ProjectionDefects {
            idempotence,
            commutation,
            stochasticity,
        }
    }

    pub fn apply(&self, f: &FnK) -> FnK {
        FnK(self.matrix.mul_vec(&f.0))
    }
}

/// Cesàro means of several generators at a common index `N`.
struct CesaroStepper<T> {
    n: u64,
    means: Vec<Matrix<T>>,
    powers: Vec<Matrix<T>>,
}

impl<T: Field> CesaroStepper<T> {
    /// `C_{N0}` and `S^{N0}` for each generator, by binary expansion of `N0`
    /// using `C_{a+b} = (a C_a + b S^a C_b) / (a + b)`.
    fn start(gens: &[&Matrix<T>], n0: u64) -> Self {
        assert!(n0 >= 1);
        let mut means = Vec::with_capacity(gens.len());
        let mut powers = Vec::with_capacity(gens.len());
        for g in gens {
            let dim = g.rows();
            let (mut a, mut c, mut p) = (1u64, Matrix::identity(dim), (*g).clone());
            for bit in (0..63 - n0.leading_zeros()).rev() {
                c = c.add(&p.mul(&c)).scale(&T::from_ratio(1, 2));
                p = p.mul(&p);
                a *= 2;
                if n0 >> bit & 1 == 1 {
                    let w = T::from_ratio(a as i64, a as i64 + 1);
                    let v = T::from_ratio(1, a as i64 + 1);
                    c = c.scale(&w).add(&p.scale(&v));
                    p = p.mul(g);
                    a += 1;
                }
            }
            debug_assert_eq!(a, n0);
            means.push(c);
            powers.push(p);
        }
        Self { n: n0, means, powers }
    }

    fn double(&mut self) {
        let half = T::from_ratio(1, 2);
        for (c, p) in self.means.iter_mut().zip(self.powers.iter_mut()) {
            *c = c.add(&p.mul(c)).scale(&half);
            *p = p.mul(p);
        }
        self.n *= 2;
    }

    /// `C_N^{(1)} ⋯ C_N^{(m)}`.
    fn composed(&self) -> Matrix<T> {
        let mut it = self.means.iter();
        let first = it.next().expect("at least one generator").clone();
        it.fold(first, |acc, c| acc.mul(c))
    }
}

/// Richardson table for a sequence halving its step: eliminates error terms
/// in `h, h², …, h^order`.
struct Richardson {
    order: usize,
    prev_row: Vec<Matrix<f64>>,
}

impl Richardson {
    fn new(order: usize) -> Self {
        Self {
            order,
            prev_row: Vec::new(),
        }
    }

    /// Feeds the next raw estimate; returns the highest-order estimate and
    /// whether it reached full order.
    fn push(&mut self, raw: Matrix<f64>) -> (Matrix<f64>, bool) {
        let mut row = vec![raw];
        for j in 1..=self.order.min(self.prev_row.len()) {
            let f = (1u64 << j) as f64;
            let next = row[j - 1]
                .scale(&f)
                .sub(&self.prev_row[j - 1])
                .scale(&(1.0 / (f - 1.0)));
            row.push(next);
        }
        let full = row.len() == self.order + 1;
        let best = row.last().expect("nonempty").clone();
        self.prev_row = row;
        (best, full)
    }
}

/// Least common multiple of the periods of the closed classes of each
/// generator's own digraph.
fn period_alignment(s: &MarkovSemigroup) -> u64 {
    let tol = s.tolerances().supp;
    let mut l: u64 = 1;
    for g in s.float_matrices() {
        let n = g.rows();
        let digraph = SupportDigraph::from_successors(
            (0..n)
                .map(|x| (0..n).filter(|&y| g[(x, y)] > tol).collect())
                .collect(),
        );
        for class in digraph.terminal_components() {
            let p = digraph.period(&class).max(1) as u64;
            l = num_integer::lcm(l, p);
            if l > 1 << 40 {
                return 1;
            }
        }
    }
    l
}

/// One level of the accelerated Cesàro net.
struct NetLevel {
    n: u64,
    raw: Matrix<f64>,
    estimate: Matrix<f64>,
    /// `‖E_k - E_{k-1}‖` once both are of full order.
    residual: Option<f64>,
}

/// Runs the composed Cesàro net, handing each level to `visit`, until the
/// extrapolated limit moves by less than `tol_conv`.
fn run_cesaro(
    s: &MarkovSemigroup,
    cfg: &ErgodicNetConfig,
    mut visit: impl FnMut(&NetLevel),
) -> Result<NetLevel> {
    cfg.validate()?;
    let gens = s.float_matrices();
    let mut n0 = period_alignment(s);
    if n0 > cfg.n_max {
        n0 = 1;
    }
    let mut stepper = CesaroStepper::start(&gens, n0);
    let mut rich = Richardson::new(gens.len());
    let mut last_full: Option<Matrix<f64>> = None;
    let mut residual = f64::INFINITY;
    loop {
        let raw = stepper.composed();
        let (estimate, full) = rich.push(raw.clone());
        let mut level = NetLevel {
            n: stepper.n,
            raw,
            estimate,
            residual: None,
        };
        if full {
            if let Some(prev) = &last_full {
                residual = level.estimate.max_abs_diff(prev);
                level.residual = Some(residual);
            }
            last_full = Some(level.estimate.clone());
        }
        visit(&level);
        if residual < cfg.tol_conv {
            return Ok(level);
        }
        if stepper.n.saturating_mul(2) > cfg.n_max {
            return Err(Error::NotConverged {
                n_max: cfg.n_max,
                residual,
            });
        }
        stepper.double();
    }
}

/// Limit of the (composed) Cesàro net.
pub fn cesaro_projection(s: &MarkovSemigroup, cfg: &ErgodicNetConfig) -> Result<MeanProjection> {
    let kind = if s.generators().len() == 1 {
        NetKind::Cesaro
    } else {
        NetKind::ComposedCesaro
    };
    let last = run_cesaro(s, cfg, |_| {})?;
    Ok(MeanProjection {
        matrix: last.estimate,
        converged: true,
        kind: Some(kind),
        final_n: Some(last.n),
        final_r: None,
        residual: last.residual.unwrap_or(0.0),
    })
}

/// Raw Cesàro mean `C_N` of a single generator (or the composed product).
pub fn cesaro_mean<T: Field>(gens: &[&Matrix<T>], n: u64) -> Matrix<T> {
    CesaroStepper::start(gens, n).composed()
}

/// Projection onto `fix(S)` along `Σ_i range(S_i - I)`, by direct linear
/// algebra: `P = F (M F)^{-1} M` with `F` a basis of fixed functions and `M`
/// a basis of invariant measures.
pub fn exact_projection(s: &MarkovSemigroup) -> Result<MeanProjection> {
    let n = s.n();
    let gens = s.float_matrices();
    let fixed = crate::measures::fix_basis_of(&gens, n);
    let blocks: Vec<Matrix<f64>> = gens
        .iter()
        .map(|g| g.sub(&Matrix::identity(n)).transpose())
        .collect();
    let measures = gram_schmidt(&Matrix::vstack(&blocks).null_space(PIVOT_TOL), 1e-8);
    if fixed.len() != measures.len() {
        return Err(Error::DecompositionFailure(format!(
            "fixed space has dimension {} but the invariant measures span {}",
            fixed.len(),
            measures.len()
        )));
    }
    let d = fixed.len();
    let f = Matrix::from_fn(n, d, |i, j| fixed[j].0[i]);
    let m = Matrix::from_rows(measures);
    let gram = m.mul(&f);
    let inv = gram.inverse(PIVOT_TOL).ok_or_else(|| {
        Error::DecompositionFailure("fixed space and range do not complement".into())
    })?;
    Ok(MeanProjection {
        matrix: f.mul(&inv).mul(&m),
        converged: true,
        kind: None,
        final_n: None,
        final_r: None,
        residual: 0.0,
    })
}

/// `A_r = (1 - r) Σ_n (rS)^n = h (hI + r(I - S))^{-1}` for the single
/// generator, `h = 1 - r`.
///
/// `hI + r(I - S)` is a diagonally dominant M-matrix with row sums exactly
/// `h`; elimination rebuilds each pivot from the row-sum excess so every
/// step adds nonnegative quantities and the inverse keeps full relative
/// accuracy even as `h → 0`.
pub fn abel_operator(s: &MarkovSemigroup, r: f64) -> Result<MarkovOp> {
    let g = s.single_generator()?.matrix();
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidConfig(format!("Abel parameter {r} outside (0, 1)")));
    }
    let h = 1.0 - r;
    let n = s.n();
    // off[i][j] = -M_ij ≥ 0 for j ≠ i, excess[i] = row sum of M
    let mut off = Matrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { r * g[(i, j)] });
    let mut excess = vec![h; n];
    let mut pivot = vec![0.0; n];
    // lower multipliers, stored in place of eliminated entries
    let mut low = Matrix::zeros(n, n);
    for k in 0..n {
        pivot[k] = excess[k] + (k + 1..n).map(|j| off[(k, j)]).sum::<f64>();
        for i in k + 1..n {
            let l = off[(i, k)] / pivot[k];
            if l == 0.0 {
                continue;
            }
            low[(i, k)] = l;
            off[(i, k)] = 0.0;
            for j in k + 1..n {
                if j != i {
                    off[(i, j)] += l * off[(k, j)];
                }
            }
            excess[i] += l * excess[k];
        }
    }
    let mut inv = Matrix::zeros(n, n);
    for c in 0..n {
        let mut y = vec![0.0; n];
        for i in 0..n {
            y[i] = if i == c { 1.0 } else { 0.0 } + (0..i).map(|j| low[(i, j)] * y[j]).sum::<f64>();
        }
        for i in (0..n).rev() {
            let acc = y[i] + (i + 1..n).map(|j| off[(i, j)] * inv[(j, c)]).sum::<f64>();
            inv[(i, c)] = acc / pivot[i];
        }
    }
    Ok(MarkovOp::from_float_unchecked(inv.scale(&h)))
}

/// Limit of the Abel net along `r_k = 1 - 2^{-k}`, extrapolated in
/// `h = 1 - r`.
pub fn abel_limit(s: &MarkovSemigroup, cfg: &ErgodicNetConfig) -> Result<MeanProjection> {
    cfg.validate()?;
    let mut rich = Richardson::new(2);
    let mut last_full: Option<Matrix<f64>> = None;
    let mut residual = f64::INFINITY;
    for k in 1..=cfg.abel_max_k {
        let r = 1.0 - (0.5f64).powi(k as i32);
        let (estimate, full) = rich.push(abel_operator(s, r)?.matrix().clone());
        if full {
            if let Some(prev) = &last_full {
                residual = estimate.max_abs_diff(prev);
            }
            last_full = Some(estimate.clone());
        }
        if residual < cfg.tol_conv {
            return Ok(MeanProjection {
                matrix: estimate,
                converged: true,
                kind: Some(NetKind::Abel),
                final_n: None,
                final_r: Some(r),
                residual,
            });
        }
    }
    Err(Error::NotConverged {
        n_max: cfg.abel_max_k as u64,
        residual,
    })
}

/// Limit of the net selected by `cfg.kind`.
pub fn mean_projection(s: &MarkovSemigroup, cfg: &ErgodicNetConfig) -> Result<MeanProjection> {
    match cfg.kind {
        NetKind::Cesaro | NetKind::ComposedCesaro => cesaro_projection(s, cfg),
        NetKind::Abel => abel_limit(s, cfg),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayPoint {
    #[serde(rename = "N")]
    pub n: u64,
    pub decay: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipResult {
    pub member: bool,
    /// `max_{x∈L}` of the extrapolated limit of `C_N|f|`.
    pub limit_max: f64,
    pub converged_at: u64,
    /// `max_{x∈L} (C_N|f|)(x)` along the net.
    pub trace: Vec<DecayPoint>,
}

/// Decides `f ∈ rad(I_L)` by the decay of `C_N|f|` on `L`.
pub fn radical_membership_via_means(
    s: &MarkovSemigroup,
    set: &StateSet,
    f: &FnK,
    cfg: &ErgodicNetConfig,
) -> Result<MembershipResult> {
    if f.len() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: s.n(),
            found: f.len(),
        });
    }
    if set.is_empty() {
        return Err(Error::EmptySupport);
    }
    if let Some((from, to)) = s.digraph().leaving_edge(set) {
        return Err(Error::NotSelfSupporting { from, to });
    }
    let abs = f.abs();
    let max_on = |v: &[f64]| set.iter().fold(0.0f64, |m, x| m.max(v[x]));
    let mut trace = Vec::new();
    let last = run_cesaro(s, cfg, |level| {
        trace.push(DecayPoint {
            n: level.n,
            decay: max_on(&level.raw.mul_vec(&abs.0)),
        });
    })?;
    let limit_max = max_on(&last.estimate.mul_vec(&abs.0));
    Ok(MembershipResult {
        member: limit_max < cfg.tol_member,
        limit_max,
        converged_at: last.n,
        trace,
    })
}

/// Exact `max_{x∈L} (C_N|f|)(x)` for `N = 1, 2, 4, …, 2^(levels-1)`
/// (rational mode).
pub fn decay_trace_exact(
    s: &MarkovSemigroup,
    set: &StateSet,
    f: &[crate::scalar::Rational],
    levels: u32,
) -> Result<Vec<(u64, crate::scalar::Rational)>> {
    let ex = s
        .exact_matrices()
        .ok_or_else(|| Error::InvalidConfig("exact trace needs a rational-mode system".into()))?;
    if f.len() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: s.n(),
            found: f.len(),
        });
    }
    if let Some((from, to)) = s.digraph().leaving_edge(set) {
        return Err(Error::NotSelfSupporting { from, to });
    }
    let abs: Vec<_> = f.iter().map(Field::abs).collect();
    let mut stepper = CesaroStepper::start(&ex, 1);
    let mut out = Vec::with_capacity(levels as usize);
    for k in 0..levels {
        if k > 0 {
            stepper.double();
        }
        let v = stepper.composed().mul_vec(&abs);
        let max = set
            .iter()
            .map(|x| v[x].clone())
            .fold(None, |m: Option<crate::scalar::Rational>, x| match m {
                Some(m) if m >= x => Some(m),
                _ => Some(x),
            })
            .unwrap_or_else(|| crate::scalar::Rational::from_ratio(0, 1));
        out.push((stepper.n, max));
    }
    Ok(out)
}

/// CSV with header `N,decay`.
pub fn decay_trace_csv(trace: &[DecayPoint]) -> String {
    let mut out = String::from("N,decay\n");
    for p in trace {
        out.push_str(&format!("{},{:e}\n", p.n, p.decay));
    }
    out
}

/// The map `φ` of a single Koopman generator.
pub fn koopman_map(s: &MarkovSemigroup) -> Result<Vec<usize>> {
    let g = s.single_generator()?;
    g.koopman_map().ok_or_else(|| {
        let m = g.matrix();
        let row = (0..m.rows())
            .find(|&x| {
                let r = m.row(x);
                r.iter().filter(|&&v| v == 1.0).count() != 1 || r.iter().any(|&v| v != 0.0 && v != 1.0)
            })
            .unwrap_or(0);
        Error::NotKoopman { row }
    })
}

/// `(1/N) Σ_{n<N} |f(φⁿ(x))|`.
pub fn almost_weak_stability(s: &MarkovSemigroup, f: &FnK, x: usize, n: u64) -> Result<f64> {
    let phi = koopman_map(s)?;
    if f.len() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: s.n(),
            found: f.len(),
        });
    }
    orbit_average(&phi, x, n, |y| f.0[y].abs())
}

/// `(1/N) #{n < N : φⁿ(x) ∈ U}`.
pub fn visit_frequency(s: &MarkovSemigroup, x: usize, set: &StateSet, n: u64) -> Result<f64> {
    let phi = koopman_map(s)?;
    orbit_average(&phi, x, n, |y| if set.contains(y) { 1.0 } else { 0.0 })
}

fn orbit_average(phi: &[usize], x: usize, n: u64, value: impl Fn(usize) -> f64) -> Result<f64> {
    if x >= phi.len() {
        return Err(Error::OutOfRange { value: x, n: phi.len() });
    }
    if n == 0 {
        return Err(Error::InvalidConfig("N must be at least 1".into()));
    }
    let mut y = x;
    let mut total = 0.0;
    for _ in 0..n {
        total += value(y);
        y = phi[y];
    }
    Ok(total / n as f64)
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

    fn half_matrix() -> Matrix<f64> {
        Matrix::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.5]])
    }

    #[test]
    fn cesaro_examples() {
        let cfg = ErgodicNetConfig::default();
        let p = cesaro_projection(&sys(&[perm(&[1, 0])]), &cfg).unwrap();
        assert!(p.matrix.max_abs_diff(&half_matrix()) < 1e-12);
        let p = cesaro_projection(&sys(&[perm(&[0, 1])]), &cfg).unwrap();
        assert!(p.matrix.max_abs_diff(&Matrix::identity(2)) < 1e-12);
        let p = cesaro_projection(&fix_b(), &cfg).unwrap();
        let expect = Matrix::from_rows(vec![
            vec![0.0, 0.5, 0.5],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        assert!(p.matrix.max_abs_diff(&expect) < 1e-12);
        assert!(p.final_n.unwrap() <= cfg.n_max);
    }

    #[test]
    fn raw_cesaro_brute_force() {
        // C_2 of the swap is already the projection
        let swap = Matrix::from_rows(perm(&[1, 0]));
        assert_eq!(cesaro_mean(&[&swap], 2), half_matrix());
        // C_N by direct summation for an odd N
        let b = fix_b();
        let g = b.float_matrices()[0].clone();
        let mut sum = Matrix::zeros(3, 3);
        let mut pw = Matrix::identity(3);
        for _ in 0..13 {
            sum = sum.add(&pw);
            pw = pw.mul(&g);
        }
        let direct = sum.scale(&(1.0 / 13.0));
        assert!(cesaro_mean(&[&g], 13).max_abs_diff(&direct) < 1e-14);
    }

    #[test]
    fn exact_projection_examples() {
        let p = exact_projection(&sys(&[perm(&[0, 1])])).unwrap();
        assert!(p.matrix.max_abs_diff(&Matrix::identity(2)) < 1e-12);
        let p = exact_projection(&sys(&[perm(&[1, 0])])).unwrap();
        assert!(p.matrix.max_abs_diff(&half_matrix()) < 1e-12);
    }

    #[test]
    fn abel_examples() {
        let id = sys(&[perm(&[0, 1])]);
        assert!(abel_operator(&id, 0.3).unwrap().matrix().max_abs_diff(&Matrix::identity(2)) < 1e-15);
        let swap = sys(&[perm(&[1, 0])]);
        let a = abel_operator(&swap, 0.5).unwrap().matrix().clone();
        let expect = Matrix::from_rows(vec![vec![2.0 / 3.0, 1.0 / 3.0], vec![1.0 / 3.0, 2.0 / 3.0]]);
        assert!(a.max_abs_diff(&expect) < 1e-15);
        let r32 = 1.0 - 0.5f64.powi(32);
        assert!(abel_operator(&swap, r32).unwrap().matrix().max_abs_diff(&half_matrix()) < 1e-9);
        assert!(matches!(
            abel_operator(&sys(&[perm(&[0, 1]), perm(&[0, 1])]), 0.5),
            Err(Error::MultiGenerator(2))
        ));
        let lim = abel_limit(&fix_b(), &ErgodicNetConfig::default()).unwrap();
        let ces = cesaro_projection(&fix_b(), &ErgodicNetConfig::default()).unwrap();
        assert!(lim.matrix.max_abs_diff(&ces.matrix) < 1e-9);
    }

    #[test]
    fn abel_matches_resolvent() {
        let b = fix_b();
        let g = b.float_matrices()[0].clone();
        let r = 0.9;
        let resolvent = Matrix::identity(3).sub(&g.scale(&r)).inverse(1e-12).unwrap();
        let direct = resolvent.scale(&(1.0 - r));
        assert!(abel_operator(&b, r).unwrap().matrix().max_abs_diff(&direct) < 1e-14);
    }

    #[test]
    fn membership_examples() {
        let b = fix_b();
        let cfg = ErgodicNetConfig::default();
        let all = StateSet::full(3);
        let one = radical_membership_via_means(&b, &all, &FnK::ones(3), &cfg).unwrap();
        assert!(!one.member);
        let probe = radical_membership_via_means(&b, &all, &FnK(vec![1.0, 0.0, 0.0]), &cfg).unwrap();
        assert!(probe.member);
        for p in &probe.trace {
            assert!((p.decay - 1.0 / p.n as f64).abs() < 1e-15);
        }
        let on_support =
            radical_membership_via_means(&b, &all, &FnK(vec![0.0, 1.0, 0.0]), &cfg).unwrap();
        assert!(!on_support.member);
        assert!(matches!(
            radical_membership_via_means(&b, &StateSet::new(vec![0]), &FnK::ones(3), &cfg),
            Err(Error::NotSelfSupporting { .. })
        ));
    }

    #[test]
    fn not_converged_when_cap_is_tiny() {
        let cfg = ErgodicNetConfig {
            n_max: 4,
            ..Default::default()
        };
        let ring = sys(&[vec![
            vec![0.1, 0.9, 0.0],
            vec![0.0, 0.1, 0.9],
            vec![0.9, 0.0, 0.1],
        ]]);
        assert!(matches!(cesaro_projection(&ring, &cfg), Err(Error::NotConverged { .. })));
    }

    #[test]
    fn orbit_examples() {
        let phi = sys(&[perm(&[1, 2, 3, 2])]);
        assert_eq!(almost_weak_stability(&phi, &FnK(vec![0.0; 4]), 0, 100).unwrap(), 0.0);
        let v = almost_weak_stability(&phi, &FnK(vec![1.0, 1.0, 0.0, 0.0]), 0, 100).unwrap();
        assert!((v - 0.02).abs() < 1e-15);
        assert_eq!(almost_weak_stability(&phi, &FnK::ones(4), 3, 17).unwrap(), 1.0);
        assert_eq!(visit_frequency(&phi, 0, &StateSet::full(4), 7).unwrap(), 1.0);
        let v = visit_frequency(&phi, 0, &StateSet::new(vec![2, 3]), 100).unwrap();
        assert!((v - 0.98).abs() < 1e-15);
        let v = visit_frequency(&phi, 0, &StateSet::new(vec![2]), 100).unwrap();
        assert!((v - 0.49).abs() < 1e-15);
        assert!(matches!(
            visit_frequency(&fix_b(), 0, &StateSet::full(3), 10),
            Err(Error::NotKoopman { row: 0 })
        ));
    }

    #[test]
    fn csv_header() {
        let csv = decay_trace_csv(&[DecayPoint { n: 1, decay: 1.0 }]);
        assert!(csv.starts_with("N,decay\n1,"));
    }
}
