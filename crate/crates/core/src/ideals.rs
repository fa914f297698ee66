//! Invariant ideals `I_L = {f : f|_L = 0}` through their supports `L`.
//!
//! `I_L` is invariant under every generator exactly when `L` is
//! self-supporting: each transition measure `S'δ_x`, `x ∈ L`, stays in `L`.
//! On the support digraph that is forward closure. Maximal invariant ideals
//! correspond to minimal self-supporting sets, which are the terminal
//! strongly connected components.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{StateSet, SupportDigraph};
use crate::linalg::Matrix;
use crate::system::{MarkovSemigroup, Mode};

/// Largest state count accepted by [`enumerate_s_ideals`].
pub const ENUMERATION_LIMIT: usize = 20;

/// A proper closed invariant ideal, stored as its (nonempty,
/// self-supporting) support. The support `K` is the zero ideal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SIdeal {
    support: StateSet,
}

impl SIdeal {
    /// Checks that `support` is nonempty and forward closed.
    pub fn new(graph: &SupportDigraph, support: StateSet) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::EmptySupport);
        }
        if let Some(x) = support.iter().find(|&x| x >= graph.n()) {
            return Err(Error::OutOfRange { value: x, n: graph.n() });
        }
        if let Some((from, to)) = graph.leaving_edge(&support) {
            return Err(Error::NotSelfSupporting { from, to });
        }
        Ok(Self { support })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            support: StateSet::full(n),
        }
    }

    pub fn support(&self) -> &StateSet {
        &self.support
    }

    pub fn is_zero_ideal(&self, n: usize) -> bool {
        self.support.len() == n
    }

    /// `I_L ⊆ I_M` iff `M ⊆ L`.
    pub fn is_contained_in(&self, other: &SIdeal) -> bool {
        other.support.is_subset(&self.support)
    }
}

pub fn is_self_supporting(graph: &SupportDigraph, set: &StateSet) -> bool {
    !set.is_empty() && set.iter().all(|x| x < graph.n()) && graph.leaving_edge(set).is_none()
}

/// Terminal strongly connected components, ordered by smallest element.
pub fn minimal_self_supporting_sets(graph: &SupportDigraph) -> Vec<StateSet> {
    graph.terminal_components()
}

/// Every nonempty forward-closed subset, ordered by bitmask.
pub fn enumerate_s_ideals(graph: &SupportDigraph) -> Result<Vec<SIdeal>> {
    let n = graph.n();
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    let succ_mask: Vec<u64> = (0..n)
        .map(|x| graph.successors(x).iter().fold(0u64, |m, &y| m | 1 << y))
        .collect();
    let closed = |mask: u64| {
        (0..n)
            .filter(|&x| mask >> x & 1 == 1)
            .all(|x| succ_mask[x] & !mask == 0)
    };
    let masks: Vec<u64> = (1u64..1 << n).into_par_iter().filter(|&m| closed(m)).collect();
    Ok(masks
        .into_iter()
        .map(|m| SIdeal {
            support: StateSet::from_mask(m, n),
        })
        .collect())
}

/// The induced semigroup on `C(L)`: every generator restricted to the rows
/// and columns of `L`, states relabelled in increasing order.
pub fn restrict_semigroup(s: &MarkovSemigroup, support: &StateSet) -> Result<MarkovSemigroup> {
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    if let Some((from, to)) = s.digraph().leaving_edge(support) {
        return Err(Error::NotSelfSupporting { from, to });
    }
    let idx = support.as_slice();
    let labels = s
        .labels()
        .map(|l| idx.iter().map(|&x| l[x].clone()).collect());
    match s.mode() {
        Mode::Rational => {
            let mats = s
                .exact_matrices()
                .expect("rational mode keeps exact matrices")
                .into_iter()
                .map(|m| m.select(idx, idx))
                .collect();
            MarkovSemigroup::from_rational(mats, *s.tolerances(), labels)
        }
        Mode::Float => {
            let mats: Vec<Matrix<f64>> = s
                .float_matrices()
                .into_iter()
                .map(|m| m.select(idx, idx))
                .collect();
            MarkovSemigroup::from_float(mats, *s.tolerances(), labels)
        }
    }
}

/// Restriction to the support of an ideal.
pub fn restrict_to_ideal(s: &MarkovSemigroup, ideal: &SIdeal) -> Result<MarkovSemigroup> {
    restrict_semigroup(s, ideal.support())
}

/// Maps a state set of a restricted system back to the ambient labels.
pub fn lift_set(support: &StateSet, local: &StateSet) -> StateSet {
    local.iter().map(|i| support.as_slice()[i]).collect()
}

/// Maps an ambient state set inside `support` to restricted labels.
pub fn localize_set(support: &StateSet, global: &StateSet) -> StateSet {
    global.iter().filter_map(|x| support.position(x)).collect()
}

/// DOT rendering of the support digraph with minimal sets as clusters.
pub fn support_dot(s: &MarkovSemigroup) -> String {
    let minimal = minimal_self_supporting_sets(s.digraph());
    s.digraph().to_dot(&minimal, s.labels())
}
