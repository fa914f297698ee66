//! State sets and the support digraph of a semigroup.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A subset of the finite state space, kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateSet(Vec<usize>);

impl StateSet {
    pub fn new(mut states: Vec<usize>) -> Self {
        states.sort_unstable();
        states.dedup();
        Self(states)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn full(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn from_mask(mask: u64, n: usize) -> Self {
        Self((0..n).filter(|&i| mask >> i & 1 == 1).collect())
    }

    pub fn to_mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &i| m | 1 << i)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.0.iter().all(|&x| other.contains(x))
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.0.iter().any(|&x| other.contains(x))
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::new(self.0.iter().chain(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self(self.0.iter().copied().filter(|&x| other.contains(x)).collect())
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self(self.0.iter().copied().filter(|&x| !other.contains(x)).collect())
    }

    /// Position of `x` within the set, i.e. its index after restriction.
    pub fn position(&self, x: usize) -> Option<usize> {
        self.0.binary_search(&x).ok()
    }
}

impl FromIterator<usize> for StateSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// Edge `x -> y` iff some generator moves mass from `x` to `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportDigraph {
    succ: Vec<Vec<usize>>,
}

impl SupportDigraph {
    /// Builds a digraph from successor lists; lists are sorted and deduplicated.
    pub fn from_successors(mut succ: Vec<Vec<usize>>) -> Self {
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        Self { succ }
    }

    pub fn n(&self) -> usize {
        self.succ.len()
    }

    pub fn successors(&self, x: usize) -> &[usize] {
        &self.succ[x]
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.succ[x].binary_search(&y).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(x, ys)| ys.iter().map(move |&y| (x, y)))
    }

    /// First edge leaving `set`, if any.
    pub fn leaving_edge(&self, set: &StateSet) -> Option<(usize, usize)> {
        set.iter()
            .flat_map(|x| self.succ[x].iter().map(move |&y| (x, y)))
            .find(|&(_, y)| !set.contains(y))
    }

    /// Digraph induced on `set`, relabelled to `0..set.len()`.
    pub fn induced(&self, set: &StateSet) -> Self {
        Self::from_successors(
            set.iter()
                .map(|x| self.succ[x].iter().filter_map(|&y| set.position(y)).collect())
                .collect(),
        )
    }

    /// Strongly connected components (iterative Tarjan), each sorted, listed
    /// in order of smallest element.
    pub fn strongly_connected_components(&self) -> Vec<StateSet> {
        let n = self.n();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comps = Vec::new();
        let mut counter = 0;

        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            // (vertex, next successor position)
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;

            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                if let Some(&w) = self.succ[v].get(*pos) {
                    *pos += 1;
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(StateSet::new(comp));
                }
            }
        }
        comps.sort_by_key(|c| c.first());
        comps
    }

    /// Components with no edge leaving them.
    pub fn terminal_components(&self) -> Vec<StateSet> {
        self.strongly_connected_components()
            .into_iter()
            .filter(|c| self.leaving_edge(c).is_none())
            .collect()
    }

    /// Period (gcd of cycle lengths) of a strongly connected `class`.
    pub fn period(&self, class: &StateSet) -> usize {
        let Some(start) = class.first() else { return 0 };
        let mut level = vec![usize::MAX; self.n()];
        level[start] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        let mut g = 0usize;
        while let Some(v) = queue.pop_front() {
            for &w in &self.succ[v] {
                if !class.contains(w) {
                    continue;
                }
                if level[w] == usize::MAX {
                    level[w] = level[v] + 1;
                    queue.push_back(w);
                } else {
                    let diff = (level[v] + 1).abs_diff(level[w]);
                    g = num_integer::gcd(g, diff);
                }
            }
        }
        g
    }

    /// Smallest forward-closed superset of `set`.
    pub fn forward_closure(&self, set: &StateSet) -> StateSet {
        let mut seen = vec![false; self.n()];
        let mut todo: Vec<usize> = set.iter().collect();
        for &x in &todo {
            seen[x] = true;
        }
        while let Some(x) = todo.pop() {
            for &y in &self.succ[x] {
                if !seen[y] {
                    seen[y] = true;
                    todo.push(y);
                }
            }
        }
        (0..self.n()).filter(|&x| seen[x]).collect()
    }

    /// Graphviz rendering with the given sets drawn as clusters.
    pub fn to_dot(&self, clusters: &[StateSet], labels: Option<&[String]>) -> String {
        let name = |x: usize| match labels {
            Some(l) => format!("\"{}\"", l[x].replace('"', "\\\"")),
            None => format!("\"{x}\""),
        };
        let mut out = String::from("digraph support {\n");
        for (k, c) in clusters.iter().enumerate() {
            out.push_str(&format!(
                "  subgraph cluster_{k} {{\n    label=\"minimal {c}\";\n    style=filled;\n    color=lightgrey;\n"
            ));
            for x in c.iter() {
                out.push_str(&format!("    {};\n", name(x)));
            }
            out.push_str("  }\n");
        }
        for x in 0..self.n() {
            if !clusters.iter().any(|c| c.contains(x)) {
                out.push_str(&format!("  {};\n", name(x)));
            }
        }
        for (x, y) in self.edges() {
            out.push_str(&format!("  {} -> {};\n", name(x), name(y)));
        }
        out.push_str("}\n");
        out
    }
}
