//! Weighted undirected graphs, their Laplacians, and the benchmark families.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// An undirected edge `{u, v}` with `u < v` and positive weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

impl Edge {
    pub fn endpoints(&self) -> (usize, usize) {
        (self.u, self.v)
    }

    /// The endpoint opposite to `x`, if `x` is an endpoint.
    pub fn other(&self, x: usize) -> Option<usize> {
        if x == self.u {
            Some(self.v)
        } else if x == self.v {
            Some(self.u)
        } else {
            None
        }
    }
}

/// A finite undirected graph with strictly positive edge weights.
///
/// Edges are stored in canonical order: each edge has `u < v` and the list is
/// sorted lexicographically by `(u, v)`. Graphs are immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl WeightedGraph {
    /// Builds a graph from `(u, v, w)` triples given in any orientation.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::DegenerateGraph("graph must have at least one vertex".into()));
        }
        let mut canon = Vec::new();
        for (a, b, w) in edges {
            for idx in [a, b] {
                if idx >= n {
                    return Err(Error::IndexOutOfRange { index: idx, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::NonPositiveWeight { u, v, weight: w });
            }
            canon.push(Edge { u, v, weight: w });
        }
        canon.sort_by_key(|e| (e.u, e.v));
        if let Some(pair) = canon.windows(2).find(|p| p[0].endpoints() == p[1].endpoints()) {
            return Err(Error::DuplicateEdge { u: pair[0].u, v: pair[0].v });
        }
        let mut adjacency = vec![Vec::new(); n];
        for (idx, e) in canon.iter().enumerate() {
            adjacency[e.u].push((e.v, idx));
            adjacency[e.v].push((e.u, idx));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self { n, edges: canon, adjacency })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbours of `v` as `(neighbour, edge index)` pairs, sorted by neighbour.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn weighted_degree(&self, v: usize) -> f64 {
        self.adjacency[v].iter().map(|&(_, e)| self.edges[e].weight).sum()
    }

    /// Index of edge `{u, v}` in [`edges`](Self::edges).
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        if u >= self.n || v >= self.n {
            return None;
        }
        self.adjacency[u]
            .binary_search_by_key(&v, |&(x, _)| x)
            .ok()
            .map(|pos| self.adjacency[u][pos].1)
    }

    /// Number of connected components, by union-find.
    pub fn component_count(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = self.n;
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
            if a != b {
                parent[a.max(b)] = a.min(b);
                components -= 1;
            }
        }
        components
    }

    /// Membership mask for a vertex set, rejecting out-of-range indices.
    pub fn membership(&self, set: &[usize]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.n];
        for &v in set {
            if v >= self.n {
                return Err(Error::IndexOutOfRange { index: v, n: self.n });
            }
            mask[v] = true;
        }
        Ok(mask)
    }

    /// Indices of edges with both endpoints in `set`.
    pub fn internal_edges(&self, set: &[usize]) -> Result<Vec<usize>> {
        let mask = self.membership(set)?;
        Ok(self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| mask[e.u] && mask[e.v])
            .map(|(i, _)| i)
            .collect())
    }
}

/// Dense symmetric matrix, symmetric by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    /// Wraps `m`, symmetrising it as `(m + mᵀ) / 2`.
    pub fn from_matrix(m: DMatrix<f64>) -> Self {
        assert!(m.is_square(), "symmetric matrix must be square");
        let t = m.transpose();
        Self((m + t) * 0.5)
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// Adds `w (e_u − e_v)(e_u − e_v)ᵀ`.
    pub fn add_edge_term(&mut self, u: usize, v: usize, w: f64) {
        self.0[(u, u)] += w;
        self.0[(v, v)] += w;
        self.0[(u, v)] -= w;
        self.0[(v, u)] -= w;
    }

    /// Adds `w · y yᵀ`.
    pub fn add_outer(&mut self, y: &DVector<f64>, w: f64) {
        self.0.ger(w, y, y, 1.0);
    }

    pub fn quadratic_form(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.0 * x))
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.order() == 0 {
            return Vec::new();
        }
        let mut ev: Vec<f64> = SymmetricEigen::new(self.0.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        (&self.0 - &other.0).abs().max()
    }
}

impl std::ops::Sub for &SymMatrix {
    type Output = SymMatrix;

    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 - &rhs.0)
    }
}

/// `L = Σ_e w_e (e_u − e_v)(e_u − e_v)ᵀ`.
pub fn laplacian(g: &WeightedGraph) -> SymMatrix {
    let mut l = SymMatrix::zeros(g.n());
    for e in g.edges() {
        l.add_edge_term(e.u, e.v, e.weight);
    }
    l
}

/// Laplacian of the subgraph induced by `set`, embedded in `n × n` with zeros elsewhere.
pub fn induced_laplacian(g: &WeightedGraph, set: &[usize]) -> Result<SymMatrix> {
    let mut l = SymMatrix::zeros(g.n());
    for idx in g.internal_edges(set)? {
        let e = g.edges()[idx];
        l.add_edge_term(e.u, e.v, e.weight);
    }
    Ok(l)
}

/// Graph families used by the benchmark suite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    Complete { n: usize },
    Cycle { n: usize },
    /// Cliques on ⌈n/2⌉ and ⌊n/2⌋ vertices joined by one edge.
    Barbell { n: usize },
    /// Cliques on ⌊n/2⌋ and ⌈n/2⌉ vertices, no edge between them.
    DisjointCliques { n: usize },
    ErdosRenyi { n: usize, p: f64 },
    CompleteBipartite { a: usize, b: usize },
    Path { n: usize },
    Grid { rows: usize, cols: usize },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Complete { .. } => "complete",
            Family::Cycle { .. } => "cycle",
            Family::Barbell { .. } => "barbell",
            Family::DisjointCliques { .. } => "disjoint-cliques",
            Family::ErdosRenyi { .. } => "erdos-renyi",
            Family::CompleteBipartite { .. } => "complete-bipartite",
            Family::Path { .. } => "path",
            Family::Grid { .. } => "grid",
        }
    }

    pub fn vertex_count(&self) -> usize {
        match *self {
            Family::Complete { n }
            | Family::Cycle { n }
            | Family::Barbell { n }
            | Family::DisjointCliques { n }
            | Family::ErdosRenyi { n, .. }
            | Family::Path { n } => n,
            Family::CompleteBipartite { a, b } => a + b,
            Family::Grid { rows, cols } => rows * cols,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::ErdosRenyi { n, p } => write!(f, "erdos-renyi(n={n}, p={p})"),
            Family::CompleteBipartite { a, b } => write!(f, "complete-bipartite({a}, {b})"),
            Family::Grid { rows, cols } => write!(f, "grid({rows}x{cols})"),
            other => write!(f, "{}({})", other.name(), other.vertex_count()),
        }
    }
}

/// A family instance plus the seed and uniform edge weight used to build it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

impl FamilySpec {
    pub fn new(family: Family) -> Self {
        Self { family, seed: 0, weight: 1.0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }
}

fn clique(offset: usize, size: usize, out: &mut Vec<(usize, usize)>) {
    for i in 0..size {
        for j in i + 1..size {
            out.push((offset + i, offset + j));
        }
    }
}

pub fn generate_family(spec: &FamilySpec) -> Result<WeightedGraph> {
    let bad = |msg: String| Err(Error::InvalidFamilyParams(msg));
    if !(spec.weight.is_finite() && spec.weight > 0.0) {
        return bad(format!("weight must be positive and finite, got {}", spec.weight));
    }
    let mut pairs = Vec::new();
    let n = spec.family.vertex_count();
    match spec.family {
        Family::Complete { n } => {
            if n < 1 {
                return bad("complete graph needs n >= 1".into());
            }
            clique(0, n, &mut pairs);
        }
        Family::Cycle { n } => {
            if n < 3 {
                return bad(format!("cycle needs n >= 3, got {n}"));
            }
            pairs.extend((0..n).map(|i| (i, (i + 1) % n)));
        }
        Family::Path { n } => {
            if n < 1 {
                return bad("path needs n >= 1".into());
            }
            pairs.extend((1..n).map(|i| (i - 1, i)));
        }
        Family::Barbell { n } => {
            if n < 2 {
                return bad(format!("barbell needs n >= 2, got {n}"));
            }
            let left = n.div_ceil(2);
            clique(0, left, &mut pairs);
            clique(left, n - left, &mut pairs);
            pairs.push((left - 1, left));
        }
        Family::DisjointCliques { n } => {
            if n < 2 {
                return bad(format!("disjoint cliques need n >= 2, got {n}"));
            }
            let first = n / 2;
            clique(0, first, &mut pairs);
            clique(first, n - first, &mut pairs);
        }
        Family::ErdosRenyi { n, p } => {
            if n < 1 {
                return bad("erdos-renyi needs n >= 1".into());
            }
            if !(p > 0.0 && p < 1.0) {
                return bad(format!("edge probability must lie in (0, 1), got {p}"));
            }
            let mut rng = rng::stream(spec.seed);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.random::<f64>() < p {
                        pairs.push((u, v));
                    }
                }
            }
        }
        Family::CompleteBipartite { a, b } => {
            if a < 1 || b < 1 {
                return bad(format!("complete bipartite needs both sides >= 1, got ({a}, {b})"));
            }
            for u in 0..a {
                pairs.extend((a..a + b).map(|v| (u, v)));
            }
        }
        Family::Grid { rows, cols } => {
            if rows < 1 || cols < 1 {
                return bad(format!("grid needs rows, cols >= 1, got {rows}x{cols}"));
            }
            for r in 0..rows {
                for c in 0..cols {
                    let v = r * cols + c;
                    if c + 1 < cols {
                        pairs.push((v, v + 1));
                    }
                    if r + 1 < rows {
                        pairs.push((v, v + cols));
                    }
                }
            }
        }
    }
    WeightedGraph::new(n, pairs.into_iter().map(|(u, v)| (u, v, spec.weight)))
}

/// Sorted, deduplicated copy of a vertex list.
pub fn normalize_set(set: &[usize]) -> Vec<usize> {
    set.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
}
