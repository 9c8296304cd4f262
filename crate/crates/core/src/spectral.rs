//! Pseudoinverse geometry of a graph Laplacian.
//!
//! Everything here is dense: the Laplacian is fully eigendecomposed once and
//! `L⁺`, `L^{+/2}` and the projector onto `im(L)` are assembled from the
//! nonzero eigenpairs. In the normalized coordinates `x ↦ L^{+/2} x` an edge
//! becomes the rank-one matrix `X_e = w_e L^{+/2} b_e b_eᵀ L^{+/2}`, and a
//! vertex set `S` is ε-light exactly when `‖Σ_{e ⊆ S} X_e‖ ≤ ε`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{laplacian, SymMatrix, WeightedGraph};

/// Eigenvalues at or below `KERNEL_RTOL · λ_max` are treated as exact zeros.
pub const KERNEL_RTOL: f64 = 1e-9;

/// Slack allowed on the `‖M_S‖ ≤ ε` comparison.
pub const LIGHTNESS_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct SpectralContext {
    graph: WeightedGraph,
    laplacian: SymMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    rank: usize,
    components: usize,
    kernel_threshold: f64,
    pinv: DMatrix<f64>,
    pinv_sqrt: DMatrix<f64>,
    projector: DMatrix<f64>,
}

impl SpectralContext {
    pub fn new(g: &WeightedGraph) -> Result<Self> {
        let n = g.n();
        if n == 0 {
            return Err(Error::DegenerateGraph("graph has no vertices".into()));
        }
        let lap = laplacian(g);
        let eig = SymmetricEigen::new(lap.as_matrix().clone());

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let lambda_max = eig.eigenvalues[order[0]].max(0.0);
        let kernel_threshold = KERNEL_RTOL * lambda_max;

        let mut eigenvalues = Vec::with_capacity(n);
        let mut eigenvectors = DMatrix::zeros(n, n);
        for (col, &src) in order.iter().enumerate() {
            let lam = eig.eigenvalues[src];
            eigenvalues.push(if lam <= kernel_threshold { 0.0 } else { lam });
            eigenvectors.set_column(col, &eig.eigenvectors.column(src));
        }
        let rank = eigenvalues.iter().take_while(|&&l| l > 0.0).count();
        let components = g.component_count();
        if n - rank != components {
            return Err(Error::KernelMismatch {
                kernel_dim: n - rank,
                components,
                threshold: kernel_threshold,
            });
        }

        let basis = eigenvectors.columns(0, rank);
        let scaled = |f: &dyn Fn(f64) -> f64| {
            let mut b = basis.clone_owned();
            for (j, mut col) in b.column_iter_mut().enumerate() {
                col *= f(eigenvalues[j]);
            }
            &b * basis.transpose()
        };
        let pinv = symmetrize(scaled(&|l| 1.0 / l));
        let pinv_sqrt = symmetrize(scaled(&|l| 1.0 / l.sqrt()));
        let projector = symmetrize(scaled(&|_| 1.0));

        Ok(Self {
            graph: g.clone(),
            laplacian: lap,
            eigenvalues,
            eigenvectors,
            rank,
            components,
            kernel_threshold,
            pinv,
            pinv_sqrt,
            projector,
        })
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn laplacian(&self) -> &SymMatrix {
        &self.laplacian
    }

    /// Eigenvalues in descending order, kernel entries clamped to exactly zero.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors as columns, matching [`eigenvalues`](Self::eigenvalues).
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// `n × rank` orthonormal basis of `im(L)`.
    pub fn image_basis(&self) -> DMatrix<f64> {
        self.eigenvectors.columns(0, self.rank).clone_owned()
    }

    /// Dimension of `im(L)`, i.e. `n − k`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn kernel_threshold(&self) -> f64 {
        self.kernel_threshold
    }

    pub fn pinv(&self) -> &DMatrix<f64> {
        &self.pinv
    }

    pub fn pinv_sqrt(&self) -> &DMatrix<f64> {
        &self.pinv_sqrt
    }

    /// Orthogonal projector onto `im(L)`.
    pub fn projector(&self) -> &DMatrix<f64> {
        &self.projector
    }

    /// `√w_e · L^{+/2} b_e`, so that `X_e = y yᵀ`.
    pub fn edge_vector(&self, edge: usize) -> DVector<f64> {
        let e = self.graph.edges()[edge];
        (self.pinv_sqrt.column(e.u) - self.pinv_sqrt.column(e.v)) * e.weight.sqrt()
    }

    /// `τ_e = w_e b_eᵀ L⁺ b_e`.
    pub fn leverage(&self, edge: usize) -> f64 {
        let e = self.graph.edges()[edge];
        let p = &self.pinv;
        e.weight * (p[(e.u, e.u)] + p[(e.v, e.v)] - 2.0 * p[(e.u, e.v)])
    }

    /// `Σ_{e ∈ edges} X_e`.
    pub fn accumulate(&self, edges: impl IntoIterator<Item = usize>) -> SymMatrix {
        let mut m = SymMatrix::zeros(self.n());
        for idx in edges {
            m.add_outer(&self.edge_vector(idx), 1.0);
        }
        m
    }

    /// `M_S = L^{+/2} L_S L^{+/2}`.
    pub fn normalized_induced(&self, set: &[usize]) -> Result<SymMatrix> {
        Ok(self.accumulate(self.graph.internal_edges(set)?))
    }
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}

pub fn spectral_context(g: &WeightedGraph) -> Result<SpectralContext> {
    SpectralContext::new(g)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeverageEntry {
    pub edge: [usize; 2],
    pub tau: f64,
}

/// Per-edge leverage scores, in the graph's canonical edge order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeverageProfile {
    pub entries: Vec<LeverageEntry>,
    pub total: f64,
    /// `n − k`, the value Foster's theorem predicts for `total`.
    pub expected_total: usize,
}

impl LeverageProfile {
    pub fn tau(&self, edge: usize) -> f64 {
        self.entries[edge].tau
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn foster_error(&self) -> f64 {
        (self.total - self.expected_total as f64).abs()
    }
}

pub fn leverage_profile(ctx: &SpectralContext) -> LeverageProfile {
    let entries: Vec<LeverageEntry> = ctx
        .graph()
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| LeverageEntry { edge: [e.u, e.v], tau: ctx.leverage(i) })
        .collect();
    let total = entries.iter().map(|e| e.tau).sum();
    LeverageProfile { entries, total, expected_total: ctx.rank() }
}

/// `X_e` for one edge, with its leverage score.
#[derive(Clone, Debug)]
pub struct NormalizedEdgeMatrix {
    pub edge: [usize; 2],
    pub matrix: SymMatrix,
    pub tau: f64,
}

pub fn normalized_edge_matrix(ctx: &SpectralContext, u: usize, v: usize) -> Result<NormalizedEdgeMatrix> {
    let idx = ctx.graph().edge_index(u, v).ok_or(Error::EdgeNotInGraph { u, v })?;
    let e = ctx.graph().edges()[idx];
    Ok(NormalizedEdgeMatrix {
        edge: [e.u, e.v],
        matrix: ctx.accumulate([idx]),
        tau: ctx.leverage(idx),
    })
}

/// Top eigenpair of a symmetric matrix; `None` for the empty matrix.
pub(crate) fn top_eigenpair(m: &DMatrix<f64>) -> Option<(f64, DVector<f64>)> {
    if m.nrows() == 0 {
        return None;
    }
    let eig = SymmetricEigen::new(m.clone());
    let (i, &lam) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    Some((lam, eig.eigenvectors.column(i).clone_owned()))
}

/// `λ_max(L^{+/2} L_S L^{+/2})`; exactly zero when `S` spans no edge.
pub fn lightness_norm(ctx: &SpectralContext, set: &[usize]) -> Result<f64> {
    let internal = ctx.graph().internal_edges(set)?;
    if internal.is_empty() {
        return Ok(0.0);
    }
    Ok(ctx.accumulate(internal).max_eigenvalue().max(0.0))
}

#[derive(Clone, Debug, Serialize)]
pub struct LightnessVerdict {
    pub light: bool,
    pub norm: f64,
    /// A vector with `xᵀ L_S x > ε xᵀ L x`, present when the set is not light.
    pub witness: Option<Vec<f64>>,
}

pub fn is_epsilon_light(ctx: &SpectralContext, set: &[usize], eps: f64) -> Result<LightnessVerdict> {
    check_epsilon(eps)?;
    let internal = ctx.graph().internal_edges(set)?;
    if internal.is_empty() {
        return Ok(LightnessVerdict { light: true, norm: 0.0, witness: None });
    }
    let m = ctx.accumulate(internal);
    let (norm, top) = top_eigenpair(m.as_matrix()).expect("n >= 1");
    let norm = norm.max(0.0);
    let light = norm <= eps + LIGHTNESS_TOL;
    let witness = (!light).then(|| {
        let x = ctx.pinv_sqrt() * top;
        (&x / x.norm()).iter().copied().collect()
    });
    Ok(LightnessVerdict { light, norm, witness })
}

/// `λ_min(Σ_{v ∈ S} A_v − M_S)` with `A_v = ½ Σ_{u ~ v} X_uv`.
pub fn star_domination_gap(ctx: &SpectralContext, set: &[usize]) -> Result<f64> {
    let g = ctx.graph();
    let mask = g.membership(set)?;
    if !mask.iter().any(|&m| m) {
        return Ok(0.0);
    }
    let mut diff = SymMatrix::zeros(g.n());
    for (idx, e) in g.edges().iter().enumerate() {
        let stars = f64::from(u8::from(mask[e.u]) + u8::from(mask[e.v])) * 0.5;
        let internal = if mask[e.u] && mask[e.v] { 1.0 } else { 0.0 };
        let coeff = stars - internal;
        if coeff != 0.0 {
            diff.add_outer(&ctx.edge_vector(idx), coeff);
        }
    }
    Ok(diff.min_eigenvalue())
}

pub(crate) fn check_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(eps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_family, Family, FamilySpec};

    fn family(f: Family) -> WeightedGraph {
        generate_family(&FamilySpec::new(f)).unwrap()
    }

    #[test]
    fn single_edge_spectrum() {
        // L = [[1,-1],[-1,1]] has eigenpairs (2, (1,-1)/√2) and (0, (1,1)/√2),
        // so L⁺ = (1/2)·vvᵀ = L/4.
        let g = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        let ctx = SpectralContext::new(&g).unwrap();
        assert!((ctx.eigenvalues()[0] - 2.0).abs() < 1e-12);
        assert_eq!(ctx.eigenvalues()[1], 0.0);
        let expected = ctx.laplacian().as_matrix() / 4.0;
        assert!((ctx.pinv() - expected).abs().max() < 1e-12);
    }

    #[test]
    fn complete_graph_spectrum() {
        let ctx = SpectralContext::new(&family(Family::Complete { n: 7 })).unwrap();
        assert_eq!(ctx.rank(), 6);
        for &l in &ctx.eigenvalues()[..6] {
            assert!((l - 7.0).abs() < 1e-10);
        }
    }

    #[test]
    fn disjoint_cliques_have_two_kernel_vectors() {
        let ctx = SpectralContext::new(&family(Family::DisjointCliques { n: 8 })).unwrap();
        assert_eq!(ctx.components(), 2);
        assert_eq!(ctx.eigenvalues().iter().filter(|&&l| l == 0.0).count(), 2);
    }

    #[test]
    fn edgeless_graph_is_all_kernel() {
        let g = WeightedGraph::new(3, []).unwrap();
        let ctx = SpectralContext::new(&g).unwrap();
        assert_eq!(ctx.rank(), 0);
        assert_eq!(ctx.components(), 3);
        assert_eq!(lightness_norm(&ctx, &[0, 1, 2]).unwrap(), 0.0);
        assert!(leverage_profile(&ctx).is_empty());
    }

    #[test]
    fn moore_penrose_identities() {
        let g = family(Family::Barbell { n: 9 });
        let ctx = SpectralContext::new(&g).unwrap();
        let l = ctx.laplacian().as_matrix();
        let p = ctx.pinv();
        assert!((p * l * p - p).abs().max() < 1e-8);
        assert!((l * p * l - l).abs().max() < 1e-8);
        assert!((ctx.pinv_sqrt() * ctx.pinv_sqrt() - p).abs().max() < 1e-8);
    }

    #[test]
    fn leverage_examples() {
        let k4 = leverage_profile(&SpectralContext::new(&family(Family::Complete { n: 4 })).unwrap());
        assert!(k4.entries.iter().all(|e| (e.tau - 0.5).abs() < 1e-12));
        assert!((k4.total - 3.0).abs() < 1e-12);

        let tree = leverage_profile(&SpectralContext::new(&family(Family::Path { n: 6 })).unwrap());
        assert!(tree.entries.iter().all(|e| (e.tau - 1.0).abs() < 1e-10));

        // C4: each edge in parallel with a 3-edge path, R_eff = 1·3/(1+3).
        let c4 = leverage_profile(&SpectralContext::new(&family(Family::Cycle { n: 4 })).unwrap());
        assert!(c4.entries.iter().all(|e| (e.tau - 0.75).abs() < 1e-12));
        assert!((c4.total - 3.0).abs() < 1e-12);
    }

    #[test]
    fn normalized_edge_matrix_examples() {
        let g = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        let ctx = SpectralContext::new(&g).unwrap();
        let x = normalized_edge_matrix(&ctx, 1, 0).unwrap();
        assert!((x.matrix.trace() - 1.0).abs() < 1e-12);

        let ctx4 = SpectralContext::new(&family(Family::Complete { n: 4 })).unwrap();
        let x = normalized_edge_matrix(&ctx4, 0, 3).unwrap();
        assert!((x.matrix.trace() - 0.5).abs() < 1e-12);
        assert!((x.tau - 0.5).abs() < 1e-12);
        let ev = x.matrix.eigenvalues();
        assert!(ev[ev.len() - 2].abs() < 1e-9);

        let path = SpectralContext::new(&family(Family::Path { n: 3 })).unwrap();
        assert!(matches!(
            normalized_edge_matrix(&path, 0, 2),
            Err(Error::EdgeNotInGraph { u: 0, v: 2 })
        ));
    }

    #[test]
    fn lightness_on_complete_graphs() {
        let k6 = SpectralContext::new(&family(Family::Complete { n: 6 })).unwrap();
        assert!((lightness_norm(&k6, &[0, 2, 4]).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(lightness_norm(&k6, &[]).unwrap(), 0.0);

        let k10 = SpectralContext::new(&family(Family::Complete { n: 10 })).unwrap();
        assert!((lightness_norm(&k10, &[3, 7]).unwrap() - 0.2).abs() < 1e-12);

        let v = is_epsilon_light(&k10, &[3, 7], 0.25).unwrap();
        assert!(v.light && v.witness.is_none());
        assert!((v.norm - 0.2).abs() < 1e-12);

        let v = is_epsilon_light(&k10, &[1, 2, 3], 0.25).unwrap();
        assert!(!v.light);
        assert!((v.norm - 0.3).abs() < 1e-12);
        let x = DVector::from_vec(v.witness.unwrap());
        let ls = crate::graph::induced_laplacian(k10.graph(), &[1, 2, 3]).unwrap();
        assert!(ls.quadratic_form(&x) > 0.25 * k10.laplacian().quadratic_form(&x));
    }

    #[test]
    fn sets_without_internal_edges_are_light() {
        let c = SpectralContext::new(&family(Family::Cycle { n: 8 })).unwrap();
        let v = is_epsilon_light(&c, &[0, 2, 4, 6], 0.999999).unwrap();
        assert!(v.light);
        assert_eq!(v.norm, 0.0);
        assert!(matches!(is_epsilon_light(&c, &[0], 1.0), Err(Error::InvalidEpsilon(_))));
        assert!(matches!(is_epsilon_light(&c, &[0], 0.0), Err(Error::InvalidEpsilon(_))));
    }

    #[test]
    fn star_domination_examples() {
        let k6 = SpectralContext::new(&family(Family::Complete { n: 6 })).unwrap();
        assert_eq!(star_domination_gap(&k6, &[]).unwrap(), 0.0);
        assert!(star_domination_gap(&k6, &[0, 1, 2]).unwrap() >= -1e-9);
    }
}
