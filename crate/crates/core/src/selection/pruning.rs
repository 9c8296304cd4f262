//! Candidate-set construction ahead of the barrier greedy.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::graph::WeightedGraph;
use crate::spectral::LeverageProfile;

/// Leverage degree `ℓ_v` for each vertex of a candidate set.
pub type LeverageDegrees = BTreeMap<usize, f64>;

/// Edges with `τ_e > ε`, as `[u, v]` pairs in canonical order.
pub fn heavy_edge_set(profile: &LeverageProfile, eps: f64) -> Vec<[usize; 2]> {
    profile
        .entries
        .iter()
        .filter(|e| e.tau > eps)
        .map(|e| e.edge)
        .collect()
}

/// `n² / (2m + n)`.
pub fn turan_bound(n: usize, m: usize) -> f64 {
    let n = n as f64;
    n * n / (2.0 * m as f64 + n)
}

/// Independent set of the graph on `n` vertices with edge list `heavy`.
///
/// Min-degree greedy: take a vertex of least remaining degree (smallest index
/// on ties), delete it with its neighbourhood, repeat. The result is maximal
/// and has at least `Σ_v 1/(d_v + 1) ≥ n²/(2m + n)` vertices.
pub fn turan_independent_set(n: usize, heavy: &[[usize; 2]]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &[u, v] in heavy {
        if u != v && u < n && v < n {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut chosen = Vec::new();
    while let Some(v) = (0..n).filter(|&v| alive[v]).min_by_key(|&v| (degree[v], v)) {
        chosen.push(v);
        let mut removed = vec![v];
        removed.extend(adj[v].iter().copied().filter(|&u| alive[u]));
        for &x in &removed {
            alive[x] = false;
        }
        for &x in &removed {
            for &y in &adj[x] {
                if alive[y] {
                    degree[y] -= 1;
                }
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

/// `ℓ_v = Σ_{u ~ v, u ∈ I} τ_uv` for every `v ∈ I`.
pub fn leverage_degrees(profile: &LeverageProfile, g: &WeightedGraph, set: &[usize]) -> Result<LeverageDegrees> {
    let mask = g.membership(set)?;
    let mut degrees: LeverageDegrees = set.iter().map(|&v| (v, 0.0)).collect();
    for (idx, e) in g.edges().iter().enumerate() {
        if mask[e.u] && mask[e.v] {
            let tau = profile.tau(idx);
            *degrees.get_mut(&e.u).expect("member") += tau;
            *degrees.get_mut(&e.v).expect("member") += tau;
        }
    }
    Ok(degrees)
}

/// Keeps `v ∈ I` with `ℓ_v ≤ c_lev / ε`.
pub fn leverage_filter(set: &[usize], degrees: &LeverageDegrees, eps: f64, c_lev: f64) -> Vec<usize> {
    let threshold = c_lev / eps;
    set.iter()
        .copied()
        .filter(|v| degrees.get(v).copied().unwrap_or(0.0) <= threshold)
        .collect()
}

/// Vertices sorted by ascending leverage degree, smallest index first on ties.
pub fn min_ell_order(set: &[usize], degrees: &LeverageDegrees) -> Vec<usize> {
    let mut order: Vec<usize> = set.to_vec();
    order.sort_by(|a, b| {
        let la = degrees.get(a).copied().unwrap_or(0.0);
        let lb = degrees.get(b).copied().unwrap_or(0.0);
        la.total_cmp(&lb).then(a.cmp(b))
    });
    order.dedup();
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_family, Family, FamilySpec};
    use crate::spectral::{leverage_profile, SpectralContext};

    fn profile_of(f: Family) -> (WeightedGraph, LeverageProfile) {
        let g = generate_family(&FamilySpec::new(f)).unwrap();
        let p = leverage_profile(&SpectralContext::new(&g).unwrap());
        (g, p)
    }

    fn is_independent(set: &[usize], edges: &[[usize; 2]]) -> bool {
        edges.iter().all(|[u, v]| !(set.contains(u) && set.contains(v)))
    }

    #[test]
    fn heavy_edges_examples() {
        let (_, k20) = profile_of(Family::Complete { n: 20 });
        assert!(heavy_edge_set(&k20, 0.3).is_empty());

        let (_, tree) = profile_of(Family::Path { n: 7 });
        assert_eq!(heavy_edge_set(&tree, 0.5).len(), 6);

        let (_, k4) = profile_of(Family::Complete { n: 4 });
        assert!(heavy_edge_set(&k4, 0.5).is_empty());
        assert_eq!(heavy_edge_set(&k4, 0.49).len(), 6);
        assert_eq!(heavy_edge_set(&k4, 0.4).len(), 6);
    }

    #[test]
    fn turan_examples() {
        assert_eq!(turan_independent_set(10, &[]), (0..10).collect::<Vec<_>>());

        let k5: Vec<[usize; 2]> = (0..5).flat_map(|u| (u + 1..5).map(move |v| [u, v])).collect();
        assert_eq!(turan_independent_set(5, &k5).len(), 1);

        let c5: Vec<[usize; 2]> = (0..5).map(|i| [i, (i + 1) % 5]).collect();
        let i0 = turan_independent_set(5, &c5);
        assert_eq!(i0.len(), 2);
        assert!(is_independent(&i0, &c5));
    }

    #[test]
    fn turan_meets_bound_on_star() {
        // Star K_{1,6}: greedy takes all leaves.
        let star: Vec<[usize; 2]> = (1..7).map(|v| [0, v]).collect();
        let i0 = turan_independent_set(7, &star);
        assert_eq!(i0, vec![1, 2, 3, 4, 5, 6]);
        assert!(i0.len() as f64 >= turan_bound(7, 6));
    }

    #[test]
    fn leverage_degree_examples() {
        let (g, k4) = profile_of(Family::Complete { n: 4 });
        let single = leverage_degrees(&k4, &g, &[2]).unwrap();
        assert_eq!(single[&2], 0.0);
        let all = leverage_degrees(&k4, &g, &[0, 1, 2, 3]).unwrap();
        assert!(all.values().all(|&l| (l - 1.5).abs() < 1e-12));
        assert!(leverage_degrees(&k4, &g, &[4]).is_err());
    }

    #[test]
    fn filter_examples() {
        let (g, k60) = profile_of(Family::Complete { n: 60 });
        let all: Vec<usize> = (0..60).collect();
        let deg = leverage_degrees(&k60, &g, &all).unwrap();
        assert!(deg.values().all(|&l| (l - 59.0 * (2.0 / 60.0)).abs() < 1e-10));
        assert_eq!(leverage_filter(&all, &deg, 0.3, 8.0), all);
        assert_eq!(leverage_filter(&all, &deg, 1e-6, 8.0), all);

        let mut skewed = LeverageDegrees::new();
        skewed.insert(0, 1.0);
        skewed.insert(1, 30.0);
        assert_eq!(leverage_filter(&[0, 1], &skewed, 0.3, 8.0), vec![0]);
    }

    #[test]
    fn min_ell_examples() {
        let mut d = LeverageDegrees::new();
        d.insert(0, 3.0);
        d.insert(1, 1.0);
        d.insert(2, 2.0);
        assert_eq!(min_ell_order(&[0, 1, 2], &d), vec![1, 2, 0]);

        let equal: LeverageDegrees = (0..4).map(|v| (v, 0.7)).collect();
        assert_eq!(min_ell_order(&[3, 1, 0, 2], &equal), vec![0, 1, 2, 3]);
    }
}
