//! Bernoulli vertex sampling baseline.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{laplacian, SymMatrix, WeightedGraph};
use crate::rng;
use crate::spectral::{check_epsilon, lightness_norm, SpectralContext, LIGHTNESS_TOL};

/// Largest `n` accepted by [`expected_laplacian_check`].
pub const MAX_ENUMERATION_N: usize = 16;

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

/// Includes each vertex independently with probability `p`.
///
/// Vertex `v` is kept when the `v`-th uniform draw of the seeded stream is
/// below `p`, so raising `p` under a fixed seed only ever adds vertices.
pub fn bernoulli_sample(g: &WeightedGraph, p: f64, seed: u64) -> Result<Vec<usize>> {
    check_probability(p)?;
    let mut rng = rng::stream(seed);
    Ok((0..g.n()).filter(|_| rng.random::<f64>() < p).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub size: usize,
    pub norm: f64,
    pub success: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingSummary {
    pub success_rate: f64,
    pub mean_size: f64,
    pub mean_norm: f64,
    pub max_norm: f64,
    pub light_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingOutcome {
    pub eps: f64,
    pub seed: u64,
    pub trials: usize,
    /// `⌈ε n / 6⌉`.
    pub size_threshold: usize,
    pub records: Vec<TrialRecord>,
    pub summary: SamplingSummary,
}

/// `trials` independent samples at `p = ε`; success means light and at least `⌈εn/6⌉` vertices.
pub fn sampling_experiment(ctx: &SpectralContext, eps: f64, trials: usize, seed: u64) -> Result<SamplingOutcome> {
    check_epsilon(eps)?;
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let g = ctx.graph();
    let size_threshold = (eps * g.n() as f64 / 6.0 - 1e-9).ceil().max(0.0) as usize;
    let records = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let set = bernoulli_sample(g, eps, rng::derive_seed(seed, &[trial as u64]))?;
            let norm = lightness_norm(ctx, &set)?;
            let success = norm <= eps + LIGHTNESS_TOL && set.len() >= size_threshold;
            Ok(TrialRecord { trial, size: set.len(), norm, success })
        })
        .collect::<Result<Vec<_>>>()?;

    let count = records.len() as f64;
    let summary = SamplingSummary {
        success_rate: records.iter().filter(|r| r.success).count() as f64 / count,
        mean_size: records.iter().map(|r| r.size as f64).sum::<f64>() / count,
        mean_norm: records.iter().map(|r| r.norm).sum::<f64>() / count,
        max_norm: records.iter().map(|r| r.norm).fold(0.0, f64::max),
        light_rate: records.iter().filter(|r| r.norm <= eps + LIGHTNESS_TOL).count() as f64 / count,
    };
    Ok(SamplingOutcome { eps, seed, trials, size_threshold, records, summary })
}

/// Exact `Σ_S Pr(S) L_S` over all `2ⁿ` subsets.
pub fn expected_induced_laplacian(g: &WeightedGraph, p: f64) -> Result<SymMatrix> {
    check_probability(p)?;
    let n = g.n();
    if n > MAX_ENUMERATION_N {
        return Err(Error::TooLargeForEnumeration { n, max: MAX_ENUMERATION_N });
    }
    // Per-edge survival mass, accumulated subset by subset.
    let mut survival = vec![0.0; g.edge_count()];
    for mask in 0u32..(1u32 << n) {
        let size = mask.count_ones() as i32;
        let prob = p.powi(size) * (1.0 - p).powi(n as i32 - size);
        if prob == 0.0 {
            continue;
        }
        for (idx, e) in g.edges().iter().enumerate() {
            if mask >> e.u & 1 == 1 && mask >> e.v & 1 == 1 {
                survival[idx] += prob;
            }
        }
    }
    let mut expected = SymMatrix::zeros(n);
    for (e, mass) in g.edges().iter().zip(&survival) {
        expected.add_edge_term(e.u, e.v, e.weight * mass);
    }
    Ok(expected)
}

/// Max-abs entry of `E[L_S] − p² L`.
pub fn expected_laplacian_check(g: &WeightedGraph, p: f64) -> Result<f64> {
    let expected = expected_induced_laplacian(g, p)?;
    let target = SymMatrix::from_matrix(laplacian(g).into_inner() * (p * p));
    Ok(expected.max_abs_diff(&target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_family, Family, FamilySpec};

    #[test]
    fn extreme_probabilities() {
        let g = generate_family(&FamilySpec::new(Family::Path { n: 10 })).unwrap();
        assert!(bernoulli_sample(&g, 0.0, 3).unwrap().is_empty());
        assert_eq!(bernoulli_sample(&g, 1.0, 3).unwrap(), (0..10).collect::<Vec<_>>());
        assert!(matches!(bernoulli_sample(&g, 1.5, 3), Err(Error::InvalidProbability(_))));
        assert!(matches!(bernoulli_sample(&g, -0.1, 3), Err(Error::InvalidProbability(_))));
    }

    #[test]
    fn single_edge_expectation() {
        let g = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        assert!(expected_laplacian_check(&g, 0.5).unwrap() <= 1e-12);
        let e = expected_induced_laplacian(&g, 0.5).unwrap();
        assert!((e.get(0, 0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn full_probability_is_exact() {
        let g = generate_family(&FamilySpec::new(Family::Barbell { n: 7 })).unwrap();
        assert_eq!(expected_laplacian_check(&g, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn enumeration_limit() {
        let g = generate_family(&FamilySpec::new(Family::Path { n: 17 })).unwrap();
        assert!(matches!(
            expected_laplacian_check(&g, 0.5),
            Err(Error::TooLargeForEnumeration { n: 17, .. })
        ));
    }

    #[test]
    fn edgeless_graph_is_always_light() {
        // εn/6 = 0.95 rounds up to a floor of one vertex; only empty draws fail.
        let g = WeightedGraph::new(19, []).unwrap();
        let ctx = SpectralContext::new(&g).unwrap();
        let out = sampling_experiment(&ctx, 0.3, 200, 11).unwrap();
        assert_eq!(out.size_threshold, 1);
        assert_eq!(out.summary.light_rate, 1.0);
        assert!(out.records.iter().all(|r| r.norm == 0.0 && r.success == (r.size >= 1)));
    }

    #[test]
    fn experiment_is_deterministic() {
        let g = generate_family(&FamilySpec::new(Family::Complete { n: 12 })).unwrap();
        let ctx = SpectralContext::new(&g).unwrap();
        let a = sampling_experiment(&ctx, 0.3, 40, 5).unwrap();
        let b = sampling_experiment(&ctx, 0.3, 40, 5).unwrap();
        assert_eq!(a, b);
        assert!(matches!(sampling_experiment(&ctx, 0.3, 0, 5), Err(Error::InvalidConfig(_))));
    }
}
