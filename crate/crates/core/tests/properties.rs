use std::collections::BTreeMap;

use nalgebra::DVector;
use proptest::prelude::*;

use lightset::graph::{induced_laplacian, laplacian, SymMatrix, WeightedGraph};
use lightset::sampling::bernoulli_sample;
use lightset::selection::barrier::{barrier_step, dbar, BarrierState, Policy, StepOutcome};
use lightset::selection::pruning::{leverage_degrees, min_ell_order, turan_bound, turan_independent_set};
use lightset::selection::qpoly::QPolynomial;
use lightset::spectral::{is_epsilon_light, leverage_profile, lightness_norm, star_domination_gap, SpectralContext};

/// Random weighted graph on 2..=max_n vertices.
fn graph(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (2..=max_n)
        .prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            (Just(n), prop::collection::vec(prop::option::weighted(0.45, 0.1f64..4.0), pairs))
        })
        .prop_map(|(n, slots)| {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if let Some(w) = slots[k] {
                        edges.push((u, v, w));
                    }
                    k += 1;
                }
            }
            WeightedGraph::new(n, edges).unwrap()
        })
}

fn graph_and_mask(max_n: usize) -> impl Strategy<Value = (WeightedGraph, Vec<bool>)> {
    graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), prop::collection::vec(any::<bool>(), n))
    })
}

fn members(mask: &[bool]) -> Vec<usize> {
    (0..mask.len()).filter(|&i| mask[i]).collect()
}

fn direct_form(g: &WeightedGraph, mask: &[bool], x: &[f64]) -> f64 {
    g.edges()
        .iter()
        .filter(|e| mask[e.u] && mask[e.v])
        .map(|e| e.weight * (x[e.u] - x[e.v]).powi(2))
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laplacian_is_psd(g in graph(16)) {
        let l = laplacian(&g);
        let top = l.max_eigenvalue().max(1.0);
        prop_assert!(l.min_eigenvalue() >= -1e-9 * top);
    }

    #[test]
    fn induced_form_matches_edge_sum(
        (g, mask) in graph_and_mask(14),
        xs in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 14), 1..8),
    ) {
        let ls = induced_laplacian(&g, &members(&mask)).unwrap();
        for x in xs {
            let x = &x[..g.n()];
            let q = ls.quadratic_form(&DVector::from_column_slice(x));
            prop_assert!((q - direct_form(&g, &mask, x)).abs() <= 1e-10 * (1.0 + q.abs()));
        }
        let all = vec![true; g.n()];
        let full = induced_laplacian(&g, &members(&all)).unwrap();
        prop_assert!(full.max_abs_diff(&laplacian(&g)) == 0.0);
    }

    #[test]
    fn induced_laplacian_is_monotone((g, mask) in graph_and_mask(14), extra in prop::collection::vec(any::<bool>(), 14)) {
        let small = members(&mask);
        let big: Vec<usize> = (0..g.n()).filter(|&i| mask[i] || extra[i]).collect();
        let diff = &induced_laplacian(&g, &big).unwrap() - &induced_laplacian(&g, &small).unwrap();
        prop_assert!(diff.min_eigenvalue() >= -1e-9);
        let ctx = SpectralContext::new(&g).unwrap();
        prop_assert!(lightness_norm(&ctx, &small).unwrap() <= lightness_norm(&ctx, &big).unwrap() + 1e-9);
    }

    #[test]
    fn foster_sum_counts_components(g in graph(18)) {
        let ctx = SpectralContext::new(&g).unwrap();
        let profile = leverage_profile(&ctx);
        prop_assert_eq!(ctx.components(), g.component_count());
        prop_assert!((profile.total - (g.n() - g.component_count()) as f64).abs() <= 1e-8);
        for e in &profile.entries {
            prop_assert!(e.tau > 0.0 && e.tau <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn edge_matrices_sum_to_projector(g in graph(14)) {
        let ctx = SpectralContext::new(&g).unwrap();
        let total = ctx.accumulate(0..g.edge_count());
        prop_assert!(total.max_abs_diff(&SymMatrix::from_matrix(ctx.projector().clone())) <= 1e-9);
        for ev in total.eigenvalues() {
            prop_assert!(ev.abs() <= 1e-9 || (ev - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn lightness_norm_bounds_quadratic_forms(
        (g, mask) in graph_and_mask(12),
        xs in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 12), 1..10),
    ) {
        let ctx = SpectralContext::new(&g).unwrap();
        let set = members(&mask);
        let norm = lightness_norm(&ctx, &set).unwrap();
        let l = laplacian(&g);
        let ls = induced_laplacian(&g, &set).unwrap();
        for x in xs {
            let x = ctx.projector() * DVector::from_column_slice(&x[..g.n()]);
            prop_assert!(ls.quadratic_form(&x) <= norm * l.quadratic_form(&x) + 1e-8);
        }
        if norm > 1e-6 {
            let verdict = is_epsilon_light(&ctx, &set, norm / 2.0).unwrap();
            prop_assert!(!verdict.light);
            let w = DVector::from_vec(verdict.witness.unwrap());
            let (lhs, rhs) = (ls.quadratic_form(&w), l.quadratic_form(&w));
            prop_assert!((lhs - norm * rhs).abs() <= 1e-6);
            prop_assert!(lhs > norm / 2.0 * rhs);
        }
    }

    #[test]
    fn stars_dominate_induced_matrix((g, mask) in graph_and_mask(12)) {
        let ctx = SpectralContext::new(&g).unwrap();
        prop_assert!(star_domination_gap(&ctx, &members(&mask)).unwrap() >= -1e-9);
    }

    #[test]
    fn leverage_degrees_sum_below_foster_bound(g in graph(16)) {
        let ctx = SpectralContext::new(&g).unwrap();
        let all: Vec<usize> = (0..g.n()).collect();
        let degrees = leverage_degrees(&leverage_profile(&ctx), &g, &all).unwrap();
        prop_assert!(degrees.values().sum::<f64>() <= 2.0 * (g.n() - 1) as f64 + 1e-9);
    }

    #[test]
    fn min_ell_prefix_means_stay_below_mean(values in prop::collection::vec(0.0f64..10.0, 1..40)) {
        let degrees: BTreeMap<usize, f64> = values.iter().copied().enumerate().collect();
        let set: Vec<usize> = degrees.keys().copied().collect();
        let order = min_ell_order(&set, &degrees);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let mut acc = 0.0;
        for (i, v) in order.iter().enumerate() {
            acc += degrees[v];
            prop_assert!(acc / (i + 1) as f64 <= mean + 1e-12);
        }
    }

    #[test]
    fn turan_set_is_independent_and_large(g in graph(20)) {
        let heavy: Vec<[usize; 2]> = g.edges().iter().map(|e| [e.u, e.v]).collect();
        let set = turan_independent_set(g.n(), &heavy);
        for e in g.edges() {
            prop_assert!(!(set.contains(&e.u) && set.contains(&e.v)));
        }
        prop_assert!(set.len() as f64 >= turan_bound(g.n(), heavy.len()) - 1.0);
    }

    #[test]
    fn raising_p_only_adds_vertices(g in graph(30), p in 0.0f64..1.0, q in 0.0f64..1.0, seed in any::<u64>()) {
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        let small = bernoulli_sample(&g, lo, seed).unwrap();
        let big = bernoulli_sample(&g, hi, seed).unwrap();
        prop_assert!(small.iter().all(|v| big.contains(v)));
    }

    #[test]
    fn q_root_sum_is_mean_trace(spectra in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 0..5), 1..8)) {
        let refs: Vec<&[f64]> = spectra.iter().map(Vec::as_slice).collect();
        let q = QPolynomial::from_spectra(refs, 6);
        let mean = spectra.iter().map(|s| s.iter().sum::<f64>()).sum::<f64>() / spectra.len() as f64;
        prop_assert!((q.root_sum - mean).abs() <= 1e-8);
        if let Some(r) = q.max_real_root {
            prop_assert!(q.eval(r).abs() <= 1e-6);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn greedy_keeps_barrier_and_certificates(g in graph(14), eps in 0.1f64..0.7) {
        let ctx = SpectralContext::new(&g).unwrap();
        let all: Vec<usize> = (0..g.n()).collect();
        let mut state = BarrierState::new(&ctx, eps, &all).unwrap();
        while state.r() > 0 {
            let scores = state.score_candidates(&ctx).unwrap();
            for s in &scores {
                let y = s.normalized();
                prop_assert!(y.max_eigenvalue() <= y.trace() + 1e-12);
            }
            let min_trace = scores.iter().map(|s| s.trace).fold(f64::INFINITY, f64::min);
            prop_assert!(min_trace <= dbar(&state, &ctx).unwrap() + 1e-12);

            match barrier_step(&mut state, &ctx, Policy::MinNorm).unwrap() {
                StepOutcome::Accepted { .. } => {
                    let rebuilt = state.recompute_accumulated(&ctx);
                    prop_assert!(rebuilt.max_abs_diff(state.accumulated()) <= 1e-9);
                    prop_assert!(state.accumulated().max_eigenvalue() < eps);
                }
                StepOutcome::Skipped { .. } => break,
            }
        }
        prop_assert!(is_epsilon_light(&ctx, state.selected(), eps).unwrap().light);
    }
}
