//! Leverage split, Turán pruning, leverage filter and barrier greedy.

pub mod barrier;
pub mod pruning;
pub mod qpoly;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use barrier::{
    barrier_greedy, barrier_greedy_until, barrier_step, dbar, dbar_with, default_step_budget, q_polynomial,
    q_polynomial_max_root, regime_classify, select_candidate, BarrierState, CandidateScore, Chosen, GreedyTrace,
    Headroom, Policy, Regime, RegimeInfo, StepOutcome, StepRecord,
};
pub use pruning::{
    heavy_edge_set, leverage_degrees, leverage_filter, min_ell_order, turan_bound, turan_independent_set,
    LeverageDegrees,
};
pub use qpoly::QPolynomial;

use crate::error::Result;
use crate::spectral::{check_epsilon, leverage_profile, SpectralContext};

pub const DEFAULT_C_LEV: f64 = 8.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineOptions {
    pub policy: Policy,
    pub apply_filter: bool,
    pub c_lev: f64,
    /// Overrides `⌊ε |I₀′| / 3⌋`.
    pub step_budget: Option<usize>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { policy: Policy::MinNorm, apply_filter: true, c_lev: DEFAULT_C_LEV, step_budget: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineResult {
    pub heavy_edges: usize,
    pub independent_set: Vec<usize>,
    pub filtered_set: Vec<usize>,
    pub trace: GreedyTrace,
}

/// leverage → heavy split → Turán → optional leverage filter → barrier greedy.
pub fn select_light_set(ctx: &SpectralContext, eps: f64, opts: &PipelineOptions) -> Result<PipelineResult> {
    run_pipeline(ctx, eps, opts, None)
}

pub(crate) fn run_pipeline(
    ctx: &SpectralContext,
    eps: f64,
    opts: &PipelineOptions,
    deadline: Option<(Instant, f64)>,
) -> Result<PipelineResult> {
    check_epsilon(eps)?;
    let g = ctx.graph();
    let profile = leverage_profile(ctx);
    let heavy = heavy_edge_set(&profile, eps);
    let independent_set = turan_independent_set(g.n(), &heavy);
    let filtered_set = if opts.apply_filter {
        let degrees = leverage_degrees(&profile, g, &independent_set)?;
        leverage_filter(&independent_set, &degrees, eps, opts.c_lev)
    } else {
        independent_set.clone()
    };
    let budget = opts.step_budget.unwrap_or_else(|| default_step_budget(eps, filtered_set.len()));
    let trace = barrier_greedy_until(ctx, eps, &filtered_set, budget, opts.policy, deadline)?;
    Ok(PipelineResult { heavy_edges: heavy.len(), independent_set, filtered_set, trace })
}
