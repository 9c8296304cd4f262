//! Barrier greedy selection.
//!
//! The state keeps the selected set `S_t`, the accumulated matrix
//! `M_t = Σ_{e ⊆ S_t} X_e` and the remaining pool `R_t`. The invariant is
//! `λ_max(M_t) < ε`; with headroom `H_t = εI − M_t` (on `im(L)`) a candidate
//! `v` keeps it exactly when `‖H_t^{-1/2} C_t(v) H_t^{-1/2}‖ < 1`, where
//! `C_t(v) = Σ_{u ∈ S_t, u ~ v} X_uv`.
//!
//! `C_t(v)` has rank at most `deg_S(v)`, so every candidate is scored through
//! its `n × d` factor `F` (`C = F Fᵀ`) and the `d × d` Gram matrix of
//! `G = H^{-1/2} F`, whose eigenvalues are the nonzero eigenvalues of `Y_t(v)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{normalize_set, SymMatrix, WeightedGraph};
use crate::selection::qpoly::QPolynomial;
use crate::spectral::{check_epsilon, lightness_norm, SpectralContext};

/// Headroom eigenvalues at or below this raise [`Error::BarrierSaturated`].
pub const SATURATION_TOL: f64 = 1e-12;

/// A step is nontrivial when some candidate has trace above this.
pub const NONTRIVIAL_TRACE: f64 = 1e-12;

/// Slack for `‖Y‖ ≤ tr(Y)`.
pub const PSD_BOUND_TOL: f64 = 1e-12;

/// Scores within this of the best count as tied; the smaller vertex wins.
const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    #[default]
    MinNorm,
    MinTrace,
    MinEll,
}

impl Policy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Policy::MinNorm => "min-norm",
            Policy::MinTrace => "min-trace",
            Policy::MinEll => "min-ell",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min-norm" => Ok(Policy::MinNorm),
            "min-trace" => Ok(Policy::MinTrace),
            "min-ell" => Ok(Policy::MinEll),
            other => Err(Error::InvalidConfig(format!("unknown policy `{other}`"))),
        }
    }
}

/// Which headroom normalizes the candidate contributions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Headroom {
    /// `H_t = εI − M_t`.
    Actual,
    /// `H_t = εI`, i.e. `M_t` treated as zero.
    Isotropic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    E,
    F,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeInfo {
    pub deg_r_max: usize,
    pub regime: Regime,
}

#[derive(Clone, Debug)]
pub struct BarrierState {
    eps: f64,
    selected: Vec<usize>,
    in_selected: Vec<bool>,
    remaining: Vec<usize>,
    accumulated: SymMatrix,
    leverage_degrees: BTreeMap<usize, f64>,
}

impl BarrierState {
    /// Empty selection over `candidates`; leverage degrees are taken within the pool.
    pub fn new(ctx: &SpectralContext, eps: f64, candidates: &[usize]) -> Result<Self> {
        check_epsilon(eps)?;
        let g = ctx.graph();
        let mask = g.membership(candidates)?;
        let remaining = normalize_set(candidates);
        let mut leverage_degrees: BTreeMap<usize, f64> = remaining.iter().map(|&v| (v, 0.0)).collect();
        for (idx, e) in g.edges().iter().enumerate() {
            if mask[e.u] && mask[e.v] {
                let tau = ctx.leverage(idx);
                *leverage_degrees.get_mut(&e.u).expect("member") += tau;
                *leverage_degrees.get_mut(&e.v).expect("member") += tau;
            }
        }
        Ok(Self {
            eps,
            selected: Vec::new(),
            in_selected: vec![false; g.n()],
            remaining,
            accumulated: SymMatrix::zeros(g.n()),
            leverage_degrees,
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `S_t` in selection order.
    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    /// `R_t`, sorted.
    pub fn remaining(&self) -> &[usize] {
        &self.remaining
    }

    pub fn t(&self) -> usize {
        self.selected.len()
    }

    pub fn r(&self) -> usize {
        self.remaining.len()
    }

    /// Incrementally maintained `M_t`.
    pub fn accumulated(&self) -> &SymMatrix {
        &self.accumulated
    }

    pub fn leverage_degree(&self, v: usize) -> f64 {
        self.leverage_degrees.get(&v).copied().unwrap_or(0.0)
    }

    /// `M_t` rebuilt from `S_t`.
    pub fn recompute_accumulated(&self, ctx: &SpectralContext) -> SymMatrix {
        ctx.normalized_induced(&self.selected).expect("selected vertices are in range")
    }

    /// `H_t = εΠ − M_t`, with `Π` the projector onto `im(L)`.
    pub fn headroom(&self, ctx: &SpectralContext) -> SymMatrix {
        SymMatrix::from_matrix(ctx.projector() * self.eps - self.accumulated.as_matrix())
    }

    /// `H_t^{-1/2}` on `im(L)`, zero on the kernel.
    pub fn inverse_sqrt_headroom(&self, ctx: &SpectralContext, headroom: Headroom) -> Result<DMatrix<f64>> {
        if headroom == Headroom::Isotropic {
            return Ok(ctx.projector() / self.eps.sqrt());
        }
        let basis = ctx.image_basis();
        if basis.ncols() == 0 {
            return Ok(DMatrix::zeros(ctx.n(), ctx.n()));
        }
        let reduced = basis.transpose() * self.accumulated.as_matrix() * &basis;
        let h = DMatrix::identity(basis.ncols(), basis.ncols()) * self.eps - reduced;
        let h = (&h + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(h);
        let min = eig.eigenvalues.min();
        if min <= SATURATION_TOL {
            return Err(Error::BarrierSaturated { headroom: min });
        }
        let mut vecs = eig.eigenvectors.clone();
        for (j, mut col) in vecs.column_iter_mut().enumerate() {
            col /= eig.eigenvalues[j].sqrt().sqrt();
        }
        let inner = &vecs * vecs.transpose();
        Ok(&basis * inner * basis.transpose())
    }

    /// Scores every remaining candidate under the actual headroom.
    pub fn score_candidates(&self, ctx: &SpectralContext) -> Result<Vec<CandidateScore>> {
        self.score_candidates_with(ctx, Headroom::Actual)
    }

    pub fn score_candidates_with(&self, ctx: &SpectralContext, headroom: Headroom) -> Result<Vec<CandidateScore>> {
        let whitener = self.inverse_sqrt_headroom(ctx, headroom)?;
        let g = ctx.graph();
        let n = g.n();
        Ok(self
            .remaining
            .iter()
            .map(|&v| {
                let links: Vec<usize> = g
                    .neighbors(v)
                    .iter()
                    .filter(|&&(u, _)| self.in_selected[u])
                    .map(|&(_, e)| e)
                    .collect();
                let mut factor = DMatrix::zeros(n, links.len());
                for (j, &e) in links.iter().enumerate() {
                    factor.set_column(j, &ctx.edge_vector(e));
                }
                CandidateScore::new(v, factor, &whitener, self.leverage_degree(v))
            })
            .collect())
    }

    fn accept(&mut self, ctx: &SpectralContext, v: usize) {
        for &(u, e) in ctx.graph().neighbors(v) {
            if self.in_selected[u] {
                self.accumulated.add_outer(&ctx.edge_vector(e), 1.0);
            }
        }
        self.selected.push(v);
        self.in_selected[v] = true;
        self.remaining.retain(|&x| x != v);
    }
}

/// One candidate's contribution `C_t(v)` and its normalized form `Y_t(v)`.
#[derive(Clone, Debug)]
pub struct CandidateScore {
    pub vertex: usize,
    /// `tr(Y_t(v))`.
    pub trace: f64,
    /// `‖Y_t(v)‖`.
    pub norm: f64,
    /// `tr(C_t(v))`.
    pub contribution_trace: f64,
    pub leverage_degree: f64,
    /// Number of already-selected neighbours.
    pub cross_degree: usize,
    /// Nonzero-block eigenvalues of `Y_t(v)`, ascending.
    pub spectrum: Vec<f64>,
    contribution_factor: DMatrix<f64>,
    normalized_factor: DMatrix<f64>,
}

impl CandidateScore {
    fn new(vertex: usize, factor: DMatrix<f64>, whitener: &DMatrix<f64>, leverage_degree: f64) -> Self {
        let cross_degree = factor.ncols();
        let normalized = whitener * &factor;
        let contribution_trace = factor.norm_squared();
        let trace = normalized.norm_squared();
        let spectrum = if cross_degree == 0 {
            Vec::new()
        } else {
            let gram = normalized.transpose() * &normalized;
            let mut ev: Vec<f64> = SymmetricEigen::new(gram)
                .eigenvalues
                .iter()
                .map(|&l| l.max(0.0))
                .collect();
            ev.sort_by(f64::total_cmp);
            ev
        };
        let norm = spectrum.last().copied().unwrap_or(0.0);
        Self {
            vertex,
            trace,
            norm,
            contribution_trace,
            leverage_degree,
            cross_degree,
            spectrum,
            contribution_factor: factor,
            normalized_factor: normalized,
        }
    }

    /// `C_t(v)` as an `n × n` matrix.
    pub fn contribution(&self) -> SymMatrix {
        let f = &self.contribution_factor;
        SymMatrix::from_matrix(f * f.transpose())
    }

    /// `Y_t(v)` as an `n × n` matrix.
    pub fn normalized(&self) -> SymMatrix {
        let g = &self.normalized_factor;
        SymMatrix::from_matrix(g * g.transpose())
    }

    pub fn feasible(&self) -> bool {
        self.norm < 1.0
    }

    fn key(&self, policy: Policy) -> f64 {
        match policy {
            Policy::MinNorm => self.norm,
            Policy::MinTrace => self.trace,
            Policy::MinEll => self.leverage_degree,
        }
    }
}

/// Policy choice among feasible candidates; scores must be in ascending vertex order.
pub fn select_candidate(scores: &[CandidateScore], policy: Policy) -> Option<&CandidateScore> {
    let mut best: Option<&CandidateScore> = None;
    for s in scores.iter().filter(|s| s.feasible()) {
        match best {
            Some(b) if s.key(policy) >= b.key(policy) - TIE_TOL => {}
            _ => best = Some(s),
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub enum StepOutcome {
    Accepted {
        vertex: usize,
        y_norm: f64,
        /// `λ_max(M_{t+1})`.
        barrier_norm: f64,
    },
    /// No candidate keeps the barrier; the state is unchanged.
    Skipped { candidate_norms: Vec<(usize, f64)> },
}

/// Adds the policy's choice among candidates with `λ_max(M_t + C_t(v)) < ε`.
pub fn barrier_step(state: &mut BarrierState, ctx: &SpectralContext, policy: Policy) -> Result<StepOutcome> {
    let scores = state.score_candidates(ctx)?;
    Ok(apply_choice(state, ctx, &scores, policy))
}

fn apply_choice(state: &mut BarrierState, ctx: &SpectralContext, scores: &[CandidateScore], policy: Policy) -> StepOutcome {
    match select_candidate(scores, policy) {
        Some(best) => {
            let (vertex, y_norm) = (best.vertex, best.norm);
            state.accept(ctx, vertex);
            StepOutcome::Accepted {
                vertex,
                y_norm,
                barrier_norm: state.accumulated.max_eigenvalue().max(0.0),
            }
        }
        None => StepOutcome::Skipped {
            candidate_norms: scores.iter().map(|s| (s.vertex, s.norm)).collect(),
        },
    }
}

/// `d̄_t = (1/r_t) Σ_{v ∈ R_t} tr(Y_t(v))`.
pub fn dbar(state: &BarrierState, ctx: &SpectralContext) -> Result<f64> {
    dbar_with(state, ctx, Headroom::Actual)
}

pub fn dbar_with(state: &BarrierState, ctx: &SpectralContext, headroom: Headroom) -> Result<f64> {
    if state.r() == 0 {
        return Err(Error::EmptyCandidatePool);
    }
    let scores = state.score_candidates_with(ctx, headroom)?;
    Ok(mean(scores.iter().map(|s| s.trace)))
}

fn mean(values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let len = values.len();
    values.sum::<f64>() / len as f64
}

pub fn q_polynomial(state: &BarrierState, ctx: &SpectralContext) -> Result<QPolynomial> {
    if state.r() == 0 {
        return Err(Error::EmptyCandidatePool);
    }
    let scores = state.score_candidates(ctx)?;
    Ok(QPolynomial::from_spectra(scores.iter().map(|s| s.spectrum.as_slice()), ctx.rank()))
}

/// Largest real root of `Q`; `None` only when `Q` has no real root at all.
pub fn q_polynomial_max_root(state: &BarrierState, ctx: &SpectralContext) -> Result<Option<f64>> {
    Ok(q_polynomial(state, ctx)?.max_real_root)
}

/// Maximum cross-degree over `R_t`; regime E when it is at most 2.
pub fn regime_classify(state: &BarrierState, g: &WeightedGraph) -> RegimeInfo {
    let deg_r_max = state
        .remaining
        .iter()
        .map(|&v| g.neighbors(v).iter().filter(|&&(u, _)| state.in_selected[u]).count())
        .max()
        .unwrap_or(0);
    RegimeInfo { deg_r_max, regime: if deg_r_max <= 2 { Regime::E } else { Regime::F } }
}

/// `⌊ε · |candidates| / 3⌋`.
pub fn default_step_budget(eps: f64, candidates: usize) -> usize {
    (eps * candidates as f64 / 3.0 + 1e-9).floor() as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chosen {
    Vertex(usize),
    Skip,
}

impl Serialize for Chosen {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Chosen::Vertex(v) => s.serialize_u64(*v as u64),
            Chosen::Skip => s.serialize_str("skip"),
        }
    }
}

impl<'de> Deserialize<'de> for Chosen {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Vertex(usize),
            Marker(String),
        }
        match Raw::deserialize(d)? {
            Raw::Vertex(v) => Ok(Chosen::Vertex(v)),
            Raw::Marker(m) if m == "skip" => Ok(Chosen::Skip),
            Raw::Marker(m) => Err(serde::de::Error::custom(format!("expected vertex id or \"skip\", got {m:?}"))),
        }
    }
}

/// Diagnostics for one greedy step, taken before the chosen vertex is added.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    pub chosen: Chosen,
    pub r: usize,
    pub dbar: f64,
    /// `d̄_t` with headroom `εI`.
    pub dbar_isotropic: f64,
    pub min_trace: f64,
    /// `‖Y‖` of the chosen candidate.
    pub y_norm: Option<f64>,
    /// `λ_max(M_{t+1})`, or `λ_max(M_t)` on a skip.
    pub barrier_norm: f64,
    pub q_max_root: Option<f64>,
    pub q_root_sum: f64,
    #[serde(rename = "deg_R_max")]
    pub deg_r_max: usize,
    pub regime: Regime,
    pub nontrivial: bool,
    /// `max_v (‖Y_t(v)‖ − tr(Y_t(v)))`; never above the PSD slack.
    pub max_norm_excess: f64,
}

impl StepRecord {
    pub fn pigeonhole_ok(&self) -> bool {
        self.min_trace <= self.dbar + 1e-12
    }

    pub fn psd_bound_ok(&self) -> bool {
        self.max_norm_excess <= PSD_BOUND_TOL
    }

    pub fn vieta_error(&self) -> f64 {
        (self.q_root_sum - self.dbar).abs()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyTrace {
    pub eps: f64,
    pub policy: Policy,
    pub step_budget: usize,
    pub candidates: Vec<usize>,
    pub steps: Vec<StepRecord>,
    pub selected: Vec<usize>,
    pub final_norm: f64,
    /// Pool the Q-polynomial averages over.
    pub q_average_over: String,
}

impl GreedyTrace {
    pub fn nontrivial_steps(&self) -> impl Iterator<Item = &StepRecord> {
        self.steps.iter().filter(|s| s.nontrivial)
    }
}

pub fn barrier_greedy(
    ctx: &SpectralContext,
    eps: f64,
    candidates: &[usize],
    budget: usize,
    policy: Policy,
) -> Result<GreedyTrace> {
    barrier_greedy_until(ctx, eps, candidates, budget, policy, None)
}

/// [`barrier_greedy`] that gives up with [`Error::TimedOut`] once `deadline` passes.
pub fn barrier_greedy_until(
    ctx: &SpectralContext,
    eps: f64,
    candidates: &[usize],
    budget: usize,
    policy: Policy,
    deadline: Option<(Instant, f64)>,
) -> Result<GreedyTrace> {
    let mut state = BarrierState::new(ctx, eps, candidates)?;
    let mut steps = Vec::new();
    for _ in 0..budget {
        if let Some((at, secs)) = deadline {
            if Instant::now() > at {
                return Err(Error::TimedOut(secs));
            }
        }
        if state.r() == 0 {
            break;
        }
        let scores = state.score_candidates(ctx)?;
        let iso_traces: Vec<f64> = scores.iter().map(|s| s.contribution_trace / eps).collect();
        let q = QPolynomial::from_spectra(scores.iter().map(|s| s.spectrum.as_slice()), ctx.rank());
        let regime = regime_classify(&state, ctx.graph());
        let t = state.t();
        let r = state.r();
        let dbar = mean(scores.iter().map(|s| s.trace));
        let dbar_isotropic = mean(iso_traces.into_iter());
        let min_trace = scores.iter().map(|s| s.trace).fold(f64::INFINITY, f64::min);
        let nontrivial = scores.iter().any(|s| s.trace > NONTRIVIAL_TRACE);
        let max_norm_excess = scores.iter().map(|s| s.norm - s.trace).fold(f64::NEG_INFINITY, f64::max);
        let previous_norm = state.accumulated.max_eigenvalue().max(0.0);

        let outcome = apply_choice(&mut state, ctx, &scores, policy);
        let (chosen, y_norm, barrier_norm) = match outcome {
            StepOutcome::Accepted { vertex, y_norm, barrier_norm } => (Chosen::Vertex(vertex), Some(y_norm), barrier_norm),
            StepOutcome::Skipped { .. } => (Chosen::Skip, None, previous_norm),
        };
        steps.push(StepRecord {
            t,
            chosen,
            r,
            dbar,
            dbar_isotropic,
            min_trace,
            y_norm,
            barrier_norm,
            q_max_root: q.max_real_root,
            q_root_sum: q.root_sum,
            deg_r_max: regime.deg_r_max,
            regime: regime.regime,
            nontrivial,
            max_norm_excess,
        });
        if chosen == Chosen::Skip {
            // The state did not change, so every further step would repeat this one.
            break;
        }
    }
    let selected = state.selected.clone();
    Ok(GreedyTrace {
        eps,
        policy,
        step_budget: budget,
        candidates: normalize_set(candidates),
        steps,
        final_norm: lightness_norm(ctx, &selected)?,
        selected,
        q_average_over: "remaining".into(),
    })
}
