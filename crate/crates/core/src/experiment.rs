//! Suite runner: one pipeline run per (family, n, ε) cell.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{generate_family, Family, FamilySpec, WeightedGraph};
use crate::rng::{derive_seed, label_tag};
use crate::selection::{run_pipeline, GreedyTrace, PipelineOptions, Policy, Regime, DEFAULT_C_LEV};
use crate::spectral::{is_epsilon_light, SpectralContext};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_EPS_GRID: [f64; 5] = [0.12, 0.15, 0.2, 0.25, 0.3];
pub const DEFAULT_ER_P: f64 = 0.5;
pub const DEFAULT_CELL_TIMEOUT_SECS: f64 = 60.0;

/// Graph families the suite sweeps over `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum SuiteFamily {
    Complete,
    Cycle,
    Barbell,
    DisjointCliques,
    ErdosRenyi { p: f64 },
}

impl SuiteFamily {
    pub fn standard() -> Vec<SuiteFamily> {
        vec![
            SuiteFamily::Complete,
            SuiteFamily::Cycle,
            SuiteFamily::Barbell,
            SuiteFamily::DisjointCliques,
            SuiteFamily::ErdosRenyi { p: DEFAULT_ER_P },
        ]
    }

    pub fn instantiate(&self, n: usize) -> Family {
        match *self {
            SuiteFamily::Complete => Family::Complete { n },
            SuiteFamily::Cycle => Family::Cycle { n },
            SuiteFamily::Barbell => Family::Barbell { n },
            SuiteFamily::DisjointCliques => Family::DisjointCliques { n },
            SuiteFamily::ErdosRenyi { p } => Family::ErdosRenyi { n, p },
        }
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SuiteFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuiteFamily::Complete => f.write_str("complete"),
            SuiteFamily::Cycle => f.write_str("cycle"),
            SuiteFamily::Barbell => f.write_str("barbell"),
            SuiteFamily::DisjointCliques => f.write_str("disjoint-cliques"),
            SuiteFamily::ErdosRenyi { p } => write!(f, "erdos-renyi:{p}"),
        }
    }
}

impl FromStr for SuiteFamily {
    type Err = Error;

    /// `complete`, `cycle`, `barbell`, `disjoint-cliques`, `erdos-renyi` or `erdos-renyi:<p>`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let fam = match (name, arg) {
            ("complete", None) => SuiteFamily::Complete,
            ("cycle", None) => SuiteFamily::Cycle,
            ("barbell", None) => SuiteFamily::Barbell,
            ("disjoint-cliques", None) => SuiteFamily::DisjointCliques,
            ("erdos-renyi", None) => SuiteFamily::ErdosRenyi { p: DEFAULT_ER_P },
            ("erdos-renyi", Some(p)) => SuiteFamily::ErdosRenyi {
                p: p.parse().map_err(|_| Error::InvalidConfig(format!("bad edge probability `{p}`")))?,
            },
            _ => return Err(Error::InvalidConfig(format!("unknown suite family `{s}`"))),
        };
        Ok(fam)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub families: Vec<SuiteFamily>,
    pub n_values: Vec<usize>,
    pub eps_values: Vec<f64>,
    pub policy: Policy,
    pub master_seed: u64,
    pub apply_filter: bool,
    pub c_lev: f64,
    pub step_budget: Option<usize>,
    pub cell_timeout_secs: f64,
    /// Cap on concurrently running cells; `None` uses rayon's default.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for SuiteConfig {
    /// Every standard family, `n ∈ 8..=64`, the five-value ε grid.
    fn default() -> Self {
        Self {
            families: SuiteFamily::standard(),
            n_values: (8..=64).collect(),
            eps_values: DEFAULT_EPS_GRID.to_vec(),
            policy: Policy::MinNorm,
            master_seed: 0,
            apply_filter: true,
            c_lev: DEFAULT_C_LEV,
            step_budget: None,
            cell_timeout_secs: DEFAULT_CELL_TIMEOUT_SECS,
            threads: None,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(&eps) = self.eps_values.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
            return Err(Error::InvalidEpsilon(eps));
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidConfig(format!("n must be at least 2, got {n}")));
        }
        if self.c_lev.is_nan() || self.c_lev <= 0.0 {
            return Err(Error::InvalidConfig(format!("c_lev must be positive, got {}", self.c_lev)));
        }
        if self.cell_timeout_secs.is_nan() || self.cell_timeout_secs <= 0.0 {
            return Err(Error::InvalidConfig("cell timeout must be positive".into()));
        }
        Ok(())
    }

    /// Cells in report order: family, then n, then ε.
    pub fn cells(&self) -> Vec<(SuiteFamily, usize, f64)> {
        let mut out = Vec::new();
        for &fam in &self.families {
            for &n in &self.n_values {
                for &eps in &self.eps_values {
                    out.push((fam, n, eps));
                }
            }
        }
        out
    }

    fn pipeline_options(&self) -> PipelineOptions {
        PipelineOptions {
            policy: self.policy,
            apply_filter: self.apply_filter,
            c_lev: self.c_lev,
            step_budget: self.step_budget,
        }
    }
}

/// Graph for one suite cell, seeded from `(master, family, n, ε)`.
pub fn cell_graph(master_seed: u64, family: SuiteFamily, n: usize, eps: f64) -> Result<WeightedGraph> {
    let seed = derive_seed(master_seed, &[label_tag(&family.label()), n as u64, eps.to_bits(), 0]);
    generate_family(&FamilySpec::new(family.instantiate(n)).with_seed(seed))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    Error,
    TimedOut,
}

impl CellStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::Error => "error",
            CellStatus::TimedOut => "timed_out",
        }
    }
}

/// One row of the reproduced table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellRow {
    pub family: String,
    pub n: usize,
    pub eps: f64,
    pub status: CellStatus,
    pub error: Option<String>,
    pub edges: Option<usize>,
    pub components: Option<usize>,
    pub heavy_edges: Option<usize>,
    pub independent_set: Option<usize>,
    pub filtered_set: Option<usize>,
    pub step_budget: Option<usize>,
    pub steps_run: Option<usize>,
    pub nontrivial_steps: Option<usize>,
    pub max_dbar: Option<f64>,
    pub max_dbar_t: Option<usize>,
    pub max_q_root: Option<f64>,
    /// `min (d̄_t − min_v tr Y_t(v))` over nontrivial steps.
    pub min_pigeonhole_slack: Option<f64>,
    pub max_vieta_error: Option<f64>,
    pub dbar_violations: Option<usize>,
    pub pigeonhole_failures: Option<usize>,
    pub psd_bound_failures: Option<usize>,
    pub final_size: Option<usize>,
    pub final_norm: Option<f64>,
    pub light: Option<bool>,
    pub regime_e: Option<usize>,
    pub regime_f: Option<usize>,
}

impl CellRow {
    fn failed(family: String, n: usize, eps: f64, status: CellStatus, err: &Error) -> Self {
        Self {
            family,
            n,
            eps,
            status,
            error: Some(err.to_string()),
            edges: None,
            components: None,
            heavy_edges: None,
            independent_set: None,
            filtered_set: None,
            step_budget: None,
            steps_run: None,
            nontrivial_steps: None,
            max_dbar: None,
            max_dbar_t: None,
            max_q_root: None,
            min_pigeonhole_slack: None,
            max_vieta_error: None,
            dbar_violations: None,
            pigeonhole_failures: None,
            psd_bound_failures: None,
            final_size: None,
            final_norm: None,
            light: None,
            regime_e: None,
            regime_f: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellTrace {
    pub family: String,
    pub n: usize,
    pub eps: f64,
    pub trace: GreedyTrace,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxDbar {
    pub value: f64,
    pub family: String,
    pub n: usize,
    pub eps: f64,
    pub t: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GlobalSummary {
    pub cells: usize,
    pub failed_cells: usize,
    pub timed_out_cells: usize,
    pub total_steps: usize,
    pub nontrivial_steps: usize,
    pub max_dbar: Option<MaxDbar>,
    /// Nontrivial steps with `d̄ ≥ 1`.
    pub violations: usize,
    pub pigeonhole_failures: usize,
    pub psd_bound_failures: usize,
    pub max_q_root: Option<f64>,
    pub max_vieta_error: Option<f64>,
    pub non_light_cells: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub config: SuiteConfig,
    pub rows: Vec<CellRow>,
    pub summary: GlobalSummary,
    pub traces: Vec<CellTrace>,
}

impl ExperimentReport {
    pub fn has_failures(&self) -> bool {
        self.summary.failed_cells + self.summary.timed_out_cells > 0
    }
}

fn run_cell(config: &SuiteConfig, family: SuiteFamily, n: usize, eps: f64) -> (CellRow, Option<CellTrace>) {
    let label = family.label();
    let timeout = config.cell_timeout_secs;
    let deadline = Instant::now() + Duration::from_secs_f64(timeout);
    let result = (|| {
        let g = cell_graph(config.master_seed, family, n, eps)?;
        let ctx = SpectralContext::new(&g)?;
        let pipeline = run_pipeline(&ctx, eps, &config.pipeline_options(), Some((deadline, timeout)))?;
        let light = is_epsilon_light(&ctx, &pipeline.trace.selected, eps)?.light;
        Ok::<_, Error>((g, ctx.components(), pipeline, light))
    })();
    match result {
        Ok((g, components, p, light)) => {
            let steps = &p.trace.steps;
            let nontrivial: Vec<_> = p.trace.nontrivial_steps().collect();
            let argmax = steps.iter().max_by(|a, b| a.dbar.total_cmp(&b.dbar).then(b.t.cmp(&a.t)));
            let row = CellRow {
                family: label.clone(),
                n,
                eps,
                status: CellStatus::Ok,
                error: None,
                edges: Some(g.edge_count()),
                components: Some(components),
                heavy_edges: Some(p.heavy_edges),
                independent_set: Some(p.independent_set.len()),
                filtered_set: Some(p.filtered_set.len()),
                step_budget: Some(p.trace.step_budget),
                steps_run: Some(steps.len()),
                nontrivial_steps: Some(nontrivial.len()),
                max_dbar: argmax.map(|s| s.dbar),
                max_dbar_t: argmax.map(|s| s.t),
                max_q_root: steps.iter().filter_map(|s| s.q_max_root).reduce(f64::max),
                min_pigeonhole_slack: nontrivial.iter().map(|s| s.dbar - s.min_trace).reduce(f64::min),
                max_vieta_error: steps.iter().map(|s| s.vieta_error()).reduce(f64::max),
                dbar_violations: Some(nontrivial.iter().filter(|s| s.dbar >= 1.0).count()),
                pigeonhole_failures: Some(nontrivial.iter().filter(|s| !s.pigeonhole_ok()).count()),
                psd_bound_failures: Some(steps.iter().filter(|s| !s.psd_bound_ok()).count()),
                final_size: Some(p.trace.selected.len()),
                final_norm: Some(p.trace.final_norm),
                light: Some(light),
                regime_e: Some(steps.iter().filter(|s| s.regime == Regime::E).count()),
                regime_f: Some(steps.iter().filter(|s| s.regime == Regime::F).count()),
            };
            (row, Some(CellTrace { family: label, n, eps, trace: p.trace }))
        }
        Err(err) => {
            let status = if matches!(err, Error::TimedOut(_)) { CellStatus::TimedOut } else { CellStatus::Error };
            (CellRow::failed(label, n, eps, status, &err), None)
        }
    }
}

fn summarize(rows: &[CellRow], traces: &[CellTrace]) -> GlobalSummary {
    let mut s = GlobalSummary { cells: rows.len(), ..Default::default() };
    for row in rows {
        match row.status {
            CellStatus::Ok => {}
            CellStatus::Error => s.failed_cells += 1,
            CellStatus::TimedOut => s.timed_out_cells += 1,
        }
        if row.light == Some(false) {
            s.non_light_cells += 1;
        }
    }
    for ct in traces {
        for step in &ct.trace.steps {
            s.total_steps += 1;
            if !step.psd_bound_ok() {
                s.psd_bound_failures += 1;
            }
            if let Some(q) = step.q_max_root {
                s.max_q_root = Some(s.max_q_root.map_or(q, |m| m.max(q)));
            }
            let ve = step.vieta_error();
            s.max_vieta_error = Some(s.max_vieta_error.map_or(ve, |m| m.max(ve)));
            if !step.nontrivial {
                continue;
            }
            s.nontrivial_steps += 1;
            if step.dbar >= 1.0 {
                s.violations += 1;
            }
            if !step.pigeonhole_ok() {
                s.pigeonhole_failures += 1;
            }
            if s.max_dbar.as_ref().is_none_or(|m| step.dbar > m.value) {
                s.max_dbar = Some(MaxDbar {
                    value: step.dbar,
                    family: ct.family.clone(),
                    n: ct.n,
                    eps: ct.eps,
                    t: step.t,
                });
            }
        }
    }
    s
}

/// Runs every cell; a failing cell becomes an error row and the rest still run.
pub fn run_suite(config: &SuiteConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let cells = config.cells();
    let work = || -> Vec<(CellRow, Option<CellTrace>)> {
        cells.par_iter().map(|&(fam, n, eps)| run_cell(config, fam, n, eps)).collect()
    };
    let results = match config.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let (rows, traces): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let traces: Vec<CellTrace> = traces.into_iter().flatten().collect();
    let summary = summarize(&rows, &traces);
    Ok(ExperimentReport { schema_version: SCHEMA_VERSION, config: config.clone(), rows, summary, traces })
}
