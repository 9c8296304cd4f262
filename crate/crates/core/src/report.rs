//! CSV and JSON output for suite reports.
//!
//! CSV columns, in order:
//!
//! | column | meaning |
//! |---|---|
//! | `family`, `n`, `eps` | cell identity |
//! | `status` | `ok`, `error` or `timed_out` |
//! | `edges`, `components` | graph size and component count |
//! | `heavy_edges` | edges with `τ_e > ε` |
//! | `independent_set`, `filtered_set` | `|I₀|` and `|I₀′|` |
//! | `step_budget`, `steps_run`, `nontrivial_steps` | greedy step counts |
//! | `max_dbar`, `max_dbar_t` | largest `d̄_t` and the step it occurred at |
//! | `max_q_root` | largest real root of the averaged characteristic polynomial |
//! | `min_pigeonhole_slack` | `min (d̄_t − min_v tr Y_t(v))` over nontrivial steps |
//! | `max_vieta_error` | `max |Σ roots − d̄_t|` |
//! | `dbar_violations` | nontrivial steps with `d̄_t ≥ 1` |
//! | `pigeonhole_failures`, `psd_bound_failures` | certificate failures |
//! | `final_size`, `final_norm`, `light` | selected set, `‖M_S‖`, lightness verdict |
//! | `regime_e`, `regime_f` | steps per cross-degree regime |
//! | `error` | error message for failed cells |
//!
//! Floats carry 9 significant digits; empty fields mean "not applicable".

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::experiment::ExperimentReport;

pub const CSV_COLUMNS: [&str; 27] = [
    "family",
    "n",
    "eps",
    "status",
    "edges",
    "components",
    "heavy_edges",
    "independent_set",
    "filtered_set",
    "step_budget",
    "steps_run",
    "nontrivial_steps",
    "max_dbar",
    "max_dbar_t",
    "max_q_root",
    "min_pigeonhole_slack",
    "max_vieta_error",
    "dbar_violations",
    "pigeonhole_failures",
    "psd_bound_failures",
    "final_size",
    "final_norm",
    "light",
    "regime_e",
    "regime_f",
    "error",
    "schema_version",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// `x` with 9 significant digits.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&exp) {
        return format!("{x:.8e}");
    }
    let decimals = (8 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn optf(v: Option<f64>) -> String {
    v.map(format_sig9).unwrap_or_default()
}

pub fn report_to_csv(report: &ExperimentReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS)?;
    for r in &report.rows {
        w.write_record([
            r.family.clone(),
            r.n.to_string(),
            format_sig9(r.eps),
            r.status.as_str().to_string(),
            opt(r.edges),
            opt(r.components),
            opt(r.heavy_edges),
            opt(r.independent_set),
            opt(r.filtered_set),
            opt(r.step_budget),
            opt(r.steps_run),
            opt(r.nontrivial_steps),
            optf(r.max_dbar),
            opt(r.max_dbar_t),
            optf(r.max_q_root),
            optf(r.min_pigeonhole_slack),
            optf(r.max_vieta_error),
            opt(r.dbar_violations),
            opt(r.pigeonhole_failures),
            opt(r.psd_bound_failures),
            opt(r.final_size),
            optf(r.final_norm),
            opt(r.light),
            opt(r.regime_e),
            opt(r.regime_f),
            r.error.clone().unwrap_or_default(),
            report.schema_version.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn report_to_json(report: &ExperimentReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serialization is infallible");
    s.push('\n');
    s
}

pub fn write_report(report: &ExperimentReport, format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    let text = match format {
        ReportFormat::Json => report_to_json(report),
        ReportFormat::Csv => report_to_csv(report)?,
    };
    let mut f = fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_formatting() {
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(0.641025641025), "0.641025641");
        assert_eq!(format_sig9(10.0 / 18.0), "0.555555556");
        assert_eq!(format_sig9(60.0), "60.0000000");
        assert_eq!(format_sig9(-0.25), "-0.250000000");
        assert_eq!(format_sig9(1.5e-7), "1.50000000e-7");
        let x = 0.123456789123;
        assert!((format_sig9(x).parse::<f64>().unwrap() - x).abs() <= 1e-9 * x);
    }
}
