//! Machine-readable report serialization: versioned JSON envelopes and flat
//! CSV tables with fixed, documented columns.
//!
//! All formatting is deterministic: struct fields serialize in declaration
//! order, and floats print with Rust's shortest round-trip representation.

use serde::Serialize;

use crate::function_spaces::Exponent;
use crate::inequalities::{CertificateReport, ComparisonReport, ConstantEstimate};
use crate::line_operators::AxiomReport;
use crate::transfer::EquimeasurabilityReport;

/// Version tag carried by every JSON report.
pub const SCHEMA_VERSION: &str = "1";

/// CSV header for per-trial ratio tables (estimate runs).
pub const TRIAL_CSV_HEADER: &str = "trial,seed,p,r,j,ratio_line,ratio_sys,slack,pass";

/// CSV header for comparison tables (per-trial ratios, one row per kind).
pub const COMPARISON_CSV_HEADER: &str = "trial,seed,kind,p,r,j,ratio_line,ratio_sys,slack,pass";

/// CSV header for certificate link tables.
pub const CERTIFICATE_CSV_HEADER: &str =
    "trial,seed,kind,a,epsilon,lambda,slack,line_constant,link,lhs,rhs,pass";

/// CSV header for check-suite summaries.
pub const CHECK_CSV_HEADER: &str = "suite,cases,checks,violations,pass";

fn fmt_r(r: &Exponent) -> String {
    r.to_string()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row of the per-trial ratio table.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub seed: u64,
    pub p: f64,
    pub r: Exponent,
    pub j: usize,
    pub ratio_line: f64,
    pub ratio_sys: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Renders trial rows under [`TRIAL_CSV_HEADER`].
pub fn trial_rows_csv(rows: &[TrialRow]) -> String {
    let mut out = String::from(TRIAL_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.trial,
            row.seed,
            row.p,
            fmt_r(&row.r),
            row.j,
            row.ratio_line,
            row.ratio_sys,
            row.slack,
            row.pass
        ));
    }
    out
}

/// Comparison trials under [`COMPARISON_CSV_HEADER`]: one row per trial and
/// kind, strong rows first.
pub fn comparison_csv(report: &ComparisonReport) -> String {
    let tol = crate::inequalities::LINK_TOLERANCE;
    let mut out = String::from(COMPARISON_CSV_HEADER);
    out.push('\n');
    for t in &report.trials {
        out.push_str(&format!(
            "{},{},strong,{},{},{},{},{},{},{}\n",
            t.trial,
            t.seed,
            report.p,
            fmt_r(&report.r),
            report.components,
            t.strong_line,
            t.strong_sys,
            t.slack,
            t.strong_sys <= t.slack * t.strong_line + tol
        ));
    }
    for t in &report.trials {
        out.push_str(&format!(
            "{},{},weak,{},{},{},{},{},{},{}\n",
            t.trial,
            t.seed,
            report.p,
            fmt_r(&report.r),
            report.components,
            t.weak_line,
            t.weak_sys,
            t.slack,
            t.weak_sys <= t.slack * t.weak_line + tol
        ));
    }
    out
}

/// Certificate links under [`CERTIFICATE_CSV_HEADER`], one row per link.
pub fn certificates_csv(reports: &[CertificateReport]) -> String {
    let mut out = String::from(CERTIFICATE_CSV_HEADER);
    out.push('\n');
    for report in reports {
        for link in &report.links {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                report.trial.map(|t| t.to_string()).unwrap_or_default(),
                report.seed.map(|s| s.to_string()).unwrap_or_default(),
                report.kind,
                report.a,
                report.epsilon,
                fmt_opt(report.lambda),
                report.slack_factor,
                report.line_constant,
                link.name,
                link.lhs,
                link.rhs,
                link.pass
            ));
        }
    }
    out
}

/// Summary of one check suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub cases: u64,
    pub checks: u64,
    pub violations: u64,
    pub pass: bool,
}

impl SuiteSummary {
    pub fn from_axioms(report: &AxiomReport) -> Self {
        SuiteSummary {
            suite: format!("axioms({})", report.operator),
            cases: report.trials,
            checks: report.checks,
            violations: report.violations.len() as u64,
            pass: report.pass(),
        }
    }

    pub fn from_equimeasurability(report: &EquimeasurabilityReport) -> Self {
        SuiteSummary {
            suite: format!("equimeasurability({})", report.operator),
            cases: report.cases,
            checks: report.checks,
            violations: report.violations.len() as u64,
            pass: report.pass(),
        }
    }
}

/// Suite summaries under [`CHECK_CSV_HEADER`].
pub fn suites_csv(suites: &[SuiteSummary]) -> String {
    let mut out = String::from(CHECK_CSV_HEADER);
    out.push('\n');
    for s in suites {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            s.suite, s.cases, s.checks, s.violations, s.pass
        ));
    }
    out
}

/// Side-by-side summary of a line/system estimate pair.
pub fn estimates_csv(line: &ConstantEstimate, transferred: &ConstantEstimate) -> String {
    let mut out =
        String::from("side,kind,p,r,j,value,n_trials,ensemble_seed,degenerate,operator,space\n");
    for (side, est) in [("line", line), ("system", transferred)] {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            side,
            est.kind,
            est.p,
            fmt_r(&est.r),
            est.components,
            est.value,
            est.n_trials,
            est.ensemble_seed,
            est.degenerate_trials,
            est.operator,
            est.space
        ));
    }
    out
}

/// Versioned JSON envelope wrapping a command's payload.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope<C: Serialize, P: Serialize> {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub config: C,
    pub pass: bool,
    pub payload: P,
}

impl<C: Serialize, P: Serialize> Envelope<C, P> {
    pub fn new(command: &'static str, config: C, pass: bool, payload: P) -> Self {
        Envelope {
            schema_version: SCHEMA_VERSION,
            command,
            config,
            pass,
            payload,
        }
    }
}
