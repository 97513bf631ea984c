//! Per-cell Monte-Carlo statistics and their CSV/JSON serialization.
//!
//! A replication either produces an estimate, produces the
//! Gaussian-or-lighter sentinel, or fails in the solver. Failed
//! replications are excluded from the statistics and counted; sentinel
//! replications are scored at the top of the finite clamp range (1000),
//! since dropping them would bias the error statistics downward.
//!
//! The report file deliberately carries no wall-clock timing so that a
//! fixed seed yields byte-identical output at any thread count; timing
//! goes to stderr.

use heavytail_core::{Method, Nu, NU_MAX};
use serde::Serialize;

use crate::io::fmt_f64;

pub const SCHEMA_VERSION: u32 = 1;

/// Outcome of one replication for one method.
#[derive(Debug, Clone)]
pub enum RepOutcome {
    Estimate { nu: Nu, eta: Option<f64> },
    Failed,
}

impl RepOutcome {
    /// Scoring value entering the statistics; sentinels clamp to the top
    /// of the finite range.
    fn score(&self) -> Option<(f64, bool, Option<f64>)> {
        match self {
            RepOutcome::Estimate { nu, eta } => match nu {
                Nu::Finite(v) => Some((*v, false, *eta)),
                Nu::Infinite => Some((NU_MAX, true, *eta)),
            },
            RepOutcome::Failed => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub min: f64,
    pub max: f64,
}

/// Summary with quartiles by the inclusive-median rule: each half of the
/// sorted sample includes the middle element when the count is odd.
pub fn summary_stats(values: &[f64]) -> Option<SummaryStats> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite stats input"));
    let n = sorted.len();
    let med = median_of(&sorted);
    let half = n / 2;
    let (lower, upper) = if n % 2 == 1 {
        (&sorted[..=half], &sorted[half..])
    } else {
        (&sorted[..half], &sorted[half..])
    };
    Some(SummaryStats {
        mean: sorted.iter().sum::<f64>() / n as f64,
        median: med,
        q1: median_of(lower),
        q3: median_of(upper),
        min: sorted[0],
        max: sorted[n - 1],
    })
}

fn median_of(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

pub fn mse_against(values: &[f64], truth: f64) -> f64 {
    values
        .iter()
        .map(|v| (v - truth) * (v - truth))
        .sum::<f64>()
        / values.len() as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodReport {
    pub method: String,
    pub requested: usize,
    pub completed: usize,
    pub failed: usize,
    pub sentinels: usize,
    pub nu_stats: Option<SummaryStats>,
    /// Mean squared error of the tail estimate; absent when the true tail
    /// is the Gaussian sentinel.
    pub nu_mse: Option<f64>,
    pub eta_stats: Option<SummaryStats>,
    pub eta_mse: Option<f64>,
}

/// Aggregate one method's replication outcomes against the true cell
/// parameters.
pub fn aggregate_method(
    method: Method,
    outcomes: &[RepOutcome],
    true_nu: Nu,
    true_eta: f64,
) -> MethodReport {
    let mut nus = Vec::with_capacity(outcomes.len());
    let mut etas = Vec::new();
    let mut sentinels = 0usize;
    let mut failed = 0usize;
    for o in outcomes {
        match o.score() {
            Some((nu, is_sentinel, eta)) => {
                nus.push(nu);
                if is_sentinel {
                    sentinels += 1;
                }
                if let Some(e) = eta {
                    etas.push(e);
                }
            }
            None => failed += 1,
        }
    }
    let nu_mse = match true_nu {
        Nu::Finite(t) if !nus.is_empty() => Some(mse_against(&nus, t)),
        _ => None,
    };
    let eta_mse = if etas.is_empty() {
        None
    } else {
        Some(mse_against(&etas, true_eta))
    };
    MethodReport {
        method: method.tag().to_string(),
        requested: outcomes.len(),
        completed: outcomes.len() - failed,
        failed,
        sentinels,
        nu_stats: summary_stats(&nus),
        nu_mse,
        eta_stats: summary_stats(&etas),
        eta_mse,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CellReport {
    pub n: usize,
    pub nu: String,
    pub methods: Vec<MethodReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub p: usize,
    pub rho: f64,
    pub eta: f64,
    pub seed: u64,
    pub replications: usize,
    pub cells: Vec<CellReport>,
}

const CSV_HEADER: &str = "schema_version,p,rho,eta,seed,replications,n,nu,method,requested,completed,failed,sentinels,nu_mean,nu_median,nu_q1,nu_q3,nu_min,nu_max,nu_mse,eta_mean,eta_median,eta_q1,eta_q3,eta_min,eta_max,eta_mse";

impl BenchReport {
    /// One CSV row per (cell, method), sorted by the construction order
    /// (n, nu) and the method tag within a cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for cell in &self.cells {
            for m in &cell.methods {
                let stats = |s: &Option<SummaryStats>| -> [String; 6] {
                    match s {
                        Some(s) => [
                            fmt_f64(s.mean),
                            fmt_f64(s.median),
                            fmt_f64(s.q1),
                            fmt_f64(s.q3),
                            fmt_f64(s.min),
                            fmt_f64(s.max),
                        ],
                        None => Default::default(),
                    }
                };
                let nu_s = stats(&m.nu_stats);
                let eta_s = stats(&m.eta_stats);
                let fields: Vec<String> = vec![
                    SCHEMA_VERSION.to_string(),
                    self.p.to_string(),
                    fmt_f64(self.rho),
                    fmt_f64(self.eta),
                    self.seed.to_string(),
                    self.replications.to_string(),
                    cell.n.to_string(),
                    cell.nu.clone(),
                    m.method.clone(),
                    m.requested.to_string(),
                    m.completed.to_string(),
                    m.failed.to_string(),
                    m.sentinels.to_string(),
                    nu_s[0].clone(),
                    nu_s[1].clone(),
                    nu_s[2].clone(),
                    nu_s[3].clone(),
                    nu_s[4].clone(),
                    nu_s[5].clone(),
                    m.nu_mse.map(fmt_f64).unwrap_or_default(),
                    eta_s[0].clone(),
                    eta_s[1].clone(),
                    eta_s[2].clone(),
                    eta_s[3].clone(),
                    eta_s[4].clone(),
                    eta_s[5].clone(),
                    m.eta_mse.map(fmt_f64).unwrap_or_default(),
                ];
                out.push_str(&fields.join(","));
                out.push('\n');
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// One cell of raw results: (n, nu label, per-method outcome vectors).
pub type RawCell = (usize, String, Vec<(Method, Vec<RepOutcome>)>);

/// Raw per-replication dump: one row per (cell, method, replication).
pub fn raw_csv(cells: &[RawCell]) -> String {
    let mut out = String::from("schema_version,n,nu,method,replication,nu_hat,eta_hat,status\n");
    for (n, nu, methods) in cells {
        for (method, outcomes) in methods {
            for (rep, o) in outcomes.iter().enumerate() {
                let (nu_hat, eta_hat, status) = match o {
                    RepOutcome::Estimate { nu, eta } => (
                        nu.to_string(),
                        eta.map(fmt_f64).unwrap_or_default(),
                        match nu {
                            Nu::Finite(_) => "ok",
                            Nu::Infinite => "sentinel",
                        },
                    ),
                    RepOutcome::Failed => (String::new(), String::new(), "failed"),
                };
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    SCHEMA_VERSION,
                    n,
                    nu,
                    method.tag(),
                    rep,
                    nu_hat,
                    eta_hat,
                    status
                ));
            }
        }
    }
    out
}
