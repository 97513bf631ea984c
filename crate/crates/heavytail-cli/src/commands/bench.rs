//! `bench`: seeded Monte-Carlo experiments over a grid of (n, nu) cells.
//!
//! Every replication of every cell owns a private generator substream
//! keyed by a global replication id, and all aggregation walks results in
//! replication order, so the written report is byte-identical for any
//! `--threads` value or scheduling.

use std::time::Instant;

use heavytail_core::{
    estimate_nu_kurtosis, estimate_nu_opp, fit_tyler, nu_from_theta, sample_cov, sample_mvt,
    twe_scale, DataMatrix, ExperimentDesign, Method, SpdMatrix, TylerOptions,
};
use rayon::prelude::*;

use crate::cli::{BenchArgs, OutputFormat};
use crate::commands::nu::{OPP_MAX_ITER, OPP_TOL};
use crate::io::{write_output, CliError, CliResult};
use crate::report::{
    aggregate_method, raw_csv, BenchReport, CellReport, RawCell, RepOutcome, SCHEMA_VERSION,
};

pub fn run(args: &BenchArgs) -> CliResult<()> {
    let mut methods = args.methods.clone();
    methods.sort();
    methods.dedup();
    if methods.is_empty() {
        return Err(CliError::input("no methods requested"));
    }
    let threads = resolve_threads(args.threads)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::internal(format!("thread pool: {e}")))?;

    let scatter = super::resolve_scatter(args.p, args.rho, args.eta, args.scatter_file.as_deref())?;
    // With a user-supplied scatter the true scale is whatever that matrix
    // carries; MSE of the scale estimates is measured against it.
    let true_eta = scatter.trace_mean();
    let tyler_opts = TylerOptions {
        tol: args.tol,
        max_iter: args.max_iter,
    };

    let t0 = Instant::now();
    let mut cells = Vec::new();
    let mut raw_cells: Vec<RawCell> = Vec::new();
    let mut cell_idx = 0u64;
    for &n in &args.n {
        for &nu in &args.nu {
            let design = ExperimentDesign {
                p: args.p,
                n,
                nu,
                rho: args.rho,
                eta: true_eta,
                replications: args.reps,
                seed: args.seed,
            };
            design
                .validate()
                .map_err(|e| CliError::input(e.to_string()))?;
            let base_stream = cell_idx * args.reps as u64;
            let per_rep: Vec<Vec<RepOutcome>> = pool.install(|| {
                (0..args.reps)
                    .into_par_iter()
                    .map(|rep| {
                        run_replication(
                            &design,
                            &scatter,
                            &methods,
                            &tyler_opts,
                            base_stream + rep as u64,
                        )
                    })
                    .collect()
            });
            // transpose: per-method outcome vectors in replication order
            let by_method: Vec<(Method, Vec<RepOutcome>)> = methods
                .iter()
                .enumerate()
                .map(|(mi, &m)| (m, per_rep.iter().map(|r| r[mi].clone()).collect::<Vec<_>>()))
                .collect();
            let method_reports = by_method
                .iter()
                .map(|(m, outcomes)| aggregate_method(*m, outcomes, nu, true_eta))
                .collect();
            cells.push(CellReport {
                n,
                nu: nu.to_string(),
                methods: method_reports,
            });
            if args.raw_output.is_some() {
                raw_cells.push((n, nu.to_string(), by_method));
            }
            cell_idx += 1;
        }
    }

    let report = BenchReport {
        schema_version: SCHEMA_VERSION,
        p: args.p,
        rho: args.rho,
        eta: true_eta,
        seed: args.seed,
        replications: args.reps,
        cells,
    };
    let text = match args.format {
        OutputFormat::Csv => report.to_csv(),
        OutputFormat::Json => report.to_json(),
    };
    write_output(args.output.as_deref(), &text)?;
    if let Some(raw_path) = &args.raw_output {
        write_output(Some(raw_path), &raw_csv(&raw_cells))?;
    }
    eprintln!(
        "bench: {} cell(s) x {} replication(s) in {:.1}s on {} thread(s)",
        report.cells.len(),
        args.reps,
        t0.elapsed().as_secs_f64(),
        threads
    );
    Ok(())
}

fn resolve_threads(flag: Option<usize>) -> CliResult<usize> {
    let n = match flag {
        Some(v) => v,
        None => match std::env::var("HEAVYTAIL_THREADS") {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| CliError::input(format!("HEAVYTAIL_THREADS='{s}' is not a count")))?,
            Err(_) => std::thread::available_parallelism().map_or(1, |v| v.get()),
        },
    };
    if n == 0 {
        return Err(CliError::input("thread count must be at least 1"));
    }
    Ok(n)
}

/// All requested estimates for one replication. Estimator failures are
/// recorded per method; a sampling failure fails every method of the
/// replication.
fn run_replication(
    design: &ExperimentDesign,
    scatter: &SpdMatrix,
    methods: &[Method],
    tyler_opts: &TylerOptions,
    stream: u64,
) -> Vec<RepOutcome> {
    let data = match sample_mvt(design, scatter, stream as usize) {
        Ok(d) => d,
        Err(_) => return vec![RepOutcome::Failed; methods.len()],
    };
    methods
        .iter()
        .map(|m| match m {
            Method::Twe => twe_outcome(&data, tyler_opts),
            Method::Opp => opp_outcome(&data),
            Method::Kurtosis => match estimate_nu_kurtosis(&data) {
                Ok(e) => RepOutcome::Estimate {
                    nu: e.nu,
                    eta: None,
                },
                Err(_) => RepOutcome::Failed,
            },
        })
        .collect()
}

/// Shape fit, scale from the weights, ratio inversion. Composes the same
/// public operations as the one-shot estimator and additionally reports
/// the scale estimate.
fn twe_outcome(data: &DataMatrix, opts: &TylerOptions) -> RepOutcome {
    let fit = match fit_tyler(data, opts) {
        Ok(f) => f,
        Err(_) => return RepOutcome::Failed,
    };
    let eta = twe_scale(&fit);
    let theta_raw = sample_cov(data).trace_mean() / eta;
    match nu_from_theta(theta_raw) {
        Ok(nu) => RepOutcome::Estimate { nu, eta: Some(eta) },
        Err(_) => RepOutcome::Failed,
    }
}

fn opp_outcome(data: &DataMatrix) -> RepOutcome {
    match estimate_nu_opp(data, OPP_TOL, OPP_MAX_ITER) {
        Ok(e) => {
            // the trace ratio ties the implied scale to the tail estimate
            let eta = sample_cov(data).trace_mean() / e.theta_hat;
            RepOutcome::Estimate {
                nu: e.nu,
                eta: Some(eta),
            }
        }
        Err(_) => RepOutcome::Failed,
    }
}
