//! `nu`: tail-parameter estimates as JSON, one entry per method.

use heavytail_core::{
    estimate_nu_kurtosis, estimate_nu_opp, estimate_nu_twe, Method, Nu, NuEstimate, TylerOptions,
};
use serde_json::json;

use crate::cli::{NuArgs, OutputFormat};
use crate::io::{load_csv, numerical, write_output, CliError, CliResult};
use crate::report::SCHEMA_VERSION;

/// Stopping rule of the iterative (MLE-based) estimator; the shape-solver
/// tolerance is the user-facing --tol.
pub const OPP_TOL: f64 = heavytail_core::tail::OPP_DEFAULT_TOL;
pub const OPP_MAX_ITER: usize = heavytail_core::tail::OPP_DEFAULT_MAX_ITER;

pub fn run(args: &NuArgs) -> CliResult<()> {
    if args.format != OutputFormat::Json {
        return Err(CliError::input("nu reports are JSON; use --format json"));
    }
    let data = load_csv(&args.input)?;
    super::require_tall(&data)?;

    let mut methods = args.methods.clone();
    methods.sort();
    methods.dedup();

    let opts = TylerOptions {
        tol: args.tol,
        max_iter: args.max_iter,
    };
    let mut estimates = Vec::new();
    for method in methods {
        let est = match method {
            Method::Twe => estimate_nu_twe(&data, &opts),
            Method::Opp => estimate_nu_opp(&data, OPP_TOL, OPP_MAX_ITER),
            Method::Kurtosis => estimate_nu_kurtosis(&data),
        }
        .map_err(numerical)?;
        estimates.push(estimate_json(&est));
    }

    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "nu",
        "n": data.n(),
        "p": data.p(),
        "estimates": estimates,
    });
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| CliError::internal(format!("serialize: {e}")))?;
    text.push('\n');
    write_output(args.output.as_deref(), &text)
}

/// Sentinel estimates serialize nu as the string "inf".
pub fn nu_json(nu: Nu) -> serde_json::Value {
    match nu {
        Nu::Finite(v) => json!(v),
        Nu::Infinite => json!("inf"),
    }
}

fn estimate_json(est: &NuEstimate) -> serde_json::Value {
    json!({
        "method": est.method.tag(),
        "nu": nu_json(est.nu),
        "theta_hat": est.theta_hat,
        "iterations": est.iterations,
        "residuals": est.residuals,
    })
}
