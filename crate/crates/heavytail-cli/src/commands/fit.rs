//! `fit`: shape matrix, scale, scatter, and weight diagnostics as JSON.

use heavytail_core::{fit_tyler, scale_diagnostics, shrink_scatter, twe_scatter, TylerOptions};
use serde_json::json;

use crate::cli::{FitArgs, OutputFormat};
use crate::io::{load_csv, numerical, write_output, CliError, CliResult};
use crate::report::{summary_stats, SCHEMA_VERSION};

pub fn run(args: &FitArgs) -> CliResult<()> {
    if args.format != OutputFormat::Json {
        return Err(CliError::input("fit reports are JSON; use --format json"));
    }
    let data = load_csv(&args.input)?;
    super::require_tall(&data)?;
    if let Some(beta) = args.beta {
        if !(0.0..=1.0).contains(&beta) {
            return Err(CliError::input(format!("--beta {beta} outside [0, 1]")));
        }
    }

    let opts = TylerOptions {
        tol: args.tol,
        max_iter: args.max_iter,
    };
    let fit = fit_tyler(&data, &opts).map_err(numerical)?;
    let est = twe_scatter(&fit, &data).map_err(numerical)?;
    let diag = scale_diagnostics(&fit);
    let weights = summary_stats(&est.normalized_weights).expect("n >= 1");

    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "fit",
        "n": data.n(),
        "p": data.p(),
        "iterations": fit.iterations(),
        "residual": fit.residual(),
        "scale": est.scale,
        "shape": matrix_rows(fit.shape().matrix()),
        "scatter": matrix_rows(est.scatter.matrix()),
        "normalized_weights_summary": {
            "min": weights.min,
            "max": weights.max,
            "mean": weights.mean,
            "median": weights.median,
        },
        "scale_diagnostics": {
            "harmonic_mean": diag.harmonic_mean,
            "median": diag.median,
            "trimmed_mean": diag.trimmed_mean,
        },
    });
    if let Some(beta) = args.beta {
        let shrunk = shrink_scatter(&est, beta).map_err(numerical)?;
        doc["beta"] = json!(beta);
        doc["shrunk_scatter"] = json!(matrix_rows(shrunk.matrix()));
    }

    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| CliError::internal(format!("serialize: {e}")))?;
    text.push('\n');
    write_output(args.output.as_deref(), &text)
}

pub fn matrix_rows(m: &heavytail_core::SquareMatrix) -> Vec<Vec<f64>> {
    (0..m.dim()).map(|i| m.row(i).to_vec()).collect()
}
