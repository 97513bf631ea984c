//! `simulate`: one seeded draw of synthetic elliptical data as CSV.

use heavytail_core::{sample_mvt, ExperimentDesign};

use crate::cli::SimulateArgs;
use crate::io::{data_to_csv, write_output, CliError, CliResult};

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let design = ExperimentDesign {
        p: args.p,
        n: args.n,
        nu: args.nu,
        rho: args.rho,
        eta: args.eta,
        replications: 1,
        seed: args.seed,
    };
    design
        .validate()
        .map_err(|e| CliError::input(e.to_string()))?;
    let sigma = super::resolve_scatter(args.p, args.rho, args.eta, args.scatter_file.as_deref())?;
    let data = sample_mvt(&design, &sigma, 0).map_err(|e| CliError::input(e.to_string()))?;
    write_output(args.output.as_deref(), &data_to_csv(&data))
}
