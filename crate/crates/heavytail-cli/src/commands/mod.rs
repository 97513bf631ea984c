pub mod bench;
pub mod fit;
pub mod nu;
pub mod simulate;

use heavytail_core::{DataMatrix, SpdMatrix};
use std::path::Path;

use crate::io::{load_scatter_csv, CliError, CliResult};

/// Scatter matrix for a simulation: the user-supplied file when given,
/// otherwise the AR(1) model.
pub fn resolve_scatter(
    p: usize,
    rho: f64,
    eta: f64,
    scatter_file: Option<&Path>,
) -> CliResult<SpdMatrix> {
    match scatter_file {
        Some(path) => load_scatter_csv(path, p),
        None => {
            heavytail_core::ar1_scatter(p, rho, eta).map_err(|e| CliError::input(e.to_string()))
        }
    }
}

/// The estimators all require more samples than dimensions; reject wide
/// input up front as an input error rather than deep in a solver.
pub fn require_tall(data: &DataMatrix) -> CliResult<()> {
    if data.n() <= data.p() {
        return Err(CliError::input(format!(
            "need more observations than variables: n = {}, p = {}",
            data.n(),
            data.p()
        )));
    }
    Ok(())
}
