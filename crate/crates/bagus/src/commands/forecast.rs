//! `bagus forecast`: fit the precision matrix on training rows, then predict
//! the trailing block of every test row from its leading block.

use crate::errors::{CliError, CliResult};
use crate::manifest::{ForecastParams, RunContext};
use bagus_core::{aafe, fit, forecast, sample_covariance, ForecastTask};
use std::path::Path;

pub fn run(params: &ForecastParams, ctx: &RunContext) -> CliResult<()> {
    let train = crate::io::read_dataset(Path::new(&params.train))?.data;
    let test = crate::io::read_dataset(Path::new(&params.test))?.data;
    if test.p != train.p {
        return Err(CliError::usage(format!(
            "train has {} columns but test has {}",
            train.p, test.p
        )));
    }
    let p = train.p;
    if params.split == 0 || params.split >= p {
        return Err(CliError::usage(format!(
            "--split must lie in [1, {})",
            p
        )));
    }

    // Mean from the training columns; covariance from the centered rows.
    let mu = train.column_means();
    let s = sample_covariance(&train.centered())?;
    let result = if params.tune {
        super::tune_parallel(&s, train.n, ctx.jobs)?.best_fit
    } else {
        let h = params
            .hyper
            .as_ref()
            .ok_or_else(|| CliError::usage("missing hyperparameters"))?
            .to_hyper()?;
        fit(&s, train.n, &h, None)?
    };

    let task = ForecastTask::new(mu, result.theta_hat, params.split)?;
    let mut predictions = Vec::with_capacity(test.n);
    let mut actuals = Vec::with_capacity(test.n);
    for i in 0..test.n {
        let row = test.row(i);
        predictions.push(forecast(&task, &row[..params.split])?);
        actuals.push(row[params.split..].to_vec());
    }
    let errors = aafe(&predictions, &actuals)?;

    crate::io::write_rows(&ctx.out.join("predictions.csv"), &predictions)?;
    crate::io::write_series(&ctx.out.join("aafe.csv"), &errors)?;
    Ok(())
}
