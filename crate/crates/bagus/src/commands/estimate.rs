//! `bagus estimate`: fit one dataset, write the estimate, the inclusion
//! probabilities, the thresholded graph, and the fit summary.

use crate::errors::{CliError, CliResult};
use crate::manifest::{EstimateParams, RunContext};
use crate::report::{fit_json, write_json, GraphJson, GridPointJson};
use bagus_core::{bic, convexity_cap, fit, sample_covariance, threshold_graph};
use std::path::Path;

pub fn run(params: &EstimateParams, ctx: &RunContext) -> CliResult<()> {
    let loaded = crate::io::read_dataset(Path::new(&params.data))?;
    let data = if params.center {
        loaded.data.centered()
    } else {
        loaded.data
    };
    let n = data.n;
    let s = sample_covariance(&data)?;

    let (result, score, grid_info, best_index) = if params.tune {
        let report = super::tune_parallel(&s, n, ctx.jobs)?;
        let grid_info: Vec<GridPointJson> = report
            .grid
            .iter()
            .zip(&report.scores)
            .map(|(h, &bic)| GridPointJson {
                v0: h.v0,
                v1: h.v1,
                bic,
            })
            .collect();
        let score = report.scores[report.best_index];
        (report.best_fit, score, Some(grid_info), Some(report.best_index))
    } else {
        let h = params
            .hyper
            .as_ref()
            .ok_or_else(|| CliError::usage("missing hyperparameters"))?
            .to_hyper()?;
        if h.b >= convexity_cap(n, h.v0) {
            eprintln!(
                "warning: B = {} is not below the strict-convexity cap {:.6}; proceeding (result flagged non-convex-regime)",
                h.b,
                convexity_cap(n, h.v0)
            );
        }
        let result = fit(&s, n, &h, None)?;
        let score = bic(&result, &s, n)?;
        (result, score, None, None)
    };

    let graph = threshold_graph(&result.pmat, params.threshold)?;

    crate::io::write_matrix(&ctx.out.join("theta.csv"), &result.theta_hat)?;
    crate::io::write_matrix(&ctx.out.join("pmat.csv"), &result.pmat)?;
    write_json(
        &ctx.out.join("graph.json"),
        &GraphJson::new(&graph, params.threshold),
    )?;
    write_json(
        &ctx.out.join("fit.json"),
        &fit_json(
            &result,
            score,
            params.tune,
            params.threshold,
            params.center,
            grid_info,
            best_index,
        ),
    )?;
    Ok(())
}
