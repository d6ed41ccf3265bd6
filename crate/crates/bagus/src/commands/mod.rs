//! Command implementations.

mod estimate;
mod forecast;
mod roc;
mod simulate;

use crate::errors::CliResult;
use crate::manifest::{write_manifest, ResolvedCommand, RunContext};

pub fn execute(resolved: &ResolvedCommand, ctx: &RunContext) -> CliResult<()> {
    match resolved {
        ResolvedCommand::Estimate(p) => estimate::run(p, ctx)?,
        ResolvedCommand::Simulate(p) => simulate::run(p, ctx)?,
        ResolvedCommand::Roc(p) => roc::run(p, ctx)?,
        ResolvedCommand::Forecast(p) => forecast::run(p, ctx)?,
    }
    write_manifest(ctx, resolved)
}

/// Grid tuning with fits spread over the worker pool, reduced in grid order.
pub(crate) fn tune_parallel(
    s: &bagus_core::SymMatrix,
    n: usize,
    jobs: usize,
) -> Result<bagus_core::TuneReport, bagus_core::Error> {
    let grid = bagus_core::default_grid(n, s.p());
    let outcomes = crate::runner::map_indexed(jobs, &grid, |_, h| {
        bagus_core::fit(s, n, h, None)
            .and_then(|f| bagus_core::bic(&f, s, n).map(|score| (f, score)))
    });
    bagus_core::assemble_tune_report(grid, outcomes)
}
