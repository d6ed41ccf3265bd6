//! `bagus roc`: edge-recovery ROC for one synthetic dataset, either at a
//! chosen grid point or taking the best AUC across the whole grid.

use crate::errors::{CliError, CliResult};
use crate::manifest::{RocParams, RunContext};
use crate::report::{roc_csv, write_json, RocJson};
use bagus_core::rng::split_seed;
use bagus_core::{
    default_grid, fit, roc_sweep, sample_covariance, sample_mvn, truth_matrix, GraphStructure,
    Model, RocCurve, SimulationSpec,
};
use std::str::FromStr;

pub fn run(params: &RocParams, ctx: &RunContext) -> CliResult<()> {
    if params.points < 2 {
        return Err(CliError::usage("--points must be at least 2"));
    }
    let model = Model::from_str(&params.model).map_err(CliError::from)?;
    let mut spec = SimulationSpec::new(model, params.p, params.n, params.seed);
    spec.sigma2 = params.sigma2;
    let truth = truth_matrix(&spec)?;
    let truth_graph = GraphStructure::from_nonzeros(&truth, 0.0);
    let data = sample_mvn(&truth, spec.n, split_seed(spec.seed, 0))?;
    let s = sample_covariance(&data)?;
    let grid = default_grid(spec.n, spec.p);

    let (curve, grid_index, grid_aucs): (RocCurve, usize, Option<Vec<f64>>) =
        match params.grid_point {
            Some(idx) => {
                let h = grid.get(idx).ok_or_else(|| {
                    CliError::usage(format!(
                        "--grid-point {idx} out of range (grid has {} points)",
                        grid.len()
                    ))
                })?;
                let res = fit(&s, spec.n, h, None)?;
                let curve = roc_sweep(&res.pmat, &truth_graph, params.points)?;
                (curve, idx, None)
            }
            None => {
                let curves: Vec<CliResult<RocCurve>> =
                    crate::runner::map_indexed(ctx.jobs, &grid, |_, h| {
                        let res = fit(&s, spec.n, h, None)?;
                        Ok(roc_sweep(&res.pmat, &truth_graph, params.points)?)
                    });
                let mut best: Option<(usize, RocCurve)> = None;
                let mut aucs = Vec::with_capacity(curves.len());
                for (idx, c) in curves.into_iter().enumerate() {
                    let c = c?;
                    aucs.push(c.auc);
                    if best.as_ref().map_or(true, |(_, b)| c.auc > b.auc) {
                        best = Some((idx, c));
                    }
                }
                let (idx, curve) =
                    best.ok_or_else(|| CliError::Numeric("empty tuning grid".into()))?;
                (curve, idx, Some(aucs))
            }
        };

    std::fs::write(ctx.out.join("roc.csv"), roc_csv(&curve))?;
    write_json(
        &ctx.out.join("roc.json"),
        &RocJson {
            schema: crate::SCHEMA,
            model: params.model.clone(),
            p: params.p,
            n: params.n,
            seed: params.seed,
            auc: curve.auc,
            grid_index,
            grid_aucs,
            points: params.points,
        },
    )?;
    Ok(())
}
