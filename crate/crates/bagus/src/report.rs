//! JSON artifacts: fit summaries, graphs, benchmark tables, ROC companions,
//! and metric reports. Every payload carries `"schema": "bagus/v1"` and is
//! serialized with stable field order so reruns are byte-identical.

use crate::errors::CliResult;
use crate::io::fmt_f64;
use bagus_core::{
    ConstraintMode, FitResult, GraphStructure, Hyperparameters, MetricSummary, MetricsReport,
    RocCurve,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Serialize, Deserialize, Clone)]
pub struct HyperJson {
    pub v0: f64,
    pub v1: f64,
    pub eta: f64,
    pub tau: f64,
    pub b: f64,
    pub inner_tol: f64,
    pub outer_tol: f64,
    pub max_inner: usize,
    pub max_outer: usize,
    pub constraint: String,
}

impl From<&Hyperparameters> for HyperJson {
    fn from(h: &Hyperparameters) -> Self {
        HyperJson {
            v0: h.v0,
            v1: h.v1,
            eta: h.eta,
            tau: h.tau,
            b: h.b,
            inner_tol: h.inner_tol,
            outer_tol: h.outer_tol,
            max_inner: h.max_inner,
            max_outer: h.max_outer,
            constraint: match h.constraint {
                ConstraintMode::Spectral => "spectral".into(),
                ConstraintMode::MaxElem => "maxelem".into(),
            },
        }
    }
}

impl HyperJson {
    pub fn to_hyper(&self) -> CliResult<Hyperparameters> {
        let constraint = match self.constraint.as_str() {
            "spectral" => ConstraintMode::Spectral,
            "maxelem" => ConstraintMode::MaxElem,
            other => {
                return Err(crate::errors::CliError::usage(format!(
                    "unknown constraint mode '{other}'"
                )))
            }
        };
        Ok(Hyperparameters {
            v0: self.v0,
            v1: self.v1,
            eta: self.eta,
            tau: self.tau,
            b: self.b,
            inner_tol: self.inner_tol,
            outer_tol: self.outer_tol,
            max_inner: self.max_inner,
            max_outer: self.max_outer,
            constraint,
        })
    }
}

#[derive(Debug, Serialize)]
pub struct GridPointJson {
    pub v0: f64,
    pub v1: f64,
    pub bic: f64,
}

#[derive(Debug, Serialize)]
pub struct FitJson {
    pub schema: &'static str,
    pub converged: bool,
    pub sweeps: usize,
    pub final_objective: f64,
    pub kkt_residual: f64,
    pub bic: f64,
    pub convex_regime: bool,
    pub tuned: bool,
    pub threshold: f64,
    pub centered: bool,
    pub hyper: HyperJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<GridPointJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_grid_index: Option<usize>,
    pub objective_trace: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct GraphJson {
    pub schema: &'static str,
    pub p: usize,
    pub threshold: f64,
    pub edge_count: usize,
    pub edges: Vec<[usize; 2]>,
}

impl GraphJson {
    pub fn new(graph: &GraphStructure, threshold: f64) -> Self {
        GraphJson {
            schema: crate::SCHEMA,
            p: graph.p(),
            threshold,
            edge_count: graph.edge_count(),
            edges: graph.edges().map(|(i, j)| [i, j]).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Serialize)]
pub struct BenchmarkJson {
    pub schema: &'static str,
    pub model: String,
    pub p: usize,
    pub n: usize,
    pub seed: u64,
    pub reps: usize,
    pub failures: usize,
    pub metrics: BTreeMap<String, MeanSd>,
    /// The paper tables' `mean(sd)` strings, three decimals.
    pub display: BTreeMap<String, String>,
}

impl BenchmarkJson {
    pub fn from_summaries(
        model: String,
        p: usize,
        n: usize,
        seed: u64,
        reps: usize,
        failures: usize,
        summaries: &[MetricSummary],
    ) -> Self {
        let mut metrics = BTreeMap::new();
        let mut display = BTreeMap::new();
        for s in summaries {
            metrics.insert(
                s.name.clone(),
                MeanSd {
                    mean: s.mean,
                    sd: s.sd,
                },
            );
            display.insert(s.name.clone(), s.display());
        }
        BenchmarkJson {
            schema: crate::SCHEMA,
            model,
            p,
            n,
            seed,
            reps,
            failures,
            metrics,
            display,
        }
    }

    /// Plot-ready companion table: `metric,mean,sd` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("# metric,mean,sd\n");
        for (name, ms) in &self.metrics {
            out.push_str(&format!("{name},{},{}\n", fmt_f64(ms.mean), fmt_f64(ms.sd)));
        }
        out
    }
}

#[derive(Debug, Serialize)]
pub struct RocJson {
    pub schema: &'static str,
    pub model: String,
    pub p: usize,
    pub n: usize,
    pub seed: u64,
    pub auc: f64,
    pub grid_index: usize,
    /// AUC per grid point when the whole grid was swept.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_aucs: Option<Vec<f64>>,
    pub points: usize,
}

/// Flat serialization of a metrics report, field names fixed by the format.
#[derive(Debug, Serialize)]
pub struct MetricsJson {
    pub fnorm: f64,
    pub max_norm: f64,
    pub spectral_err: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub mcc: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub auc: Option<f64>,
}

impl From<&MetricsReport> for MetricsJson {
    fn from(m: &MetricsReport) -> Self {
        MetricsJson {
            fnorm: m.fnorm,
            max_norm: m.max_norm,
            spectral_err: m.spectral_err,
            sensitivity: m.sensitivity,
            specificity: m.specificity,
            mcc: m.mcc,
            auc: m.auc,
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| crate::errors::CliError::usage(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn fit_json(
    fit: &FitResult,
    bic: f64,
    tuned: bool,
    threshold: f64,
    centered: bool,
    grid: Option<Vec<GridPointJson>>,
    best_grid_index: Option<usize>,
) -> FitJson {
    FitJson {
        schema: crate::SCHEMA,
        converged: fit.converged,
        sweeps: fit.sweeps,
        final_objective: fit.final_objective,
        kkt_residual: fit.kkt_residual,
        bic,
        convex_regime: fit.convex_regime,
        tuned,
        threshold,
        centered,
        hyper: HyperJson::from(&fit.hyper),
        grid,
        best_grid_index,
        objective_trace: fit.objective_trace.clone(),
    }
}

pub fn roc_csv(curve: &RocCurve) -> String {
    let mut out = String::from("# fpr,tpr\n");
    for (fpr, tpr) in &curve.points {
        out.push_str(&format!("{},{}\n", fmt_f64(*fpr), fmt_f64(*tpr)));
    }
    out
}
