//! Bayesian regularization for Gaussian graphical models.
//!
//! Estimates a sparse precision matrix as the MAP of a posterior built from a
//! spike-and-slab Lasso prior on off-diagonal entries and an exponential prior
//! on the diagonal, subject to a spectral-norm cap. The optimizer is an EM
//! algorithm: the E-step computes posterior inclusion probabilities for every
//! edge, the M-step sweeps the columns of the precision matrix with coordinate
//! descent while maintaining the inverse incrementally. Edge recovery comes
//! from thresholding the inclusion probabilities.
//!
//! The crate is `no_std` (alloc required): it contains only the numerical
//! machinery. File formats, the CLI, and parallel execution live in the
//! companion `bagus` crate.
//!
//! Modules:
//! - [`matrix`]: dense symmetric matrices, factorizations, column partitions
//! - [`penalty`]: the spike-and-slab penalty, its derivatives, the objective
//! - [`em`]: the EM fit itself
//! - [`select`]: BIC tuning, edge thresholds, ROC sweeps
//! - [`sim`]: ground-truth generators and a seeded replication harness
//! - [`metrics`]: estimation-error norms, confusion metrics, forecasting

#![no_std]

extern crate alloc;

pub mod em;
pub mod error;
pub mod matrix;
pub mod metrics;
pub mod penalty;
pub mod rng;
pub mod select;
pub mod sim;

pub use em::{e_step, fit, fit_observed, kkt_residual, solve_theta12, FitResult, FitState};
pub use error::Error;
pub use matrix::{
    chol_inverse, inv11_from_w, partition, rank_two_spectral_bound, sample_covariance,
    spectral_norm, ColumnPartition, Dataset, SymMatrix,
};
pub use metrics::{
    aafe, confusion, error_norms, forecast, mcc, Confusion, ForecastTask, MetricsReport,
};
pub use penalty::{
    convexity_cap, inclusion_prob, objective, pen_ss, pen_ss_grad, pen_ss_hess,
    subgradient_interval, ConstraintMode, Hyperparameters,
};
pub use select::{
    assemble_tune_report, bic, default_grid, roc_sweep, threshold_graph, tune, tune_on_cov,
    GraphStructure, RocCurve,
    TuneReport,
};
pub use sim::{
    replicate, sample_mvn, truth_matrix, MetricSummary, Model, ReplicateReport, SimulationSpec,
};
