//! Model selection: hyperparameter grids, BIC scoring, edge thresholding,
//! and ROC sweeps over the inclusion-probability threshold.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::em::{fit, FitResult};
use crate::error::{Error, Result};
use crate::matrix::{cholesky, sample_covariance, Dataset, SymMatrix};
use crate::penalty::Hyperparameters;

/// Entries with absolute value above this count as edges in the BIC and in
/// tie-breaking; the coordinate updates produce exact zeros, so any tiny
/// tolerance works. Fixed for reproducibility.
pub const ZERO_TOL: f64 = 1e-8;

/// Undirected graph over `p` nodes as a set of `(i, j)` pairs with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphStructure {
    p: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl GraphStructure {
    pub fn empty(p: usize) -> Self {
        GraphStructure {
            p,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges(p: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            if i == j {
                return Err(Error::InvalidParameter("self-loop in edge list"));
            }
            let (lo, hi) = if i < j { (i, j) } else { (j, i) };
            if hi >= p {
                return Err(Error::IndexOutOfRange { index: hi, dim: p });
            }
            set.insert((lo, hi));
        }
        Ok(GraphStructure { p, edges: set })
    }

    /// Edges of a matrix: off-diagonal entries with `|m_ij| > tol`.
    pub fn from_nonzeros(m: &SymMatrix, tol: f64) -> Self {
        let mut set = BTreeSet::new();
        for i in 0..m.p() {
            for j in (i + 1)..m.p() {
                if m.get(i, j).abs() > tol {
                    set.insert((i, j));
                }
            }
        }
        GraphStructure { p: m.p(), edges: set }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        self.edges.contains(&(lo, hi))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }
}

/// Outcome of a grid search.
#[derive(Debug, Clone)]
pub struct TuneReport {
    pub grid: Vec<Hyperparameters>,
    /// BIC per grid point, parallel to `grid`; failed points carry infinity
    /// and are listed in `failures`.
    pub scores: Vec<f64>,
    pub best_index: usize,
    pub best_fit: FitResult,
    pub failures: Vec<(usize, Error)>,
}

/// BIC of a fitted precision matrix:
/// `n (tr(S Theta) - log det Theta) + log(n) * #{i<j : |theta_ij| > ZERO_TOL}`.
pub fn bic(fit: &FitResult, s: &SymMatrix, n: usize) -> Result<f64> {
    let theta = &fit.theta_hat;
    if theta.p() != s.p() {
        return Err(Error::ShapeMismatch {
            expected: s.p(),
            got: theta.p(),
        });
    }
    let p = theta.p();
    let log_det = cholesky(theta)?.log_det();
    let mut trace = 0.0;
    for i in 0..p {
        for j in 0..p {
            trace += s.get(i, j) * theta.get(i, j);
        }
    }
    let edges = count_nonzero_edges(theta);
    Ok(n as f64 * (trace - log_det) + libm::log(n as f64) * edges as f64)
}

fn count_nonzero_edges(theta: &SymMatrix) -> usize {
    let mut count = 0;
    for i in 0..theta.p() {
        for j in (i + 1)..theta.p() {
            if theta.get(i, j).abs() > ZERO_TOL {
                count += 1;
            }
        }
    }
    count
}

/// The 16-point tuning grid: `v0 = tau = {0.4, 2, 4, 20} * sqrt(1/(n log p))`
/// crossed with `v1 = v0 * {1.5, 3, 5, 10}`, `eta = 0.5`, and the default
/// spectral cap for `n`. Ordered with `v0` outermost.
pub fn default_grid(n: usize, p: usize) -> Vec<Hyperparameters> {
    assert!(n >= 2 && p >= 2, "grid needs n >= 2 and p >= 2");
    let base = libm::sqrt(1.0 / (n as f64 * libm::log(p as f64)));
    let mut grid = Vec::with_capacity(16);
    for c0 in [0.4, 2.0, 4.0, 20.0] {
        let v0 = c0 * base;
        for mult in [1.5, 3.0, 5.0, 10.0] {
            grid.push(Hyperparameters::new(v0, v0 * mult, n));
        }
    }
    grid
}

/// Picks the minimizing grid point; ties go to fewer edges, then lower index.
/// `scored[i]` is `Some((bic, edge_count))` for successful fits.
pub(crate) fn pick_best(scored: &[Option<(f64, usize)>]) -> Option<usize> {
    let mut best: Option<(usize, f64, usize)> = None;
    for (idx, entry) in scored.iter().enumerate() {
        let &(score, edges) = match entry {
            Some(e) => e,
            None => continue,
        };
        let better = match best {
            None => true,
            Some((_, bs, be)) => score < bs || (score == bs && edges < be),
        };
        if better {
            best = Some((idx, score, edges));
        }
    }
    best.map(|(idx, _, _)| idx)
}

/// Builds a [`TuneReport`] from per-point outcomes (fit plus BIC score),
/// applying the scoring and tie-break rules. Callers that fit the grid
/// concurrently reduce through this so the report is order-independent.
pub fn assemble_tune_report(
    grid: Vec<Hyperparameters>,
    outcomes: Vec<Result<(FitResult, f64)>>,
) -> Result<TuneReport> {
    let mut scores = Vec::with_capacity(grid.len());
    let mut failures = Vec::new();
    let mut fits: Vec<Option<FitResult>> = Vec::with_capacity(grid.len());
    let mut scored: Vec<Option<(f64, usize)>> = Vec::with_capacity(grid.len());
    for (idx, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok((fit_res, score)) => {
                let edges = count_nonzero_edges(&fit_res.theta_hat);
                scores.push(score);
                scored.push(Some((score, edges)));
                fits.push(Some(fit_res));
            }
            Err(e) => {
                scores.push(f64::INFINITY);
                scored.push(None);
                fits.push(None);
                failures.push((idx, e));
            }
        }
    }
    let best_index = pick_best(&scored).ok_or(Error::TuningFailed {
        failures: failures.clone(),
    })?;
    let best_fit = fits[best_index]
        .take()
        .ok_or(Error::InternalConsistency("best fit missing"))?;
    Ok(TuneReport {
        grid,
        scores,
        best_index,
        best_fit,
        failures,
    })
}

/// Fits every grid point on the sample covariance of `data` and scores by BIC.
pub fn tune(data: &Dataset, grid: &[Hyperparameters]) -> Result<TuneReport> {
    let s = sample_covariance(data)?;
    tune_on_cov(&s, data.n, grid)
}

/// [`tune`] on a precomputed covariance; grid points are fitted independently
/// in order (callers wanting concurrency run `fit` per point themselves and
/// reduce in grid order).
pub fn tune_on_cov(s: &SymMatrix, n: usize, grid: &[Hyperparameters]) -> Result<TuneReport> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty tuning grid"));
    }
    let outcomes = grid
        .iter()
        .map(|h| fit(s, n, h, None).and_then(|f| bic(&f, s, n).map(|score| (f, score))))
        .collect();
    assemble_tune_report(grid.to_vec(), outcomes)
}

/// Edge set at threshold `t`: pairs with inclusion probability `>= t`.
pub fn threshold_graph(pmat: &SymMatrix, t: f64) -> Result<GraphStructure> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidParameter("threshold must lie in (0, 1)"));
    }
    let mut edges = BTreeSet::new();
    for i in 0..pmat.p() {
        for j in (i + 1)..pmat.p() {
            if pmat.get(i, j) >= t {
                edges.insert((i, j));
            }
        }
    }
    Ok(GraphStructure { p: pmat.p(), edges })
}

/// ROC curve of an inclusion-probability matrix against a truth graph.
#[derive(Debug, Clone)]
pub struct RocCurve {
    /// Monotone `(fpr, tpr)` pairs from `(0, 0)` to `(1, 1)`.
    pub points: Vec<(f64, f64)>,
    /// Trapezoid area under the *full* distinct-threshold curve; equals the
    /// tie-aware pairwise-ordering probability.
    pub auc: f64,
}

/// Sweeps the edge threshold over the distinct `p_ij` values.
///
/// The returned point list is capped at `num_points` interior thresholds
/// (plus the `(0,0)` and `(1,1)` endpoints); the AUC is always computed from
/// the uncapped curve.
pub fn roc_sweep(
    pmat: &SymMatrix,
    truth: &GraphStructure,
    num_points: usize,
) -> Result<RocCurve> {
    if pmat.p() != truth.p() {
        return Err(Error::ShapeMismatch {
            expected: truth.p(),
            got: pmat.p(),
        });
    }
    if num_points < 2 {
        return Err(Error::InvalidParameter("need num_points >= 2"));
    }
    let p = pmat.p();
    // (score, is_true_edge) per unordered pair.
    let mut pairs: Vec<(f64, bool)> = Vec::with_capacity(p * (p - 1) / 2);
    for i in 0..p {
        for j in (i + 1)..p {
            pairs.push((pmat.get(i, j), truth.has_edge(i, j)));
        }
    }
    let npos = pairs.iter().filter(|(_, y)| *y).count();
    let nneg = pairs.len() - npos;
    if npos == 0 || nneg == 0 {
        // Degenerate truth: the curve is the diagonal by convention.
        return Ok(RocCurve {
            points: alloc::vec![(0.0, 0.0), (1.0, 1.0)],
            auc: 0.5,
        });
    }
    // Descending by score; thresholds at each distinct score include ties.
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut full: Vec<(f64, f64)> = Vec::new();
    full.push((0.0, 0.0));
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut idx = 0;
    while idx < pairs.len() {
        let score = pairs[idx].0;
        while idx < pairs.len() && pairs[idx].0 == score {
            if pairs[idx].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            idx += 1;
        }
        full.push((fp as f64 / nneg as f64, tp as f64 / npos as f64));
    }
    if *full.last().unwrap() != (1.0, 1.0) {
        full.push((1.0, 1.0));
    }
    let mut auc = 0.0;
    for w in full.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        auc += (x1 - x0) * (y0 + y1) * 0.5;
    }
    // Cap the interior points for plotting.
    let interior = full.len() - 2;
    let points = if interior > num_points {
        let mut capped = Vec::with_capacity(num_points + 2);
        capped.push(full[0]);
        for k in 0..num_points {
            // Evenly spaced interior picks, deterministic.
            let pos = 1 + (k * (interior - 1)) / (num_points - 1).max(1);
            capped.push(full[pos]);
        }
        capped.push(*full.last().unwrap());
        capped.dedup();
        capped
    } else {
        full
    };
    Ok(RocCurve { points, auc })
}
