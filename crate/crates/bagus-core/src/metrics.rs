//! Estimation-error norms, edge-recovery confusion metrics, and the
//! conditional-mean forecaster.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{cholesky, spectral_norm, SymMatrix};
use crate::select::GraphStructure;

/// Flat bundle of estimation and selection metrics for one fit.
#[derive(Debug, Clone)]
pub struct MetricsReport {
    pub fnorm: f64,
    pub max_norm: f64,
    pub spectral_err: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub mcc: f64,
    pub auc: Option<f64>,
}

impl MetricsReport {
    /// Assembles the full report from an estimate, the truth, and their graphs.
    pub fn compute(
        theta_hat: &SymMatrix,
        theta0: &SymMatrix,
        est: &GraphStructure,
        truth: &GraphStructure,
        auc: Option<f64>,
    ) -> Result<MetricsReport> {
        let (fnorm, max_norm, spectral_err) = error_norms(theta_hat, theta0)?;
        let c = confusion(est, truth)?;
        Ok(MetricsReport {
            fnorm,
            max_norm,
            spectral_err,
            sensitivity: c.sensitivity(),
            specificity: c.specificity(),
            mcc: mcc(&c),
            auc,
        })
    }
}

/// `(Frobenius, entrywise max, spectral)` norms of `theta_hat - theta0`.
pub fn error_norms(theta_hat: &SymMatrix, theta0: &SymMatrix) -> Result<(f64, f64, f64)> {
    if theta_hat.p() != theta0.p() {
        return Err(Error::ShapeMismatch {
            expected: theta0.p(),
            got: theta_hat.p(),
        });
    }
    let p = theta_hat.p();
    let diff = SymMatrix::from_fn_upper(p, |i, j| theta_hat.get(i, j) - theta0.get(i, j));
    let mut sum_sq = 0.0;
    let mut max_abs = 0.0f64;
    for i in 0..p {
        for j in 0..p {
            let d = diff.get(i, j);
            sum_sq += d * d;
            max_abs = max_abs.max(d.abs());
        }
    }
    Ok((libm::sqrt(sum_sq), max_abs, spectral_norm(&diff)))
}

/// Edge-detection confusion counts over the `p(p-1)/2` unordered pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Confusion {
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
}

impl Confusion {
    pub fn sensitivity(&self) -> f64 {
        ratio(self.true_pos, self.true_pos + self.false_neg)
    }

    pub fn specificity(&self) -> f64 {
        ratio(self.true_neg, self.true_neg + self.false_pos)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Confusion counts of an estimated edge set against the truth.
pub fn confusion(est: &GraphStructure, truth: &GraphStructure) -> Result<Confusion> {
    if est.p() != truth.p() {
        return Err(Error::ShapeMismatch {
            expected: truth.p(),
            got: est.p(),
        });
    }
    let p = est.p();
    let mut c = Confusion {
        true_pos: 0,
        false_pos: 0,
        true_neg: 0,
        false_neg: 0,
    };
    for i in 0..p {
        for j in (i + 1)..p {
            match (est.has_edge(i, j), truth.has_edge(i, j)) {
                (true, true) => c.true_pos += 1,
                (true, false) => c.false_pos += 1,
                (false, false) => c.true_neg += 1,
                (false, true) => c.false_neg += 1,
            }
        }
    }
    Ok(c)
}

/// Matthews correlation coefficient; 0 when any denominator factor vanishes
/// (the standard convention for degenerate counts).
pub fn mcc(c: &Confusion) -> f64 {
    let (tp, fp, tn, fne) = (
        c.true_pos as f64,
        c.false_pos as f64,
        c.true_neg as f64,
        c.false_neg as f64,
    );
    let denom = (tp + fp) * (tp + fne) * (tn + fp) * (tn + fne);
    if denom == 0.0 {
        return 0.0;
    }
    (tp * tn - fp * fne) / libm::sqrt(denom)
}

/// A fitted Gaussian model set up to predict the trailing `p - split`
/// coordinates from the leading `split` ones.
#[derive(Debug, Clone)]
pub struct ForecastTask {
    pub mu: Vec<f64>,
    pub theta: SymMatrix,
    /// Number of observed leading coordinates, `1 <= split < p`.
    pub split: usize,
}

impl ForecastTask {
    pub fn new(mu: Vec<f64>, theta: SymMatrix, split: usize) -> Result<Self> {
        let p = theta.p();
        if mu.len() != p {
            return Err(Error::ShapeMismatch {
                expected: p,
                got: mu.len(),
            });
        }
        if split == 0 || split >= p {
            return Err(Error::InvalidParameter("need 1 <= split < p"));
        }
        Ok(ForecastTask { mu, theta, split })
    }
}

/// Conditional-mean forecast `u2 - Theta_22^{-1} Theta_21 (z1 - u1)`.
///
/// `Theta_22` is applied by solving the linear system through its Cholesky
/// factor; the inverse is never formed.
pub fn forecast(task: &ForecastTask, z1: &[f64]) -> Result<Vec<f64>> {
    let k = task.split;
    let p = task.theta.p();
    if z1.len() != k {
        return Err(Error::ShapeMismatch {
            expected: k,
            got: z1.len(),
        });
    }
    let m = p - k;
    let theta22 = SymMatrix::from_fn_upper(m, |r, c| task.theta.get(k + r, k + c));
    let factor = cholesky(&theta22).map_err(|_| {
        Error::InternalConsistency("Theta_22 of a PD matrix must be PD")
    })?;
    // rhs = Theta_21 (z1 - u1)
    let mut rhs = alloc::vec![0.0f64; m];
    for r in 0..m {
        let mut acc = 0.0;
        for c in 0..k {
            acc += task.theta.get(k + r, c) * (z1[c] - task.mu[c]);
        }
        rhs[r] = acc;
    }
    let x = factor.solve(&rhs);
    Ok((0..m).map(|r| task.mu[k + r] - x[r]).collect())
}

/// Average absolute forecast error per time point: mean over rows of
/// `|pred - actual|`, column by column.
pub fn aafe(predictions: &[Vec<f64>], actuals: &[Vec<f64>]) -> Result<Vec<f64>> {
    if predictions.len() != actuals.len() || predictions.is_empty() {
        return Err(Error::ShapeMismatch {
            expected: actuals.len(),
            got: predictions.len(),
        });
    }
    let horizon = predictions[0].len();
    for (pr, ar) in predictions.iter().zip(actuals) {
        if pr.len() != horizon || ar.len() != horizon {
            return Err(Error::ShapeMismatch {
                expected: horizon,
                got: pr.len().min(ar.len()),
            });
        }
    }
    let days = predictions.len() as f64;
    let mut out = alloc::vec![0.0f64; horizon];
    for (pr, ar) in predictions.iter().zip(actuals) {
        for t in 0..horizon {
            out[t] += (pr[t] - ar[t]).abs();
        }
    }
    for v in &mut out {
        *v /= days;
    }
    Ok(out)
}
