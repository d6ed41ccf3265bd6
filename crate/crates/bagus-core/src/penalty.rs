//! The spike-and-slab Lasso penalty, its derivatives, the posterior objective,
//! and the strict-convexity cap on the spectral constraint.
//!
//! The penalty on an off-diagonal entry is the negative log of a two-Laplace
//! mixture: a narrow spike of scale `v0` and a wide slab of scale `v1 > v0`.
//! Its derivative is a weighted average of `1/v1` and `1/v0` where the weight
//! is the conditional probability that the entry came from the slab — the same
//! quantity the E-step uses as an inclusion probability.

use crate::error::{Error, Result};
use crate::matrix::{cholesky, SymMatrix};

/// Everything that determines one fit.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparameters {
    /// Spike scale.
    pub v0: f64,
    /// Slab scale, `v1 > v0`.
    pub v1: f64,
    /// Prior slab weight, in (0, 1).
    pub eta: f64,
    /// Exponential rate on diagonal entries, `>= 0`.
    pub tau: f64,
    /// Spectral-norm cap on the estimate.
    pub b: f64,
    /// Coordinate-descent stopping tolerance (max coordinate change).
    pub inner_tol: f64,
    /// Outer-sweep stopping tolerance (max entry change of the estimate).
    pub outer_tol: f64,
    pub max_inner: usize,
    pub max_outer: usize,
    /// How the norm cap is enforced during column updates.
    pub constraint: ConstraintMode,
}

/// Enforcement mode for the cap `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintMode {
    /// Incremental rank-two spectral bound with exact recomputation on
    /// violation; reverts the column when the exact norm still exceeds `b`.
    Spectral,
    /// Proxy: cap the largest absolute element of the updated column instead.
    MaxElem,
}

impl Hyperparameters {
    /// Scales `(v0, v1)` with the conventional defaults: `eta = 0.5`,
    /// `tau = v0`, and `b` just inside the strict-convexity cap for `n`
    /// observations.
    pub fn new(v0: f64, v1: f64, n: usize) -> Self {
        Hyperparameters {
            v0,
            v1,
            eta: 0.5,
            tau: v0,
            b: 0.99 * convexity_cap(n, v0),
            inner_tol: 1e-6,
            outer_tol: 1e-4,
            max_inner: 100,
            max_outer: 100,
            constraint: ConstraintMode::Spectral,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v0 > 0.0 && self.v1 > self.v0) {
            return Err(Error::InvalidHyperparameters("need 0 < v0 < v1"));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(Error::InvalidHyperparameters("need 0 < eta < 1"));
        }
        if !(self.tau >= 0.0) {
            return Err(Error::InvalidHyperparameters("need tau >= 0"));
        }
        if !(self.b > 0.0) {
            return Err(Error::InvalidHyperparameters("need B > 0"));
        }
        if !(self.inner_tol > 0.0 && self.outer_tol > 0.0) {
            return Err(Error::InvalidHyperparameters("tolerances must be positive"));
        }
        if self.max_inner < 1 || self.max_outer < 1 {
            return Err(Error::InvalidHyperparameters("iteration caps must be >= 1"));
        }
        Ok(())
    }
}

/// Log-density offsets of the two mixture components at `|theta| = a`:
/// `x1 = log(eta/(2 v1)) - a/v1` (slab), `x0` likewise for the spike.
#[inline]
fn component_logs(a: f64, h: &Hyperparameters) -> (f64, f64) {
    let x1 = libm::log(h.eta / (2.0 * h.v1)) - a / h.v1;
    let x0 = libm::log((1.0 - h.eta) / (2.0 * h.v0)) - a / h.v0;
    (x1, x0)
}

/// Numerically stable logistic function.
#[inline]
fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

/// Conditional probability that an entry of size `theta` came from the slab.
/// Identical to the posterior inclusion probability of the E-step.
#[inline]
fn slab_weight(theta: f64, h: &Hyperparameters) -> f64 {
    // log-odds = log(v0/v1) + log(eta/(1-eta)) + |theta| (1/v0 - 1/v1)
    let log_odds = libm::log(h.v0 / h.v1) + libm::log(h.eta / (1.0 - h.eta))
        + theta.abs() * (1.0 / h.v0 - 1.0 / h.v1);
    logistic(log_odds)
}

/// Spike-and-slab penalty
/// `pen(theta) = -log[(eta/(2 v1)) e^{-|theta|/v1} + ((1-eta)/(2 v0)) e^{-|theta|/v0}]`,
/// evaluated in log-sum-exp form anchored at the larger component so the
/// spike term's underflow at large `|theta|` cannot poison the result.
pub fn pen_ss(theta: f64, h: &Hyperparameters) -> f64 {
    let (x1, x0) = component_logs(theta.abs(), h);
    let (hi, lo) = if x1 >= x0 { (x1, x0) } else { (x0, x1) };
    -(hi + libm::log1p(libm::exp(lo - hi)))
}

/// First derivative of [`pen_ss`] for `theta != 0`:
/// `sign(theta) [w/v1 + (1 - w)/v0]` with `w` the slab weight.
pub fn pen_ss_grad(theta: f64, h: &Hyperparameters) -> Result<f64> {
    if theta == 0.0 {
        return Err(Error::ContractViolation(
            "pen_ss_grad at 0; use subgradient_interval",
        ));
    }
    let w = slab_weight(theta, h);
    Ok(theta.signum() * (w / h.v1 + (1.0 - w) / h.v0))
}

/// Subdifferential of [`pen_ss`] at `theta = 0`: `[-lambda0, +lambda0]` where
/// `lambda0 = w(0)/v1 + (1 - w(0))/v0` is the one-sided derivative magnitude.
pub fn subgradient_interval(h: &Hyperparameters) -> (f64, f64) {
    let w0 = slab_weight(0.0, h);
    let lambda0 = w0 / h.v1 + (1.0 - w0) / h.v0;
    (-lambda0, lambda0)
}

/// Second derivative of [`pen_ss`] for `theta != 0`:
/// `-w (1 - w) (1/v0 - 1/v1)^2`. Its magnitude is bounded by
/// `(1/4)(1/v0 - 1/v1)^2`.
pub fn pen_ss_hess(theta: f64, h: &Hyperparameters) -> Result<f64> {
    if theta == 0.0 {
        return Err(Error::ContractViolation("pen_ss_hess at 0"));
    }
    let w = slab_weight(theta, h);
    let k = 1.0 / h.v0 - 1.0 / h.v1;
    Ok(-w * (1.0 - w) * k * k)
}

/// Posterior inclusion probability of an entry of size `theta`, strictly
/// inside (0, 1) and non-decreasing in `|theta|` when `v1 > v0`.
pub fn inclusion_prob(theta: f64, h: &Hyperparameters) -> f64 {
    // Clamp away exact 0/1 so downstream log-odds and weighted penalties
    // stay finite even for extreme entries.
    slab_weight(theta, h)
        .max(f64::MIN_POSITIVE)
        .min(1.0 - f64::EPSILON / 2.0)
}

/// Negative log-posterior (up to a constant):
/// `(n/2)(tr(S Theta) - log det Theta) + sum_{i<j} pen_ss(theta_ij) + tau * sum_i theta_ii`.
pub fn objective(theta: &SymMatrix, s: &SymMatrix, n: usize, h: &Hyperparameters) -> Result<f64> {
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
    let mut pen = 0.0;
    for i in 0..p {
        for j in (i + 1)..p {
            pen += pen_ss(theta.get(i, j), h);
        }
        pen += h.tau * theta.get(i, i);
    }
    Ok(0.5 * n as f64 * (trace - log_det) + pen)
}

/// Strict-convexity cap `sqrt(2 n v0)`: when the spectral bound `B` stays
/// below this value the constrained problem has a unique minimizer.
pub fn convexity_cap(n: usize, v0: f64) -> f64 {
    libm::sqrt(2.0 * n as f64 * v0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyper(v0: f64, v1: f64, eta: f64) -> Hyperparameters {
        Hyperparameters {
            v0,
            v1,
            eta,
            tau: 0.0,
            b: 10.0,
            inner_tol: 1e-8,
            outer_tol: 1e-6,
            max_inner: 100,
            max_outer: 100,
            constraint: ConstraintMode::Spectral,
        }
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "got {a}, want {b}");
    }

    #[test]
    fn pen_collapses_to_single_laplace_when_scales_match() {
        let h = hyper(0.7, 0.7, 0.3);
        for theta in [-2.0f64, -0.1, 0.0, 0.4, 5.0] {
            let want = theta.abs() / 0.7 + libm::log(2.0 * 0.7);
            assert_close(pen_ss(theta, &h), want, 1e-12);
        }
    }

    #[test]
    fn pen_is_even() {
        let h = hyper(0.1, 1.0, 0.5);
        for theta in [0.01, 0.3, 1.7, 42.0] {
            assert_eq!(pen_ss(theta, &h), pen_ss(-theta, &h));
        }
    }

    #[test]
    fn pen_survives_extreme_arguments() {
        let h = hyper(1e-3, 10.0, 0.5);
        let v = pen_ss(1e4, &h);
        assert!(v.is_finite());
        // Far out, the slab dominates: pen ~ |theta|/v1 + log(2 v1 / eta).
        assert_close(v, 1e4 / 10.0 + libm::log(2.0 * 10.0 / 0.5), 1e-9);
    }

    #[test]
    fn grad_matches_single_laplace_case() {
        let h = hyper(0.7, 0.7, 0.3);
        assert_close(pen_ss_grad(0.5, &h).unwrap(), 1.0 / 0.7, 1e-14);
        assert_close(pen_ss_grad(-0.5, &h).unwrap(), -1.0 / 0.7, 1e-14);
    }

    #[test]
    fn grad_limit_is_slab_rate() {
        let h = hyper(0.1, 1.0, 0.5);
        assert_close(pen_ss_grad(1e3, &h).unwrap(), 1.0 / 1.0, 1e-9);
    }

    #[test]
    fn grad_rejects_zero() {
        let h = hyper(0.1, 1.0, 0.5);
        assert!(matches!(
            pen_ss_grad(0.0, &h),
            Err(Error::ContractViolation(_))
        ));
        assert!(matches!(
            pen_ss_hess(0.0, &h),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn subgradient_interval_trivial_cases() {
        let h = hyper(0.5, 0.5, 0.4);
        let (lo, hi) = subgradient_interval(&h);
        assert_close(hi, 2.0, 1e-14);
        assert_close(lo, -2.0, 1e-14);

        // eta -> 0 leaves only the spike rate.
        let h = hyper(0.25, 5.0, 1e-14);
        let (_, hi) = subgradient_interval(&h);
        assert_close(hi, 4.0, 1e-9);
    }

    #[test]
    fn hess_vanishes_when_scales_match() {
        let h = hyper(0.7, 0.7, 0.3);
        assert_eq!(pen_ss_hess(0.9, &h).unwrap(), 0.0);
    }

    #[test]
    fn hess_respects_square_bound() {
        let h = hyper(0.1, 1.0, 0.5);
        let k = 1.0 / 0.1 - 1.0;
        for theta in [0.01, 0.1, 0.26, 0.5, 1.0, 3.0] {
            let v = pen_ss_hess(theta, &h).unwrap().abs();
            assert!(v <= 0.25 * k * k + 1e-12, "|pen''|={v} at {theta}");
        }
    }

    #[test]
    fn inclusion_prob_symmetric_mixture_is_half() {
        let h = hyper(0.4, 0.4, 0.5);
        for theta in [0.0, 1.0, -3.0] {
            assert_close(inclusion_prob(theta, &h), 0.5, 1e-14);
        }
    }

    #[test]
    fn inclusion_prob_at_zero_matches_ratio_form() {
        // v0 = 0.1, v1 = 10, eta = 0.5: odds = v0/v1 = 0.01, p = 1/101.
        let h = hyper(0.1, 10.0, 0.5);
        assert_close(inclusion_prob(0.0, &h), 1.0 / 101.0, 1e-12);
    }

    #[test]
    fn inclusion_prob_is_monotone_in_magnitude() {
        let h = hyper(0.05, 2.0, 0.3);
        assert!(inclusion_prob(1.0, &h) > inclusion_prob(0.5, &h));
        assert!(inclusion_prob(-1.0, &h) > inclusion_prob(0.5, &h));
    }

    #[test]
    fn objective_identity_case() {
        let p = 5;
        let n = 20;
        let h = hyper(0.1, 1.0, 0.5);
        let theta = SymMatrix::identity(p);
        let s = SymMatrix::identity(p);
        let want = 0.5 * n as f64 * p as f64
            + (p * (p - 1) / 2) as f64 * pen_ss(0.0, &h);
        assert_close(objective(&theta, &s, n, &h).unwrap(), want, 1e-10);
    }

    #[test]
    fn objective_rejects_indefinite() {
        let h = hyper(0.1, 1.0, 0.5);
        let theta = SymMatrix::from_diagonal(&[1.0, -2.0]);
        let s = SymMatrix::identity(2);
        assert_eq!(
            objective(&theta, &s, 10, &h).err(),
            Some(Error::NotPositiveDefinite)
        );
    }

    #[test]
    fn convexity_cap_values() {
        assert_close(convexity_cap(100, 0.005), 1.0, 1e-14);
        assert_close(convexity_cap(200, 0.01), 2.0, 1e-14);
        // Doubling n scales the cap by sqrt(2).
        assert_close(
            convexity_cap(2 * 57, 0.037) / convexity_cap(57, 0.037),
            libm::sqrt(2.0),
            1e-12,
        );
    }

    #[test]
    fn validate_catches_bad_fields() {
        let mut h = Hyperparameters::new(0.1, 1.0, 100);
        assert!(h.validate().is_ok());
        h.v1 = 0.05;
        assert!(h.validate().is_err());
        h = Hyperparameters::new(0.1, 1.0, 100);
        h.eta = 1.0;
        assert!(h.validate().is_err());
        h = Hyperparameters::new(0.1, 1.0, 100);
        h.tau = -0.1;
        assert!(h.validate().is_err());
    }
}
