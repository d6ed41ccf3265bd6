//! Oracle checks for the penalty layer: finite differences for the
//! derivatives, naive scalar formulas for the values, cofactor determinants
//! for the objective, and midpoint convexity inside the spectral ball.

mod common;

use bagus_core::rng::SeededRng;
use bagus_core::{
    convexity_cap, objective, pen_ss, pen_ss_grad, pen_ss_hess, subgradient_interval,
    Hyperparameters, SymMatrix,
};
use common::{central_diff, cofactor_det, hyper, naive_pen_ss, random_spd, second_diff};

#[test]
fn pen_value_matches_high_precision_reference() {
    let h = hyper(0.1, 1.0, 0.5);
    // Frozen from a 50-digit evaluation of the mixture formula.
    let reference = 1.780952876798978302681633;
    assert!((pen_ss(0.5, &h) - reference).abs() < 1e-12);
    // The naive direct route agrees too at this benign argument.
    assert!((naive_pen_ss(0.5, &h) - reference).abs() < 1e-12);
}

#[test]
fn pen_grad_matches_central_difference() {
    let h = hyper(0.1, 1.0, 0.5);
    let fd = central_diff(|t| pen_ss(t, &h), 0.5, 1e-6);
    assert!((pen_ss_grad(0.5, &h).unwrap() - fd).abs() < 1e-6);
}

#[test]
fn pen_grad_matches_differences_over_theta_grid() {
    let mut rng = SeededRng::new(201);
    for _ in 0..10 {
        let v0 = rng.range(0.05, 0.5);
        let v1 = v0 * rng.range(2.0, 20.0);
        let eta = rng.range(0.1, 0.9);
        let h = hyper(v0, v1, eta);
        for k in -2..=3i32 {
            let mag = libm::pow(10.0, k as f64) * v0;
            for theta in [mag, -mag] {
                let fd = central_diff(|t| pen_ss(t, &h), theta, 1e-6);
                let grad = pen_ss_grad(theta, &h).unwrap();
                assert!(
                    (grad - fd).abs() < 1e-6,
                    "grad {grad} vs fd {fd} at theta={theta}, v0={v0}, v1={v1}, eta={eta}"
                );
            }
        }
    }
}

#[test]
fn pen_hess_matches_second_difference() {
    let h = hyper(0.1, 1.0, 0.5);
    let fd = second_diff(|t| pen_ss(t, &h), 0.3, 1e-4);
    let hess = pen_ss_hess(0.3, &h).unwrap();
    assert!((hess - fd).abs() < 1e-5, "hess {hess} vs fd {fd}");
}

#[test]
fn pen_hess_matches_differences_over_theta_grid() {
    let mut rng = SeededRng::new(202);
    for _ in 0..10 {
        let v0 = rng.range(0.05, 0.5);
        let v1 = v0 * rng.range(2.0, 20.0);
        let eta = rng.range(0.1, 0.9);
        let h = hyper(v0, v1, eta);
        for k in -2..=3i32 {
            let theta = libm::pow(10.0, k as f64) * v0;
            let fd = second_diff(|t| pen_ss(t, &h), theta, 1e-4);
            let hess = pen_ss_hess(theta, &h).unwrap();
            assert!(
                (hess - fd).abs() < 1e-5,
                "hess {hess} vs fd {fd} at theta={theta}, v0={v0}, v1={v1}"
            );
        }
    }
}

#[test]
fn subgradient_matches_one_sided_difference() {
    let h = hyper(0.1, 10.0, 0.5);
    let (lo, hi) = subgradient_interval(&h);
    // Frozen from exact arithmetic: (eta/v1^2+(1-eta)/v0^2)/(eta/v1+(1-eta)/v0).
    assert!((hi - 9.90198019801980198).abs() < 1e-12);
    assert_eq!(lo, -hi);
    // One-sided difference just right of the kink.
    let eps = 1e-9;
    let fd = (pen_ss(eps, &h) - pen_ss(0.0, &h)) / eps;
    assert!((hi - fd).abs() < 1e-5, "interval {hi} vs fd {fd}");
}

#[test]
fn objective_matches_term_by_term_recomputation() {
    let mut rng = SeededRng::new(203);
    let h = hyper(0.2, 1.5, 0.4);
    let n = 37;
    let theta = random_spd(4, 0.7, &mut rng);
    let s = random_spd(4, 0.5, &mut rng);
    let got = objective(&theta, &s, n, &h).unwrap();

    let mut trace = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            trace += s.get(i, j) * theta.get(i, j);
        }
    }
    let log_det = cofactor_det(&theta).ln();
    let mut pen = 0.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            pen += naive_pen_ss(theta.get(i, j), &h);
        }
    }
    let mut diag = 0.0;
    for i in 0..4 {
        diag += h.tau * theta.get(i, i);
    }
    let want = 0.5 * n as f64 * (trace - log_det) + pen + diag;
    assert!((got - want).abs() < 1e-10, "objective {got} vs oracle {want}");
}

#[test]
fn objective_decreases_toward_unpenalized_mle() {
    // With huge scales the penalty is negligible and the Gaussian term pulls
    // the estimate from I toward S^{-1}.
    let mut h = hyper(1e6, 1e7, 0.5);
    h.tau = 0.0;
    let mut rng = SeededRng::new(204);
    let s = random_spd(4, 0.8, &mut rng);
    let target = bagus_core::chol_inverse(&s).unwrap();
    let eye = SymMatrix::identity(4);
    let mut prev = objective(&eye, &s, 50, &h).unwrap();
    for step in 1..=4 {
        let t = step as f64 / 4.0;
        let point = SymMatrix::from_fn_upper(4, |i, j| {
            (1.0 - t) * eye.get(i, j) + t * target.get(i, j)
        });
        let val = objective(&point, &s, 50, &h).unwrap();
        assert!(val < prev + 1e-9, "objective rose along the MLE segment");
        prev = val;
    }
}

#[test]
fn objective_is_midpoint_convex_inside_the_ball() {
    let mut rng = SeededRng::new(205);
    let n = 100;
    let p = 4;
    let h = {
        let mut h = hyper(0.3, 1.5, 0.5);
        h.tau = 0.2;
        h.b = 0.99 * convexity_cap(n, h.v0);
        h
    };
    let mut tested = 0;
    while tested < 20 {
        let s = random_spd(p, 0.5, &mut rng);
        let a = random_spd(p, 0.4, &mut rng);
        let b = random_spd(p, 0.4, &mut rng);
        // Normalize both inside the feasible ball.
        let scale_a = 0.8 * h.b / bagus_core::spectral_norm(&a);
        let scale_b = 0.8 * h.b / bagus_core::spectral_norm(&b);
        let a = SymMatrix::from_fn_upper(p, |i, j| a.get(i, j) * scale_a.min(1.0));
        let b = SymMatrix::from_fn_upper(p, |i, j| b.get(i, j) * scale_b.min(1.0));
        let mid = SymMatrix::from_fn_upper(p, |i, j| 0.5 * (a.get(i, j) + b.get(i, j)));
        let la = objective(&a, &s, n, &h).unwrap();
        let lb = objective(&b, &s, n, &h).unwrap();
        let lm = objective(&mid, &s, n, &h).unwrap();
        assert!(
            lm <= 0.5 * (la + lb) + 1e-9,
            "midpoint convexity violated: {lm} > {}",
            0.5 * (la + lb)
        );
        tested += 1;
    }
}

#[test]
fn hyperparameter_scaling_of_cap() {
    let mut rng = SeededRng::new(206);
    for _ in 0..10 {
        let n = 10 + rng.below(500) as usize;
        let v0 = rng.range(0.001, 1.0);
        let r = convexity_cap(2 * n, v0) / convexity_cap(n, v0);
        assert!((r - 2.0f64.sqrt()).abs() < 1e-12);
    }
}
