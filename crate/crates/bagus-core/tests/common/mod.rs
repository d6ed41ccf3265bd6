//! Shared helpers for the oracle suites. Everything here is an independent
//! route: naive formulas, brute-force loops, and power iteration, never the
//! library's own code paths.

#![allow(dead_code)]

use bagus_core::rng::SeededRng;
use bagus_core::{Hyperparameters, SymMatrix};

/// Random symmetric matrix with entries in [-scale, scale].
pub fn random_symmetric(p: usize, scale: f64, rng: &mut SeededRng) -> SymMatrix {
    SymMatrix::from_fn_upper(p, |_, _| rng.range(-scale, scale))
}

/// Random SPD matrix built as A^T A / p + ridge * I.
pub fn random_spd(p: usize, ridge: f64, rng: &mut SeededRng) -> SymMatrix {
    let a: Vec<f64> = (0..p * p).map(|_| rng.range(-1.0, 1.0)).collect();
    SymMatrix::from_fn_upper(p, |i, j| {
        let mut acc = 0.0;
        for k in 0..p {
            acc += a[k * p + i] * a[k * p + j];
        }
        acc / p as f64 + if i == j { ridge } else { 0.0 }
    })
}

/// Largest singular value by power iteration on m*m (so signs cannot stall
/// the iteration), square-rooted at the end.
pub fn power_iteration_norm(m: &SymMatrix, iters: usize) -> f64 {
    let p = m.p();
    let mut v = vec![1.0f64; p];
    let mm = SymMatrix::from_fn_upper(p, |i, j| {
        let mut acc = 0.0;
        for k in 0..p {
            acc += m.get(i, k) * m.get(k, j);
        }
        acc
    });
    let mut lambda = 0.0;
    for _ in 0..iters {
        let mut next = vec![0.0f64; p];
        for i in 0..p {
            let mut acc = 0.0;
            for k in 0..p {
                acc += mm.get(i, k) * v[k];
            }
            next[i] = acc;
        }
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        for x in &mut next {
            *x /= norm;
        }
        lambda = norm;
        v = next;
    }
    lambda.sqrt()
}

/// Literal transcription of the mixture penalty, no stabilization.
pub fn naive_pen_ss(theta: f64, h: &Hyperparameters) -> f64 {
    let slab = h.eta / (2.0 * h.v1) * (-theta.abs() / h.v1).exp();
    let spike = (1.0 - h.eta) / (2.0 * h.v0) * (-theta.abs() / h.v0).exp();
    -(slab + spike).ln()
}

/// Determinant by cofactor expansion; exact independent route for tiny p.
pub fn cofactor_det(m: &SymMatrix) -> f64 {
    fn det(rows: &[Vec<f64>]) -> f64 {
        let n = rows.len();
        if n == 1 {
            return rows[0][0];
        }
        let mut acc = 0.0;
        let mut sign = 1.0;
        for col in 0..n {
            let minor: Vec<Vec<f64>> = rows[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != col)
                        .map(|(_, v)| *v)
                        .collect()
                })
                .collect();
            acc += sign * rows[0][col] * det(&minor);
            sign = -sign;
        }
        acc
    }
    let p = m.p();
    let rows: Vec<Vec<f64>> = (0..p).map(|i| m.row(i).to_vec()).collect();
    det(&rows)
}

/// Central finite difference of a scalar function.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Second-order central finite difference.
pub fn second_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

pub fn hyper(v0: f64, v1: f64, eta: f64) -> Hyperparameters {
    let mut h = Hyperparameters::new(v0, v1, 100);
    h.eta = eta;
    h.tau = 0.0;
    h
}
