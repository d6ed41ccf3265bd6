//! Dense symmetric matrices and the factorization utilities the estimator needs.
//!
//! Storage is full dense with both triangles kept bit-identical: the column
//! sweeps of the M-step read whole columns, so triangular packing would only
//! add index bookkeeping to the hot loop. All indexing is 0-based. Column
//! partitions are realized by index arithmetic over the source matrix; no row
//! or column is ever physically permuted.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Dense symmetric `p x p` matrix. `entries[i][j] == entries[j][i]` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    p: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// All-zero matrix of dimension `p >= 1`.
    pub fn zeros(p: usize) -> Self {
        assert!(p >= 1, "dimension must be at least 1");
        SymMatrix {
            p,
            data: vec![0.0; p * p],
        }
    }

    /// Identity matrix.
    pub fn identity(p: usize) -> Self {
        let mut m = Self::zeros(p);
        for i in 0..p {
            m.data[i * p + i] = 1.0;
        }
        m
    }

    /// Diagonal matrix from a slice.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * m.p + i] = d;
        }
        m
    }

    /// Builds from the upper triangle of `f(i, j)` (called once per `i <= j`),
    /// mirrored so both triangles are bit-identical by construction.
    pub fn from_fn_upper<F: FnMut(usize, usize) -> f64>(p: usize, mut f: F) -> Self {
        let mut m = Self::zeros(p);
        for i in 0..p {
            for j in i..p {
                let v = f(i, j);
                m.data[i * p + j] = v;
                m.data[j * p + i] = v;
            }
        }
        m
    }

    /// Validates a row-major `p*p` buffer: finite everywhere and exactly symmetric.
    pub fn try_from_raw(p: usize, data: Vec<f64>) -> Result<Self> {
        if p == 0 || data.len() != p * p {
            return Err(Error::ShapeMismatch {
                expected: p * p,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData);
        }
        for i in 0..p {
            for j in (i + 1)..p {
                if data[i * p + j].to_bits() != data[j * p + i].to_bits() {
                    return Err(Error::InvalidData);
                }
            }
        }
        Ok(SymMatrix { p, data })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.p + j]
    }

    /// Writes both `(i, j)` and `(j, i)` so symmetry is preserved exactly.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.p + j] = v;
        self.data[j * self.p + i] = v;
    }

    /// Row `i` as a slice (equals column `i` by symmetry).
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.p..(i + 1) * self.p]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Column `j` with row `j` skipped: the `(p-1)`-vector `A[\j, j]`.
    pub fn column_without(&self, j: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.p - 1);
        for i in 0..self.p {
            if i != j {
                out.push(self.get(i, j));
            }
        }
        out
    }

    /// Largest absolute entry-wise difference. Panics on dimension mismatch.
    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.p, other.p);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()))
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// `max_ij |self*other - I|`, the inverse-consistency defect.
    pub fn product_identity_defect(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.p, other.p);
        let p = self.p;
        let mut worst = 0.0f64;
        for i in 0..p {
            for j in 0..p {
                let mut acc = 0.0;
                for k in 0..p {
                    acc += self.get(i, k) * other.get(k, j);
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - target).abs());
            }
        }
        worst
    }

    /// Smallest eigenvalue via the symmetric eigensolver.
    pub fn min_eigenvalue(&self) -> f64 {
        sym_eigenvalues(self)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Views of one column's partition: the `(p-1) x (p-1)` block with row and
/// column `j` removed, the off-diagonal column, and the diagonal entry. Pure
/// index arithmetic over the source matrix.
#[derive(Debug, Clone, Copy)]
pub struct ColumnPartition<'a> {
    source: &'a SymMatrix,
    j: usize,
}

impl<'a> ColumnPartition<'a> {
    pub fn target(&self) -> usize {
        self.j
    }

    /// Dimension of the block, `p - 1`.
    pub fn block_dim(&self) -> usize {
        self.source.p() - 1
    }

    #[inline]
    fn embed(&self, r: usize) -> usize {
        if r < self.j {
            r
        } else {
            r + 1
        }
    }

    /// `A[\j, \j]` at block coordinates `(r, c)`.
    #[inline]
    pub fn block11(&self, r: usize, c: usize) -> f64 {
        self.source.get(self.embed(r), self.embed(c))
    }

    /// `A[\j, j]` at block coordinate `r`.
    #[inline]
    pub fn vec12(&self, r: usize) -> f64 {
        self.source.get(self.embed(r), self.j)
    }

    /// `A[j, j]`.
    #[inline]
    pub fn scalar22(&self) -> f64 {
        self.source.get(self.j, self.j)
    }

    /// Rebuilds the source matrix from the three views; used to check the
    /// partition round-trip.
    pub fn reassemble(&self) -> SymMatrix {
        let p = self.source.p();
        SymMatrix::from_fn_upper(p, |i, jj| {
            if i == self.j && jj == self.j {
                self.scalar22()
            } else if jj == self.j {
                self.vec12(if i < self.j { i } else { i - 1 })
            } else if i == self.j {
                self.vec12(if jj < self.j { jj } else { jj - 1 })
            } else {
                let r = if i < self.j { i } else { i - 1 };
                let c = if jj < self.j { jj } else { jj - 1 };
                self.block11(r, c)
            }
        })
    }
}

/// Partition `m` around column `j`.
pub fn partition(m: &SymMatrix, j: usize) -> Result<ColumnPartition<'_>> {
    if j >= m.p() {
        return Err(Error::IndexOutOfRange {
            index: j,
            dim: m.p(),
        });
    }
    if m.p() < 2 {
        return Err(Error::ShapeMismatch { expected: 2, got: 1 });
    }
    Ok(ColumnPartition { source: m, j })
}

/// Observations as rows, optionally carrying the generating precision matrix.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub n: usize,
    pub p: usize,
    rows: Vec<f64>,
    /// Ground-truth precision matrix when the data are synthetic.
    pub truth: Option<SymMatrix>,
    /// Seed the generator consumed; 0 for externally loaded data.
    pub seed: u64,
    /// Identity of the PRNG pipeline that produced the rows.
    pub rng: &'static str,
}

impl Dataset {
    /// Wraps a row-major `n x p` buffer, rejecting non-finite entries.
    pub fn from_rows(n: usize, p: usize, rows: Vec<f64>, seed: u64) -> Result<Self> {
        if n == 0 || p == 0 || rows.len() != n * p {
            return Err(Error::ShapeMismatch {
                expected: n * p,
                got: rows.len(),
            });
        }
        if rows.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData);
        }
        Ok(Dataset {
            n,
            p,
            rows,
            truth: None,
            seed,
            rng: "external",
        })
    }

    pub(crate) fn from_generated(
        n: usize,
        p: usize,
        rows: Vec<f64>,
        truth: SymMatrix,
        seed: u64,
        rng: &'static str,
    ) -> Self {
        Dataset {
            n,
            p,
            rows,
            truth: Some(truth),
            seed,
            rng,
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.p..(i + 1) * self.p]
    }

    /// Per-column means.
    pub fn column_means(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.p];
        for i in 0..self.n {
            for (m, v) in means.iter_mut().zip(self.row(i)) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= self.n as f64;
        }
        means
    }

    /// Copy with column means subtracted. The model assumes mean zero; this
    /// makes that operational for real data.
    pub fn centered(&self) -> Dataset {
        let means = self.column_means();
        let mut rows = self.rows.clone();
        for i in 0..self.n {
            for j in 0..self.p {
                rows[i * self.p + j] -= means[j];
            }
        }
        Dataset {
            rows,
            truth: self.truth.clone(),
            ..*self
        }
    }
}

/// Sample covariance `S = (1/n) sum_i Y_i Y_i^T`. Divisor is `n`, not `n - 1`.
pub fn sample_covariance(data: &Dataset) -> Result<SymMatrix> {
    if data.rows.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidData);
    }
    let (n, p) = (data.n, data.p);
    let inv_n = 1.0 / n as f64;
    Ok(SymMatrix::from_fn_upper(p, |i, j| {
        let mut acc = 0.0;
        for r in 0..n {
            let row = data.row(r);
            acc += row[i] * row[j];
        }
        acc * inv_n
    }))
}

/// Lower-triangular Cholesky factor `L` with `L L^T = A`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    p: usize,
    lower: Vec<f64>,
}

impl CholeskyFactor {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.lower[i * self.p + j]
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// `log det A = 2 sum_i log L_ii`.
    pub fn log_det(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.p {
            acc += libm::log(self.at(i, i));
        }
        2.0 * acc
    }

    /// Solves `A x = b` by forward then backward substitution.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.p);
        let mut x = b.to_vec();
        for i in 0..self.p {
            let mut acc = x[i];
            for k in 0..i {
                acc -= self.at(i, k) * x[k];
            }
            x[i] = acc / self.at(i, i);
        }
        for i in (0..self.p).rev() {
            let mut acc = x[i];
            for k in (i + 1)..self.p {
                acc -= self.at(k, i) * x[k];
            }
            x[i] = acc / self.at(i, i);
        }
        x
    }

    /// `y = L z` for a standard-normal `z`, the sampling transform.
    pub fn lower_mul(&self, z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), self.p);
        let mut y = vec![0.0; self.p];
        for i in 0..self.p {
            let mut acc = 0.0;
            for k in 0..=i {
                acc += self.at(i, k) * z[k];
            }
            y[i] = acc;
        }
        y
    }

    /// Full inverse `A^{-1} = L^{-T} L^{-1}`, symmetrized exactly.
    pub fn inverse(&self) -> SymMatrix {
        let p = self.p;
        // Invert L in place (lower triangular).
        let mut linv = vec![0.0; p * p];
        for i in 0..p {
            linv[i * p + i] = 1.0 / self.at(i, i);
            for j in 0..i {
                let mut acc = 0.0;
                for k in j..i {
                    acc += self.at(i, k) * linv[k * p + j];
                }
                linv[i * p + j] = -acc / self.at(i, i);
            }
        }
        SymMatrix::from_fn_upper(p, |i, j| {
            // (L^{-T} L^{-1})_ij = sum_k L^{-1}_ki L^{-1}_kj, k >= max(i, j)
            let mut acc = 0.0;
            for k in j.max(i)..p {
                acc += linv[k * p + i] * linv[k * p + j];
            }
            acc
        })
    }
}

/// Cholesky factorization; fails with `NotPositiveDefinite` on a pivot <= 0.
pub fn cholesky(m: &SymMatrix) -> Result<CholeskyFactor> {
    let p = m.p();
    let mut lower = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            let mut acc = m.get(i, j);
            for k in 0..j {
                acc -= lower[i * p + k] * lower[j * p + k];
            }
            if i == j {
                if acc <= 0.0 || !acc.is_finite() {
                    return Err(Error::NotPositiveDefinite);
                }
                lower[i * p + i] = libm::sqrt(acc);
            } else {
                lower[i * p + j] = acc / lower[j * p + j];
            }
        }
    }
    Ok(CholeskyFactor { p, lower })
}

/// Inverse of a symmetric positive definite matrix via its Cholesky factor.
pub fn chol_inverse(m: &SymMatrix) -> Result<SymMatrix> {
    Ok(cholesky(m)?.inverse())
}

/// `Theta_11^{-1} = W_11 - w_12 w_12^T / w_22` from the partition of `W = Theta^{-1}`.
///
/// This is how the algorithm avoids inverting the `(p-1)` block directly.
pub fn inv11_from_w(wpart: &ColumnPartition<'_>) -> Result<SymMatrix> {
    let w22 = wpart.scalar22();
    if w22 <= 0.0 {
        return Err(Error::degenerate_diagonal(w22));
    }
    let m = wpart.block_dim();
    Ok(SymMatrix::from_fn_upper(m, |r, c| {
        wpart.block11(r, c) - wpart.vec12(r) * wpart.vec12(c) / w22
    }))
}

/// Spectral norm of the symmetric perturbation that replaces one column/row
/// pair: off-diagonal change `d = new_col - old_col`, diagonal change
/// `delta = new_diag - old_diag`. The perturbation has rank at most two with
/// nonzero eigenvalues `(delta +- sqrt(delta^2 + 4 |d|^2)) / 2`, so the norm
/// is available in closed form.
pub fn rank_two_spectral_bound(
    old_col: &[f64],
    new_col: &[f64],
    old_diag: f64,
    new_diag: f64,
) -> Result<f64> {
    if old_col.len() != new_col.len() {
        return Err(Error::ShapeMismatch {
            expected: old_col.len(),
            got: new_col.len(),
        });
    }
    let delta = new_diag - old_diag;
    let mut d_sq = 0.0;
    for (o, n) in old_col.iter().zip(new_col) {
        let d = n - o;
        d_sq += d * d;
    }
    let root = libm::sqrt(delta * delta + 4.0 * d_sq);
    Ok(0.5 * (delta.abs() + root))
}

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi method.
///
/// Plenty for the dimensions this crate targets (p <= 500); returns the
/// eigenvalues in arbitrary order.
pub fn sym_eigenvalues(m: &SymMatrix) -> Vec<f64> {
    let p = m.p();
    let mut a = m.as_slice().to_vec();
    if p == 1 {
        return a;
    }
    let off = |a: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..p {
            for j in (i + 1)..p {
                acc += a[i * p + j] * a[i * p + j];
            }
        }
        acc
    };
    let scale: f64 = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
    let tol = (1e-30 * scale * scale).max(f64::MIN_POSITIVE);
    for _sweep in 0..64 {
        if off(&a) <= tol {
            break;
        }
        for i in 0..p {
            for j in (i + 1)..p {
                let apq = a[i * p + j];
                if apq == 0.0 {
                    continue;
                }
                let app = a[i * p + i];
                let aqq = a[j * p + j];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + libm::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                // Apply the rotation on both sides.
                for k in 0..p {
                    let aik = a[i * p + k];
                    let ajk = a[j * p + k];
                    a[i * p + k] = c * aik - s * ajk;
                    a[j * p + k] = s * aik + c * ajk;
                }
                for k in 0..p {
                    let aki = a[k * p + i];
                    let akj = a[k * p + j];
                    a[k * p + i] = c * aki - s * akj;
                    a[k * p + j] = s * aki + c * akj;
                }
            }
        }
    }
    (0..p).map(|i| a[i * p + i]).collect()
}

/// Spectral norm of a symmetric matrix: the largest absolute eigenvalue.
pub fn spectral_norm(m: &SymMatrix) -> f64 {
    sym_eigenvalues(m)
        .into_iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Exact feasibility test `lambda_max(m) < bound` for a matrix known to be
/// positive definite (there `lambda_max` is the spectral norm): holds iff
/// `bound * I - m` is positive definite, which one factorization attempt
/// decides at a fraction of an eigendecomposition's cost.
pub(crate) fn spectral_within(m: &SymMatrix, bound: f64) -> bool {
    let p = m.p();
    let shifted = SymMatrix::from_fn_upper(p, |i, j| {
        let d = if i == j { bound } else { 0.0 };
        d - m.get(i, j)
    });
    cholesky(&shifted).is_ok()
}
