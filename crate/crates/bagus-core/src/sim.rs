//! Ground-truth precision matrices for the four benchmark models, seeded
//! multivariate-normal sampling, and a replication harness.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{chol_inverse, cholesky, Dataset, SymMatrix};
use crate::rng::{split_seed, SeededRng, RNG_ALGORITHM};

/// The four benchmark precision structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// Hub: unit diagonal, first row/column `1/sqrt(p)`.
    Star,
    /// Banded: unit diagonal, `0.5` at offset one, `0.25` at offset two.
    Ar2,
    /// Ring: diagonal 2, `1` at offset one, `0.9` in the corners.
    Circle,
    /// Sparse random graph rescaled to diagonal dominance, then scaled.
    RandomGraph,
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Star => "star",
            Model::Ar2 => "ar2",
            Model::Circle => "circle",
            Model::RandomGraph => "random",
        }
    }
}

impl core::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "star" => Ok(Model::Star),
            "ar2" => Ok(Model::Ar2),
            "circle" => Ok(Model::Circle),
            "random" | "random_graph" => Ok(Model::RandomGraph),
            _ => Err(Error::InvalidParameter(
                "model must be one of star|ar2|circle|random",
            )),
        }
    }
}

/// One benchmark scenario: generator, dimensions, seed.
#[derive(Debug, Clone)]
pub struct SimulationSpec {
    pub model: Model,
    pub p: usize,
    pub n: usize,
    pub seed: u64,
    /// Overall scale for [`Model::RandomGraph`] (the paper's `sigma^2`).
    pub sigma2: f64,
}

impl SimulationSpec {
    pub fn new(model: Model, p: usize, n: usize, seed: u64) -> Self {
        SimulationSpec {
            model,
            p,
            n,
            seed,
            sigma2: 3.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.p < 3 {
            return Err(Error::InvalidParameter("need p >= 3"));
        }
        if self.n < 1 {
            return Err(Error::InvalidParameter("need n >= 1"));
        }
        if !(self.sigma2 > 0.0) {
            return Err(Error::InvalidParameter("need sigma2 > 0"));
        }
        Ok(())
    }
}

// Seed-derivation namespaces so truth draws never collide with data draws.
const TRUTH_SEED_BASE: u64 = 1 << 32;

/// Ground-truth precision matrix for a scenario.
pub fn truth_matrix(spec: &SimulationSpec) -> Result<SymMatrix> {
    spec.validate()?;
    let p = spec.p;
    match spec.model {
        Model::Star => {
            let off = 1.0 / libm::sqrt(p as f64);
            Ok(SymMatrix::from_fn_upper(p, |i, j| {
                if i == j {
                    1.0
                } else if i == 0 {
                    off
                } else {
                    0.0
                }
            }))
        }
        Model::Ar2 => Ok(SymMatrix::from_fn_upper(p, |i, j| match j - i {
            0 => 1.0,
            1 => 0.5,
            2 => 0.25,
            _ => 0.0,
        })),
        Model::Circle => Ok(SymMatrix::from_fn_upper(p, |i, j| {
            if i == j {
                2.0
            } else if j - i == 1 {
                1.0
            } else if i == 0 && j == p - 1 {
                0.9
            } else {
                0.0
            }
        })),
        Model::RandomGraph => {
            // Diagonal dominance makes the construction PD before scaling;
            // the factorization check and retry are defensive.
            for attempt in 0..10 {
                let seed = split_seed(spec.seed, TRUTH_SEED_BASE + attempt as u64);
                let candidate = random_graph_draw(p, spec.sigma2, seed);
                if cholesky(&candidate).is_ok() {
                    return Ok(candidate);
                }
            }
            Err(Error::GenerationFailed { attempts: 10 })
        }
    }
}

fn random_graph_draw(p: usize, sigma2: f64, seed: u64) -> SymMatrix {
    let mut rng = SeededRng::new(seed);
    let mut dense = alloc::vec![0.0f64; p * p];
    for i in 0..p {
        dense[i * p + i] = 1.0;
    }
    // Choose floor(1.5 p) distinct upper-triangle slots without replacement.
    let total = p * (p - 1) / 2;
    let want = ((3 * p) / 2).min(total);
    let mut slots: Vec<usize> = (0..total).collect();
    for k in 0..want {
        let pick = k + rng.below((total - k) as u64) as usize;
        slots.swap(k, pick);
    }
    for &slot in &slots[..want] {
        // Map the linear slot back to (i, j), i < j.
        let mut i = 0;
        let mut rem = slot;
        let mut row_len = p - 1;
        while rem >= row_len {
            rem -= row_len;
            i += 1;
            row_len -= 1;
        }
        let j = i + 1 + rem;
        let magnitude = rng.range(0.4, 1.0);
        let value = if rng.next_u64() & 1 == 0 {
            magnitude
        } else {
            -magnitude
        };
        dense[i * p + j] = value;
        dense[j * p + i] = value;
    }
    // Rescale every off-diagonal entry by 1.1x its column's absolute
    // off-diagonal sum (columns with no entries stay as-is), then symmetrize
    // by averaging with the transpose.
    let mut col_sums = alloc::vec![0.0f64; p];
    for j in 0..p {
        for i in 0..p {
            if i != j {
                col_sums[j] += dense[i * p + j].abs();
            }
        }
    }
    let mut scaled = dense.clone();
    for j in 0..p {
        if col_sums[j] > 0.0 {
            let denom = 1.1 * col_sums[j];
            for i in 0..p {
                if i != j {
                    scaled[i * p + j] = dense[i * p + j] / denom;
                }
            }
        }
    }
    SymMatrix::from_fn_upper(p, |i, j| {
        let avg = if i == j {
            scaled[i * p + j]
        } else {
            0.5 * (scaled[i * p + j] + scaled[j * p + i])
        };
        sigma2 * avg
    })
}

/// `n` draws from `N(0, theta0^{-1})`: the covariance Cholesky factor applied
/// to a seeded standard-normal stream, row by row.
pub fn sample_mvn(theta0: &SymMatrix, n: usize, seed: u64) -> Result<Dataset> {
    if n < 1 {
        return Err(Error::InvalidParameter("need n >= 1"));
    }
    let sigma = chol_inverse(theta0)?;
    let factor = cholesky(&sigma)?;
    let p = theta0.p();
    let mut rng = SeededRng::new(seed);
    let mut rows = Vec::with_capacity(n * p);
    let mut z = alloc::vec![0.0f64; p];
    for _ in 0..n {
        for zv in &mut z {
            *zv = rng.standard_normal();
        }
        rows.extend_from_slice(&factor.lower_mul(&z));
    }
    Ok(Dataset::from_generated(
        n,
        p,
        rows,
        theta0.clone(),
        seed,
        RNG_ALGORITHM,
    ))
}

/// Named metric values produced by one replication.
pub type MetricRow = Vec<(String, f64)>;

/// Mean and sample standard deviation of one metric across replications.
#[derive(Debug, Clone)]
pub struct MetricSummary {
    pub name: String,
    pub mean: f64,
    /// Sample (n-1 divisor) standard deviation; 0 for a single replication.
    pub sd: f64,
    pub values: Vec<f64>,
}

impl MetricSummary {
    /// The `mean(sd)` table convention, three decimals.
    pub fn display(&self) -> String {
        use core::fmt::Write;
        let mut s = String::new();
        let _ = write!(s, "{:.3}({:.3})", self.mean, self.sd);
        s
    }
}

/// Aggregated outcome of a replication run.
#[derive(Debug)]
pub struct ReplicateReport {
    pub reps: usize,
    /// Replications whose runner failed, with causes; not fatal.
    pub failures: Vec<(usize, Error)>,
    /// One summary per metric name, ordered by first appearance.
    pub metrics: Vec<MetricSummary>,
}

/// Runs `runner` on `reps` independently seeded datasets drawn from the
/// scenario's truth matrix and aggregates every reported metric.
///
/// Replication `i` samples with the derived seed `split_seed(spec.seed, i)`,
/// so the harness is reproducible and order-independent.
pub fn replicate<F>(spec: &SimulationSpec, reps: usize, mut runner: F) -> Result<ReplicateReport>
where
    F: FnMut(usize, &Dataset) -> Result<MetricRow>,
{
    if reps < 1 {
        return Err(Error::InvalidParameter("need reps >= 1"));
    }
    let truth = truth_matrix(spec)?;
    let mut rows: Vec<MetricRow> = Vec::with_capacity(reps);
    let mut failures = Vec::new();
    for i in 0..reps {
        let data = sample_mvn(&truth, spec.n, split_seed(spec.seed, i as u64))?;
        match runner(i, &data) {
            Ok(row) => rows.push(row),
            Err(e) => failures.push((i, e)),
        }
    }
    Ok(ReplicateReport {
        reps,
        failures,
        metrics: summarize(&rows),
    })
}

/// Reduces metric rows (by name, ordered by first appearance) into summaries.
pub fn summarize(rows: &[MetricRow]) -> Vec<MetricSummary> {
    let mut names: Vec<&String> = Vec::new();
    for row in rows {
        for (name, _) in row {
            if !names.iter().any(|n| *n == name) {
                names.push(name);
            }
        }
    }
    names
        .into_iter()
        .map(|name| {
            let values: Vec<f64> = rows
                .iter()
                .flat_map(|row| {
                    row.iter()
                        .filter(|(n, _)| n == name)
                        .map(|(_, v)| *v)
                })
                .collect();
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let sd = if values.len() > 1 {
                let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
                libm::sqrt(ss / (values.len() - 1) as f64)
            } else {
                0.0
            };
            MetricSummary {
                name: name.clone(),
                mean,
                sd,
                values,
            }
        })
        .collect()
}
