//! CSV reading and writing: matrices, datasets, and plain numeric tables.
//!
//! Numbers are written with 17 significant digits (`{:.16e}`) so every file
//! round-trips losslessly and byte-identically across runs. Lines starting
//! with `#` are headers or comments; the dataset header carries the shape,
//! seed, and generating model.

use crate::errors::{CliError, CliResult};
use bagus_core::{Dataset, SymMatrix};
use std::fs;
use std::path::Path;

/// Lossless fixed-width float formatting (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(field: &str, path: &Path) -> CliResult<f64> {
    field.trim().parse::<f64>().map_err(|_| {
        CliError::usage(format!(
            "{}: cannot parse '{}' as a number",
            path.display(),
            field.trim()
        ))
    })
}

/// Reads a numeric CSV, skipping `#` lines; returns rows of equal width.
pub fn read_numeric_csv(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: CliResult<Vec<f64>> = line.split(',').map(|f| parse_f64(f, path)).collect();
        rows.push(row?);
    }
    if rows.is_empty() {
        return Err(CliError::usage(format!("{}: no data rows", path.display())));
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(CliError::usage(format!(
            "{}: ragged rows (expected width {width})",
            path.display()
        )));
    }
    Ok(rows)
}

pub fn write_matrix(path: &Path, m: &SymMatrix) -> CliResult<()> {
    let p = m.p();
    let mut out = String::new();
    for i in 0..p {
        let fields: Vec<String> = (0..p).map(|j| fmt_f64(m.get(i, j))).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> CliResult<SymMatrix> {
    let rows = read_numeric_csv(path)?;
    let p = rows.len();
    if rows[0].len() != p {
        return Err(CliError::usage(format!(
            "{}: expected a square matrix, got {p} x {}",
            path.display(),
            rows[0].len()
        )));
    }
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    SymMatrix::try_from_raw(p, flat).map_err(CliError::from)
}

/// Dataset header: `# bagus-dataset v1, n=<n>, p=<p>, seed=<seed>, model=<model>`.
pub fn write_dataset(path: &Path, data: &Dataset, model: &str) -> CliResult<()> {
    let mut out = format!(
        "# bagus-dataset v1, n={}, p={}, seed={}, model={}\n",
        data.n, data.p, data.seed, model
    );
    for i in 0..data.n {
        let fields: Vec<String> = data.row(i).iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    if let Some(truth) = &data.truth {
        let truth_path = truth_sibling(path);
        write_matrix(&truth_path, truth)?;
    }
    Ok(())
}

/// `<name>.truth.csv` next to a dataset file.
pub fn truth_sibling(path: &Path) -> std::path::PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    path.with_file_name(format!("{stem}.truth.csv"))
}

/// A parsed dataset plus whether it carried the `bagus-dataset` header
/// (generated, mean-zero data) or was a plain numeric CSV.
pub struct LoadedDataset {
    pub data: Dataset,
    pub had_header: bool,
}

pub fn read_dataset(path: &Path) -> CliResult<LoadedDataset> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let mut seed = 0u64;
    let mut had_header = false;
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix('#') {
            if rest.trim_start().starts_with("bagus-dataset") {
                had_header = true;
                for field in rest.split(',') {
                    if let Some((k, v)) = field.split_once('=') {
                        if k.trim() == "seed" {
                            seed = v.trim().parse().unwrap_or(0);
                        }
                    }
                }
            }
        }
    }
    let rows = read_numeric_csv(path)?;
    let n = rows.len();
    let p = rows[0].len();
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    let data = Dataset::from_rows(n, p, flat, seed).map_err(CliError::from)?;
    Ok(LoadedDataset { data, had_header })
}

/// Writes one value per line; used for the per-time-point error series.
pub fn write_series(path: &Path, values: &[f64]) -> CliResult<()> {
    let mut out = String::new();
    for v in values {
        out.push_str(&fmt_f64(*v));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Writes rows of comma-separated values.
pub fn write_rows(path: &Path, rows: &[Vec<f64>]) -> CliResult<()> {
    let mut out = String::new();
    for row in rows {
        let fields: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}
