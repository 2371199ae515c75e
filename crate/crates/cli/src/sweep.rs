//! Batch runs over one configuration axis.

use std::cmp::Ordering;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use toml::Table;

use crate::config::{apply_override, config_from_table, SCHEMA_KEYS};
use crate::error::{CliError, Result};
use crate::experiment::{run_experiment, Metrics};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: String,
    pub metrics: Metrics,
    /// Why the run failed, if it did.
    pub error: Option<String>,
}

fn run_one(base: &Table, axis: &str, value: &str, dir: &Path) -> SweepRow {
    let attempt = || -> Result<Metrics> {
        let mut table = base.clone();
        apply_override(&mut table, axis, value)?;
        let cfg = config_from_table(&table)?;
        let manifest = run_experiment("sweep", &cfg, dir)?;
        match manifest.failure {
            Some(f) => Err(CliError::Numerical(f)),
            None => Ok(manifest.metrics),
        }
    };
    match attempt() {
        Ok(metrics) => SweepRow {
            value: value.to_string(),
            metrics,
            error: None,
        },
        Err(e) => SweepRow {
            value: value.to_string(),
            metrics: Metrics::default(),
            error: Some(e.to_string()),
        },
    }
}

fn by_value(a: &str, b: &str) -> Ordering {
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => x.total_cmp(&y),
        _ => a.cmp(b),
    }
}

/// Runs one simulation per value on up to `jobs` threads. Each run writes its
/// outputs to `out/run_<k>`, where `k` is the value's position in the sorted
/// list, and the coordinator writes `out/sweep.csv` once all runs are done.
/// Rows are ordered by axis value.
pub fn sweep(
    base: &Table,
    axis: &str,
    values: &[String],
    jobs: usize,
    out: &Path,
) -> Result<Vec<SweepRow>> {
    if !SCHEMA_KEYS.contains(&axis) {
        return Err(CliError::config(axis, "not a configuration key"));
    }
    if jobs == 0 {
        return Err(CliError::Input("--jobs must be positive".into()));
    }
    if values.is_empty() {
        return Err(CliError::Input("no sweep values given".into()));
    }
    let mut values = values.to_vec();
    values.sort_by(|a, b| by_value(a, b));
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        values
            .par_iter()
            .enumerate()
            .map(|(k, v)| run_one(base, axis, v, &out.join(format!("run_{k:03}"))))
            .collect()
    });
    write_sweep_csv(&out.join("sweep.csv"), axis, &rows)?;
    Ok(rows)
}

pub fn write_sweep_csv(path: &Path, axis: &str, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::csv(path, e))?;
    let err = |e| CliError::csv(path, e);
    w.write_record([
        axis,
        "dist_final",
        "dominant_omega",
        "energy_drift",
        "error",
    ])
    .map_err(err)?;
    let fmt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.value.clone(),
            fmt(r.metrics.dist_final),
            fmt(r.metrics.dominant_omega_late),
            fmt(r.metrics.energy_drift),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}
