//! Sampled solitary manifold as CSV rows.

use std::io::Write;

use kgdefect::{kappa_of_omega, manifold_table, Potential64, SolitaryWave64};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub branch: usize,
    pub omega: f64,
    pub kappa: f64,
    pub c: f64,
    pub energy: f64,
}

/// Midpoint frequencies `omega_i = -m + (i + 1/2) 2m / n`.
pub fn omega_samples(m: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| -m + (i as f64 + 0.5) * 2.0 * m / n as f64)
        .collect()
}

/// Rows of every branch; branch 0 is the zero solution.
pub fn solitary_rows(p: &Potential64, m: f64, samples: usize) -> Result<Vec<TableRow>> {
    if samples == 0 {
        return Err(CliError::Input("--omega-samples must be positive".into()));
    }
    let mut rows = Vec::new();
    for (b, branch) in manifold_table(p, m, &omega_samples(m, samples))?
        .iter()
        .enumerate()
    {
        for &(omega, c) in &branch.samples {
            let kappa = kappa_of_omega(omega, m)?;
            let energy = SolitaryWave64::new(omega, c, 0.0, m)?.energy(p, m);
            rows.push(TableRow {
                branch: b,
                omega,
                kappa,
                c,
                energy,
            });
        }
    }
    Ok(rows)
}

pub fn write_rows<W: Write>(w: W, rows: &[TableRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(w);
    let err = |e| CliError::csv("<output>", e);
    w.write_record(["branch", "omega", "kappa", "c", "energy"])
        .map_err(err)?;
    for r in rows {
        w.write_record([
            r.branch.to_string(),
            r.omega.to_string(),
            r.kappa.to_string(),
            r.c.to_string(),
            r.energy.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| CliError::io("<output>", e))
}
