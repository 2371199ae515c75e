//! Spectral post-processing of a recorded trace CSV.

use std::path::Path;

use kgdefect::{
    band_mass_fraction, bound_dispersive_split, concentration_of, windowed_spectrum, Complex,
    Concentration, Spectrum64, Trace,
};

use crate::error::{CliError, Result};
use crate::experiment::{write_spectra_csv, write_split_csv, BAND_FACTOR};

/// Origin trace `psi(0, t)` read back from a `trace.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSeries {
    pub times: Vec<f64>,
    pub psi0: Vec<Complex<f64>>,
}

impl TraceSeries {
    /// Sample step, checked to be uniform.
    pub fn step(&self) -> Result<f64> {
        if self.times.len() < 2 {
            return Err(CliError::Input("trace needs at least two samples".into()));
        }
        let h = self.times[1] - self.times[0];
        let uniform = self
            .times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1.0));
        if h.is_nan() || h <= 0.0 || !uniform {
            return Err(CliError::Input(
                "trace times are not uniformly increasing".into(),
            ));
        }
        Ok(h)
    }
}

pub fn read_trace_csv(path: &Path) -> Result<TraceSeries> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::csv(path, e))?;
    let headers = r.headers().map_err(|e| CliError::csv(path, e))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Input(format!("{}: missing column {name:?}", path.display())))
    };
    let (ti, re, im) = (column("t")?, column("re_psi0")?, column("im_psi0")?);
    let mut series = TraceSeries {
        times: Vec::new(),
        psi0: Vec::new(),
    };
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(|e| CliError::csv(path, e))?;
        let num = |i: usize| {
            record
                .get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| {
                    CliError::Input(format!(
                        "{}: row {}: bad number in column {}",
                        path.display(),
                        line + 2,
                        &headers[i]
                    ))
                })
        };
        series.times.push(num(ti)?);
        series.psi0.push(Complex::new(num(re)?, num(im)?));
    }
    Ok(series)
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub spectrum: Spectrum64,
    pub concentration: Concentration<f64>,
    pub band_mass: f64,
    /// Bound and dispersive parts of the whole trace.
    pub split: (Vec<Complex<f64>>, Vec<Complex<f64>>),
}

pub fn analyze(series: &TraceSeries, window: (f64, f64), m: f64, margin: f64) -> Result<Analysis> {
    let h = series.step()?;
    let trace = Trace::new(&series.psi0, series.times[0], h)?;
    let spectrum = windowed_spectrum(&trace, window.0, window.1)?;
    let concentration = concentration_of(&spectrum, m)?;
    let band_mass = band_mass_fraction(&spectrum, -BAND_FACTOR * m, BAND_FACTOR * m)?;
    let split = bound_dispersive_split(&trace, m, margin)?;
    Ok(Analysis {
        spectrum,
        concentration,
        band_mass,
        split,
    })
}

/// Writes `spectrum.csv`, `split.csv` and `concentration.csv` into `dir`.
pub fn write_analysis(dir: &Path, series: &TraceSeries, a: &Analysis) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    write_spectra_csv(&dir.join("spectrum.csv"), &[("window", a.spectrum.clone())])?;
    write_split_csv(
        &dir.join("split.csv"),
        &series.times,
        &a.split.0,
        &a.split.1,
    )?;
    let path = dir.join("concentration.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::csv(&path, e))?;
    let c = &a.concentration;
    w.write_record([
        "t_start",
        "t_end",
        "dominant",
        "width",
        "in_gap",
        "band_mass",
    ])
    .and_then(|_| {
        w.write_record([
            a.spectrum.window.t_start.to_string(),
            a.spectrum.window.t_end.to_string(),
            c.dominant.to_string(),
            c.width.to_string(),
            c.in_gap.to_string(),
            a.band_mass.to_string(),
        ])
    })
    .map_err(|e| CliError::csv(&path, e))?;
    w.flush().map_err(|e| CliError::io(&path, e))
}
