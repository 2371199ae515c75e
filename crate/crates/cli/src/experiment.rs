//! Runs an experiment, records its diagnostics and writes the output files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use kgdefect::evolution::run_observed;
use kgdefect::evolution::snapshot::write_snapshot;
use kgdefect::{
    band_mass_fraction, bound_dispersive_split, concentration_of, energy, full_norm,
    local_seminorm, windowed_spectrum, Complex, FieldState64, ManifoldCatalog64, ManifoldDistance,
    SeminormSpec, Spectrum64, Trace,
};
use toml::{Table, Value};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

/// Distances averaged over `[0, 5]` form the initial reference level.
pub const EARLY_DISTANCE: (f64, f64) = (0.0, 5.0);
/// Length of the closing window over which distances are averaged.
pub const LATE_DISTANCE_SPAN: f64 = 20.0;
/// Early spectral window.
pub const EARLY_SPECTRUM: (f64, f64) = (20.0, 70.0);
/// Length of the closing spectral window.
pub const LATE_SPECTRUM_SPAN: f64 = 50.0;
/// Band `|omega| <= 1.05 m` used for the late band mass.
pub const BAND_FACTOR: f64 = 1.05;
/// Margin above `m` of the bound part in the frequency split.
pub const SPLIT_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub psi0: Complex<f64>,
    pub energy: f64,
    pub local_seminorm: f64,
    /// `||Psi(t) - exact(t)||_E / ||exact(0)||_E` when an exact solution is known.
    pub reference_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceRow {
    pub t: f64,
    pub distance: ManifoldDistance<f64>,
    pub local_energy: f64,
    pub full_energy: f64,
}

/// Everything recorded by one run, complete or not.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub trace: Vec<TraceRow>,
    pub distances: Vec<DistanceRow>,
    /// Recorded sample step `stride * dt`.
    pub sample_step: f64,
    pub final_state: Option<FieldState64>,
    pub failure: Option<kgdefect::Error>,
}

impl Outcome {
    pub fn psi0(&self) -> Vec<Complex<f64>> {
        self.trace.iter().map(|r| r.psi0).collect()
    }
}

/// Runs `cfg`. Numerical failure is reported in [`Outcome::failure`] with
/// the diagnostics recorded up to that point.
pub fn execute(cfg: &ExperimentConfig) -> Result<Outcome> {
    let sim = &cfg.sim;
    let grid = &sim.grid;
    let window = SeminormSpec::new(sim.record.window_radius)?;
    let catalog = ManifoldCatalog64::new(grid, &sim.potential, sim.m, &window)?;
    let scale = cfg
        .reference
        .as_ref()
        .map(|r| full_norm(&r.at(grid, 0.0), grid));

    let mut trace = Vec::new();
    let mut distances = Vec::new();
    let mut observer = |s: &FieldState64| -> kgdefect::Result<()> {
        let e = energy(s, &sim.potential, sim.m, grid)?;
        let local = local_seminorm(s, grid, &window);
        let reference_error = cfg
            .reference
            .as_ref()
            .zip(scale)
            .map(|(r, scale)| full_norm(&(s - &r.at(grid, s.t)), grid) / scale);
        if trace.len() % cfg.distance_every == 0 {
            let distance = catalog.distance(s)?;
            distances.push(DistanceRow {
                t: s.t,
                distance,
                local_energy: local * local,
                full_energy: e,
            });
        }
        trace.push(TraceRow {
            t: s.t,
            psi0: s.psi_at_origin(),
            energy: e,
            local_seminorm: local,
            reference_error,
        });
        Ok(())
    };
    let sample_step = sim.dt * sim.record.stride as f64;
    match run_observed(sim, &mut observer) {
        Ok(out) => Ok(Outcome {
            trace,
            distances,
            sample_step,
            final_state: Some(out.final_state),
            failure: None,
        }),
        Err(e @ kgdefect::Error::BlowUp { .. }) => Ok(Outcome {
            trace,
            distances,
            sample_step,
            final_state: None,
            failure: Some(e),
        }),
        Err(e) => Err(e.into()),
    }
}

/// Headline numbers of a run; a metric is absent when its window does not
/// fit the recorded data.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metrics {
    pub energy_drift: Option<f64>,
    pub dist_initial: Option<f64>,
    pub dist_final: Option<f64>,
    pub dist_ratio: Option<f64>,
    /// Minimum distance over the second half of the run.
    pub dist_min_late: Option<f64>,
    pub local_seminorm_initial: Option<f64>,
    pub local_seminorm_final: Option<f64>,
    pub band_mass_late: Option<f64>,
    pub dominant_omega_late: Option<f64>,
    pub width_early: Option<f64>,
    pub width_late: Option<f64>,
    pub reference_error_max: Option<f64>,
    pub reference_error_final: Option<f64>,
}

impl Metrics {
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        let all = [
            ("energy_drift", self.energy_drift),
            ("dist_initial", self.dist_initial),
            ("dist_final", self.dist_final),
            ("dist_ratio", self.dist_ratio),
            ("dist_min_late", self.dist_min_late),
            ("local_seminorm_initial", self.local_seminorm_initial),
            ("local_seminorm_final", self.local_seminorm_final),
            ("band_mass_late", self.band_mass_late),
            ("dominant_omega_late", self.dominant_omega_late),
            ("width_early", self.width_early),
            ("width_late", self.width_late),
            ("reference_error_max", self.reference_error_max),
            ("reference_error_final", self.reference_error_final),
        ];
        all.into_iter()
            .filter_map(|(k, v)| v.map(|v| (k, v)))
            .collect()
    }
}

fn mean_in(rows: &[DistanceRow], lo: f64, hi: f64) -> Option<f64> {
    let vals: Vec<f64> = rows
        .iter()
        .filter(|r| r.t >= lo - 1e-9 && r.t <= hi + 1e-9)
        .map(|r| r.distance.dist)
        .collect();
    (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
}

/// Late and early spectra of `psi(0, t)` whose windows fit inside `[0, horizon]`.
pub fn spectra(outcome: &Outcome, horizon: f64) -> Vec<(&'static str, Spectrum64)> {
    let samples = outcome.psi0();
    let Ok(trace) = Trace::new(&samples, 0.0, outcome.sample_step) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let windows = [
        ("early", EARLY_SPECTRUM),
        ("late", (horizon - LATE_SPECTRUM_SPAN, horizon)),
    ];
    for (label, (lo, hi)) in windows {
        if lo >= 0.0 && hi <= horizon {
            if let Ok(sp) = windowed_spectrum(&trace, lo, hi) {
                out.push((label, sp));
            }
        }
    }
    out
}

pub fn metrics(cfg: &ExperimentConfig, outcome: &Outcome) -> Metrics {
    let m = cfg.sim.m;
    let horizon = cfg.sim.horizon;
    let mut out = Metrics::default();
    let rows = &outcome.trace;
    if let Some(first) = rows.first() {
        let scale = first.energy.abs().max(1.0);
        out.energy_drift = Some(
            rows.iter()
                .map(|r| (r.energy - first.energy).abs() / scale)
                .fold(0.0, f64::max),
        );
        out.local_seminorm_initial = Some(first.local_seminorm);
        out.local_seminorm_final = rows.last().map(|r| r.local_seminorm);
        let errors: Vec<f64> = rows.iter().filter_map(|r| r.reference_error).collect();
        out.reference_error_max = errors.iter().copied().reduce(f64::max);
        out.reference_error_final = errors.last().copied();
    }
    let d = &outcome.distances;
    if outcome.failure.is_none() {
        out.dist_initial = mean_in(d, EARLY_DISTANCE.0, EARLY_DISTANCE.1);
        out.dist_final = mean_in(d, horizon - LATE_DISTANCE_SPAN, horizon);
        out.dist_ratio = out.dist_initial.zip(out.dist_final).map(|(a, b)| b / a);
        out.dist_min_late = d
            .iter()
            .filter(|r| r.t >= horizon / 2.0 - 1e-9)
            .map(|r| r.distance.dist)
            .reduce(f64::min);
        for (label, sp) in spectra(outcome, horizon) {
            let Ok(conc) = concentration_of(&sp, m) else {
                continue;
            };
            if label == "early" {
                out.width_early = Some(conc.width);
            } else {
                out.width_late = Some(conc.width);
                out.dominant_omega_late = Some(conc.dominant);
                out.band_mass_late =
                    band_mass_fraction(&sp, -BAND_FACTOR * m, BAND_FACTOR * m).ok();
            }
        }
    }
    out
}

/// One produced file, by name relative to the output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub name: String,
    pub kind: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub dir: PathBuf,
    pub files: Vec<ManifestEntry>,
    /// Set when the run stopped early; the files then hold partial data.
    pub failure: Option<String>,
    pub metrics: Metrics,
}

impl Manifest {
    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|e| CliError::csv(path, e))
}

pub fn write_trace_csv(path: &Path, rows: &[TraceRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = |e| CliError::csv(path, e);
    w.write_record([
        "t",
        "re_psi0",
        "im_psi0",
        "energy",
        "local_seminorm",
        "reference_error",
    ])
    .map_err(err)?;
    for r in rows {
        w.write_record([
            r.t.to_string(),
            r.psi0.re.to_string(),
            r.psi0.im.to_string(),
            r.energy.to_string(),
            r.local_seminorm.to_string(),
            fmt_opt(r.reference_error),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_distance_csv(path: &Path, rows: &[DistanceRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = |e| CliError::csv(path, e);
    w.write_record([
        "t",
        "dist",
        "omega_star",
        "theta_star",
        "c_star",
        "local_energy",
        "full_energy",
    ])
    .map_err(err)?;
    for r in rows {
        let d = &r.distance;
        w.write_record(
            [
                r.t,
                d.dist,
                d.omega_star,
                d.theta_star,
                d.c_star,
                r.local_energy,
                r.full_energy,
            ]
            .map(|x| x.to_string()),
        )
        .map_err(err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_spectra_csv(path: &Path, spectra: &[(&str, Spectrum64)]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = |e| CliError::csv(path, e);
    w.write_record(["window", "t_start", "t_end", "omega", "magnitude"])
        .map_err(err)?;
    for (label, sp) in spectra {
        for (om, mag) in sp.frequencies.iter().zip(&sp.magnitudes) {
            w.write_record([
                label.to_string(),
                sp.window.t_start.to_string(),
                sp.window.t_end.to_string(),
                om.to_string(),
                mag.to_string(),
            ])
            .map_err(err)?;
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_split_csv(
    path: &Path,
    times: &[f64],
    bound: &[Complex<f64>],
    dispersive: &[Complex<f64>],
) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = |e| CliError::csv(path, e);
    w.write_record([
        "t",
        "re_bound",
        "im_bound",
        "re_dispersive",
        "im_dispersive",
    ])
    .map_err(err)?;
    for ((t, b), d) in times.iter().zip(bound).zip(dispersive) {
        w.write_record([*t, b.re, b.im, d.re, d.im].map(|x| x.to_string()))
            .map_err(err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Summary document: status, metrics, the analysis windows and the fully
/// resolved configuration.
pub fn summary_table(
    name: &str,
    cfg: &ExperimentConfig,
    outcome: &Outcome,
    metrics: &Metrics,
) -> Table {
    let mut head = Table::new();
    head.insert("name".into(), Value::String(name.into()));
    let status = if outcome.failure.is_none() {
        "complete"
    } else {
        "partial"
    };
    head.insert("status".into(), Value::String(status.into()));
    if let Some(f) = &outcome.failure {
        head.insert("error".into(), Value::String(f.to_string()));
    }
    head.insert(
        "recorded_samples".into(),
        Value::Integer(outcome.trace.len() as i64),
    );
    if let Some(last) = outcome.trace.last() {
        head.insert("final_time".into(), Value::Float(last.t));
    }

    let mut m = Table::new();
    for (k, v) in metrics.entries() {
        m.insert(k.into(), Value::Float(v));
    }

    let pair = |a: f64, b: f64| Value::Array(vec![Value::Float(a), Value::Float(b)]);
    let horizon = cfg.sim.horizon;
    let mut windows = Table::new();
    windows.insert(
        "dist_initial".into(),
        pair(EARLY_DISTANCE.0, EARLY_DISTANCE.1),
    );
    windows.insert(
        "dist_final".into(),
        pair(horizon - LATE_DISTANCE_SPAN, horizon),
    );
    windows.insert("dist_min_late".into(), pair(horizon / 2.0, horizon));
    windows.insert(
        "spectrum_early".into(),
        pair(EARLY_SPECTRUM.0, EARLY_SPECTRUM.1),
    );
    windows.insert(
        "spectrum_late".into(),
        pair(horizon - LATE_SPECTRUM_SPAN, horizon),
    );
    windows.insert(
        "band".into(),
        pair(-BAND_FACTOR * cfg.sim.m, BAND_FACTOR * cfg.sim.m),
    );

    let mut doc = Table::new();
    doc.insert("summary".into(), Value::Table(head));
    doc.insert("metrics".into(), Value::Table(m));
    doc.insert("windows".into(), Value::Table(windows));
    doc.insert("config".into(), Value::Table(cfg.resolved.clone()));
    doc
}

/// Runs `cfg` and writes its outputs into `dir`.
pub fn run_experiment(name: &str, cfg: &ExperimentConfig, dir: &Path) -> Result<Manifest> {
    let outcome = execute(cfg)?;
    write_outputs(name, cfg, &outcome, dir)
}

pub fn write_outputs(
    name: &str,
    cfg: &ExperimentConfig,
    outcome: &Outcome,
    dir: &Path,
) -> Result<Manifest> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut files = Vec::new();
    let mut add = |name: &str, kind: &'static str| {
        files.push(ManifestEntry {
            name: name.into(),
            kind,
        })
    };

    write_trace_csv(&dir.join("trace.csv"), &outcome.trace)?;
    add("trace.csv", "trace");
    write_distance_csv(&dir.join("distance.csv"), &outcome.distances)?;
    add("distance.csv", "distance");
    write_spectra_csv(&dir.join("spectra.csv"), &spectra(outcome, cfg.sim.horizon))?;
    add("spectra.csv", "spectra");

    let samples = outcome.psi0();
    if let Ok(trace) = Trace::new(&samples, 0.0, outcome.sample_step) {
        if let Ok((bound, dispersive)) = bound_dispersive_split(&trace, cfg.sim.m, SPLIT_MARGIN) {
            let times: Vec<f64> = outcome.trace.iter().map(|r| r.t).collect();
            write_split_csv(&dir.join("split.csv"), &times, &bound, &dispersive)?;
            add("split.csv", "split");
        }
    }

    if let Some(state) = &outcome.final_state {
        let path = dir.join("final.kgd");
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = BufWriter::new(file);
        write_snapshot(&mut w, state, cfg.sim.m, &cfg.sim.grid)?;
        w.flush().map_err(|e| CliError::io(&path, e))?;
        add("final.kgd", "snapshot");
    }

    let metrics = metrics(cfg, outcome);
    write_text(
        &dir.join("summary.toml"),
        &summary_table(name, cfg, outcome, &metrics).to_string(),
    )?;
    add("summary.toml", "summary");

    let failure = outcome.failure.as_ref().map(|e| e.to_string());
    let mut doc = Table::new();
    doc.insert(
        "status".into(),
        Value::String(
            if failure.is_none() {
                "complete"
            } else {
                "partial"
            }
            .into(),
        ),
    );
    if let Some(f) = &failure {
        doc.insert("error".into(), Value::String(f.clone()));
    }
    let mut entries: Vec<Value> = files
        .iter()
        .map(|f| {
            let mut t = Table::new();
            t.insert("name".into(), Value::String(f.name.clone()));
            t.insert("kind".into(), Value::String(f.kind.into()));
            t.insert(
                "partial".into(),
                Value::Boolean(failure.is_some() && f.kind != "summary"),
            );
            Value::Table(t)
        })
        .collect();
    entries.push({
        let mut t = Table::new();
        t.insert("name".into(), Value::String("manifest.toml".into()));
        t.insert("kind".into(), Value::String("manifest".into()));
        t.insert("partial".into(), Value::Boolean(false));
        Value::Table(t)
    });
    doc.insert("files".into(), Value::Array(entries));
    write_text(&dir.join("manifest.toml"), &doc.to_string())?;
    files.push(ManifestEntry {
        name: "manifest.toml".into(),
        kind: "manifest",
    });

    Ok(Manifest {
        dir: dir.to_path_buf(),
        files,
        failure,
        metrics,
    })
}
