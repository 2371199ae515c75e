//! TOML experiment configuration.
//!
//! ```toml
//! [model]
//! m = 1.0
//! coeffs = [0.0, -0.5, 0.25]   # u_0, u_1, ... of U = sum u_n |psi|^(2n)
//!
//! [grid]
//! L = 100.0
//! num_points = 10001           # odd
//!
//! [time]
//! T = 200.0
//! dt = 0.018                   # default 0.9 dx
//! blowup_guard = 1e6
//!
//! [initial]
//! type = "gaussian"            # gaussian | solitary | linear_modes | snapshot
//! amplitude = 2.0              # number or [re, im]
//! width = 1.0
//! center = 0.0
//! k = 0.0
//! travelling = false
//!
//! [sponge]
//! enabled = true
//! width = 20.0                 # default 0.2 L
//! strength = 1.0
//!
//! [record]
//! stride = 10
//! R = 5.0
//! distance_every = 1           # distance evaluations every n recorded samples
//! ```
//!
//! Solitary data takes `omega`, an optional amplitude `c` (default: the
//! largest admissible one) and `phase`. Linear-mode data takes the complex
//! weights `plus` and `minus` of the two modes of a linear force `a psi`,
//! which requires `coeffs = [u0, -a/2]`. Snapshot data takes `path`.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use kgdefect::evolution::snapshot::read_snapshot;
use kgdefect::evolution::{
    GaussianPacket, InitialData, RecordSpec, SimConfig, Sponge, CFL_LIMIT, DEFAULT_BLOWUP_GUARD,
};
use kgdefect::{
    amplitudes_for_omega, linear_modes, Complex, FieldState64, Grid64, Potential64, SimConfig64,
    SolitaryWave64,
};
use toml::{Table, Value};

use crate::error::{CliError, Result};

/// Every key the schema accepts, as `section.key`.
pub const SCHEMA_KEYS: &[&str] = &[
    "model.m",
    "model.coeffs",
    "grid.L",
    "grid.num_points",
    "time.T",
    "time.dt",
    "time.blowup_guard",
    "initial.type",
    "initial.amplitude",
    "initial.width",
    "initial.center",
    "initial.k",
    "initial.travelling",
    "initial.omega",
    "initial.c",
    "initial.phase",
    "initial.plus",
    "initial.minus",
    "initial.path",
    "sponge.enabled",
    "sponge.width",
    "sponge.strength",
    "record.stride",
    "record.R",
    "record.distance_every",
];

/// Exact solution the run is compared against, when one is known.
#[derive(Debug, Clone)]
pub enum Reference {
    Solitary(SolitaryWave64),
    /// Weighted linear modes `(weight * profile, omega)`.
    Modes(Vec<(FieldState64, f64)>),
}

impl Reference {
    pub fn at(&self, grid: &Grid64, t: f64) -> FieldState64 {
        match self {
            Reference::Solitary(w) => w.sample_at(grid, t),
            Reference::Modes(modes) => {
                let mut acc = FieldState64::zeros(grid);
                for (state, omega) in modes {
                    acc = &acc + &state.scaled(Complex::from_polar(1.0, -omega * t));
                }
                acc.t = t;
                acc
            }
        }
    }
}

/// A validated experiment: the solver config plus what the harness needs
/// around it.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub sim: SimConfig64,
    pub reference: Option<Reference>,
    pub distance_every: usize,
    /// The configuration with every default filled in.
    pub resolved: Table,
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    config_from_table(&parse_table(text)?)
}

pub fn parse_table(text: &str) -> Result<Table> {
    text.parse::<Table>()
        .map_err(|e| CliError::config("<document>", e.to_string().trim_end().to_string()))
}

/// Sets `section.key` to `raw`, read as a TOML value (bare words are strings).
pub fn apply_override(table: &mut Table, key: &str, raw: &str) -> Result<()> {
    let (section, name) = key
        .split_once('.')
        .filter(|(s, n)| !s.is_empty() && !n.is_empty() && !n.contains('.'))
        .ok_or_else(|| CliError::config(key, "override keys have the form section.key"))?;
    let value = format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));
    let entry = table
        .entry(section.to_string())
        .or_insert_with(|| Value::Table(Table::new()));
    let Value::Table(sec) = entry else {
        return Err(CliError::config(section, "expected a table"));
    };
    sec.insert(name.to_string(), value);
    Ok(())
}

/// Parses `section.key=value`.
pub fn split_assignment(s: &str) -> Result<(String, String)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| CliError::config(s, "expected key=value"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

struct Section<'a> {
    name: &'static str,
    table: Option<&'a Table>,
    seen: BTreeSet<String>,
    resolved: Table,
}

impl<'a> Section<'a> {
    fn new(doc: &'a Table, name: &'static str) -> Result<Self> {
        let table = match doc.get(name) {
            None => None,
            Some(Value::Table(t)) => Some(t),
            Some(_) => return Err(CliError::config(name, "expected a table")),
        };
        Ok(Self {
            name,
            table,
            seen: BTreeSet::new(),
            resolved: Table::new(),
        })
    }

    fn path(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn err(&self, key: &str, message: impl Into<String>) -> CliError {
        CliError::config(self.path(key), message)
    }

    fn raw(&mut self, key: &str) -> Option<&'a Value> {
        self.seen.insert(key.to_string());
        self.table.and_then(|t| t.get(key))
    }

    fn missing(&self, key: &str) -> CliError {
        self.err(key, "missing required key")
    }

    fn float(&mut self, key: &str) -> Result<Option<f64>> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(v) => Err(self.err(key, format!("expected a number, found {}", v.type_str()))),
        }
    }

    fn float_or(&mut self, key: &str, default: f64) -> Result<f64> {
        let x = self.float(key)?.unwrap_or(default);
        if !x.is_finite() {
            return Err(self.err(key, format!("must be finite, got {x}")));
        }
        self.resolved.insert(key.into(), Value::Float(x));
        Ok(x)
    }

    fn float_req(&mut self, key: &str) -> Result<f64> {
        let x = self.float(key)?.ok_or_else(|| self.missing(key))?;
        self.float_or(key, x)
    }

    fn count_or(&mut self, key: &str, default: Option<usize>) -> Result<usize> {
        let n = match self.raw(key) {
            None => default.ok_or_else(|| self.missing(key))?,
            Some(Value::Integer(i)) => usize::try_from(*i)
                .map_err(|_| self.err(key, format!("must be a non-negative integer, got {i}")))?,
            Some(v) => {
                return Err(self.err(key, format!("expected an integer, found {}", v.type_str())))
            }
        };
        self.resolved.insert(key.into(), Value::Integer(n as i64));
        Ok(n)
    }

    fn bool_or(&mut self, key: &str, default: bool) -> Result<bool> {
        let b = match self.raw(key) {
            None => default,
            Some(Value::Boolean(b)) => *b,
            Some(v) => {
                return Err(self.err(key, format!("expected a boolean, found {}", v.type_str())))
            }
        };
        self.resolved.insert(key.into(), Value::Boolean(b));
        Ok(b)
    }

    fn string(&mut self, key: &str) -> Result<Option<String>> {
        match self.raw(key) {
            None => Ok(None),
            Some(Value::String(s)) => {
                self.resolved.insert(key.into(), Value::String(s.clone()));
                Ok(Some(s.clone()))
            }
            Some(v) => Err(self.err(key, format!("expected a string, found {}", v.type_str()))),
        }
    }

    fn number_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(v) = self.raw(key) else {
            return Ok(None);
        };
        let Value::Array(items) = v else {
            return Err(self.err(
                key,
                format!("expected a list of numbers, found {}", v.type_str()),
            ));
        };
        items
            .iter()
            .map(|x| match x {
                Value::Float(f) => Ok(*f),
                Value::Integer(i) => Ok(*i as f64),
                other => {
                    Err(self.err(key, format!("expected numbers, found {}", other.type_str())))
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    /// A number or a `[re, im]` pair.
    fn complex_or(&mut self, key: &str, default: Complex<f64>) -> Result<Complex<f64>> {
        let z = match self.raw(key) {
            None => default,
            Some(Value::Float(x)) => Complex::new(*x, 0.0),
            Some(Value::Integer(i)) => Complex::new(*i as f64, 0.0),
            Some(Value::Array(_)) => match self.number_list(key)?.as_deref() {
                Some(&[re, im]) => Complex::new(re, im),
                _ => return Err(self.err(key, "expected [re, im]")),
            },
            Some(v) => {
                return Err(self.err(
                    key,
                    format!("expected a number or [re, im], found {}", v.type_str()),
                ))
            }
        };
        let value = if z.im == 0.0 {
            Value::Float(z.re)
        } else {
            Value::Array(vec![Value::Float(z.re), Value::Float(z.im)])
        };
        self.resolved.insert(key.into(), value);
        Ok(z)
    }

    /// Rejects keys that were never looked up and stores the resolved section.
    fn finish(self, out: &mut Table) -> Result<()> {
        if let Some(t) = self.table {
            if let Some(k) = t.keys().find(|k| !self.seen.contains(*k)) {
                return Err(CliError::config(self.path(k), "unknown key"));
            }
        }
        out.insert(self.name.into(), Value::Table(self.resolved));
        Ok(())
    }
}

pub fn config_from_table(doc: &Table) -> Result<ExperimentConfig> {
    const SECTIONS: [&str; 6] = ["model", "grid", "time", "initial", "sponge", "record"];
    if let Some(k) = doc.keys().find(|k| !SECTIONS.contains(&k.as_str())) {
        return Err(CliError::config(k.as_str(), "unknown section"));
    }
    let mut resolved = Table::new();

    let mut model = Section::new(doc, "model")?;
    let m = model.float_req("m")?;
    if m <= 0.0 {
        return Err(model.err("m", format!("mass must be positive, got {m}")));
    }
    let coeffs = model
        .number_list("coeffs")?
        .ok_or_else(|| model.missing("coeffs"))?;
    let potential = Potential64::new(coeffs).map_err(|e| model.err("coeffs", e.to_string()))?;
    potential
        .validate_wellposedness(m)
        .map_err(|e| model.err("coeffs", e.to_string()))?;
    model.resolved.insert(
        "coeffs".into(),
        Value::Array(
            potential
                .coeffs()
                .iter()
                .map(|&c| Value::Float(c))
                .collect(),
        ),
    );
    model.finish(&mut resolved)?;

    let mut grid_sec = Section::new(doc, "grid")?;
    let half_length = grid_sec.float_req("L")?;
    if half_length <= 0.0 {
        return Err(grid_sec.err("L", format!("must be positive, got {half_length}")));
    }
    let num_points = grid_sec.count_or("num_points", None)?;
    if num_points % 2 == 0 {
        return Err(grid_sec.err(
            "num_points",
            format!("must be odd so that x = 0 is a grid node, got {num_points}"),
        ));
    }
    let grid = Grid64::new(half_length, num_points)
        .map_err(|e| grid_sec.err("num_points", e.to_string()))?;
    grid_sec.finish(&mut resolved)?;

    let mut time = Section::new(doc, "time")?;
    let horizon = time.float_req("T")?;
    if horizon <= 0.0 {
        return Err(time.err("T", format!("must be positive, got {horizon}")));
    }
    let dt = time.float_or("dt", CFL_LIMIT * grid.dx())?;
    if dt <= 0.0 || dt > CFL_LIMIT * grid.dx() * (1.0 + 1e-12) {
        return Err(time.err(
            "dt",
            format!(
                "must lie in (0, {CFL_LIMIT} dx] = (0, {}], got {dt}",
                CFL_LIMIT * grid.dx()
            ),
        ));
    }
    let blowup_guard = time.float_or("blowup_guard", DEFAULT_BLOWUP_GUARD)?;
    if blowup_guard <= 0.0 {
        return Err(time.err("blowup_guard", "must be positive"));
    }
    time.finish(&mut resolved)?;

    let mut init = Section::new(doc, "initial")?;
    let (initial, reference) = initial_data(&mut init, &potential, m, &grid)?;
    init.finish(&mut resolved)?;

    let mut sp = Section::new(doc, "sponge")?;
    let sponge = if sp.bool_or("enabled", true)? {
        let width = sp.float_or("width", 0.2 * half_length)?;
        if width < 0.0 || width >= half_length / 2.0 {
            return Err(sp.err(
                "width",
                format!(
                    "must lie in [0, L/2) = [0, {}), got {width}",
                    half_length / 2.0
                ),
            ));
        }
        let strength = sp.float_or("strength", 1.0)?;
        if strength < 0.0 {
            return Err(sp.err("strength", format!("must be non-negative, got {strength}")));
        }
        Sponge::Layer { width, strength }
    } else {
        for key in ["width", "strength"] {
            if sp.raw(key).is_some() {
                return Err(sp.err(key, "has no effect while sponge.enabled = false"));
            }
        }
        Sponge::None
    };
    sp.finish(&mut resolved)?;

    let mut rec = Section::new(doc, "record")?;
    let stride = rec.count_or("stride", Some(10))?;
    if stride == 0 {
        return Err(rec.err("stride", "must be positive"));
    }
    let radius = rec.float_or("R", 5.0)?;
    if radius <= 0.0 || radius >= half_length - sponge.width() {
        return Err(rec.err(
            "R",
            format!(
                "must lie in (0, L - sponge width) = (0, {})",
                half_length - sponge.width()
            ),
        ));
    }
    let distance_every = rec.count_or("distance_every", Some(1))?;
    if distance_every == 0 {
        return Err(rec.err("distance_every", "must be positive"));
    }
    rec.finish(&mut resolved)?;

    let sim = SimConfig {
        m,
        potential,
        grid,
        dt,
        horizon,
        sponge,
        initial,
        record: RecordSpec {
            stride,
            window_radius: radius,
            snapshot_stride: None,
        },
        blowup_guard,
    };
    // What remains after the per-key checks is the reflection budget of
    // sponge-free runs, which ties the horizon to the data and the window.
    sim.validate()
        .map_err(|e| CliError::config("time.T", e.to_string()))?;
    Ok(ExperimentConfig {
        sim,
        reference,
        distance_every,
        resolved,
    })
}

fn initial_data(
    sec: &mut Section<'_>,
    potential: &Potential64,
    m: f64,
    grid: &Grid64,
) -> Result<(InitialData<f64>, Option<Reference>)> {
    let kind = sec.string("type")?.unwrap_or_else(|| "gaussian".into());
    sec.resolved
        .insert("type".into(), Value::String(kind.clone()));
    match kind.as_str() {
        "gaussian" => {
            let amplitude = sec.complex_or("amplitude", Complex::new(2.0, 0.0))?;
            let width = sec.float_or("width", 1.0)?;
            if width <= 0.0 {
                return Err(sec.err("width", format!("must be positive, got {width}")));
            }
            let center = sec.float_or("center", 0.0)?;
            let wavenumber = sec.float_or("k", 0.0)?;
            let travelling = sec.bool_or("travelling", false)?;
            let packet = GaussianPacket {
                amplitude,
                width,
                center,
                wavenumber,
                travelling,
            };
            Ok((InitialData::Gaussian(packet), None))
        }
        "solitary" => {
            let omega = sec.float_req("omega")?;
            let amplitudes = amplitudes_for_omega(omega, potential, m)
                .map_err(|e| sec.err("omega", e.to_string()))?;
            let c = match sec.float("c")? {
                None => *amplitudes.last().ok_or_else(|| {
                    sec.err(
                        "omega",
                        format!("no nonzero solitary amplitude at omega = {omega}"),
                    )
                })?,
                Some(c) => *amplitudes
                    .iter()
                    .find(|&&a| (a - c).abs() <= 1e-6 * a.max(1.0))
                    .ok_or_else(|| {
                        sec.err(
                            "c",
                            format!(
                                "{c} is not an admissible amplitude; candidates {amplitudes:?}"
                            ),
                        )
                    })?,
            };
            sec.resolved.insert("c".into(), Value::Float(c));
            let phase = sec.float_or("phase", 0.0)?;
            let wave = SolitaryWave64::new(omega, c, phase, m)
                .map_err(|e| sec.err("omega", e.to_string()))?;
            Ok((InitialData::Solitary(wave), Some(Reference::Solitary(wave))))
        }
        "linear_modes" => {
            let coeffs = potential.coeffs();
            if !potential.is_linear() {
                return Err(CliError::config(
                    "model.coeffs",
                    "linear_modes needs a linear force: coeffs = [u0, -a/2]",
                ));
            }
            let a = -2.0 * coeffs[1];
            let modes =
                linear_modes(a, m).map_err(|e| CliError::config("model.coeffs", e.to_string()))?;
            if modes.iter().any(|md| md.secular || md.omega.im != 0.0) {
                return Err(CliError::config(
                    "model.coeffs",
                    format!("a = {a} has no oscillating mode pair"),
                ));
            }
            let weights = [
                sec.complex_or("plus", Complex::new(1.0, 0.0))?,
                sec.complex_or("minus", Complex::new(0.0, 0.0))?,
            ];
            let mut parts = Vec::new();
            for (mode, w) in modes.iter().zip(weights) {
                if w != Complex::new(0.0, 0.0) {
                    let profile = mode
                        .sample(grid)
                        .map_err(|e| sec.err("type", e.to_string()))?
                        .scaled(w);
                    parts.push((profile, mode.omega.re));
                }
            }
            let mut start = FieldState64::zeros(grid);
            for (s, _) in &parts {
                start = &start + s;
            }
            Ok((InitialData::Samples(start), Some(Reference::Modes(parts))))
        }
        "snapshot" => {
            let path = PathBuf::from(sec.string("path")?.ok_or_else(|| sec.missing("path"))?);
            let file = File::open(&path).map_err(|e| CliError::io(&path, e))?;
            let (header, mut state) =
                read_snapshot(BufReader::new(file)).map_err(|e| sec.err("path", e.to_string()))?;
            let snap_grid: Grid64 = header.grid().map_err(|e| sec.err("path", e.to_string()))?;
            if snap_grid != *grid {
                return Err(sec.err(
                    "path",
                    format!(
                        "snapshot grid (L = {}, num_points = {}) differs from the configured grid",
                        header.half_length, header.num_points
                    ),
                ));
            }
            state.t = 0.0;
            Ok((InitialData::Samples(state), None))
        }
        other => Err(sec.err("type", format!("unknown initial data type {other:?}"))),
    }
}
