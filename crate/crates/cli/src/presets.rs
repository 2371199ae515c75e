//! Named experiments. Each preset is a complete configuration document that
//! `--set section.key=value` overrides edit before validation.

use toml::Table;

use crate::config::{apply_override, config_from_table, parse_table, ExperimentConfig};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Quartic potential, resting Gaussian bump, long sponged run.
    Attraction,
    /// Superposition of the two modes of a linear force with `a = 1.2`.
    LinearCounterexample,
    /// Repulsive linear force `a = -1`, the only solitary wave is zero.
    LinearDecay,
    /// Exact solitary wave of the quartic potential, no sponge.
    SolitaryStability,
    /// The `a = 1.2` plus-mode at `(dx, dt)` and `(dx/2, dt/2)`.
    ConvergenceOrder,
}

pub const ALL: [Preset; 5] = [
    Preset::Attraction,
    Preset::LinearCounterexample,
    Preset::LinearDecay,
    Preset::SolitaryStability,
    Preset::ConvergenceOrder,
];

const ATTRACTION: &str = r#"
[model]
m = 1.0
coeffs = [0.0, -0.5, 0.25]

[grid]
L = 100.0
num_points = 10001

[time]
T = 200.0

[initial]
type = "gaussian"
amplitude = 2.0
width = 1.0

[sponge]
width = 20.0

[record]
R = 5.0
"#;

const LINEAR_COUNTEREXAMPLE: &str = r#"
[model]
m = 1.0
coeffs = [0.0, -0.6]

[grid]
L = 100.0
num_points = 10001

[time]
T = 200.0

[initial]
type = "linear_modes"
plus = 1.0
minus = 1.0

[record]
R = 5.0
"#;

const LINEAR_DECAY: &str = r#"
[model]
m = 1.0
coeffs = [0.0, 0.5]

[grid]
L = 100.0
num_points = 10001

[time]
T = 150.0

[initial]
type = "gaussian"
amplitude = 2.0
width = 1.0

[record]
R = 5.0
"#;

const SOLITARY_STABILITY: &str = r#"
[model]
m = 1.0
coeffs = [0.0, -0.5, 0.25]

[grid]
L = 80.0
num_points = 8001

[time]
T = 50.0
dt = 0.018

[initial]
type = "solitary"
omega = 0.9682458365518543

[sponge]
enabled = false

[record]
R = 5.0
"#;

const CONVERGENCE_ORDER: &str = r#"
[model]
m = 1.0
coeffs = [0.0, -0.6]

[grid]
L = 40.0
num_points = 4001

[time]
T = 10.0
dt = 0.018

[initial]
type = "linear_modes"
plus = 1.0
minus = 0.0

[sponge]
enabled = false

[record]
R = 5.0
"#;

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Attraction => "attraction",
            Preset::LinearCounterexample => "linear_counterexample",
            Preset::LinearDecay => "linear_decay",
            Preset::SolitaryStability => "solitary_stability",
            Preset::ConvergenceOrder => "convergence_order",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        ALL.into_iter().find(|p| p.name() == name).ok_or_else(|| {
            let names: Vec<_> = ALL.iter().map(|p| p.name()).collect();
            CliError::Input(format!(
                "unknown preset {name:?}; available: {}",
                names.join(", ")
            ))
        })
    }

    pub fn document(self) -> &'static str {
        match self {
            Preset::Attraction => ATTRACTION,
            Preset::LinearCounterexample => LINEAR_COUNTEREXAMPLE,
            Preset::LinearDecay => LINEAR_DECAY,
            Preset::SolitaryStability => SOLITARY_STABILITY,
            Preset::ConvergenceOrder => CONVERGENCE_ORDER,
        }
    }

    /// Whether the preset also runs a refined copy with `dx` and `dt` halved.
    pub fn refines(self) -> bool {
        matches!(self, Preset::ConvergenceOrder)
    }

    /// The preset document with `overrides` applied.
    pub fn table(self, overrides: &[(String, String)]) -> Result<Table> {
        let mut table = parse_table(self.document())?;
        for (k, v) in overrides {
            apply_override(&mut table, k, v)?;
        }
        Ok(table)
    }

    pub fn config(self, overrides: &[(String, String)]) -> Result<ExperimentConfig> {
        config_from_table(&self.table(overrides)?)
    }
}

/// `cfg` with `dx` and `dt` halved: `2 n - 1` points and half the resolved step.
pub fn refined(cfg: &ExperimentConfig) -> Result<ExperimentConfig> {
    let mut table = cfg.resolved.clone();
    let n = cfg.sim.grid.len();
    apply_override(&mut table, "grid.num_points", &(2 * n - 1).to_string())?;
    apply_override(&mut table, "time.dt", &format!("{:?}", cfg.sim.dt / 2.0))?;
    apply_override(
        &mut table,
        "record.stride",
        &(2 * cfg.sim.record.stride).to_string(),
    )?;
    config_from_table(&table)
}
