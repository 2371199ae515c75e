//! Experiment harness for the `kgdefect` solver: TOML configs, preset
//! experiments, CSV and snapshot outputs, spectral post-processing and
//! parameter sweeps.

pub mod analyze;
pub mod config;
pub mod error;
pub mod experiment;
pub mod presets;
pub mod sweep;
pub mod table;

use std::path::Path;

pub use config::{parse_config, ExperimentConfig};
pub use error::{CliError, Result};
pub use experiment::{run_experiment, Manifest, Metrics};
pub use presets::Preset;

/// Outcome of a preset: the main run and, for refining presets, the run at
/// half the grid and time step.
#[derive(Debug, Clone)]
pub struct PresetRun {
    pub main: Manifest,
    pub refined: Option<Manifest>,
}

impl PresetRun {
    /// `error(dx, dt) / error(dx/2, dt/2)` of the final reference error.
    pub fn convergence_ratio(&self) -> Option<f64> {
        let coarse = self.main.metrics.reference_error_final?;
        let fine = self.refined.as_ref()?.metrics.reference_error_final?;
        Some(coarse / fine)
    }
}

/// Runs `preset` with `overrides` into `out`. A refining preset writes its
/// second run to `out/refined` and adds the observed ratio to `out/order.toml`.
pub fn run_preset(preset: Preset, overrides: &[(String, String)], out: &Path) -> Result<PresetRun> {
    let cfg = preset.config(overrides)?;
    let main = run_experiment(preset.name(), &cfg, out)?;
    if !preset.refines() || !main.is_complete() {
        return Ok(PresetRun {
            main,
            refined: None,
        });
    }
    let fine_cfg = presets::refined(&cfg)?;
    let refined = Some(run_experiment(
        preset.name(),
        &fine_cfg,
        &out.join("refined"),
    )?);
    let run = PresetRun { main, refined };
    if let Some(ratio) = run.convergence_ratio() {
        let path = out.join("order.toml");
        let mut doc = toml::Table::new();
        doc.insert("error_ratio".into(), toml::Value::Float(ratio));
        doc.insert("observed_order".into(), toml::Value::Float(ratio.log2()));
        std::fs::write(&path, doc.to_string()).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(run)
}
