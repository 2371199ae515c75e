use num_complex::Complex;

use super::config::SimConfig;
use super::stepper::Stepper;
use crate::diagnostics::{local_seminorm, SeminormSpec};
use crate::energy::energy;
use crate::error::Result;
use crate::grid::FieldState;
use crate::scalar::Real;

/// Time series captured every `record.stride` steps, starting at `t = 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TraceRecord<T> {
    pub times: Vec<T>,
    /// `psi(0, t)`.
    pub psi0: Vec<Complex<T>>,
    pub energy: Vec<T>,
    /// Local seminorm `||Psi(t)||_{E,R}` on the configured window.
    pub local_seminorm: Vec<T>,
    pub snapshots: Vec<FieldState<T>>,
}

impl<T: Real> TraceRecord<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Spacing between recorded samples.
    pub fn sample_step(&self) -> Option<T> {
        (self.times.len() >= 2).then(|| self.times[1] - self.times[0])
    }

    /// `max_t |E(t) - E(0)| / max(1, |E(0)|)`.
    pub fn relative_energy_drift(&self) -> T {
        let Some(&e0) = self.energy.first() else {
            return T::zero();
        };
        let scale = T::one().max(e0.abs());
        self.energy
            .iter()
            .fold(T::zero(), |acc, &e| acc.max((e - e0).abs() / scale))
    }
}

/// Receives a read-only view of every recorded state.
pub trait Observer<T> {
    fn observe(&mut self, state: &FieldState<T>) -> Result<()>;
}

impl<T, F> Observer<T> for F
where
    F: FnMut(&FieldState<T>) -> Result<()>,
{
    fn observe(&mut self, state: &FieldState<T>) -> Result<()> {
        self(state)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput<T> {
    pub trace: TraceRecord<T>,
    pub final_state: FieldState<T>,
}

/// Runs the configured experiment to the horizon without extra observers.
pub fn run<T: Real>(cfg: &SimConfig<T>) -> Result<RunOutput<T>> {
    run_observed(cfg, &mut |_: &FieldState<T>| Ok(()))
}

/// Validates `cfg`, then steps to the horizon, recording energy, the local
/// seminorm and `psi(0, t)` and calling `observer` at each recorded step.
pub fn run_observed<T: Real, O: Observer<T> + ?Sized>(
    cfg: &SimConfig<T>,
    observer: &mut O,
) -> Result<RunOutput<T>> {
    cfg.validate()?;
    let mut state = cfg.initial.sample(&cfg.grid, cfg.m)?;
    let trace = run_from(cfg, &mut state, observer)?;
    Ok(RunOutput {
        trace,
        final_state: state,
    })
}

fn run_from<T: Real, O: Observer<T> + ?Sized>(
    cfg: &SimConfig<T>,
    state: &mut FieldState<T>,
    observer: &mut O,
) -> Result<TraceRecord<T>> {
    let window = SeminormSpec::new(cfg.record.window_radius)?;
    let mut trace = TraceRecord::default();
    let mut record =
        |state: &FieldState<T>, step: usize, trace: &mut TraceRecord<T>| -> Result<()> {
            trace.times.push(state.t);
            trace.psi0.push(state.psi[cfg.grid.origin()]);
            trace
                .energy
                .push(energy(state, &cfg.potential, cfg.m, &cfg.grid)?);
            trace
                .local_seminorm
                .push(local_seminorm(state, &cfg.grid, &window));
            if cfg
                .record
                .snapshot_stride
                .is_some_and(|s| step.is_multiple_of(s))
            {
                trace.snapshots.push(state.clone());
            }
            observer.observe(state)
        };

    let steps = cfg.num_steps();
    let mut stepper = Stepper::new(cfg, state)?;
    state.t = T::zero();
    record(state, 0, &mut trace)?;
    for k in 1..=steps {
        stepper.advance(state)?;
        state.t = T::from_count(k) * cfg.dt;
        if k % cfg.record.stride == 0 {
            record(state, k, &mut trace)?;
        }
    }
    Ok(trace)
}
