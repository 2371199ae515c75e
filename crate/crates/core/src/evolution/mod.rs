//! Time integration of the Cauchy problem `Psi_t = (pi, psi_xx - m^2 psi + delta F(psi(0)))`.

mod config;
mod runner;
pub mod snapshot;
mod sponge;
mod stepper;

pub use config::{
    support_radius, GaussianPacket, InitialData, RecordSpec, SimConfig, Sponge, CFL_LIMIT,
    DEFAULT_BLOWUP_GUARD,
};
pub use runner::{run, run_observed, Observer, RunOutput, TraceRecord};
pub use sponge::sponge_profile;
pub use stepper::{discrete_rhs, step, Stepper};
