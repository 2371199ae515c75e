//! Numerical laboratory for the 1D Klein-Gordon equation
//!
//! ```text
//! psi_tt = psi_xx - m^2 psi + delta(x) F(psi(0, t)),   F = -grad U,  U = sum_n u_n |psi|^(2n)
//! ```
//!
//! with an energy-conserving velocity-Verlet solver, closed-form solitary
//! waves `c e^{i theta} e^{-kappa |x|} e^{-i omega t}`, and diagnostics that
//! measure how close a trajectory comes to the solitary manifold in local
//! energy seminorms.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below fix the common double-precision case.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod energy;
pub mod error;
pub mod evolution;
pub mod grid;
pub mod potential;
pub mod roots;
pub mod scalar;
pub mod solitary;
pub mod spectral;

pub use diagnostics::{
    dist_to_manifold, full_norm, local_seminorm, optimal_phase, ManifoldCatalog, ManifoldDistance,
    SeminormSpec,
};
pub use energy::energy;
pub use error::{Error, Result};
pub use evolution::{
    discrete_rhs, run, run_observed, sponge_profile, step, GaussianPacket, InitialData, Observer,
    RecordSpec, RunOutput, SimConfig, Sponge, Stepper, TraceRecord,
};
pub use grid::{FieldState, Grid};
pub use potential::{LowerBound, PotentialSpec};
pub use scalar::Real;
pub use solitary::{
    amplitudes_for_omega, kappa_of_omega, linear_modes, manifold_table, LinearMode, ManifoldBranch,
    SolitaryWave,
};
pub use spectral::{
    band_mass_fraction, bound_dispersive_split, concentration_of, spectral_concentration,
    windowed_spectrum, Concentration, Spectrum, Trace,
};

pub use num_complex::Complex;

pub type Grid64 = Grid<f64>;
pub type FieldState64 = FieldState<f64>;
pub type Potential64 = PotentialSpec<f64>;
pub type SolitaryWave64 = SolitaryWave<f64>;
pub type SimConfig64 = SimConfig<f64>;
pub type TraceRecord64 = TraceRecord<f64>;
pub type Spectrum64 = Spectrum<f64>;
pub type ManifoldCatalog64 = ManifoldCatalog<f64>;

pub type Grid32 = Grid<f32>;
pub type FieldState32 = FieldState<f32>;
pub type Potential32 = PotentialSpec<f32>;
pub type SimConfig32 = SimConfig<f32>;
