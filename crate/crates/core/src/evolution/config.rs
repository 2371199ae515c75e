use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{FieldState, Grid};
use crate::potential::PotentialSpec;
use crate::scalar::Real;
use crate::solitary::SolitaryWave;

/// Largest admissible `dt / dx`.
pub const CFL_LIMIT: f64 = 0.9;
/// Default blow-up guard on `max |psi|`.
pub const DEFAULT_BLOWUP_GUARD: f64 = 1e6;
/// Relative threshold defining the support radius of initial data.
pub const SUPPORT_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sponge<T> {
    None,
    Layer { width: T, strength: T },
}

impl<T: Real> Sponge<T> {
    pub fn width(&self) -> T {
        match *self {
            Sponge::None => T::zero(),
            Sponge::Layer { width, .. } => width,
        }
    }
}

/// Gaussian packet `A e^{-(x - x0)^2 / w^2} e^{i k x}`.
///
/// A resting packet starts with `pi = 0`; a travelling one with
/// `pi = -i sqrt(k^2 + m^2) psi`, which launches it in the direction of `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket<T> {
    pub amplitude: Complex<T>,
    pub width: T,
    pub center: T,
    pub wavenumber: T,
    pub travelling: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialData<T> {
    Gaussian(GaussianPacket<T>),
    Solitary(SolitaryWave<T>),
    Superposition(Vec<InitialData<T>>),
    Samples(FieldState<T>),
}

impl<T: Real> InitialData<T> {
    /// Samples the data onto the grid with Dirichlet endpoints at `t = 0`.
    pub fn sample(&self, grid: &Grid<T>, m: T) -> Result<FieldState<T>> {
        let mut state = match self {
            InitialData::Gaussian(g) => {
                if !(g.width > T::zero()) {
                    return Err(Error::InvalidParameter(format!(
                        "gaussian width must be positive, got {}",
                        g.width
                    )));
                }
                let psi: Vec<Complex<T>> = grid
                    .coords()
                    .map(|x| {
                        let d = (x - g.center) / g.width;
                        g.amplitude
                            * (-d * d).exp()
                            * Complex::from_polar(T::one(), g.wavenumber * x)
                    })
                    .collect();
                let pi = if g.travelling {
                    let freq = (g.wavenumber * g.wavenumber + m * m).sqrt();
                    let rot = Complex::new(T::zero(), -freq * g.wavenumber.signum());
                    psi.iter().map(|z| rot * z).collect()
                } else {
                    vec![Complex::new(T::zero(), T::zero()); psi.len()]
                };
                FieldState {
                    psi,
                    pi,
                    t: T::zero(),
                }
            }
            InitialData::Solitary(w) => w.sample(grid),
            InitialData::Superposition(parts) => {
                let mut acc = FieldState::zeros(grid);
                for part in parts {
                    acc = &acc + &part.sample(grid, m)?;
                }
                acc
            }
            InitialData::Samples(s) => {
                s.check_grid(grid)?;
                s.clone()
            }
        };
        state.t = T::zero();
        state.pin_boundary();
        Ok(state)
    }
}

/// Recording cadence and observation window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecordSpec<T> {
    /// Steps between recorded samples.
    pub stride: usize,
    /// Half-width `R` of the local seminorm window.
    pub window_radius: T,
    /// Steps between stored snapshots (a multiple of `stride`), if any.
    pub snapshot_stride: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig<T> {
    pub m: T,
    pub potential: PotentialSpec<T>,
    pub grid: Grid<T>,
    pub dt: T,
    pub horizon: T,
    pub sponge: Sponge<T>,
    pub initial: InitialData<T>,
    pub record: RecordSpec<T>,
    pub blowup_guard: T,
}

impl<T: Real> SimConfig<T> {
    /// Config with the documented defaults: `dt = 0.9 dx`, a sponge of width
    /// `0.2 L` and strength 1, recording every 10 steps on a window `R = 5`.
    pub fn with_defaults(
        m: T,
        potential: PotentialSpec<T>,
        grid: Grid<T>,
        horizon: T,
        initial: InitialData<T>,
    ) -> Self {
        let dt = T::lit(CFL_LIMIT) * grid.dx();
        let sponge = Sponge::Layer {
            width: T::lit(0.2) * grid.half_length(),
            strength: T::one(),
        };
        Self {
            m,
            potential,
            grid,
            dt,
            horizon,
            sponge,
            initial,
            record: RecordSpec {
                stride: 10,
                window_radius: T::lit(5.0),
                snapshot_stride: None,
            },
            blowup_guard: T::lit(DEFAULT_BLOWUP_GUARD),
        }
    }

    /// Number of time steps to reach the horizon.
    pub fn num_steps(&self) -> usize {
        (self.horizon / self.dt).round().to_usize().unwrap_or(0)
    }

    /// Checks every invariant a run needs, including well-posedness and the
    /// reflection budget of sponge-free runs.
    pub fn validate(&self) -> Result<()> {
        self.validate_static()?;
        self.potential.validate_wellposedness(self.m)?;
        if let Sponge::None = self.sponge {
            let initial = self.initial.sample(&self.grid, self.m)?;
            let a = support_radius(&initial, &self.grid);
            let budget = T::lit(2.0) * self.grid.half_length() - a - self.record.window_radius;
            if self.horizon > budget {
                return Err(Error::InvalidConfig(format!(
                    "without a sponge the horizon T = {} must not exceed 2L - a - R = {} \
                     (support radius a = {}), or boundary reflections reach the window",
                    self.horizon, budget, a
                )));
            }
        }
        Ok(())
    }

    /// The invariants that do not require sampling the initial data.
    pub fn validate_static(&self) -> Result<()> {
        let cfg_err = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.m > T::zero()) {
            return cfg_err(format!("mass m must be positive, got {}", self.m));
        }
        if !(self.dt > T::zero()) {
            return cfg_err(format!("dt must be positive, got {}", self.dt));
        }
        let cfl = T::lit(CFL_LIMIT) * self.grid.dx() * (T::one() + T::lit(1e-12));
        if self.dt > cfl {
            return cfg_err(format!(
                "CFL violated: dt = {} exceeds {} dx = {}",
                self.dt,
                CFL_LIMIT,
                T::lit(CFL_LIMIT) * self.grid.dx()
            ));
        }
        if !(self.horizon > T::zero()) {
            return cfg_err(format!("horizon T must be positive, got {}", self.horizon));
        }
        if self.record.stride == 0 {
            return cfg_err("record stride must be positive".into());
        }
        if let Some(s) = self.record.snapshot_stride {
            if s == 0 || s % self.record.stride != 0 {
                return cfg_err(format!(
                    "snapshot stride {s} must be a positive multiple of the record stride {}",
                    self.record.stride
                ));
            }
        }
        let half = self.grid.half_length();
        if let Sponge::Layer { width, strength } = self.sponge {
            if width < T::zero() || width >= half / T::lit(2.0) {
                return cfg_err(format!(
                    "sponge width {width} must lie in [0, L/2) = [0, {})",
                    half / T::lit(2.0)
                ));
            }
            if strength < T::zero() {
                return cfg_err(format!("sponge strength must be >= 0, got {strength}"));
            }
        }
        let r = self.record.window_radius;
        if !(r > T::zero()) || r >= half - self.sponge.width() {
            return cfg_err(format!(
                "window radius R = {r} must be positive and below L - sponge width = {}",
                half - self.sponge.width()
            ));
        }
        if !(self.blowup_guard > T::zero()) {
            return cfg_err("blow-up guard must be positive".into());
        }
        Ok(())
    }
}

/// Largest `|x|` at which `max(|psi|, |pi|)` exceeds `1e-8` of its maximum.
pub fn support_radius<T: Real>(state: &FieldState<T>, grid: &Grid<T>) -> T {
    let mag = |j: usize| state.psi[j].norm().max(state.pi[j].norm());
    let peak = (0..state.len()).map(mag).fold(T::zero(), T::max);
    if peak == T::zero() {
        return T::zero();
    }
    let cut = peak * T::lit(SUPPORT_THRESHOLD);
    (0..state.len())
        .filter(|&j| mag(j) > cut)
        .map(|j| grid.x(j).abs())
        .fold(T::zero(), T::max)
}
