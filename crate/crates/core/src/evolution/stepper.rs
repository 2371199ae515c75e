use num_complex::Complex;

use super::config::{SimConfig, Sponge};
use super::sponge::sponge_profile;
use crate::error::{Error, Result};
use crate::grid::{FieldState, Grid};
use crate::potential::PotentialSpec;
use crate::scalar::Real;

/// Writes `psi'' - m^2 psi + delta F(psi(0))` into `out`. The point force is
/// spread over the origin cell as `F / dx`; endpoints stay pinned at zero.
pub(crate) fn accelerate<T: Real>(
    psi: &[Complex<T>],
    out: &mut [Complex<T>],
    grid: &Grid<T>,
    m: T,
    p: &PotentialSpec<T>,
) {
    let n = psi.len();
    let inv_dx2 = T::one() / (grid.dx() * grid.dx());
    let m2 = m * m;
    let two = T::lit(2.0);
    out[0] = Complex::new(T::zero(), T::zero());
    out[n - 1] = out[0];
    for j in 1..n - 1 {
        out[j] = (psi[j + 1] - psi[j] * two + psi[j - 1]) * inv_dx2 - psi[j] * m2;
    }
    let o = grid.origin();
    out[o] += p.force(psi[o]) / grid.dx();
}

/// Acceleration `pi_dot` of the semi-discrete system at `state`.
pub fn discrete_rhs<T: Real>(state: &FieldState<T>, cfg: &SimConfig<T>) -> Result<Vec<Complex<T>>> {
    state.check_grid(&cfg.grid)?;
    let mut out = vec![Complex::new(T::zero(), T::zero()); state.len()];
    accelerate(&state.psi, &mut out, &cfg.grid, cfg.m, &cfg.potential);
    Ok(out)
}

/// One velocity-Verlet step followed by sponge damping of `pi`.
pub fn step<T: Real>(state: &FieldState<T>, cfg: &SimConfig<T>) -> Result<FieldState<T>> {
    let mut stepper = Stepper::new(cfg, state)?;
    let mut next = state.clone();
    stepper.advance(&mut next)?;
    next.t = state.t + cfg.dt;
    Ok(next)
}

/// Velocity-Verlet integrator that carries the acceleration of the current
/// `psi` between steps, so each step costs one force evaluation.
pub struct Stepper<'a, T> {
    cfg: &'a SimConfig<T>,
    damping: Option<Vec<T>>,
    accel: Vec<Complex<T>>,
}

impl<'a, T: Real> Stepper<'a, T> {
    pub fn new(cfg: &'a SimConfig<T>, state: &FieldState<T>) -> Result<Self> {
        state.check_grid(&cfg.grid)?;
        let damping = match cfg.sponge {
            Sponge::Layer { width, strength } if width > T::zero() && strength > T::zero() => Some(
                sponge_profile(&cfg.grid, width, strength)
                    .into_iter()
                    .map(|s| (-s * cfg.dt).exp())
                    .collect(),
            ),
            _ => None,
        };
        let mut accel = vec![Complex::new(T::zero(), T::zero()); state.len()];
        accelerate(&state.psi, &mut accel, &cfg.grid, cfg.m, &cfg.potential);
        Ok(Self {
            cfg,
            damping,
            accel,
        })
    }

    /// Advances `state` in place by `dt`; `state.t` is left to the caller.
    ///
    /// Must be called with the state the stepper was created with or last
    /// advanced.
    pub fn advance(&mut self, state: &mut FieldState<T>) -> Result<()> {
        let dt = self.cfg.dt;
        let half_dt = dt / T::lit(2.0);
        let mut max_abs = T::zero();
        for ((psi, pi), a) in state
            .psi
            .iter_mut()
            .zip(state.pi.iter_mut())
            .zip(&self.accel)
        {
            *pi += a * half_dt;
            *psi += *pi * dt;
            max_abs = max_abs.max(psi.norm_sqr());
        }
        let max_abs = max_abs.sqrt();
        if !(max_abs <= self.cfg.blowup_guard) {
            return Err(Error::BlowUp {
                t: (state.t + dt).as_f64(),
                max_abs: max_abs.as_f64(),
            });
        }
        accelerate(
            &state.psi,
            &mut self.accel,
            &self.cfg.grid,
            self.cfg.m,
            &self.cfg.potential,
        );
        for (pi, a) in state.pi.iter_mut().zip(&self.accel) {
            *pi += a * half_dt;
        }
        if let Some(damping) = &self.damping {
            for (pi, d) in state.pi.iter_mut().zip(damping) {
                *pi *= *d;
            }
        }
        Ok(())
    }
}
