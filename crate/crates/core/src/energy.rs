//! Discrete conserved energy of the semi-discrete system.

use crate::error::Result;
use crate::grid::{FieldState, Grid};
use crate::potential::PotentialSpec;
use crate::scalar::Real;

/// `1/2 sum_j dx (|pi_j|^2 + |(psi_{j+1} - psi_j)/dx|^2 + m^2 |psi_j|^2) + U(|psi_origin|^2)`.
///
/// This is exactly the Hamiltonian of the semi-discretization advanced by the
/// stepper.
pub fn energy<T: Real>(
    state: &FieldState<T>,
    p: &PotentialSpec<T>,
    m: T,
    grid: &Grid<T>,
) -> Result<T> {
    state.check_grid(grid)?;
    let dx = grid.dx();
    let m2 = m * m;
    let bulk: T = state
        .psi
        .iter()
        .zip(&state.pi)
        .map(|(psi, pi)| pi.norm_sqr() + m2 * psi.norm_sqr())
        .sum();
    let grad: T = state.psi.windows(2).map(|w| (w[1] - w[0]).norm_sqr()).sum();
    let half = T::lit(0.5);
    Ok(half * dx * bulk + half * grad / dx + p.eval(state.psi[grid.origin()].norm_sqr()))
}
