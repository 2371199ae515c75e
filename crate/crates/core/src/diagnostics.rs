//! Energy norm, local energy seminorms and the distance from a state to the
//! solitary manifold.
//!
//! All quadratures use uniform `dx` weights and forward differences for the
//! gradient term. A window `|x| <= R` keeps the nodes inside it and every
//! gradient cell touching one of those nodes, so the two straddling cells
//! count with full weight.

use std::ops::RangeInclusive;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{FieldState, Grid};
use crate::potential::PotentialSpec;
use crate::scalar::Real;
use crate::solitary::{amplitudes_for_kappa, free_amplitude_kappa, kappa_of_omega};

/// Number of frequency samples scanned in `(-m, m)`.
pub const OMEGA_SAMPLES: usize = 512;
/// Golden-section tolerance on the refined frequency.
pub const OMEGA_TOLERANCE: f64 = 1e-6;

/// Half-width `R` of the observation window `|x| <= R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeminormSpec<T> {
    radius: T,
}

impl<T: Real> SeminormSpec<T> {
    pub fn new(radius: T) -> Result<Self> {
        if !(radius > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "window radius must be positive, got {radius}"
            )));
        }
        Ok(Self { radius })
    }

    pub fn radius(&self) -> T {
        self.radius
    }
}

/// Node and gradient-cell index ranges of a window.
#[derive(Debug, Clone)]
struct Window {
    nodes: RangeInclusive<usize>,
    cells: RangeInclusive<usize>,
}

impl Window {
    fn new<T: Real>(grid: &Grid<T>, spec: Option<&SeminormSpec<T>>) -> Self {
        let n = grid.len();
        let nodes = match spec {
            Some(s) => grid.window(s.radius),
            None => 0..=n - 1,
        };
        let cells = nodes.start().saturating_sub(1)..=(*nodes.end()).min(n - 2);
        Self { nodes, cells }
    }

    /// First node touched by the window (node or cell endpoint).
    fn first(&self) -> usize {
        *self.cells.start()
    }

    /// Last node touched by the window.
    fn last(&self) -> usize {
        *self.cells.end() + 1
    }
}

/// Sesquilinear form `<a, b>_{E,R} = sum dx (conj(Da) Db + conj(a) b + conj(a_pi) b_pi)`
/// polarizing the (semi)norm; `spec = None` means the whole domain.
pub fn energy_inner<T: Real>(
    a: &FieldState<T>,
    b: &FieldState<T>,
    grid: &Grid<T>,
    spec: Option<&SeminormSpec<T>>,
) -> Complex<T> {
    let w = Window::new(grid, spec);
    let dx = grid.dx();
    let mut grad = Complex::new(T::zero(), T::zero());
    for j in w.cells.clone() {
        grad += (a.psi[j + 1] - a.psi[j]).conj() * (b.psi[j + 1] - b.psi[j]);
    }
    let mut bulk = Complex::new(T::zero(), T::zero());
    for j in w.nodes.clone() {
        bulk += a.psi[j].conj() * b.psi[j] + a.pi[j].conj() * b.pi[j];
    }
    grad / dx + bulk * dx
}

fn seminorm_sq<T: Real>(
    state: &FieldState<T>,
    grid: &Grid<T>,
    spec: Option<&SeminormSpec<T>>,
) -> T {
    let w = Window::new(grid, spec);
    let dx = grid.dx();
    let grad: T = w
        .cells
        .clone()
        .map(|j| (state.psi[j + 1] - state.psi[j]).norm_sqr())
        .sum();
    let bulk: T = w
        .nodes
        .clone()
        .map(|j| state.psi[j].norm_sqr() + state.pi[j].norm_sqr())
        .sum();
    grad / dx + bulk * dx
}

/// `||Psi||_E`.
pub fn full_norm<T: Real>(state: &FieldState<T>, grid: &Grid<T>) -> T {
    seminorm_sq(state, grid, None).sqrt()
}

/// `||Psi||_{E,R}`.
pub fn local_seminorm<T: Real>(state: &FieldState<T>, grid: &Grid<T>, spec: &SeminormSpec<T>) -> T {
    seminorm_sq(state, grid, Some(spec)).sqrt()
}

/// Phase minimizing `||Psi - e^{i theta} Phi||_{E,R}`: `arg <Phi, Psi>`, wrapped
/// to `[0, 2 pi)`, and `0` when the inner product vanishes.
pub fn optimal_phase<T: Real>(
    state: &FieldState<T>,
    profile: &FieldState<T>,
    grid: &Grid<T>,
    spec: &SeminormSpec<T>,
) -> T {
    phase_of(energy_inner(profile, state, grid, Some(spec)))
}

fn phase_of<T: Real>(z: Complex<T>) -> T {
    if z.norm_sqr() == T::zero() {
        return T::zero();
    }
    let a = z.arg();
    if a < T::zero() {
        a + T::TAU()
    } else {
        a
    }
}

/// Minimizer of the distance to the solitary manifold. The zero solution is
/// reported as `omega_star = theta_star = c_star = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldDistance<T> {
    pub dist: T,
    pub omega_star: T,
    pub theta_star: T,
    pub c_star: T,
}

/// Unit-amplitude profile `e^{-kappa |x|}` restricted to the window, with
/// its squared seminorm split as `grad + bulk (1 + omega^2)`.
#[derive(Debug, Clone)]
struct WindowProfile<T> {
    omega: T,
    values: Vec<T>,
    grad: T,
    bulk: T,
}

impl<T: Real> WindowProfile<T> {
    fn norm_sq(&self) -> T {
        self.grad + self.bulk * (T::one() + self.omega * self.omega)
    }
}

/// Precomputed candidate set for repeated distance queries on one grid,
/// potential and window.
#[derive(Debug, Clone)]
pub struct ManifoldCatalog<T> {
    grid: Grid<T>,
    potential: PotentialSpec<T>,
    m: T,
    spec: SeminormSpec<T>,
    window: Window,
    omegas: Vec<T>,
    amplitudes: Vec<Vec<T>>,
    profiles: Vec<WindowProfile<T>>,
    free_kappa: Option<T>,
}

impl<T: Real> ManifoldCatalog<T> {
    pub fn new(
        grid: &Grid<T>,
        potential: &PotentialSpec<T>,
        m: T,
        spec: &SeminormSpec<T>,
    ) -> Result<Self> {
        if !(m > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "mass must be positive, got {m}"
            )));
        }
        let window = Window::new(grid, Some(spec));
        let step = T::lit(2.0) * m / T::from_count(OMEGA_SAMPLES);
        let omegas: Vec<T> = (0..OMEGA_SAMPLES)
            .map(|i| -m + (T::from_count(i) + T::lit(0.5)) * step)
            .collect();
        let mut amplitudes = Vec::with_capacity(OMEGA_SAMPLES);
        let mut profiles = Vec::with_capacity(OMEGA_SAMPLES);
        for &w in &omegas {
            let kappa = kappa_of_omega(w, m)?;
            amplitudes.push(amplitudes_for_kappa(potential, kappa));
            profiles.push(Self::profile(grid, &window, w, kappa));
        }
        Ok(Self {
            grid: grid.clone(),
            potential: potential.clone(),
            m,
            spec: *spec,
            window,
            omegas,
            amplitudes,
            profiles,
            free_kappa: free_amplitude_kappa(potential, m),
        })
    }

    fn profile(grid: &Grid<T>, window: &Window, omega: T, kappa: T) -> WindowProfile<T> {
        let last = grid.len() - 1;
        let values: Vec<T> = (window.first()..=window.last())
            .map(|j| {
                if j == 0 || j == last {
                    T::zero()
                } else {
                    (-kappa * grid.x(j).abs()).exp()
                }
            })
            .collect();
        let off = window.first();
        let grad: T = window
            .cells
            .clone()
            .map(|j| {
                let d = values[j + 1 - off] - values[j - off];
                d * d
            })
            .sum::<T>()
            / grid.dx();
        let bulk: T = window
            .nodes
            .clone()
            .map(|j| values[j - off] * values[j - off])
            .sum::<T>()
            * grid.dx();
        WindowProfile {
            omega,
            values,
            grad,
            bulk,
        }
    }

    /// `<Phi_hat, Psi>_{E,R}` for the unit profile, using that `phi_hat` is real
    /// and `pi_hat = -i omega phi_hat`.
    fn inner(&self, prof: &WindowProfile<T>, state: &FieldState<T>) -> Complex<T> {
        let off = self.window.first();
        let v = &prof.values;
        let mut grad = Complex::new(T::zero(), T::zero());
        for j in self.window.cells.clone() {
            grad += (state.psi[j + 1] - state.psi[j]) * (v[j + 1 - off] - v[j - off]);
        }
        let mut psi_part = Complex::new(T::zero(), T::zero());
        let mut pi_part = Complex::new(T::zero(), T::zero());
        for j in self.window.nodes.clone() {
            psi_part += state.psi[j] * v[j - off];
            pi_part += state.pi[j] * v[j - off];
        }
        let dx = self.grid.dx();
        grad / dx + (psi_part + pi_part * Complex::new(T::zero(), prof.omega)) * dx
    }

    /// Squared distance to `c e^{i theta} Phi_hat` at the optimal phase.
    fn candidate_sq(
        &self,
        norm_sq: T,
        prof: &WindowProfile<T>,
        c: T,
        state: &FieldState<T>,
    ) -> (T, T) {
        let ip = self.inner(prof, state);
        let d2 = norm_sq + c * c * prof.norm_sq() - T::lit(2.0) * c * ip.norm();
        (d2, phase_of(ip))
    }

    /// Distance of `state` to the manifold, minimized over the zero solution,
    /// every sampled branch point (refined by golden section in `omega`), and
    /// the free-amplitude family of a linear force.
    pub fn distance(&self, state: &FieldState<T>) -> Result<ManifoldDistance<T>> {
        state.check_grid(&self.grid)?;
        let spec_norm_sq = seminorm_sq(state, &self.grid, Some(&self.spec));

        // (squared distance, omega, amplitude, sample index)
        let mut best: (T, T, T, Option<usize>) = (spec_norm_sq, T::zero(), T::zero(), None);
        for (i, (prof, amps)) in self.profiles.iter().zip(&self.amplitudes).enumerate() {
            if amps.is_empty() {
                continue;
            }
            let ip = self.inner(prof, state).norm();
            let nsq = prof.norm_sq();
            for &c in amps {
                let d2 = spec_norm_sq + c * c * nsq - T::lit(2.0) * c * ip;
                if d2 < best.0 {
                    best = (d2, self.omegas[i], c, Some(i));
                }
            }
        }
        if let Some(i) = best.3 {
            let (d2, w, c) = self.refine(state, spec_norm_sq, i, best.2);
            if d2 < best.0 {
                best = (d2, w, c, Some(i));
            }
        }

        if let Some(kappa) = self.free_kappa {
            let w0 = (self.m * self.m - kappa * kappa).sqrt();
            for w in [w0, -w0] {
                let prof = Self::profile(&self.grid, &self.window, w, kappa);
                let nsq = prof.norm_sq();
                let ip = self.inner(&prof, state).norm();
                let c = ip / nsq;
                let d2 = spec_norm_sq - ip * ip / nsq;
                if d2 < best.0 {
                    best = (d2, w, c, None);
                }
            }
        }

        let (_, omega, c, _) = best;
        if c == T::zero() {
            return Ok(ManifoldDistance {
                dist: spec_norm_sq.sqrt(),
                omega_star: T::zero(),
                theta_star: T::zero(),
                c_star: T::zero(),
            });
        }
        let kappa = kappa_of_omega(omega, self.m)?;
        let prof = Self::profile(&self.grid, &self.window, omega, kappa);
        let theta = phase_of(self.inner(&prof, state));
        Ok(ManifoldDistance {
            dist: self.exact_distance(state, &prof, Complex::from_polar(c, theta)),
            omega_star: omega,
            theta_star: theta,
            c_star: c,
        })
    }

    /// Golden-section search over `[omega_{i-1}, omega_{i+1}]` following the
    /// branch root nearest to `c0`.
    fn refine(&self, state: &FieldState<T>, norm_sq: T, i: usize, c0: T) -> (T, T, T) {
        let step = self
            .omegas
            .get(1)
            .map_or(T::zero(), |&w1| w1 - self.omegas[0]);
        let lo = (self.omegas[i] - step).max(-self.m);
        let hi = (self.omegas[i] + step).min(self.m);
        let eval = |w: T| -> (T, T) {
            if w.abs() >= self.m {
                return (T::infinity(), c0);
            }
            let Ok(kappa) = kappa_of_omega(w, self.m) else {
                return (T::infinity(), c0);
            };
            let amps = amplitudes_for_kappa(&self.potential, kappa);
            let Some(&c) = amps.iter().min_by(|a, b| {
                (**a - c0)
                    .abs()
                    .partial_cmp(&(**b - c0).abs())
                    .expect("finite")
            }) else {
                return (T::infinity(), c0);
            };
            let prof = Self::profile(&self.grid, &self.window, w, kappa);
            (self.candidate_sq(norm_sq, &prof, c, state).0, c)
        };

        let inv_phi = T::lit((5.0f64.sqrt() - 1.0) / 2.0);
        let (mut a, mut b) = (lo, hi);
        let mut x1 = b - (b - a) * inv_phi;
        let mut x2 = a + (b - a) * inv_phi;
        let (mut f1, mut f2) = (eval(x1), eval(x2));
        let tol = T::lit(OMEGA_TOLERANCE);
        while b - a > tol {
            if f1.0 <= f2.0 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - (b - a) * inv_phi;
                f1 = eval(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + (b - a) * inv_phi;
                f2 = eval(x2);
            }
        }
        let (f, w) = if f1.0 <= f2.0 { (f1, x1) } else { (f2, x2) };
        (f.0, w, f.1)
    }

    /// `||Psi - z Phi_hat||_{E,R}` evaluated directly (no cancellation).
    fn exact_distance(&self, state: &FieldState<T>, prof: &WindowProfile<T>, z: Complex<T>) -> T {
        let off = self.window.first();
        let v = &prof.values;
        let rot = Complex::new(T::zero(), -prof.omega) * z;
        let dpsi = |j: usize| state.psi[j] - z * v[j - off];
        let dpi = |j: usize| state.pi[j] - rot * v[j - off];
        let grad: T = self
            .window
            .cells
            .clone()
            .map(|j| (dpsi(j + 1) - dpsi(j)).norm_sqr())
            .sum();
        let bulk: T = self
            .window
            .nodes
            .clone()
            .map(|j| dpsi(j).norm_sqr() + dpi(j).norm_sqr())
            .sum();
        (grad / self.grid.dx() + bulk * self.grid.dx()).sqrt()
    }
}

/// One-shot distance from `state` to the solitary manifold; build a
/// [`ManifoldCatalog`] instead when querying many states.
pub fn dist_to_manifold<T: Real>(
    state: &FieldState<T>,
    grid: &Grid<T>,
    p: &PotentialSpec<T>,
    m: T,
    spec: &SeminormSpec<T>,
) -> Result<ManifoldDistance<T>> {
    ManifoldCatalog::new(grid, p, m, spec)?.distance(state)
}
