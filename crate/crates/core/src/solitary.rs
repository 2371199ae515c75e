//! Solitary waves `phi_omega(x) e^{-i omega t}` with `phi_omega = c e^{i theta} e^{-kappa |x|}`.
//!
//! A profile exists when the dispersion relation `omega^2 + kappa^2 = m^2`
//! and the coupling identity `2 kappa c = F(c)` hold together. With
//! `F(c) = -2 u'(c^2) c`, nonzero amplitudes are the positive roots `y = c^2`
//! of the coupling polynomial `kappa + sum_{n>=1} n u_n y^(n-1)`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{FieldState, Grid};
use crate::potential::PotentialSpec;
use crate::roots;
use crate::scalar::Real;

/// A point of the solitary manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitaryWave<T> {
    pub omega: T,
    pub kappa: T,
    pub amplitude: T,
    pub phase: T,
}

impl<T: Real> SolitaryWave<T> {
    /// Wave with decay rate fixed by the dispersion relation. The coupling
    /// identity is not checked here; see [`SolitaryWave::coupling_residual`].
    pub fn new(omega: T, amplitude: T, phase: T, m: T) -> Result<Self> {
        if amplitude < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "amplitude must be >= 0, got {amplitude}"
            )));
        }
        let kappa = kappa_of_omega(omega, m)?;
        Ok(Self {
            omega,
            kappa,
            amplitude,
            phase: wrap_phase(phase),
        })
    }

    /// `2 kappa c - F(c)` evaluated at the real amplitude.
    pub fn coupling_residual(&self, p: &PotentialSpec<T>) -> T {
        let c = self.amplitude;
        T::lit(2.0) * self.kappa * c - p.force(Complex::new(c, T::zero())).re
    }

    /// Samples `Phi_omega = (phi, -i omega phi)` onto the grid at `t = 0`.
    pub fn sample(&self, grid: &Grid<T>) -> FieldState<T> {
        let front = Complex::from_polar(self.amplitude, self.phase);
        let rot = Complex::new(T::zero(), -self.omega);
        let psi: Vec<_> = grid
            .coords()
            .map(|x| front * (-self.kappa * x.abs()).exp())
            .collect();
        let pi = psi.iter().map(|z| rot * z).collect();
        let mut s = FieldState {
            psi,
            pi,
            t: T::zero(),
        };
        s.pin_boundary();
        s
    }

    /// Exact continuum solution `Phi_omega e^{-i omega t}` sampled at time `t`.
    pub fn sample_at(&self, grid: &Grid<T>, t: T) -> FieldState<T> {
        let mut s = self
            .sample(grid)
            .scaled(Complex::from_polar(T::one(), -self.omega * t));
        s.t = t;
        s
    }

    /// Continuum energy `c^2 m^2 / kappa + U(c^2)`; infinite at `kappa = 0`
    /// unless the amplitude vanishes.
    pub fn energy(&self, p: &PotentialSpec<T>, m: T) -> T {
        let c2 = self.amplitude * self.amplitude;
        if c2 == T::zero() {
            return p.eval(T::zero());
        }
        c2 * m * m / self.kappa + p.eval(c2)
    }
}

fn wrap_phase<T: Real>(theta: T) -> T {
    let tau = T::TAU();
    let w = theta % tau;
    if w < T::zero() {
        w + tau
    } else {
        w
    }
}

/// `kappa = sqrt(m^2 - omega^2)`; rejects `|omega| > m`.
pub fn kappa_of_omega<T: Real>(omega: T, m: T) -> Result<T> {
    if !(m > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "mass must be positive, got {m}"
        )));
    }
    if !(omega.abs() <= m) {
        return Err(Error::FrequencyOutOfRange {
            omega: omega.as_f64(),
            m: m.as_f64(),
            bound: "<=",
        });
    }
    Ok((m * m - omega * omega).max(T::zero()).sqrt())
}

/// Coefficients of the coupling polynomial in `y = c^2`.
pub fn coupling_polynomial<T: Real>(p: &PotentialSpec<T>, kappa: T) -> Vec<T> {
    let mut q: Vec<T> = roots::derivative(p.coeffs());
    q[0] += kappa;
    q
}

/// All strictly positive amplitudes `c` of nonzero solitary waves at `omega`,
/// ascending.
///
/// In the linear case at `kappa = -u_1` the coupling identity holds for every
/// amplitude; that continuum is not a finite root set and is reported by
/// [`free_amplitude_kappa`] instead, so this function returns no roots there.
pub fn amplitudes_for_omega<T: Real>(omega: T, p: &PotentialSpec<T>, m: T) -> Result<Vec<T>> {
    let kappa = kappa_of_omega(omega, m)?;
    if omega.abs() >= m {
        return Err(Error::FrequencyOutOfRange {
            omega: omega.as_f64(),
            m: m.as_f64(),
            bound: "<",
        });
    }
    Ok(amplitudes_for_kappa(p, kappa))
}

pub(crate) fn amplitudes_for_kappa<T: Real>(p: &PotentialSpec<T>, kappa: T) -> Vec<T> {
    let q = coupling_polynomial(p, kappa);
    let Some(hi) = roots::cauchy_bound(&q) else {
        return Vec::new();
    };
    roots::real_roots_in(&q, T::zero(), hi)
        .into_iter()
        .filter(|&y| y > T::zero())
        .map(T::sqrt)
        .collect()
}

/// Decay rate at which a linear force makes every amplitude admissible
/// (`F(psi) = a psi` with `a > 0` gives `kappa = a / 2`), if that frequency
/// lies in `(-m, m)`.
pub fn free_amplitude_kappa<T: Real>(p: &PotentialSpec<T>, m: T) -> Option<T> {
    if !p.is_linear() {
        return None;
    }
    let kappa = -p.coeffs()[1];
    (kappa > T::zero() && kappa < m).then_some(kappa)
}

/// One exact eigenmode of the linear problem `F(psi) = a psi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearMode<T> {
    /// Frequency; imaginary when `a > 2m` (exponentially growing/decaying pair).
    pub omega: Complex<T>,
    /// Spatial decay rate `a / 2`.
    pub decay: T,
    /// `t e^{-m|x|}` companion of the degenerate case `a = 2m`.
    pub secular: bool,
}

impl<T: Real> LinearMode<T> {
    /// Samples `e^{-decay |x|} e^{-i omega t}` at `t = 0` for a real
    /// frequency; the secular mode samples `t e^{-m|x|}` (zero `psi`,
    /// `pi = e^{-m|x|}`).
    pub fn sample(&self, grid: &Grid<T>) -> Result<FieldState<T>> {
        if self.omega.im != T::zero() {
            return Err(Error::InvalidParameter("mode frequency is not real".into()));
        }
        let profile = |x: T| Complex::new((-self.decay * x.abs()).exp(), T::zero());
        let zero = Complex::new(T::zero(), T::zero());
        let (psi, pi) = if self.secular {
            (
                grid.coords().map(|_| zero).collect(),
                grid.coords().map(profile).collect(),
            )
        } else {
            let rot = Complex::new(T::zero(), -self.omega.re);
            let psi: Vec<_> = grid.coords().map(profile).collect();
            let pi = psi.iter().map(|z| rot * z).collect();
            (psi, pi)
        };
        FieldState::from_samples(psi, pi, T::zero())
    }
}

/// Localized modes of the linear defect `F(psi) = a psi`, `a > 0`.
///
/// For `a != 2m` returns the pair `omega = +-sqrt(m^2 - a^2/4)`; for `a = 2m`
/// the degenerate pair `e^{-m|x|}`, `t e^{-m|x|}` with the second flagged secular.
pub fn linear_modes<T: Real>(a: T, m: T) -> Result<Vec<LinearMode<T>>> {
    if !(m > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "mass must be positive, got {m}"
        )));
    }
    if !(a > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "a = {a} <= 0 has no localized modes; the manifold reduces to zero"
        )));
    }
    let decay = a / T::lit(2.0);
    let disc = m * m - decay * decay;
    let zero = T::zero();
    if disc == zero {
        let omega = Complex::new(zero, zero);
        return Ok(vec![
            LinearMode {
                omega,
                decay,
                secular: false,
            },
            LinearMode {
                omega,
                decay,
                secular: true,
            },
        ]);
    }
    let root = if disc > zero {
        Complex::new(disc.sqrt(), zero)
    } else {
        Complex::new(zero, (-disc).sqrt())
    };
    Ok(vec![
        LinearMode {
            omega: root,
            decay,
            secular: false,
        },
        LinearMode {
            omega: -root,
            decay,
            secular: false,
        },
    ])
}

/// Continuous amplitude branch sampled along increasing `omega`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ManifoldBranch<T> {
    pub samples: Vec<(T, T)>,
}

impl<T: Real> ManifoldBranch<T> {
    pub fn is_trivial(&self) -> bool {
        self.samples.iter().all(|&(_, c)| c == T::zero())
    }
}

/// Groups `(omega, c)` pairs into branches by nearest-amplitude continuation.
///
/// `omega_samples` are sorted first. The trivial branch `c = 0` (present at
/// every sample) comes first. A branch ends wherever the root count changes
/// between consecutive samples (fold or birth of a branch) or a root
/// disappears; the surviving roots restart as new branches.
pub fn manifold_table<T: Real>(
    p: &PotentialSpec<T>,
    m: T,
    omega_samples: &[T],
) -> Result<Vec<ManifoldBranch<T>>> {
    let mut omegas = omega_samples.to_vec();
    omegas.sort_by(|a, b| a.partial_cmp(b).expect("finite frequencies"));
    omegas.dedup();
    let per_omega: Vec<Vec<T>> = omegas
        .par_iter()
        .map(|&w| amplitudes_for_omega(w, p, m))
        .collect::<Result<_>>()?;

    let mut done = vec![ManifoldBranch {
        samples: omegas.iter().map(|&w| (w, T::zero())).collect(),
    }];
    let mut active: Vec<ManifoldBranch<T>> = Vec::new();
    for (&w, amps) in omegas.iter().zip(&per_omega) {
        if amps.len() == active.len() {
            // Roots are sorted, so continuation pairs them in order.
            for (branch, &c) in active.iter_mut().zip(amps) {
                branch.samples.push((w, c));
            }
            continue;
        }
        // Root count changed: pair greedily by amplitude distance. Branches left
        // without a partner end here and unpaired roots start new branches.
        let last = |b: &ManifoldBranch<T>| b.samples.last().map_or(T::zero(), |s| s.1);
        let mut pairs: Vec<(T, usize, usize)> = Vec::new();
        for (i, b) in active.iter().enumerate() {
            for (k, &c) in amps.iter().enumerate() {
                pairs.push(((last(b) - c).abs(), i, k));
            }
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite amplitudes"));
        let mut branch_of_root: Vec<Option<usize>> = vec![None; amps.len()];
        let mut taken = vec![false; active.len()];
        for (_, i, k) in pairs {
            if !taken[i] && branch_of_root[k].is_none() {
                taken[i] = true;
                branch_of_root[k] = Some(i);
            }
        }
        let mut old: Vec<Option<ManifoldBranch<T>>> = active.drain(..).map(Some).collect();
        for (i, slot) in old.iter_mut().enumerate() {
            if !taken[i] {
                done.extend(slot.take());
            }
        }
        for (k, &c) in amps.iter().enumerate() {
            let mut branch = match branch_of_root[k] {
                Some(i) => old[i].take().expect("each branch is paired once"),
                None => ManifoldBranch {
                    samples: Vec::new(),
                },
            };
            branch.samples.push((w, c));
            active.push(branch);
        }
    }
    done.append(&mut active);
    Ok(done)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quartic() -> PotentialSpec<f64> {
        PotentialSpec::new(vec![0.0, -0.5, 0.25]).unwrap()
    }

    // Bisection oracle on the coupling polynomial over a dense scan.
    fn scan_oracle(p: &PotentialSpec<f64>, kappa: f64, y_max: f64) -> Vec<f64> {
        let q = coupling_polynomial(p, kappa);
        let f = |y: f64| roots::horner(&q, y);
        let n = (y_max / 1e-3).ceil() as usize;
        let mut out = Vec::new();
        for i in 0..n {
            let (a, b) = (i as f64 * 1e-3, (i + 1) as f64 * 1e-3);
            if f(a).signum() != f(b).signum() && a > 0.0 {
                out.push(roots::bisect(f, a, b).sqrt());
            }
        }
        out
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa_of_omega(0.0, 1.0).unwrap(), 1.0);
        assert_eq!(kappa_of_omega(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(kappa_of_omega(-1.0, 1.0).unwrap(), 0.0);
        assert!((kappa_of_omega(0.8f64, 1.0).unwrap() - 0.6).abs() < 1e-15);
        assert!(kappa_of_omega(1.01, 1.0).is_err());
    }

    #[test]
    fn amplitude_examples() {
        let omega = (1.0f64 - 0.0625).sqrt();
        let c = amplitudes_for_omega(omega, &quartic(), 1.0).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c[0] - 0.5f64.sqrt()).abs() < 1e-10);
        assert!((c[0] - scan_oracle(&quartic(), 0.25, 5.0)[0]).abs() < 1e-10);

        let omega = (1.0f64 - 0.5625).sqrt();
        assert!(amplitudes_for_omega(omega, &quartic(), 1.0)
            .unwrap()
            .is_empty());

        let repulsive = PotentialSpec::new(vec![0.0, 0.5, 0.25]).unwrap();
        for w in [0.0, 0.5, 0.99] {
            assert!(amplitudes_for_omega(w, &repulsive, 1.0).unwrap().is_empty());
        }
        assert!(scan_oracle(&repulsive, 0.1, 10.0).is_empty());

        assert!(amplitudes_for_omega(1.0, &quartic(), 1.0).is_err());
    }

    #[test]
    fn amplitudes_are_even_in_omega() {
        for w in [0.1, 0.87, 0.95, 0.999] {
            assert_eq!(
                amplitudes_for_omega(w, &quartic(), 1.0).unwrap(),
                amplitudes_for_omega(-w, &quartic(), 1.0).unwrap()
            );
        }
    }

    #[test]
    fn linear_case_free_amplitude() {
        let p = PotentialSpec::linear(1.2f64);
        assert!((free_amplitude_kappa(&p, 1.0).unwrap() - 0.6).abs() < 1e-15);
        assert!(amplitudes_for_omega(0.8, &p, 1.0).unwrap().is_empty());
        assert_eq!(
            free_amplitude_kappa(&PotentialSpec::linear(-1.0), 1.0),
            None
        );
        assert_eq!(free_amplitude_kappa(&quartic(), 1.0), None);
    }

    #[test]
    fn profile_examples() {
        let g = Grid::new(10.0, 201).unwrap();
        let zero = SolitaryWave::new(0.5, 0.0, 0.0, 1.0).unwrap().sample(&g);
        assert_eq!(zero, FieldState::zeros(&g));

        let still = SolitaryWave::new(0.0, 1.0, 0.0, 1.0).unwrap().sample(&g);
        assert!(still.pi.iter().all(|z| z.norm() == 0.0));
        for j in 1..200 {
            assert!(still.psi[j].im == 0.0 && still.psi[j].re > 0.0);
            assert_eq!(still.psi[j], still.psi[200 - j]);
        }

        let w = SolitaryWave::new((1.0f64 - 0.0625).sqrt(), 0.5f64.sqrt(), 0.0, 1.0).unwrap();
        let s = w.sample(&g);
        let j = 140; // x = 4
        assert!((g.x(j) - 4.0).abs() < 1e-12);
        assert!((s.psi[j].re - 0.260130).abs() < 1e-6);
        assert!(w.coupling_residual(&quartic()).abs() < 1e-12);
    }

    #[test]
    fn phase_is_wrapped() {
        let w = SolitaryWave::new(0.0, 1.0, -0.5, 1.0).unwrap();
        assert!((w.phase - (std::f64::consts::TAU - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn linear_mode_examples() {
        let modes = linear_modes(1.2f64, 1.0).unwrap();
        assert!((modes[0].omega.re - 0.8).abs() < 1e-15);
        assert!((modes[1].omega.re + 0.8).abs() < 1e-15);
        assert!(modes.iter().all(|m| m.decay == 0.6 && !m.secular));

        let degenerate = linear_modes(2.0, 1.0).unwrap();
        assert_eq!(degenerate[0].omega.norm(), 0.0);
        assert!(degenerate[1].secular);

        let near = linear_modes(2.0 - 1e-10, 1.0).unwrap();
        assert!(near[0].omega.norm() < 1e-4);

        let growing = linear_modes(3.0, 1.0).unwrap();
        assert_eq!(growing[0].omega.re, 0.0);
        assert!(growing[0].omega.im > 0.0);

        assert!(linear_modes(0.0, 1.0).is_err());
        assert!(linear_modes(-1.0, 1.0).is_err());
    }

    #[test]
    fn quartic_table_has_mirrored_nonzero_branches() {
        let omegas: Vec<f64> = (0..400).map(|i| -1.0 + (i as f64 + 0.5) / 200.0).collect();
        let table = manifold_table(&quartic(), 1.0, &omegas).unwrap();
        assert!(table[0].is_trivial());
        assert_eq!(table[0].samples.len(), 400);
        let nonzero: Vec<_> = table.iter().filter(|b| !b.is_trivial()).collect();
        assert_eq!(nonzero.len(), 2);
        let threshold = 0.75f64.sqrt();
        let expected = omegas.iter().filter(|w| w.abs() > threshold).count();
        assert_eq!(
            nonzero.iter().map(|b| b.samples.len()).sum::<usize>(),
            expected
        );
        for b in nonzero {
            assert!(b.samples.windows(2).all(|w| w[1].0 > w[0].0));
            for &(w, c) in &b.samples {
                let kappa = (1.0 - w * w).sqrt();
                assert!((c * c - (1.0 - 2.0 * kappa)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn linear_and_zero_tables_have_only_trivial_branch() {
        let omegas: Vec<f64> = (0..100).map(|i| -0.99 + i as f64 * 0.02).collect();
        let lin = manifold_table(&PotentialSpec::linear(1.2), 1.0, &omegas).unwrap();
        assert_eq!(lin.len(), 1);
        let zero =
            manifold_table(&PotentialSpec::new(vec![0.0, 0.0]).unwrap(), 1.0, &omegas).unwrap();
        assert_eq!(zero.len(), 1);
        assert!(zero[0].is_trivial());
    }

    #[test]
    fn fold_splits_branches() {
        // q(y) = kappa - 1 + y - 0.75 y^2. For 2/3 < kappa < 1 there are two
        // positive roots, which merge at the fold kappa = 2/3. At kappa = 1
        // (omega = 0) the small root reaches zero and only the large one
        // survives, continuing across. Branches: trivial, the large root over
        // the whole band, and a small-root branch on each side of omega = 0.
        let p = PotentialSpec::new(vec![0.0, -1.0, 0.5, -0.25]).unwrap();
        let omegas: Vec<f64> = (0..199).map(|i| -0.99 + i as f64 * 0.01).collect();
        let table = manifold_table(&p, 1.0, &omegas).unwrap();
        for b in table.iter().skip(1) {
            for &(w, c) in &b.samples {
                let k = (1.0 - w * w).sqrt();
                let q = coupling_polynomial(&p, k);
                assert!(roots::horner(&q, c * c).abs() < 1e-10);
            }
        }
        assert_eq!(table.len(), 4);
        let longest = table.iter().skip(1).map(|b| b.samples.len()).max().unwrap();
        assert!(table
            .iter()
            .skip(1)
            .any(|b| b.samples.iter().any(|s| s.0.abs() < 1e-9)));
        assert!(longest > 140, "{longest}");
    }
}
