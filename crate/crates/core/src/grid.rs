//! Uniform symmetric grid on `[-L, L]` and the sampled state `(psi, pi)`.

use std::ops::{Add, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform grid with an odd number of nodes, so the defect at `x = 0` sits
/// exactly on the middle node.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    half_length: T,
    num_points: usize,
    dx: T,
}

impl<T: Real> Grid<T> {
    pub fn new(half_length: T, num_points: usize) -> Result<Self> {
        if !(half_length > T::zero()) || !half_length.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "half length must be positive, got {half_length}"
            )));
        }
        if num_points < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 points, got {num_points}"
            )));
        }
        if num_points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "num_points must be odd so that x = 0 is a node, got {num_points}"
            )));
        }
        let dx = T::lit(2.0) * half_length / T::from_count(num_points - 1);
        Ok(Self {
            half_length,
            num_points,
            dx,
        })
    }

    pub fn half_length(&self) -> T {
        self.half_length
    }

    pub fn len(&self) -> usize {
        self.num_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    pub fn origin(&self) -> usize {
        (self.num_points - 1) / 2
    }

    /// Node coordinate; exactly zero at the origin.
    pub fn x(&self, j: usize) -> T {
        let o = self.origin();
        if j >= o {
            T::from_count(j - o) * self.dx
        } else {
            -T::from_count(o - j) * self.dx
        }
    }

    pub fn coords(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.num_points).map(|j| self.x(j))
    }

    /// Index range of the nodes with `|x| <= radius`.
    pub fn window(&self, radius: T) -> std::ops::RangeInclusive<usize> {
        let o = self.origin();
        // Small slack so that a radius landing on a node includes it.
        let k = ((radius / self.dx) * (T::one() + T::epsilon() * T::lit(4.0)))
            .floor()
            .to_usize()
            .unwrap_or(usize::MAX)
            .min(o);
        (o - k)..=(o + k)
    }
}

/// Sampled state `Psi = (psi, pi)` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState<T> {
    pub psi: Vec<Complex<T>>,
    pub pi: Vec<Complex<T>>,
    pub t: T,
}

impl<T: Real> FieldState<T> {
    pub fn zeros(grid: &Grid<T>) -> Self {
        let z = vec![Complex::new(T::zero(), T::zero()); grid.len()];
        Self {
            psi: z.clone(),
            pi: z,
            t: T::zero(),
        }
    }

    /// Builds a state from samples, pinning the Dirichlet endpoints.
    pub fn from_samples(psi: Vec<Complex<T>>, pi: Vec<Complex<T>>, t: T) -> Result<Self> {
        if psi.len() != pi.len() {
            return Err(Error::ShapeMismatch {
                expected: psi.len(),
                found: pi.len(),
            });
        }
        let mut s = Self { psi, pi, t };
        s.pin_boundary();
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    pub fn check_grid(&self, grid: &Grid<T>) -> Result<()> {
        if self.psi.len() != grid.len() || self.pi.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                found: self.psi.len().min(self.pi.len()),
            });
        }
        Ok(())
    }

    /// Forces `psi` and `pi` to vanish at both ends of the domain.
    pub fn pin_boundary(&mut self) {
        let zero = Complex::new(T::zero(), T::zero());
        for v in [&mut self.psi, &mut self.pi] {
            if let Some(first) = v.first_mut() {
                *first = zero;
            }
            if let Some(last) = v.last_mut() {
                *last = zero;
            }
        }
    }

    /// Multiplies both components by `e^{i theta}`.
    pub fn rotated(&self, theta: T) -> Self {
        self.scaled(Complex::from_polar(T::one(), theta))
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        Self {
            psi: self.psi.iter().map(|z| z * factor).collect(),
            pi: self.pi.iter().map(|z| z * factor).collect(),
            t: self.t,
        }
    }

    /// Complex conjugate of both components.
    pub fn conj(&self) -> Self {
        Self {
            psi: self.psi.iter().map(|z| z.conj()).collect(),
            pi: self.pi.iter().map(|z| z.conj()).collect(),
            t: self.t,
        }
    }

    pub fn max_abs_psi(&self) -> T {
        self.psi.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    /// `psi` at the defect node.
    pub fn psi_at_origin(&self) -> Complex<T> {
        self.psi[(self.psi.len() - 1) / 2]
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        assert_eq!(self.len(), other.len(), "state length mismatch");
        Self {
            psi: self
                .psi
                .iter()
                .zip(&other.psi)
                .map(|(a, b)| f(*a, *b))
                .collect(),
            pi: self
                .pi
                .iter()
                .zip(&other.pi)
                .map(|(a, b)| f(*a, *b))
                .collect(),
            t: self.t,
        }
    }
}

impl<T: Real> Add for &FieldState<T> {
    type Output = FieldState<T>;

    fn add(self, rhs: Self) -> FieldState<T> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<T: Real> Sub for &FieldState<T> {
    type Output = FieldState<T>;

    fn sub(self, rhs: Self) -> FieldState<T> {
        self.zip_with(rhs, |a, b| a - b)
    }
}
