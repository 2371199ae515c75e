//! The oscillator potential `U(psi) = sum_n u_n |psi|^(2n)` and its force.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::roots;
use crate::scalar::Real;

/// Polynomial potential in `s = |psi|^2`, stored as `u_0, u_1, ..., u_N`.
///
/// Construction pads a missing `u_1` with zero and trims vanishing top
/// coefficients, so `degree() >= 1` always holds and `u_N != 0` unless the
/// potential is the constant `u_0` (then `N = 1` with `u_1 = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec<T> {
    coeffs: Vec<T>,
}

/// Constants of a verified lower bound `U(s) >= a - b s` for all `s >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound<T> {
    pub a: T,
    pub b: T,
}

impl<T: Real> PotentialSpec<T> {
    pub fn new(coeffs: impl Into<Vec<T>>) -> Result<Self> {
        let mut coeffs = coeffs.into();
        if coeffs.is_empty() {
            return Err(Error::InvalidPotential(
                "at least one coefficient is required".into(),
            ));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidPotential(format!(
                "coefficient u_{i} is not finite"
            )));
        }
        let len = roots::trim(&coeffs).len().max(2);
        coeffs.resize(len, T::zero());
        Ok(Self { coeffs })
    }

    /// Linear force `F(psi) = a psi`, i.e. `u_1 = -a/2`.
    pub fn linear(a: T) -> Self {
        Self {
            coeffs: vec![T::zero(), -a / T::lit(2.0)],
        }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Degree `N` in `|psi|^2`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_linear(&self) -> bool {
        self.degree() == 1
    }

    /// Checks the invariant under which solutions settle onto the solitary manifold: `N >= 2` and `u_N > 0`.
    pub fn check_attraction_mode(&self) -> Result<()> {
        if self.degree() < 2 {
            return Err(Error::InvalidPotential(format!(
                "attraction mode needs degree N >= 2, found N = {}",
                self.degree()
            )));
        }
        let top = self.coeffs[self.degree()];
        if top <= T::zero() {
            return Err(Error::InvalidPotential(format!(
                "attraction mode needs u_N > 0, found u_{} = {}",
                self.degree(),
                top
            )));
        }
        Ok(())
    }

    /// `U` at `|psi|^2 = s`.
    pub fn eval(&self, s: T) -> T {
        roots::horner(&self.coeffs, s)
    }

    /// `u'(s) = sum_{n>=1} n u_n s^(n-1)`.
    pub fn eval_derivative(&self, s: T) -> T {
        let mut acc = T::zero();
        for (n, &u) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * s + u * T::from_count(n);
        }
        acc
    }

    /// `F(psi) = -grad U = -2 u'(|psi|^2) psi`.
    pub fn force(&self, psi: Complex<T>) -> Complex<T> {
        psi * (-T::lit(2.0) * self.eval_derivative(psi.norm_sqr()))
    }

    /// Decides whether `U(s) >= A - B s` holds for some `B < m`, and returns
    /// explicit constants when it does.
    ///
    /// For `N = 1`: `B = max(-u_1, 0)`, `A = u_0`, admissible iff `u_1 > -m`.
    /// For `N >= 2` with `u_N > 0`: `B = 0` and `A = min_{s>=0} U(s)`, taken
    /// over `s = 0` and the nonnegative critical points of `U`.
    pub fn validate_wellposedness(&self, m: T) -> Result<LowerBound<T>> {
        if !(m > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "mass must be positive, got {m}"
            )));
        }
        let n = self.degree();
        if n == 1 {
            let u1 = self.coeffs[1];
            if u1 > -m {
                return Ok(LowerBound {
                    a: self.coeffs[0],
                    b: (-u1).max(T::zero()),
                });
            }
            return Err(Error::IllPosed(format!(
                "linear potential needs B = -u_1 < m, found B = {} >= m = {}",
                -u1, m
            )));
        }
        let top = self.coeffs[n];
        if top <= T::zero() {
            return Err(Error::IllPosed(format!(
                "U is unbounded below: leading coefficient u_{n} = {top} <= 0, no B < m exists"
            )));
        }
        let du = roots::derivative(&self.coeffs);
        let hi = roots::cauchy_bound(&du).unwrap_or(T::one());
        let a = roots::real_roots_in(&du, T::zero(), hi)
            .into_iter()
            .map(|s| self.eval(s))
            .fold(self.eval(T::zero()), T::min);
        Ok(LowerBound { a, b: T::zero() })
    }
}
