//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating point type the solver is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + rustfft::FftNum
    + 'static
{
    /// Converts an `f64` literal. Every literal used by the crate is
    /// representable (possibly rounded) in both supported types.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable")
    }

    /// Converts a count or index.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite conversion")
    }

    /// Absolute tolerance used by bisection refinements: `1e-12` when the
    /// type can resolve it, otherwise a few ulps.
    #[inline]
    fn root_tolerance() -> Self {
        Self::lit(1e-12).max(Self::epsilon() * Self::lit(8.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}
