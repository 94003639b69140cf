//! Floating-point scalar abstraction shared by the simulation and Fourier code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar used for amplitudes, probabilities and Fourier coefficients.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` constant.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite constant")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `1 / sqrt(2^n)`.
    fn inv_sqrt_pow2(n: usize) -> Self {
        Self::of(2f64.powf(-(n as f64) / 2.0))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
