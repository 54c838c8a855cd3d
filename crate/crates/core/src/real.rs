//! Scalar abstraction: everything numeric in this crate is generic over a
//! real floating-point type.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar type for states, weights and tolerances (`f32` or `f64`).
///
/// Complex amplitudes are `Complex<T>` with `T: Real`. The bundled reference
/// tolerances (1e-10 .. 1e-12) are meaningful only at `f64` resolution; `f32`
/// instantiations work but need looser thresholds.
pub trait Real:
    Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` constant.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant not representable")
    }

    /// Widening conversion used for error messages and serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over the crate's scalar.
pub type C<T> = Complex<T>;

pub fn c_zero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

pub fn c_one<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

pub fn c_i<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::one())
}

pub fn c_re<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}
