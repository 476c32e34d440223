//! Scalar abstraction for the numeric core.
//!
//! Every quantity in this crate is dimensionless (pump powers normalized to
//! threshold, frequencies normalized to the source-cavity linewidth), so the
//! math is written once, generic over the floating-point type. `f64` is the
//! working precision for everything the test suite certifies; `f32` is
//! available for cheap sweeps where 1e-6-level accuracy suffices.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, NumCast};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Convert an `f64` constant into this scalar type.
    fn of(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("f64 constant not representable in scalar type")
    }

    /// Widen to `f64`, e.g. for error reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar not representable as f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
