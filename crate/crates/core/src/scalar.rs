use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::{de::DeserializeOwned, Serialize};

/// Floating-point type the whole crate is generic over: `f32` or `f64`.
///
/// The trait is sealed. Exponents of the design relations are carried as
/// exact rationals elsewhere; only evaluated magnitudes use this type.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + rustfft::FftNum
    + Default
    + Debug
    + Display
    + LowerExp
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
    + sealed::Sealed
{
    /// Lossy conversion from an `f64` literal or configuration value.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 is convertible to every Scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

mod sealed {
    pub trait Sealed {}
    impl Sealed for f32 {}
    impl Sealed for f64 {}
}

/// Relative difference `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff<S: Scalar>(a: S, b: S) -> S {
    let scale = a.abs().max(b.abs());
    if scale == S::zero() {
        S::zero()
    } else {
        (a - b).abs() / scale
    }
}
