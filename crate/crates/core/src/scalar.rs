//! Scalar abstraction for the working floating-point type.
//!
//! Every numeric routine in this crate is generic over [`Real`], which is
//! implemented for `f32` and `f64`. The crate root exports `f64`-concrete
//! aliases; `f32` support exists for memory-constrained experimentation.
//! Default tolerances are calibrated for `f64`.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps, Signed};
use rand::distr::uniform::SampleUniform;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::FftNum;

/// Floating-point scalar usable throughout the crate.
///
/// Combines the arithmetic, constant, conversion, transform, and sampling
/// capabilities the estimation pipeline relies on. Implemented for `f32`
/// and `f64` only; the FFT backend dispatches on those two types.
pub trait Real:
    Float
    + FloatConst
    + NumAssignOps
    + FromPrimitive
    + Signed
    + Sum<Self>
    + SampleUniform
    + FftNum
    + Display
    + LowerExp
    + Debug
    + Send
    + Sync
    + 'static
{
    /// Draws one standard normal variate.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Converts from `f64`, rounding to the nearest representable value.
    fn from_f64_lossy(v: f64) -> Self;

    /// Converts to `f64` (exact for `f32` and `f64`).
    fn to_f64_lossy(self) -> f64;
}

impl Real for f64 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }

    fn from_f64_lossy(v: f64) -> Self {
        v
    }

    fn to_f64_lossy(self) -> f64 {
        self
    }
}

impl Real for f32 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }

    fn from_f64_lossy(v: f64) -> Self {
        v as f32
    }

    fn to_f64_lossy(self) -> f64 {
        f64::from(self)
    }
}

/// Shorthand for converting an `f64` literal into the working scalar type.
#[inline]
pub fn fl<T: Real>(v: f64) -> T {
    T::from_f64_lossy(v)
}

/// Deterministically derives an independent seed from a base seed and a
/// stream index (splitmix64 finalizer). Used to give every Monte Carlo run,
/// retry attempt, and sub-stream its own reproducible generator without
/// threading generator state across parallel work items.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
