//! Scalar abstraction for the numeric kernels.
//!
//! Similarity metrics, recommendation scores, and boost arithmetic are
//! written against [`Scalar`] so they work for `f32` and `f64` alike; the
//! pipeline (evaluation, generator, CLI) uses the `f64` aliases from the
//! crate root.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar usable in similarity and scoring kernels.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, for constants like the plus-link factor.
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 constant")
    }

    /// Lossy widening to `f64`, for reporting.
    fn to_f64_lossy(self) -> f64;
}

impl Scalar for f32 {
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn to_f64_lossy(self) -> f64 {
        self
    }
}
