//! Scalar abstraction for the numeric core.
//!
//! Everything downstream (stimulus generation, linear analyses, networks,
//! distance metrics) is written against [`Scalar`] so the same code runs in
//! `f32` or `f64`. Experiments use `f64`; the concrete aliases at the crate
//! root are all double precision because measured distances are the output
//! of interest and should not drift.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar usable throughout the crate.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Conversion from `f64`; used for constants and RNG draws so the
    /// random stream is identical regardless of the scalar in use.
    fn cast(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("finite f64 converts to any Scalar")
    }

    /// Widening conversion for accuracy/probability bookkeeping.
    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("Scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
