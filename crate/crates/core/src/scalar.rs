//! Floating-point scalar abstraction shared by the analysis formulas.

use std::fmt::{Debug, Display};

/// Real scalar used by trajectory formulas, audits and fits: `f32` or `f64`.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an integer count.
    #[inline]
    fn from_count(v: u64) -> Self {
        Self::from_u64(v).expect("count representable as float")
    }

    /// Lossy conversion from an `f64` literal or parameter.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}
