use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, NumAssign};

/// Floating-point scalar used by the kernel and quadrature layers: `f32` or `f64`.
pub trait Real: Float + FloatConst + NumAssign + Debug + Display + LowerExp + Default + Send + Sync + 'static {
    /// Lossy conversion from an `f64` constant.
    fn cst(x: f64) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("f64 constant representable")
    }

    fn from_usize(x: usize) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("usize representable")
    }

    fn from_i64(x: i64) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("i64 representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
