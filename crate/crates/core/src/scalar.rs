//! Scalar abstraction shared by the algebraic routines.

use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Real floating-point scalar (`f32` or `f64`) with the tolerance set the
/// state and eigenvalue checks run at.
///
/// The `f64` tolerances are the reference contract; `f32` uses looser values
/// scaled to its precision.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static {
    /// Elementwise tolerance for Hermiticity, unit trace and Bloch-norm checks.
    fn state_tol() -> Self;
    /// Negative eigenvalues / radicands above `-clip_tol` are round-off and clip to zero.
    fn clip_tol() -> Self;
    /// Negative eigenvalues / radicands below `-error_tol` are genuine violations.
    fn error_tol() -> Self;
    /// Jacobi stopping threshold on the off-diagonal Frobenius norm.
    fn jacobi_tol() -> Self;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn state_tol() -> Self {
        1e-12
    }
    fn clip_tol() -> Self {
        1e-10
    }
    fn error_tol() -> Self {
        1e-6
    }
    fn jacobi_tol() -> Self {
        1e-14
    }
}

impl Real for f32 {
    fn state_tol() -> Self {
        1e-5
    }
    fn clip_tol() -> Self {
        1e-5
    }
    fn error_tol() -> Self {
        1e-3
    }
    fn jacobi_tol() -> Self {
        1e-6
    }
}
