//! Floating-point abstraction used by every numeric routine in the crate.
//!
//! All algorithms are written against [`Scalar`] so the whole stack can run
//! in `f32` or `f64`. Tolerances are part of the trait because a sensible
//! Hermiticity or normalization threshold depends on the precision of the
//! type; the documented contractual tolerances are the `f64` ones.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar type for matrices, states and diagnostics: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Send + Sync + Debug + Display + 'static
{
    /// Maximum allowed `|A[i][j] - conj(A[j][i])|` for a matrix accepted as Hermitian.
    fn tol_hermitian() -> Self;
    /// Eigendecomposition reconstruction / unitarity tolerance.
    fn tol_reconstruct() -> Self;
    /// Norm / trace / eigenvalue-negativity tolerance for states and density matrices.
    fn tol_state() -> Self;
    /// Dispersion below this is treated as a gap closing (mode skipped).
    fn tol_gapless() -> Self;
    /// Density-matrix eigenvalues below this contribute zero entropy.
    fn entropy_eig_cutoff() -> Self;
    /// Per-mode echoes are floored here before logarithms in the rate function.
    fn echo_floor() -> Self;
    /// Bisection target for `|critical_condition|` at a refined root.
    fn root_tol() -> Self;
}

impl Scalar for f64 {
    fn tol_hermitian() -> Self {
        1e-12
    }
    fn tol_reconstruct() -> Self {
        1e-10
    }
    fn tol_state() -> Self {
        1e-12
    }
    fn tol_gapless() -> Self {
        1e-12
    }
    fn entropy_eig_cutoff() -> Self {
        1e-14
    }
    fn echo_floor() -> Self {
        1e-300
    }
    fn root_tol() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn tol_hermitian() -> Self {
        1e-5
    }
    fn tol_reconstruct() -> Self {
        1e-4
    }
    fn tol_state() -> Self {
        1e-5
    }
    fn tol_gapless() -> Self {
        1e-6
    }
    fn entropy_eig_cutoff() -> Self {
        1e-7
    }
    fn echo_floor() -> Self {
        f32::MIN_POSITIVE
    }
    fn root_tol() -> Self {
        1e-6
    }
}

/// Shorthand for converting an `f64` literal into the working scalar type.
pub(crate) fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("finite literal")
}
