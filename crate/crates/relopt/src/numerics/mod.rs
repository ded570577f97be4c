//! Shared numerical kernels: quadrature, root bracketing, scalar
//! minimization, interpolation, least squares and a small thread pool.

pub mod fit;
pub mod interp;
pub mod minimize;
pub mod parallel;
pub mod quad;
pub mod roots;
