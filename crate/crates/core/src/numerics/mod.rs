//! Numerical kernels shared by the profile, verifier and completeness code.

pub mod linalg;
pub mod ode;
pub mod quadrature;
pub mod special;
