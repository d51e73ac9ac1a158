//! Numerical building blocks: adaptive quadrature and special functions.

pub mod quad;
pub mod special;
