//! Numerical building blocks: special functions, small dense linear algebra
//! and quadrature.

pub mod linalg;
pub mod quad;
pub mod special;
