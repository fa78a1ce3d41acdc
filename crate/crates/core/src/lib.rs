//! Transform pair for analytic functions and for the complex Helmholtz
//! equation on bounded convex planar domains, plus solvers for mixed
//! boundary value problems built on its global relations.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod error;
pub mod geometry;
pub mod helmholtz;
pub mod laplace;
pub mod lsq;
pub mod mixed_bvp;
pub mod quadrature;
pub mod special;
pub mod vortex;

pub use error::{Error, Result};
pub use num_complex::Complex64;
