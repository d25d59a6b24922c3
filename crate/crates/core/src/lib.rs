//! Exceptional points, biorthogonal quasiparticles and exact diagonalization
//! for the open XY chain with complex anisotropy γ.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod chain;
pub mod ep;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod polyalg;
pub mod topology;

pub use error::{Error, Result};
pub use num_complex::Complex64;
