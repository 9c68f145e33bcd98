//! Equilibrium measures of intervals in external fields, their discretization
//! by weighted-midpoint polynomials, and conjugate gradient convergence bounds
//! built on top of them.

pub mod bounds;
pub mod cg;
pub mod density;
pub mod discretizer;
pub mod equilibrium;
pub mod error;
pub mod interval;
pub mod quad;
pub mod roots;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};

/// Constant of the sharpness certificate: 872 + 32 + 14479.
pub const C_BW: f64 = 15383.0;
