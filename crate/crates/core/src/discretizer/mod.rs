//! Weighted-midpoint discretization of a measure `dμ = g dω` on an interval:
//! equal-mass cells, barycentric nodes, the monic polynomial with those nodes,
//! and the numerical checks around it.

mod audit;
mod certificate;
mod mean_value;
mod sharpness;

pub use audit::{audit_partition, AuditEntry, AuditReport};
pub use certificate::{build_partition, DiscretizationCertificate, ThreeSums};
pub use mean_value::{mean_value_check, MeanValue};
pub use sharpness::{certificate_ratio, chebyshev_reference_log_ratio, CertificateRatio};

use std::f64::consts::{PI, SQRT_2};

/// Lower constant of the mean-value property.
pub const C1: f64 = 0.25;
/// Upper constant of the mean-value property, π√2.
pub const C2: f64 = PI * SQRT_2;
/// Upper constant for g ≡ 1, π/√2.
pub const C3: f64 = PI / SQRT_2;
/// Lower constant for g(y) = 1 + y.
pub const C4: f64 = 0.5;
/// Growth constant of cells left of a point, 3π/4 + 1.
pub const C5: f64 = 0.75 * PI + 1.0;

pub const SIGMA1_MAX: f64 = 14479.0;
pub const SIGMA2_MAX: f64 = 32.0;
pub const SIGMA3_MAX: f64 = 872.0;
