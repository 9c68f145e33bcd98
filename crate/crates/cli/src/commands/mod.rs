pub mod discretize;
pub mod tables;
pub mod verify;

use std::f64::consts::PI;

use logpot::discretizer::DiscretizationCertificate;
use logpot::interval::Interval;

/// Points at geometric distances 1e-12 w … 1e3 w outside both ends, m per side.
pub fn exterior_grid(iv: Interval, m: usize) -> Vec<f64> {
    let m = m.max(2);
    let mut xs = Vec::with_capacity(2 * m);
    for i in 0..m {
        let dist = iv.width() * 10f64.powf(-12.0 + 15.0 * i as f64 / (m - 1) as f64);
        xs.push(iv.a() - dist);
        xs.push(iv.b() + dist);
    }
    xs
}

/// Chebyshev-angle points of the interval together with the partition points.
pub fn interior_grid(c: &DiscretizationCertificate, m: usize) -> Vec<f64> {
    let iv = c.interval();
    let m = m.max(2);
    let mut xs: Vec<f64> = (0..=m).map(|i| iv.from_angle(PI * i as f64 / m as f64)).collect();
    xs.extend(c.partition());
    xs.sort_by(|a, b| a.total_cmp(b));
    xs.dedup();
    xs
}
