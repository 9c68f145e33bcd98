use std::f64::consts::PI;

use serde::Serialize;

use crate::density::{unit_to_angle, ArcsineWeightedDensity};
use crate::error::{Error, Result};

/// Difference quotient of W_g against W_g' at the midpoint, in [−1, 1] units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanValue {
    pub lhs_ratio: f64,
    pub midpoint_derivative: f64,
    pub quotient: f64,
}

/// (W_g(t) − W_g(x))/(t − x) compared with W_g'((t + x)/2). Both points are
/// in the density's interval; the quotient is affine invariant.
pub fn mean_value_check(d: &ArcsineWeightedDensity, k: usize, x: f64, t: f64) -> Result<MeanValue> {
    let iv = d.interval();
    if !iv.contains(x) || !iv.contains(t) {
        return Err(Error::domain(format!("mean value check needs points in [{}, {}]", iv.a(), iv.b())));
    }
    if x == t {
        return Err(Error::invalid("mean value check needs distinct points"));
    }
    let (xs, ts) = (iv.to_unit(x), iv.to_unit(t));
    let (lo, hi) = if xs < ts { (xs, ts) } else { (ts, xs) };
    let (alo, ahi) = (unit_to_angle(lo), unit_to_angle(hi));
    let dw = d.w_between_angles(k, alo, ahi)?;
    let ds = 2.0 * (0.5 * (ahi - alo)).sin() * (0.5 * (ahi + alo)).sin();
    let lhs_ratio = dw / ds;
    let m = 0.5 * (lo + hi);
    let am = unit_to_angle(m);
    // √(1 − m²) = sin of the midpoint angle
    let midpoint_derivative = k as f64 * d.eval_unit(m) / (PI * am.sin());
    Ok(MeanValue { lhs_ratio, midpoint_derivative, quotient: lhs_ratio / midpoint_derivative })
}
