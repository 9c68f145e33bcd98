use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::certificate::DiscretizationCertificate;
use crate::equilibrium::{EquilibriumSolution, ExternalFieldProblem};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::roots::golden_max;

/// r = w(x0)^k |P_k(x0)| / ‖w^k P_k‖_[a,b] in log form, next to k f(x0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateRatio {
    pub x0: f64,
    pub log_ratio: f64,
    pub log_value_at_x0: f64,
    pub log_sup: f64,
    pub argmax: f64,
    pub kf: f64,
}

impl CertificateRatio {
    /// k f(x0) − log r, the constant lost against the Bernstein-Walsh bound.
    pub fn deficit(&self) -> f64 {
        self.kf - self.log_ratio
    }
}

fn log_weighted(p: &ExternalFieldProblem, nodes: &[f64], x: f64) -> f64 {
    p.rho().log_abs_poly(x) + nodes.iter().map(|xi| (x - xi).abs().ln()).sum::<f64>()
}

fn grid_max(p: &ExternalFieldProblem, nodes: &[f64], iv: Interval, m: usize) -> (Vec<f64>, Vec<f64>) {
    let xs: Vec<f64> = (0..=m).map(|i| iv.from_angle(PI * i as f64 / m as f64)).collect();
    let vs: Vec<f64> = xs.par_iter().map(|&x| log_weighted(p, nodes, x)).collect();
    (xs, vs)
}

fn polished_sup(p: &ExternalFieldProblem, nodes: &[f64], xs: &[f64], vs: &[f64]) -> (f64, f64) {
    let m = xs.len() - 1;
    let mut best = (xs[0], vs[0]);
    for i in 0..=m {
        let left = if i == 0 { f64::NEG_INFINITY } else { vs[i - 1] };
        let right = if i == m { f64::NEG_INFINITY } else { vs[i + 1] };
        if !(vs[i] >= left && vs[i] >= right) {
            continue;
        }
        let cand = if i == 0 || i == m {
            (xs[i], vs[i])
        } else {
            let (lo, hi) = (xs[i - 1], xs[i + 1]);
            let (x, v) = golden_max(|x| log_weighted(p, nodes, x), lo, hi, 1e-15 * (hi - lo).max(1e-300));
            if v > vs[i] {
                (x, v)
            } else {
                (xs[i], vs[i])
            }
        };
        if cand.1 > best.1 {
            best = cand;
        }
    }
    best
}

/// Ratio of the weighted certificate polynomial at an exterior point to its
/// sup norm on the support.
pub fn certificate_ratio(
    p: &ExternalFieldProblem,
    sol: &EquilibriumSolution,
    c: &DiscretizationCertificate,
    x0: f64,
) -> Result<CertificateRatio> {
    let iv = sol.support();
    if iv.contains(x0) {
        return Err(Error::domain(format!("x0 = {x0} must lie outside [{}, {}]", iv.a(), iv.b())));
    }
    if c.interval() != iv || c.k() != p.k() {
        return Err(Error::invalid("certificate does not belong to this equilibrium problem"));
    }
    let kf = p.k() as f64 * sol.exponent_f(x0)?;
    let nodes = c.nodes();
    let log_value_at_x0 = log_weighted(p, &nodes, x0);
    if !log_value_at_x0.is_finite() {
        return Err(Error::Singularity(format!("weighted polynomial vanishes at x0 = {x0}")));
    }
    let m = (64 * p.k()).max(4096);
    let (xs, vs) = grid_max(p, &nodes, iv, m);
    let (argmax, log_sup) = polished_sup(p, &nodes, &xs, &vs);
    // a twice finer grid must not find anything above the polished maximum
    let (_, vs2) = grid_max(p, &nodes, iv, 2 * m);
    let fine = vs2.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !log_sup.is_finite() || fine > log_sup + 1e-10 * log_sup.abs().max(1.0) {
        return Err(Error::NotConverged(format!(
            "sup norm refinement: polished {log_sup}, finer grid {fine}"
        )));
    }
    Ok(CertificateRatio { x0, log_ratio: log_value_at_x0 - log_sup, log_value_at_x0, log_sup, argmax, kf })
}

/// log|T_k(z(x0))|, the ratio attained by the Chebyshev polynomial of the interval.
pub fn chebyshev_reference_log_ratio(iv: Interval, k: usize, x0: f64) -> Result<f64> {
    let y = k as f64 * iv.green_infinity(x0)?;
    // log cosh y
    Ok(y + (-2.0 * y).exp().ln_1p() - std::f64::consts::LN_2)
}
