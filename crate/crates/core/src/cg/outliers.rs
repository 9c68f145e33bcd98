use std::f64::consts::PI;

use serde::Serialize;

use crate::discretizer::{build_partition, certificate_ratio};
use crate::equilibrium::{AtomicMeasure, EquilibriumSolution, ExternalFieldProblem};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::roots::golden_max;

/// Upper bound on E_n([λ_{d+1}, b]) from the polynomial with roots at the
/// outliers λ_1..λ_d and at the weighted-midpoint nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutlierCertificate {
    pub n: usize,
    pub d: usize,
    /// support endpoint a = a_{d,n}
    pub a: f64,
    pub log_value: f64,
    /// −n g(0, ∞) + Σ g(0, λ_j) on [a, b]
    pub log_theory: f64,
}

impl OutlierCertificate {
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }

    pub fn theory(&self) -> f64 {
        self.log_theory.exp()
    }

    /// log(value / theory), which lies in [0, C_BW].
    pub fn excess(&self) -> f64 {
        self.log_value - self.log_theory
    }
}

/// External field problem with ρ = δ_{λ_1} + … + δ_{λ_d} on [λ_{d+1}, b] and k = n − d.
pub fn outlier_problem(lambdas: &[f64], d: usize, n: usize, b: f64) -> Result<ExternalFieldProblem> {
    if d >= lambdas.len() {
        return Err(Error::invalid(format!("d = {d} needs more than {} eigenvalues", lambdas.len())));
    }
    if n <= d {
        return Err(Error::invalid(format!("n = {n} must exceed d = {d}")));
    }
    let rho = AtomicMeasure::counting(&lambdas[..d])?;
    ExternalFieldProblem::new(n - d, rho, Interval::new(lambdas[d], b)?)
}

fn same_atoms(p: &ExternalFieldProblem, outliers: &[f64]) -> bool {
    let atoms = p.rho().atoms();
    atoms.len() == outliers.len()
        && atoms.iter().zip(outliers).all(|(a, &l)| a.location == l && a.mass == 1.0)
}

pub fn en_with_outliers_certificate(
    p: &ExternalFieldProblem,
    n: usize,
    d: usize,
    lambdas: &[f64],
) -> Result<OutlierCertificate> {
    if n <= d + 1 {
        return Err(Error::invalid(format!("need n > d + 1, got n = {n}, d = {d}")));
    }
    if lambdas.len() <= d || lambdas.iter().any(|&l| l <= 0.0) {
        return Err(Error::invalid("need more than d positive eigenvalues"));
    }
    if p.k() != n - d || p.alpha() != lambdas[d] || !same_atoms(p, &lambdas[..d]) {
        return Err(Error::invalid("problem does not match the outlier configuration"));
    }
    let sol = EquilibriumSolution::solve(p)?;
    let cert = build_partition(sol.density(), p.k())?;
    let ratio = certificate_ratio(p, &sol, &cert, 0.0)?;
    let mut log_sup = ratio.log_sup;
    let (alpha, a) = (p.alpha(), sol.a());
    if a > alpha {
        // the norm is over [λ_{d+1}, b], which reaches left of the support
        let nodes = cert.nodes();
        let h = |x: f64| p.rho().log_abs_poly(x) + nodes.iter().map(|xi| (x - xi).abs().ln()).sum::<f64>();
        let gap = Interval::new(alpha, a)?;
        let m = 2048;
        let xs: Vec<f64> = (0..=m).map(|i| gap.from_angle(PI * i as f64 / m as f64)).collect();
        let (imax, vmax) = xs
            .iter()
            .map(|&x| h(x))
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        let lo = xs[imax.saturating_sub(1)];
        let hi = xs[(imax + 1).min(m)];
        let (_, polished) = golden_max(h, lo, hi, 1e-15 * (hi - lo).max(1e-300));
        log_sup = log_sup.max(vmax).max(polished);
    }
    let log_value = log_sup - ratio.log_value_at_x0;
    let support = sol.support();
    let mut log_theory = -(n as f64) * support.green_infinity(0.0)?;
    for &l in &lambdas[..d] {
        log_theory += support.green_pole(0.0, l)?;
    }
    Ok(OutlierCertificate { n, d, a, log_value, log_theory })
}
