//! Convergence bounds for CG: condition number, outlier-corrected, their
//! envelope, and the bound driven by the eigenvalue distribution.

use rayon::prelude::*;
use serde::Serialize;

use crate::equilibrium::solve_support_endpoint;
use crate::cg::outlier_problem;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::quad::{integrate, QuadOptions};
use crate::spectral::SpectralDensity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundKind {
    CondNumber,
    Outlier { d: usize },
    Envelope,
    Integral,
    ThSuper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundRecord {
    pub n: usize,
    pub log_value: f64,
    pub d: usize,
    pub a_dn: f64,
}

impl BoundRecord {
    /// May underflow to 0 for large n; `log_value` stays exact.
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCurve {
    pub kind: BoundKind,
    pub offset: f64,
    /// One entry per requested n; `None` where the bound is not defined.
    pub records: Vec<(usize, Option<BoundRecord>)>,
}

impl BoundCurve {
    pub fn get(&self, n: usize) -> Option<&BoundRecord> {
        self.records.iter().find(|(m, _)| *m == n).and_then(|(_, r)| r.as_ref())
    }
}

/// 2((√κ − 1)/(√κ + 1))^n with κ = b/a.
pub fn cond_number_bound(a: f64, b: f64, n: usize) -> Result<f64> {
    Ok(log_cond_number_bound(a, b, n)?.exp())
}

pub fn log_cond_number_bound(a: f64, b: f64, n: usize) -> Result<f64> {
    if !(a > 0.0 && b > a && b.is_finite()) {
        return Err(Error::invalid(format!("need 0 < a < b, got a = {a}, b = {b}")));
    }
    if n == 0 {
        return Ok(std::f64::consts::LN_2);
    }
    Ok(std::f64::consts::LN_2 - n as f64 * Interval::new(a, b)?.green_infinity(0.0)?)
}

fn check_sorted_positive(lambdas: &[f64]) -> Result<()> {
    if lambdas.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(Error::invalid("eigenvalues must be positive"));
    }
    if lambdas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("eigenvalues must be strictly increasing"));
    }
    Ok(())
}

/// a_{d,n}: λ_{d+1} if n ≥ Σ_{j≤d} √((b − λ_j)/(λ_{d+1} − λ_j)), else the
/// root a > λ_{d+1} of n = Σ_{j≤d} √((b − λ_j)/(a − λ_j)).
pub fn outlier_endpoint(lambdas: &[f64], d: usize, n: usize, b: f64) -> Result<f64> {
    if d >= lambdas.len() {
        return Err(Error::invalid(format!("d = {d} needs more than {} eigenvalues", lambdas.len())));
    }
    if n < d + 1 {
        return Err(Error::invalid(format!("need n ≥ d + 1, got n = {n}, d = {d}")));
    }
    solve_support_endpoint(&outlier_problem(lambdas, d, n, b)?)
}

/// log of exp(C − n g(0, ∞) + Σ_{j≤d} g(0, λ_j)), Green functions of [a_{d,n}, b].
pub fn corollary_bound(lambdas: &[f64], d: usize, n: usize, b: f64, c: f64) -> Result<BoundRecord> {
    check_sorted_positive(lambdas)?;
    if n <= d + 1 {
        return Err(Error::Infeasible(format!("need n > d + 1, got n = {n}, d = {d}")));
    }
    let a = outlier_endpoint(lambdas, d, n, b)?;
    let iv = Interval::new(a, b)?;
    let mut log_value = c - n as f64 * iv.green_infinity(0.0)?;
    for &l in &lambdas[..d] {
        log_value += iv.green_pole(0.0, l)?;
    }
    Ok(BoundRecord { n, log_value, d, a_dn: a })
}

pub fn outlier_curve(lambdas: &[f64], d: usize, ns: &[usize], b: f64, c: f64) -> Result<BoundCurve> {
    let records = ns
        .par_iter()
        .map(|&n| match corollary_bound(lambdas, d, n, b, c) {
            Ok(r) => Ok((n, Some(r))),
            Err(Error::Infeasible(_)) => Ok((n, None)),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundCurve { kind: BoundKind::Outlier { d }, offset: c, records })
}

/// Per n, the smallest outlier bound over d ≤ d_max with n > d + 1.
pub fn envelope(lambdas: &[f64], ns: &[usize], b: f64, c: f64, d_max: usize) -> Result<BoundCurve> {
    check_sorted_positive(lambdas)?;
    let d_cap = d_max.min(lambdas.len() - 1);
    let records = ns
        .par_iter()
        .map(|&n| {
            let mut best: Option<BoundRecord> = None;
            for d in 0..=d_cap {
                if n <= d + 1 {
                    break;
                }
                let r = corollary_bound(lambdas, d, n, b, c)?;
                if best.is_none_or(|bst| r.log_value < bst.log_value) {
                    best = Some(r);
                }
            }
            Ok((n, best))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundCurve { kind: BoundKind::Envelope, offset: c, records })
}

/// d with λ_d < a(n/N) ≤ λ_{d+1}, and d = 0 when a(n/N) ≤ λ_1.
pub fn thsuper_d(s: &SpectralDensity, big_n: usize, n: usize, lambdas: &[f64]) -> Result<usize> {
    check_sorted_positive(lambdas)?;
    if big_n == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    if n == 0 {
        return Ok(0);
    }
    let t = n as f64 / big_n as f64;
    if t >= s.mass() {
        return Err(Error::Infeasible(format!("n/N = {t} reaches the total mass {}", s.mass())));
    }
    let a = s.endpoint_a_of_t(t)?;
    let top = lambdas[lambdas.len() - 1];
    if a > top {
        return Err(Error::Infeasible(format!("a(n/N) = {a} exceeds λ_N = {top}")));
    }
    // a(t) carries about 1e-13 relative error; a coincidence a = λ_j counts as a ≤ λ_j
    let cut = a * (1.0 - 1e-11);
    Ok(lambdas.partition_point(|&l| l < cut))
}

/// Corollary bound with the outlier count chosen from the eigenvalue distribution.
pub fn thsuper_bound(s: &SpectralDensity, big_n: usize, n: usize, lambdas: &[f64], c: f64) -> Result<(BoundRecord, usize)> {
    let d = thsuper_d(s, big_n, n, lambdas)?;
    let b = lambdas[lambdas.len() - 1];
    let r = corollary_bound(lambdas, d, n, b, c)?;
    Ok((r, d))
}

pub fn thsuper_curve(s: &SpectralDensity, lambdas: &[f64], ns: &[usize], c: f64) -> Result<BoundCurve> {
    let big_n = lambdas.len();
    let records = ns
        .par_iter()
        .map(|&n| match thsuper_bound(s, big_n, n, lambdas, c) {
            Ok((r, _)) => Ok((n, Some(r))),
            Err(Error::Infeasible(_)) => Ok((n, None)),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundCurve { kind: BoundKind::ThSuper, offset: c, records })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralBound {
    pub n: usize,
    /// C − N ∫_0^{n/N} g_{[a(t), b]}(0, ∞) dt
    pub log_value: f64,
    /// log Π_{j<n} (√(b/a(j/N)) − 1)/(√(b/a(j/N)) + 1)
    pub log_product: f64,
}

impl IntegralBound {
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }

    pub fn product(&self) -> f64 {
        self.log_product.exp()
    }
}

/// g of the shrinking interval [a(t), b] at the origin.
fn green_at_origin(s: &SpectralDensity, t: f64) -> Result<f64> {
    if s.a0() < 0.0 {
        return Err(Error::invalid("spectral interval must not contain the origin"));
    }
    let a = if t <= 0.0 { s.a0() } else { s.endpoint_a_of_t(t)? };
    if a <= 0.0 {
        return Ok(0.0);
    }
    Interval::new(a, s.b())?.green_infinity(0.0)
}

fn green_integral(s: &SpectralDensity, lo: f64, hi: f64) -> Result<f64> {
    if hi <= lo {
        return Ok(0.0);
    }
    let r = integrate(
        |t| green_at_origin(s, t).unwrap_or(f64::NAN),
        lo,
        hi,
        QuadOptions { abs_tol: 1e-15, rel_tol: 1e-13, max_cells: 4000 },
    )?;
    if !r.value.is_finite() {
        return Err(Error::RootFinding("endpoint map failed inside the integral".into()));
    }
    Ok(r.value)
}

pub fn integral_bound(s: &SpectralDensity, big_n: usize, n: usize, c: f64) -> Result<IntegralBound> {
    Ok(integral_bound_curve(s, big_n, &[n], c)?.remove(0))
}

/// Integral bounds for increasing n, integrating only between consecutive values.
pub fn integral_bound_curve(s: &SpectralDensity, big_n: usize, ns: &[usize], c: f64) -> Result<Vec<IntegralBound>> {
    if big_n == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    if ns.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("n values must be sorted"));
    }
    let nf = big_n as f64;
    if let Some(&last) = ns.last() {
        if last as f64 / nf >= s.mass() {
            return Err(Error::Infeasible(format!("n/N = {} must stay below the mass {}", last as f64 / nf, s.mass())));
        }
    }
    let mut bounds = vec![0usize];
    bounds.extend_from_slice(ns);
    let pieces = bounds
        .par_windows(2)
        .map(|w| green_integral(s, w[0] as f64 / nf, w[1] as f64 / nf))
        .collect::<Result<Vec<f64>>>()?;
    let top = ns.last().copied().unwrap_or(0);
    let terms = (0..top)
        .into_par_iter()
        .map(|j| green_at_origin(s, j as f64 / nf))
        .collect::<Result<Vec<f64>>>()?;
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(ns.len());
    for (i, &n) in ns.iter().enumerate() {
        acc += pieces[i];
        let prod: f64 = terms[..n].iter().sum();
        out.push(IntegralBound { n, log_value: c - nf * acc, log_product: -prod });
    }
    Ok(out)
}

/// Example 11 closed form: exp(C − N[(1 + t)ln(1 + t) + (1 − t)ln(1 − t)]), t = n/N.
pub fn example11_integral_closed_form(big_n: usize, n: usize, c: f64) -> f64 {
    let t = n as f64 / big_n as f64;
    let f = (1.0 + t) * t.ln_1p() + if t < 1.0 { (1.0 - t) * (-t).ln_1p() } else { 0.0 };
    (c - big_n as f64 * f).exp()
}
