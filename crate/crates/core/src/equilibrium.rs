//! Equilibrium measure of [α, b] in the external field Q = U^{ρ/k} of a
//! finite atomic measure ρ supported on (−∞, α].

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::density::{ArcsineWeightedDensity, DensityKind};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::roots::newton_bisect;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        for at in &atoms {
            if !at.location.is_finite() {
                return Err(Error::invalid(format!("atom location must be finite, got {}", at.location)));
            }
            if !(at.mass > 0.0 && at.mass.is_finite()) {
                return Err(Error::invalid(format!("atom mass must be positive, got {}", at.mass)));
            }
        }
        Ok(Self { atoms })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Unit atoms at the given points, the counting measure of a spectrum.
    pub fn counting(points: &[f64]) -> Result<Self> {
        Self::new(points.iter().map(|&location| Atom { location, mass: 1.0 }).collect())
    }

    /// A single atom.
    pub fn dirac(location: f64, mass: f64) -> Result<Self> {
        Self::new(vec![Atom { location, mass }])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    pub fn max_location(&self) -> Option<f64> {
        self.atoms.iter().map(|a| a.location).reduce(f64::max)
    }

    /// Σ m log|x − y|, the log modulus of the weight polynomial.
    pub fn log_abs_poly(&self, x: f64) -> f64 {
        self.atoms.iter().map(|a| a.mass * (x - a.location).abs().ln()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalFieldProblem {
    k: usize,
    rho: AtomicMeasure,
    sigma: Interval,
}

impl ExternalFieldProblem {
    pub fn new(k: usize, rho: AtomicMeasure, sigma: Interval) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if let Some(y) = rho.max_location() {
            if y > sigma.a() {
                return Err(Error::invalid(format!(
                    "atoms must lie in (-inf, alpha] = (-inf, {}], found {y}",
                    sigma.a()
                )));
            }
        }
        Ok(Self { k, rho, sigma })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rho(&self) -> &AtomicMeasure {
        &self.rho
    }

    pub fn sigma(&self) -> Interval {
        self.sigma
    }

    pub fn alpha(&self) -> f64 {
        self.sigma.a()
    }

    pub fn b(&self) -> f64 {
        self.sigma.b()
    }

    /// k + ‖ρ‖.
    pub fn total(&self) -> f64 {
        self.k as f64 + self.rho.total_mass()
    }

    /// External field Q(x) = U^{ρ/k}(x).
    pub fn external_field(&self, x: f64) -> f64 {
        -self.rho.log_abs_poly(x) / self.k as f64
    }
}

fn eta_raw(rho: &AtomicMeasure, b: f64, a: f64) -> f64 {
    rho.atoms()
        .iter()
        .map(|at| {
            let d = a - at.location;
            if d <= 0.0 {
                f64::INFINITY
            } else {
                at.mass * ((b - at.location) / d).sqrt()
            }
        })
        .sum()
}

fn eta_prime_raw(rho: &AtomicMeasure, b: f64, a: f64) -> f64 {
    rho.atoms()
        .iter()
        .map(|at| {
            let d = a - at.location;
            -0.5 * at.mass * (b - at.location).sqrt() * d.powf(-1.5)
        })
        .sum()
}

/// η(a) = Σ m √((b − y)/(a − y)).
pub fn eta(rho: &AtomicMeasure, b: f64, a: f64) -> Result<f64> {
    if a >= b {
        return Err(Error::domain(format!("eta needs a < b, got a = {a}, b = {b}")));
    }
    if let Some(y) = rho.max_location() {
        if a <= y {
            return Err(Error::domain(format!("eta needs a above every atom, got a = {a}, atom at {y}")));
        }
    }
    Ok(eta_raw(rho, b, a))
}

/// Left endpoint a of the support: α unless the field pushes the support
/// to the right, in which case η(a) = k + ‖ρ‖.
pub fn solve_support_endpoint(p: &ExternalFieldProblem) -> Result<f64> {
    let (alpha, b) = (p.alpha(), p.b());
    let total = p.total();
    let eta_alpha = eta_raw(&p.rho, b, alpha);
    if eta_alpha <= total {
        return Ok(alpha);
    }
    // η decreases from η(α) > total to η(b) = ‖ρ‖ < total
    let width = b - alpha;
    let mut lo = alpha;
    let mut hi = b;
    for m in (0..=60).rev() {
        let cand = alpha + width * 0.5f64.powi(m);
        if eta_raw(&p.rho, b, cand) < total {
            hi = cand;
            break;
        }
        lo = cand;
    }
    let tol = 1e-14 * alpha.abs().max(width);
    newton_bisect(
        |a| {
            let v = eta_raw(&p.rho, b, a) - total;
            Ok((v, eta_prime_raw(&p.rho, b, a)))
        },
        lo,
        hi,
        tol,
    )
}

/// Balayage closed form of the equilibrium density on (a, b], relative to
/// the arcsine measure of [a, b].
pub fn equilibrium_density(p: &ExternalFieldProblem, a: f64, t: f64) -> Result<f64> {
    if !(t > a && t <= p.b()) {
        return Err(Error::domain(format!("density is defined on ({a}, {}], got {t}", p.b())));
    }
    Ok(density_unchecked(p, a, t))
}

fn density_constant(p: &ExternalFieldProblem, a: f64) -> f64 {
    if a > p.alpha() {
        // η(a) = k + ‖ρ‖ up to root tolerance
        0.0
    } else {
        ((p.total() - eta_raw(&p.rho, p.b(), a)) / p.k as f64).max(0.0)
    }
}

fn density_unchecked(p: &ExternalFieldProblem, a: f64, t: f64) -> f64 {
    let k = p.k as f64;
    let b = p.b();
    let c0 = density_constant(p, a);
    let s: f64 = p
        .rho
        .atoms()
        .iter()
        .map(|at| at.mass * ((b - at.location) / (a - at.location)).sqrt() / (t - at.location))
        .sum();
    c0 + (t - a) / k * s
}

/// Exponent f of the weighted Bernstein-Walsh inequality, from
/// k f(x) = (k + ‖ρ‖) g(x, ∞) − Σ m g(x, y).
pub fn exponent_f(p: &ExternalFieldProblem, a: f64, x: f64) -> Result<f64> {
    let support = Interval::new(a, p.b())?;
    let mut kf = p.total() * support.green_infinity(x)?;
    for at in p.rho.atoms() {
        kf -= at.mass * support.green_pole(x, at.location)?;
    }
    Ok(kf / p.k as f64)
}

#[derive(Debug, Clone)]
pub struct EquilibriumSolution {
    problem: ExternalFieldProblem,
    support: Interval,
    density: ArcsineWeightedDensity,
    total_mass_check: f64,
    f_const: f64,
}

impl EquilibriumSolution {
    pub fn solve(p: &ExternalFieldProblem) -> Result<Self> {
        let a = solve_support_endpoint(p)?;
        let support = Interval::new(a, p.b())?;
        let pc = p.clone();
        let g = Arc::new(move |t: f64| density_unchecked(&pc, a, t));
        let density = ArcsineWeightedDensity::new(support, DensityKind::Equilibrium, g);
        let total_mass_check = density.mass()?;
        let mut sol = Self { problem: p.clone(), support, density, total_mass_check, f_const: f64::NAN };
        sol.f_const = robin_constant_f(p, &sol)?;
        Ok(sol)
    }

    pub fn problem(&self) -> &ExternalFieldProblem {
        &self.problem
    }

    pub fn support(&self) -> Interval {
        self.support
    }

    pub fn a(&self) -> f64 {
        self.support.a()
    }

    pub fn density(&self) -> &ArcsineWeightedDensity {
        &self.density
    }

    pub fn total_mass_check(&self) -> f64 {
        self.total_mass_check
    }

    /// Modified Robin constant F.
    pub fn f_const(&self) -> f64 {
        self.f_const
    }

    pub fn g(&self, t: f64) -> Result<f64> {
        equilibrium_density(&self.problem, self.a(), t)
    }

    pub fn exponent_f(&self, x: f64) -> Result<f64> {
        exponent_f(&self.problem, self.a(), x)
    }

    pub fn potential(&self, x: f64) -> Result<f64> {
        self.density.log_potential(x)
    }

    /// F − U^μ(x) − Q(x): zero on the support, non-positive on the rest of Σ.
    pub fn equilibrium_defect(&self, x: f64) -> Result<f64> {
        Ok(self.f_const - self.potential(x)? - self.problem.external_field(x))
    }
}

/// U^μ(x) for the solved measure. `k` only has to match the problem.
pub fn potential_u_mu(sol: &EquilibriumSolution, k: usize, x: f64) -> Result<f64> {
    if k != sol.problem.k {
        return Err(Error::invalid(format!("k = {k} does not match the solved problem (k = {})", sol.problem.k)));
    }
    sol.potential(x)
}

/// F = U^μ(x*) + Q(x*) at the support midpoint, cross-checked at the first quarter point.
pub fn robin_constant_f(p: &ExternalFieldProblem, sol: &EquilibriumSolution) -> Result<f64> {
    let s = sol.support;
    let at = |x: f64| -> Result<f64> { Ok(sol.density.log_potential(x)? + p.external_field(x)) };
    let f_mid = at(s.mid())?;
    let f_quarter = at(s.a() + 0.25 * s.width())?;
    let gap = (f_mid - f_quarter).abs();
    if gap > 1e-6 {
        return Err(Error::Inconsistent(format!(
            "equilibrium constant differs between checkpoints: {f_mid} vs {f_quarter}"
        )));
    }
    Ok(f_mid)
}
