//! Densities relative to the arcsine measure of an interval.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::quad::{integrate_with_breaks, QuadOptions};

pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DensityKind {
    Chebyshev,
    Linear { slope: f64 },
    Example3 { theta: f64 },
    Equilibrium,
    Custom { name: String },
}

impl fmt::Display for DensityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensityKind::Chebyshev => write!(f, "chebyshev"),
            DensityKind::Linear { slope } => write!(f, "linear:{slope}"),
            DensityKind::Example3 { theta } => write!(f, "example3:{theta}"),
            DensityKind::Equilibrium => write!(f, "equilibrium"),
            DensityKind::Custom { name } => write!(f, "custom:{name}"),
        }
    }
}

/// Shape conditions under which the discretization bounds apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Admissibility {
    pub nonnegative: bool,
    pub increasing: bool,
    pub concave: bool,
    pub ratio_convex: bool,
}

impl Admissibility {
    pub fn all(&self) -> bool {
        self.nonnegative && self.increasing && self.concave && self.ratio_convex
    }

    /// Names of the failed conditions.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.nonnegative {
            out.push("nonnegative");
        }
        if !self.increasing {
            out.push("increasing");
        }
        if !self.concave {
            out.push("concave");
        }
        if !self.ratio_convex {
            out.push("ratio_convex");
        }
        out
    }
}

/// A density g on (a, b] with respect to the arcsine measure of [a, b], so
/// that dμ = g(t) dt / (π√((t−a)(b−t))).
#[derive(Clone)]
pub struct ArcsineWeightedDensity {
    interval: Interval,
    kind: DensityKind,
    g: DensityFn,
    admissibility: Admissibility,
}

impl fmt::Debug for ArcsineWeightedDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ArcsineWeightedDensity")
            .field("interval", &self.interval)
            .field("kind", &self.kind)
            .field("admissibility", &self.admissibility)
            .finish()
    }
}

impl ArcsineWeightedDensity {
    /// Build from an arbitrary function of t on (a, b]. Admissibility is
    /// determined numerically on a grid.
    pub fn new(interval: Interval, kind: DensityKind, g: DensityFn) -> Self {
        let admissibility = check_admissibility(&interval, &*g);
        Self { interval, kind, g, admissibility }
    }

    /// g ≡ 1: the arcsine measure itself.
    pub fn chebyshev(interval: Interval) -> Self {
        let mut d = Self::new(interval, DensityKind::Chebyshev, Arc::new(|_| 1.0));
        d.admissibility = Admissibility { nonnegative: true, increasing: true, concave: true, ratio_convex: true };
        d
    }

    /// g = 1 + slope·s in the normalized variable s ∈ [−1, 1]. Admissible iff
    /// slope ∈ [0, 1]; a negative slope gives a decreasing density.
    pub fn linear(interval: Interval, slope: f64) -> Result<Self> {
        if !slope.is_finite() {
            return Err(Error::invalid("slope must be finite"));
        }
        let g: DensityFn = Arc::new(move |t| 1.0 + slope * interval.to_unit(t));
        Ok(Self::new(interval, DensityKind::Linear { slope }, g))
    }

    /// g = c_θ (s + 1)^θ with c_θ normalizing the mass, θ ∈ [0, 1].
    pub fn example3(interval: Interval, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::invalid(format!("theta must lie in [0, 1], got {theta}")));
        }
        let c = example3_constant(theta);
        let g: DensityFn = Arc::new(move |t| {
            let s1 = (interval.to_unit(t) + 1.0).max(0.0);
            c * s1.powf(theta)
        });
        Ok(Self::new(interval, DensityKind::Example3 { theta }, g))
    }

    pub fn custom(interval: Interval, name: impl Into<String>, g: DensityFn) -> Self {
        Self::new(interval, DensityKind::Custom { name: name.into() }, g)
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn admissibility(&self) -> Admissibility {
        self.admissibility
    }

    /// g(t) for t in [a, b].
    pub fn eval(&self, t: f64) -> f64 {
        (self.g)(t)
    }

    /// g in the normalized variable s ∈ [−1, 1].
    pub fn eval_unit(&self, s: f64) -> f64 {
        (self.g)(self.interval.from_unit(s))
    }

    /// g at the point with angle θ, t = mid − half·cos θ.
    pub fn eval_angle(&self, theta: f64) -> f64 {
        (self.g)(self.interval.from_angle(theta))
    }

    /// μ([a, b]) = (1/π)∫₀^π g dθ.
    pub fn mass(&self) -> Result<f64> {
        let r = integrate_with_breaks(|th| self.eval_angle(th), 0.0, PI, &[], QuadOptions::abs(1e-12))?;
        Ok(r.value / PI)
    }

    /// W_g(x) = k μ([a, x]).
    pub fn cumulative_w(&self, k: usize, x: f64) -> Result<f64> {
        if !self.interval.contains(x) {
            return Err(Error::domain(format!(
                "cumulative distribution needs x in [{}, {}], got {x}",
                self.interval.a(),
                self.interval.b()
            )));
        }
        let alpha = unit_to_angle(self.interval.to_unit(x));
        self.w_between_angles(k, 0.0, alpha)
    }

    /// k μ of the cell between two angles.
    pub fn w_between_angles(&self, k: usize, lo: f64, hi: f64) -> Result<f64> {
        let r = integrate_with_breaks(|th| self.eval_angle(th), lo, hi, &[], QuadOptions::abs(1e-13 / k as f64))?;
        Ok(k as f64 * r.value / PI)
    }

    /// Logarithmic potential U^μ(x) = ∫ log(1/|x − t|) dμ(t).
    pub fn log_potential(&self, x: f64) -> Result<f64> {
        let iv = self.interval;
        let integrand = |th: f64| {
            let t = iv.from_angle(th);
            let d = (x - t).abs();
            if d == 0.0 {
                0.0
            } else {
                -d.ln() * self.eval_angle(th)
            }
        };
        let breaks = if iv.contains_open(x) { vec![unit_to_angle(iv.to_unit(x))] } else { vec![] };
        let r = integrate_with_breaks(integrand, 0.0, PI, &breaks, QuadOptions::abs(1e-11))?;
        Ok(r.value / PI)
    }
}

/// Normalizing constant of the Example 3 family.
pub fn example3_constant(theta: f64) -> f64 {
    let ln_c = PI.ln() - theta * std::f64::consts::LN_2 + ln_gamma(theta + 1.0)
        - ln_gamma(0.5)
        - ln_gamma(theta + 0.5);
    ln_c.exp()
}

/// Angle α ∈ [0, π] with s = −cos α, accurate near both endpoints.
pub fn unit_to_angle(s: f64) -> f64 {
    let s = s.clamp(-1.0, 1.0);
    if s <= 0.0 {
        2.0 * (0.5 * (1.0 + s)).sqrt().asin()
    } else {
        PI - 2.0 * (0.5 * (1.0 - s)).sqrt().asin()
    }
}

fn check_admissibility(iv: &Interval, g: &dyn Fn(f64) -> f64) -> Admissibility {
    const M: usize = 400;
    // Chebyshev-like spacing puts more points near the ends where shape matters
    let s: Vec<f64> = (1..=M).map(|i| -((PI * i as f64) / M as f64).cos()).collect();
    let v: Vec<f64> = s.iter().map(|&si| g(iv.from_unit(si))).collect();
    let scale = v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let tol = 1e-9 * scale;

    let nonnegative = v.iter().all(|&x| x >= -tol && x.is_finite());
    let increasing = v.windows(2).all(|w| w[1] >= w[0] - tol);
    let concave = (1..M - 1).all(|i| {
        let (h0, h1) = (s[i] - s[i - 1], s[i + 1] - s[i]);
        let slope_l = (v[i] - v[i - 1]) / h0;
        let slope_r = (v[i + 1] - v[i]) / h1;
        slope_r <= slope_l + tol / h0.min(h1).max(1e-3)
    });
    let h: Vec<f64> = s.iter().zip(&v).map(|(si, vi)| vi / (si + 1.0)).collect();
    let hscale = h.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let ratio_convex = (1..M - 1).all(|i| {
        let (h0, h1) = (s[i] - s[i - 1], s[i + 1] - s[i]);
        let slope_l = (h[i] - h[i - 1]) / h0;
        let slope_r = (h[i + 1] - h[i]) / h1;
        slope_r >= slope_l - 1e-9 * hscale / h0.min(h1).max(1e-3)
    });
    Admissibility { nonnegative, increasing, concave, ratio_convex }
}
