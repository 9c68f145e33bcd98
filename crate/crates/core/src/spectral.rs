//! Model eigenvalue distributions σ and the endpoint map t ↦ a(t).

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::quad::{integrate, QuadOptions};
use crate::roots::brent;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SpectralFamily {
    /// σ' = 1/(2√(1 − x)) on [0, 1].
    Example11,
    /// σ' = γ x^β / √(b − x) on [0, b].
    Example12 { beta: f64, b: f64 },
    Custom { name: String },
}

impl fmt::Display for SpectralFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralFamily::Example11 => write!(f, "example11"),
            SpectralFamily::Example12 { beta, b } => write!(f, "example12(beta={beta}, b={b})"),
            SpectralFamily::Custom { name } => write!(f, "custom:{name}"),
        }
    }
}

/// How eigenvalues are read off the distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SamplingMode {
    /// λ_j = quantile(j/N), so σ((−∞, λ_j]) = j/N.
    Equality,
    /// λ_j = quantile(min(1, (j + offset)/N)) with offset in [0, 1), which
    /// only guarantees σ((−∞, λ_j]) ≥ j/N.
    UpperQuantile { offset: f64 },
}

#[derive(Clone)]
pub struct SpectralDensity {
    interval: Interval,
    family: SpectralFamily,
    density: RealFn,
    cdf: RealFn,
    quantile: Option<RealFn>,
    mass: f64,
}

impl fmt::Debug for SpectralDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralDensity")
            .field("interval", &self.interval)
            .field("family", &self.family)
            .field("mass", &self.mass)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSample {
    eigenvalues: Vec<f64>,
}

impl SpectrumSample {
    pub fn new(eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::invalid("spectrum must not be empty"));
        }
        if eigenvalues.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("eigenvalues must be strictly increasing"));
        }
        Ok(Self { eigenvalues })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.eigenvalues
    }
}

/// γ = 1/(b^{β+1/2} B(β+1, 1/2)).
pub fn example12_normalizer(beta: f64, b: f64) -> f64 {
    let ln_beta_fn = ln_gamma(beta + 1.0) + ln_gamma(0.5) - ln_gamma(beta + 1.5);
    (-(beta + 0.5) * b.ln() - ln_beta_fn).exp()
}

impl SpectralDensity {
    pub fn example11() -> Self {
        Self {
            interval: Interval::new(0.0, 1.0).expect("valid"),
            family: SpectralFamily::Example11,
            density: Arc::new(|x: f64| 0.5 / (1.0 - x).sqrt()),
            cdf: Arc::new(|x: f64| {
                let x = x.clamp(0.0, 1.0);
                // 1 − √(1 − x) without cancellation for small x
                x / (1.0 + (1.0 - x).sqrt())
            }),
            quantile: Some(Arc::new(|p: f64| p * (2.0 - p))),
            mass: 1.0,
        }
    }

    pub fn example12(beta: f64, b: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::invalid(format!("beta must be nonnegative, got {beta}")));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::invalid(format!("b must be positive, got {b}")));
        }
        let gamma = example12_normalizer(beta, b);
        let cdf: RealFn = Arc::new(move |x: f64| {
            let v = (x / b).clamp(0.0, 1.0);
            if v == 0.0 {
                0.0
            } else if v == 1.0 {
                1.0
            } else {
                beta_reg(beta + 1.0, 0.5, v)
            }
        });
        let c2 = cdf.clone();
        let quantile: RealFn = Arc::new(move |p: f64| {
            if p <= 0.0 {
                return 0.0;
            }
            if p >= 1.0 {
                return b;
            }
            brent(|x| Ok(c2(x) - p), 0.0, b, 1e-16 * b).unwrap_or(f64::NAN)
        });
        Ok(Self {
            interval: Interval::new(0.0, b)?,
            family: SpectralFamily::Example12 { beta, b },
            density: Arc::new(move |x: f64| gamma * x.powf(beta) / (b - x).sqrt()),
            cdf,
            quantile: Some(quantile),
            mass: 1.0,
        })
    }

    /// A density on `interval` given only pointwise; cdf and quantile are
    /// computed numerically.
    pub fn custom(interval: Interval, name: impl Into<String>, density: Arc<dyn Fn(f64) -> f64 + Send + Sync>) -> Result<Self> {
        let d2 = density.clone();
        let cdf: RealFn = Arc::new(move |x: f64| {
            if x <= interval.a() {
                return 0.0;
            }
            let x = x.min(interval.b());
            // x = mid − half cos θ removes inverse square root endpoint behavior
            let th = crate::density::unit_to_angle(interval.to_unit(x));
            integrate(
                |t: f64| d2(interval.from_angle(t)) * interval.half_width() * t.sin(),
                0.0,
                th,
                QuadOptions { abs_tol: 1e-14, rel_tol: 1e-13, max_cells: 4000 },
            )
            .map(|r| r.value)
            .unwrap_or(f64::NAN)
        });
        let mass = cdf(interval.b());
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::invalid(format!("custom spectral density has mass {mass}")));
        }
        Ok(Self { interval, family: SpectralFamily::Custom { name: name.into() }, density, cdf, quantile: None, mass })
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn family(&self) -> &SpectralFamily {
        &self.family
    }

    pub fn a0(&self) -> f64 {
        self.interval.a()
    }

    pub fn b(&self) -> f64 {
        self.interval.b()
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn density(&self, x: f64) -> f64 {
        (self.density)(x)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        (self.cdf)(x)
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=self.mass).contains(&p) {
            return Err(Error::domain(format!("quantile needs p in [0, {}], got {p}", self.mass)));
        }
        let q = match &self.quantile {
            Some(q) => q(p),
            None => {
                if p >= self.mass {
                    self.b()
                } else if p == 0.0 {
                    self.a0()
                } else {
                    brent(|x| Ok(self.cdf(x) - p), self.a0(), self.b(), 1e-16 * self.b().abs().max(1.0))?
                }
            }
        };
        if q.is_nan() {
            return Err(Error::RootFinding(format!("quantile inversion failed at p = {p}")));
        }
        Ok(q)
    }

    /// Known closed forms of a(t) for the example families.
    pub fn endpoint_closed_form(&self, t: f64) -> Option<f64> {
        match self.family {
            SpectralFamily::Example11 => Some(t * t),
            SpectralFamily::Example12 { beta, b } => Some(b * t.powf(1.0 / (beta + 0.5))),
            SpectralFamily::Custom { .. } => None,
        }
    }

    /// ∫_{a0}^{a} √((b − x)/(a − x)) dσ(x), with x = a − u² and
    /// u = √(a − a0) sin θ.
    pub fn endpoint_integral(&self, a: f64) -> Result<f64> {
        let (a0, b) = (self.a0(), self.b());
        if !(a >= a0 && a <= b) {
            return Err(Error::domain(format!("endpoint integral needs a in [{a0}, {b}], got {a}")));
        }
        let len = (a - a0).sqrt();
        if len == 0.0 {
            return Ok(0.0);
        }
        let r = integrate(
            |th: f64| {
                let u = len * th.sin();
                let x = a - u * u;
                2.0 * (b - a + u * u).sqrt() * self.density(x) * len * th.cos()
            },
            0.0,
            FRAC_PI_2,
            QuadOptions { abs_tol: 1e-15, rel_tol: 1e-13, max_cells: 4000 },
        )?;
        Ok(r.value)
    }

    /// a(t): the unique a with ∫_{a0}^{a} √((b − x)/(a − x)) dσ(x) = t.
    pub fn endpoint_a_of_t(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t < self.mass) {
            return Err(Error::domain(format!("endpoint map needs t in (0, {}), got {t}", self.mass)));
        }
        let (a0, b) = (self.a0(), self.b());
        brent(|a| Ok(self.endpoint_integral(a)? - t), a0, b, 1e-16 * b.abs().max(1.0))
    }

    /// x ↦ √((x − a0)(b − x)) σ'(x) vanishes at a0 and increases strictly.
    pub fn is_admissible_shape(&self) -> bool {
        let (a0, b) = (self.a0(), self.b());
        let h = |x: f64| ((x - a0) * (b - x)).sqrt() * self.density(x);
        let m = 400;
        let xs: Vec<f64> = (1..m).map(|i| self.interval.from_angle(PI * i as f64 / m as f64)).collect();
        let vals: Vec<f64> = xs.iter().map(|&x| h(x)).collect();
        let vanishes = h(a0 + 1e-12 * (b - a0)) < 1e-4 * vals.iter().cloned().fold(0.0, f64::max);
        vanishes && vals.windows(2).all(|w| w[1] > w[0])
    }

    pub fn generate_spectrum(&self, n: usize, mode: SamplingMode) -> Result<SpectrumSample> {
        if n < 2 {
            return Err(Error::invalid(format!("need at least 2 eigenvalues, got {n}")));
        }
        if (self.mass - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(format!("sampling needs a probability measure, mass is {}", self.mass)));
        }
        let nf = n as f64;
        let offset = match mode {
            SamplingMode::Equality => 0.0,
            SamplingMode::UpperQuantile { offset } => {
                if !(0.0..1.0).contains(&offset) {
                    return Err(Error::invalid(format!("quantile offset must lie in [0, 1), got {offset}")));
                }
                offset
            }
        };
        let lambdas = (1..=n)
            .map(|j| {
                if j == n {
                    return Ok(self.b());
                }
                self.quantile(((j as f64 + offset) / nf).min(1.0))
            })
            .collect::<Result<Vec<f64>>>()?;
        SpectrumSample::new(lambdas)
    }
}
