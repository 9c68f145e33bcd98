//! Conjugate gradients on diagonal systems and reference values for E_n.

mod oracles;
mod outliers;

pub use oracles::{levelled_error, minimax_discrete_oracle, weighted_error_oracle, weighted_error_oracle_in};
pub use outliers::{en_with_outliers_certificate, outlier_problem, OutlierCertificate};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{bits_for_digits, BigFloat, Scalar};
use crate::spectral::SpectrumSample;

pub const DEFAULT_DIGITS: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Precision {
    Double,
    Extended { digits: u32 },
}

impl Default for Precision {
    fn default() -> Self {
        Precision::Extended { digits: DEFAULT_DIGITS }
    }
}

impl std::fmt::Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Precision::Double => write!(f, "double"),
            Precision::Extended { digits } => write!(f, "extended({digits})"),
        }
    }
}

/// A = diag(λ), right-hand side c, start vector x0.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSystem {
    eigenvalues: SpectrumSample,
    rhs: Vec<f64>,
    x0: Vec<f64>,
}

impl DiagonalSystem {
    /// c = (1, …, 1), x0 = 0.
    pub fn new(eigenvalues: SpectrumSample) -> Result<Self> {
        let n = eigenvalues.len();
        Self::with_data(eigenvalues, vec![1.0; n], vec![0.0; n])
    }

    pub fn with_data(eigenvalues: SpectrumSample, rhs: Vec<f64>, x0: Vec<f64>) -> Result<Self> {
        if eigenvalues.eigenvalues()[0] <= 0.0 {
            return Err(Error::invalid("diagonal system must be positive definite"));
        }
        if rhs.len() != eigenvalues.len() || x0.len() != eigenvalues.len() {
            return Err(Error::invalid("rhs and start vector must match the dimension"));
        }
        if rhs.iter().chain(&x0).any(|v| !v.is_finite()) {
            return Err(Error::invalid("rhs and start vector must be finite"));
        }
        Ok(Self { eigenvalues, rhs, x0 })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        self.eigenvalues.eigenvalues()
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }
}

/// Relative energy norm errors e_0 = 1, e_1, …, e_{n_max}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorCurve {
    pub values: Vec<f64>,
    pub precision: Precision,
    /// First step at which the residual vanished exactly; later entries are 0.
    pub converged_at: Option<usize>,
}

impl ErrorCurve {
    pub fn get(&self, n: usize) -> Option<f64> {
        self.values.get(n).copied()
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }
}

pub fn run_cg(sys: &DiagonalSystem, n_max: usize, precision: Precision) -> Result<ErrorCurve> {
    match precision {
        Precision::Double => run_cg_in::<f64>(sys, n_max, 53, precision),
        Precision::Extended { digits } => {
            if digits < 16 {
                return Err(Error::invalid(format!("extended precision needs at least 16 digits, got {digits}")));
            }
            run_cg_in::<BigFloat>(sys, n_max, bits_for_digits(digits), precision)
        }
    }
}

fn dot<S: Scalar>(u: &[S], v: &[S], zero: &S) -> S {
    u.iter().zip(v).fold(zero.clone(), |acc, (a, b)| acc.plus(&a.times(b)))
}

fn run_cg_in<S: Scalar>(sys: &DiagonalSystem, n_max: usize, bits: usize, precision: Precision) -> Result<ErrorCurve> {
    let dim = sys.dim();
    if n_max > dim {
        return Err(Error::invalid(format!("n_max = {n_max} exceeds the dimension {dim}")));
    }
    let lift = |v: f64| S::lift(v, bits);
    let zero = lift(0.0);
    let lam: Vec<S> = sys.eigenvalues().iter().map(|&v| lift(v)).collect();
    let c: Vec<S> = sys.rhs.iter().map(|&v| lift(v)).collect();
    let exact: Vec<S> = c.iter().zip(&lam).map(|(ci, li)| ci.over(li)).collect();
    let mut x: Vec<S> = sys.x0.iter().map(|&v| lift(v)).collect();

    let energy = |x: &[S]| -> S {
        x.iter().zip(&exact).zip(&lam).fold(zero.clone(), |acc, ((xi, ei), li)| {
            let d = xi.minus(ei);
            acc.plus(&li.times(&d.times(&d)))
        })
    };
    let e0 = energy(&x);
    if e0.is_zero() {
        return Err(Error::invalid("start vector already solves the system"));
    }

    let mut r: Vec<S> = c.iter().zip(&lam).zip(&x).map(|((ci, li), xi)| ci.minus(&li.times(xi))).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r, &zero);
    let mut values = Vec::with_capacity(n_max + 1);
    values.push(1.0);
    let mut converged_at = None;
    for n in 1..=n_max {
        if rr.is_zero() {
            converged_at = Some(n - 1);
            values.resize(n_max + 1, 0.0);
            break;
        }
        let ap: Vec<S> = lam.iter().zip(&p).map(|(li, pi)| li.times(pi)).collect();
        let pap = dot(&p, &ap, &zero);
        if pap.is_zero() {
            converged_at = Some(n - 1);
            values.resize(n_max + 1, 0.0);
            break;
        }
        let alpha = rr.over(&pap);
        for i in 0..dim {
            x[i] = x[i].plus(&alpha.times(&p[i]));
            r[i] = r[i].minus(&alpha.times(&ap[i]));
        }
        let rr_new = dot(&r, &r, &zero);
        let beta = rr_new.over(&rr);
        for i in 0..dim {
            p[i] = r[i].plus(&beta.times(&p[i]));
        }
        rr = rr_new;
        values.push(energy(&x).over(&e0).root().to_f64());
    }
    Ok(ErrorCurve { values, precision, converged_at })
}
