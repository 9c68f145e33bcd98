//! Parsing of density and spectrum family names.

use logpot::cg::DEFAULT_DIGITS;
use logpot::cg::Precision;
use logpot::density::ArcsineWeightedDensity;
use logpot::equilibrium::{AtomicMeasure, EquilibriumSolution, ExternalFieldProblem};
use logpot::interval::Interval;
use logpot::spectral::{SamplingMode, SpectralDensity, SpectrumSample};

use crate::config::{ExperimentConfig, PrecisionKind};
use crate::error::CliError;

fn param(spec: &str, name: &str) -> Result<f64, CliError> {
    spec.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Validation(format!("{name} parameter must be a number, got {spec:?}")))
}

/// A discretization density on [-1, 1], or the equilibrium density of the
/// configured external field problem with k as its degree.
pub fn density_for(spec: &str, k: usize, cfg: &ExperimentConfig) -> Result<ArcsineWeightedDensity, CliError> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    let unit = Interval::unit();
    let d = match (name, arg) {
        ("chebyshev", None) => ArcsineWeightedDensity::chebyshev(unit),
        ("example3", Some(a)) => ArcsineWeightedDensity::example3(unit, param(a, "example3")?)?,
        ("linear", Some(a)) => ArcsineWeightedDensity::linear(unit, param(a, "linear")?)?,
        ("equilibrium", None) => {
            let atoms = cfg.atoms.clone().unwrap_or_else(|| vec![0.0]);
            let alpha = cfg.alpha.unwrap_or(0.1);
            let b = cfg.b.unwrap_or(1.0);
            let p = ExternalFieldProblem::new(k, AtomicMeasure::counting(&atoms)?, Interval::new(alpha, b)?)?;
            EquilibriumSolution::solve(&p)?.density().clone()
        }
        _ => {
            return Err(CliError::Validation(format!(
                "unknown density family {spec:?}; expected chebyshev, example3:<theta>, linear:<slope> or equilibrium"
            )))
        }
    };
    let adm = d.admissibility();
    if !adm.all() {
        return Err(CliError::Validation(format!(
            "density {spec} is not admissible: fails {}",
            adm.failures().join(", ")
        )));
    }
    Ok(d)
}

pub fn density_specs(cfg: &ExperimentConfig) -> Vec<String> {
    match (&cfg.densities, &cfg.family) {
        (Some(v), _) if !v.is_empty() => v.clone(),
        (_, Some(f)) => vec![f.clone()],
        _ => vec!["chebyshev".to_string()],
    }
}

pub fn degrees(cfg: &ExperimentConfig, default: &[usize]) -> Result<Vec<usize>, CliError> {
    let ks = cfg.k.clone().unwrap_or_else(|| default.to_vec());
    if ks.is_empty() {
        return Err(CliError::Validation("need at least one k".into()));
    }
    if let Some(k) = ks.iter().find(|&&k| k < 2) {
        return Err(CliError::Validation(format!("k must be at least 2, got {k}")));
    }
    Ok(ks)
}

/// Spectrum family with its equal-mass sample; `density` is absent for an
/// explicit eigenvalue list.
pub struct Spectrum {
    pub density: Option<SpectralDensity>,
    pub sample: SpectrumSample,
}

pub fn spectral_density(family: &str, cfg: &ExperimentConfig) -> Result<SpectralDensity, CliError> {
    match family {
        "example11" => {
            if cfg.b.is_some_and(|b| b != 1.0) {
                return Err(CliError::Validation("example11 lives on [0, 1]; use example12 with beta = 0 to rescale".into()));
            }
            Ok(SpectralDensity::example11())
        }
        "example12" => Ok(SpectralDensity::example12(cfg.beta.unwrap_or(0.5), cfg.b.unwrap_or(1.0))?),
        other => Err(CliError::Validation(format!(
            "unknown spectrum family {other:?}; expected example11, example12 or custom"
        ))),
    }
}

pub fn spectrum(cfg: &ExperimentConfig, default_family: &str) -> Result<Spectrum, CliError> {
    let family = cfg.family.clone().unwrap_or_else(|| default_family.to_string());
    if family == "custom" {
        let mut l = cfg
            .eigenvalues
            .clone()
            .ok_or_else(|| CliError::Validation("custom spectrum needs an eigenvalues list in the config".into()))?;
        l.sort_by(|a, b| a.total_cmp(b));
        let sample = SpectrumSample::new(l)?;
        return Ok(Spectrum { density: None, sample });
    }
    let big_n = cfg.big_n.unwrap_or(1000);
    let s = spectral_density(&family, cfg)?;
    let sample = s.generate_spectrum(big_n, SamplingMode::Equality)?;
    Ok(Spectrum { density: Some(s), sample })
}

pub fn precision(cfg: &ExperimentConfig) -> Result<Precision, CliError> {
    match (cfg.precision, cfg.digits) {
        (Some(PrecisionKind::Double), Some(_)) => {
            Err(CliError::Validation("digits only apply to extended precision".into()))
        }
        (Some(PrecisionKind::Double), None) => Ok(Precision::Double),
        (_, digits) => {
            let digits = digits.unwrap_or(DEFAULT_DIGITS);
            if digits < 16 {
                return Err(CliError::Validation(format!("digits must be at least 16, got {digits}")));
            }
            Ok(Precision::Extended { digits })
        }
    }
}
