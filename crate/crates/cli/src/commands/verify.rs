//! Sweep of the discretization constants over density families and degrees.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use logpot::discretizer::{
    audit_partition, build_partition, mean_value_check, C1, C2, C3, SIGMA1_MAX, SIGMA2_MAX, SIGMA3_MAX,
};
use logpot::C_BW;

use super::{exterior_grid, interior_grid};
use crate::config::{ExperimentConfig, Format};
use crate::error::CliError;
use crate::families::{degrees, density_for, density_specs};
use crate::output::{emit, write_json, Cell};

/// Slack below which the exterior discretization error counts as negative.
const EXTERIOR_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CheckResult {
    pub pass: bool,
    pub worst_margin: f64,
    pub location: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub densities: Vec<String>,
    pub k: Vec<usize>,
    pub all_pass: bool,
    pub checks: BTreeMap<String, CheckResult>,
}

#[derive(Default)]
struct Collector(BTreeMap<String, CheckResult>);

impl Collector {
    fn add(&mut self, name: &str, pass: bool, margin: f64, location: String) {
        let e = self.0.entry(name.to_string()).or_insert(CheckResult {
            pass: true,
            worst_margin: f64::INFINITY,
            location: String::new(),
        });
        e.pass &= pass;
        if margin < e.worst_margin {
            e.worst_margin = margin;
            e.location = location;
        }
    }

    fn margin(&mut self, name: &str, margin: f64, location: String) {
        self.add(name, margin >= 0.0, margin, location);
    }
}

struct Sweep {
    exterior_min: (f64, f64),
    sums: [(f64, f64); 4],
    audit: logpot::discretizer::AuditReport,
}

fn sweep_one(spec: &str, k: usize, cfg: &ExperimentConfig, grid: usize) -> Result<Sweep, CliError> {
    let d = density_for(spec, k, cfg)?;
    let c = build_partition(&d, k)?;
    let mut xs = exterior_grid(c.interval(), grid / 2);
    xs.extend(c.partition());
    let mut exterior_min = (f64::INFINITY, f64::NAN);
    for x in xs {
        let e = c.discretization_error(x)?;
        if e < exterior_min.0 {
            exterior_min = (e, x);
        }
    }
    let mut sums = [(0.0f64, f64::NAN); 4];
    for x in interior_grid(&c, grid) {
        let s = c.three_sums(x)?;
        for (slot, v) in sums.iter_mut().zip([s.sigma1, s.sigma2, s.sigma3, s.total()]) {
            if v > slot.0 {
                *slot = (v, x);
            }
        }
    }
    Ok(Sweep { exterior_min, sums, audit: audit_partition(&c) })
}

pub fn run(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let specs = density_specs(cfg);
    let ks = degrees(cfg, &[2, 4, 8, 16, 32])?;
    let grid = cfg.grid.unwrap_or(200);
    let pairs = cfg.pairs.unwrap_or(2000);
    if grid < 4 {
        return Err(CliError::Validation(format!("grid must be at least 4, got {grid}")));
    }
    // fail fast on inadmissible densities before any sweep
    for spec in &specs {
        density_for(spec, ks[0], cfg)?;
    }

    let jobs: Vec<(String, usize)> = specs.iter().flat_map(|s| ks.iter().map(move |&k| (s.clone(), k))).collect();
    let sweeps = jobs
        .par_iter()
        .map(|(s, k)| sweep_one(s, *k, cfg, grid))
        .collect::<Result<Vec<_>, _>>()?;

    let mut col = Collector::default();
    for ((spec, k), sw) in jobs.iter().zip(&sweeps) {
        let at = |x: f64| format!("{spec} k={k} x={x:e}");
        col.margin("discretization_error_exterior", sw.exterior_min.0 + EXTERIOR_TOL, at(sw.exterior_min.1));
        let limits = [("sigma1", SIGMA1_MAX), ("sigma2", SIGMA2_MAX), ("sigma3", SIGMA3_MAX), ("sigma_total", C_BW)];
        for ((name, bound), (v, x)) in limits.iter().zip(sw.sums) {
            col.margin(name, bound - v, at(x));
        }
        for e in &sw.audit.entries {
            col.add(&format!("audit.{}", e.name), e.pass, e.worst_margin, format!("{spec} k={k} {}", e.location));
        }
    }

    let seed = cfg.seed.unwrap_or(0);
    for spec in &specs {
        let d = density_for(spec, ks[0], cfg)?;
        let iv = d.interval();
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let pts: Vec<(f64, f64)> = (0..pairs)
            .map(|_| loop {
                let x = rng.random_range(iv.a()..=iv.b());
                let t = rng.random_range(iv.a()..=iv.b());
                if x != t {
                    break (x, t);
                }
            })
            .collect();
        let qs = pts
            .par_iter()
            .map(|&(x, t)| mean_value_check(&d, ks[0], x, t).map(|m| (m.quotient, x, t)))
            .collect::<Result<Vec<_>, _>>()?;
        let at = |x: f64, t: f64| format!("{spec} x={x:e} t={t:e}");
        let chebyshev = spec == "chebyshev";
        for &(q, x, t) in &qs {
            col.margin("mean_value_lower", q - C1 + 1e-12, at(x, t));
            col.margin("mean_value_upper", C2 - q + 1e-12, at(x, t));
            if chebyshev {
                col.margin("mean_value_uniform_lower", q - 1.0 + 1e-12, at(x, t));
                col.margin("mean_value_uniform_upper", C3 - q + 1e-12, at(x, t));
            }
        }
    }

    let all_pass = col.0.values().all(|c| c.pass);
    let report = VerifyReport { densities: specs, k: ks, all_pass, checks: col.0 };
    emit(cfg.out.as_deref(), |w| match cfg.format_or(Format::Json) {
        Format::Json => write_json(w, &report),
        Format::Csv => {
            let mut out = csv::Writer::from_writer(w);
            out.write_record(["check", "pass", "worst_margin", "location"]).map_err(anyhow::Error::from)?;
            for (name, c) in &report.checks {
                let margin = Cell::Float(c.worst_margin).text();
                out.write_record([name.as_str(), if c.pass { "true" } else { "false" }, &margin, &c.location])
                    .map_err(anyhow::Error::from)?;
            }
            out.flush()?;
            Ok(())
        }
    })?;
    if !report.all_pass {
        let failed: Vec<&str> = report.checks.iter().filter(|(_, c)| !c.pass).map(|(n, _)| n.as_str()).collect();
        return Err(CliError::Violation(format!("failed checks: {}", failed.join(", "))));
    }
    Ok(())
}
