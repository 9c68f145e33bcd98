//! Partition, nodes and error grid of one discretized density.

use rayon::prelude::*;
use serde::Serialize;

use logpot::discretizer::{audit_partition, build_partition, DiscretizationCertificate};

use super::{exterior_grid, interior_grid};
use crate::config::{ExperimentConfig, Format};
use crate::error::CliError;
use crate::families::{degrees, density_for, density_specs};
use crate::output::{emit, write_json, Cell, Table};

#[derive(Debug, Clone, Serialize)]
pub struct DiscretizeSummary {
    pub density: String,
    pub k: usize,
    pub interval: [f64; 2],
    pub grid: usize,
    /// sup over the interior grid of log|P_k| + k U^μ
    pub sup_error_interior: f64,
    /// min over the exterior grid and the partition points
    pub min_error_exterior: f64,
    pub sigma1_max: f64,
    pub sigma2_max: f64,
    pub sigma3_max: f64,
    pub sigma_total_max: f64,
    pub audit_pass: bool,
}

struct Output {
    summary: DiscretizeSummary,
    partition: Table,
    errors: Table,
}

fn build(spec: &str, k: usize, cfg: &ExperimentConfig, grid: usize) -> Result<Output, CliError> {
    let d = density_for(spec, k, cfg)?;
    let c: DiscretizationCertificate = build_partition(&d, k)?;
    let iv = c.interval();

    let mut partition = Table::new(vec!["j".into(), "t_j".into(), "xi_j".into()]);
    let (ts, xis) = (c.partition(), c.nodes());
    for (j, t) in ts.iter().enumerate() {
        partition.push(vec![Cell::Int(j as i64), Cell::Float(*t), Cell::from(xis.get(j).copied())]);
    }

    let interior = interior_grid(&c, grid);
    let exterior = {
        let mut xs = exterior_grid(iv, grid / 2);
        xs.extend(c.partition());
        xs.sort_by(|a, b| a.total_cmp(b));
        xs
    };
    let interior_rows = interior
        .par_iter()
        .map(|&x| {
            let s = c.three_sums(x)?;
            // the error is −∞ at the nodes; those rows stay empty
            let e = c.discretization_error(x).ok();
            Ok::<_, logpot::Error>((x, e, s))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let exterior_rows = exterior
        .par_iter()
        .map(|&x| c.discretization_error(x).map(|e| (x, e)))
        .collect::<Result<Vec<_>, _>>()?;

    let mut errors = Table::new(
        ["x", "region", "error", "sigma1", "sigma2", "sigma3"].iter().map(|s| s.to_string()).collect(),
    );
    let mut sup = f64::NEG_INFINITY;
    let mut sig = [0.0f64; 4];
    let mut all: Vec<(f64, i64, Option<f64>, Option<[f64; 3]>)> = Vec::new();
    for (x, e, s) in &interior_rows {
        if let Some(e) = e {
            sup = sup.max(*e);
        }
        for (slot, v) in sig.iter_mut().zip([s.sigma1, s.sigma2, s.sigma3, s.total()]) {
            *slot = slot.max(v);
        }
        all.push((*x, 0, *e, Some([s.sigma1, s.sigma2, s.sigma3])));
    }
    let mut min_ext = f64::INFINITY;
    for (x, e) in &exterior_rows {
        min_ext = min_ext.min(*e);
        if !iv.contains_open(*x) {
            all.push((*x, 1, Some(*e), None));
        }
    }
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for (x, region, e, s) in all {
        let label = if region == 0 { "interior" } else { "exterior" };
        let mut row = vec![Cell::Float(x), Cell::Label(label), Cell::from(e)];
        match s {
            Some(v) => row.extend(v.map(Cell::Float)),
            None => row.extend([Cell::Empty; 3]),
        }
        errors.push(row);
    }

    let summary = DiscretizeSummary {
        density: spec.to_string(),
        k,
        interval: [iv.a(), iv.b()],
        grid,
        sup_error_interior: sup,
        min_error_exterior: min_ext,
        sigma1_max: sig[0],
        sigma2_max: sig[1],
        sigma3_max: sig[2],
        sigma_total_max: sig[3],
        audit_pass: audit_partition(&c).all_pass(),
    };
    Ok(Output { summary, partition, errors })
}

pub fn run(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let specs = density_specs(cfg);
    let ks = degrees(cfg, &[16])?;
    let grid = cfg.grid.unwrap_or(400);
    if grid < 4 {
        return Err(CliError::Validation(format!("grid must be at least 4, got {grid}")));
    }
    let format = cfg.format_or(Format::Csv);
    let single = specs.len() == 1 && ks.len() == 1;
    let mut summaries = Vec::new();
    for spec in &specs {
        for &k in &ks {
            let out = build(spec, k, cfg, grid)?;
            if let Some(dir) = &cfg.out {
                let stem = if single { String::new() } else { format!("{}_k{k}_", spec.replace(':', "_")) };
                let ext = if format == Format::Json { "json" } else { "csv" };
                emit(Some(&dir.join(format!("{stem}partition.{ext}"))), |w| out.partition.write(w, format))?;
                emit(Some(&dir.join(format!("{stem}error_grid.{ext}"))), |w| out.errors.write(w, format))?;
                emit(Some(&dir.join(format!("{stem}summary.json"))), |w| write_json(w, &out.summary))?;
            }
            summaries.push(out.summary);
        }
    }
    if cfg.out.is_none() {
        emit(None, |w| if single { write_json(w, &summaries[0]) } else { write_json(w, &summaries) })?;
    }
    Ok(())
}
