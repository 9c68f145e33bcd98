//! Curve tables: bounds, CG errors and the figure layouts built from both.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use logpot::bounds::{
    envelope, integral_bound_curve, log_cond_number_bound, outlier_curve, thsuper_curve, BoundCurve,
};
use logpot::cg::{run_cg, weighted_error_oracle, DiagonalSystem, ErrorCurve, Precision};

use crate::config::{ExperimentConfig, Format};
use crate::error::CliError;
use crate::families::{precision, spectrum, Spectrum};
use crate::output::{emit, Cell, Table};

const DEFAULT_D_MAX: usize = 40;
/// Largest dimension for which the oracle column is added.
const ORACLE_MAX_N: usize = 200;

fn exp_cell(log: Option<f64>) -> Cell {
    Cell::from(log.map(f64::exp))
}

fn curve_cell(c: &BoundCurve, n: usize) -> Cell {
    exp_cell(c.get(n).map(|r| r.log_value))
}

fn n_range(cfg: &ExperimentConfig, big_n: usize) -> Result<Vec<usize>, CliError> {
    let n_max = cfg.n_max.unwrap_or(big_n);
    if n_max > big_n {
        return Err(CliError::Validation(format!("n_max = {n_max} exceeds N = {big_n}")));
    }
    Ok((0..=n_max).collect())
}

/// Bound columns for every n, with an optional CG error column in front.
fn bound_table(sp: &Spectrum, cfg: &ExperimentConfig, ds: &[usize], cg: Option<&ErrorCurve>) -> Result<Table, CliError> {
    let c = cfg.offset()?;
    let l = sp.sample.eigenvalues();
    let big_n = l.len();
    let (lo, b) = (l[0], l[big_n - 1]);
    let ns = n_range(cfg, big_n)?;
    let d_max = cfg.d_max.unwrap_or(DEFAULT_D_MAX);
    if let Some(d) = ds.iter().find(|&&d| d >= big_n) {
        return Err(CliError::Validation(format!("d = {d} needs more than {big_n} eigenvalues")));
    }

    let outliers = ds
        .par_iter()
        .map(|&d| outlier_curve(l, d, &ns, b, c))
        .collect::<Result<Vec<_>, _>>()?;
    let env = envelope(l, &ns, b, c, d_max)?;
    let (ths, integral) = match &sp.density {
        Some(s) => {
            let th = thsuper_curve(s, l, &ns, c)?;
            let feasible: Vec<usize> = ns.iter().copied().filter(|&n| (n as f64) / (big_n as f64) < s.mass()).collect();
            let ib = integral_bound_curve(s, big_n, &feasible, c)?;
            (Some(th), Some(ib))
        }
        None => (None, None),
    };

    let mut cols = vec!["n".to_string()];
    if cg.is_some() {
        cols.push("cg_error".into());
    }
    cols.extend(["cond_bound", "integral_bound", "integral_product"].map(String::from));
    cols.extend(ds.iter().map(|d| format!("outlier_bound_d{d}")));
    cols.extend(["envelope", "envelope_d", "thsuper_bound", "d_used"].map(String::from));
    let mut t = Table::new(cols);
    for &n in &ns {
        let mut row = vec![Cell::Int(n as i64)];
        if let Some(e) = cg {
            row.push(Cell::from(e.get(n)));
        }
        let cond = if lo < b { log_cond_number_bound(lo, b, n).ok() } else { None };
        row.push(exp_cell(cond));
        let ib = integral.as_ref().and_then(|v| v.iter().find(|r| r.n == n));
        row.push(exp_cell(ib.map(|r| r.log_value)));
        row.push(exp_cell(ib.map(|r| r.log_product)));
        for oc in &outliers {
            row.push(curve_cell(oc, n));
        }
        let er = env.get(n);
        row.push(exp_cell(er.map(|r| r.log_value)));
        row.push(er.map_or(Cell::Empty, |r| Cell::Int(r.d as i64)));
        let tr = ths.as_ref().and_then(|c| c.get(n));
        row.push(exp_cell(tr.map(|r| r.log_value)));
        row.push(tr.map_or(Cell::Empty, |r| Cell::Int(r.d as i64)));
        t.push(row);
    }
    Ok(t)
}

fn cg_curve(sp: &Spectrum, cfg: &ExperimentConfig, prec: Precision) -> Result<ErrorCurve, CliError> {
    let big_n = sp.sample.len();
    let n_max = cfg.n_max.unwrap_or(big_n);
    if n_max > big_n {
        return Err(CliError::Validation(format!("n_max = {n_max} exceeds N = {big_n}")));
    }
    let sys = DiagonalSystem::new(sp.sample.clone())?;
    Ok(run_cg(&sys, n_max, prec)?)
}

fn write_table(t: &Table, out: Option<&Path>, format: Format) -> Result<(), CliError> {
    emit(out, |w| t.write(w, format))
}

pub fn run_bounds(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let sp = spectrum(cfg, "example11")?;
    let ds = cfg.d.clone().unwrap_or_default();
    let t = bound_table(&sp, cfg, &ds, None)?;
    write_table(&t, cfg.out.as_deref(), cfg.format_or(Format::Csv))
}

pub fn run_cg_command(cfg: &ExperimentConfig, compare_double: bool) -> Result<(), CliError> {
    let sp = spectrum(cfg, "example11")?;
    let prec = precision(cfg)?;
    let curve = cg_curve(&sp, cfg, prec)?;
    let l = sp.sample.eigenvalues();
    let with_oracle = l.len() <= ORACLE_MAX_N;
    let double = if compare_double && prec != Precision::Double {
        Some(cg_curve(&sp, cfg, Precision::Double)?)
    } else {
        None
    };
    let mut cols = vec!["n".to_string(), "e_n".to_string()];
    if with_oracle {
        cols.push("oracle".into());
    }
    if double.is_some() {
        cols.push("e_n_double".into());
    }
    let oracle: Vec<Option<f64>> = if with_oracle {
        (0..curve.values.len())
            .into_par_iter()
            .map(|n| weighted_error_oracle(l, n).map(Some))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        Vec::new()
    };
    let mut t = Table::new(cols);
    for (n, &e) in curve.values.iter().enumerate() {
        let mut row = vec![Cell::Int(n as i64), Cell::Float(e)];
        if with_oracle {
            row.push(Cell::from(oracle[n]));
        }
        if let Some(d) = &double {
            row.push(Cell::from(d.get(n)));
        }
        t.push(row);
    }
    if let Some(d) = &double {
        let split = curve
            .values
            .iter()
            .zip(&d.values)
            .position(|(x, y)| (x - y).abs() > 1e-6 * x.abs().max(f64::MIN_POSITIVE));
        match split {
            Some(n) => eprintln!(
                "double precision departs from {prec} by more than 1e-6 (relative) at n = {n}, e_n = {:e}",
                curve.values[n]
            ),
            None => eprintln!("double precision agrees with {prec} to 1e-6 (relative) on all steps"),
        }
    }
    write_table(&t, cfg.out.as_deref(), cfg.format_or(Format::Csv))
}

/// Figure layouts: 1 is Example 11 with the condition number and integral
/// bounds, 2 adds the per-d lines and their envelope, 3 is Example 12 for
/// two exponents.
pub fn run_figure(cfg: &ExperimentConfig, which: u8) -> Result<(), CliError> {
    let format = cfg.format_or(Format::Csv);
    let prec = precision(cfg)?;
    let variants: Vec<(ExperimentConfig, Vec<usize>, String)> = match which {
        1 | 2 => {
            let mut c = cfg.clone();
            c.family = Some(c.family.clone().unwrap_or_else(|| "example11".into()));
            let ds = if which == 2 { cfg.d.clone().unwrap_or_else(|| vec![0, 1, 2, 5, 10, 15]) } else { cfg.d.clone().unwrap_or_default() };
            vec![(c, ds, format!("figure{which}"))]
        }
        3 => {
            let betas = match cfg.beta {
                Some(b) => vec![b],
                None => vec![0.5, 1.0],
            };
            betas
                .into_iter()
                .map(|beta| {
                    let mut c = cfg.clone();
                    c.family = Some("example12".into());
                    c.beta = Some(beta);
                    (c, cfg.d.clone().unwrap_or_default(), format!("figure3_beta{beta}"))
                })
                .collect()
        }
        other => return Err(CliError::Validation(format!("figure must be 1, 2 or 3, got {other}"))),
    };
    if variants.len() > 1 && cfg.out.is_none() {
        return Err(CliError::Validation("figure 3 writes one table per beta; pass --out DIR or a single --beta".into()));
    }
    for (c, ds, stem) in &variants {
        let sp = spectrum(c, "example11")?;
        let curve = cg_curve(&sp, c, prec)?;
        let t = bound_table(&sp, c, ds, Some(&curve))?;
        let path: Option<PathBuf> = cfg.out.as_ref().map(|dir| {
            let ext = match format {
                Format::Csv => "csv",
                Format::Json => "json",
            };
            dir.join(format!("{stem}.{ext}"))
        });
        write_table(&t, path.as_deref(), format)?;
        if let Some(p) = &path {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(())
}
