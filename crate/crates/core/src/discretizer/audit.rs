use std::f64::consts::PI;

use serde::Serialize;

use super::certificate::DiscretizationCertificate;
use super::{C1, C2, C5};
use crate::error::{Error, Result};

/// Outcome of one inequality family over all its instances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditEntry {
    pub name: String,
    pub statement: String,
    pub checks: usize,
    pub pass: bool,
    /// Smallest slack over all instances; negative means violated.
    pub worst_margin: f64,
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub k: usize,
    pub density: String,
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> Vec<&AuditEntry> {
        self.entries.iter().filter(|e| !e.pass).collect()
    }

    pub fn entry(&self, name: &str) -> Option<&AuditEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Turn a failed audit into an error.
    pub fn into_result(self) -> Result<Self> {
        if self.all_pass() {
            Ok(self)
        } else {
            let names: Vec<String> =
                self.failures().iter().map(|e| format!("{} (margin {:e} at {})", e.name, e.worst_margin, e.location)).collect();
            Err(Error::Violation(format!("partition audit failed for k = {}: {}", self.k, names.join("; "))))
        }
    }
}

struct Family {
    name: &'static str,
    statement: &'static str,
    checks: usize,
    worst: f64,
    location: String,
    ok: bool,
}

impl Family {
    fn new(name: &'static str, statement: &'static str) -> Self {
        Self { name, statement, checks: 0, worst: f64::INFINITY, location: String::new(), ok: true }
    }

    /// Record `value <= bound`.
    fn le(&mut self, value: f64, bound: f64, loc: impl FnOnce() -> String) {
        self.record(bound - value, bound, loc);
    }

    /// Record `value >= bound`.
    fn ge(&mut self, value: f64, bound: f64, loc: impl FnOnce() -> String) {
        self.record(value - bound, bound, loc);
    }

    fn record(&mut self, margin: f64, bound: f64, loc: impl FnOnce() -> String) {
        self.checks += 1;
        // slack for quadrature and root-finding noise; several inequalities are tight
        let tol = 1e-10 * bound.abs().max(1.0);
        if !(margin >= -tol) {
            self.ok = false;
        }
        if margin < self.worst || margin.is_nan() {
            self.worst = margin;
            self.location = loc();
        }
    }

    fn finish(self) -> AuditEntry {
        AuditEntry {
            name: self.name.to_string(),
            statement: self.statement.to_string(),
            checks: self.checks,
            pass: self.ok,
            worst_margin: self.worst,
            location: self.location,
        }
    }
}

/// Check the structural inequalities that the partition of an admissible
/// density must satisfy. Computed in [−1, 1] units.
pub fn audit_partition(c: &DiscretizationCertificate) -> AuditReport {
    let k = c.k();
    let kf = k as f64;
    let al = c.angles();
    let gap = |j: usize| al[j + 1] - al[j];
    // 1 + t_j and 1 − t_j without cancellation
    let one_plus = |j: usize| 2.0 * (0.5 * al[j]).sin().powi(2);
    let one_minus = |j: usize| 2.0 * (0.5 * al[j]).cos().powi(2);
    let d = c.density();
    let mut out = Vec::new();

    let mut f = Family::new("alpha_gaps_decreasing", "alpha_{j+2} - alpha_{j+1} <= alpha_{j+1} - alpha_j");
    for j in 0..k.saturating_sub(2) {
        f.le(gap(j + 1), gap(j), || format!("j={j}"));
    }
    out.push(f.finish());

    let mut f = Family::new("alpha_gap_over_alpha", "(alpha_{j+1} - alpha_j) / alpha_j <= 1/j, j >= 1");
    for j in 1..k {
        f.le(gap(j) / al[j], 1.0 / j as f64, || format!("j={j}"));
    }
    out.push(f.finish());

    let mut f = Family::new("alpha_gap_over_next_alpha", "(alpha_{j+1} - alpha_j) / alpha_{j+1} <= 1/(j+1)");
    for j in 0..k {
        f.le(gap(j) / al[j + 1], 1.0 / (j + 1) as f64, || format!("j={j}"));
    }
    out.push(f.finish());

    let mut f = Family::new("tail_angle_ratio", "(alpha_k - alpha_j) / (alpha_k - alpha_{j+1}) <= 4");
    for j in 0..k - 1 {
        f.le((al[k] - al[j]) / (al[k] - al[j + 1]), 4.0, || format!("j={j}"));
    }
    out.push(f.finish());

    let mut f = Family::new("left_cell_growth", "1 + (t_j + t_{j+1})/2 <= c5 (1 + t_j), j >= 1");
    for j in 1..k {
        f.le(0.5 * (one_plus(j) + one_plus(j + 1)), C5 * one_plus(j), || format!("j={j}"));
    }
    out.push(f.finish());

    let mut f = Family::new("right_cell_growth", "1 - (t_j + t_{j+1})/2 <= 9 (1 - t_{j+1}), j <= k-2");
    for j in 0..k - 1 {
        f.le(0.5 * (one_minus(j) + one_minus(j + 1)), 9.0 * one_minus(j + 1), || format!("j={j}"));
    }
    out.push(f.finish());

    let mut f = Family::new(
        "left_ratio_quadratic",
        "(1 + (t_{j+1} + t_j0)/2) / (1 + t_{j+1}) <= pi^2/8 j0^2/(j+1)^2, j <= j0-1 <= k-2",
    );
    for j0 in 1..k {
        for j in 0..j0 {
            let lhs = 0.5 * (one_plus(j + 1) + one_plus(j0)) / one_plus(j + 1);
            let r = j0 as f64 / (j + 1) as f64;
            f.le(lhs, PI * PI / 8.0 * r * r, || format!("j={j}, j0={j0}"));
        }
    }
    out.push(f.finish());

    let mut f = Family::new("cell_ratio_lower", "(t_{j+1} - t_j) / (t_{j+2} - t_{j+1}) >= 2/(3 pi)");
    let mut g = Family::new("cell_ratio_upper", "(t_{j+1} - t_j) / (t_{j+2} - t_{j+1}) <= 6 c2 sqrt(c5) / c1");
    for j in 0..k - 1 {
        let ratio = c.cell_width_unit(j) / c.cell_width_unit(j + 1);
        f.ge(ratio, 2.0 / (3.0 * PI), || format!("j={j}"));
        g.le(ratio, 6.0 * C2 * C5.sqrt() / C1, || format!("j={j}"));
    }
    out.push(f.finish());
    out.push(g.finish());

    let t1 = c.partition_unit()[1];
    let mut f = Family::new("first_cell_root", "k sqrt(t_1 - t_0) <= 3 pi / (sqrt 2 g(t_1))");
    f.le(kf * one_plus(1).sqrt(), 3.0 * PI / (2f64.sqrt() * d.eval_unit(t1)), || "j=0".into());
    out.push(f.finish());

    let mut f = Family::new("last_cell_root", "k sqrt(t_k - t_{k-1}) <= pi / g(1)");
    f.le(kf * one_minus(k - 1).sqrt(), PI / d.eval_unit(1.0), || format!("j={}", k - 1));
    out.push(f.finish());

    let mut f = Family::new("max_cell", "t_{j+1} - t_j <= (12 pi / k)^(1/3)");
    let bound = (12.0 * PI / kf).cbrt();
    for j in 0..k {
        f.le(c.cell_width_unit(j), bound, || format!("j={j}"));
    }
    out.push(f.finish());

    let mut f = Family::new("penultimate_point_nonnegative", "t_{k-1} >= 0");
    f.ge(c.partition_unit()[k - 1], 0.0, || format!("j={}", k - 1));
    out.push(f.finish());

    let mut f = Family::new("density_at_right_end", "g(1) <= 2");
    f.le(d.eval_unit(1.0), 2.0, || "s=1".into());
    out.push(f.finish());

    let mut f = Family::new("density_at_center", "g(0) >= 1");
    f.ge(d.eval_unit(0.0), 1.0, || "s=0".into());
    out.push(f.finish());

    AuditReport { k, density: d.kind().to_string(), entries: out }
}
