use std::f64::consts::PI;

use serde::Serialize;

use crate::density::ArcsineWeightedDensity;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::roots::newton_bisect;

/// Partition t_0 < … < t_k into cells of μ-mass 1/k and the μ-barycenters ξ_j
/// of the cells. Everything is stored in the normalized variable s ∈ [−1, 1]
/// through the angles α_j with t_j = −cos α_j.
#[derive(Debug, Clone)]
pub struct DiscretizationCertificate {
    density: ArcsineWeightedDensity,
    k: usize,
    alpha: Vec<f64>,
    t_unit: Vec<f64>,
    // ξ_j − t_j, kept separately for accuracy in short cells
    xi_offset: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThreeSums {
    pub j0: usize,
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma3: f64,
}

impl ThreeSums {
    pub fn total(&self) -> f64 {
        self.sigma1 + self.sigma2 + self.sigma3
    }
}

fn cell_opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-13, rel_tol: 1e-13, max_cells: 4000 }
}

/// Equal-mass partition and weighted midpoints for `density` with k cells.
pub fn build_partition(density: &ArcsineWeightedDensity, k: usize) -> Result<DiscretizationCertificate> {
    if k < 2 {
        return Err(Error::invalid(format!("need k >= 2 cells, got {k}")));
    }
    let adm = density.admissibility();
    if !adm.all() {
        return Err(Error::invalid(format!("density is not admissible: fails {}", adm.failures().join(", "))));
    }
    let kf = k as f64;
    let mut alpha = Vec::with_capacity(k + 1);
    alpha.push(0.0);
    for j in 1..k {
        let lo = alpha[j - 1];
        let cell_mass = |a: f64| -> Result<(f64, f64)> {
            let r = integrate_with_breaks(|th| density.eval_angle(th), lo, a, &[], cell_opts())?;
            Ok((kf * r.value / PI - 1.0, kf * density.eval_angle(a) / PI))
        };
        let aj = newton_bisect(cell_mass, lo, PI, 1e-15)?;
        alpha.push(aj);
    }
    alpha.push(PI);

    let t_unit: Vec<f64> = alpha.iter().map(|&a| -a.cos()).collect();
    let mut xi_offset = Vec::with_capacity(k);
    for j in 0..k {
        let (aj, aj1) = (alpha[j], alpha[j + 1]);
        // s(φ) − t_j = cos α_j − cos φ = 2 sin((φ+α_j)/2) sin((φ−α_j)/2)
        let r = integrate_with_breaks(
            |ph| 2.0 * (0.5 * (ph + aj)).sin() * (0.5 * (ph - aj)).sin() * density.eval_angle(ph),
            aj,
            aj1,
            &[],
            cell_opts(),
        )?;
        let off = kf * r.value / PI;
        let width = diff_unit(&alpha, j + 1, j);
        if !(off > 0.0 && off < width) {
            return Err(Error::Inconsistent(format!(
                "node {j} falls outside its cell: offset {off:e}, cell width {width:e}"
            )));
        }
        xi_offset.push(off);
    }
    Ok(DiscretizationCertificate { density: density.clone(), k, alpha, t_unit, xi_offset })
}

/// A point of the normalized line stored through its offsets s + 1 and s − 1
/// from the two endpoints, so that distances to points of [−1, 1] near
/// either end keep their relative accuracy.
#[derive(Debug, Clone, Copy)]
struct UnitPoint {
    lo: f64,
    hi: f64,
}

impl UnitPoint {
    fn new(iv: Interval, x: f64) -> Self {
        let w = iv.width();
        Self { lo: 2.0 * (x - iv.a()) / w, hi: 2.0 * (x - iv.b()) / w }
    }

    /// x − s(φ) with s(φ) = −cos φ.
    fn minus_angle(&self, ph: f64) -> f64 {
        if ph < std::f64::consts::FRAC_PI_2 {
            self.lo - 2.0 * (0.5 * ph).sin().powi(2)
        } else {
            self.hi + 2.0 * (0.5 * ph).cos().powi(2)
        }
    }

    /// Angle of a point inside [−1, 1].
    fn angle(&self) -> f64 {
        if self.lo <= 1.0 {
            2.0 * (0.5 * self.lo).clamp(0.0, 1.0).sqrt().asin()
        } else {
            PI - 2.0 * (-0.5 * self.hi).clamp(0.0, 1.0).sqrt().asin()
        }
    }
}

/// t_i − t_j in the normalized variable, from the angles.
fn diff_unit(alpha: &[f64], i: usize, j: usize) -> f64 {
    2.0 * (0.5 * (alpha[i] - alpha[j])).sin() * (0.5 * (alpha[i] + alpha[j])).sin()
}

impl DiscretizationCertificate {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn density(&self) -> &ArcsineWeightedDensity {
        &self.density
    }

    pub fn interval(&self) -> Interval {
        self.density.interval()
    }

    /// Angles α_0 = 0 < … < α_k = π.
    pub fn angles(&self) -> &[f64] {
        &self.alpha
    }

    /// Partition points in [−1, 1].
    pub fn partition_unit(&self) -> &[f64] {
        &self.t_unit
    }

    /// Nodes in [−1, 1].
    pub fn nodes_unit(&self) -> Vec<f64> {
        self.t_unit.iter().zip(&self.xi_offset).map(|(t, o)| t + o).collect()
    }

    /// ξ_j − t_j in [−1, 1] units.
    pub fn node_offsets_unit(&self) -> &[f64] {
        &self.xi_offset
    }

    /// Partition points in the original interval.
    pub fn partition(&self) -> Vec<f64> {
        let iv = self.interval();
        self.alpha.iter().map(|&a| iv.from_angle(a)).collect()
    }

    /// Nodes ξ_j in the original interval.
    pub fn nodes(&self) -> Vec<f64> {
        let iv = self.interval();
        self.alpha[..self.k]
            .iter()
            .zip(&self.xi_offset)
            .map(|(&a, &o)| {
                let t = iv.from_angle(a);
                t + iv.half_width() * o
            })
            .collect()
    }

    /// t_i − t_j in [−1, 1] units.
    pub fn diff_unit(&self, i: usize, j: usize) -> f64 {
        diff_unit(&self.alpha, i, j)
    }

    /// Length of cell j in [−1, 1] units.
    pub fn cell_width_unit(&self, j: usize) -> f64 {
        self.diff_unit(j + 1, j)
    }

    /// log|P_k(x)| = Σ log|x − ξ_j| in the original variable, summed from the
    /// nearest node outwards.
    pub fn log_abs_pk(&self, x: f64) -> Result<f64> {
        let mut terms: Vec<f64> = self.nodes().iter().map(|xi| (x - xi).abs()).collect();
        if terms.iter().any(|&d| d == 0.0) {
            return Err(Error::Singularity(format!("{x} is a node of the certificate polynomial")));
        }
        terms.sort_by(f64::total_cmp);
        Ok(terms.iter().map(|d| d.ln()).sum())
    }

    /// k ∫_{cell j} log|(x − ξ_j)/(x − t)| dμ(t) for x given in [−1, 1] units
    /// (or beyond).
    pub fn cell_error_unit(&self, j: usize, xs: f64) -> Result<f64> {
        self.cell_error_at(j, UnitPoint { lo: xs + 1.0, hi: xs - 1.0 })
    }

    /// Same as [`Self::cell_error_unit`] for x in the original variable.
    pub fn cell_error(&self, j: usize, x: f64) -> Result<f64> {
        self.cell_error_at(j, UnitPoint::new(self.interval(), x))
    }

    fn cell_error_at(&self, j: usize, x: UnitPoint) -> Result<f64> {
        let (aj, aj1) = (self.alpha[j], self.alpha[j + 1]);
        let off = self.xi_offset[j];
        let ds = |ph: f64| 2.0 * (0.5 * (ph + aj)).sin() * (0.5 * (ph - aj)).sin();
        let g = |ph: f64| self.density.eval_angle(ph);
        let to_node = x.minus_angle(aj) - off;
        if to_node == 0.0 {
            return Err(Error::Singularity(format!("x coincides with node {j}")));
        }
        let inside = x.minus_angle(aj) > 0.0 && x.minus_angle(aj1) < 0.0;
        let brk = if inside { vec![x.angle()] } else { vec![] };
        let r = integrate_with_breaks(
            |ph| {
                let den = x.minus_angle(ph);
                if den == 0.0 {
                    return 0.0;
                }
                let r = (ds(ph) - off) / den;
                let l = if r.abs() < 0.5 { r.ln_1p() } else { (to_node / den).abs().ln() };
                l * g(ph)
            },
            aj,
            aj1,
            &brk,
            cell_opts(),
        )?;
        Ok(self.k as f64 * r.value / PI)
    }

    /// log|P_k(x)| + k U^μ(x), evaluated as the sum of cell errors.
    pub fn discretization_error(&self, x: f64) -> Result<f64> {
        let xp = UnitPoint::new(self.interval(), x);
        let mut total = 0.0;
        for j in 0..self.k {
            total += self.cell_error_at(j, xp)?;
        }
        Ok(total)
    }

    /// log|P_k(x)| + k U^μ(x) computed directly from the two terms. Used as
    /// an independent check of [`Self::discretization_error`].
    pub fn discretization_error_direct(&self, x: f64) -> Result<f64> {
        Ok(self.log_abs_pk(x)? + self.k as f64 * self.density.log_potential(x)?)
    }

    /// Cell index j0 with x ∈ [t_j0, t_j0+1]; at a partition point the lower
    /// cell is taken.
    pub fn locate(&self, x: f64) -> usize {
        let k = self.k;
        let t = self.partition();
        (0..k).find(|&j| x <= t[j + 1]).unwrap_or(k - 1)
    }

    /// Split of the error at x ∈ [a, b] into far-left, near and far-right
    /// parts. The two far sums are their quadratic upper bounds; the near sum
    /// is by quadrature.
    pub fn three_sums(&self, x: f64) -> Result<ThreeSums> {
        let iv = self.interval();
        if !iv.contains(x) {
            return Err(Error::domain(format!("three_sums needs x in [{}, {}], got {x}", iv.a(), iv.b())));
        }
        let k = self.k;
        let j0 = self.locate(x);
        let mut sigma1 = 0.0;
        for j in 0..j0.saturating_sub(1) {
            let w = self.cell_width_unit(j);
            let gap = self.diff_unit(j0, j + 1);
            sigma1 += 0.25 * w * w / (gap * gap);
        }
        let mut sigma3 = 0.0;
        for j in (j0 + 2)..k {
            let w = self.cell_width_unit(j);
            let gap = self.diff_unit(j, j0 + 1);
            sigma3 += 0.25 * w * w / (gap * gap);
        }
        let mut sigma2 = 0.0;
        let xp = UnitPoint::new(iv, x);
        for j in j0.saturating_sub(1)..=(j0 + 1).min(k - 1) {
            sigma2 += self.cell_error_at(j, xp)?;
        }
        Ok(ThreeSums { j0, sigma1, sigma2, sigma3 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    fn cheb(k: usize) -> DiscretizationCertificate {
        build_partition(&ArcsineWeightedDensity::chebyshev(Interval::unit()), k).unwrap()
    }

    #[test]
    fn chebyshev_closed_forms() {
        for k in [2usize, 3, 8, 16] {
            let c = cheb(k);
            let kf = k as f64;
            let ck = 2.0 * kf / PI * (PI / (2.0 * kf)).sin();
            for (j, t) in c.partition().iter().enumerate() {
                assert!((t + (PI * j as f64 / kf).cos()).abs() < 1e-13);
            }
            for (j, xi) in c.nodes().iter().enumerate() {
                let want = -ck * (PI * (2.0 * j as f64 + 1.0) / (2.0 * kf)).cos();
                assert!((xi - want).abs() < 1e-13, "k={k} j={j}: {xi} vs {want}");
            }
        }
        let c = cheb(2);
        let n = c.nodes();
        assert!((n[0] + 2.0 / PI).abs() < 1e-14 && (n[1] - 2.0 / PI).abs() < 1e-14);
        assert!(c.partition()[1].abs() < 1e-15);
    }

    #[test]
    fn rejects_small_k_and_inadmissible() {
        let d = ArcsineWeightedDensity::chebyshev(Interval::unit());
        assert!(matches!(build_partition(&d, 1), Err(Error::InvalidInput(_))));
        let bad = ArcsineWeightedDensity::linear(Interval::unit(), -0.3).unwrap();
        assert!(matches!(build_partition(&bad, 4), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn log_abs_pk_examples() {
        let c = cheb(2);
        let v = c.log_abs_pk(1.0).unwrap();
        assert!((v - (1.0 - 4.0 / (PI * PI)).ln()).abs() < 1e-14);
        // closed form outside: P_k(x) = 2 (c_k/2)^k T_k(x/c_k)
        for k in [3usize, 8] {
            let c = cheb(k);
            let kf = k as f64;
            let ck = 2.0 * kf / PI * (PI / (2.0 * kf)).sin();
            for x in [1.2f64, -1.5, 3.0] {
                let z: f64 = x / ck;
                let tk = (kf * z.abs().acosh()).cosh();
                let want = 2f64.ln() + kf * (ck / 2.0).ln() + tk.ln();
                assert!((c.log_abs_pk(x).unwrap() - want).abs() < 1e-12);
                assert!((c.log_abs_pk(x).unwrap() - c.log_abs_pk(-x).unwrap()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn node_hit_is_singular() {
        let c = cheb(4);
        let xi = c.nodes()[1];
        assert!(matches!(c.log_abs_pk(xi), Err(Error::Singularity(_))));
    }

    #[test]
    fn cumulative_at_partition_points() {
        let d = ArcsineWeightedDensity::example3(Interval::unit(), 0.5).unwrap();
        let c = build_partition(&d, 9).unwrap();
        for (j, t) in c.partition().iter().enumerate() {
            assert!((d.cumulative_w(9, *t).unwrap() - j as f64).abs() < 1e-11);
        }
    }

    #[test]
    fn two_error_forms_agree() {
        let d = ArcsineWeightedDensity::example3(Interval::new(0.5, 3.0).unwrap(), 0.25).unwrap();
        let c = build_partition(&d, 7).unwrap();
        for x in [-1.0, 0.4, 0.9, 1.77, 2.5, 3.2, 6.0] {
            let a = c.discretization_error(x).unwrap();
            let b = c.discretization_error_direct(x).unwrap();
            assert!((a - b).abs() < 1e-9, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn lower_bound_and_tail_bound_outside() {
        let c = cheb(8);
        let t3 = c.partition()[3];
        assert!(c.discretization_error(t3).unwrap() >= -1e-8);
        let v = c.discretization_error(2.0).unwrap();
        let tail = (3.0 * PI / 16.0).powf(1.0 / 3.0) / 3.0;
        assert!(v >= 0.0 && v <= tail + 1e-8, "{v} vs {tail}");
    }

    #[test]
    fn single_cell_bound() {
        let d = ArcsineWeightedDensity::example3(Interval::unit(), 0.5).unwrap();
        let c = build_partition(&d, 6).unwrap();
        let t = c.partition_unit().to_vec();
        for j in 0..6 {
            for xs in [-3.0, -1.0, -0.7, 0.1, 0.55, 0.99, 1.0, 1.3] {
                if xs > t[j] && xs < t[j + 1] {
                    continue;
                }
                let e = c.cell_error_unit(j, xs).unwrap();
                assert!(e >= -1e-9, "j={j} x={xs}: {e}");
                if xs < t[j] || xs > t[j + 1] {
                    let w = c.cell_width_unit(j);
                    let bound = 0.25 * w * w / ((xs - t[j]) * (xs - t[j + 1]));
                    assert!(e <= bound + 1e-9, "j={j} x={xs}: {e} > {bound}");
                }
            }
        }
    }

    #[test]
    fn three_sums_dominate_error() {
        let d = ArcsineWeightedDensity::linear(Interval::new(-2.0, 1.0).unwrap(), 0.4).unwrap();
        let c = build_partition(&d, 12).unwrap();
        for i in 0..=60 {
            let x = -2.0 + 3.0 * i as f64 / 60.0;
            if c.nodes().iter().any(|&xi| xi == x) {
                continue;
            }
            let s = c.three_sums(x).unwrap_or_else(|e| panic!("x={x}: {e}"));
            let e = c.discretization_error(x).unwrap();
            assert!(e <= s.total() + 1e-9, "x={x}: {e} vs {s:?}");
        }
        assert_eq!(c.three_sums(1.0).unwrap().j0, 11);
        assert_eq!(c.three_sums(-2.0).unwrap().j0, 0);
        let t4 = c.partition()[4];
        assert_eq!(c.locate(t4), 3);
        assert_eq!(c.three_sums(t4).unwrap().j0, 3);
        assert!(c.three_sums(1.5).is_err());
    }
}
