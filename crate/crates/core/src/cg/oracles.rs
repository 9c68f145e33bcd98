use crate::error::{Error, Result};
use crate::scalar::{bits_for_digits, BigFloat, Scalar};

fn check_positive(lambdas: &[f64]) -> Result<()> {
    if lambdas.is_empty() {
        return Err(Error::invalid("need at least one eigenvalue"));
    }
    if lambdas.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(Error::invalid("eigenvalues must be positive and finite"));
    }
    Ok(())
}

/// Exact relative energy error of CG for c = (1, …, 1), x0 = 0, from the
/// orthogonal polynomials of Σ δ_{λ_j}/λ_j.
pub fn weighted_error_oracle(lambdas: &[f64], n: usize) -> Result<f64> {
    weighted_error_oracle_in::<BigFloat>(lambdas, n, bits_for_digits(64))
}

/// Same as [`weighted_error_oracle`] in a chosen scalar type.
///
/// The minimum of Σ w_j q(λ_j)² over q(0) = 1 is 1/K_n(0, 0), with
/// K_n(0, 0) = Σ_{i≤n} π_i(0)² / ‖π_i‖² over the monic orthogonal π_i.
pub fn weighted_error_oracle_in<S: Scalar>(lambdas: &[f64], n: usize, bits: usize) -> Result<f64> {
    check_positive(lambdas)?;
    let m = lambdas.len();
    if n == 0 {
        return Ok(1.0);
    }
    if n >= m {
        return Ok(0.0);
    }
    let lift = |v: f64| S::lift(v, bits);
    let zero = lift(0.0);
    let one = lift(1.0);
    let lam: Vec<S> = lambdas.iter().map(|&v| lift(v)).collect();
    let w: Vec<S> = lam.iter().map(|l| one.over(l)).collect();
    let total = w.iter().fold(zero.clone(), |a, b| a.plus(b));

    let norm = |p: &[S]| p.iter().zip(&w).fold(zero.clone(), |acc, (pi, wi)| acc.plus(&wi.times(&pi.times(pi))));
    let mut prev: Vec<S> = vec![zero.clone(); m];
    let mut cur: Vec<S> = vec![one.clone(); m];
    let (mut prev0, mut cur0) = (zero.clone(), one.clone());
    let mut prev_norm = one.clone();
    let mut cur_norm = total.clone();
    let mut kernel = one.over(&total);
    for i in 0..n {
        let xnorm = cur
            .iter()
            .zip(&w)
            .zip(&lam)
            .fold(zero.clone(), |acc, ((pi, wi), li)| acc.plus(&wi.times(&li.times(&pi.times(pi)))));
        let alpha = xnorm.over(&cur_norm);
        let beta = if i == 0 { zero.clone() } else { cur_norm.over(&prev_norm) };
        let next: Vec<S> = (0..m)
            .map(|j| lam[j].minus(&alpha).times(&cur[j]).minus(&beta.times(&prev[j])))
            .collect();
        let next0 = zero.minus(&alpha).times(&cur0).minus(&beta.times(&prev0));
        let next_norm = norm(&next);
        if next_norm.is_zero() || next_norm.to_f64() <= 0.0 {
            return Err(Error::NotConverged(format!("recurrence broke down at degree {}", i + 1)));
        }
        kernel = kernel.plus(&next0.times(&next0).over(&next_norm));
        prev = std::mem::replace(&mut cur, next);
        prev0 = std::mem::replace(&mut cur0, next0);
        prev_norm = std::mem::replace(&mut cur_norm, next_norm);
    }
    let e2 = one.over(&kernel.times(&total));
    Ok(e2.root().to_f64())
}

/// Barycentric weights of sorted points, rescaled so the largest has unit size.
fn bary_weights(x: &[f64]) -> Vec<f64> {
    let scale = 4.0 / (x[x.len() - 1] - x[0]).max(f64::MIN_POSITIVE);
    let mut w: Vec<f64> = (0..x.len())
        .map(|r| {
            (0..x.len())
                .filter(|&s| s != r)
                .fold(1.0, |acc, s| acc / ((x[r] - x[s]) * scale))
        })
        .collect();
    let big = w.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    for v in &mut w {
        *v /= big;
    }
    w
}

/// Levelled error h of a reference set: the polynomial of degree |x| − 1 with
/// q(0) = 1 and q(x_r) = (−1)^r h, where h = 1/Σ_r |ℓ_r(0)|.
pub fn levelled_error(x: &[f64]) -> f64 {
    let w = bary_weights(x);
    let terms: Vec<f64> = w.iter().zip(x).map(|(wr, xr)| wr / (0.0 - xr)).collect();
    let denom: f64 = terms.iter().sum();
    1.0 / terms.iter().map(|t| (t / denom).abs()).sum::<f64>()
}

fn bary_eval(x: &[f64], w: &[f64], y: &[f64], t: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for r in 0..x.len() {
        let d = t - x[r];
        if d == 0.0 {
            return y[r];
        }
        num += w[r] * y[r] / d;
        den += w[r] / d;
    }
    num / den
}

fn sorted_unique(lambdas: &[f64]) -> Vec<f64> {
    let mut v = lambdas.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup();
    v
}

fn exchange(pts: &[f64], n: usize) -> Option<f64> {
    let m = pts.len();
    // spread the initial reference over the index range
    let mut refs: Vec<usize> = (0..=n).map(|r| r * (m - 1) / n).collect();
    let mut last_h = 0.0;
    for _ in 0..1000 {
        let xs: Vec<f64> = refs.iter().map(|&i| pts[i]).collect();
        let w = bary_weights(&xs);
        let h = levelled_error(&xs);
        if !h.is_finite() || h < last_h * (1.0 - 1e-12) {
            return None;
        }
        last_h = h;
        let y: Vec<f64> = (0..=n).map(|r| if r % 2 == 0 { h } else { -h }).collect();
        let (mut jmax, mut emax) = (0, 0.0f64);
        for (j, &t) in pts.iter().enumerate() {
            let e = bary_eval(&xs, &w, &y, t).abs();
            if e > emax {
                jmax = j;
                emax = e;
            }
        }
        if emax <= h * (1.0 + 1e-11) {
            return Some(emax.max(h));
        }
        let s = bary_eval(&xs, &w, &y, pts[jmax]).signum();
        let sign_at = |r: usize| if r % 2 == 0 { 1.0 } else { -1.0 };
        let pos = refs.partition_point(|&i| i < jmax);
        if pos == 0 {
            if sign_at(0) == s {
                refs[0] = jmax;
            } else {
                refs.pop();
                refs.insert(0, jmax);
            }
        } else if pos == n + 1 {
            if sign_at(n) == s {
                refs[n] = jmax;
            } else {
                refs.remove(0);
                refs.push(jmax);
            }
        } else if sign_at(pos - 1) == s {
            refs[pos - 1] = jmax;
        } else {
            refs[pos] = jmax;
        }
    }
    None
}

fn enumerate(pts: &[f64], n: usize) -> f64 {
    // the discrete minimax value is the largest levelled error over references
    fn rec(pts: &[f64], start: usize, left: usize, cur: &mut Vec<f64>, best: &mut f64) {
        if left == 0 {
            *best = best.max(levelled_error(cur));
            return;
        }
        for i in start..=pts.len() - left {
            cur.push(pts[i]);
            rec(pts, i + 1, left - 1, cur, best);
            cur.pop();
        }
    }
    let mut best = 0.0;
    rec(pts, 0, n + 1, &mut Vec::with_capacity(n + 1), &mut best);
    best
}

/// E_n(Λ) = min over q of degree ≤ n with q(0) = 1 of max_j |q(λ_j)|, by
/// discrete exchange on the barycentric form. Intended for |Λ| ≤ 40, n ≤ 20.
pub fn minimax_discrete_oracle(lambdas: &[f64], n: usize) -> Result<f64> {
    check_positive(lambdas)?;
    let pts = sorted_unique(lambdas);
    if n == 0 {
        return Ok(1.0);
    }
    if n >= pts.len() {
        return Ok(0.0);
    }
    if let Some(v) = exchange(&pts, n) {
        return Ok(v);
    }
    if pts.len() <= 15 {
        return Ok(enumerate(&pts, n));
    }
    Err(Error::NotConverged(format!("exchange did not settle for |Λ| = {}, n = {n}", pts.len())))
}

#[cfg(test)]
pub(crate) fn minimax_by_enumeration(lambdas: &[f64], n: usize) -> f64 {
    enumerate(&sorted_unique(lambdas), n)
}
