//! Acceptance battery. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use logpot::bounds::{example11_integral_closed_form, integral_bound, integral_bound_curve, thsuper_bound, thsuper_d};
use logpot::cg::{run_cg, weighted_error_oracle, DiagonalSystem, Precision};
use logpot::density::ArcsineWeightedDensity;
use logpot::discretizer::{
    audit_partition, build_partition, certificate_ratio, chebyshev_reference_log_ratio, mean_value_check,
    DiscretizationCertificate, C1, C2, C3, SIGMA1_MAX, SIGMA2_MAX, SIGMA3_MAX,
};
use logpot::equilibrium::{AtomicMeasure, EquilibriumSolution, ExternalFieldProblem};
use logpot::interval::Interval;
use logpot::spectral::{SamplingMode, SpectralDensity, SpectrumSample};
use logpot::C_BW;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed <= limit
}

/// The densities of the discretization sweeps.
fn sweep_densities() -> Vec<(String, ArcsineWeightedDensity)> {
    let mut v = vec![("chebyshev".to_string(), ArcsineWeightedDensity::chebyshev(Interval::unit()))];
    for theta in [0.25, 0.5, 1.0] {
        v.push((format!("example3({theta})"), ArcsineWeightedDensity::example3(Interval::unit(), theta).unwrap()));
    }
    let p = ExternalFieldProblem::new(1, AtomicMeasure::dirac(0.0, 1.0).unwrap(), Interval::new(0.1, 1.0).unwrap())
        .unwrap();
    let sol = EquilibriumSolution::solve(&p).unwrap();
    v.push(("equilibrium(delta_0)".to_string(), sol.density().clone()));
    v
}

fn certificates() -> Vec<(String, DiscretizationCertificate)> {
    let dens = sweep_densities();
    let jobs: Vec<(String, ArcsineWeightedDensity, usize)> = dens
        .iter()
        .flat_map(|(name, d)| (2..=32).map(move |k| (name.clone(), d.clone(), k)))
        .collect();
    jobs.into_par_iter()
        .map(|(name, d, k)| (format!("{name} k={k}"), build_partition(&d, k).expect("partition")))
        .collect()
}

/// 1000 points outside (a, b): geometric distances from each endpoint.
fn exterior_grid(iv: Interval) -> Vec<f64> {
    let mut xs = Vec::with_capacity(1000);
    for i in 0..500 {
        let dist = iv.width() * 10f64.powf(-12.0 + 15.0 * i as f64 / 499.0);
        xs.push(iv.a() - dist);
        xs.push(iv.b() + dist);
    }
    xs
}

fn interior_grid(iv: Interval, m: usize, c: &DiscretizationCertificate) -> Vec<f64> {
    let mut xs: Vec<f64> = (0..=m).map(|i| iv.from_angle(PI * i as f64 / m as f64)).collect();
    xs.extend(c.partition());
    xs
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for k in [2usize, 4, 8, 16, 32] {
        let c = build_partition(&ArcsineWeightedDensity::chebyshev(Interval::unit()), k).unwrap();
        let kf = k as f64;
        let ck = 2.0 * kf / PI * (PI / (2.0 * kf)).sin();
        for (j, t) in c.partition().iter().enumerate() {
            worst = worst.max((t + (PI * j as f64 / kf).cos()).abs());
        }
        for (j, xi) in c.nodes().iter().enumerate() {
            worst = worst.max((xi + ck * (PI * (2 * j + 1) as f64 / (2.0 * kf)).cos()).abs());
        }
    }
    let el = start.elapsed();
    outcome(worst <= 1e-11 && within(el, Duration::from_secs(1)), format!("max abs error {worst:.2e}, {el:.2?}"))
}

fn criterion_2(certs: &[(String, DiscretizationCertificate)]) -> Outcome {
    let start = Instant::now();
    let results: Vec<(f64, String)> = certs
        .par_iter()
        .map(|(name, c)| {
            let mut xs = exterior_grid(c.interval());
            xs.extend(c.partition());
            let mut worst = (f64::INFINITY, String::new());
            for x in xs {
                let e = c.discretization_error(x).expect("discretization error");
                if e < worst.0 {
                    worst = (e, format!("{name} x={x:.6e}"));
                }
            }
            worst
        })
        .collect();
    let (min, loc) = results.into_iter().fold((f64::INFINITY, String::new()), |a, b| if b.0 < a.0 { b } else { a });
    let el = start.elapsed();
    outcome(
        min >= -1e-7 && within(el, Duration::from_secs(60)),
        format!("min error {min:.3e} at {loc}, {el:.2?}"),
    )
}

fn sums_sup(c: &DiscretizationCertificate, m: usize) -> [f64; 4] {
    let mut sup = [0.0f64; 4];
    for x in interior_grid(c.interval(), m, c) {
        let s = c.three_sums(x).expect("three sums");
        for (v, w) in sup.iter_mut().zip([s.sigma1, s.sigma2, s.sigma3, s.total()]) {
            *v = v.max(w);
        }
    }
    sup
}

fn criterion_3(certs: &[(String, DiscretizationCertificate)]) -> Outcome {
    let rows: Vec<(String, [f64; 4], [f64; 4])> = certs
        .par_iter()
        .map(|(name, c)| (name.clone(), sums_sup(c, 400), sums_sup(c, 800)))
        .collect();
    let mut sup = [0.0f64; 4];
    let mut sup_fine = [0.0f64; 4];
    let mut unstable = Vec::new();
    for (name, coarse, fine) in &rows {
        for i in 0..4 {
            sup[i] = sup[i].max(coarse[i]);
            sup_fine[i] = sup_fine[i].max(fine[i]);
        }
        if (fine[3] - coarse[3]).abs() > 0.01 * fine[3] {
            unstable.push(name.clone());
        }
    }
    let stable = (0..4).all(|i| (sup_fine[i] - sup[i]).abs() <= 0.01 * sup_fine[i]);
    let pass = sup_fine[0] <= SIGMA1_MAX + 1e-6
        && sup_fine[1] <= SIGMA2_MAX + 1e-6
        && sup_fine[2] <= SIGMA3_MAX + 1e-6
        && sup_fine[3] <= C_BW
        && stable
        && unstable.is_empty();
    outcome(
        pass,
        format!(
            "sup Σ1 {:.4}, Σ2 {:.4}, Σ3 {:.4}, total {:.4}; 2x grid {:.4}/{:.4}/{:.4}/{:.4}{}",
            sup[0],
            sup[1],
            sup[2],
            sup[3],
            sup_fine[0],
            sup_fine[1],
            sup_fine[2],
            sup_fine[3],
            if unstable.is_empty() { String::new() } else { format!("; unstable: {unstable:?}") }
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for (name, d) in sweep_densities() {
        let iv = d.interval();
        let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
        let pairs: Vec<(f64, f64)> = (0..10_000)
            .map(|_| loop {
                let x = rng.random_range(iv.a()..=iv.b());
                let t = rng.random_range(iv.a()..=iv.b());
                if x != t {
                    break (x, t);
                }
            })
            .collect();
        let qs: Vec<f64> =
            pairs.par_iter().map(|&(x, t)| mean_value_check(&d, 8, x, t).expect("mean value").quotient).collect();
        let lo = qs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = qs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let (blo, bhi) = if name == "chebyshev" { (1.0, C3) } else { (C1, C2) };
        pass &= lo >= blo - 1e-12 && hi <= bhi + 1e-12;
        lines.push(format!("{name} [{lo:.4}, {hi:.4}]"));
    }
    outcome(pass, lines.join(", "))
}

fn criterion_5(certs: &[(String, DiscretizationCertificate)]) -> Outcome {
    let reports: Vec<(String, logpot::discretizer::AuditReport)> =
        certs.par_iter().map(|(name, c)| (name.clone(), audit_partition(c))).collect();
    let mut failed = Vec::new();
    let mut worst: std::collections::BTreeMap<String, f64> = Default::default();
    for (name, r) in &reports {
        for e in &r.entries {
            let w = worst.entry(e.name.to_string()).or_insert(f64::INFINITY);
            *w = w.min(e.worst_margin);
            if !e.pass {
                failed.push(format!("{name}: {}", e.name));
            }
        }
    }
    let margins: Vec<String> = worst.iter().map(|(k, v)| format!("{k} {v:.3e}")).collect();
    outcome(
        failed.is_empty(),
        format!("{} certificates; worst margins: {}{}", reports.len(), margins.join(", "),
            if failed.is_empty() { String::new() } else { format!("; failures: {failed:?}") }),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let ts = [0.01, 0.05, 0.1, 0.3, 0.6];
    let mut worst = 0.0f64;
    let families = [SpectralDensity::example11(), SpectralDensity::example12(0.5, 1.0).unwrap(), SpectralDensity::example12(1.0, 1.0).unwrap()];
    for s in &families {
        for &t in &ts {
            let a = s.endpoint_a_of_t(t).unwrap();
            let want = s.endpoint_closed_form(t).unwrap();
            worst = worst.max((a / want - 1.0).abs());
        }
    }
    // the closed forms are independent of the families' own shortcut
    for &t in &ts {
        worst = worst.max((families[0].endpoint_a_of_t(t).unwrap() / (t * t) - 1.0).abs());
        worst = worst.max((families[2].endpoint_a_of_t(t).unwrap() / t.powf(1.0 / 1.5) - 1.0).abs());
    }
    let el = start.elapsed();
    outcome(worst <= 1e-8 && within(el, Duration::from_secs(5)), format!("max relative error {worst:.2e}, {el:.2?}"))
}

fn criterion_7() -> Outcome {
    let s = SpectralDensity::example11();
    let l = s.generate_spectrum(1000, SamplingMode::Equality).unwrap().into_vec();
    let mut mismatches = Vec::new();
    for n in 1..=78usize {
        let want = match n {
            0..=45 => 0,
            46..=64 => 1,
            _ => 2,
        };
        let got = thsuper_d(&s, 1000, n, &l).unwrap();
        if got != want {
            mismatches.push(format!("n={n}: d={got} (expected {want})"));
        }
    }
    let mut first = Vec::new();
    let mut last = usize::MAX;
    for n in 1..=80usize {
        let d = thsuper_d(&s, 1000, n, &l).unwrap();
        if d != last {
            first.push(format!("d={d} from n={n}"));
            last = d;
        }
    }
    outcome(
        mismatches.is_empty(),
        format!("{}; {} mismatches{}", first.join(", "), mismatches.len(),
            if mismatches.is_empty() { String::new() } else { format!(" ({})", mismatches.join(", ")) }),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(88);
    let mut worst = 0.0f64;
    for n_dim in [2usize, 10, 50, 200] {
        let mut l: Vec<f64> = (0..n_dim).map(|_| rng.random_range(0.01..10.0)).collect();
        l.sort_by(|a, b| a.total_cmp(b));
        l.dedup();
        let sys = DiagonalSystem::new(SpectrumSample::new(l.clone()).unwrap()).unwrap();
        let curve = run_cg(&sys, l.len(), Precision::Extended { digits: 64 }).unwrap();
        let diffs: Vec<f64> = (0..=l.len())
            .into_par_iter()
            .map(|n| {
                let o = weighted_error_oracle(&l, n).unwrap();
                let e = curve.values[n];
                let d = (e - o).abs();
                if o > 1e-40 { d / o } else { d / 1e-40 }
            })
            .collect();
        worst = worst.max(diffs.into_iter().fold(0.0, f64::max));
    }
    let two = DiagonalSystem::new(SpectrumSample::new(vec![1.0, 2.0]).unwrap()).unwrap();
    let e1 = run_cg(&two, 2, Precision::Extended { digits: 64 }).unwrap().values[1];
    let hand = (e1 - 1.0 / 3.0).abs();
    outcome(worst <= 1e-10 && hand <= 1e-14, format!("max relative gap {worst:.2e}; N=2 |e_1 - 1/3| = {hand:.1e}"))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let families = [SpectralDensity::example11(), SpectralDensity::example12(0.5, 1.0).unwrap(), SpectralDensity::example12(1.0, 1.0).unwrap()];
    let big_n = 1000;
    let mut pass = true;
    let mut lines = Vec::new();
    for s in &families {
        let sample = s.generate_spectrum(big_n, SamplingMode::Equality).unwrap();
        let l = sample.eigenvalues().to_vec();
        let curve = run_cg(&DiagonalSystem::new(sample).unwrap(), big_n, Precision::Extended { digits: 64 }).unwrap();
        let rows: Vec<(usize, Option<(f64, f64)>)> = (1..big_n)
            .into_par_iter()
            .map(|n| {
                let bound = thsuper_bound(s, big_n, n, &l, C_BW).ok().map(|b| b.0.log_value);
                let empirical = thsuper_bound(s, big_n, n, &l, 0.0).ok().map(|b| b.0.log_value);
                (n, bound.zip(empirical))
            })
            .collect();
        let mut feasible = 0;
        let mut bound_bad = 0;
        let mut empirical_bad = Vec::new();
        let mut worst = (f64::NEG_INFINITY, 0usize);
        for (n, r) in rows {
            let Some((lt, l0)) = r else { continue };
            feasible += 1;
            let e = curve.values[n];
            if e > 0.0 && e.ln() > lt {
                bound_bad += 1;
            }
            if e >= 1e-12 {
                let gap = e.ln() - l0;
                if gap > worst.0 {
                    worst = (gap, n);
                }
                if gap > 0.0 {
                    empirical_bad.push(n);
                }
            }
        }
        pass &= bound_bad == 0 && empirical_bad.is_empty();
        let range = match (empirical_bad.first(), empirical_bad.last()) {
            (Some(a), Some(b)) => format!(" in n={a}..{b}"),
            _ => String::new(),
        };
        lines.push(format!(
            "{}: {feasible} feasible n, C_BW violations {bound_bad}, C=0 violations {}{range} (max e_n/bound {:.4} at n={})",
            s.family(),
            empirical_bad.len(),
            worst.0.exp(),
            worst.1
        ));
    }
    let el = start.elapsed();
    pass &= within(el, Duration::from_secs(600));
    outcome(pass, format!("{}; {el:.2?}", lines.join("; ")))
}

fn criterion_10() -> Outcome {
    let problems = |k: usize| -> Vec<(String, ExternalFieldProblem)> {
        vec![
            ("empty".into(), ExternalFieldProblem::new(k, AtomicMeasure::empty(), Interval::unit()).unwrap()),
            (
                "delta_0".into(),
                ExternalFieldProblem::new(k, AtomicMeasure::dirac(0.0, 1.0).unwrap(), Interval::new(0.1, 1.0).unwrap()).unwrap(),
            ),
            (
                "two atoms".into(),
                ExternalFieldProblem::new(k, AtomicMeasure::counting(&[0.0, 0.05]).unwrap(), Interval::new(0.1, 2.0).unwrap())
                    .unwrap(),
            ),
        ]
    };
    let mut pass = true;
    let mut max_deficit = 0.0f64;
    let mut max_excess = f64::NEG_INFINITY;
    let mut cheb_gap = 0.0f64;
    let mut count = 0;
    for k in [4usize, 8, 16] {
        for (name, p) in problems(k) {
            let sol = EquilibriumSolution::solve(&p).unwrap();
            let c = build_partition(sol.density(), k).unwrap();
            let iv = sol.support();
            let atoms: Vec<f64> = p.rho().atoms().iter().map(|a| a.location).collect();
            let offsets = [1e-6, 1e-3, 0.01, 0.03, 0.07, 0.1, 0.2, 0.5, 1.0, 3.0];
            let x0s: Vec<f64> = offsets
                .iter()
                .flat_map(|&o| [iv.a() - o * iv.width(), iv.b() + o * iv.width()])
                .map(|x| if atoms.iter().any(|&y| (x - y).abs() < 1e-9) { x - 1e-3 } else { x })
                .collect();
            for x0 in x0s {
                let r = certificate_ratio(&p, &sol, &c, x0).unwrap();
                count += 1;
                max_deficit = max_deficit.max(r.deficit());
                max_excess = max_excess.max(r.log_ratio - r.kf);
                pass &= r.log_ratio <= r.kf + (1e-8f64).ln_1p();
                if name == "empty" {
                    let cheb = chebyshev_reference_log_ratio(iv, k, x0).unwrap();
                    cheb_gap = cheb_gap.max((cheb - r.log_ratio).abs());
                }
            }
        }
    }
    pass &= max_deficit <= C_BW && cheb_gap <= 4f64.ln();
    outcome(
        pass,
        format!("{count} points; C_obs = {max_deficit:.4}, max log r - kf = {max_excess:.2e}, max |log(r/r_cheb)| = {cheb_gap:.4}"),
    )
}

fn criterion_11() -> Outcome {
    let s = SpectralDensity::example11();
    let ts = [0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
    let ns: Vec<usize> = ts.iter().map(|t| (t * 1000.0f64).round() as usize).collect();
    let curve = integral_bound_curve(&s, 1000, &ns, 0.0).unwrap();
    let worst = curve
        .iter()
        .map(|r| (r.value() / example11_integral_closed_form(1000, r.n, 0.0) - 1.0).abs())
        .fold(0.0, f64::max);
    let spot = integral_bound(&s, 1000, 100, 0.0).unwrap().value();
    let spot_rel = (spot / 4.45e-5 - 1.0).abs();
    outcome(
        worst <= 1e-9 && spot_rel <= 1e-3,
        format!("max relative gap {worst:.2e}; n=100 value {spot:.5e}, relative gap to 4.45e-5 is {spot_rel:.2e}"),
    )
}

fn run(id: usize, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        outcome(false, format!("panicked: {msg}"))
    });
    println!(
        "criterion {id:>2}: {} ({}) [{:.2?}]",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail,
        start.elapsed()
    );
    o.pass
}

fn main() {
    let certs = certificates();
    let results = [
        run(1, criterion_1),
        run(2, || criterion_2(&certs)),
        run(3, || criterion_3(&certs)),
        run(4, criterion_4),
        run(5, || criterion_5(&certs)),
        run(6, criterion_6),
        run(7, criterion_7),
        run(8, criterion_8),
        run(9, criterion_9),
        run(10, criterion_10),
        run(11, criterion_11),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
