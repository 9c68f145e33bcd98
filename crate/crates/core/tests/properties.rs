use logpot::bounds::{corollary_bound, integral_bound, outlier_endpoint};
use logpot::cg::{minimax_discrete_oracle, run_cg, weighted_error_oracle, DiagonalSystem, Precision};
use logpot::spectral::{SamplingMode, SpectralDensity, SpectrumSample};
use proptest::prelude::*;

fn spectrum() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::btree_set(1u32..10_000, 3..12)
        .prop_map(|s| s.into_iter().map(|v| v as f64 / 1000.0).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quantile_inverts_cdf(beta in 0.0f64..3.0, b in 0.5f64..4.0, p in 0.01f64..0.99) {
        let s = SpectralDensity::example12(beta, b).unwrap();
        let x = s.quantile(p).unwrap();
        prop_assert!((s.cdf(x) - p).abs() < 1e-10);
        prop_assert!(x > 0.0 && x < b);
    }

    #[test]
    fn endpoint_map_is_monotone(t1 in 0.02f64..0.95, dt in 0.01f64..0.04) {
        let s = SpectralDensity::example11();
        let a1 = s.endpoint_a_of_t(t1).unwrap();
        let a2 = s.endpoint_a_of_t(t1 + dt).unwrap();
        prop_assert!(a2 > a1);
        let exact = s.endpoint_closed_form(t1).unwrap();
        prop_assert!((a1 - exact).abs() < 1e-10);
    }

    #[test]
    fn generated_spectra_are_increasing(n in 2usize..60, beta in 0.0f64..2.0) {
        let s = SpectralDensity::example12(beta, 1.0).unwrap();
        let v = s.generate_spectrum(n, SamplingMode::Equality).unwrap().into_vec();
        prop_assert_eq!(v.len(), n);
        prop_assert!(v.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(*v.last().unwrap(), 1.0);
    }

    #[test]
    fn cg_sits_between_oracles(lambdas in spectrum()) {
        let sys = DiagonalSystem::new(SpectrumSample::new(lambdas.clone()).unwrap()).unwrap();
        let curve = run_cg(&sys, lambdas.len(), Precision::default()).unwrap();
        let (lo, hi) = (lambdas[0], *lambdas.last().unwrap());
        for n in 1..lambdas.len() {
            let e = curve.get(n).unwrap();
            let w = weighted_error_oracle(&lambdas, n).unwrap();
            prop_assert!((e - w).abs() <= 1e-9 * w.max(1e-300));
            let m = minimax_discrete_oracle(&lambdas, n).unwrap();
            prop_assert!(e <= m * (1.0 + 1e-9));
            let cond = logpot::bounds::cond_number_bound(lo, hi, n).unwrap();
            prop_assert!(m <= cond * (1.0 + 1e-9));
            prop_assert!(curve.get(n).unwrap() <= curve.get(n - 1).unwrap() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn outlier_endpoint_shrinks_with_degree(lambdas in spectrum(), n_extra in 1usize..30) {
        let b = *lambdas.last().unwrap();
        let d = 1;
        let n = d + 1 + n_extra;
        let a = outlier_endpoint(&lambdas, d, n, b).unwrap();
        prop_assert!(a >= lambdas[d] * (1.0 - 1e-12) && a < b);
        let a_next = outlier_endpoint(&lambdas, d, n + 1, b).unwrap();
        prop_assert!(a_next <= a * (1.0 + 1e-12));
        let r = corollary_bound(&lambdas, d, n, b, 0.0).unwrap();
        let r_c = corollary_bound(&lambdas, d, n, b, 0.5).unwrap();
        prop_assert!(r_c.log_value >= r.log_value);
    }

    #[test]
    fn integral_bound_below_product(n in 1usize..199) {
        let s = SpectralDensity::example11();
        let ib = integral_bound(&s, 200, n, 0.0).unwrap();
        prop_assert!(ib.log_value <= ib.log_product + 1e-12);
        let exact = logpot::bounds::example11_integral_closed_form(200, n, 0.0);
        prop_assert!((ib.value() - exact).abs() <= 1e-9 * exact);
    }
}
