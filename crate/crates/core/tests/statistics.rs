use powgof_core::model::NullFamily;
use powgof_core::rng::stream_rng;
use powgof_core::stats::{empirical_df, oracle, u_empirical_df, StepFunctionPair};
use powgof_core::{integral_statistic, kolmogorov_statistic, validate_sample, Sample, Statistic};
use proptest::prelude::*;

fn uniform_sample(n: usize, seed: u64, index: u64) -> Sample {
    NullFamily::new(1.0)
        .unwrap()
        .sample(n, &mut stream_rng(seed, 0, index))
        .unwrap()
}

/// Values in (0, 1), sometimes drawn from a coarse grid so that ties occur.
fn sample_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop_oneof![
        prop::collection::vec(1e-6f64..(1.0 - 1e-6), 2..=50),
        prop::collection::vec((1u32..20).prop_map(|k| k as f64 / 20.0), 2..=50),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn fast_paths_match_oracles(raw in sample_strategy()) {
        let s = validate_sample(&raw).unwrap();
        let i_fast = integral_statistic(&s).unwrap().raw_value;
        let d_fast = kolmogorov_statistic(&s).unwrap().raw_value;
        prop_assert!((i_fast - oracle::naive_integral(&s, oracle::DEFAULT_CAP).unwrap()).abs() <= 1e-12);
        prop_assert!((d_fast - oracle::naive_kolmogorov(&s, oracle::DEFAULT_CAP).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn statistics_are_bounded(raw in sample_strategy()) {
        let s = validate_sample(&raw).unwrap();
        let i = integral_statistic(&s).unwrap().raw_value;
        let d = kolmogorov_statistic(&s).unwrap().raw_value;
        prop_assert!(i.abs() <= 0.5);
        prop_assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn power_transform_invariance(raw in prop::collection::vec(1e-3f64..0.999, 2..=40), lambda in 0.2f64..6.0) {
        let s = validate_sample(&raw).unwrap();
        let t = s.powf(1.0 / lambda).unwrap();
        for stat in Statistic::ALL {
            let a = stat.evaluate(&s).unwrap();
            let b = stat.evaluate(&t).unwrap();
            prop_assert!((a - b).abs() < 1e-9, "{stat}: {a} vs {b}");
        }
    }

    #[test]
    fn validation_idempotent(raw in prop::collection::vec(1e-9f64..0.999_999, 2..60)) {
        let s = validate_sample(&raw).unwrap();
        prop_assert_eq!(validate_sample(s.values()).unwrap(), s);
    }
}

#[test]
fn spec_invariance_examples() {
    let s = validate_sample(&[0.12, 0.33, 0.47, 0.58, 0.71, 0.86, 0.93]).unwrap();
    let i0 = integral_statistic(&s).unwrap().raw_value;
    let i3 = integral_statistic(&s.powf(1.0 / 3.0).unwrap()).unwrap().raw_value;
    assert!((i0 - i3).abs() < 1e-9);
    let d0 = kolmogorov_statistic(&s).unwrap().raw_value;
    let d_half = kolmogorov_statistic(&s.powf(2.0).unwrap()).unwrap().raw_value;
    assert!((d0 - d_half).abs() < 1e-9);
}

#[test]
fn step_functions_have_lattice_increments() {
    let s = uniform_sample(25, 11, 0);
    let steps = StepFunctionPair::new(&s).unwrap();
    let pairs = (25 * 24 / 2) as f64;
    let mut prev = (0.0, 0.0);
    for (h, f) in steps.h_at.iter().zip(&steps.f_at) {
        let dh = (h - prev.0) * pairs;
        let df = (f - prev.1) * 25.0;
        assert!((dh - dh.round()).abs() < 1e-9 && dh >= -1e-9);
        assert!((df - df.round()).abs() < 1e-9 && df >= -1e-9);
        prev = (*h, *f);
    }
    // right limits agree with direct evaluation just above each jump point
    for (k, &u) in steps.jump_points.iter().enumerate() {
        let above = steps.jump_points.get(k + 1).copied().unwrap_or(1.0);
        let t = 0.5 * (u + above);
        assert_eq!(u_empirical_df(&s, t).unwrap(), steps.h_at[k]);
        assert_eq!(empirical_df(&s, t), steps.f_at[k]);
    }
}

#[test]
fn doubling_the_sample_moves_difference_by_at_most_two_over_n() {
    for seed in 0..5 {
        let s = uniform_sample(30, seed, 0);
        let n = s.len() as f64;
        let mut doubled = s.values().to_vec();
        doubled.extend_from_slice(s.values());
        let d = validate_sample(&doubled).unwrap();
        for k in 1..200 {
            let t = k as f64 / 200.0;
            let base = (u_empirical_df(&s, t).unwrap() - empirical_df(&s, t)).abs();
            let twice = (u_empirical_df(&d, t).unwrap() - empirical_df(&d, t)).abs();
            assert!(twice <= base + 2.0 / n, "t = {t}");
        }
    }
}

#[test]
fn null_centering_and_limit_variance() {
    const REPS: u64 = 10_000;
    const N: usize = 100;
    let scaled: Vec<f64> = (0..REPS)
        .map(|k| integral_statistic(&uniform_sample(N, 2024, k)).unwrap().scaled_value)
        .collect();
    let mean = scaled.iter().sum::<f64>() / REPS as f64;
    let var = scaled.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (REPS - 1) as f64;
    let sigma = (5.0f64 / 108.0).sqrt();
    // Integrating over the atoms of F_n includes the n - 1 pairs containing
    // X_k, which satisfy m < X_k with probability 1/3 instead of 1/2, and
    // E F_n(X_k) = (n - 1) / 2n. Together E I_n = 1/(6n) exactly.
    let exact_mean = (N as f64).sqrt() / (6.0 * N as f64);
    assert!(
        (mean - exact_mean).abs() < 4.0 * sigma / (REPS as f64).sqrt(),
        "mean {mean}"
    );
    assert!((var / (5.0 / 108.0) - 1.0).abs() < 0.10, "variance {var}");
}
