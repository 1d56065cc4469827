use powgof_core::alternatives::Family;
use powgof_core::quad::{integrate_with_breaks, Tolerance};
use powgof_core::rng::{open_unit, stream_rng};

const TOL: Tolerance = Tolerance::new(1e-13, 1e-12);

fn admissible_thetas(fam: &Family) -> Vec<f64> {
    let range = fam.theta_range();
    let hi = if range.hi_open { range.hi * (1.0 - 1e-9) } else { range.hi };
    (0..20).map(|k| hi * k as f64 / 19.0).collect()
}

#[test]
fn densities_integrate_to_one_and_are_nonnegative() {
    for fam in Family::builtins() {
        for theta in admissible_thetas(&fam) {
            let mass = integrate_with_breaks(
                |x| fam.density(x, theta).unwrap(),
                0.0,
                1.0,
                fam.breakpoints(),
                TOL,
            )
            .unwrap()
            .value;
            assert!((mass - 1.0).abs() < 1e-10, "{fam} θ={theta}: {mass}");
            for i in 0..10_000 {
                let x = (i as f64 + 0.5) / 10_000.0;
                assert!(fam.density(x, theta).unwrap() >= -1e-14, "{fam} θ={theta} x={x}");
            }
        }
    }
}

#[test]
fn cdf_is_monotone_with_fixed_endpoints() {
    for fam in Family::builtins() {
        for theta in admissible_thetas(&fam) {
            let mut prev = 0.0;
            for i in 0..=1000 {
                let g = fam.cdf(i as f64 / 1000.0, theta).unwrap();
                assert!(g >= prev - 1e-15, "{fam} θ={theta}");
                prev = g;
            }
            assert_eq!(fam.cdf(0.0, theta).unwrap(), 0.0);
            assert_eq!(fam.cdf(1.0, theta).unwrap(), 1.0);
        }
    }
}

#[test]
fn cdf_is_antiderivative_of_density() {
    for fam in Family::builtins() {
        let theta = 0.7 * fam.theta_range().hi.min(1.0);
        for &x in &[0.05, 0.3, 0.61, 0.9] {
            let area = integrate_with_breaks(
                |y| fam.density(y, theta).unwrap(),
                0.0,
                x,
                fam.breakpoints(),
                TOL,
            )
            .unwrap()
            .value;
            assert!((area - fam.cdf(x, theta).unwrap()).abs() < 1e-11, "{fam} x={x}");
        }
    }
}

#[test]
fn tangents_are_centred_and_square_integrable() {
    let extra = [
        Family::g1(1.5).unwrap(),
        Family::g1(10.0).unwrap(),
        Family::lao_integral(2.0, -0.3).unwrap(),
        Family::lao_kolmogorov(1.0, -0.2).unwrap(),
    ];
    for fam in Family::builtins().into_iter().chain(extra) {
        let br = fam.breakpoints();
        let m = integrate_with_breaks(|x| fam.tangent(x).unwrap(), 0.0, 1.0, br, TOL)
            .unwrap()
            .value;
        assert!(m.abs() < 1e-11, "{fam}: ∫h = {m}");
        let sq = integrate_with_breaks(|x| fam.tangent(x).unwrap().powi(2), 0.0, 1.0, br, TOL);
        assert!(sq.is_ok_and(|e| e.value.is_finite()), "{fam}");
    }
}

#[test]
fn finite_difference_converges_to_tangent() {
    for fam in Family::builtins() {
        for &x in &[0.1, 0.45, 0.8] {
            let h = fam.tangent(x).unwrap();
            let err = |th: f64| ((fam.density(x, th).unwrap() - 1.0) / th - h).abs();
            let (e1, e2) = (err(1e-3), err(5e-4));
            // families are linear in θ: the difference quotient is exact up to rounding
            assert!(e1 < 1e-9 && e2 <= e1.max(1e-9) * 2.0, "{fam} x={x}: {e1} {e2}");
        }
    }
}

#[test]
fn quantile_round_trips() {
    let mut rng = stream_rng(5, 9, 0);
    for fam in Family::builtins() {
        let hi = fam.theta_range().hi.min(1.0) * (1.0 - 1e-9);
        for _ in 0..100 {
            let x = open_unit(&mut rng);
            let theta = hi * open_unit(&mut rng);
            let p = fam.cdf(x, theta).unwrap();
            if p <= 0.0 || p >= 1.0 {
                continue;
            }
            let q = fam.quantile(p, theta).unwrap();
            assert!((q - x).abs() < 1e-10, "{fam} x={x} θ={theta} q={q}");
        }
    }
}

/// One-sample Kolmogorov-Smirnov statistic against the uniform law.
fn ks_uniform(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| ((i + 1) as f64 / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max)
}

#[test]
fn null_sampling_is_uniform() {
    let s = Family::g2().sample(0.0, 10_000, 77).unwrap();
    let d = ks_uniform(s.values());
    // asymptotic 1% critical value of √n D is 1.628
    assert!(d * 100.0 < 1.628, "KS = {d}");
}

#[test]
fn pure_power_law_mean() {
    // G1 with θ = 1 is the x^r law, mean r / (r + 1)
    let s = Family::g1(3.0).unwrap().sample(1.0, 20_000, 3).unwrap();
    let mean = s.values().iter().sum::<f64>() / s.len() as f64;
    let sd = (3.0f64 / 5.0 - 0.75f64.powi(2)).sqrt() / (s.len() as f64).sqrt();
    assert!((mean - 0.75).abs() < 3.0 * sd, "mean {mean}");
}
