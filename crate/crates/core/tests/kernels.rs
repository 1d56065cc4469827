use powgof_core::kernel::{degree3_kernel, pair_kernel, psi, psi_variance, xi, xi_variance, xi_variance_argmax};
use powgof_core::numeric::golden_max;
use powgof_core::quad::{integrate, integrate_with_breaks, Tolerance};
use powgof_core::AsymptoticConstants;

const TIGHT: Tolerance = Tolerance::new(1e-14, 1e-12);

fn t_grid() -> impl Iterator<Item = f64> {
    (1..=99).map(|i| i as f64 / 100.0)
}

#[test]
fn psi_is_centred_with_variance_5_over_972() {
    let mean = integrate(|s| psi(s).unwrap(), 0.0, 1.0, TIGHT).unwrap().value;
    assert!(mean.abs() < 1e-12, "∫ψ = {mean}");
    let var = integrate(|s| psi(s).unwrap().powi(2), 0.0, 1.0, TIGHT).unwrap().value;
    assert!((var - 5.0 / 972.0).abs() < 1e-10, "∫ψ² = {var}");
    assert_eq!(psi_variance(), 5.0 / 972.0);
    assert!((9.0 * psi_variance() - 5.0 / 108.0).abs() < 1e-16);
}

#[test]
fn xi_is_centred_and_matches_closed_form_variance() {
    for t in t_grid() {
        let m = integrate_with_breaks(|s| xi(s, t).unwrap(), 0.0, 1.0, &[t], TIGHT)
            .unwrap()
            .value;
        assert!(m.abs() < 1e-12, "t = {t}: ∫ξ = {m}");
        let v = integrate_with_breaks(|s| xi(s, t).unwrap().powi(2), 0.0, 1.0, &[t], TIGHT)
            .unwrap()
            .value;
        assert!((v - xi_variance(t).unwrap()).abs() < 1e-10, "t = {t}");
    }
}

#[test]
fn golden_section_recovers_t_star() {
    let e = golden_max(|t| xi_variance(t).unwrap(), 0.0, 1.0, 1e-14);
    let (t_star, value) = xi_variance_argmax();
    // δ² is flat at its maximum, so the argmax is found to about √ε
    assert!((e.x - t_star).abs() < 1e-7, "{} vs {}", e.x, t_star);
    assert!((e.value - value).abs() < 1e-15);
    assert!((t_star - AsymptoticConstants::t_star()).abs() < 1e-16);
    assert!((t_star - (1.0 + 7f64.sqrt()) / 6.0).abs() < 1e-15);
}

/// `E[Ψ(s, Y, Z)]` by nested quadrature over `(Y, Z) ∈ (0,1)²`. For fixed
/// `(s, y)` the kernel is piecewise constant in `z` with jumps at the
/// points where one of the three indicators switches.
fn conditional_mean_degree3(s: f64) -> f64 {
    let tol = Tolerance::new(1e-11, 1e-10);
    let inner = |y: f64| {
        let m = (s / y).min(y / s);
        let breaks = [m, s * y, s / y, y / s];
        integrate_with_breaks(
            |z| {
                if z <= 0.0 || z >= 1.0 {
                    0.0
                } else {
                    degree3_kernel(s, y, z).unwrap()
                }
            },
            0.0,
            1.0,
            &breaks,
            tol,
        )
        .unwrap()
        .value
    };
    integrate_with_breaks(inner, 0.0, 1.0, &[s], tol).unwrap().value
}

#[test]
fn degree3_projection_equals_psi() {
    for s in [0.1, 0.5, 0.9] {
        let e = conditional_mean_degree3(s);
        assert!((e - psi(s).unwrap()).abs() < 1e-6, "s = {s}: {e}");
    }
}

#[test]
fn pair_projection_equals_xi() {
    let tol = Tolerance::new(1e-12, 1e-10);
    for &t in &[0.2, 0.5, AsymptoticConstants::t_star(), 0.85] {
        for &s in &[0.05, 0.3, 0.6, 0.95] {
            let e = integrate_with_breaks(
                |y| {
                    if y <= 0.0 || y >= 1.0 {
                        0.0
                    } else {
                        pair_kernel(s, y, t).unwrap()
                    }
                },
                0.0,
                1.0,
                &[t, s * t, s / t],
                tol,
            )
            .unwrap()
            .value;
            assert!((e - xi(s, t).unwrap()).abs() < 1e-6, "s = {s}, t = {t}: {e}");
        }
    }
}
