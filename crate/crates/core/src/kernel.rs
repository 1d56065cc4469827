//! Kernels of the two statistics and their projections under the uniform null.

use crate::error::{Error, Result};
use crate::model::AsymptoticConstants;

fn x_ln_x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * libm::log(x)
    }
}

fn check_unit(what: &'static str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain { what, value: x })
    }
}

/// Projection of the degree-3 kernel: `ψ(s) = 1/6 + (2/3) s ln s`.
pub fn psi(s: f64) -> Result<f64> {
    check_unit("psi", s)?;
    Ok(psi_unchecked(s))
}

pub(crate) fn psi_unchecked(s: f64) -> f64 {
    1.0 / 6.0 + 2.0 / 3.0 * x_ln_x(s)
}

/// `∫ ψ² ds` over `(0, 1)`, exactly 5/972.
pub fn psi_variance() -> f64 {
    AsymptoticConstants::delta2_i()
}

/// Projection of the pair kernel at threshold `t`:
/// `ξ(s; t) = 1{s < t}(1/2 - s/t) + s t - t/2`.
pub fn xi(s: f64, t: f64) -> Result<f64> {
    check_unit("xi", s)?;
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain {
            what: "xi threshold",
            value: t,
        });
    }
    Ok(xi_unchecked(s, t))
}

pub(crate) fn xi_unchecked(s: f64, t: f64) -> f64 {
    let jump = if s < t { 0.5 - s / t } else { 0.0 };
    jump + s * t - 0.5 * t
}

/// `δ²(t) = t (1 + t - 2t²) / 12`, the variance of `ξ(·; t)`.
pub fn xi_variance(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain {
            what: "xi_variance",
            value: t,
        });
    }
    Ok(xi_variance_unchecked(t))
}

pub(crate) fn xi_variance_unchecked(t: f64) -> f64 {
    t * (1.0 + t - 2.0 * t * t) / 12.0
}

/// `(t*, δ²(t*))` with `t* = (1 + √7) / 6`.
pub fn xi_variance_argmax() -> (f64, f64) {
    let t = AsymptoticConstants::t_star();
    (t, xi_variance_unchecked(t))
}

fn pair_min(a: f64, b: f64) -> f64 {
    (a / b).min(b / a)
}

/// Centred symmetric kernel of degree three:
/// `(1{m(x,y) < z} + 1{m(x,z) < y} + 1{m(y,z) < x}) / 3 - 1/2`.
pub fn degree3_kernel(x: f64, y: f64, z: f64) -> Result<f64> {
    for v in [x, y, z] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::Domain {
                what: "degree3_kernel",
                value: v,
            });
        }
    }
    let ind = |c: bool| if c { 1.0 } else { 0.0 };
    let hits = ind(pair_min(x, y) < z) + ind(pair_min(x, z) < y) + ind(pair_min(y, z) < x);
    Ok(hits / 3.0 - 0.5)
}

/// Pair kernel at threshold `t`: `1{m(x,y) < t} - 1{x < t}/2 - 1{y < t}/2`.
pub fn pair_kernel(x: f64, y: f64, t: f64) -> Result<f64> {
    for v in [x, y] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::Domain {
                what: "pair_kernel",
                value: v,
            });
        }
    }
    let ind = |c: bool| if c { 1.0 } else { 0.0 };
    Ok(ind(pair_min(x, y) < t) - 0.5 * ind(x < t) - 0.5 * ind(y < t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_values() {
        assert_eq!(psi(1.0).unwrap(), 1.0 / 6.0);
        assert_eq!(psi(0.0).unwrap(), 1.0 / 6.0);
        let e = core::f64::consts::E;
        assert!((psi(1.0 / e).unwrap() - (1.0 / 6.0 - 2.0 / (3.0 * e))).abs() < 1e-15);
        assert!((psi(1.0 / e).unwrap() + 0.078_586_3).abs() < 1e-7);
        assert!(psi(1.5).is_err());
        assert!(psi(-0.1).is_err());
    }

    #[test]
    fn xi_values() {
        assert_eq!(xi(0.25, 0.5).unwrap(), -0.125);
        for t in [0.1, 0.5, 0.9] {
            assert!((xi(t, t).unwrap() - (t * t - t / 2.0)).abs() < 1e-15);
        }
        assert!(xi(0.5, 0.0).is_err());
        assert!(xi(0.5, 1.0).is_err());
        assert!(xi(1.2, 0.5).is_err());
    }

    #[test]
    fn xi_variance_values() {
        assert!((xi_variance(0.5).unwrap() - 1.0 / 24.0).abs() < 1e-16);
        assert_eq!(xi_variance(1.0).unwrap(), 0.0);
        let (t, v) = xi_variance_argmax();
        assert!((t - 0.607_625).abs() < 1e-6);
        assert!((v - 0.04402).abs() < 5e-5);
        assert!((1.0 + 2.0 * t - 6.0 * t * t).abs() < 1e-12);
    }

    #[test]
    fn degree3_kernel_example_and_symmetry() {
        let v = degree3_kernel(0.2, 0.5, 0.41).unwrap();
        assert!((v - 1.0 / 6.0).abs() < 1e-15);
        let args = [0.2, 0.5, 0.41];
        let perms = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        for p in perms {
            assert_eq!(degree3_kernel(args[p[0]], args[p[1]], args[p[2]]).unwrap(), v);
        }
        assert!(degree3_kernel(0.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn pair_kernel_is_symmetric() {
        assert_eq!(
            pair_kernel(0.2, 0.7, 0.4).unwrap(),
            pair_kernel(0.7, 0.2, 0.4).unwrap()
        );
        // m = 0.2/0.7 < 0.4, x < 0.4, y > 0.4
        assert_eq!(pair_kernel(0.2, 0.7, 0.4).unwrap(), 0.5);
    }
}
