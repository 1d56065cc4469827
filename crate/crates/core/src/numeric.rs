//! Small one-dimensional numerical helpers.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Point and value found by a one-dimensional search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
}

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`.
///
/// Stops when the bracket is narrower than `x_tol` (absolute), or after the
/// bracket stops shrinking in floating point.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, x_tol: f64) -> Extremum {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= x_tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        Extremum { x: x1, value: f1 }
    } else {
        Extremum { x: x2, value: f2 }
    }
}

/// Golden-section search for a maximum.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, x_tol: f64) -> Extremum {
    let e = golden_min(|x| -f(x), a, b, x_tol);
    Extremum {
        x: e.x,
        value: -e.value,
    }
}

/// Maximizes `f` over `[a, b]` by scanning `points` equispaced interior
/// nodes and refining the best one with golden-section search on its two
/// neighbouring cells.
pub fn grid_then_golden_max<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    points: usize,
    x_tol: f64,
) -> Extremum {
    let step = (b - a) / (points + 1) as f64;
    let mut best = Extremum {
        x: a + step,
        value: f64::NEG_INFINITY,
    };
    let mut best_i = 1;
    for i in 1..=points {
        let x = a + step * i as f64;
        let v = f(x);
        if v > best.value {
            best = Extremum { x, value: v };
            best_i = i;
        }
    }
    let lo = a + step * (best_i - 1) as f64;
    let hi = a + step * (best_i + 1) as f64;
    let refined = golden_max(&mut f, lo, hi, x_tol);
    if refined.value >= best.value {
        refined
    } else {
        best
    }
}

/// Root of a continuous increasing function `f` in `[lo, hi]` by safeguarded
/// Newton iteration with bisection fallback. `df` is the derivative.
pub fn increasing_root<F, D>(f: F, df: D, mut lo: f64, mut hi: f64, f_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo >= 0.0 {
        return Ok(lo);
    }
    if f_hi <= 0.0 {
        return Ok(hi);
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..300 {
        let fx = f(x);
        if fx.abs() <= f_tol {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 2.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            return Ok(x);
        }
        let d = df(x);
        let newton = x - fx / d;
        x = if d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::NoConvergence("increasing_root"))
}

/// Standard normal upper tail `P(Z > z)`.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / core::f64::consts::SQRT_2)
}

/// Standard normal distribution function.
pub fn normal_cdf(z: f64) -> f64 {
    normal_sf(-z)
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_quadratic_minimum() {
        let e = golden_min(|x| (x - 0.3) * (x - 0.3) + 2.0, 0.0, 1.0, 1e-12);
        assert!((e.x - 0.3).abs() < 1e-7);
        assert!((e.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn grid_search_escapes_local_maximum() {
        // local max at 0.2 (height 1), global at 0.8 (height 2)
        let f = |x: f64| {
            libm::exp(-200.0 * (x - 0.2) * (x - 0.2)) + 2.0 * libm::exp(-200.0 * (x - 0.8) * (x - 0.8))
        };
        let e = grid_then_golden_max(f, 0.0, 1.0, 101, 1e-12);
        assert!((e.x - 0.8).abs() < 1e-6);
    }

    #[test]
    fn root_of_cubic() {
        let r = increasing_root(|x| x * x * x - 0.125, |x| 3.0 * x * x, 0.0, 1.0, 1e-15).unwrap();
        assert!((r - 0.5).abs() < 1e-14);
    }

    #[test]
    fn normal_tail_values() {
        assert!((normal_sf(0.0) - 0.5).abs() < 1e-16);
        assert!((normal_sf(1.959_963_984_540_054) - 0.025).abs() < 1e-12);
        assert!((normal_cdf(-1.644_853_626_951_472_2) - 0.05).abs() < 1e-12);
    }

    #[test]
    fn wilson_contains_point_estimate() {
        let (lo, hi) = wilson_interval(500, 10_000, Z_99);
        assert!(lo < 0.05 && 0.05 < hi);
        assert!((hi - lo) > 0.01 && (hi - lo) < 0.013);
    }
}
