//! Globally adaptive Gauss-Kronrod (10/21 point) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate meets `max(abs, rel * |I|)`. Weak endpoint singularities such as
//! `ln x` or `ln^2 x` at zero are handled by repeated bisection toward the
//! singular end; jump discontinuities should be passed as break points.

#![allow(clippy::excessive_precision)]

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_715_953_595_151,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Stopping rule for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            max_intervals: 10_000,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-12, 1e-10)
    }
}

/// Integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = 0.0;
    let mut kron = fc * WGK[10];
    let mut res_abs = kron.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kron += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kron;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let width = half.abs();
    let value = kron * half;
    res_abs *= width;
    res_asc *= width;
    let mut error = ((kron - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * libm::pow(200.0 * error / res_asc, 1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { a, b, value, error }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    integrate_with_breaks(f, a, b, &[], tol)
}

/// Integrates `f` over `[a, b]`, starting from a partition at `breaks`.
///
/// Break points outside `(a, b)` are ignored. Use them for jumps and kinks.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Estimate> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain {
            what: "integration limits",
            value: if a.is_finite() { b } else { a },
        });
    }
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    let mut knots: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&x| x > lo && x < hi)
        .collect();
    knots.sort_unstable_by(f64::total_cmp);
    knots.dedup();

    let mut heap = BinaryHeap::new();
    let mut left = lo;
    for &k in knots.iter().chain(core::iter::once(&hi)) {
        heap.push(kronrod(&f, left, k));
        left = k;
    }

    // Segments too narrow to split keep their error but leave the queue.
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    let mut count = heap.len();
    loop {
        let (value, error) = heap.iter().fold((frozen_value, frozen_error), |(v, e), s| {
            (v + s.value, e + s.error)
        });
        if !value.is_finite() {
            return Err(Error::QuadratureFailure {
                estimate: value,
                error,
            });
        }
        if error <= tol.abs.max(tol.rel * value.abs()) || heap.is_empty() {
            return Ok(Estimate {
                value: sign * value,
                error,
                intervals: count,
            });
        }
        if count >= tol.max_intervals {
            return Err(Error::QuadratureFailure {
                estimate: sign * value,
                error,
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        heap.push(kronrod(&f, worst.a, mid));
        heap.push(kronrod(&f, mid, worst.b));
        count += 1;
    }
}

/// Integral over `[a, b]` with default tolerance, returning only the value.
pub fn quad<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    integrate(f, a, b, Tolerance::default()).map(|e| e.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact_on_one_panel() {
        for k in 0..=30 {
            let est = integrate(|x| libm::pow(x, k as f64), 0.0, 1.0, Tolerance::default()).unwrap();
            assert!((est.value - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "k = {k}");
        }
    }

    #[test]
    fn log_singularities_at_zero() {
        let tol = Tolerance::new(1e-13, 1e-12);
        let v = integrate(libm::log, 0.0, 1.0, tol).unwrap().value;
        assert!((v + 1.0).abs() < 1e-12);
        let v = integrate(|x| libm::log(x) * libm::log(x), 0.0, 1.0, tol).unwrap().value;
        assert!((v - 2.0).abs() < 1e-11);
        let v = integrate(|x| x * libm::log(x), 0.0, 1.0, tol).unwrap().value;
        assert!((v + 0.25).abs() < 1e-13);
    }

    #[test]
    fn jump_with_break_point() {
        let step = |x: f64| if x < 0.3 { 1.0 } else { -2.0 };
        let v = integrate_with_breaks(step, 0.0, 1.0, &[0.3], Tolerance::default())
            .unwrap()
            .value;
        assert!((v - (0.3 - 1.4)).abs() < 1e-15);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let v = quad(|x| x * x, 1.0, 0.0).unwrap();
        assert!((v + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn non_integrable_reports_failure() {
        let r = integrate(|x| 1.0 / x, 0.0, 1.0, Tolerance::new(1e-12, 1e-12));
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }
}
