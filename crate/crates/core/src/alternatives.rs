//! Parametric alternatives on `(0, 1)`.
//!
//! Every family here is linear in its parameter: the density is
//! `g(x, θ) = 1 + θ h(x)` with a tangent `h` that integrates to zero, and the
//! cdf is `G(x, θ) = x + θ ∫_0^x h`. At `θ = 0` all of them reduce to the
//! uniform law, the `λ = 1` member of the null family.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::kernel::{psi_unchecked, xi_unchecked};
use crate::model::{validate_sample, AsymptoticConstants, Sample};
use crate::numeric::{golden_min, increasing_root};
use crate::rng::{branch, open_unit, stream_rng};

/// Quantile bracket `[ε, 1 - ε]`.
const QUANTILE_EPS: f64 = 1e-15;
const QUANTILE_TOL: f64 = 1e-13;

/// Relative safety margin applied to numerically derived `θ` bounds.
const THETA_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `G1(x, θ) = (1 - θ) x + θ x^r`, `r > 1`, `θ ∈ [0, 1]`.
    Contamination { r: f64 },
    /// `G2(x, θ) = x - θ sin(πx)`, `θ ∈ [0, 1/π)`.
    Sine,
    /// `G3(x, θ) = x + θ ∫_0^x ψ`, `θ ∈ [0, 1]`.
    PsiTangent,
    /// Tangent `c1 ψ(x) + c2 (ln x + 1)`; optimal direction for `I_n`.
    LaoIntegral { c1: f64, c2: f64, theta_max: f64 },
    /// Tangent `c3 ξ(x; t0) + c4 (ln x + 1)` with `t0 = (1 + √7)/6`;
    /// optimal direction for `D_n`.
    LaoKolmogorov {
        c3: f64,
        c4: f64,
        t0: f64,
        theta_max: f64,
    },
}

/// Admissible `θ` values: `[0, hi]`, or `[0, hi)` when `hi_open`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaRange {
    pub hi: f64,
    pub hi_open: bool,
}

impl ThetaRange {
    pub fn contains(&self, theta: f64) -> bool {
        theta >= 0.0 && if self.hi_open { theta < self.hi } else { theta <= self.hi }
    }
}

impl Family {
    pub fn g1(r: f64) -> Result<Self> {
        if r.is_finite() && r > 1.0 {
            Ok(Family::Contamination { r })
        } else {
            Err(Error::InvalidParameter(format!(
                "contamination exponent r must exceed 1, got {r}"
            )))
        }
    }

    pub fn g2() -> Self {
        Family::Sine
    }

    pub fn g3() -> Self {
        Family::PsiTangent
    }

    /// Family with tangent `c1 ψ + c2 (ln x + 1)`, `c1 > 0`.
    ///
    /// For `c2 > 0` the tangent is unbounded below near zero and only
    /// `θ = 0` keeps the density nonnegative.
    pub fn lao_integral(c1: f64, c2: f64) -> Result<Self> {
        if !(c1.is_finite() && c1 > 0.0 && c2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lao-i needs c1 > 0 and finite c2, got c1 = {c1}, c2 = {c2}"
            )));
        }
        let mut fam = Family::LaoIntegral {
            c1,
            c2,
            theta_max: 0.0,
        };
        let bound = if c2 > 0.0 { 0.0 } else { fam.nonnegativity_bound(&[]) };
        if let Family::LaoIntegral { theta_max, .. } = &mut fam {
            *theta_max = bound;
        }
        Ok(fam)
    }

    /// Family with tangent `c3 ξ(·; t0) + c4 (ln x + 1)`, `c3 > 0`.
    pub fn lao_kolmogorov(c3: f64, c4: f64) -> Result<Self> {
        if !(c3.is_finite() && c3 > 0.0 && c4.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lao-d needs c3 > 0 and finite c4, got c3 = {c3}, c4 = {c4}"
            )));
        }
        let t0 = AsymptoticConstants::t_star();
        let mut fam = Family::LaoKolmogorov {
            c3,
            c4,
            t0,
            theta_max: 0.0,
        };
        let bound = if c4 > 0.0 {
            0.0
        } else {
            // the tangent jumps down by c3/2 when approaching t0 from the left
            fam.nonnegativity_bound(&[t0 * (1.0 - f64::EPSILON), t0])
        };
        if let Family::LaoKolmogorov { theta_max, .. } = &mut fam {
            *theta_max = bound;
        }
        Ok(fam)
    }

    /// The three alternatives of the efficiency tables at their defaults
    /// plus the two optimal-direction families.
    pub fn builtins() -> Vec<Family> {
        alloc::vec![
            Family::Contamination { r: 2.0 + libm::sqrt(3.0) },
            Family::Sine,
            Family::PsiTangent,
            Family::lao_integral(1.0, 0.0).expect("valid defaults"),
            Family::lao_kolmogorov(1.0, 0.0).expect("valid defaults"),
        ]
    }

    /// Largest `θ` with `1 + θ h >= 0` on `(0, 1)`, found by a grid scan
    /// and golden-section polish of `min h`.
    fn nonnegativity_bound(&self, extra: &[f64]) -> f64 {
        const GRID: usize = 10_000;
        let mut best = (f64::INFINITY, 0.5);
        let mut best_i = None;
        for i in 0..GRID {
            let x = (i as f64 + 0.5) / GRID as f64;
            let v = self.tangent_unchecked(x);
            if v < best.0 {
                best = (v, x);
                best_i = Some(i);
            }
        }
        for k in 1..=300 {
            let x = libm::pow(10.0, -(k as f64));
            let v = self.tangent_unchecked(x);
            if v < best.0 {
                best = (v, x);
                best_i = None;
            }
        }
        for &x in extra {
            let v = self.tangent_unchecked(x);
            if v < best.0 {
                best = (v, x);
                best_i = None;
            }
        }
        if let Some(i) = best_i {
            let lo = i.saturating_sub(1) as f64 / GRID as f64;
            let hi = ((i + 2) as f64 / GRID as f64).min(1.0);
            let e = golden_min(|x| self.tangent_unchecked(x), lo, hi, 1e-13);
            if e.value < best.0 {
                best = (e.value, e.x);
            }
        }
        if best.0 >= 0.0 {
            f64::INFINITY
        } else {
            -1.0 / best.0 * (1.0 - THETA_MARGIN)
        }
    }

    /// Short label, e.g. `G1(r=3.7)`.
    pub fn id(&self) -> String {
        match *self {
            Family::Contamination { r } => format!("G1(r={r})"),
            Family::Sine => String::from("G2"),
            Family::PsiTangent => String::from("G3"),
            Family::LaoIntegral { c1, c2, .. } => format!("LAO-I(c1={c1},c2={c2})"),
            Family::LaoKolmogorov { c3, c4, .. } => format!("LAO-D(c3={c3},c4={c4})"),
        }
    }

    pub fn theta_range(&self) -> ThetaRange {
        match *self {
            Family::Contamination { .. } | Family::PsiTangent => ThetaRange {
                hi: 1.0,
                hi_open: false,
            },
            Family::Sine => ThetaRange {
                hi: 1.0 / PI,
                hi_open: true,
            },
            Family::LaoIntegral { theta_max, .. } | Family::LaoKolmogorov { theta_max, .. } => {
                ThetaRange {
                    hi: theta_max,
                    hi_open: false,
                }
            }
        }
    }

    pub fn check_theta(&self, theta: f64) -> Result<()> {
        if self.theta_range().contains(theta) {
            Ok(())
        } else {
            Err(Error::ThetaOutOfRange {
                family: self.id(),
                theta,
            })
        }
    }

    /// Points in `(0, 1)` where the density or tangent jumps.
    pub fn breakpoints(&self) -> &[f64] {
        match self {
            Family::LaoKolmogorov { t0, .. } => core::slice::from_ref(t0),
            _ => &[],
        }
    }

    /// Tangent `h(x) = ∂g/∂θ` at `θ = 0`, for `x ∈ [0, 1]`.
    pub fn tangent(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        Ok(self.tangent_unchecked(x))
    }

    pub(crate) fn tangent_unchecked(&self, x: f64) -> f64 {
        match *self {
            Family::Contamination { r } => r * libm::pow(x, r - 1.0) - 1.0,
            Family::Sine => -PI * libm::cos(PI * x),
            Family::PsiTangent => psi_unchecked(x),
            Family::LaoIntegral { c1, c2, .. } => c1 * psi_unchecked(x) + log_part(c2, x),
            Family::LaoKolmogorov { c3, c4, t0, .. } => c3 * xi_unchecked(x, t0) + log_part(c4, x),
        }
    }

    /// `∫_0^x h`, so that `G(x, θ) = x + θ ∫_0^x h`.
    pub fn tangent_integral(&self, x: f64) -> f64 {
        match *self {
            Family::Contamination { r } => libm::pow(x, r) - x,
            Family::Sine => -libm::sin(PI * x),
            Family::PsiTangent => psi_integral(x),
            Family::LaoIntegral { c1, c2, .. } => c1 * psi_integral(x) + log_part_integral(c2, x),
            Family::LaoKolmogorov { c3, c4, t0, .. } => {
                c3 * xi_integral(x, t0) + log_part_integral(c4, x)
            }
        }
    }

    /// Density `g(x, θ)`.
    pub fn density(&self, x: f64, theta: f64) -> Result<f64> {
        self.check_theta(theta)?;
        check_x(x)?;
        Ok(self.density_unchecked(x, theta))
    }

    pub(crate) fn density_unchecked(&self, x: f64, theta: f64) -> f64 {
        if theta == 0.0 {
            1.0
        } else {
            1.0 + theta * self.tangent_unchecked(x)
        }
    }

    /// Distribution function `G(x, θ)`; `x` is clamped to `[0, 1]`.
    pub fn cdf(&self, x: f64, theta: f64) -> Result<f64> {
        self.check_theta(theta)?;
        if x.is_nan() {
            return Err(Error::Domain {
                what: "cdf",
                value: x,
            });
        }
        Ok(self.cdf_unchecked(x.clamp(0.0, 1.0), theta))
    }

    pub(crate) fn cdf_unchecked(&self, x: f64, theta: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            x + theta * self.tangent_integral(x)
        }
    }

    /// Inverse of the cdf for `p ∈ (0, 1)`, solved to `|G(x) - p| <= 1e-13`.
    pub fn quantile(&self, p: f64, theta: f64) -> Result<f64> {
        self.check_theta(theta)?;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain {
                what: "quantile probability",
                value: p,
            });
        }
        self.quantile_unchecked(p, theta)
    }

    fn quantile_unchecked(&self, p: f64, theta: f64) -> Result<f64> {
        if theta == 0.0 {
            return Ok(p.clamp(QUANTILE_EPS, 1.0 - QUANTILE_EPS));
        }
        increasing_root(
            |x| self.cdf_unchecked(x, theta) - p,
            |x| self.density_unchecked(x, theta),
            QUANTILE_EPS,
            1.0 - QUANTILE_EPS,
            QUANTILE_TOL,
        )
    }

    /// `n` draws by inverse transform using a caller-supplied generator.
    pub fn sample_with<R: RngCore>(&self, theta: f64, n: usize, rng: &mut R) -> Result<Sample> {
        self.check_theta(theta)?;
        let mut raw = Vec::with_capacity(n);
        for _ in 0..n {
            raw.push(self.quantile_unchecked(open_unit(rng), theta)?);
        }
        validate_sample(&raw)
    }

    /// `n` draws from a generator seeded by `seed`; equal seeds give equal samples.
    pub fn sample(&self, theta: f64, n: usize, seed: u64) -> Result<Sample> {
        self.sample_with(theta, n, &mut stream_rng(seed, branch::SAMPLE, 0))
    }
}

fn check_x(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "alternative argument",
            value: x,
        })
    }
}

fn log_part(c: f64, x: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * (libm::log(x) + 1.0)
    }
}

fn log_part_integral(c: f64, x: f64) -> f64 {
    // ∫_0^x (ln u + 1) du = x ln x
    if c == 0.0 || x == 0.0 {
        0.0
    } else {
        c * x * libm::log(x)
    }
}

fn psi_integral(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    x / 6.0 + x * x * libm::log(x) / 3.0 - x * x / 6.0
}

fn xi_integral(x: f64, t: f64) -> f64 {
    let tail = 0.5 * t * x * x - 0.5 * t * x;
    if x < t {
        0.5 * x - x * x / (2.0 * t) + tail
    } else {
        tail
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Parses `g1:r=3.7`, `g2`, `g3`, `lao-i[:c1=..,c2=..]`, `lao-d[:c3=..,c4=..]`.
    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (name, params) = match spec.split_once(':') {
            Some((n, p)) => (n, p),
            None => (spec, ""),
        };
        let mut pairs = Vec::new();
        for item in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::UnknownFamily(String::from(spec)))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::UnknownFamily(String::from(spec)))?;
            pairs.push((k.trim(), v));
        }
        let get = |key: &str, default: Option<f64>| -> Result<f64> {
            pairs
                .iter()
                .find(|(k, _)| *k == key)
                .map(|&(_, v)| v)
                .or(default)
                .ok_or_else(|| Error::UnknownFamily(String::from(spec)))
        };
        let allowed: &[&str] = match name.to_ascii_lowercase().as_str() {
            "g1" => &["r"],
            "lao-i" => &["c1", "c2"],
            "lao-d" => &["c3", "c4"],
            _ => &[],
        };
        if let Some((k, _)) = pairs.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(Error::InvalidParameter(format!(
                "unknown parameter `{k}` for family `{name}`"
            )));
        }
        match name.to_ascii_lowercase().as_str() {
            "g1" => Family::g1(get("r", None)?),
            "g2" => Ok(Family::g2()),
            "g3" => Ok(Family::g3()),
            "lao-i" => Family::lao_integral(get("c1", Some(1.0))?, get("c2", Some(0.0))?),
            "lao-d" => Family::lao_kolmogorov(get("c3", Some(1.0))?, get("c4", Some(0.0))?),
            _ => Err(Error::UnknownFamily(String::from(spec))),
        }
    }
}
