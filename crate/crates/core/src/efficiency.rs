//! Local Bahadur efficiency of the two statistics.
//!
//! For an alternative with tangent `h`:
//!
//! * the Kullback-Leibler distance to the null family behaves like
//!   `2K(θ) ~ θ² [∫h² - (∫h ln x)²]`;
//! * the integral statistic drifts by `b_I(θ) ~ 3θ ∫ψh` and its exact slope is
//!   `c_I ~ b_I² / (9 Δ²) = (108/5) b_I²`;
//! * the Kolmogorov statistic drifts by `b_D(θ) ~ 2θ sup_t |∫ξ(·;t) h|` and its
//!   exact slope is `c_D ~ b_D² / (4 δ²(t*))`.
//!
//! The efficiency is the ratio of the `θ²` coefficients of `c_T` and `2K`.
//! Every coefficient is computed by quadrature from the tangent; the closed
//! forms for the contamination family are checked against these in tests.

use alloc::string::String;
use alloc::vec::Vec;

use crate::alternatives::Family;
use crate::error::{Error, Result};
use crate::kernel::{psi_unchecked, xi_unchecked};
use crate::model::{AsymptoticConstants, Statistic};
use crate::numeric::{golden_max, grid_then_golden_max};
use crate::quad::{integrate_with_breaks, Tolerance};

/// Quadrature tolerance for efficiency coefficients.
pub const COEFF_TOL: Tolerance = Tolerance::new(1e-14, 1e-12);
/// Interior points of the `t`-grid used for `sup_t`.
pub const DEFAULT_T_GRID: usize = 2001;
/// θ ladder for extrapolating `θ -> 0` limits.
pub const RICHARDSON_THETAS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

const T_TOL: f64 = 1e-12;

/// Looser tolerance for diagnostics whose exact value is near zero.
const GAP_TOL: Tolerance = Tolerance::new(1e-13, 1e-10);

fn integrate_unit<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: Tolerance) -> Result<f64> {
    integrate_with_breaks(f, 0.0, 1.0, breaks, tol).map(|e| e.value)
}

fn with_break(family: &Family, extra: f64) -> Vec<f64> {
    let mut b: Vec<f64> = family.breakpoints().to_vec();
    b.push(extra);
    b
}

/// Kullback-Leibler distance from an alternative to the null family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlResult {
    pub theta: f64,
    /// Null shape minimizing the divergence.
    pub lambda_star: f64,
    pub k_value: f64,
    /// `c_K` in `2K(θ) ~ c_K θ²`.
    pub local_coeff: f64,
}

/// `∫_0^1 h(x) ln x dx`.
pub fn tangent_log_moment(family: &Family) -> Result<f64> {
    integrate_unit(
        |x| family.tangent_unchecked(x) * libm::log(x),
        family.breakpoints(),
        COEFF_TOL,
    )
}

/// `(1 + u) ln(1 + u) - u`, nonnegative and `O(u²)`.
fn entropy_excess(u: f64) -> f64 {
    if u <= -1.0 {
        1.0
    } else {
        (1.0 + u) * libm::log1p(u) - u
    }
}

/// Exact divergence `K(θ) = inf_λ ∫ g ln(g / (λ x^{λ-1}))`.
///
/// The infimum is attained at `λ* = -1 / ∫ g ln x` and equals
/// `∫ g ln g + ∫ g ln x + ln(-∫ g ln x) + 1`. With `g = 1 + θh` and
/// `∫h = 0` this is evaluated as `∫ φ(θh) + θL + ln(1 - θL)`, where
/// `φ(u) = (1+u) ln(1+u) - u` and `L = ∫ h ln x`, which keeps full relative
/// accuracy as `θ -> 0`.
pub fn kl_exact(family: &Family, theta: f64) -> Result<KlResult> {
    family.check_theta(theta)?;
    let local_coeff = kl_local_coeff(family)?;
    if theta == 0.0 {
        return Ok(KlResult {
            theta,
            lambda_star: 1.0,
            k_value: 0.0,
            local_coeff,
        });
    }
    let log_moment = tangent_log_moment(family)?;
    let mean_log = -1.0 + theta * log_moment;
    if mean_log >= 0.0 {
        return Err(Error::Domain {
            what: "kl_exact: E ln X must be negative",
            value: mean_log,
        });
    }
    let excess = integrate_unit(
        |x| entropy_excess(theta * family.tangent_unchecked(x)),
        family.breakpoints(),
        Tolerance::new(0.0, 1e-12),
    )?;
    let y = theta * log_moment;
    let k_value = (excess + (y + libm::log1p(-y))).max(0.0);
    Ok(KlResult {
        theta,
        lambda_star: -1.0 / mean_log,
        k_value,
        local_coeff,
    })
}

/// `∫h² - (∫h ln x)²`, the `θ²` coefficient of `2K(θ)`.
pub fn kl_local_coeff(family: &Family) -> Result<f64> {
    let h2 = integrate_unit(
        |x| {
            let h = family.tangent_unchecked(x);
            h * h
        },
        family.breakpoints(),
        COEFF_TOL,
    )?;
    let l = tangent_log_moment(family)?;
    Ok(h2 - l * l)
}

/// Limit of `v(θ)` from values at `θ`, `θ/2`, `θ/4`, assuming
/// `v(θ) = v0 + a θ + b θ² + O(θ³)`.
pub fn richardson(v: [f64; 3]) -> f64 {
    let r1 = 2.0 * v[1] - v[0];
    let r2 = 2.0 * v[2] - v[1];
    (4.0 * r2 - r1) / 3.0
}

/// Extrapolation of `2K(θ)/θ²` along [`RICHARDSON_THETAS`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlExtrapolation {
    pub thetas: [f64; 3],
    pub ratios: [f64; 3],
    pub limit: f64,
    /// `log2` of successive error ratios; `None` when the errors are at
    /// round-off level.
    pub observed_order: Option<f64>,
}

pub fn kl_local_extrapolated(family: &Family) -> Result<KlExtrapolation> {
    let thetas = RICHARDSON_THETAS;
    let mut ratios = [0.0; 3];
    for (r, &th) in ratios.iter_mut().zip(&thetas) {
        *r = 2.0 * kl_exact(family, th)?.k_value / (th * th);
    }
    let limit = richardson(ratios);
    let e0 = (ratios[0] - limit).abs();
    let e1 = (ratios[1] - limit).abs();
    let observed_order = if e1 > 1e-12 * limit.abs().max(1e-300) && e0 > 0.0 {
        Some(libm::log2(e0 / e1))
    } else {
        None
    };
    Ok(KlExtrapolation {
        thetas,
        ratios,
        limit,
        observed_order,
    })
}

/// Local efficiency summary for one statistic and one alternative.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyReport {
    pub statistic: Statistic,
    pub family: String,
    /// Coefficient of `θ` in the drift `b(θ)`.
    pub b_coeff: f64,
    /// Coefficient of `θ²` in the exact slope `c(θ)`.
    pub slope_coeff: f64,
    /// Coefficient of `θ²` in `2K(θ)`.
    pub kl_coeff: f64,
    pub efficiency: f64,
    /// Threshold attaining the supremum in the Kolmogorov drift.
    pub argmax_t: Option<f64>,
}

/// `∫ψh`.
pub fn psi_moment(family: &Family) -> Result<f64> {
    integrate_unit(
        |x| psi_unchecked(x) * family.tangent_unchecked(x),
        family.breakpoints(),
        COEFF_TOL,
    )
}

/// Slope and efficiency of the integral statistic.
pub fn slope_i(family: &Family) -> Result<EfficiencyReport> {
    let b_coeff = 3.0 * psi_moment(family)?;
    let slope_coeff = b_coeff * b_coeff / (9.0 * AsymptoticConstants::delta2_i());
    let kl_coeff = kl_local_coeff(family)?;
    Ok(EfficiencyReport {
        statistic: Statistic::Integral,
        family: family.id(),
        b_coeff,
        slope_coeff,
        kl_coeff,
        efficiency: slope_coeff / kl_coeff,
        argmax_t: None,
    })
}

/// `∫ ξ(s; t) h(s) ds`, the local drift of `H_n(t) - F_n(t)` per unit `θ`, halved.
pub fn xi_moment(family: &Family, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain {
            what: "xi_moment threshold",
            value: t,
        });
    }
    integrate_unit(
        |s| xi_unchecked(s, t) * family.tangent_unchecked(s),
        &with_break(family, t),
        COEFF_TOL,
    )
}

/// Slope and efficiency of the Kolmogorov statistic, using the default grid.
pub fn slope_d(family: &Family) -> Result<EfficiencyReport> {
    slope_d_with_grid(family, DEFAULT_T_GRID)
}

/// As [`slope_d`] with `grid` interior points for the scan over `t`.
pub fn slope_d_with_grid(family: &Family, grid: usize) -> Result<EfficiencyReport> {
    let mut failure = None;
    let best = grid_then_golden_max(
        |t| match xi_moment(family, t) {
            Ok(v) => v.abs(),
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        1.0,
        grid,
        T_TOL,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let b_coeff = 2.0 * best.value;
    let slope_coeff = b_coeff * b_coeff / (4.0 * AsymptoticConstants::delta2_d_max());
    let kl_coeff = kl_local_coeff(family)?;
    Ok(EfficiencyReport {
        statistic: Statistic::Kolmogorov,
        family: family.id(),
        b_coeff,
        slope_coeff,
        kl_coeff,
        efficiency: slope_coeff / kl_coeff,
        argmax_t: Some(best.x),
    })
}

pub fn efficiency(statistic: Statistic, family: &Family) -> Result<EfficiencyReport> {
    match statistic {
        Statistic::Integral => slope_i(family),
        Statistic::Kolmogorov => slope_d(family),
    }
}

/// Almost-sure limit of `H_n(t) - F_n(t)` under `G(·, θ)`:
/// `2 ∫ g(y, θ) G(ty, θ) dy - G(t, θ)`.
pub fn b_d_finite(family: &Family, theta: f64, t: f64) -> Result<f64> {
    family.check_theta(theta)?;
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain {
            what: "b_d_finite threshold",
            value: t,
        });
    }
    let mut breaks: Vec<f64> = family.breakpoints().to_vec();
    breaks.extend(family.breakpoints().iter().map(|&b| b / t));
    let inner = integrate_unit(
        |y| family.density_unchecked(y, theta) * family.cdf_unchecked(t * y, theta),
        &breaks,
        COEFF_TOL,
    )?;
    Ok(2.0 * inner - family.cdf_unchecked(t, theta))
}

/// `sup_t |b_d_finite(θ, t)|` with its maximizer.
pub fn b_d_finite_sup(family: &Family, theta: f64, grid: usize) -> Result<(f64, f64)> {
    family.check_theta(theta)?;
    let mut failure = None;
    let best = grid_then_golden_max(
        |t| match b_d_finite(family, theta, t) {
            Ok(v) => v.abs(),
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        1.0,
        grid,
        T_TOL,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok((best.x, best.value)),
    }
}

/// The tangent with its component along the null score `ln x + 1` removed:
/// `h0(x) = h(x) - (ln x + 1) ∫ h ln u du`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H0Transform {
    pub family: Family,
    /// `∫_0^1 h(u) ln u du`
    pub log_coeff: f64,
}

/// Absolute discrepancies in the identities satisfied by `h0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H0Identities {
    /// `|∫h² - (∫h ln x)² - ∫h0²|`
    pub kl_gap: f64,
    /// `|∫ψh - ∫ψh0|`
    pub psi_gap: f64,
    /// `max_t |∫ξ(·;t)h - ∫ξ(·;t)h0|`
    pub xi_gap: f64,
    /// `|∫h0 (ln x + 1)|`
    pub orthogonality: f64,
}

pub fn h0_transform(family: &Family) -> Result<H0Transform> {
    Ok(H0Transform {
        family: *family,
        log_coeff: tangent_log_moment(family)?,
    })
}

impl H0Transform {
    pub fn eval(&self, x: f64) -> f64 {
        let h = self.family.tangent_unchecked(x);
        if self.log_coeff == 0.0 {
            h
        } else {
            h - (libm::log(x) + 1.0) * self.log_coeff
        }
    }

    pub fn identities(&self, t_grid: &[f64]) -> Result<H0Identities> {
        let fam = &self.family;
        let br = fam.breakpoints();
        let h0_sq = integrate_unit(
            |x| {
                let v = self.eval(x);
                v * v
            },
            br,
            GAP_TOL,
        )?;
        let kl_gap = (kl_local_coeff(fam)? - h0_sq).abs();
        let psi_h0 = integrate_unit(|x| psi_unchecked(x) * self.eval(x), br, GAP_TOL)?;
        let psi_gap = (psi_moment(fam)? - psi_h0).abs();
        let mut xi_gap = 0.0f64;
        for &t in t_grid {
            let xi_h0 = integrate_unit(
                |s| xi_unchecked(s, t) * self.eval(s),
                &with_break(fam, t),
                GAP_TOL,
            )?;
            xi_gap = xi_gap.max((xi_moment(fam, t)? - xi_h0).abs());
        }
        let orthogonality =
            integrate_unit(|x| self.eval(x) * (libm::log(x) + 1.0), br, GAP_TOL)?.abs();
        Ok(H0Identities {
            kl_gap,
            psi_gap,
            xi_gap,
            orthogonality,
        })
    }
}

/// Outcome of a local-optimality check.
#[derive(Debug, Clone, PartialEq)]
pub struct LaoCheck {
    pub statistic: Statistic,
    pub family: String,
    pub is_lao: bool,
    pub efficiency: f64,
    /// Least-squares coefficient of the projection (`ψ` or `ξ(·; t*)`).
    pub c_projection: f64,
    /// Least-squares coefficient of `ln x + 1`.
    pub c_log: f64,
    /// `L2` norm of `h - c_projection·projection - c_log·(ln x + 1)`.
    pub residual_norm: f64,
}

/// Efficiency threshold for declaring local asymptotic optimality.
pub const LAO_THRESHOLD: f64 = 1.0 - 1e-6;

/// Computes the efficiency and fits `h` on the projection and the null score.
pub fn lao_check(statistic: Statistic, family: &Family) -> Result<LaoCheck> {
    let report = efficiency(statistic, family)?;
    let t0 = AsymptoticConstants::t_star();
    let projection = |x: f64| match statistic {
        Statistic::Integral => psi_unchecked(x),
        Statistic::Kolmogorov => xi_unchecked(x, t0),
    };
    let score = |x: f64| libm::log(x) + 1.0;
    let breaks = with_break(family, t0);
    let q = |f: &dyn Fn(f64) -> f64| integrate_unit(f, &breaks, COEFF_TOL);
    let h = |x: f64| family.tangent_unchecked(x);
    let a11 = q(&|x| projection(x) * projection(x))?;
    let a12 = q(&|x| projection(x) * score(x))?;
    let a22 = q(&|x| score(x) * score(x))?;
    let b1 = q(&|x| h(x) * projection(x))?;
    let b2 = q(&|x| h(x) * score(x))?;
    let det = a11 * a22 - a12 * a12;
    let c_projection = (b1 * a22 - b2 * a12) / det;
    let c_log = (a11 * b2 - a12 * b1) / det;
    let residual_sq = q(&|x| {
        let r = h(x) - c_projection * projection(x) - c_log * score(x);
        r * r
    })?;
    Ok(LaoCheck {
        statistic,
        family: family.id(),
        is_lao: report.efficiency >= LAO_THRESHOLD,
        efficiency: report.efficiency,
        c_projection,
        c_log,
        residual_norm: libm::sqrt(residual_sq.max(0.0)),
    })
}

/// Contamination exponent maximizing the efficiency of `statistic`.
///
/// Searches `r ∈ [1.05, 20]` on a coarse grid refined by golden section.
pub fn best_contamination(statistic: Statistic) -> Result<(f64, EfficiencyReport)> {
    let mut failure = None;
    let mut eval = |r: f64| match Family::g1(r).and_then(|f| efficiency(statistic, &f)) {
        Ok(rep) => rep.efficiency,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let coarse = grid_then_golden_max(&mut eval, 1.05, 20.0, 37, 1e-6);
    let refined = golden_max(&mut eval, (coarse.x - 0.5).max(1.05), coarse.x + 0.5, 1e-7);
    if let Some(e) = failure {
        return Err(e);
    }
    let r = if refined.value >= coarse.value {
        refined.x
    } else {
        coarse.x
    };
    let report = efficiency(statistic, &Family::g1(r)?)?;
    Ok((r, report))
}

/// One row of an efficiency table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub label: &'static str,
    pub report: EfficiencyReport,
    /// Maximizing contamination exponent, for the `G1` row.
    pub r_star: Option<f64>,
}

/// Efficiencies of `statistic` against `G1` (at its best `r`), `G2` and `G3`.
pub fn efficiency_table(statistic: Statistic) -> Result<Vec<TableRow>> {
    let (r, g1) = best_contamination(statistic)?;
    Ok(alloc::vec![
        TableRow {
            label: "G1",
            report: g1,
            r_star: Some(r),
        },
        TableRow {
            label: "G2",
            report: efficiency(statistic, &Family::g2())?,
            r_star: None,
        },
        TableRow {
            label: "G3",
            report: efficiency(statistic, &Family::g3())?,
            r_star: None,
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_divergence_is_zero() {
        for fam in Family::builtins() {
            let k = kl_exact(&fam, 0.0).unwrap();
            assert_eq!(k.k_value, 0.0);
            assert_eq!(k.lambda_star, 1.0);
        }
    }

    #[test]
    fn contamination_divergence_in_local_regime() {
        let g1 = Family::g1(2.0).unwrap();
        let k = kl_exact(&g1, 0.1).unwrap();
        let local = 0.5 * (1.0 / 12.0) * 0.01;
        assert!((k.k_value / local - 1.0).abs() < 0.15, "{}", k.k_value);
        assert!((k.local_coeff - 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn richardson_is_exact_for_quadratics() {
        let v = |t: f64| 3.0 + 2.0 * t - 5.0 * t * t;
        let lim = richardson([v(0.1), v(0.05), v(0.025)]);
        assert!((lim - 3.0).abs() < 1e-13);
    }

    #[test]
    fn h0_of_pure_score_vanishes() {
        // h = ln x + 1 is not a built-in direction; use lao-i with tiny c1
        // and compare against the exact log coefficient c1·0 + c2·1.
        let fam = Family::lao_integral(1e-300, 1.0).unwrap();
        let h0 = h0_transform(&fam).unwrap();
        assert!((h0.log_coeff - 1.0).abs() < 1e-10);
        for x in [0.01, 0.3, 0.9] {
            assert!(h0.eval(x).abs() < 1e-9);
        }
    }

    #[test]
    fn xi_moment_rejects_bad_threshold() {
        assert!(xi_moment(&Family::g2(), 0.0).is_err());
        assert!(xi_moment(&Family::g2(), 1.0).is_err());
    }

    #[test]
    fn b_d_finite_vanishes_under_null() {
        for t in [0.1, 0.5, 0.9] {
            assert!(b_d_finite(&Family::g2(), 0.0, t).unwrap().abs() < 1e-14);
        }
    }
}
