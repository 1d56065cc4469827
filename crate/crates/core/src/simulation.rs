//! Single-replication primitives and summaries for Monte Carlo calibration.
//!
//! Replication `k` under seed `s` always draws from `stream_rng(s, branch, k)`,
//! so a driver may evaluate replications in any order or in parallel and
//! still produce identical results.

use alloc::vec::Vec;

use crate::alternatives::Family;
use crate::error::{Error, Result};
use crate::model::{NullFamily, Statistic};
use crate::rng::{branch, stream_rng};

/// Minimum replication count for critical values.
pub const MIN_CRITICAL_REPS: usize = 1000;
/// Minimum expected number of exceedances, `reps · α`, for a critical value.
pub const MIN_TAIL_COUNT: f64 = 20.0;
/// Minimum exceedance count per sample size in a tail-slope fit.
pub const MIN_TAIL_HITS: usize = 50;

/// Raw statistic on replication `index` of a null sample with shape `lambda`.
pub fn null_replicate(
    statistic: Statistic,
    null: NullFamily,
    n: usize,
    seed: u64,
    stream: u64,
    index: u64,
) -> Result<f64> {
    let mut rng = stream_rng(seed, stream, index);
    statistic.evaluate(&null.sample(n, &mut rng)?)
}

/// Raw statistic on replication `index` of a sample from `family` at `theta`.
pub fn alternative_replicate(
    statistic: Statistic,
    family: &Family,
    theta: f64,
    n: usize,
    seed: u64,
    index: u64,
) -> Result<f64> {
    let mut rng = stream_rng(seed, branch::ALTERNATIVE, index);
    statistic.evaluate(&family.sample_with(theta, n, &mut rng)?)
}

/// Empirical distribution of simulated statistic values.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    sorted: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_unstable_by(f64::total_cmp);
        Self { sorted: values }
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.sorted.len() as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let n = self.sorted.len() as f64;
        self.sorted.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0)
    }

    /// Inverse empirical cdf: smallest value with at least `p·N` values at or below it.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.sorted.len();
        let k = libm::ceil(p * n as f64) as usize;
        self.sorted[k.clamp(1, n) - 1]
    }

    /// Number of values strictly greater than `x`.
    pub fn count_above(&self, x: f64) -> usize {
        self.sorted.len() - self.sorted.partition_point(|&v| v <= x)
    }

    /// Monte Carlo p-value `(1 + #{T >= x}) / (N + 1)`.
    pub fn upper_p_value(&self, x: f64) -> f64 {
        let at_least = self.sorted.len() - self.sorted.partition_point(|&v| v < x);
        (1 + at_least) as f64 / (self.sorted.len() + 1) as f64
    }

    /// Two-sided version based on `|T - center|`.
    pub fn two_sided_p_value(&self, x: f64, center: f64) -> f64 {
        let a = (x - center).abs();
        let hits = self.sorted.iter().filter(|v| (*v - center).abs() >= a).count();
        (1 + hits) as f64 / (self.sorted.len() + 1) as f64
    }

    /// Standard error of the `(1 - α)`-quantile from the binomial spread of
    /// order-statistic ranks: half the distance between the order statistics
    /// one binomial standard deviation either side of the target rank.
    pub fn quantile_standard_error(&self, alpha: f64) -> f64 {
        let n = self.sorted.len() as f64;
        let sd = libm::sqrt(n * alpha * (1.0 - alpha));
        let center = (1.0 - alpha) * n;
        let lo = ((center - sd) / n).clamp(0.0, 1.0);
        let hi = ((center + sd) / n).clamp(0.0, 1.0);
        0.5 * (self.quantile(hi) - self.quantile(lo))
    }
}

/// Validates a critical-value request.
pub fn check_critical_request(levels: &[f64], reps: usize) -> Result<()> {
    for &a in levels {
        if !(a > 0.0 && a <= 0.5) {
            return Err(Error::InvalidParameter(alloc::format!(
                "level {a} must lie in (0, 0.5]"
            )));
        }
        if reps < MIN_CRITICAL_REPS || (reps as f64) * a < MIN_TAIL_COUNT {
            return Err(Error::InsufficientReps { reps, level: a });
        }
    }
    if levels.is_empty() {
        return Err(Error::InvalidParameter("no levels requested".into()));
    }
    Ok(())
}

/// Least-squares line through `(1/n, ln(p)/n)`; the intercept estimates
/// `-rate` in the limit `n -> ∞`.
pub fn extrapolate_rate(ns: &[usize], probabilities: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(probabilities)
        .map(|(&n, &p)| (1.0 / n as f64, libm::log(p) / n as f64))
        .collect();
    if pts.len() == 1 {
        return -pts[0].1;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    -(my - slope * mx)
}

/// Quadratic small-`a` rate of the null tail: `(54/5) a²` for `I_n`,
/// `a² / (8 δ²(t*))` for `D_n`.
pub fn quadratic_rate(statistic: Statistic, a: f64) -> f64 {
    use crate::model::AsymptoticConstants;
    match statistic {
        Statistic::Integral => AsymptoticConstants::rate_coeff_i() * a * a,
        Statistic::Kolmogorov => AsymptoticConstants::rate_coeff_d() * a * a,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_and_p_values() {
        let d = EmpiricalDistribution::new((1..=100).rev().map(|i| i as f64).collect());
        assert_eq!(d.quantile(0.95), 95.0);
        assert_eq!(d.quantile(0.5), 50.0);
        assert_eq!(d.quantile(1.0), 100.0);
        assert_eq!(d.count_above(95.0), 5);
        assert!((d.upper_p_value(96.0) - 6.0 / 101.0).abs() < 1e-15);
        assert!((d.mean() - 50.5).abs() < 1e-12);
    }

    #[test]
    fn request_validation() {
        assert!(check_critical_request(&[0.05], 1000).is_ok());
        assert_eq!(
            check_critical_request(&[0.01], 100),
            Err(Error::InsufficientReps {
                reps: 100,
                level: 0.01
            })
        );
        assert!(matches!(
            check_critical_request(&[0.01], 1000),
            Err(Error::InsufficientReps { .. })
        ));
        assert!(check_critical_request(&[0.6], 10_000).is_err());
        assert!(check_critical_request(&[], 10_000).is_err());
    }

    #[test]
    fn rate_extrapolation_recovers_line() {
        // ln p = -0.3 n + 2  =>  ln p / n = -0.3 + 2/n
        let ns = [20, 40, 80];
        let ps: Vec<f64> = ns.iter().map(|&n| libm::exp(-0.3 * n as f64 + 2.0)).collect();
        assert!((extrapolate_rate(&ns, &ps) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn replicates_are_reproducible() {
        let null = NullFamily::new(1.0).unwrap();
        let a = null_replicate(Statistic::Kolmogorov, null, 30, 9, branch::NULL, 4).unwrap();
        let b = null_replicate(Statistic::Kolmogorov, null, 30, 9, branch::NULL, 4).unwrap();
        assert_eq!(a, b);
    }
}
