//! Parallel Monte Carlo drivers.
//!
//! Every replication draws from its own stream, a pure function of
//! `(seed, branch, index)`, and results are collected in index order, so the
//! output does not depend on the number of worker threads.

use powgof_core::alternatives::Family;
use powgof_core::model::NullFamily;
use powgof_core::numeric::{wilson_interval, Z_99};
use powgof_core::rng::branch;
use powgof_core::simulation::{
    alternative_replicate, check_critical_request, extrapolate_rate, null_replicate,
    quadratic_rate, EmpiricalDistribution, MIN_TAIL_HITS,
};
use powgof_core::{Error, Result, Statistic};
use rayon::prelude::*;
use serde::Serialize;

/// Probabilities reported by [`simulate_null`].
pub const SUMMARY_PROBS: [f64; 7] = [0.01, 0.05, 0.1, 0.5, 0.9, 0.95, 0.99];

/// Runs `f(0), …, f(reps - 1)` on `threads` workers (the global pool when
/// `None`) and returns the values in index order.
pub fn run_replications<F>(reps: usize, threads: Option<usize>, f: F) -> Result<Vec<f64>>
where
    F: Fn(u64) -> Result<f64> + Sync + Send,
{
    let work = || {
        (0..reps as u64)
            .into_par_iter()
            .map(&f)
            .collect::<Result<Vec<f64>>>()
    };
    match threads {
        None => work(),
        Some(0) => Err(Error::InvalidParameter("threads must be at least 1".into())),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(work),
    }
}

/// Null distribution of `statistic` at sample size `n` under `null`.
pub fn null_distribution(
    statistic: Statistic,
    null: NullFamily,
    n: usize,
    reps: usize,
    seed: u64,
    stream: u64,
    threads: Option<usize>,
) -> Result<EmpiricalDistribution> {
    if reps == 0 {
        return Err(Error::InvalidParameter("reps must be at least 1".into()));
    }
    let values = run_replications(reps, threads, |k| {
        null_replicate(statistic, null, n, seed, stream, k)
    })?;
    Ok(EmpiricalDistribution::new(values))
}

/// Summary of a simulated null distribution.
#[derive(Debug, Clone, Serialize)]
pub struct NullSummary {
    pub statistic: &'static str,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub mean: f64,
    pub variance: f64,
    /// Variance of `√n T`.
    pub scaled_variance: f64,
    pub min: f64,
    pub max: f64,
    /// `(p, quantile)` pairs at [`SUMMARY_PROBS`].
    pub quantiles: Vec<(f64, f64)>,
    #[serde(skip)]
    pub distribution: EmpiricalDistribution,
}

/// Simulates `reps` uniform samples of size `n`. The statistics do not
/// depend on the null shape, so the uniform law stands for the whole family.
pub fn simulate_null(
    statistic: Statistic,
    n: usize,
    reps: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<NullSummary> {
    let uniform = NullFamily::new(1.0)?;
    let d = null_distribution(statistic, uniform, n, reps, seed, branch::NULL, threads)?;
    let variance = if d.len() > 1 { d.variance() } else { 0.0 };
    Ok(NullSummary {
        statistic: statistic.symbol(),
        n,
        reps,
        seed,
        mean: d.mean(),
        variance,
        scaled_variance: n as f64 * variance,
        min: d.sorted()[0],
        max: d.sorted()[d.len() - 1],
        quantiles: SUMMARY_PROBS.iter().map(|&p| (p, d.quantile(p))).collect(),
        distribution: d,
    })
}

/// Simulated upper quantiles of a statistic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalValueTable {
    pub statistic: &'static str,
    pub n: usize,
    pub levels: Vec<f64>,
    /// `(1 - α)`-quantiles of the raw statistic.
    pub quantiles: Vec<f64>,
    /// The same quantiles times `√n`.
    pub scaled_quantiles: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
}

impl CriticalValueTable {
    /// Critical value at `level`, if it was tabulated.
    pub fn critical_value(&self, level: f64) -> Option<f64> {
        self.levels
            .iter()
            .position(|&a| a == level)
            .map(|i| self.quantiles[i])
    }
}

/// Critical values from the dedicated critical-value stream.
pub fn critical_values(
    statistic: Statistic,
    n: usize,
    levels: &[f64],
    reps: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<CriticalValueTable> {
    check_critical_request(levels, reps)?;
    let uniform = NullFamily::new(1.0)?;
    let d = null_distribution(statistic, uniform, n, reps, seed, branch::CRITICAL, threads)?;
    let quantiles: Vec<f64> = levels.iter().map(|&a| d.quantile(1.0 - a)).collect();
    let root_n = (n as f64).sqrt();
    Ok(CriticalValueTable {
        statistic: statistic.symbol(),
        n,
        levels: levels.to_vec(),
        scaled_quantiles: quantiles.iter().map(|q| q * root_n).collect(),
        quantiles,
        standard_errors: levels.iter().map(|&a| d.quantile_standard_error(a)).collect(),
        reps,
        seed,
    })
}

/// Rejection rate of the simulated-critical-value test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerResult {
    pub statistic: &'static str,
    pub family: String,
    pub theta: f64,
    pub n: usize,
    pub level: f64,
    pub critical_value: f64,
    pub rejections: usize,
    pub reps: usize,
    pub rate: f64,
    /// Wilson 99% interval for the rate.
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl PowerResult {
    /// Binomial standard error of the rate.
    pub fn standard_error(&self) -> f64 {
        (self.rate * (1.0 - self.rate) / self.reps as f64).sqrt()
    }
}

fn rejection_summary(
    statistic: Statistic,
    family: String,
    theta: f64,
    level: f64,
    critical: &CriticalValueTable,
    values: &[f64],
) -> PowerResult {
    let c = critical.quantiles[0];
    let rejections = values.iter().filter(|&&v| v > c).count();
    let (ci_low, ci_high) = wilson_interval(rejections, values.len(), Z_99);
    PowerResult {
        statistic: statistic.symbol(),
        family,
        theta,
        n: critical.n,
        level,
        critical_value: c,
        rejections,
        reps: values.len(),
        rate: rejections as f64 / values.len() as f64,
        ci_low,
        ci_high,
        seed: critical.seed,
    }
}

/// Power of the test that rejects when the statistic exceeds its simulated
/// `(1 - level)`-quantile. Critical values and alternative samples come from
/// separate streams of the same seed, each with `reps` replications.
#[allow(clippy::too_many_arguments)]
pub fn power_study(
    statistic: Statistic,
    family: &Family,
    theta: f64,
    n: usize,
    level: f64,
    reps: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<PowerResult> {
    family.check_theta(theta)?;
    let critical = critical_values(statistic, n, &[level], reps, seed, threads)?;
    let values = run_replications(reps, threads, |k| {
        alternative_replicate(statistic, family, theta, n, seed, k)
    })?;
    Ok(rejection_summary(
        statistic,
        family.id(),
        theta,
        level,
        &critical,
        &values,
    ))
}

/// Empirical size: fresh null samples (the null stream) tested against
/// critical values built from `critical_reps` replications.
pub fn size_study(
    statistic: Statistic,
    n: usize,
    level: f64,
    critical_reps: usize,
    reps: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<PowerResult> {
    let critical = critical_values(statistic, n, &[level], critical_reps, seed, threads)?;
    let uniform = NullFamily::new(1.0)?;
    let d = null_distribution(statistic, uniform, n, reps, seed, branch::NULL, threads)?;
    Ok(rejection_summary(
        statistic,
        String::from("null"),
        0.0,
        level,
        &critical,
        d.sorted(),
    ))
}

/// Empirical large-deviation rate of the null upper tail against the
/// quadratic small-`a` approximation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailSlope {
    pub statistic: &'static str,
    pub a: f64,
    pub ns: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub hits: Vec<usize>,
    pub probabilities: Vec<f64>,
    /// `-ln P / n` at each sample size.
    pub rates: Vec<f64>,
    /// Intercept of the least-squares line through `(1/n, -ln P / n)`.
    pub fitted_rate: f64,
    pub quadratic_rate: f64,
    pub ratio: f64,
}

/// Estimates `P(T_n > a)` on the null stream for every `n` in `ns` and
/// extrapolates `-ln P / n` linearly in `1/n` to `n = ∞`.
pub fn tail_slope_check(
    statistic: Statistic,
    a: f64,
    ns: &[usize],
    reps: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<TailSlope> {
    if a.is_nan() || a <= 0.0 || ns.is_empty() {
        return Err(Error::InvalidParameter(
            "tail check needs a > 0 and at least one sample size".into(),
        ));
    }
    let uniform = NullFamily::new(1.0)?;
    let mut hits = Vec::with_capacity(ns.len());
    for &n in ns {
        let d = null_distribution(statistic, uniform, n, reps, seed, branch::NULL, threads)?;
        let h = d.count_above(a);
        if h < MIN_TAIL_HITS {
            return Err(Error::InsufficientHits {
                n,
                a,
                hits: h,
                required: MIN_TAIL_HITS,
            });
        }
        hits.push(h);
    }
    let probabilities: Vec<f64> = hits.iter().map(|&h| h as f64 / reps as f64).collect();
    let rates = ns
        .iter()
        .zip(&probabilities)
        .map(|(&n, p)| -p.ln() / n as f64)
        .collect();
    let fitted_rate = extrapolate_rate(ns, &probabilities);
    let quadratic = quadratic_rate(statistic, a);
    Ok(TailSlope {
        statistic: statistic.symbol(),
        a,
        ns: ns.to_vec(),
        reps,
        seed,
        hits,
        probabilities,
        rates,
        fitted_rate,
        quadratic_rate: quadratic,
        ratio: fitted_rate / quadratic,
    })
}

/// Two-sample Kolmogorov-Smirnov statistic of two sorted samples.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic p-value of the two-sample KS statistic, with Stephens'
/// small-sample correction of the argument.
pub fn ks_p_value(d: f64, na: usize, nb: usize) -> f64 {
    let ne = (na * nb) as f64 / (na + nb) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = 2.0 * (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// Pairwise comparison of null distributions simulated under different shapes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeInvariance {
    pub statistic: &'static str,
    pub n: usize,
    pub reps: usize,
    pub lambdas: Vec<f64>,
    /// `(λ_a, λ_b, KS distance, p-value)` for every pair.
    pub comparisons: Vec<(f64, f64, f64, f64)>,
    pub min_p_value: f64,
}

/// Simulates the null at each `λ` with its own seed (`seed + index`) and
/// compares every pair of distributions with a two-sample KS test.
pub fn shape_invariance(
    statistic: Statistic,
    lambdas: &[f64],
    n: usize,
    reps: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<ShapeInvariance> {
    let dists = lambdas
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            null_distribution(
                statistic,
                NullFamily::new(l)?,
                n,
                reps,
                seed.wrapping_add(i as u64),
                branch::NULL,
                threads,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut comparisons = Vec::new();
    for i in 0..dists.len() {
        for j in i + 1..dists.len() {
            let d = ks_two_sample(dists[i].sorted(), dists[j].sorted());
            comparisons.push((lambdas[i], lambdas[j], d, ks_p_value(d, reps, reps)));
        }
    }
    let min_p_value = comparisons.iter().map(|c| c.3).fold(1.0, f64::min);
    Ok(ShapeInvariance {
        statistic: statistic.symbol(),
        n,
        reps,
        lambdas: lambdas.to_vec(),
        comparisons,
        min_p_value,
    })
}
