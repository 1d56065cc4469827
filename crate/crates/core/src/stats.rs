//! Exact finite-sample statistics.
//!
//! Both `H_n` and `F_n` use strict indicators, `1{m < t}` and `1{X < t}`, so
//! they are left-continuous step functions. `I_n` integrates `H_n - F_n`
//! against the atoms of `F_n` (mass `1/n` on every observation). `D_n` is the
//! supremum of `|H_n - F_n|` over `t ∈ [0, 1]`; the difference is constant on
//! every interval `(u_k, u_{k+1}]` between consecutive jump points, so the
//! right limits at jump points below one are exhaustive.
//!
//! All counts are integers and every statistic is formed from them by the
//! same floating-point expression, so the fast paths and the oracles in
//! [`oracle`] agree to the last bit.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{Sample, Statistic};

/// Largest sample accepted by the statistics. Both run in `O(n²)` time and
/// `O(n)` memory; at this size that is `5·10⁹` pair visits.
pub const MAX_PAIRWISE_N: usize = 100_000;

/// Largest sample for which the pair ratios are materialized. The sorted
/// set takes `8 n (n - 1) / 2` bytes, 1.6 GB at this size.
pub const MAX_PAIR_SET_N: usize = 20_000;

/// Sorted multiset of `m_ij = min(X_i / X_j, X_j / X_i)` over `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRatioSet {
    m_values: Vec<f64>,
}

impl PairRatioSet {
    pub fn new(sample: &Sample) -> Result<Self> {
        let x = sample.values();
        let n = x.len();
        if n > MAX_PAIR_SET_N {
            return Err(Error::CapExceeded {
                n,
                cap: MAX_PAIR_SET_N,
            });
        }
        let mut m_values = Vec::with_capacity(pair_count(n));
        // x is ascending, so x[i] / x[j] is the minimum of the two ratios.
        for j in 1..n {
            for &xi in &x[..j] {
                m_values.push(xi / x[j]);
            }
        }
        m_values.sort_unstable_by(f64::total_cmp);
        Ok(Self { m_values })
    }

    pub fn values(&self) -> &[f64] {
        &self.m_values
    }

    pub fn len(&self) -> usize {
        self.m_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m_values.is_empty()
    }

    /// Number of pairs with `m < t`.
    pub fn count_below(&self, t: f64) -> usize {
        self.m_values.partition_point(|&m| m < t)
    }
}

fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// `F_n(t)`: fraction of observations strictly below `t`.
pub fn empirical_df(sample: &Sample, t: f64) -> f64 {
    let x = sample.values();
    x.partition_point(|&v| v < t) as f64 / x.len() as f64
}

/// `H_n(t)`: fraction of pairs whose ratio is strictly below `t`.
pub fn u_empirical_df(sample: &Sample, t: f64) -> Result<f64> {
    let pairs = PairRatioSet::new(sample)?;
    Ok(pairs.count_below(t) as f64 / pairs.len() as f64)
}

/// Value of `H_n - F_n` from integer counts.
#[inline]
fn step_difference(h_count: usize, f_count: usize, pairs: usize, n: usize) -> f64 {
    h_count as f64 / pairs as f64 - f_count as f64 / n as f64
}

/// `I_n` from the summed counts `Σ_k #{m < X_k}` and `Σ_k #{X < X_k}`.
#[inline]
fn integral_from_counts(h_sum: u64, f_sum: u64, n: usize) -> f64 {
    let pairs = pair_count(n) as f64;
    (h_sum as f64 / pairs - f_sum as f64 / n as f64) / n as f64
}

/// `H_n` and `F_n` evaluated just to the right of every jump point in `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunctionPair {
    pub jump_points: Vec<f64>,
    pub h_at: Vec<f64>,
    pub f_at: Vec<f64>,
}

impl StepFunctionPair {
    pub fn new(sample: &Sample) -> Result<Self> {
        let pairs = PairRatioSet::new(sample)?;
        let mut out = StepFunctionPair {
            jump_points: Vec::new(),
            h_at: Vec::new(),
            f_at: Vec::new(),
        };
        let (p, n) = (pairs.len(), sample.len());
        walk_right_limits(pairs.values(), sample.values(), |u, hc, fc| {
            out.jump_points.push(u);
            out.h_at.push(hc as f64 / p as f64);
            out.f_at.push(fc as f64 / n as f64);
        });
        Ok(out)
    }

    /// Largest `|H_n - F_n|` over the right limits (zero if there are none).
    pub fn max_abs_difference(&self) -> f64 {
        self.h_at
            .iter()
            .zip(&self.f_at)
            .map(|(h, f)| (h - f).abs())
            .fold(0.0, f64::max)
    }
}

/// Merges the sorted pair ratios `m` and sorted observations `x`, calling
/// `visit(u, #{m <= u}, #{x <= u})` once per distinct jump point `u < 1`.
fn walk_right_limits<V: FnMut(f64, usize, usize)>(m: &[f64], x: &[f64], mut visit: V) {
    let (mut i, mut j) = (0, 0);
    loop {
        let u = match (m.get(i), x.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => break,
        };
        if u >= 1.0 {
            break;
        }
        while i < m.len() && m[i] <= u {
            i += 1;
        }
        while j < x.len() && x[j] <= u {
            j += 1;
        }
        visit(u, i, j);
    }
}

/// Result of applying one statistic to a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct TestOutcome {
    pub statistic: Statistic,
    pub raw_value: f64,
    /// `√n · raw_value`
    pub scaled_value: f64,
    pub n: usize,
    pub p_value: Option<f64>,
    pub p_value_method: Option<PValueMethod>,
    /// `Some(true)` when the null is rejected at the requested level.
    pub rejected: Option<bool>,
}

impl TestOutcome {
    fn new(statistic: Statistic, raw_value: f64, n: usize) -> Self {
        Self {
            statistic,
            raw_value,
            scaled_value: libm::sqrt(n as f64) * raw_value,
            n,
            p_value: None,
            p_value_method: None,
            rejected: None,
        }
    }

    /// Attaches a p-value and the decision at `level`.
    pub fn with_p_value(mut self, p_value: f64, method: PValueMethod, level: f64) -> Self {
        self.p_value = Some(p_value);
        self.p_value_method = Some(method);
        self.rejected = Some(p_value <= level);
        self
    }
}

/// How a p-value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PValueMethod {
    /// Limit law `√n I_n -> N(0, 5/108)`; integral statistic only.
    NormalApprox,
    MonteCarlo,
}

impl PValueMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            PValueMethod::NormalApprox => "normal-approx",
            PValueMethod::MonteCarlo => "monte-carlo",
        }
    }
}

/// Raw value of `I_n`, in `O(n²)` time and `O(1)` extra memory.
///
/// `Σ_k #{pairs: m < X_k}` is accumulated as `Σ_pairs #{k: X_k > m}`. For a
/// fixed smaller element the ratio `x[i] / x[j]` falls as `j` grows, so the
/// count of observations at or below it is tracked by a pointer that only
/// moves down.
pub fn integral_value(sample: &Sample) -> Result<f64> {
    let x = sample.values();
    let n = x.len();
    if n > MAX_PAIRWISE_N {
        return Err(Error::CapExceeded {
            n,
            cap: MAX_PAIRWISE_N,
        });
    }
    let mut h_sum = 0u64;
    for i in 0..n {
        let mut at_or_below = n;
        for &xj in &x[i + 1..] {
            let m = x[i] / xj;
            while at_or_below > 0 && x[at_or_below - 1] > m {
                at_or_below -= 1;
            }
            h_sum += (n - at_or_below) as u64;
        }
    }
    let mut f_sum = 0u64;
    let mut j = 0;
    for &xk in x {
        while j < n && x[j] < xk {
            j += 1;
        }
        f_sum += j as u64;
    }
    Ok(integral_from_counts(h_sum, f_sum, n))
}

/// Raw value of `D_n`, in `O(n²)` time and `O(n)` memory.
///
/// On each interval between consecutive distinct observations `F_n` is
/// constant and `H_n` nondecreasing, so `|H_n - F_n|` peaks at one of the
/// interval ends. Only `#{m < v}` and `#{m <= v}` at the distinct values `v`
/// are needed; they come from histograms of the rank of every pair ratio
/// among the observations.
pub fn kolmogorov_value(sample: &Sample) -> Result<f64> {
    let x = sample.values();
    let n = x.len();
    if n > MAX_PAIRWISE_N {
        return Err(Error::CapExceeded {
            n,
            cap: MAX_PAIRWISE_N,
        });
    }
    let p = pair_count(n);
    // by_le[c]: pairs with #{x <= m} = c; by_lt[c]: pairs with #{x < m} = c
    let mut by_le = alloc::vec![0usize; n + 1];
    let mut by_lt = alloc::vec![0usize; n + 1];
    let mut equal_pairs = 0;
    for i in 0..n {
        let (mut le, mut lt) = (n, n);
        for &xj in &x[i + 1..] {
            let m = x[i] / xj;
            while le > 0 && x[le - 1] > m {
                le -= 1;
            }
            while lt > 0 && x[lt - 1] >= m {
                lt -= 1;
            }
            by_le[le] += 1;
            by_lt[lt] += 1;
            equal_pairs += usize::from(m >= 1.0);
        }
    }
    // m < x[k] iff k >= #{x <= m}; m <= x[k] iff k >= #{x < m}.
    let (mut below, mut at_or_below) = (0, 0);
    let mut f_count = 0;
    let mut sup = 0.0f64;
    let mut k = 0;
    while k < n {
        below += by_le[k];
        at_or_below += by_lt[k];
        // left end of the interval ending at x[k]
        sup = sup.max(step_difference(below, f_count, p, n).abs());
        let mut end = k + 1;
        while end < n && x[end] == x[k] {
            below += by_le[end];
            at_or_below += by_lt[end];
            end += 1;
        }
        f_count = end;
        // right limit just after x[k]
        sup = sup.max(step_difference(at_or_below, f_count, p, n).abs());
        k = end;
    }
    sup = sup.max(step_difference(p - equal_pairs, n, p, n).abs());
    Ok(sup)
}

/// Integral statistic `I_n = ∫ (H_n - F_n) dF_n`.
pub fn integral_statistic(sample: &Sample) -> Result<TestOutcome> {
    Ok(TestOutcome::new(
        Statistic::Integral,
        integral_value(sample)?,
        sample.len(),
    ))
}

/// Kolmogorov-type statistic `D_n = sup |H_n - F_n|`.
pub fn kolmogorov_statistic(sample: &Sample) -> Result<TestOutcome> {
    Ok(TestOutcome::new(
        Statistic::Kolmogorov,
        kolmogorov_value(sample)?,
        sample.len(),
    ))
}

impl Statistic {
    /// Raw statistic value for `sample`.
    pub fn evaluate(self, sample: &Sample) -> Result<f64> {
        match self {
            Statistic::Integral => integral_value(sample),
            Statistic::Kolmogorov => kolmogorov_value(sample),
        }
    }

    pub fn outcome(self, sample: &Sample) -> Result<TestOutcome> {
        self.evaluate(sample)
            .map(|v| TestOutcome::new(self, v, sample.len()))
    }
}

/// Exact null mean of `I_n`, `1 / (6n)`. The `n - 1` pairs containing `X_k`
/// satisfy `m < X_k` with probability `1/3` rather than `1/2`, and
/// `E F_n(X_k) = (n - 1) / 2n`.
pub fn integral_null_mean(n: usize) -> f64 {
    1.0 / (6.0 * n as f64)
}

/// One-sided normal-approximation p-value of the integral statistic,
/// rejecting for large `I_n`. With `two_sided` the tail is doubled.
pub fn integral_normal_p_value(outcome: &TestOutcome, two_sided: bool) -> f64 {
    let z = outcome.scaled_value / libm::sqrt(crate::model::AsymptoticConstants::var_limit_i());
    if two_sided {
        (2.0 * crate::numeric::normal_sf(z.abs())).min(1.0)
    } else {
        crate::numeric::normal_sf(z)
    }
}

/// Brute-force evaluations straight from the definitions, for testing.
pub mod oracle {
    use alloc::vec::Vec;

    use super::{integral_from_counts, pair_count, step_difference};
    use crate::error::{Error, Result};
    use crate::model::Sample;

    pub const DEFAULT_CAP: usize = 200;

    fn ratio(a: f64, b: f64) -> f64 {
        (a / b).min(b / a)
    }

    fn h_count(x: &[f64], t: f64) -> usize {
        let mut c = 0;
        for i in 0..x.len() {
            for j in (i + 1)..x.len() {
                if ratio(x[i], x[j]) < t {
                    c += 1;
                }
            }
        }
        c
    }

    fn f_count(x: &[f64], t: f64) -> usize {
        x.iter().filter(|&&v| v < t).count()
    }

    fn check_cap(sample: &Sample, cap: usize) -> Result<()> {
        if sample.len() > cap {
            Err(Error::CapExceeded {
                n: sample.len(),
                cap,
            })
        } else {
            Ok(())
        }
    }

    /// `(1/n) Σ_k [H_n(X_k) - F_n(X_k)]` by a triple loop.
    pub fn naive_integral(sample: &Sample, cap: usize) -> Result<f64> {
        check_cap(sample, cap)?;
        let x = sample.values();
        let (mut h_sum, mut f_sum) = (0u64, 0u64);
        for &xk in x {
            h_sum += h_count(x, xk) as u64;
            f_sum += f_count(x, xk) as u64;
        }
        Ok(integral_from_counts(h_sum, f_sum, x.len()))
    }

    /// `max |H_n(t) - F_n(t)|` over `t` in every jump point and `t = 1`.
    ///
    /// The value of the left-continuous difference on `(u_k, u_{k+1}]` is
    /// attained at `t = u_{k+1}`, and on the last interval at `t = 1`.
    pub fn naive_kolmogorov(sample: &Sample, cap: usize) -> Result<f64> {
        check_cap(sample, cap)?;
        let x = sample.values();
        let n = x.len();
        let mut candidates: Vec<f64> = x.to_vec();
        for i in 0..n {
            for j in (i + 1)..n {
                candidates.push(ratio(x[i], x[j]));
            }
        }
        candidates.push(1.0);
        let mut sup = 0.0f64;
        for &t in candidates.iter().filter(|&&t| t <= 1.0) {
            let d = step_difference(h_count(x, t), f_count(x, t), pair_count(n), n);
            sup = sup.max(d.abs());
        }
        Ok(sup)
    }
}
