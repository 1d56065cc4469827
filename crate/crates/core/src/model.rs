use alloc::vec::Vec;
use core::fmt;

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::rng::open_unit;

/// A validated sample from `(0, 1)`, stored in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    has_ties: bool,
}

/// Checks that every value is finite and strictly inside `(0, 1)` and that at
/// least two values are present. Returns the sorted sample.
///
/// Ties are accepted but flagged, see [`Sample::has_ties`].
pub fn validate_sample(raw: &[f64]) -> Result<Sample> {
    if raw.len() < 2 {
        return Err(Error::EmptyOrSingleton(raw.len()));
    }
    for (index, &value) in raw.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if value <= 0.0 || value >= 1.0 {
            return Err(Error::OutOfSupport { index, value });
        }
    }
    let mut values = raw.to_vec();
    values.sort_unstable_by(f64::total_cmp);
    let has_ties = values.windows(2).any(|w| w[0] == w[1]);
    Ok(Sample { values, has_ties })
}

impl Sample {
    pub fn new(raw: &[f64]) -> Result<Self> {
        validate_sample(raw)
    }

    /// Observations in ascending order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false: a valid sample has at least two observations.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True if two observations coincide. Under a continuous null this has
    /// probability zero and usually points at rounding in the data.
    pub fn has_ties(&self) -> bool {
        self.has_ties
    }

    /// Image of the sample under `x -> x^power`, validated again.
    pub fn powf(&self, power: f64) -> Result<Self> {
        let mapped: Vec<f64> = self.values.iter().map(|&x| libm::pow(x, power)).collect();
        validate_sample(&mapped)
    }
}

/// The null family `F(x) = x^λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullFamily {
    lambda: f64,
}

impl NullFamily {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda.is_finite() && lambda > 0.0 {
            Ok(Self { lambda })
        } else {
            Err(Error::Domain {
                what: "power-function shape",
                value: lambda,
            })
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn cdf(&self, x: f64) -> f64 {
        libm::pow(x.clamp(0.0, 1.0), self.lambda)
    }

    pub fn density(&self, x: f64) -> f64 {
        self.lambda * libm::pow(x, self.lambda - 1.0)
    }

    pub fn quantile(&self, p: f64) -> f64 {
        libm::pow(p, 1.0 / self.lambda)
    }

    /// Draws `n` observations by inverse transform.
    pub fn sample<R: RngCore>(&self, n: usize, rng: &mut R) -> Result<Sample> {
        let raw: Vec<f64> = (0..n).map(|_| self.quantile(open_unit(rng))).collect();
        validate_sample(&raw)
    }
}

/// Which of the two test statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statistic {
    /// `I_n = ∫ (H_n - F_n) dF_n`
    Integral,
    /// `D_n = sup |H_n - F_n|`
    Kolmogorov,
}

impl Statistic {
    pub const ALL: [Statistic; 2] = [Statistic::Integral, Statistic::Kolmogorov];

    pub fn symbol(self) -> &'static str {
        match self {
            Statistic::Integral => "I",
            Statistic::Kolmogorov => "D",
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl core::str::FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "i" | "I" | "integral" => Ok(Statistic::Integral),
            "d" | "D" | "kolmogorov" => Ok(Statistic::Kolmogorov),
            other => Err(Error::InvalidParameter(alloc::format!(
                "unknown statistic `{other}` (expected i or d)"
            ))),
        }
    }
}

/// Exact constants of the null theory.
///
/// Rationals are kept as numerator/denominator pairs; floats are derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticConstants;

impl AsymptoticConstants {
    /// Variance of the projection `ψ`: 5/972.
    pub const DELTA2_I: (u32, u32) = (5, 972);
    /// Limit variance of `√n I_n`: 5/108 = 9 · 5/972.
    pub const VAR_LIMIT_I: (u32, u32) = (5, 108);
    /// Rate coefficient `1 / (18 Δ²)` of the integral test: 54/5.
    pub const RATE_COEFF_I: (u32, u32) = (54, 5);

    pub fn delta2_i() -> f64 {
        ratio(Self::DELTA2_I)
    }

    pub fn var_limit_i() -> f64 {
        ratio(Self::VAR_LIMIT_I)
    }

    pub fn rate_coeff_i() -> f64 {
        ratio(Self::RATE_COEFF_I)
    }

    /// Maximizer of `δ²(t)`: `(1 + √7) / 6`.
    pub fn t_star() -> f64 {
        (1.0 + libm::sqrt(7.0)) / 6.0
    }

    /// `δ²(t*)`, about 0.0440.
    pub fn delta2_d_max() -> f64 {
        crate::kernel::xi_variance_unchecked(Self::t_star())
    }

    /// Rate coefficient `1 / (8 δ²(t*))` of the Kolmogorov test, about 2.84.
    pub fn rate_coeff_d() -> f64 {
        1.0 / (8.0 * Self::delta2_d_max())
    }
}

fn ratio((num, den): (u32, u32)) -> f64 {
    num as f64 / den as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valid_pair_is_kept() {
        let s = validate_sample(&[0.5, 0.2]).unwrap();
        assert_eq!(s.values(), &[0.2, 0.5]);
        assert_eq!(s.len(), 2);
        assert!(!s.has_ties());
    }

    #[test]
    fn boundary_is_out_of_support() {
        assert_eq!(
            validate_sample(&[0.5, 1.0]),
            Err(Error::OutOfSupport {
                index: 1,
                value: 1.0
            })
        );
        assert!(matches!(
            validate_sample(&[0.0, 0.5]),
            Err(Error::OutOfSupport { index: 0, .. })
        ));
    }

    #[test]
    fn singleton_and_empty_rejected() {
        assert_eq!(validate_sample(&[0.7]), Err(Error::EmptyOrSingleton(1)));
        assert_eq!(validate_sample(&[]), Err(Error::EmptyOrSingleton(0)));
    }

    #[test]
    fn non_finite_rejected() {
        assert_eq!(
            validate_sample(&[0.3, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        );
        assert_eq!(
            validate_sample(&[f64::INFINITY, 0.3]),
            Err(Error::NonFinite { index: 0 })
        );
    }

    #[test]
    fn ties_are_flagged() {
        let s = validate_sample(&[0.3, 0.7, 0.3]).unwrap();
        assert!(s.has_ties());
    }

    #[test]
    fn validation_is_idempotent() {
        let s = validate_sample(&[0.9, 0.1, 0.4, 0.4]).unwrap();
        assert_eq!(validate_sample(s.values()).unwrap(), s);
    }

    #[test]
    fn rational_constants_are_consistent() {
        // 9 * 5/972 == 5/108 exactly in integers
        let (a, b) = AsymptoticConstants::DELTA2_I;
        let (c, d) = AsymptoticConstants::VAR_LIMIT_I;
        assert_eq!(9 * a * d, c * b);
        // 1 / (18 * 5/972) == 54/5
        let (e, f) = AsymptoticConstants::RATE_COEFF_I;
        assert_eq!(e * 18 * a, f * b);
    }

    #[test]
    fn t_star_is_stationary() {
        let t = AsymptoticConstants::t_star();
        assert!((1.0 + 2.0 * t - 6.0 * t * t).abs() < 1e-12);
        assert!((AsymptoticConstants::delta2_d_max() - 0.0440).abs() < 5e-4);
        assert!((AsymptoticConstants::rate_coeff_d() - 2.84).abs() < 5e-3);
    }

    #[test]
    fn null_family_rejects_bad_shape() {
        assert!(NullFamily::new(0.0).is_err());
        assert!(NullFamily::new(-1.0).is_err());
        assert!(NullFamily::new(f64::NAN).is_err());
        let nf = NullFamily::new(2.0).unwrap();
        assert!((nf.cdf(0.5) - 0.25).abs() < 1e-16);
        assert!((nf.quantile(0.25) - 0.5).abs() < 1e-16);
    }
}
