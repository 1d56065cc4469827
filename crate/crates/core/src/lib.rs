//! Goodness-of-fit tests for the power-function family `F(x) = x^λ` on `(0, 1)`.
//!
//! Both tests compare the ordinary empirical distribution function `F_n` of a
//! sample with the U-empirical distribution function `H_n` of the pairwise
//! ratios `min(X_i / X_j, X_j / X_i)`. Under the null hypothesis a ratio of two
//! independent power-function variables has the same law as a single
//! observation, so `H_n - F_n` fluctuates around zero for every `λ`.
//!
//! * [`stats`] evaluates the integral statistic `I_n` and the Kolmogorov-type
//!   statistic `D_n` exactly, together with brute-force oracles.
//! * [`kernel`] holds the closed-form kernels, projections and variances.
//! * [`alternatives`] provides the parametric alternatives used to study the tests.
//! * [`efficiency`] computes Kullback-Leibler distances to the null family,
//!   local Bahadur slopes and efficiencies, and local optimality checks.
//! * [`simulation`] has the single-replication building blocks for Monte Carlo
//!   calibration. The parallel driver lives in the `powgof` crate.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod alternatives;
pub mod efficiency;
pub mod error;
pub mod kernel;
pub mod model;
pub mod numeric;
pub mod quad;
pub mod rng;
pub mod simulation;
pub mod stats;

pub use alternatives::Family;
pub use efficiency::{EfficiencyReport, KlResult};
pub use error::{Error, Result};
pub use model::{validate_sample, NullFamily, AsymptoticConstants, Sample, Statistic};
pub use stats::{integral_statistic, kolmogorov_statistic, TestOutcome};
