//! Moments of subgraph counts in random graphs with a hard edge-count
//! constraint (uniform over graphs with exactly `E` edges) and with
//! independent edges (each pair present with probability `p`).
//!
//! The crate has three layers:
//!
//! * exact combinatorics: [`motif`], [`census`] and [`moments`] compute the
//!   copy counts `c_n`, the overlap table `C_0..C_l` and the exact mean,
//!   variance, covariance with the edge count and residual variance of the
//!   motif count `T_H`, together with their large-`n` expansions;
//! * simulation: [`ensemble`] draws seeded graph samples, [`counting`]
//!   counts motifs in them and [`simulate`] runs replicas in parallel;
//! * estimation and reporting: [`stats`], [`config`] and [`commands`].
//!
//! Moment formulas are generic over [`Scalar`], so the same code yields
//! exact rationals ([`Rational`]) or floating point (`f64`, `f32`).

pub mod census;
pub mod commands;
pub mod config;
pub mod counting;
pub mod ensemble;
pub mod error;
pub mod moments;
pub mod motif;
pub mod poly;
pub mod scalar;
pub mod simulate;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Arbitrary precision rational, the exact scalar used throughout.
pub type Rational = num_rational::BigRational;

/// Arbitrary precision nonnegative count.
pub type Count = num_bigint::BigUint;

/// Polynomial in `n` with exact coefficients.
pub type ExactPolynomial = poly::Polynomial<Rational>;

/// Moment report with exact rational entries.
pub type ExactMomentReport = moments::MomentReport<Rational>;

/// Moment report evaluated in double precision.
pub type FloatMomentReport = moments::MomentReport<f64>;

/// Asymptotic expansion with exact coefficients.
pub type ExactExpansion = moments::AsymptoticExpansion<Rational>;
