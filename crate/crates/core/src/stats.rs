//! Estimators over Monte Carlo replicas.

use num_bigint::BigInt;
use num_traits::{Float, FromPrimitive, ToPrimitive};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{EnsembleFamily, SeedStream};
use crate::error::{Error, Result};
use crate::motif::Motif;
use crate::counting::MotifCounter;
use crate::simulate::run_replicas;
use crate::Rational;

/// One replica: the count of every motif under study and the edge count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplicaRecord {
    pub replica_index: u64,
    pub counts: Vec<u128>,
    pub edges: u64,
}

/// Mean, unbiased variance and standard error of the mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary<F> {
    pub count: usize,
    pub mean: F,
    pub variance: F,
    pub stderr: F,
}

/// Neumaier-compensated sum.
fn compensated_sum<F: Float>(values: impl Iterator<Item = F>) -> F {
    let (mut sum, mut carry) = (F::zero(), F::zero());
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            carry = carry + ((sum - t) + x);
        } else {
            carry = carry + ((x - t) + sum);
        }
        sum = t;
    }
    sum + carry
}

/// Two-pass summary with compensated sums. Needs at least two values.
pub fn summarize<F: Float + FromPrimitive>(values: &[F]) -> Result<Summary<F>> {
    if values.len() < 2 {
        return Err(Error::domain("a variance needs at least two values"));
    }
    let len = F::from_usize(values.len()).expect("length fits the float type");
    let mean = compensated_sum(values.iter().copied()) / len;
    let variance = compensated_sum(values.iter().map(|&x| (x - mean) * (x - mean))) / (len - F::one());
    Ok(Summary {
        count: values.len(),
        mean,
        variance,
        stderr: (variance / len).sqrt(),
    })
}

/// Mergeable accumulator of `(x, y)` pairs for means, variances and the
/// covariance.
///
/// Integer sums are kept exactly in 128 bits while they fit, which makes the
/// result independent of merge order. On overflow the accumulator falls back
/// to the pairwise-update (Chan) floating point moments it maintains
/// alongside.
#[derive(Clone, Debug, PartialEq)]
pub struct PairAccumulator {
    count: u64,
    exact: Option<ExactSums>,
    mean_x: f64,
    mean_y: f64,
    m2_x: f64,
    m2_y: f64,
    c_xy: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
struct ExactSums {
    x: u128,
    xx: u128,
    y: u128,
    yy: u128,
    xy: u128,
}

impl ExactSums {
    fn single(x: u128, y: u128) -> Option<Self> {
        Some(ExactSums {
            x,
            xx: x.checked_mul(x)?,
            y,
            yy: y.checked_mul(y)?,
            xy: x.checked_mul(y)?,
        })
    }

    fn merge(self, other: Self) -> Option<Self> {
        Some(ExactSums {
            x: self.x.checked_add(other.x)?,
            xx: self.xx.checked_add(other.xx)?,
            y: self.y.checked_add(other.y)?,
            yy: self.yy.checked_add(other.yy)?,
            xy: self.xy.checked_add(other.xy)?,
        })
    }
}

/// Moments produced by [`PairAccumulator::finish`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CrossMoments {
    pub count: u64,
    pub mean_x: f64,
    pub mean_y: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub cov_xy: f64,
    /// `true` when computed from exact integer sums.
    pub exact: bool,
}

impl Default for PairAccumulator {
    fn default() -> Self {
        PairAccumulator {
            count: 0,
            exact: Some(ExactSums::default()),
            mean_x: 0.0,
            mean_y: 0.0,
            m2_x: 0.0,
            m2_y: 0.0,
            c_xy: 0.0,
        }
    }
}

impl PairAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: u128, y: u128) {
        let single = PairAccumulator {
            count: 1,
            exact: ExactSums::single(x, y),
            mean_x: x as f64,
            mean_y: y as f64,
            m2_x: 0.0,
            m2_y: 0.0,
            c_xy: 0.0,
        };
        self.merge(&single);
    }

    pub fn merge(&mut self, other: &PairAccumulator) {
        if other.count == 0 {
            return;
        }
        self.exact = match (self.exact, other.exact) {
            (Some(a), Some(b)) => a.merge(b),
            _ => None,
        };
        let (na, nb) = (self.count as f64, other.count as f64);
        let total = na + nb;
        let dx = other.mean_x - self.mean_x;
        let dy = other.mean_y - self.mean_y;
        self.mean_x += dx * nb / total;
        self.mean_y += dy * nb / total;
        self.m2_x += other.m2_x + dx * dx * na * nb / total;
        self.m2_y += other.m2_y + dy * dy * na * nb / total;
        self.c_xy += other.c_xy + dx * dy * na * nb / total;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Means and unbiased (co)variances. Needs at least two pairs.
    pub fn finish(&self) -> Result<CrossMoments> {
        if self.count < 2 {
            return Err(Error::domain("a variance needs at least two values"));
        }
        if let Some(sums) = self.exact {
            let r = BigInt::from(self.count);
            let denom = Rational::from_integer(&r * (&r - 1));
            let centred = |s_ab: u128, s_a: u128, s_b: u128| {
                let num = &r * BigInt::from(s_ab) - BigInt::from(s_a) * BigInt::from(s_b);
                (Rational::from_integer(num) / denom.clone()).to_f64().unwrap_or(f64::NAN)
            };
            let mean = |s: u128| (Rational::new(BigInt::from(s), r.clone())).to_f64().unwrap_or(f64::NAN);
            return Ok(CrossMoments {
                count: self.count,
                mean_x: mean(sums.x),
                mean_y: mean(sums.y),
                var_x: centred(sums.xx, sums.x, sums.x),
                var_y: centred(sums.yy, sums.y, sums.y),
                cov_xy: centred(sums.xy, sums.x, sums.y),
                exact: true,
            });
        }
        let dof = (self.count - 1) as f64;
        Ok(CrossMoments {
            count: self.count,
            mean_x: self.mean_x,
            mean_y: self.mean_y,
            var_x: self.m2_x / dof,
            var_y: self.m2_y / dof,
            cov_xy: self.c_xy / dof,
            exact: false,
        })
    }
}

/// Accumulate motif `motif_index` against the edge count, in record order.
pub fn cross_moments(records: &[ReplicaRecord], motif_index: usize) -> Result<CrossMoments> {
    let mut acc = PairAccumulator::new();
    for record in records {
        acc.push(record.counts[motif_index], u128::from(record.edges));
    }
    acc.finish()
}

/// Sample residual variance of a motif count after regressing on `T_E`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidualEstimate {
    pub value: f64,
    /// Set when the edge count never varies (fixed-edge ensembles); the value
    /// is then the plain sample variance.
    pub degenerate: bool,
}

/// `Var(T_H) - Cov(T_H, T_E)^2 / Var(T_E)` over the sample.
pub fn empirical_residual_variance(records: &[ReplicaRecord], motif_index: usize) -> Result<ResidualEstimate> {
    if records.len() < 3 {
        return Err(Error::domain("residual variance needs at least three records"));
    }
    let m = cross_moments(records, motif_index)?;
    if m.var_y == 0.0 {
        return Ok(ResidualEstimate {
            value: m.var_x,
            degenerate: true,
        });
    }
    Ok(ResidualEstimate {
        value: m.var_x - m.cov_xy * m.cov_xy / m.var_y,
        degenerate: false,
    })
}

/// Percentile bootstrap interval for the unbiased sample variance.
///
/// Resample `b` draws from stream `b` of `seed`, so the interval does not
/// depend on how resamples are scheduled.
pub fn bootstrap_variance_interval(values: &[f64], resamples: usize, level: f64, seed: u64) -> Result<(f64, f64)> {
    if values.len() < 2 || resamples == 0 {
        return Err(Error::domain("bootstrap needs at least two values and one resample"));
    }
    if !(0.0..1.0).contains(&level) {
        return Err(Error::domain("confidence level must lie in [0, 1)"));
    }
    let centre = summarize(values)?.mean;
    let shifted: Vec<f64> = values.iter().map(|x| x - centre).collect();
    let len = shifted.len();
    let mut estimates: Vec<f64> = (0..resamples as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = SeedStream::new(seed, b).rng();
            let (mut s, mut ss) = (0.0, 0.0);
            for _ in 0..len {
                let x = shifted[rng.random_range(0..len)];
                s += x;
                ss += x * x;
            }
            let count = len as f64;
            (ss - s * s / count) / (count - 1.0)
        })
        .collect();
    estimates.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    let pick = |q: f64| estimates[((q * (resamples - 1) as f64).round() as usize).min(resamples - 1)];
    Ok((pick(tail), pick(1.0 - tail)))
}

/// Least-squares slope of `log(statistic)` against `log(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentFit {
    pub exponent: f64,
    /// Standard error of the slope.
    pub half_width: f64,
    pub intercept: f64,
}

pub fn growth_exponent_fit(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if points.len() < 4 {
        return Err(Error::domain("exponent fit needs at least four points"));
    }
    if let Some((n, s)) = points.iter().find(|(n, s)| *n <= 0.0 || *s <= 0.0) {
        return Err(Error::domain(format!("nonpositive value in fit point ({n}, {s})")));
    }
    let xs: Vec<f64> = points.iter().map(|(n, _)| n.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, s)| s.ln()).collect();
    let m = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / m;
    let mean_y = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(ExponentFit {
        exponent: slope,
        half_width: (ssr / (m - 2.0) / sxx).sqrt(),
        intercept,
    })
}

/// `(estimate - expected) / stderr`; infinite when the error is zero but
/// the values differ.
pub fn z_score(estimate: f64, expected: f64, stderr: f64) -> f64 {
    let diff = estimate - expected;
    if diff == 0.0 {
        0.0
    } else {
        diff / stderr
    }
}

/// The two scaled statistics of the motif count at one `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: u64,
    pub edges: Option<u64>,
    pub replicas: u64,
    pub mean: f64,
    pub stderr_mean: f64,
    /// `mean / n^v`, tending to `p^l / |Aut(H)|`.
    pub scaled_mean: f64,
    pub scaled_mean_stderr: f64,
    /// `n (mean / n^v - p^l / |Aut(H)|)`, tending to the surface coefficient.
    pub surface_statistic: f64,
    pub surface_stderr: f64,
    /// `sd / n^(v - 3/2)`.
    pub scaled_std: f64,
}

/// Scaled statistics from a replica summary.
pub fn convergence_row(motif: &Motif, p: f64, n: u64, edges: Option<u64>, summary: &CrossMoments) -> ConvergenceRow {
    let v = motif.vertex_count() as i32;
    let nf = n as f64;
    let volume = p.powi(motif.edge_count() as i32) / motif.automorphism_order().get() as f64;
    let scale = nf.powi(v);
    let stderr = (summary.var_x / summary.count as f64).sqrt();
    ConvergenceRow {
        n,
        edges,
        replicas: summary.count,
        mean: summary.mean_x,
        stderr_mean: stderr,
        scaled_mean: summary.mean_x / scale,
        scaled_mean_stderr: stderr / scale,
        surface_statistic: nf * (summary.mean_x / scale - volume),
        surface_stderr: nf * stderr / scale,
        scaled_std: summary.var_x.sqrt() / nf.powf(v as f64 - 1.5),
    }
}

/// Simulate `family` at every `n` of the grid and tabulate the scaled
/// statistics of `motif`.
pub fn convergence_table(
    motif: &Motif,
    family: &EnsembleFamily,
    grid: &[u32],
    replicas: u64,
    master_seed: u64,
) -> Result<Vec<ConvergenceRow>> {
    if replicas < 100 {
        return Err(Error::domain("convergence table needs at least 100 replicas"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("n-grid must be strictly increasing"));
    }
    let p = family
        .density()
        .ok_or_else(|| Error::domain("convergence table needs a density family"))?
        .to_f64()
        .unwrap_or(f64::NAN);
    let counter = MotifCounter::new(motif);
    grid.iter()
        .map(|&n| {
            let spec = family.at(n)?;
            let records = run_replicas(&spec, std::slice::from_ref(&counter), replicas, master_seed)?;
            let moments = cross_moments(&records, 0)?;
            Ok(convergence_row(motif, p, u64::from(n), spec.fixed_edge_count(), &moments))
        })
        .collect()
}
