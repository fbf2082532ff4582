//! Mean, variance, covariance with the edge count and residual variance of
//! the motif count `T_H`, in the fixed-edge-count ("dependent") and
//! independent-edge ensembles.
//!
//! Exact values come from the overlap table: a pair of copies sharing `k`
//! edges spans `2l - k` distinct edges, which are all present with
//! probability `P(E, N, 2l - k)` (dependent) or `p^(2l-k)` (independent).
//! The large-`n` forms are kept separate so their error terms can be checked
//! against the exact values.

use std::fmt;

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::census::{overlap_polynomials, OverlapTable};
use crate::error::{Error, Result};
use crate::motif::Motif;
use crate::poly::Polynomial;
use crate::scalar::{powi, Scalar};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    /// Uniform over graphs with exactly `E` edges.
    Dependent,
    /// Each pair is an edge independently with probability `p`.
    Independent,
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnsembleKind::Dependent => "dependent",
            EnsembleKind::Independent => "independent",
        })
    }
}

/// Edge count constraint on `n` vertices: `0 <= edges <= N = n(n-1)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EdgeBudget {
    n: u64,
    pairs: u64,
    edges: u64,
}

impl EdgeBudget {
    pub fn new(n: u64, edges: u64) -> Result<Self> {
        let pairs = n * n.saturating_sub(1) / 2;
        if edges > pairs {
            return Err(Error::domain(format!("E={edges} exceeds N={pairs} for n={n}")));
        }
        Ok(EdgeBudget { n, pairs, edges })
    }

    /// `E = round(p N)`, see [`crate::ensemble::edge_budget`].
    pub fn from_density(n: u64, p: &Rational) -> Result<Self> {
        Self::new(n, crate::ensemble::edge_budget(n, p)?)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn pairs(&self) -> u64 {
        self.pairs
    }

    pub fn edges(&self) -> u64 {
        self.edges
    }

    /// `p_n = E / N`, undefined when `N = 0`.
    pub fn density<S: Scalar>(&self) -> Option<S> {
        (self.pairs > 0).then(|| S::from_u64(self.edges) / S::from_u64(self.pairs))
    }
}

/// Probability that `k` given edges are all present in a uniform graph with
/// `E` of `N` possible edges: `E(E-1)...(E-k+1) / (N(N-1)...(N-k+1))`.
pub fn falling_prob<S: Scalar>(edges: u64, pairs: u64, k: u64) -> Result<S> {
    if edges > pairs {
        return Err(Error::domain(format!("E={edges} exceeds N={pairs}")));
    }
    if k > pairs {
        return Err(Error::domain(format!("k={k} exceeds N={pairs}")));
    }
    if k > edges {
        return Ok(S::zero());
    }
    if S::is_exact() {
        let num = crate::motif::falling_factorial(edges, k as usize);
        let den = crate::motif::falling_factorial(pairs, k as usize);
        Ok(S::from_biguint(&num) / S::from_biguint(&den))
    } else {
        Ok((0..k).fold(S::one(), |acc, i| {
            acc * S::from_u64(edges - i) / S::from_u64(pairs - i)
        }))
    }
}

/// Second-order expansion of [`falling_prob`] in `1/N`:
/// `p^k - k(k-1)/(2N) (p^(k-1) - p^k)` with `p = E/N`.
pub fn falling_prob_expansion<S: Scalar>(edges: u64, pairs: u64, k: u64) -> Result<S> {
    if pairs == 0 {
        return Err(Error::domain("N=0"));
    }
    let p = S::from_u64(edges) / S::from_u64(pairs);
    let k_usize = k as usize;
    let lead = powi(&p, k_usize);
    if k == 0 {
        return Ok(lead);
    }
    let correction = S::from_u64(k * (k - 1)) / S::from_u64(2 * pairs)
        * (powi(&p, k_usize - 1) - lead.clone());
    Ok(lead - correction)
}

fn check_probability<S: Scalar>(p: &S) -> Result<()> {
    if *p < S::zero() || *p > S::one() {
        return Err(Error::domain(format!("probability {p:?} outside [0, 1]")));
    }
    Ok(())
}

fn check_table(table: &OverlapTable, budget: &EdgeBudget) -> Result<()> {
    if table.n() != budget.n() {
        return Err(Error::domain(format!(
            "overlap table is for n={} but the edge budget is for n={}",
            table.n(),
            budget.n()
        )));
    }
    Ok(())
}

/// `<T_H> = c_n P(E, N, l)` in the fixed-edge-count ensemble.
pub fn mean_dependent<S: Scalar>(motif: &Motif, budget: &EdgeBudget) -> Result<S> {
    let copies = S::from_biguint(&motif.copies_in_complete(budget.n()));
    if copies.is_zero() {
        return Ok(S::zero());
    }
    let prob = falling_prob::<S>(budget.edges(), budget.pairs(), motif.edge_count() as u64)?;
    Ok(copies * prob)
}

/// `Var(T_H) = sum_k C_k P(E, N, 2l - k) - <T_H>^2`, exactly.
pub fn variance_dependent_exact<S: Scalar>(table: &OverlapTable, budget: &EdgeBudget) -> Result<S> {
    check_table(table, budget)?;
    let l = table.motif().edge_count() as u64;
    let mut second = S::zero();
    for (k, count) in table.counts().iter().enumerate() {
        if count.is_zero() {
            continue;
        }
        let prob = falling_prob::<S>(budget.edges(), budget.pairs(), 2 * l - k as u64)?;
        second = second + S::from_biguint(count) * prob;
    }
    let mean = mean_dependent::<S>(table.motif(), budget)?;
    Ok(second - mean.clone() * mean)
}

/// Leading terms of the fixed-edge-count variance as a polynomial in `n`:
/// `C_2(n) p^(2l-2) (1-p)^2 + C_3(n) p^(2l-3) (1 - 3p^2 + 2p^3)`.
///
/// The error against the exact variance is `O(n^(2v-4))`. The same
/// polynomial is the leading part of the independent-edge residual variance.
pub fn variance_dependent_asymptotic<S: Scalar>(motif: &Motif, p: &S) -> Result<Polynomial<S>> {
    check_probability(p)?;
    let l = motif.edge_count();
    if l < 2 {
        return Ok(Polynomial::zero());
    }
    let polys = overlap_polynomials(motif)?;
    let convert = |k: usize| {
        Polynomial::new(polys[k].poly.coeffs().iter().map(S::from_ratio).collect())
    };
    let one = S::one();
    let q = one.clone() - p.clone();
    let two_term = powi(p, 2 * l - 2) * q.clone() * q;
    let mut result = convert(2).scale(&two_term);
    if l >= 3 {
        let shape = one - S::from_u64(3) * powi(p, 2) + S::from_u64(2) * powi(p, 3);
        result = result + convert(3).scale(&(powi(p, 2 * l - 3) * shape));
    }
    Ok(result)
}

/// Leading terms of the independent-edge residual variance, identical to
/// [`variance_dependent_asymptotic`].
pub fn residual_variance_independent_asymptotic<S: Scalar>(
    motif: &Motif,
    p: &S,
) -> Result<Polynomial<S>> {
    variance_dependent_asymptotic(motif, p)
}

/// `<T_H> = c_n p^l` with independent edges.
pub fn mean_independent<S: Scalar>(motif: &Motif, n: u64, p: &S) -> Result<S> {
    check_probability(p)?;
    let copies = S::from_biguint(&motif.copies_in_complete(n));
    Ok(copies * powi(p, motif.edge_count()))
}

/// `Var(T_H) = sum_{k>=1} C_k (p^(2l-k) - p^(2l))` with independent edges.
pub fn variance_independent_exact<S: Scalar>(table: &OverlapTable, p: &S) -> Result<S> {
    check_probability(p)?;
    let l = table.motif().edge_count();
    let full = powi(p, 2 * l);
    Ok(table
        .counts()
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| !c.is_zero())
        .fold(S::zero(), |acc, (k, c)| {
            acc + S::from_biguint(c) * (powi(p, 2 * l - k) - full.clone())
        }))
}

/// `Cov(T_H, T_E) = c_n l p^l (1 - p)` with independent edges.
pub fn covariance_with_edges_independent<S: Scalar>(motif: &Motif, n: u64, p: &S) -> Result<S> {
    check_probability(p)?;
    let l = motif.edge_count();
    let copies = S::from_biguint(&motif.copies_in_complete(n));
    Ok(copies * S::from_u64(l as u64) * powi(p, l) * (S::one() - p.clone()))
}

/// `Var(T_H) - Cov(T_H, T_E)^2 / Var(T_E)` with `Var(T_E) = N p (1-p)`.
///
/// Requires `0 < p < 1` and `n >= 2`.
pub fn residual_variance_independent<S: Scalar>(table: &OverlapTable, p: &S) -> Result<S> {
    check_probability(p)?;
    let pairs = table.pairs();
    let edge_variance = S::from_u64(pairs) * p.clone() * (S::one() - p.clone());
    if edge_variance.is_zero() {
        return Err(Error::domain("residual variance needs 0 < p < 1 and n >= 2"));
    }
    let variance = variance_independent_exact::<S>(table, p)?;
    let cov = covariance_with_edges_independent::<S>(table.motif(), table.n(), p)?;
    Ok(variance - cov.clone() * cov / edge_variance)
}

/// The residual variance written directly over the overlap table:
/// `sum_k C_k (p^(2l-k) - p^(2l) - k (p^(2l-1) - p^(2l)))`.
pub fn residual_variance_by_overlaps<S: Scalar>(table: &OverlapTable, p: &S) -> Result<S> {
    check_probability(p)?;
    let l = table.motif().edge_count();
    let full = powi(p, 2 * l);
    let slope = powi(p, 2 * l - 1) - full.clone();
    Ok(table
        .counts()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .fold(S::zero(), |acc, (k, c)| {
            let term = powi(p, 2 * l - k) - full.clone() - S::from_u64(k as u64) * slope.clone();
            acc + S::from_biguint(c) * term
        }))
}

/// Exact moments of `T_H` for one motif, ensemble and size.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport<S> {
    pub motif: String,
    pub ensemble: EnsembleKind,
    pub n: u64,
    /// Fixed edge count (dependent ensemble only).
    pub edges: Option<u64>,
    /// Edge probability, or the edge density `E/N` for the dependent ensemble.
    pub p: Option<S>,
    pub mean: S,
    pub variance: S,
    pub covariance_with_edges: Option<S>,
    pub residual_variance: Option<S>,
}

pub fn dependent_report<S: Scalar>(table: &OverlapTable, budget: &EdgeBudget) -> Result<MomentReport<S>> {
    Ok(MomentReport {
        motif: table.motif().label(),
        ensemble: EnsembleKind::Dependent,
        n: table.n(),
        edges: Some(budget.edges()),
        p: budget.density(),
        mean: mean_dependent(table.motif(), budget)?,
        variance: variance_dependent_exact(table, budget)?,
        covariance_with_edges: None,
        residual_variance: None,
    })
}

/// Report for the independent ensemble. The residual variance is omitted
/// when it is undefined (`p` in `{0, 1}` or `n < 2`).
pub fn independent_report<S: Scalar>(table: &OverlapTable, p: &S) -> Result<MomentReport<S>> {
    let residual = match residual_variance_independent(table, p) {
        Ok(value) => Some(value),
        Err(Error::Domain(_)) => None,
        Err(other) => return Err(other),
    };
    Ok(MomentReport {
        motif: table.motif().label(),
        ensemble: EnsembleKind::Independent,
        n: table.n(),
        edges: None,
        p: Some(p.clone()),
        mean: mean_independent(table.motif(), table.n(), p)?,
        variance: variance_independent_exact(table, p)?,
        covariance_with_edges: Some(covariance_with_edges_independent(table.motif(), table.n(), p)?),
        residual_variance: residual,
    })
}

/// What the expansion is written in powers of.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SizeParameter {
    /// Number of vertices `n`.
    #[serde(rename = "n")]
    Vertices,
    /// Number of vertex pairs `N = n(n-1)/2`.
    #[serde(rename = "N")]
    Pairs,
}

impl fmt::Display for SizeParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SizeParameter::Vertices => "n",
            SizeParameter::Pairs => "N",
        })
    }
}

/// A coefficient of the form `rational * 2^log2`, which covers the
/// half-integer powers of two that appear when `n` is rewritten in `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledCoefficient<S> {
    pub rational: S,
    pub log2: Rational64,
}

impl<S: Scalar> ScaledCoefficient<S> {
    pub fn to_f64(&self) -> f64 {
        let exponent = *self.log2.numer() as f64 / *self.log2.denom() as f64;
        self.rational.to_f64() * exponent.exp2()
    }
}

/// Volume and surface terms of `<T_H>` together with the growth of the
/// standard deviation, in the chosen size parameter.
///
/// The variance exponents are the generic orders: `2v - 3` (dependent) and
/// `2v - 2` (independent) in powers of `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticExpansion<S> {
    pub motif: String,
    pub ensemble: EnsembleKind,
    pub size_parameter: SizeParameter,
    pub volume_exponent: Rational64,
    pub volume_coefficient: ScaledCoefficient<S>,
    pub surface_exponent: Rational64,
    pub surface_coefficient: ScaledCoefficient<S>,
    pub variance_growth_exponent: Rational64,
    pub surface_significant: bool,
}

impl<S> AsymptoticExpansion<S> {
    pub fn std_growth_exponent(&self) -> Rational64 {
        self.variance_growth_exponent / 2
    }
}

pub fn asymptotic_report<S: Scalar>(
    motif: &Motif,
    p: &S,
    ensemble: EnsembleKind,
    size_parameter: SizeParameter,
) -> Result<AsymptoticExpansion<S>> {
    check_probability(p)?;
    let v = motif.vertex_count() as i64;
    let base = powi(p, motif.edge_count()) / S::from_u64(motif.automorphism_order().get());
    let variance_in_n = match ensemble {
        EnsembleKind::Dependent => 2 * v - 3,
        EnsembleKind::Independent => 2 * v - 2,
    };
    let half = Rational64::new(1, 2);
    let (volume_exponent, volume, surface_exponent, surface, variance_growth_exponent) =
        match size_parameter {
            SizeParameter::Vertices => (
                Rational64::from_integer(v),
                ScaledCoefficient { rational: base.clone(), log2: Rational64::zero() },
                Rational64::from_integer(v - 1),
                ScaledCoefficient {
                    rational: -(S::from_i64(v * (v - 1)) / S::from_u64(2)) * base,
                    log2: Rational64::zero(),
                },
                Rational64::from_integer(variance_in_n),
            ),
            // n = sqrt(2N) + 1/2 + O(N^(-1/2)), substituted into the n-expansion.
            SizeParameter::Pairs => (
                Rational64::from_integer(v) * half,
                ScaledCoefficient { rational: base.clone(), log2: Rational64::from_integer(v) * half },
                Rational64::from_integer(v - 1) * half,
                ScaledCoefficient {
                    rational: -S::from_i64(v * (v - 2)) * base,
                    log2: Rational64::from_integer(v) * half - Rational64::new(3, 2),
                },
                Rational64::from_integer(variance_in_n) * half,
            ),
        };
    Ok(AsymptoticExpansion {
        motif: motif.label(),
        ensemble,
        size_parameter,
        volume_exponent,
        volume_coefficient: volume,
        surface_exponent,
        surface_coefficient: surface,
        variance_growth_exponent,
        surface_significant: variance_growth_exponent / 2 < surface_exponent,
    })
}
