//! Seeded samplers for the fixed-edge-count and independent-edge ensembles
//! and their block-model versions.
//!
//! Every replica draws from its own ChaCha8 stream: the generator is seeded
//! with the master seed and switched to stream `replica_index`, so replicas
//! can be produced in any order or in parallel and still be bit-identical.

#![allow(clippy::needless_range_loop)]

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Rational;

/// Index of the unordered pair `{i, j}`, `i < j`, in `0..n(n-1)/2`.
#[inline]
pub fn edge_index(i: u32, j: u32) -> u64 {
    debug_assert!(i < j);
    let j = u64::from(j);
    j * (j - 1) / 2 + u64::from(i)
}

/// Inverse of [`edge_index`].
#[inline]
pub fn edge_from_index(index: u64) -> (u32, u32) {
    let mut j = ((1.0 + (1.0 + 8.0 * index as f64).sqrt()) / 2.0) as u64;
    while j * (j - 1) / 2 > index {
        j -= 1;
    }
    while (j + 1) * j / 2 <= index {
        j += 1;
    }
    ((index - j * (j - 1) / 2) as u32, j as u32)
}

/// Identifies one replica's random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedStream {
    pub master_seed: u64,
    pub replica_index: u64,
}

impl SeedStream {
    pub fn new(master_seed: u64, replica_index: u64) -> Self {
        SeedStream {
            master_seed,
            replica_index,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.replica_index);
        rng
    }
}

/// An exact probability `num / den` with `den > 0` and `num <= den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Probability {
    num: u64,
    den: u64,
}

impl Probability {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num > den {
            return Err(Error::domain(format!("{num}/{den} is not a probability")));
        }
        let g = num.gcd(&den);
        Ok(Probability {
            num: num / g,
            den: den / g,
        })
    }

    pub fn from_ratio(p: &Rational) -> Result<Self> {
        if p.numer() < &BigInt::zero() || p > &Rational::one() {
            return Err(Error::domain(format!("{p} is not a probability")));
        }
        match (p.numer().to_u64(), p.denom().to_u64()) {
            (Some(num), Some(den)) => Probability::new(num, den),
            _ => Err(Error::domain(format!("{p} has a numerator or denominator beyond 64 bits"))),
        }
    }

    pub fn to_ratio(self) -> Rational {
        Rational::new(self.num.into(), self.den.into())
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Exact Bernoulli draw.
    #[inline]
    pub fn sample<R: Rng>(self, rng: &mut R) -> bool {
        self.num == self.den || (self.num > 0 && rng.random_range(0..self.den) < self.num)
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// A simple graph on vertices `0..n`, optionally vertex-coloured.
///
/// Edges are stored as `(i, j)` with `i < j`, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphSample {
    n: u32,
    edges: Vec<(u32, u32)>,
    colors: Option<Vec<u16>>,
}

impl GraphSample {
    pub fn new(n: u32, edges: impl IntoIterator<Item = (u32, u32)>, colors: Option<Vec<u16>>) -> Result<Self> {
        let mut normalized: Vec<(u32, u32)> = Vec::new();
        for (a, b) in edges {
            if a == b || a >= n || b >= n {
                return Err(Error::domain(format!("invalid edge {a}-{b} for n={n}")));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        if normalized.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("duplicate edge"));
        }
        if colors.as_ref().is_some_and(|c| c.len() != n as usize) {
            return Err(Error::domain("color vector length differs from n"));
        }
        Ok(GraphSample {
            n,
            edges: normalized,
            colors,
        })
    }

    fn from_indices(n: u32, indices: Vec<u64>, colors: Option<Vec<u16>>) -> Self {
        let mut edges: Vec<(u32, u32)> = indices.into_iter().map(edge_from_index).collect();
        edges.sort_unstable();
        GraphSample { n, edges, colors }
    }

    pub fn complete(n: u32) -> Self {
        GraphSample {
            n,
            edges: (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
            colors: None,
        }
    }

    pub fn empty(n: u32) -> Self {
        GraphSample {
            n,
            edges: Vec::new(),
            colors: None,
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge_count(&self) -> u64 {
        self.edges.len() as u64
    }

    pub fn colors(&self) -> Option<&[u16]> {
        self.colors.as_deref()
    }

    pub fn with_colors(mut self, colors: Vec<u16>) -> Result<Self> {
        if colors.len() != self.n as usize {
            return Err(Error::domain("color vector length differs from n"));
        }
        self.colors = Some(colors);
        Ok(self)
    }

    /// Dump line: `n E i1-j1 i2-j2 ...`, prefixed by `colors=c0,c1,...` when
    /// the graph is coloured.
    pub fn dump_line(&self) -> String {
        let mut out = String::new();
        if let Some(colors) = &self.colors {
            let joined: Vec<String> = colors.iter().map(u16::to_string).collect();
            out.push_str("colors=");
            out.push_str(&joined.join(","));
            out.push(' ');
        }
        out.push_str(&format!("{} {}", self.n, self.edges.len()));
        for (a, b) in &self.edges {
            out.push_str(&format!(" {a}-{b}"));
        }
        out
    }

    /// Parse a line written by [`GraphSample::dump_line`].
    pub fn parse_dump_line(line: &str) -> Result<Self> {
        let bad = || Error::domain(format!("malformed sample line '{line}'"));
        let mut tokens: Vec<&str> = line.split_whitespace().collect();
        let colors = match tokens.first().and_then(|t| t.strip_prefix("colors=")) {
            Some(list) => {
                let colors = list
                    .split(',')
                    .map(|c| c.parse::<u16>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad())?;
                tokens.remove(0);
                Some(colors)
            }
            None => None,
        };
        let n: u32 = tokens.first().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
        let count: usize = tokens.get(1).and_then(|t| t.parse().ok()).ok_or_else(bad)?;
        let edges = tokens[2..]
            .iter()
            .map(|t| {
                let (a, b) = t.split_once('-').ok_or_else(bad)?;
                Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
            })
            .collect::<Result<Vec<(u32, u32)>>>()?;
        if edges.len() != count {
            return Err(bad());
        }
        GraphSample::new(n, edges, colors)
    }
}

/// `k` distinct values from `0..population`, uniformly.
///
/// Partial Fisher-Yates over a sparse swap map when `k <= population / 2`,
/// otherwise the complement is sampled and inverted. The result order is
/// unspecified.
pub fn sample_without_replacement<R: Rng>(rng: &mut R, population: u64, k: u64) -> Vec<u64> {
    assert!(k <= population, "cannot draw {k} of {population}");
    if k > population / 2 {
        let mut excluded = sample_without_replacement(rng, population, population - k);
        excluded.sort_unstable();
        let mut out = Vec::with_capacity(k as usize);
        let mut skip = excluded.into_iter().peekable();
        for value in 0..population {
            if skip.peek() == Some(&value) {
                skip.next();
            } else {
                out.push(value);
            }
        }
        return out;
    }
    let mut swapped: HashMap<u64, u64> = HashMap::with_capacity(2 * k as usize);
    let mut out = Vec::with_capacity(k as usize);
    for i in 0..k {
        let r = rng.random_range(i..population);
        let at_r = swapped.get(&r).copied().unwrap_or(r);
        let at_i = swapped.get(&i).copied().unwrap_or(i);
        swapped.insert(r, at_i);
        out.push(at_r);
    }
    out
}

fn pair_count(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Uniform graph on `n` vertices with exactly `edges` edges.
pub fn sample_dependent(n: u32, edges: u64, stream: &SeedStream) -> Result<GraphSample> {
    let pairs = pair_count(u64::from(n));
    if edges > pairs {
        return Err(Error::domain(format!("E={edges} exceeds N={pairs} for n={n}")));
    }
    let mut rng = stream.rng();
    let indices = sample_without_replacement(&mut rng, pairs, edges);
    Ok(GraphSample::from_indices(n, indices, None))
}

/// Graph on `n` vertices with each pair present independently with
/// probability `p`. Pairs are visited in edge-index order; the stored edge
/// list is sorted like every other sample.
pub fn sample_independent(n: u32, p: Probability, stream: &SeedStream) -> GraphSample {
    let mut rng = stream.rng();
    let mut edges = Vec::new();
    for j in 1..n {
        for i in 0..j {
            if p.sample(&mut rng) {
                edges.push((i, j));
            }
        }
    }
    edges.sort_unstable();
    GraphSample {
        n,
        edges,
        colors: None,
    }
}

/// `round(p N)` with halves rounded up, `N = n(n-1)/2`.
pub fn edge_budget(n: u64, p: &Rational) -> Result<u64> {
    if p.numer() < &BigInt::zero() || p > &Rational::one() {
        return Err(Error::domain(format!("{p} is not a probability")));
    }
    let scaled = p * Rational::from_integer(pair_count(n).into()) + Rational::new(1.into(), 2.into());
    Ok(scaled.floor().to_integer().to_u64().expect("budget fits in u64"))
}

/// The four ensembles.
#[derive(Clone, Debug, PartialEq)]
pub enum EnsembleSpec {
    Dependent { n: u32, edges: u64 },
    Independent { n: u32, p: Probability },
    /// Exactly `edges[i][j]` edges between colors `i` and `j`.
    BlockDependent { sizes: Vec<u32>, edges: Vec<Vec<u64>> },
    /// Edge probability `p[i][j]` between colors `i` and `j`.
    BlockIndependent { sizes: Vec<u32>, p: Vec<Vec<Probability>> },
}

/// Number of vertex pairs between blocks `i` and `j`.
pub fn block_slots(sizes: &[u32], i: usize, j: usize) -> u64 {
    if i == j {
        pair_count(u64::from(sizes[i]))
    } else {
        u64::from(sizes[i]) * u64::from(sizes[j])
    }
}

/// Per-pair budgets `round(p_ij * slots_ij)` for the block-dependent model.
pub fn block_budget(sizes: &[u32], densities: &[Vec<Rational>]) -> Result<Vec<Vec<u64>>> {
    let b = sizes.len();
    if densities.len() != b || densities.iter().any(|row| row.len() != b) {
        return Err(Error::domain("density matrix shape does not match the block count"));
    }
    let half = Rational::new(1.into(), 2.into());
    let mut out = vec![vec![0; b]; b];
    for i in 0..b {
        for j in 0..b {
            let p = &densities[i][j];
            if p.numer() < &BigInt::zero() || p > &Rational::one() {
                return Err(Error::domain(format!("{p} is not a probability")));
            }
            let scaled = p * Rational::from_integer(block_slots(sizes, i, j).into()) + half.clone();
            out[i][j] = scaled.floor().to_integer().to_u64().expect("budget fits in u64");
        }
    }
    Ok(out)
}

fn block_offsets(sizes: &[u32]) -> Vec<u32> {
    sizes
        .iter()
        .scan(0u32, |acc, &s| {
            let start = *acc;
            *acc += s;
            Some(start)
        })
        .collect()
}

fn block_colors(sizes: &[u32]) -> Vec<u16> {
    sizes
        .iter()
        .enumerate()
        .flat_map(|(c, &s)| std::iter::repeat_n(c as u16, s as usize))
        .collect()
}

/// Global edge for slot `index` between blocks `i <= j`.
fn block_edge(sizes: &[u32], offsets: &[u32], i: usize, j: usize, index: u64) -> (u32, u32) {
    if i == j {
        let (a, b) = edge_from_index(index);
        (offsets[i] + a, offsets[i] + b)
    } else {
        let width = u64::from(sizes[j]);
        (offsets[i] + (index / width) as u32, offsets[j] + (index % width) as u32)
    }
}

impl EnsembleSpec {
    pub fn vertex_count(&self) -> u32 {
        match self {
            EnsembleSpec::Dependent { n, .. } | EnsembleSpec::Independent { n, .. } => *n,
            EnsembleSpec::BlockDependent { sizes, .. } | EnsembleSpec::BlockIndependent { sizes, .. } => {
                sizes.iter().sum()
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EnsembleSpec::Dependent { .. } => "dependent",
            EnsembleSpec::Independent { .. } => "independent",
            EnsembleSpec::BlockDependent { .. } => "block_dependent",
            EnsembleSpec::BlockIndependent { .. } => "block_independent",
        }
    }

    /// Total edge count when it is fixed by the ensemble.
    pub fn fixed_edge_count(&self) -> Option<u64> {
        match self {
            EnsembleSpec::Dependent { edges, .. } => Some(*edges),
            EnsembleSpec::BlockDependent { edges, .. } => {
                Some((0..edges.len()).flat_map(|i| (i..edges.len()).map(move |j| (i, j))).map(|(i, j)| edges[i][j]).sum())
            }
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            EnsembleSpec::Dependent { n, edges } => {
                let pairs = pair_count(u64::from(*n));
                if *edges > pairs {
                    return Err(Error::domain(format!("E={edges} exceeds N={pairs} for n={n}")));
                }
            }
            EnsembleSpec::Independent { .. } => {}
            EnsembleSpec::BlockDependent { sizes, edges } => {
                check_square(sizes, edges)?;
                for i in 0..sizes.len() {
                    for j in 0..sizes.len() {
                        if edges[i][j] != edges[j][i] {
                            return Err(Error::domain("block edge-count matrix is not symmetric"));
                        }
                        let slots = block_slots(sizes, i, j);
                        if edges[i][j] > slots {
                            return Err(Error::domain(format!(
                                "E[{i}][{j}]={} exceeds the {slots} available pairs",
                                edges[i][j]
                            )));
                        }
                    }
                }
            }
            EnsembleSpec::BlockIndependent { sizes, p } => {
                check_square(sizes, p)?;
                for i in 0..sizes.len() {
                    for j in 0..sizes.len() {
                        if p[i][j] != p[j][i] {
                            return Err(Error::domain("block probability matrix is not symmetric"));
                        }
                    }
                }
            }
        }
        if u64::from(self.vertex_count()) > u64::from(u32::MAX) / 2 {
            return Err(Error::domain("too many vertices"));
        }
        Ok(())
    }

    /// Draw one graph for the given stream.
    pub fn sample(&self, stream: &SeedStream) -> Result<GraphSample> {
        match self {
            EnsembleSpec::Dependent { n, edges } => sample_dependent(*n, *edges, stream),
            EnsembleSpec::Independent { n, p } => Ok(sample_independent(*n, *p, stream)),
            _ => sample_block(self, stream),
        }
    }
}

fn check_square<T>(sizes: &[u32], matrix: &[Vec<T>]) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::domain("block model needs at least one block"));
    }
    if matrix.len() != sizes.len() || matrix.iter().any(|row| row.len() != sizes.len()) {
        return Err(Error::domain("block matrix shape does not match the block count"));
    }
    Ok(())
}

/// Coloured graph from a block ensemble. Vertices of color `c` occupy a
/// contiguous range; color pairs `(i, j)`, `i <= j`, are filled in order from
/// a single stream, independently of each other.
pub fn sample_block(spec: &EnsembleSpec, stream: &SeedStream) -> Result<GraphSample> {
    spec.validate()?;
    let mut rng = stream.rng();
    let (sizes, mut edges) = match spec {
        EnsembleSpec::BlockDependent { sizes, edges: budget } => {
            let offsets = block_offsets(sizes);
            let mut edges = Vec::new();
            for i in 0..sizes.len() {
                for j in i..sizes.len() {
                    let slots = block_slots(sizes, i, j);
                    for index in sample_without_replacement(&mut rng, slots, budget[i][j]) {
                        edges.push(block_edge(sizes, &offsets, i, j, index));
                    }
                }
            }
            (sizes, edges)
        }
        EnsembleSpec::BlockIndependent { sizes, p } => {
            let offsets = block_offsets(sizes);
            let mut edges = Vec::new();
            for i in 0..sizes.len() {
                for j in i..sizes.len() {
                    for index in 0..block_slots(sizes, i, j) {
                        if p[i][j].sample(&mut rng) {
                            edges.push(block_edge(sizes, &offsets, i, j, index));
                        }
                    }
                }
            }
            (sizes, edges)
        }
        _ => return Err(Error::domain("not a block ensemble")),
    };
    edges.sort_unstable();
    Ok(GraphSample {
        n: sizes.iter().sum(),
        edges,
        colors: Some(block_colors(sizes)),
    })
}

/// Edge counts between every pair of colors of a coloured sample.
pub fn color_pair_counts(sample: &GraphSample, blocks: usize) -> Result<Vec<Vec<u64>>> {
    let colors = sample.colors().ok_or_else(|| Error::domain("sample is not coloured"))?;
    let mut counts = vec![vec![0u64; blocks]; blocks];
    for &(a, b) in sample.edges() {
        let (ca, cb) = (colors[a as usize] as usize, colors[b as usize] as usize);
        counts[ca][cb] += 1;
        if ca != cb {
            counts[cb][ca] += 1;
        }
    }
    Ok(counts)
}

/// An ensemble indexed by the vertex scale `n`.
///
/// Block families scale every block: block `c` has `weights[c] * n` vertices.
#[derive(Clone, Debug, PartialEq)]
pub enum EnsembleFamily {
    /// `E = round(p N)` edges.
    Dependent { p: Rational },
    /// The same `E` at every `n`.
    FixedEdges { edges: u64 },
    Independent { p: Rational },
    BlockDependent { weights: Vec<u32>, densities: Vec<Vec<Rational>> },
    BlockIndependent { weights: Vec<u32>, p: Vec<Vec<Rational>> },
}

impl EnsembleFamily {
    pub fn name(&self) -> &'static str {
        match self {
            EnsembleFamily::Dependent { .. } | EnsembleFamily::FixedEdges { .. } => "dependent",
            EnsembleFamily::Independent { .. } => "independent",
            EnsembleFamily::BlockDependent { .. } => "block_dependent",
            EnsembleFamily::BlockIndependent { .. } => "block_independent",
        }
    }

    /// The single edge density, for the two uncoloured density families.
    pub fn density(&self) -> Option<&Rational> {
        match self {
            EnsembleFamily::Dependent { p } | EnsembleFamily::Independent { p } => Some(p),
            _ => None,
        }
    }

    pub fn block_count(&self) -> usize {
        match self {
            EnsembleFamily::BlockDependent { weights, .. } | EnsembleFamily::BlockIndependent { weights, .. } => {
                weights.len()
            }
            _ => 1,
        }
    }

    pub fn at(&self, n: u32) -> Result<EnsembleSpec> {
        let scaled = |weights: &[u32]| -> Result<Vec<u32>> {
            weights
                .iter()
                .map(|w| w.checked_mul(n).ok_or_else(|| Error::domain("block size overflows")))
                .collect()
        };
        let spec = match self {
            EnsembleFamily::Dependent { p } => EnsembleSpec::Dependent {
                n,
                edges: edge_budget(u64::from(n), p)?,
            },
            EnsembleFamily::FixedEdges { edges } => EnsembleSpec::Dependent { n, edges: *edges },
            EnsembleFamily::Independent { p } => EnsembleSpec::Independent {
                n,
                p: Probability::from_ratio(p)?,
            },
            EnsembleFamily::BlockDependent { weights, densities } => {
                let sizes = scaled(weights)?;
                let edges = block_budget(&sizes, densities)?;
                EnsembleSpec::BlockDependent { sizes, edges }
            }
            EnsembleFamily::BlockIndependent { weights, p } => {
                check_square(weights, p)?;
                let p = p
                    .iter()
                    .map(|row| row.iter().map(Probability::from_ratio).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                EnsembleSpec::BlockIndependent { sizes: scaled(weights)?, p }
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}
