//! Overlap census: `C_k`, the number of ordered pairs of copies of a motif
//! in `K_n` that share exactly `k` edges (identical pairs included).
//!
//! Two independent routes are provided:
//!
//! * [`OverlapProfile`] fixes one reference copy on vertices `0..v` and
//!   enumerates how a second copy can place each of its vertices either on
//!   a reference vertex or outside it. Placements with `j` outside vertices
//!   extend in `(n-v)(n-v-1)...(n-v-j+1)` ways, so a single enumeration
//!   (independent of `n`) yields the table for every `n`. The symmetric
//!   group acts transitively on copies, so multiplying by `c_n` gives `C_k`.
//! * [`overlap_table_by_pairs`] lists every copy as an edge set and
//!   intersects all ordered pairs. It is guarded by [`PAIR_LIMIT`].

use std::collections::HashSet;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::ensemble::edge_index;
use crate::error::{Error, Result};
use crate::motif::Motif;
use crate::poly::Polynomial;
use crate::{ExactPolynomial, Rational, Scalar};

/// Upper bound on `c_n^2` for the pair-enumeration census.
pub const PAIR_LIMIT: u64 = 1_000_000_000;

/// Exact overlap counts `[C_0, ..., C_l]` for one motif and one `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapTable {
    motif: Motif,
    n: u64,
    copies: BigUint,
    counts: Vec<BigUint>,
}

impl OverlapTable {
    pub fn motif(&self) -> &Motif {
        &self.motif
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `c_n`, the number of copies in `K_n`.
    pub fn copies(&self) -> &BigUint {
        &self.copies
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn count(&self, k: usize) -> BigUint {
        self.counts.get(k).cloned().unwrap_or_default()
    }

    /// `N_n = n(n-1)/2`.
    pub fn pairs(&self) -> u64 {
        self.n * self.n.saturating_sub(1) / 2
    }

    /// `sum_k C_k == c_n^2`.
    pub fn sum_identity_holds(&self) -> bool {
        self.counts.iter().sum::<BigUint>() == &self.copies * &self.copies
    }

    /// `sum_k k C_k == l^2 c_n^2 / N_n` as rationals. For `n < 2` both sides
    /// vanish and the check reduces to `sum_k k C_k == 0`.
    pub fn weighted_identity_holds(&self) -> bool {
        let weighted = self.weighted_sum();
        let l = BigUint::from(self.motif.edge_count());
        let rhs_num = &l * &l * &self.copies * &self.copies;
        match self.pairs() {
            0 => weighted.is_zero() && rhs_num.is_zero(),
            pairs => {
                Rational::from_biguint(&weighted)
                    == Rational::from_biguint(&rhs_num) / Rational::from_u64(pairs)
            }
        }
    }

    /// `sum_k k C_k`.
    pub fn weighted_sum(&self) -> BigUint {
        self.counts.iter().enumerate().map(|(k, c)| c * k).sum()
    }
}

/// `C_k` as a polynomial in `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapPolynomial<S> {
    pub k: usize,
    pub poly: Polynomial<S>,
}

impl<S: Scalar> OverlapPolynomial<S> {
    pub fn degree(&self) -> Option<usize> {
        self.poly.degree()
    }

    pub fn eval(&self, n: u64) -> S {
        self.poly.eval(&S::from_u64(n))
    }
}

/// Placement histogram of a second copy relative to a fixed reference copy.
///
/// `histogram[k][j]` counts partial injections of the motif's vertices into
/// the reference vertex set that leave `j` vertices outside and make exactly
/// `k` motif edges land on reference edges.
#[derive(Clone, Debug)]
pub struct OverlapProfile {
    motif: Motif,
    automorphisms: u64,
    histogram: Vec<Vec<u64>>,
}

impl OverlapProfile {
    pub fn new(motif: &Motif) -> Self {
        let v = motif.vertex_count();
        let l = motif.edge_count();
        let masks = motif.adjacency_masks();
        let mut histogram = vec![vec![0u64; v + 1]; l + 1];
        let mut placement = vec![usize::MAX; v];
        place(&masks, &mut placement, 0, 0, 0, 0, &mut histogram);
        OverlapProfile {
            motif: motif.clone(),
            automorphisms: motif.automorphism_order().get(),
            histogram,
        }
    }

    pub fn motif(&self) -> &Motif {
        &self.motif
    }

    pub fn histogram(&self) -> &[Vec<u64>] {
        &self.histogram
    }

    /// Overlap table at `n`.
    pub fn table(&self, n: u64) -> OverlapTable {
        let v = self.motif.vertex_count();
        let l = self.motif.edge_count();
        let copies = self.motif.copies_in_complete(n);
        let counts = if (n as usize) < v {
            vec![BigUint::zero(); l + 1]
        } else {
            let outside = n - v as u64;
            let extensions: Vec<BigUint> = (0..=v).map(|j| crate::motif::falling_factorial(outside, j)).collect();
            let group = BigUint::from(self.automorphisms);
            self.histogram
                .iter()
                .map(|row| {
                    let maps: BigUint = row.iter().zip(&extensions).map(|(&h, e)| e * h).sum();
                    let (per_copy, rem) = maps.div_rem(&group);
                    assert!(rem.is_zero(), "placement count not divisible by |Aut(H)|");
                    &copies * per_copy
                })
                .collect()
        };
        OverlapTable {
            motif: self.motif.clone(),
            n,
            copies,
            counts,
        }
    }

    /// Closed form of `C_k(n)` read directly off the histogram.
    pub fn closed_form(&self, k: usize) -> ExactPolynomial {
        let v = self.motif.vertex_count();
        let group = Rational::from_u64(self.automorphisms);
        let copies = Polynomial::falling_factorial(0, v).scale(&(Rational::from_u64(1) / group.clone()));
        let placements = self.histogram[k]
            .iter()
            .enumerate()
            .fold(Polynomial::zero(), |acc, (j, &h)| {
                acc + Polynomial::falling_factorial(v as u64, j).scale(&Rational::from_u64(h))
            });
        copies * placements.scale(&(Rational::from_u64(1) / group))
    }
}

/// Assign motif vertex `x` either outside the reference copy or to an unused
/// reference vertex, tracking the number of shared edges.
fn place(
    masks: &[u16],
    placement: &mut [usize],
    x: usize,
    used: u16,
    outside: usize,
    shared: usize,
    histogram: &mut [Vec<u64>],
) {
    let v = masks.len();
    if x == v {
        histogram[shared][outside] += 1;
        return;
    }
    placement[x] = usize::MAX;
    place(masks, placement, x + 1, used, outside + 1, shared, histogram);
    for anchor in 0..v {
        if used & (1 << anchor) != 0 {
            continue;
        }
        let gained = (0..x)
            .filter(|&y| masks[x] & (1 << y) != 0)
            .filter(|&y| placement[y] != usize::MAX && masks[anchor] & (1 << placement[y]) != 0)
            .count();
        placement[x] = anchor;
        place(masks, placement, x + 1, used | (1 << anchor), outside, shared + gained, histogram);
    }
    placement[x] = usize::MAX;
}

/// Overlap table of `motif` in `K_n` via the anchored placement count.
pub fn overlap_table(motif: &Motif, n: u64) -> Result<OverlapTable> {
    Ok(OverlapProfile::new(motif).table(n))
}

/// Every copy of `motif` in `K_n`, as a sorted list of edge indices.
pub fn enumerate_copies(motif: &Motif, n: u64) -> Vec<Vec<u64>> {
    let v = motif.vertex_count();
    if (n as usize) < v {
        return Vec::new();
    }
    let mut seen = HashSet::new();
    let mut image = vec![0u32; v];
    let mut used = vec![false; n as usize];
    collect_copies(motif, n as u32, 0, &mut image, &mut used, &mut seen);
    let mut copies: Vec<Vec<u64>> = seen.into_iter().collect();
    copies.sort_unstable();
    copies
}

fn collect_copies(
    motif: &Motif,
    n: u32,
    x: usize,
    image: &mut [u32],
    used: &mut [bool],
    seen: &mut HashSet<Vec<u64>>,
) {
    if x == motif.vertex_count() {
        let mut edges: Vec<u64> = motif
            .edges()
            .iter()
            .map(|&(a, b)| edge_index(image[a].min(image[b]), image[a].max(image[b])))
            .collect();
        edges.sort_unstable();
        seen.insert(edges);
        return;
    }
    for t in 0..n {
        if !used[t as usize] {
            used[t as usize] = true;
            image[x] = t;
            collect_copies(motif, n, x + 1, image, used, seen);
            used[t as usize] = false;
        }
    }
}

/// Overlap table by intersecting every ordered pair of copies.
///
/// Fails with [`Error::FeasibilityExceeded`] when `c_n^2 > PAIR_LIMIT`.
pub fn overlap_table_by_pairs(motif: &Motif, n: u64) -> Result<OverlapTable> {
    let copies_count = motif.copies_in_complete(n);
    let squared = &copies_count * &copies_count;
    if squared > BigUint::from(PAIR_LIMIT) {
        return Err(Error::FeasibilityExceeded {
            work: format!("{squared} copy pairs of {} in K_{n}", motif.label()),
            limit: PAIR_LIMIT,
        });
    }
    let copies = enumerate_copies(motif, n);
    debug_assert_eq!(copies.len().to_u64(), copies_count.to_u64());
    let l = motif.edge_count();
    let counts = copies
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let mut local = vec![0u64; l + 1];
            local[l] += 1;
            for b in &copies[i + 1..] {
                local[shared_edges(a, b)] += 2;
            }
            local
        })
        .reduce(
            || vec![0u64; l + 1],
            |mut acc, local| {
                acc.iter_mut().zip(local).for_each(|(a, b)| *a += b);
                acc
            },
        );
    Ok(OverlapTable {
        motif: motif.clone(),
        n,
        copies: copies_count,
        counts: counts.into_iter().map(BigUint::from).collect(),
    })
}

fn shared_edges(a: &[u64], b: &[u64]) -> usize {
    let (mut i, mut j, mut shared) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    shared
}

/// Interpolation nodes `n = v, ..., 3v` and the two verification points.
fn interpolation_nodes(motif: &Motif) -> (Vec<u64>, [u64; 2]) {
    let v = motif.vertex_count() as u64;
    ((v..=3 * v).collect(), [3 * v + 1, 3 * v + 2])
}

/// `C_k(n)` for every `k`, recovered by exact interpolation through
/// `2v + 1` tabulated values and checked at two further `n`.
pub fn overlap_polynomials(motif: &Motif) -> Result<Vec<OverlapPolynomial<Rational>>> {
    let profile = OverlapProfile::new(motif);
    let (nodes, checks) = interpolation_nodes(motif);
    let tables: Vec<OverlapTable> = nodes.iter().map(|&n| profile.table(n)).collect();
    let check_tables: Vec<OverlapTable> = checks.iter().map(|&n| profile.table(n)).collect();
    (0..=motif.edge_count())
        .map(|k| {
            let points: Vec<(Rational, Rational)> = tables
                .iter()
                .map(|t| (Rational::from_u64(t.n()), Rational::from_biguint(&t.count(k))))
                .collect();
            let poly = Polynomial::interpolate(&points);
            for t in &check_tables {
                if poly.eval(&Rational::from_u64(t.n())) != Rational::from_biguint(&t.count(k)) {
                    return Err(Error::VerificationFailed { k, n: t.n() });
                }
            }
            Ok(OverlapPolynomial { k, poly })
        })
        .collect()
}

/// `C_k(n)` as an exact polynomial in `n`.
pub fn overlap_polynomial(motif: &Motif, k: usize) -> Result<OverlapPolynomial<Rational>> {
    if k > motif.edge_count() {
        return Err(Error::domain(format!(
            "k={k} exceeds the edge count {} of {}",
            motif.edge_count(),
            motif.label()
        )));
    }
    let mut all = overlap_polynomials(motif)?;
    Ok(all.swap_remove(k))
}
