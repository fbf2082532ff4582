//! Counting copies of a motif in a host graph.
//!
//! A copy is an edge subset isomorphic to the motif. The generic counter
//! enumerates injective homomorphisms by backtracking and divides by the
//! automorphism order; triangles, 2-stars and edges have closed-form fast
//! paths.

use itertools::Itertools;

use crate::ensemble::GraphSample;
use crate::error::{Error, Result};
use crate::motif::{Builtin, Motif};

/// Hosts up to this many vertices also get a bitset adjacency matrix.
pub const BITSET_LIMIT: usize = 512;

/// Adjacency view of a [`GraphSample`] built for counting.
#[derive(Clone, Debug)]
pub struct HostGraph {
    n: usize,
    adjacency: Vec<Vec<u32>>,
    words: usize,
    bits: Option<Vec<u64>>,
    by_degree: Vec<u32>,
    colors: Option<Vec<u16>>,
    edge_count: u64,
}

impl HostGraph {
    pub fn new(sample: &GraphSample) -> Self {
        let n = sample.n() as usize;
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in sample.edges() {
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let words = n.div_ceil(64);
        let bits = (n <= BITSET_LIMIT).then(|| {
            let mut bits = vec![0u64; n * words];
            for &(a, b) in sample.edges() {
                let (a, b) = (a as usize, b as usize);
                bits[a * words + b / 64] |= 1 << (b % 64);
                bits[b * words + a / 64] |= 1 << (a % 64);
            }
            bits
        });
        let mut by_degree: Vec<u32> = (0..n as u32).collect();
        by_degree.sort_by_key(|&v| (std::cmp::Reverse(adjacency[v as usize].len()), v));
        HostGraph {
            n,
            adjacency,
            words,
            bits,
            by_degree,
            colors: sample.colors().map(<[u16]>::to_vec),
            edge_count: sample.edge_count(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adjacency[v as usize]
    }

    pub fn colors(&self) -> Option<&[u16]> {
        self.colors.as_deref()
    }

    #[inline]
    pub fn adjacent(&self, a: u32, b: u32) -> bool {
        match &self.bits {
            Some(bits) => bits[a as usize * self.words + b as usize / 64] >> (b % 64) & 1 == 1,
            None => self.adjacency[a as usize].binary_search(&b).is_ok(),
        }
    }
}

impl From<&GraphSample> for HostGraph {
    fn from(sample: &GraphSample) -> Self {
        HostGraph::new(sample)
    }
}

/// Search order for the backtracker: each vertex after the first is chosen
/// to have as many already placed neighbours as possible.
#[derive(Clone, Debug)]
struct SearchPlan {
    order: Vec<usize>,
    /// Positions (in `order`) of earlier vertices adjacent to each position.
    back: Vec<Vec<usize>>,
    degree: Vec<usize>,
}

impl SearchPlan {
    fn new(motif: &Motif) -> Self {
        let v = motif.vertex_count();
        let masks = motif.adjacency_masks();
        let degree: Vec<usize> = masks.iter().map(|m| m.count_ones() as usize).collect();
        let mut order: Vec<usize> = Vec::with_capacity(v);
        let mut placed = 0u16;
        while order.len() < v {
            let next = (0..v)
                .filter(|&x| placed & (1 << x) == 0)
                .max_by_key(|&x| ((masks[x] & placed).count_ones(), degree[x], std::cmp::Reverse(x)))
                .expect("unplaced vertex remains");
            order.push(next);
            placed |= 1 << next;
        }
        let back = order
            .iter()
            .enumerate()
            .map(|(pos, &x)| (0..pos).filter(|&earlier| masks[x] & (1 << order[earlier]) != 0).collect())
            .collect();
        let degree = order.iter().map(|&x| degree[x]).collect();
        SearchPlan { order, back, degree }
    }
}

struct Search<'a> {
    host: &'a HostGraph,
    plan: &'a SearchPlan,
    /// Required host color per position.
    colors: Option<Vec<u16>>,
    images: Vec<u32>,
    used: Vec<bool>,
    found: u128,
}

impl Search<'_> {
    fn run(&mut self, pos: usize) {
        let (plan, host) = (self.plan, self.host);
        if pos == plan.order.len() {
            self.found += 1;
            return;
        }
        let back = &plan.back[pos];
        if back.is_empty() {
            for &candidate in &host.by_degree {
                if host.degree(candidate) < plan.degree[pos] {
                    break;
                }
                self.try_candidate(pos, candidate);
            }
        } else {
            let pivot = *back
                .iter()
                .min_by_key(|&&b| host.degree(self.images[b]))
                .expect("nonempty");
            for &candidate in host.neighbors(self.images[pivot]) {
                let fits = back
                    .iter()
                    .all(|&b| b == pivot || host.adjacent(self.images[b], candidate));
                if fits {
                    self.try_candidate(pos, candidate);
                }
            }
        }
    }

    #[inline]
    fn try_candidate(&mut self, pos: usize, candidate: u32) {
        if self.used[candidate as usize] || self.host.degree(candidate) < self.plan.degree[pos] {
            return;
        }
        if let (Some(required), Some(host_colors)) = (&self.colors, self.host.colors()) {
            if host_colors[candidate as usize] != required[pos] {
                return;
            }
        }
        self.used[candidate as usize] = true;
        self.images[pos] = candidate;
        self.run(pos + 1);
        self.used[candidate as usize] = false;
    }
}

fn count_homomorphisms(host: &HostGraph, motif: &Motif, coloring: Option<&[u16]>) -> u128 {
    let plan = SearchPlan::new(motif);
    let mut search = Search {
        host,
        colors: coloring.map(|c| plan.order.iter().map(|&x| c[x]).collect()),
        plan: &plan,
        images: vec![0; motif.vertex_count()],
        used: vec![false; host.vertex_count()],
        found: 0,
    };
    search.run(0);
    search.found
}

/// Number of copies of `motif` in `host`.
pub fn count_motif(host: &HostGraph, motif: &Motif) -> u128 {
    let maps = count_homomorphisms(host, motif, None);
    let order = u128::from(motif.automorphism_order().get());
    assert_eq!(maps % order, 0, "injective homomorphism count not divisible by |Aut(H)|");
    maps / order
}

/// Triangles via sorted forward-adjacency intersection.
pub fn count_triangles(host: &HostGraph) -> u128 {
    let forward: Vec<&[u32]> = (0..host.vertex_count() as u32)
        .map(|u| {
            let list = host.neighbors(u);
            &list[list.partition_point(|&w| w <= u)..]
        })
        .collect();
    let mut total = 0u128;
    for u_higher in &forward {
        for &v in *u_higher {
            total += intersection_size(u_higher, forward[v as usize]) as u128;
        }
    }
    total
}

fn intersection_size(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// 2-stars: `sum_v deg(v) (deg(v) - 1) / 2`.
pub fn count_two_stars(host: &HostGraph) -> u128 {
    (0..host.vertex_count() as u32)
        .map(|v| {
            let d = host.degree(v) as u128;
            d * d.saturating_sub(1) / 2
        })
        .sum()
}

pub fn count_edges(host: &HostGraph) -> u128 {
    u128::from(host.edge_count)
}

/// Copies of `motif` whose vertex colors match `coloring` up to the
/// automorphisms of the motif that preserve `coloring`.
pub fn count_colored_motif(host: &HostGraph, motif: &Motif, coloring: &[u16]) -> Result<u128> {
    if host.colors().is_none() {
        return Err(Error::domain("host graph carries no vertex colors"));
    }
    if coloring.len() != motif.vertex_count() {
        return Err(Error::domain("coloring length differs from the motif's vertex count"));
    }
    let stabilizer = motif
        .automorphisms()
        .iter()
        .filter(|perm| (0..coloring.len()).all(|x| coloring[perm[x]] == coloring[x]))
        .count() as u128;
    let maps = count_homomorphisms(host, motif, Some(coloring));
    assert_eq!(maps % stabilizer, 0, "colored homomorphism count not divisible");
    Ok(maps / stabilizer)
}

/// One representative per automorphism class of vertex colorings of `motif`
/// with colors `0..colors`, namely the lexicographically smallest member.
pub fn coloring_classes(motif: &Motif, colors: u16) -> Vec<Vec<u16>> {
    let automorphisms = motif.automorphisms();
    let v = motif.vertex_count();
    std::iter::repeat_n(0..colors, v)
        .multi_cartesian_product()
        .filter(|alpha| {
            automorphisms.iter().all(|perm| {
                let image: Vec<u16> = (0..v).map(|x| alpha[perm[x]]).collect();
                image >= *alpha
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Strategy {
    Edges,
    TwoStars,
    Triangles,
    Generic,
}

/// Counts one motif, dispatching to a fast path when the motif is
/// isomorphic to the edge, the 2-star or the triangle.
#[derive(Clone, Debug)]
pub struct MotifCounter {
    motif: Motif,
    strategy: Strategy,
}

impl MotifCounter {
    pub fn new(motif: &Motif) -> Self {
        let strategy = [
            (Builtin::Edge, Strategy::Edges),
            (Builtin::TwoStar, Strategy::TwoStars),
            (Builtin::Triangle, Strategy::Triangles),
        ]
        .into_iter()
        .find(|(b, _)| motif.is_isomorphic(&b.motif()))
        .map_or(Strategy::Generic, |(_, s)| s);
        MotifCounter {
            motif: motif.clone(),
            strategy,
        }
    }

    pub fn motif(&self) -> &Motif {
        &self.motif
    }

    pub fn count(&self, host: &HostGraph) -> u128 {
        match self.strategy {
            Strategy::Edges => count_edges(host),
            Strategy::TwoStars => count_two_stars(host),
            Strategy::Triangles => count_triangles(host),
            Strategy::Generic => count_motif(host, &self.motif),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{EnsembleSpec, SeedStream};

    fn host(n: u32, edges: &[(u32, u32)]) -> HostGraph {
        HostGraph::new(&GraphSample::new(n, edges.iter().copied(), None).unwrap())
    }

    #[test]
    fn complete_graph_counts() {
        let k4 = HostGraph::new(&GraphSample::complete(4));
        assert_eq!(count_motif(&k4, &Builtin::Triangle.motif()), 4);
        assert_eq!(count_motif(&k4, &Builtin::Square.motif()), 3);
        assert_eq!(count_triangles(&k4), 4);
        assert_eq!(count_edges(&k4), 6);
        let k5 = HostGraph::new(&GraphSample::complete(5));
        assert_eq!(count_triangles(&k5), 10);
    }

    #[test]
    fn empty_and_sparse_graphs() {
        let empty = HostGraph::new(&GraphSample::empty(6));
        for b in Builtin::ALL {
            assert_eq!(count_motif(&empty, &b.motif()), 0);
        }
        assert_eq!(count_edges(&empty), 0);
        let c5 = host(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]);
        assert_eq!(count_triangles(&c5), 0);
        assert_eq!(count_motif(&c5, &Builtin::Triangle.motif()), 0);
    }

    #[test]
    fn two_star_counts() {
        let tri = host(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(count_two_stars(&tri), 3);
        let path = host(3, &[(0, 1), (1, 2)]);
        assert_eq!(count_two_stars(&path), 1);
        let star = host(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(count_two_stars(&star), 3);
        assert_eq!(count_motif(&star, &Builtin::TwoStar.motif()), 3);
    }

    #[test]
    fn bitset_and_sorted_adjacency_agree() {
        // above the bitset limit adjacency falls back to binary search
        let big = HostGraph::new(&crate::ensemble::sample_dependent(600, 3000, &SeedStream::new(5, 0)).unwrap());
        assert!(big.bits.is_none());
        let tri = count_motif(&big, &Builtin::Triangle.motif());
        assert_eq!(tri, count_triangles(&big));
        assert_eq!(count_motif(&big, &Builtin::TwoStar.motif()), count_two_stars(&big));
    }

    #[test]
    fn counter_dispatch() {
        let relabeled_triangle = Motif::new(3, [(0, 1), (1, 2), (2, 0)], None).unwrap();
        let counter = MotifCounter::new(&relabeled_triangle);
        assert_eq!(counter.strategy, Strategy::Triangles);
        assert_eq!(MotifCounter::new(&Builtin::Square.motif()).strategy, Strategy::Generic);
        let star = Motif::new(3, [(0, 2), (1, 2)], None).unwrap();
        assert_eq!(MotifCounter::new(&star).strategy, Strategy::TwoStars);
    }

    #[test]
    fn coloring_classes_of_builtins() {
        // triangle with 2 colors: 000, 001, 011, 111
        assert_eq!(coloring_classes(&Builtin::Triangle.motif(), 2).len(), 4);
        // 2-star (path 0-1-2, centre 1): centre color x leaf multiset
        assert_eq!(coloring_classes(&Builtin::TwoStar.motif(), 2).len(), 6);
        assert_eq!(coloring_classes(&Builtin::Edge.motif(), 3).len(), 6);
        assert_eq!(coloring_classes(&Builtin::Square.motif(), 1), vec![vec![0; 4]]);
    }

    #[test]
    fn colored_counts_need_colors() {
        let plain = HostGraph::new(&GraphSample::complete(4));
        assert!(count_colored_motif(&plain, &Builtin::Triangle.motif(), &[0, 0, 0]).is_err());
    }

    #[test]
    fn three_color_triangle_absent_from_two_colored_graph() {
        let one = crate::ensemble::Probability::new(1, 1).unwrap();
        let spec = EnsembleSpec::BlockIndependent { sizes: vec![3, 3], p: vec![vec![one; 2]; 2] };
        let g = HostGraph::new(&spec.sample(&SeedStream::new(0, 0)).unwrap());
        assert_eq!(count_colored_motif(&g, &Builtin::Triangle.motif(), &[0, 1, 2]).unwrap(), 0);
        assert_eq!(count_colored_motif(&g, &Builtin::Triangle.motif(), &[0, 0, 1]).unwrap(), 9);
        assert_eq!(count_colored_motif(&g, &Builtin::Triangle.motif(), &[0, 0, 0]).unwrap(), 1);
    }
}
