//! Small pattern graphs `H` and their symmetry data.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigUint;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Motifs are limited to this many vertices so automorphisms can be found
/// by trying every permutation.
pub const MAX_MOTIF_VERTICES: usize = 8;

/// A small graph whose copies are counted.
///
/// Vertices are `0..vertex_count`, edges are stored as sorted pairs `(a, b)`
/// with `a < b` in lexicographic order. Every vertex lies on an edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Motif {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    name: Option<String>,
}

/// Order of the automorphism group of a motif.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AutomorphismOrder(pub u64);

impl AutomorphismOrder {
    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for AutomorphismOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The motifs with dedicated support.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    Edge,
    TwoStar,
    Triangle,
    Square,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [Builtin::Edge, Builtin::TwoStar, Builtin::Triangle, Builtin::Square];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Edge => "edge",
            Builtin::TwoStar => "two_star",
            Builtin::Triangle => "triangle",
            Builtin::Square => "square",
        }
    }

    pub fn motif(self) -> Motif {
        make_builtin(self)
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge" => Ok(Builtin::Edge),
            "two_star" | "2-star" | "cherry" => Ok(Builtin::TwoStar),
            "triangle" => Ok(Builtin::Triangle),
            "square" | "4-cycle" => Ok(Builtin::Square),
            other => Err(Error::InvalidMotif(format!("unknown builtin motif '{other}'"))),
        }
    }
}

/// The canonical motif for a builtin name. The square is the 4-cycle.
pub fn make_builtin(which: Builtin) -> Motif {
    let (v, edges): (usize, &[(usize, usize)]) = match which {
        Builtin::Edge => (2, &[(0, 1)]),
        Builtin::TwoStar => (3, &[(0, 1), (1, 2)]),
        Builtin::Triangle => (3, &[(0, 1), (0, 2), (1, 2)]),
        Builtin::Square => (4, &[(0, 1), (1, 2), (2, 3), (0, 3)]),
    };
    Motif::new(v, edges.iter().copied(), Some(which.name().to_string()))
        .expect("builtin motifs are valid")
}

impl Motif {
    pub fn new(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        name: Option<String>,
    ) -> Result<Self> {
        if vertex_count == 0 || vertex_count > MAX_MOTIF_VERTICES {
            return Err(Error::InvalidMotif(format!(
                "vertex count {vertex_count} outside 1..={MAX_MOTIF_VERTICES}"
            )));
        }
        let mut normalized = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidMotif(format!("self-loop at vertex {a}")));
            }
            if a >= vertex_count || b >= vertex_count {
                return Err(Error::InvalidMotif(format!(
                    "edge {a}-{b} references a vertex outside 0..{vertex_count}"
                )));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        if let Some((a, b)) = normalized.iter().tuple_windows().find_map(|(x, y)| (x == y).then_some(*x)) {
            return Err(Error::InvalidMotif(format!("duplicate edge {a}-{b}")));
        }
        if normalized.is_empty() {
            return Err(Error::InvalidMotif("a motif needs at least one edge".into()));
        }
        let mut covered = vec![false; vertex_count];
        for &(a, b) in &normalized {
            covered[a] = true;
            covered[b] = true;
        }
        if let Some(isolated) = covered.iter().position(|c| !c) {
            return Err(Error::InvalidMotif(format!("vertex {isolated} is isolated")));
        }
        Ok(Motif {
            vertex_count,
            edges: normalized,
            name,
        })
    }

    /// Parse the text edge-list format: first line `v`, then one `i j` pair
    /// per line. Blank lines and `#` comments are ignored.
    pub fn parse_edge_list(text: &str, name: Option<String>) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidMotif("empty edge list".into()))?;
        let v: usize = header
            .parse()
            .map_err(|_| Error::InvalidMotif(format!("bad vertex count '{header}'")))?;
        let mut edges = Vec::new();
        for line in lines {
            let parsed = line
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>();
            match parsed.as_deref() {
                Ok([a, b]) => edges.push((*a, *b)),
                _ => return Err(Error::InvalidMotif(format!("bad edge line '{line}'"))),
            }
        }
        Motif::new(v, edges, name)
    }

    /// Inverse of [`Motif::parse_edge_list`].
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.vertex_count);
        for (a, b) in &self.edges {
            out.push_str(&format!("{a} {b}\n"));
        }
        out
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// The name if present, otherwise a compact edge-list label.
    pub fn label(&self) -> String {
        match &self.name {
            Some(name) => name.clone(),
            None => format!(
                "v{}:{}",
                self.vertex_count,
                self.edges.iter().map(|(a, b)| format!("{a}-{b}")).join(",")
            ),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Neighbour bitmask per vertex.
    pub fn adjacency_masks(&self) -> Vec<u16> {
        let mut masks = vec![0u16; self.vertex_count];
        for &(a, b) in &self.edges {
            masks[a] |= 1 << b;
            masks[b] |= 1 << a;
        }
        masks
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    pub fn degree(&self, vertex: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == vertex || b == vertex).count()
    }

    pub fn contains_triangle(&self) -> bool {
        let masks = self.adjacency_masks();
        self.edges.iter().any(|&(a, b)| masks[a] & masks[b] != 0)
    }

    /// The motif with vertex `i` renamed to `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Motif> {
        if perm.len() != self.vertex_count || !perm.iter().all_unique() {
            return Err(Error::InvalidMotif("relabeling is not a permutation".into()));
        }
        Motif::new(
            self.vertex_count,
            self.edges.iter().map(|&(a, b)| (perm[a], perm[b])),
            self.name.clone(),
        )
    }

    /// All vertex permutations that map the edge set onto itself.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        self.isomorphisms_to(self)
    }

    /// All bijections `perm` such that `(perm[a], perm[b])` is an edge of
    /// `other` for every edge `(a, b)` of `self`.
    pub fn isomorphisms_to(&self, other: &Motif) -> Vec<Vec<usize>> {
        if self.vertex_count != other.vertex_count || self.edges.len() != other.edges.len() {
            return Vec::new();
        }
        let masks = self.adjacency_masks();
        let target = other.adjacency_masks();
        (0..self.vertex_count)
            .permutations(self.vertex_count)
            .filter(|perm| {
                (0..self.vertex_count).all(|a| {
                    let image = (0..self.vertex_count)
                        .filter(|&b| masks[a] & (1 << b) != 0)
                        .fold(0u16, |acc, b| acc | 1 << perm[b]);
                    image == target[perm[a]]
                })
            })
            .collect()
    }

    pub fn is_isomorphic(&self, other: &Motif) -> bool {
        !self.isomorphisms_to(other).is_empty()
    }

    /// Size of the automorphism group, by exhaustive permutation search.
    pub fn automorphism_order(&self) -> AutomorphismOrder {
        AutomorphismOrder(self.automorphisms().len() as u64)
    }

    /// Number of copies of the motif in the complete graph on `n` vertices:
    /// `n(n-1)...(n-v+1) / |Aut(H)|`, zero when `n < v`.
    pub fn copies_in_complete(&self, n: u64) -> BigUint {
        let (quotient, remainder) =
            falling_factorial(n, self.vertex_count).div_rem(&BigUint::from(self.automorphism_order().0));
        debug_assert!(remainder == BigUint::from(0u8));
        quotient
    }
}

impl fmt::Display for Motif {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `n (n-1) ... (n-len+1)` as a big integer; zero if `n < len`.
pub fn falling_factorial(n: u64, len: usize) -> BigUint {
    if (len as u64) > n {
        return BigUint::from(0u8);
    }
    (0..len as u64).fold(BigUint::from(1u8), |acc, i| acc * (n - i))
}
