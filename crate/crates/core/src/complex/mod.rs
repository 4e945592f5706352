//! Vietoris–Rips and Čech complexes of point samples.
//!
//! Simplices are stored per dimension as flat, lexicographically sorted
//! vertex lists. Both constructions enumerate cliques of the 1-skeleton in
//! lexicographic order, so facet lookups are binary searches.

mod cech;
mod clique;
mod enclosing_ball;

use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{DistanceMatrix, PointSample};

pub use cech::{cech_complex_circle, cech_complex_euclidean, circle_arcs_intersect};
pub use clique::NeighborhoodGraph;
pub use enclosing_ball::{min_enclosing_ball, Ball};

/// Default cap on the number of simplices a single construction may produce.
pub const DEFAULT_SIMPLEX_BUDGET: usize = 10_000_000;

/// Truncation dimension of a construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxDim {
    Dim(usize),
    /// Every clique, however large (guarded by the simplex budget).
    Full,
}

impl MaxDim {
    /// `true` if simplices of dimension `k` are built.
    pub fn includes(self, k: usize) -> bool {
        match self {
            MaxDim::Dim(d) => k <= d,
            MaxDim::Full => true,
        }
    }
}

impl fmt::Display for MaxDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxDim::Dim(d) => write!(f, "{d}"),
            MaxDim::Full => f.write_str("full"),
        }
    }
}

/// A finite abstract simplicial complex on vertices `0..num_vertices`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    num_vertices: usize,
    /// `simplices[k]` holds the `k`-simplices, `k + 1` vertices each, flattened.
    simplices: Vec<Vec<u32>>,
    max_dim: MaxDim,
}

impl SimplicialComplex {
    /// Vertices only.
    pub fn discrete(num_vertices: usize, max_dim: MaxDim) -> Self {
        Self {
            num_vertices,
            simplices: vec![(0..num_vertices as u32).collect()],
            max_dim,
        }
    }

    /// The downward closure of `facets`, truncated at `max_dim`.
    ///
    /// Each facet must be a set of distinct vertex indices below `num_vertices`;
    /// isolated vertices are always present.
    pub fn from_facets<F, S>(num_vertices: usize, facets: F, max_dim: MaxDim) -> Result<Self>
    where
        F: IntoIterator<Item = S>,
        S: AsRef<[u32]>,
    {
        let mut by_dim: Vec<Vec<Vec<u32>>> = vec![(0..num_vertices as u32).map(|v| vec![v]).collect()];
        for facet in facets {
            let mut f = facet.as_ref().to_vec();
            f.sort_unstable();
            if f.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("facet {f:?} repeats a vertex")));
            }
            if f.iter().any(|&v| v as usize >= num_vertices) {
                return Err(Error::invalid(format!("facet {f:?} has a vertex >= {num_vertices}")));
            }
            if f.len() > 24 {
                return Err(Error::invalid("facets with more than 24 vertices are not expanded"));
            }
            for mask in 1u32..(1 << f.len()) {
                let face: Vec<u32> = (0..f.len()).filter(|b| mask >> b & 1 == 1).map(|b| f[b]).collect();
                let k = face.len() - 1;
                if !max_dim.includes(k) {
                    continue;
                }
                if by_dim.len() <= k {
                    by_dim.resize(k + 1, Vec::new());
                }
                by_dim[k].push(face);
            }
        }
        let simplices = by_dim
            .into_iter()
            .map(|mut list| {
                list.sort_unstable();
                list.dedup();
                list.concat()
            })
            .collect();
        let mut c = Self {
            num_vertices,
            simplices,
            max_dim,
        };
        c.trim();
        Ok(c)
    }

    fn trim(&mut self) {
        while self.simplices.len() > 1 && self.simplices.last().is_some_and(|s| s.is_empty()) {
            self.simplices.pop();
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// The truncation this complex was built with.
    pub fn max_dim_built(&self) -> MaxDim {
        self.max_dim
    }

    pub fn is_full(&self) -> bool {
        self.max_dim == MaxDim::Full
    }

    /// Highest dimension holding a simplex, `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        (0..self.simplices.len()).rev().find(|&k| self.count(k) > 0)
    }

    /// Number of `k`-simplices.
    pub fn count(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, |s| s.len() / (k + 1))
    }

    pub fn total_count(&self) -> usize {
        (0..self.simplices.len()).map(|k| self.count(k)).sum()
    }

    /// `k`-simplices in lexicographic order.
    pub fn simplices(&self, k: usize) -> std::slice::ChunksExact<'_, u32> {
        match self.simplices.get(k) {
            Some(s) => s.chunks_exact(k + 1),
            None => [].chunks_exact(k + 1),
        }
    }

    /// Every simplex, by dimension then lexicographically.
    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        (0..self.simplices.len()).flat_map(move |k| self.simplices(k))
    }

    pub(crate) fn flat(&self, k: usize) -> &[u32] {
        self.simplices.get(k).map_or(&[], Vec::as_slice)
    }

    /// Position of `simplex` (sorted) among the simplices of its dimension.
    pub fn index_of(&self, simplex: &[u32]) -> Option<usize> {
        let k = simplex.len().checked_sub(1)?;
        find_sorted(self.flat(k), k + 1, simplex)
    }

    pub fn contains(&self, simplex: &[u32]) -> bool {
        self.index_of(simplex).is_some()
    }

    /// `true` if every simplex of `self` is a simplex of `other`.
    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.iter().all(|s| other.contains(s))
    }

    /// Verifies the structural invariants: vertex set, sortedness, uniqueness,
    /// index bounds and downward closure within the built dimensions.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.count(0) != self.num_vertices || self.flat(0).iter().enumerate().any(|(i, &v)| v as usize != i) {
            return Err("0-simplices differ from the vertex set".into());
        }
        for k in 1..self.simplices.len() {
            if !self.max_dim.includes(k) && self.count(k) > 0 {
                return Err(format!("dimension {k} stored beyond truncation {}", self.max_dim));
            }
            let mut prev: Option<&[u32]> = None;
            for s in self.simplices(k) {
                if s.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(format!("simplex {s:?} is not strictly increasing"));
                }
                if s.iter().any(|&v| v as usize >= self.num_vertices) {
                    return Err(format!("simplex {s:?} has an out-of-range vertex"));
                }
                if prev.is_some_and(|p| p >= s) {
                    return Err(format!("simplex {s:?} out of order or duplicated"));
                }
                prev = Some(s);
                let mut facet = Vec::with_capacity(k);
                for drop in 0..=k {
                    facet.clear();
                    facet.extend(s.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, v)| *v));
                    if !self.contains(&facet) {
                        return Err(format!("facet {facet:?} of {s:?} missing"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Writes one simplex per line as space-separated vertex indices.
    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        for s in self.iter() {
            let mut first = true;
            for v in s {
                if !first {
                    out.write_all(b" ")?;
                }
                write!(out, "{v}")?;
                first = false;
            }
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// Binary search for `key` in a flat list of sorted `stride`-tuples.
pub(crate) fn find_sorted(flat: &[u32], stride: usize, key: &[u32]) -> Option<usize> {
    let (mut lo, mut hi) = (0, flat.len() / stride);
    while lo < hi {
        let mid = (lo + hi) / 2;
        match flat[mid * stride..(mid + 1) * stride].cmp(key) {
            std::cmp::Ordering::Less => lo = mid + 1,
            std::cmp::Ordering::Greater => hi = mid,
            std::cmp::Ordering::Equal => return Some(mid),
        }
    }
    None
}

/// Construction parameters shared by the complex builders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexBuilder {
    pub max_dim: MaxDim,
    pub simplex_budget: usize,
}

impl ComplexBuilder {
    pub fn new(max_dim: MaxDim) -> Self {
        Self {
            max_dim,
            simplex_budget: DEFAULT_SIMPLEX_BUDGET,
        }
    }

    pub fn with_budget(mut self, simplex_budget: usize) -> Self {
        self.simplex_budget = simplex_budget;
        self
    }

    /// Clique complex of the closed `t`-neighbourhood graph.
    pub fn vietoris_rips(&self, distances: &DistanceMatrix, t: f64) -> Result<SimplicialComplex> {
        if !(t >= 0.0) {
            return Err(Error::invalid(format!("scale must be >= 0, got {t}")));
        }
        let graph = NeighborhoodGraph::within(distances, t);
        clique::expand(&graph, self, |_| true)
    }
}

/// Vietoris–Rips complex `{ sigma : diam(sigma) <= t }`, truncated at `max_dim`.
pub fn vr_complex(sample: &PointSample, t: f64, max_dim: MaxDim) -> Result<SimplicialComplex> {
    ComplexBuilder::new(max_dim).vietoris_rips(&sample.distance_matrix(), t)
}

/// Sorted edge-creation scales of a sample, `scales[0] = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationScales {
    scales: Vec<f64>,
    /// Pair `(i, j)` whose edge appears at `scales[k + 1]`.
    pairs: Vec<(u32, u32)>,
}

impl FiltrationScales {
    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    /// `ell_k`, the smallest scale at which the Rips complex has `k` edges.
    pub fn scale(&self, k: usize) -> Option<f64> {
        self.scales.get(k).copied()
    }

    /// Number of edges present at scale `t`.
    pub fn edge_count_at(&self, t: f64) -> usize {
        self.scales[1..].partition_point(|&s| s <= t)
    }
}

/// All pairwise distances in ascending order behind a leading zero; equal
/// distances keep lexicographic pair order.
pub fn edge_scales(sample: &PointSample) -> FiltrationScales {
    let dm = sample.distance_matrix();
    let mut edges: Vec<(u32, u32, f64)> = dm.pairs().map(|(i, j, d)| (i as u32, j as u32, d)).collect();
    edges.sort_by(|a, b| a.2.total_cmp(&b.2));
    let mut scales = Vec::with_capacity(edges.len() + 1);
    scales.push(0.0);
    scales.extend(edges.iter().map(|e| e.2));
    FiltrationScales {
        scales,
        pairs: edges.iter().map(|e| (e.0, e.1)).collect(),
    }
}

/// Number of pairs at distance `<= t`.
pub fn edge_count(sample: &PointSample, t: f64) -> usize {
    sample.distance_matrix().pairs().filter(|p| p.2 <= t).count()
}
