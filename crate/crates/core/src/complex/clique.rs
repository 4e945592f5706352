use crate::error::{Error, Result};
use crate::manifold::DistanceMatrix;

use super::{ComplexBuilder, SimplicialComplex};

/// Undirected graph on `0..n` with bitset adjacency rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodGraph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
}

impl NeighborhoodGraph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Self {
            n,
            words,
            adj: vec![0; n * words],
        }
    }

    /// Edges `{i, j}` with `d(i, j) <= t`.
    pub fn within(distances: &DistanceMatrix, t: f64) -> Self {
        Self::from_predicate(distances.len(), |i, j| distances.get(i, j) <= t)
    }

    pub fn from_predicate(n: usize, mut edge: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                if edge(i, j) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        self.adj[i * self.words + j / 64] |= 1 << (j % 64);
        self.adj[j * self.words + i / 64] |= 1 << (i % 64);
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.words..(v + 1) * self.words]
    }

    /// Maximal cliques by Bron–Kerbosch with Tomita pivoting, each sorted,
    /// listed in lexicographic order.
    pub fn maximal_cliques(&self) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut p = vec![0u64; self.words];
        for v in 0..self.n {
            p[v / 64] |= 1 << (v % 64);
        }
        let x = vec![0u64; self.words];
        let mut r = Vec::new();
        self.bron_kerbosch(&mut r, p, x, &mut out);
        for c in &mut out {
            c.sort_unstable();
        }
        out.sort_unstable();
        out
    }

    fn bron_kerbosch(&self, r: &mut Vec<u32>, mut p: Vec<u64>, mut x: Vec<u64>, out: &mut Vec<Vec<u32>>) {
        if p.iter().all(|w| *w == 0) {
            if x.iter().all(|w| *w == 0) {
                out.push(r.clone());
            }
            return;
        }
        // pivot maximising |P ∩ N(u)| over u in P ∪ X
        let pivot = BitIter::new(&p)
            .chain(BitIter::new(&x))
            .max_by_key(|&u| and_count(&p, self.row(u)))
            .expect("P is nonempty");
        let outside: Vec<u64> = p.iter().zip(self.row(pivot)).map(|(a, b)| a & !b).collect();
        let candidates: Vec<usize> = BitIter::new(&outside).collect();
        for v in candidates {
            let nv = self.row(v);
            let p2 = p.iter().zip(nv).map(|(a, b)| a & b).collect();
            let x2 = x.iter().zip(nv).map(|(a, b)| a & b).collect();
            r.push(v as u32);
            self.bron_kerbosch(r, p2, x2, out);
            r.pop();
            p[v / 64] &= !(1 << (v % 64));
            x[v / 64] |= 1 << (v % 64);
        }
    }
}

fn and_count(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

/// Iterator over set bit positions of a word slice.
struct BitIter<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl<'a> BitIter<'a> {
    fn new(words: &'a [u64]) -> Self {
        Self {
            words,
            idx: 0,
            cur: words.first().copied().unwrap_or(0),
        }
    }
}

impl Iterator for BitIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let b = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * 64 + b);
            }
            self.idx += 1;
            self.cur = *self.words.get(self.idx)?;
        }
    }
}

/// Enumerates the cliques of `graph` accepted by `accept`, dimension by
/// dimension. Each `k`-simplex is grown from its lexicographically first
/// facet by appending a larger common neighbour, so every list comes out
/// sorted and duplicate-free. `accept` must be closed under taking faces.
pub(super) fn expand(
    graph: &NeighborhoodGraph,
    builder: &ComplexBuilder,
    mut accept: impl FnMut(&[u32]) -> bool,
) -> Result<SimplicialComplex> {
    let n = graph.len();
    let budget = builder.simplex_budget;
    let over_budget = || Error::ResourceLimit {
        what: "simplex count".into(),
        budget,
    };
    if n > budget {
        return Err(over_budget());
    }
    let mut complex = SimplicialComplex::discrete(n, builder.max_dim);
    let mut total = n;
    let words = graph.words;
    let mut common = vec![0u64; words];
    let mut candidate = Vec::new();
    let mut k = 1;
    while builder.max_dim.includes(k) {
        let prev = complex.flat(k - 1);
        let mut next = Vec::new();
        for s in prev.chunks_exact(k) {
            let last = *s.last().expect("simplices are nonempty") as usize;
            common.copy_from_slice(graph.row(s[0] as usize));
            for &v in &s[1..] {
                for (c, r) in common.iter_mut().zip(graph.row(v as usize)) {
                    *c &= r;
                }
            }
            // keep neighbours strictly above the last vertex
            let w = last / 64;
            common[..w].fill(0);
            common[w] &= (!0u64).checked_shl(last as u32 % 64 + 1).unwrap_or(0);
            for v in BitIter::new(&common) {
                candidate.clear();
                candidate.extend_from_slice(s);
                candidate.push(v as u32);
                if accept(&candidate) {
                    next.extend_from_slice(&candidate);
                    total += 1;
                    if total > budget {
                        return Err(over_budget());
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        complex.simplices.push(next);
        k += 1;
    }
    Ok(complex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::MaxDim;

    fn graph(n: usize, edges: &[(usize, usize)]) -> NeighborhoodGraph {
        let mut g = NeighborhoodGraph::empty(n);
        for &(i, j) in edges {
            g.add_edge(i, j);
        }
        g
    }

    #[test]
    fn maximal_cliques_of_small_graphs() {
        let g = graph(5, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        assert_eq!(g.maximal_cliques(), vec![vec![0, 1, 2], vec![2, 3], vec![4]]);
        assert_eq!(g.edge_count(), 4);

        let empty = NeighborhoodGraph::empty(0);
        assert_eq!(empty.maximal_cliques(), vec![Vec::<u32>::new()]);
    }

    #[test]
    fn expansion_matches_maximal_cliques_across_word_boundary() {
        // a 70-cycle with chords forms triangles straddling bit 64
        let n = 70;
        let mut g = NeighborhoodGraph::empty(n);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n);
            g.add_edge(i, (i + 2) % n);
        }
        let c = expand(&g, &ComplexBuilder::new(MaxDim::Full), |_| true).unwrap();
        c.check_invariants().unwrap();
        assert_eq!(c.count(1), 2 * n);
        assert_eq!(c.count(2), n);
        assert_eq!(c.count(3), 0);
        let facets = SimplicialComplex::from_facets(n, g.maximal_cliques(), MaxDim::Full).unwrap();
        assert_eq!(facets, c);
    }
}
