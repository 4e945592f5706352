//! Betti numbers over GF(2) and the Euler characteristic.
//!
//! `b_i = #i-simplices - rank d_i - rank d_{i+1}` with `d_0 = 0`. Boundary
//! ranks come from left-to-right column reduction of bit-packed columns; the
//! pivot of a column is its highest set row.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::complex::{find_sorted, MaxDim, SimplicialComplex};
use crate::error::{Error, Result};

/// Largest complex accepted by [`betti_oracle_bruteforce`].
pub const BRUTEFORCE_SIMPLEX_LIMIT: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvariantKind {
    Betti(usize),
    EulerCharacteristic,
}

/// A topological invariant `T` together with its growth bound `|T(S)| <= f(|S|)`.
///
/// Both shipped invariants are bounded by the simplex count (`f = id`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InvariantSpec {
    pub kind: InvariantKind,
}

impl InvariantSpec {
    pub fn betti(i: usize) -> Self {
        Self {
            kind: InvariantKind::Betti(i),
        }
    }

    pub fn euler() -> Self {
        Self {
            kind: InvariantKind::EulerCharacteristic,
        }
    }

    /// `f(simplex_count)`.
    pub fn growth_bound(&self, simplex_count: f64) -> f64 {
        simplex_count
    }

    /// Smallest truncation under which the invariant is computable.
    pub fn required_max_dim(&self) -> MaxDim {
        match self.kind {
            InvariantKind::Betti(i) => MaxDim::Dim(i + 1),
            InvariantKind::EulerCharacteristic => MaxDim::Full,
        }
    }

    /// Whether a complex truncated at `max_dim` is enough for this invariant.
    pub fn accepts(&self, max_dim: MaxDim) -> bool {
        match (self.kind, max_dim) {
            (_, MaxDim::Full) => true,
            (InvariantKind::Betti(i), MaxDim::Dim(d)) => d > i,
            (InvariantKind::EulerCharacteristic, MaxDim::Dim(_)) => false,
        }
    }

    pub fn evaluate(&self, complex: &SimplicialComplex) -> Result<i64> {
        match self.kind {
            InvariantKind::Betti(i) => betti(complex, i).map(|b| b as i64),
            InvariantKind::EulerCharacteristic => euler_characteristic(complex),
        }
    }
}

impl fmt::Display for InvariantSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            InvariantKind::Betti(i) => write!(f, "betti{i}"),
            InvariantKind::EulerCharacteristic => f.write_str("euler"),
        }
    }
}

fn require_dim(complex: &SimplicialComplex, i: usize) -> Result<()> {
    match complex.max_dim_built() {
        MaxDim::Dim(d) if d <= i => Err(Error::invalid(format!(
            "b_{i} needs simplices up to dimension {} but the complex stops at {d}",
            i + 1
        ))),
        _ => Ok(()),
    }
}

/// `dim H_i(S; GF(2))`.
pub fn betti(complex: &SimplicialComplex, i: usize) -> Result<usize> {
    require_dim(complex, i)?;
    let rank_in = if i == 0 { 0 } else { boundary_rank(complex, i) };
    let rank_out = boundary_rank(complex, i + 1);
    Ok(complex.count(i) - rank_in - rank_out)
}

/// All Betti numbers `b_0 ..= b_top` of a full complex.
pub fn betti_numbers(complex: &SimplicialComplex) -> Result<Vec<usize>> {
    if !complex.is_full() {
        return Err(Error::invalid("all Betti numbers need a full complex"));
    }
    let top = complex.dim().unwrap_or(0);
    let ranks: Vec<usize> = (0..=top + 1)
        .map(|k| if k == 0 { 0 } else { boundary_rank(complex, k) })
        .collect();
    Ok((0..=top).map(|i| complex.count(i) - ranks[i] - ranks[i + 1]).collect())
}

/// `sum_k (-1)^k #k-simplices`.
pub fn euler_characteristic(complex: &SimplicialComplex) -> Result<i64> {
    if !complex.is_full() {
        return Err(Error::invalid(format!(
            "Euler characteristic needs a full complex, this one is truncated at {}",
            complex.max_dim_built()
        )));
    }
    let top = complex.dim().map_or(0, |d| d + 1);
    Ok((0..top)
        .map(|k| {
            let c = complex.count(k) as i64;
            if k % 2 == 0 { c } else { -c }
        })
        .sum())
}

/// Rank over GF(2) of the boundary map from `k`-simplices to `(k-1)`-simplices.
pub fn boundary_rank(complex: &SimplicialComplex, k: usize) -> usize {
    if k == 0 || complex.count(k) == 0 {
        return 0;
    }
    let rows = complex.flat(k - 1);
    let cols = complex.flat(k);
    let num_rows = complex.count(k - 1);
    let mut m = BitColumns::new(num_rows, complex.count(k));
    let mut facet = vec![0u32; k];
    for (j, s) in cols.chunks_exact(k + 1).enumerate() {
        for drop in 0..=k {
            let mut w = 0;
            for (p, &v) in s.iter().enumerate() {
                if p != drop {
                    facet[w] = v;
                    w += 1;
                }
            }
            let r = find_sorted(rows, k, &facet).expect("complex is downward closed");
            m.set(j, r);
        }
    }
    m.reduce_rank()
}

/// Dense GF(2) matrix stored column-major, one bit per row.
struct BitColumns {
    rows: usize,
    words: usize,
    bits: Vec<u64>,
    cols: usize,
}

impl BitColumns {
    fn new(rows: usize, cols: usize) -> Self {
        let words = rows.div_ceil(64).max(1);
        Self {
            rows,
            words,
            bits: vec![0; words * cols],
            cols,
        }
    }

    fn set(&mut self, col: usize, row: usize) {
        self.bits[col * self.words + row / 64] |= 1 << (row % 64);
    }

    /// Highest set row of `col` and the word holding it.
    fn low(&self, col: usize, top_word: usize) -> Option<(usize, usize)> {
        let c = &self.bits[col * self.words..(col + 1) * self.words];
        (0..=top_word)
            .rev()
            .find(|&w| c[w] != 0)
            .map(|w| (w * 64 + 63 - c[w].leading_zeros() as usize, w))
    }

    /// Standard reduction: clear each column's pivot with the earlier column
    /// owning that pivot until the pivot is new or the column vanishes.
    fn reduce_rank(&mut self) -> usize {
        let words = self.words;
        let mut owner = vec![usize::MAX; self.rows];
        let mut rank = 0;
        for j in 0..self.cols {
            let mut top = words - 1;
            while let Some((row, w)) = self.low(j, top) {
                match owner[row] {
                    usize::MAX => {
                        owner[row] = j;
                        rank += 1;
                        break;
                    }
                    o => {
                        let (head, tail) = self.bits.split_at_mut(j * words);
                        let src = &head[o * words..o * words + w + 1];
                        for (d, s) in tail[..w + 1].iter_mut().zip(src) {
                            *d ^= s;
                        }
                        top = w;
                    }
                }
            }
        }
        rank
    }
}

/// `b_i` by naive dense Gaussian elimination over GF(2), one byte per entry,
/// with facets located through a hash map. Shares no code with [`betti`].
pub fn betti_oracle_bruteforce(complex: &SimplicialComplex, i: usize) -> Result<usize> {
    require_dim(complex, i)?;
    let total = complex.total_count();
    if total > BRUTEFORCE_SIMPLEX_LIMIT {
        return Err(Error::ResourceLimit {
            what: format!("brute-force homology on {total} simplices"),
            budget: BRUTEFORCE_SIMPLEX_LIMIT,
        });
    }
    let by_dim: Vec<Vec<Vec<u32>>> = (0..=i + 1)
        .map(|k| complex.simplices(k).map(<[u32]>::to_vec).collect())
        .collect();
    let dense_rank = |k: usize| -> usize {
        if k == 0 || by_dim[k].is_empty() {
            return 0;
        }
        let index: HashMap<&[u32], usize> =
            by_dim[k - 1].iter().enumerate().map(|(r, s)| (s.as_slice(), r)).collect();
        let mut mat = vec![vec![0u8; by_dim[k].len()]; by_dim[k - 1].len()];
        for (c, s) in by_dim[k].iter().enumerate() {
            for drop in 0..s.len() {
                let mut f = s.clone();
                f.remove(drop);
                mat[index[f.as_slice()]][c] = 1;
            }
        }
        gf2_rank(mat)
    };
    Ok(by_dim[i].len() - dense_rank(i) - dense_rank(i + 1))
}

#[allow(clippy::needless_range_loop)]
fn gf2_rank(mut mat: Vec<Vec<u8>>) -> usize {
    let rows = mat.len();
    let cols = mat.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| mat[r][c] == 1) else {
            continue;
        };
        mat.swap(rank, p);
        for r in 0..rows {
            if r != rank && mat[r][c] == 1 {
                for x in 0..cols {
                    mat[r][x] ^= mat[rank][x];
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_cycle() -> SimplicialComplex {
        SimplicialComplex::from_facets(4, [[0u32, 1], [1, 2], [2, 3], [0, 3]], MaxDim::Dim(2)).unwrap()
    }

    #[test]
    fn four_cycle_homology() {
        let c = four_cycle();
        assert_eq!(betti(&c, 0).unwrap(), 1);
        assert_eq!(betti(&c, 1).unwrap(), 1);
        assert_eq!(betti_oracle_bruteforce(&c, 1).unwrap(), 1);
        assert!(euler_characteristic(&c).is_err());
        let full = SimplicialComplex::from_facets(4, [[0u32, 1], [1, 2], [2, 3], [0, 3]], MaxDim::Full).unwrap();
        assert_eq!(euler_characteristic(&full).unwrap(), 0);
    }

    #[test]
    fn filled_triangle() {
        let c = SimplicialComplex::from_facets(3, [[0u32, 1, 2]], MaxDim::Full).unwrap();
        assert_eq!(betti(&c, 0).unwrap(), 1);
        assert_eq!(betti(&c, 1).unwrap(), 0);
        assert_eq!(betti_numbers(&c).unwrap(), vec![1, 0, 0]);
    }

    #[test]
    fn full_simplex_euler() {
        for n in 1..=8u32 {
            let all: Vec<u32> = (0..n).collect();
            let c = SimplicialComplex::from_facets(n as usize, [all], MaxDim::Full).unwrap();
            assert_eq!(euler_characteristic(&c).unwrap(), 1, "n = {n}");
        }
    }

    #[test]
    fn discrete_complexes() {
        let two = SimplicialComplex::discrete(2, MaxDim::Full);
        assert_eq!(betti(&two, 0).unwrap(), 2);
        assert_eq!(euler_characteristic(&two).unwrap(), 2);
        let one = SimplicialComplex::discrete(1, MaxDim::Dim(1));
        assert_eq!(betti_oracle_bruteforce(&one, 0).unwrap(), 1);
        assert_eq!(euler_characteristic(&SimplicialComplex::discrete(7, MaxDim::Full)).unwrap(), 7);
    }

    #[test]
    fn truncation_is_checked() {
        let c = SimplicialComplex::from_facets(3, [[0u32, 1, 2]], MaxDim::Dim(1)).unwrap();
        assert!(betti(&c, 0).is_ok());
        assert!(matches!(betti(&c, 1), Err(Error::InvalidArgument(_))));
        assert!(betti_oracle_bruteforce(&c, 1).is_err());
    }

    #[test]
    fn hollow_tetrahedron_is_a_sphere() {
        let c = SimplicialComplex::from_facets(4, [[0u32, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]], MaxDim::Full)
            .unwrap();
        assert_eq!(betti_numbers(&c).unwrap(), vec![1, 0, 1]);
        assert_eq!(betti_oracle_bruteforce(&c, 2).unwrap(), 1);
        assert_eq!(euler_characteristic(&c).unwrap(), 2);
    }

    #[test]
    fn wide_matrices_cross_word_boundaries() {
        // 100-cycle: 100 rows and columns, pivots spread over two words
        let edges: Vec<[u32; 2]> = (0..100).map(|i| [i, (i + 1) % 100]).collect();
        let c = SimplicialComplex::from_facets(100, &edges, MaxDim::Dim(2)).unwrap();
        assert_eq!(betti(&c, 0).unwrap(), 1);
        assert_eq!(betti(&c, 1).unwrap(), 1);
        assert_eq!(betti_oracle_bruteforce(&c, 1).unwrap(), 1);
    }

    #[test]
    fn growth_bound_and_requirements() {
        let b1 = InvariantSpec::betti(1);
        assert_eq!(b1.required_max_dim(), MaxDim::Dim(2));
        assert!(b1.accepts(MaxDim::Dim(2)) && !b1.accepts(MaxDim::Dim(1)));
        assert!(!InvariantSpec::euler().accepts(MaxDim::Dim(5)));
        assert_eq!(b1.growth_bound(17.0), 17.0);
        assert_eq!(b1.to_string(), "betti1");
    }
}
