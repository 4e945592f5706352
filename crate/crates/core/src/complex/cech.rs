//! Čech complexes: nerves of open balls of radius `t`.

use crate::error::{Error, Result};
use crate::manifold::PointSample;

use super::clique::{expand, NeighborhoodGraph};
use super::enclosing_ball::min_enclosing_ball;
use super::{ComplexBuilder, MaxDim, SimplicialComplex};

/// Do the open arcs of radius `t` around `points` (circle coordinates in
/// `[0, 1)`) share a point?
///
/// When the points fit in a half circle, unrolling them across their largest
/// gap reduces the question to interval intersection: the arcs meet iff half
/// the unrolled span is `< t`. Otherwise the candidate witnesses are the
/// midpoints between consecutive arc endpoints; the intersection of open arcs,
/// when nonempty, contains one of them.
pub fn circle_arcs_intersect(points: &[f64], t: f64) -> bool {
    // an open arc of radius > 1/2 is the whole circle
    if t > 0.5 {
        return true;
    }
    if points.len() <= 1 {
        return points.is_empty() || t > 0.0;
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    let last = sorted.len() - 1;
    let mut span = sorted[last] - sorted[0];
    let mut gap = 1.0 - span;
    for w in 0..last {
        let g = sorted[w + 1] - sorted[w];
        if g > gap {
            gap = g;
            span = sorted[w] + 1.0 - sorted[w + 1];
        }
    }
    if span <= 0.5 {
        return span / 2.0 < t;
    }

    let mut ends: Vec<f64> = sorted
        .iter()
        .flat_map(|p| [(p - t).rem_euclid(1.0), (p + t).rem_euclid(1.0)])
        .collect();
    ends.sort_by(f64::total_cmp);
    let covered = |y: f64| {
        sorted.iter().all(|p| {
            let d = (p - y).abs();
            d.min(1.0 - d) < t
        })
    };
    let m = ends.len();
    (0..m).any(|i| {
        let (a, b) = if i + 1 < m {
            (ends[i], ends[i + 1])
        } else {
            (ends[m - 1], ends[0] + 1.0)
        };
        b > a && covered(((a + b) / 2.0).rem_euclid(1.0))
    })
}

/// Nerve of the open arcs of radius `t` around a circle sample.
pub fn cech_complex_circle(sample: &PointSample, t: f64, max_dim: MaxDim) -> Result<SimplicialComplex> {
    ComplexBuilder::new(max_dim).cech_circle(sample, t)
}

/// Čech complex of points in `R^d`, `d <= 3`: a simplex is present iff the
/// minimum enclosing ball of its points has radius `< t`.
pub fn cech_complex_euclidean(points: &[Vec<f64>], t: f64, max_dim: MaxDim) -> Result<SimplicialComplex> {
    ComplexBuilder::new(max_dim).cech_euclidean(points, t)
}

impl ComplexBuilder {
    pub fn cech_circle(&self, sample: &PointSample, t: f64) -> Result<SimplicialComplex> {
        if !sample.manifold().is_circle() {
            return Err(Error::Unsupported("Čech complexes are built on the circle only".into()));
        }
        if !(t > 0.0) {
            return Err(Error::invalid(format!("Čech radius must be > 0, got {t}")));
        }
        let x = sample.coords();
        let graph = NeighborhoodGraph::from_predicate(x.len(), |i, j| circle_arcs_intersect(&[x[i], x[j]], t));
        let mut buf = Vec::new();
        expand(&graph, self, |s| {
            if s.len() <= 2 {
                return true;
            }
            buf.clear();
            buf.extend(s.iter().map(|&v| x[v as usize]));
            circle_arcs_intersect(&buf, t)
        })
    }

    pub fn cech_euclidean(&self, points: &[Vec<f64>], t: f64) -> Result<SimplicialComplex> {
        if !(t > 0.0) {
            return Err(Error::invalid(format!("Čech radius must be > 0, got {t}")));
        }
        let dim = points.first().map_or(0, Vec::len);
        if dim > 3 {
            return Err(Error::Unsupported(format!(
                "Euclidean Čech complexes support d <= 3, got d = {dim}"
            )));
        }
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::invalid("points have mixed dimensions"));
        }
        let padded: Vec<[f64; 3]> = points
            .iter()
            .map(|p| {
                let mut q = [0.0; 3];
                q[..dim].copy_from_slice(p);
                q
            })
            .collect();
        let mut buf = Vec::new();
        let mut accept = |s: &[u32]| {
            buf.clear();
            buf.extend(s.iter().map(|&v| padded[v as usize]));
            min_enclosing_ball(&buf).radius < t
        };
        let graph = NeighborhoodGraph::from_predicate(points.len(), |i, j| accept(&[i as u32, j as u32]));
        expand(&graph, self, accept)
    }
}
