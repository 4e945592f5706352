//! Model manifolds with their uniform probability measures.
//!
//! Three closed-form models are supported: the circle `R/Z` of length one, the
//! flat torus `R^d/Z^d` and the unit 2-sphere. Points are stored in a
//! canonical coordinate form:
//!
//! | model          | coordinates               |
//! |----------------|---------------------------|
//! | circle         | one real in `[0, 1)`      |
//! | flat torus `d` | `d` reals in `[0, 1)`     |
//! | sphere         | unit vector in `R^3`      |
//!
//! Sampling is a pure function of `(master_seed, trial_index)`, so Monte Carlo
//! trials can be evaluated on any number of threads with identical results.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the Euclidean norm of sphere points supplied by callers.
const SPHERE_NORM_TOLERANCE: f64 = 1e-9;

/// Largest probe grid `covering_radius` will evaluate.
pub const MAX_PROBE_POINTS: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ManifoldKind {
    Circle,
    FlatTorus { dim: usize },
    Sphere2,
}

/// A model manifold carrying its uniform probability measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ManifoldModel {
    kind: ManifoldKind,
}

impl ManifoldModel {
    pub fn circle() -> Self {
        Self {
            kind: ManifoldKind::Circle,
        }
    }

    pub fn flat_torus(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("flat torus dimension must be positive"));
        }
        Ok(Self {
            kind: ManifoldKind::FlatTorus { dim },
        })
    }

    pub fn sphere2() -> Self {
        Self {
            kind: ManifoldKind::Sphere2,
        }
    }

    pub fn from_kind(kind: ManifoldKind) -> Result<Self> {
        match kind {
            ManifoldKind::FlatTorus { dim } => Self::flat_torus(dim),
            _ => Ok(Self { kind }),
        }
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub fn is_circle(&self) -> bool {
        self.kind == ManifoldKind::Circle
    }

    pub fn intrinsic_dim(&self) -> usize {
        match self.kind {
            ManifoldKind::Circle => 1,
            ManifoldKind::FlatTorus { dim } => dim,
            ManifoldKind::Sphere2 => 2,
        }
    }

    /// Number of stored coordinates per point.
    pub fn coord_len(&self) -> usize {
        match self.kind {
            ManifoldKind::Circle => 1,
            ManifoldKind::FlatTorus { dim } => dim,
            ManifoldKind::Sphere2 => 3,
        }
    }

    pub fn convexity_radius(&self) -> f64 {
        match self.kind {
            ManifoldKind::Circle | ManifoldKind::FlatTorus { .. } => 0.25,
            ManifoldKind::Sphere2 => PI / 2.0,
        }
    }

    /// Largest geodesic distance between two points.
    pub fn diameter(&self) -> f64 {
        match self.kind {
            ManifoldKind::Circle => 0.5,
            ManifoldKind::FlatTorus { dim } => (dim as f64).sqrt() / 2.0,
            ManifoldKind::Sphere2 => PI,
        }
    }

    /// Constant `K` with `|ball_measure(b) - ball_measure(a)| <= K |b - a|`
    /// on the domain where [`ball_measure`](Self::ball_measure) is defined.
    ///
    /// For the flat torus this is the derivative `d V_d t^(d-1)` of the
    /// Euclidean ball volume at the domain edge `t = 1/2`.
    pub fn ball_measure_lipschitz(&self) -> f64 {
        match self.kind {
            ManifoldKind::Circle => 2.0,
            ManifoldKind::Sphere2 => 0.5,
            ManifoldKind::FlatTorus { dim } => {
                let d = dim as f64;
                d * unit_ball_volume(dim) * 0.5f64.powi(dim as i32 - 1)
            }
        }
    }

    /// Largest radius for which [`ball_measure`](Self::ball_measure) has a closed form.
    pub fn ball_measure_domain(&self) -> f64 {
        match self.kind {
            ManifoldKind::FlatTorus { .. } => 0.5,
            _ => f64::INFINITY,
        }
    }

    /// Measure of a closed geodesic ball of radius `t` (independent of the centre).
    pub fn ball_measure(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::invalid(format!("ball radius must be >= 0, got {t}")));
        }
        match self.kind {
            ManifoldKind::Circle => Ok((2.0 * t).min(1.0)),
            ManifoldKind::Sphere2 => Ok((1.0 - t.min(PI).cos()) / 2.0),
            ManifoldKind::FlatTorus { dim } => {
                if t > 0.5 {
                    return Err(Error::Domain(format!(
                        "flat torus ball measure is closed-form only for t <= 1/2, got {t}"
                    )));
                }
                Ok(unit_ball_volume(dim) * t.powi(dim as i32))
            }
        }
    }

    /// Checks that `p` is a point in canonical coordinates.
    pub fn validate_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.coord_len() {
            return Err(Error::invalid(format!(
                "expected {} coordinates, got {}",
                self.coord_len(),
                p.len()
            )));
        }
        match self.kind {
            ManifoldKind::Circle | ManifoldKind::FlatTorus { .. } => {
                if let Some(c) = p.iter().find(|c| !(0.0..1.0).contains(*c)) {
                    return Err(Error::invalid(format!("coordinate {c} outside [0, 1)")));
                }
            }
            ManifoldKind::Sphere2 => {
                let norm = p.iter().map(|c| c * c).sum::<f64>().sqrt();
                if !((norm - 1.0).abs() <= SPHERE_NORM_TOLERANCE) {
                    return Err(Error::invalid(format!("sphere point has norm {norm}, expected 1")));
                }
            }
        }
        Ok(())
    }

    pub fn geodesic_distance(&self, p: &[f64], q: &[f64]) -> Result<f64> {
        self.validate_point(p)?;
        self.validate_point(q)?;
        Ok(self.distance_unchecked(p, q))
    }

    /// Geodesic distance without domain validation.
    #[inline]
    pub(crate) fn distance_unchecked(&self, p: &[f64], q: &[f64]) -> f64 {
        match self.kind {
            ManifoldKind::Circle => circle_distance(p[0], q[0]),
            ManifoldKind::FlatTorus { .. } => p
                .iter()
                .zip(q)
                .map(|(a, b)| circle_distance(*a, *b).powi(2))
                .sum::<f64>()
                .sqrt(),
            ManifoldKind::Sphere2 => {
                // atan2 form of arccos(<p, q>), accurate for nearby and antipodal points.
                let dot = (p[0] * q[0] + p[1] * q[1] + p[2] * q[2]).clamp(-1.0, 1.0);
                let cx = p[1] * q[2] - p[2] * q[1];
                let cy = p[2] * q[0] - p[0] * q[2];
                let cz = p[0] * q[1] - p[1] * q[0];
                (cx * cx + cy * cy + cz * cz).sqrt().atan2(dot)
            }
        }
    }

    fn draw_point<R: Rng>(&self, rng: &mut R, out: &mut Vec<f64>) {
        match self.kind {
            ManifoldKind::Circle => out.push(rng.random::<f64>()),
            ManifoldKind::FlatTorus { dim } => out.extend((0..dim).map(|_| rng.random::<f64>())),
            ManifoldKind::Sphere2 => loop {
                let v: [f64; 3] = [
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                ];
                let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if norm > 0.0 {
                    out.extend(v.iter().map(|c| c / norm));
                    break;
                }
            },
        }
    }
}

/// Volume of the unit ball in `R^d`.
fn unit_ball_volume(dim: usize) -> f64 {
    // V_0 = 1, V_1 = 2, V_d = V_{d-2} 2 pi / d
    let mut v = if dim.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut d = if dim.is_multiple_of(2) { 2 } else { 3 };
    while d <= dim {
        v *= 2.0 * PI / d as f64;
        d += 2;
    }
    v
}

#[inline]
fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

/// SplitMix64 output finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the random stream used by trial `trial_index`.
pub fn trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    splitmix64(master_seed ^ trial_index)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedProvenance {
    pub master_seed: u64,
    pub trial_index: u64,
}

/// An ordered tuple of points on a manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSample {
    manifold: ManifoldModel,
    coords: Vec<f64>,
    provenance: Option<SeedProvenance>,
}

impl PointSample {
    /// Builds a sample from flat canonical coordinates, validating each point.
    pub fn from_coords(manifold: ManifoldModel, coords: Vec<f64>) -> Result<Self> {
        let stride = manifold.coord_len();
        if !coords.len().is_multiple_of(stride) {
            return Err(Error::invalid(format!(
                "coordinate count {} is not a multiple of {stride}",
                coords.len()
            )));
        }
        for p in coords.chunks_exact(stride) {
            manifold.validate_point(p)?;
        }
        Ok(Self {
            manifold,
            coords,
            provenance: None,
        })
    }

    /// Convenience constructor for circle samples.
    pub fn circle(points: &[f64]) -> Result<Self> {
        Self::from_coords(ManifoldModel::circle(), points.to_vec())
    }

    pub fn manifold(&self) -> ManifoldModel {
        self.manifold
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.manifold.coord_len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let s = self.manifold.coord_len();
        &self.coords[i * s..(i + 1) * s]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.manifold.coord_len())
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn provenance(&self) -> Option<SeedProvenance> {
        self.provenance
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.manifold.distance_unchecked(self.point(i), self.point(j))
    }

    pub fn distance_matrix(&self) -> DistanceMatrix {
        let n = self.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = self.distance(i, j);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        DistanceMatrix { n, data }
    }
}

/// Dense symmetric matrix of pairwise geodesic distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = f(i, j);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        Self { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Pairs `(i, j)`, `i < j`, in lexicographic order with their distances.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| (i, j, self.get(i, j))))
    }
}

/// Draws `n` i.i.d. uniform points for trial `trial_index`.
pub fn sample(
    manifold: ManifoldModel,
    n: usize,
    master_seed: u64,
    trial_index: u64,
) -> Result<PointSample> {
    if n == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(master_seed, trial_index));
    let mut coords = Vec::with_capacity(n * manifold.coord_len());
    for _ in 0..n {
        manifold.draw_point(&mut rng, &mut coords);
    }
    Ok(PointSample {
        manifold,
        coords,
        provenance: Some(SeedProvenance {
            master_seed,
            trial_index,
        }),
    })
}

/// Covering radius together with the additive error of its computation.
///
/// The true covering radius lies in `[radius, radius + mesh_error]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoveringRadius {
    pub radius: f64,
    pub mesh_error: f64,
}

/// Smallest `r` such that the closed `r`-balls around the sample cover the manifold.
///
/// Exact on the circle. Elsewhere the value is the largest distance from a
/// deterministic probe grid with `grid_resolution^intrinsic_dim` points to the
/// sample, a lower bound with error at most the reported mesh.
pub fn covering_radius(sample: &PointSample, grid_resolution: Option<usize>) -> Result<CoveringRadius> {
    if sample.is_empty() {
        return Err(Error::invalid("covering radius of an empty sample"));
    }
    let manifold = sample.manifold();
    if manifold.is_circle() {
        return Ok(CoveringRadius {
            radius: circle_largest_gap(sample.coords()) / 2.0,
            mesh_error: 0.0,
        });
    }
    let res = grid_resolution
        .ok_or_else(|| Error::invalid("grid_resolution is required off the circle"))?;
    if res == 0 {
        return Err(Error::invalid("grid_resolution must be positive"));
    }
    let dim = manifold.intrinsic_dim();
    let probes = (res as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
    if probes > MAX_PROBE_POINTS as u128 {
        return Err(Error::ResourceLimit {
            what: format!("covering-radius probe grid {res}^{dim}"),
            budget: MAX_PROBE_POINTS,
        });
    }
    let nearest = |probe: &[f64]| {
        sample
            .points()
            .map(|p| manifold.distance_unchecked(probe, p))
            .fold(f64::INFINITY, f64::min)
    };
    let mut radius = 0.0f64;
    let mut probe = vec![0.0; manifold.coord_len()];
    let mesh_error = match manifold.kind() {
        ManifoldKind::FlatTorus { .. } => {
            let mut idx = vec![0usize; dim];
            loop {
                for (c, i) in probe.iter_mut().zip(&idx) {
                    *c = (*i as f64 + 0.5) / res as f64;
                }
                radius = radius.max(nearest(&probe));
                if !advance_multi_index(&mut idx, res) {
                    break;
                }
            }
            (dim as f64).sqrt() / (2.0 * res as f64)
        }
        ManifoldKind::Sphere2 => {
            for i in 0..res {
                let theta = (i as f64 + 0.5) * PI / res as f64;
                for j in 0..res {
                    let phi = (j as f64 + 0.5) * 2.0 * PI / res as f64;
                    probe[0] = theta.sin() * phi.cos();
                    probe[1] = theta.sin() * phi.sin();
                    probe[2] = theta.cos();
                    radius = radius.max(nearest(&probe));
                }
            }
            // meridian step of at most pi/(2 res), then a latitude step of at most pi/res
            3.0 * PI / (2.0 * res as f64)
        }
        ManifoldKind::Circle => unreachable!(),
    };
    Ok(CoveringRadius { radius, mesh_error })
}

fn advance_multi_index(idx: &mut [usize], base: usize) -> bool {
    for i in idx.iter_mut() {
        *i += 1;
        if *i < base {
            return true;
        }
        *i = 0;
    }
    false
}

/// Largest circular gap between consecutive sorted points, wrap-around included.
fn circle_largest_gap(points: &[f64]) -> f64 {
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    let wrap = 1.0 - sorted[sorted.len() - 1] + sorted[0];
    sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(wrap, f64::max)
}

/// Upper bound on `P(covering radius of n uniform points > epsilon)`.
///
/// Places `k = ceil(1/epsilon)` arcs of radius `epsilon/2` on a uniform grid of
/// centres; if every arc holds a sample point the sample is an
/// `epsilon`-cover. A union bound over the arcs gives `k (1 - min(epsilon, 1))^n`,
/// clamped to 1.
pub fn covering_tail_bound(manifold: ManifoldModel, epsilon: f64, n: usize) -> Result<f64> {
    if !manifold.is_circle() {
        return Err(Error::Unsupported(
            "covering tail bound is implemented for the circle only".into(),
        ));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    if n == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    let k = (1.0 / epsilon).ceil();
    let arc = epsilon.min(1.0);
    Ok((k * (1.0 - arc).powf(n as f64)).min(1.0))
}

/// Exact coincidences in a sample: equal points and equal pairwise distances.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DegeneracyReport {
    pub collisions: Vec<(usize, usize)>,
    pub distance_ties: Vec<((usize, usize), (usize, usize))>,
}

impl DegeneracyReport {
    pub fn is_empty(&self) -> bool {
        self.collisions.is_empty() && self.distance_ties.is_empty()
    }
}

/// Lists all collisions and all pairs of index pairs with bit-equal distances.
pub fn detect_degeneracies(sample: &PointSample) -> DegeneracyReport {
    let dm = sample.distance_matrix();
    let mut pairs: Vec<(usize, usize, f64)> = dm.pairs().collect();
    let collisions = pairs
        .iter()
        .filter(|(_, _, d)| *d == 0.0)
        .map(|&(i, j, _)| (i, j))
        .collect();
    // stable: equal distances keep lexicographic pair order
    pairs.sort_by(|a, b| a.2.total_cmp(&b.2));
    let mut distance_ties = Vec::new();
    for group in pairs.chunk_by(|a, b| a.2 == b.2) {
        for (x, a) in group.iter().enumerate() {
            for b in &group[x + 1..] {
                let (p, q) = ((a.0, a.1), (b.0, b.1));
                distance_ties.push(if p < q { (p, q) } else { (q, p) });
            }
        }
    }
    distance_ties.sort_unstable();
    DegeneracyReport {
        collisions,
        distance_ties,
    }
}
