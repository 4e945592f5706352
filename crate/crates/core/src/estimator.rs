//! Monte Carlo estimation of `t -> E[T(X_n, t)]` and `Var[T(X_n, t)]`.
//!
//! Each trial draws one sample from `(master_seed, trial_index)` and evaluates
//! the invariant at every grid scale on that same sample (common random
//! numbers). Trials run on a rayon pool; results are gathered in trial order
//! and aggregated with exact integer sums, so the output does not depend on
//! the number of workers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{ComplexBuilder, MaxDim, DEFAULT_SIMPLEX_BUDGET};
use crate::error::{Error, Result};
use crate::homology::{InvariantKind, InvariantSpec};
use crate::manifold::{sample, ManifoldModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplexKind {
    #[serde(rename = "vr")]
    VietorisRips,
    Cech,
}

/// Inputs of one curve estimation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRequest {
    pub manifold: ManifoldModel,
    pub complex: ComplexKind,
    pub invariant: InvariantSpec,
    pub n: usize,
    pub grid: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    pub max_dim: MaxDim,
    pub simplex_budget: usize,
}

impl CurveRequest {
    /// A request using the smallest truncation the invariant allows and the
    /// default simplex budget.
    pub fn new(
        manifold: ManifoldModel,
        complex: ComplexKind,
        invariant: InvariantSpec,
        n: usize,
        grid: Vec<f64>,
        trials: usize,
        master_seed: u64,
    ) -> Self {
        Self {
            manifold,
            complex,
            invariant,
            n,
            grid,
            trials,
            master_seed,
            max_dim: invariant.required_max_dim(),
            simplex_budget: DEFAULT_SIMPLEX_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 2 {
            return Err(Error::invalid(format!(
                "at least 2 trials are needed for a sample variance, got {}",
                self.trials
            )));
        }
        if self.n == 0 {
            return Err(Error::invalid("sample size must be at least 1"));
        }
        validate_grid(&self.grid)?;
        if !self.invariant.accepts(self.max_dim) {
            return Err(Error::invalid(format!(
                "{} cannot be computed on complexes truncated at dimension {}",
                self.invariant, self.max_dim
            )));
        }
        if self.complex == ComplexKind::Cech {
            if !self.manifold.is_circle() {
                return Err(Error::invalid("Čech complexes require the circle"));
            }
            if self.grid[0] <= 0.0 {
                return Err(Error::invalid("Čech radii must be positive"));
            }
        }
        Ok(())
    }
}

/// Checks that a scale grid is nonempty, finite, nonnegative and strictly increasing.
pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("scale grid is empty"));
    }
    if let Some(t) = grid.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::invalid(format!("scale {t} is not a finite nonnegative number")));
    }
    if let Some(w) = grid.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::invalid(format!(
            "scale grid is not strictly increasing at {} -> {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Pointwise Monte Carlo moments of an invariant along a scale grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveEstimate {
    pub manifold: ManifoldModel,
    pub invariant: InvariantSpec,
    pub complex: ComplexKind,
    pub n: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub grid: Vec<f64>,
    pub mean: Vec<f64>,
    /// Unbiased sample variance.
    pub variance: Vec<f64>,
    /// `sqrt(variance / trials)`.
    pub stderr: Vec<f64>,
}

/// Invariant values of trial `trial_index` at every grid scale.
pub fn evaluate_trial(req: &CurveRequest, trial_index: u64) -> Result<Vec<i64>> {
    let builder = ComplexBuilder::new(req.max_dim).with_budget(req.simplex_budget);
    let points = sample(req.manifold, req.n, req.master_seed, trial_index)?;
    let distances = points.distance_matrix();
    req.grid
        .iter()
        .map(|&t| {
            let complex = match req.complex {
                ComplexKind::VietorisRips => builder.vietoris_rips(&distances, t),
                ComplexKind::Cech => builder.cech_circle(&points, t),
            }
            .map_err(|e| match e {
                Error::ResourceLimit { what, budget } => Error::ResourceLimit {
                    what: format!("{what} in trial {trial_index} at t = {t}"),
                    budget,
                },
                other => other,
            })?;
            req.invariant.evaluate(&complex)
        })
        .collect()
}

fn run_trials(req: &CurveRequest, workers: usize) -> Result<Vec<Vec<i64>>> {
    if workers == 0 {
        return Err(Error::invalid("worker count must be positive"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        (0..req.trials as u64)
            .into_par_iter()
            .map(|j| evaluate_trial(req, j))
            .collect()
    })
}

/// Runs `req.trials` independent trials on `workers` threads.
///
/// A trial that exceeds the simplex budget aborts the whole run.
pub fn estimate_curve(req: &CurveRequest, workers: usize) -> Result<CurveEstimate> {
    req.validate()?;
    let values = run_trials(req, workers)?;
    let m = req.grid.len();
    let mut sum = vec![0i128; m];
    let mut sum_sq = vec![0i128; m];
    for row in &values {
        for (i, &v) in row.iter().enumerate() {
            sum[i] += v as i128;
            sum_sq[i] += (v as i128) * (v as i128);
        }
    }
    let n = req.trials as i128;
    let mean: Vec<f64> = sum.iter().map(|&s| s as f64 / n as f64).collect();
    let variance: Vec<f64> = sum
        .iter()
        .zip(&sum_sq)
        .map(|(&s, &s2)| (n * s2 - s * s) as f64 / (n * (n - 1)) as f64)
        .collect();
    let stderr = variance.iter().map(|v| (v / n as f64).sqrt()).collect();
    Ok(CurveEstimate {
        manifold: req.manifold,
        invariant: req.invariant,
        complex: req.complex,
        n: req.n,
        trials: req.trials,
        master_seed: req.master_seed,
        grid: req.grid.clone(),
        mean,
        variance,
        stderr,
    })
}

/// Reference value `T(M)` of a convergence study and where it comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub value: f64,
    pub source: String,
}

impl Target {
    /// Betti numbers and Euler characteristic of the model manifolds over GF(2).
    pub fn for_manifold(manifold: ManifoldModel, invariant: InvariantSpec) -> Self {
        use crate::manifold::ManifoldKind::*;
        let (value, name) = match (manifold.kind(), invariant.kind) {
            (_, InvariantKind::Betti(0)) => (1.0, "b0"),
            (Circle, InvariantKind::Betti(1)) => (1.0, "b1(S^1)"),
            (Circle, InvariantKind::EulerCharacteristic) => (0.0, "chi(S^1)"),
            (Circle, InvariantKind::Betti(_)) => (0.0, "b_i(S^1), i > 1"),
            (Sphere2, InvariantKind::Betti(2)) => (1.0, "b2(S^2)"),
            (Sphere2, InvariantKind::EulerCharacteristic) => (2.0, "chi(S^2)"),
            (Sphere2, InvariantKind::Betti(_)) => (0.0, "b_i(S^2), i = 1 or i > 2"),
            (FlatTorus { dim }, InvariantKind::Betti(i)) => (binomial(dim, i), "b_i(T^d) = C(d, i)"),
            (FlatTorus { .. }, InvariantKind::EulerCharacteristic) => (0.0, "chi(T^d)"),
        };
        Self {
            value,
            source: name.to_string(),
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
    /// `|mean - target|`.
    pub abs_error: f64,
}

/// Moments at a fixed scale for increasing sample sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub t: f64,
    pub target: Target,
    pub rows: Vec<ConvergenceRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRequest {
    pub manifold: ManifoldModel,
    pub complex: ComplexKind,
    pub invariant: InvariantSpec,
    pub t: f64,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    pub max_dim: MaxDim,
    pub simplex_budget: usize,
    pub target: Target,
}

/// One single-scale curve per sample size, annotated with the distance to the target.
pub fn convergence_study(req: &ConvergenceRequest, workers: usize) -> Result<ConvergenceTable> {
    if req.n_values.is_empty() {
        return Err(Error::invalid("no sample sizes given"));
    }
    if let Some(w) = req.n_values.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::invalid(format!(
            "sample sizes must increase, got {} then {}",
            w[0], w[1]
        )));
    }
    if !(req.t > 0.0) {
        return Err(Error::invalid(format!("scale must be positive, got {}", req.t)));
    }
    let rows = req
        .n_values
        .iter()
        .map(|&n| {
            let curve = estimate_curve(
                &CurveRequest {
                    manifold: req.manifold,
                    complex: req.complex,
                    invariant: req.invariant,
                    n,
                    grid: vec![req.t],
                    trials: req.trials,
                    master_seed: req.master_seed,
                    max_dim: req.max_dim,
                    simplex_budget: req.simplex_budget,
                },
                workers,
            )?;
            Ok(ConvergenceRow {
                n,
                mean: curve.mean[0],
                variance: curve.variance[0],
                stderr: curve.stderr[0],
                abs_error: (curve.mean[0] - req.target.value).abs(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(ConvergenceTable {
        t: req.t,
        target: req.target.clone(),
        rows,
    })
}

/// Discrete slopes of a curve between consecutive grid points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub max_slope: f64,
    /// Index `i` of the interval `[grid[i], grid[i+1]]` attaining `max_slope`.
    pub argmax: usize,
    pub slopes: Vec<f64>,
    /// `2 C(n, 2) f(2^n) K`, for reference only; far from tight.
    pub theoretical_bound: Option<f64>,
}

/// `|v[i+1] - v[i]| / (t[i+1] - t[i])` for every interval.
pub fn discrete_slopes(grid: &[f64], values: &[f64]) -> Result<LipschitzReport> {
    if grid.len() < 2 {
        return Err(Error::invalid("a slope needs at least two grid points"));
    }
    if grid.len() != values.len() {
        return Err(Error::invalid("grid and values differ in length"));
    }
    let slopes: Vec<f64> = grid
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| (v[1] - v[0]).abs() / (t[1] - t[0]))
        .collect();
    let (argmax, max_slope) = slopes
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, s)| if s > best.1 { (i, s) } else { best });
    Ok(LipschitzReport {
        max_slope,
        argmax,
        slopes,
        theoretical_bound: None,
    })
}

/// Discrete slopes of the estimated mean. Differences of order `stderr / h`
/// are Monte Carlo noise, not curvature of `E[T]`.
pub fn lipschitz_diagnostic(curve: &CurveEstimate) -> Result<LipschitzReport> {
    let mut report = discrete_slopes(&curve.grid, &curve.mean)?;
    let n = curve.n as f64;
    let pairs = n * (n - 1.0) / 2.0;
    let f = curve.invariant.growth_bound(2f64.powf(n));
    report.theoretical_bound = Some(2.0 * pairs * f * curve.manifold.ball_measure_lipschitz());
    Ok(report)
}
