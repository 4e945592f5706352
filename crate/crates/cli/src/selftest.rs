//! Fast end-to-end checks of a build.

use betti_core::circle_oracle::circle_homotopy_prob;
use betti_core::complex::{cech_complex_circle, edge_scales, vr_complex, MaxDim};
use betti_core::estimator::{estimate_curve, ComplexKind, CurveRequest};
use betti_core::homology::InvariantSpec;
use betti_core::manifold::{sample, ManifoldModel, PointSample};

use crate::config::RunConfig;
use crate::CliError;

/// Fewer trials make the 4-sigma Monte Carlo checks meaningless.
pub const SELFTEST_MIN_TRIALS: usize = 1000;

pub const SELFTEST_DEFAULT_TRIALS: usize = 4000;

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn oracle_vs_monte_carlo(config: &RunConfig) -> Result<Check, CliError> {
    let grid = vec![0.2, 0.25, 0.3];
    let req = CurveRequest::new(
        ManifoldModel::circle(),
        ComplexKind::VietorisRips,
        InvariantSpec::betti(1),
        10,
        grid.clone(),
        config.trials,
        config.master_seed,
    );
    let est = estimate_curve(&req, config.workers)?;
    let mut worst = 0.0f64;
    for (i, &r) in grid.iter().enumerate() {
        let p = circle_homotopy_prob(10, r)?;
        let sd = (p * (1.0 - p) / config.trials as f64).sqrt();
        let z = if sd > 0.0 {
            (est.mean[i] - p).abs() / sd
        } else if est.mean[i] == p {
            0.0
        } else {
            f64::INFINITY
        };
        worst = worst.max(z);
    }
    Ok(Check {
        name: "oracle_vs_mc_n10",
        passed: worst <= 4.0,
        detail: format!("max |mean - P| = {worst:.2} sigma over r in {grid:?}"),
    })
}

fn euler_two_points(config: &RunConfig) -> Result<Check, CliError> {
    let grid = vec![0.1, 0.25, 0.4, 0.6];
    let req = CurveRequest::new(
        ManifoldModel::circle(),
        ComplexKind::VietorisRips,
        InvariantSpec::euler(),
        2,
        grid.clone(),
        config.trials,
        config.master_seed,
    );
    let est = estimate_curve(&req, config.workers)?;
    let mut failures = Vec::new();
    for (i, &t) in grid.iter().enumerate() {
        let expected = if t <= 0.5 { 2.0 * (1.0 - t) } else { 1.0 };
        if (est.mean[i] - expected).abs() > 4.0 * est.stderr[i] {
            failures.push(format!("t = {t}: {} vs {expected}", est.mean[i]));
        }
    }
    Ok(Check {
        name: "euler_n2",
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("E[chi] within 4 stderr of 2(1-t) at t in {grid:?}")
        } else {
            failures.join("; ")
        },
    })
}

/// Points fit in a closed half circle iff some circular gap is at least 1/2.
fn in_half_circle(points: &[f64]) -> bool {
    let mut x = points.to_vec();
    x.sort_by(f64::total_cmp);
    let wrap = 1.0 - x[x.len() - 1] + x[0];
    let gap = x.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::max);
    gap >= 0.5
}

fn interleaving_one(s: &PointSample, r: f64) -> Result<Option<String>, CliError> {
    let cech = cech_complex_circle(s, r, MaxDim::Full)?;
    let vr = vr_complex(s, 2.0 * r, MaxDim::Full)?;
    if !cech.is_subcomplex_of(&vr) {
        return Ok(Some(format!("Cech(X, {r}) not inside VR(X, {})", 2.0 * r)));
    }
    let cech_eps = cech_complex_circle(s, r + 1e-9, MaxDim::Full)?;
    for simplex in vr.iter() {
        let pts: Vec<f64> = simplex.iter().map(|&v| s.point(v as usize)[0]).collect();
        if in_half_circle(&pts) && !cech_eps.contains(simplex) {
            return Ok(Some(format!("VR simplex {simplex:?} at {} missing from Cech(X, {r}+)", 2.0 * r)));
        }
    }
    Ok(None)
}

fn interleaving(config: &RunConfig) -> Result<Check, CliError> {
    const SAMPLES: u64 = 100;
    for trial in 0..SAMPLES {
        let s = sample(ManifoldModel::circle(), 8, config.master_seed, trial)?;
        let scales = edge_scales(&s);
        // the k-th smallest distance must already carry k edges (closed balls)
        for (k, &l) in scales.scales().iter().enumerate().skip(1) {
            let edges = vr_complex(&s, l, MaxDim::Dim(1))?.count(1);
            if edges < k {
                return Ok(Check {
                    name: "interleaving",
                    passed: false,
                    detail: format!("sample {trial}: VR(X, l_{k}) has {edges} < {k} edges"),
                });
            }
            if let Some(msg) = interleaving_one(&s, l / 2.0)? {
                return Ok(Check {
                    name: "interleaving",
                    passed: false,
                    detail: format!("sample {trial}: {msg}"),
                });
            }
        }
        for r in [0.01, 0.07, 0.13, 0.2, 0.3] {
            if let Some(msg) = interleaving_one(&s, r)? {
                return Ok(Check {
                    name: "interleaving",
                    passed: false,
                    detail: format!("sample {trial}: {msg}"),
                });
            }
        }
    }
    Ok(Check {
        name: "interleaving",
        passed: true,
        detail: format!("{SAMPLES} samples of 8 points, every edge scale plus 5 fixed radii"),
    })
}

pub fn selftest_checks(config: &RunConfig) -> Result<Vec<Check>, CliError> {
    if config.trials < SELFTEST_MIN_TRIALS {
        return Err(CliError::usage(format!(
            "selftest needs at least {SELFTEST_MIN_TRIALS} trials, got {}",
            config.trials
        )));
    }
    Ok(vec![oracle_vs_monte_carlo(config)?, euler_two_points(config)?, interleaving(config)?])
}

pub fn run_selftest(config: &RunConfig) -> Result<(), CliError> {
    let checks = selftest_checks(config)?;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::SelftestFailed(failed.join(", ")))
    }
}
