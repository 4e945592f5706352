//! Subcommand drivers.

use betti_core::circle_oracle::{circle_homotopy_prob, circle_oracle_curve, MAX_SCALE};
use betti_core::estimator::{
    convergence_study, estimate_curve, ComplexKind, ConvergenceRequest, ConvergenceTable, CurveEstimate,
    CurveRequest, Target,
};
use betti_core::homology::{InvariantKind, InvariantSpec};
use betti_core::manifold::{ManifoldKind, ManifoldModel};

use crate::config::{RunConfig, Subcommand};
use crate::output::{emit, Cell, Plot, Table};
use crate::selftest::run_selftest;
use crate::CliError;

fn manifold_label(m: ManifoldModel) -> String {
    match m.kind() {
        ManifoldKind::Circle => "circle".into(),
        ManifoldKind::FlatTorus { dim } => format!("flat {dim}-torus"),
        ManifoldKind::Sphere2 => "2-sphere".into(),
    }
}

fn complex_label(c: ComplexKind) -> &'static str {
    match c {
        ComplexKind::VietorisRips => "Vietoris-Rips",
        ComplexKind::Cech => "Cech",
    }
}

fn invariant_label(i: InvariantSpec) -> String {
    match i.kind {
        InvariantKind::Betti(k) => format!("b{k}"),
        InvariantKind::EulerCharacteristic => "chi".into(),
    }
}

/// Whether the closed-form circle probability applies to this curve.
fn oracle_applies(config: &RunConfig) -> bool {
    config.manifold.is_circle()
        && config.complex == ComplexKind::VietorisRips
        && config.invariant == InvariantSpec::betti(1)
}

pub fn curve_request(config: &RunConfig) -> Result<CurveRequest, CliError> {
    let req = CurveRequest {
        manifold: config.manifold,
        complex: config.complex,
        invariant: config.invariant,
        n: config.n,
        grid: config.expand_grid()?,
        trials: config.trials,
        master_seed: config.master_seed,
        max_dim: config.effective_max_dim(),
        simplex_budget: config.simplex_budget,
    };
    req.validate()?;
    Ok(req)
}

/// Monte Carlo curve with the oracle column where it applies.
pub fn curve_table(config: &RunConfig) -> Result<(CurveEstimate, Table), CliError> {
    let est = estimate_curve(&curve_request(config)?, config.workers)?;
    let mut table = Table::new(&["t", "n", "trials", "mean", "variance", "stderr", "oracle_p"]);
    for (i, &t) in est.grid.iter().enumerate() {
        let oracle = if oracle_applies(config) && t > 0.0 && t < MAX_SCALE {
            Cell::Num(circle_homotopy_prob(est.n, t)?)
        } else {
            Cell::Empty
        };
        table.push(vec![
            Cell::Num(t),
            Cell::Int(est.n as u64),
            Cell::Int(est.trials as u64),
            Cell::Num(est.mean[i]),
            Cell::Num(est.variance[i]),
            Cell::Num(est.stderr[i]),
            oracle,
        ]);
    }
    Ok((est, table))
}

pub fn run_curve(config: &RunConfig) -> Result<(), CliError> {
    let (_, table) = curve_table(config)?;
    let mut series = vec![(4, "mean", "linespoints pt 7 ps 0.5"), (5, "variance", "linespoints pt 5 ps 0.5")];
    if oracle_applies(config) {
        series.push((7, "P(n, t)", "lines lw 2"));
    }
    let plot = Plot {
        title: format!(
            "{} of {} complexes, n = {} points on the {}, {} trials",
            invariant_label(config.invariant),
            complex_label(config.complex),
            config.n,
            manifold_label(config.manifold),
            config.trials
        ),
        xlabel: "t",
        ylabel: invariant_label(config.invariant),
        series,
    };
    emit(config, &table, Some(&plot))
}

pub fn oracle_table(config: &RunConfig) -> Result<Table, CliError> {
    if !config.manifold.is_circle() {
        return Err(CliError::usage("the oracle is defined for the circle only"));
    }
    let grid = config.expand_grid()?;
    let evals = circle_oracle_curve(config.n, &grid)?;
    let mut table = Table::new(&["r", "n", "p", "expected_b1", "variance_b1"]);
    for e in evals {
        table.push(vec![
            Cell::Num(e.r),
            Cell::Int(e.n as u64),
            Cell::Num(e.p_circle),
            Cell::Num(e.expected_b1),
            Cell::Num(e.variance_b1),
        ]);
    }
    Ok(table)
}

pub fn run_oracle(config: &RunConfig) -> Result<(), CliError> {
    let table = oracle_table(config)?;
    let plot = Plot {
        title: format!("exact mean and variance of b1, Vietoris-Rips, n = {} points on the circle", config.n),
        xlabel: "r",
        ylabel: "b1".into(),
        series: vec![(4, "E[b1]", "lines lw 2"), (5, "Var[b1]", "lines lw 2 dt 2")],
    };
    emit(config, &table, Some(&plot))
}

pub fn convergence_table(config: &RunConfig) -> Result<(ConvergenceTable, Table), CliError> {
    let t = config
        .t
        .ok_or_else(|| CliError::usage("converge needs --t"))?;
    let target = match config.target {
        Some(value) => Target {
            value,
            source: "user".into(),
        },
        None => Target::for_manifold(config.manifold, config.invariant),
    };
    let req = ConvergenceRequest {
        manifold: config.manifold,
        complex: config.complex,
        invariant: config.invariant,
        t,
        n_values: config.n_values.clone(),
        trials: config.trials,
        master_seed: config.master_seed,
        max_dim: config.effective_max_dim(),
        simplex_budget: config.simplex_budget,
        target,
    };
    let result = convergence_study(&req, config.workers)?;
    let mut table = Table::new(&["n", "t", "trials", "mean", "variance", "stderr", "abs_error", "target"]);
    for row in &result.rows {
        table.push(vec![
            Cell::Int(row.n as u64),
            Cell::Num(result.t),
            Cell::Int(config.trials as u64),
            Cell::Num(row.mean),
            Cell::Num(row.variance),
            Cell::Num(row.stderr),
            Cell::Num(row.abs_error),
            Cell::Num(result.target.value),
        ]);
    }
    Ok((result, table))
}

pub fn run_converge(config: &RunConfig) -> Result<(), CliError> {
    let (_, table) = convergence_table(config)?;
    let plot = Plot {
        title: format!(
            "convergence of {} at t = {} on the {}",
            invariant_label(config.invariant),
            config.t.unwrap_or_default(),
            manifold_label(config.manifold)
        ),
        xlabel: "n",
        ylabel: format!("|E[{}] - target|", invariant_label(config.invariant)),
        series: vec![(7, "abs_error", "linespoints pt 7")],
    };
    emit(config, &table, Some(&plot))
}

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    if config.workers == 0 {
        return Err(CliError::usage("--workers must be at least 1"));
    }
    match config.subcommand {
        Subcommand::Curve => run_curve(config),
        Subcommand::Oracle => run_oracle(config),
        Subcommand::Converge => run_converge(config),
        Subcommand::Selftest => run_selftest(config),
    }
}
