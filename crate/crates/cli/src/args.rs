//! Flag parsing into [`RunConfig`].

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use betti_core::complex::{MaxDim, DEFAULT_SIMPLEX_BUDGET};
use betti_core::estimator::ComplexKind;
use betti_core::homology::InvariantSpec;
use clap::{Args, Parser, Subcommand as ClapSubcommand};

use crate::config::{
    extract_config, parse_complex, parse_invariant, parse_manifold, parse_max_dim, GridSpec, OutputFormat,
    RunConfig, Subcommand,
};
use crate::run::run;
use crate::selftest::SELFTEST_DEFAULT_TRIALS;
use crate::CliError;

const DEFAULT_TRIALS: usize = 1000;

#[derive(Debug, Parser)]
#[command(name = "betti", version, about = "Expected Betti and Euler curves of random complexes on manifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, ClapSubcommand)]
pub enum Command {
    /// Monte Carlo mean and variance of an invariant along a scale grid.
    Curve(CurveArgs),
    /// Exact probability that VR(X, r) of n circle points is a circle.
    Oracle(OracleArgs),
    /// Mean of an invariant at one scale for growing sample sizes.
    Converge(ConvergeArgs),
    /// Quick consistency checks of this build.
    Selftest(SelftestArgs),
    /// Re-run the configuration embedded in a CSV or JSON results file.
    Rerun(RerunArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// circle, torus or sphere.
    #[arg(long, default_value = "circle")]
    pub manifold: String,
    /// Dimension of the flat torus.
    #[arg(long, default_value_t = 2)]
    pub torus_dim: usize,
    /// vr or cech (cech on the circle only).
    #[arg(long, default_value = "vr", value_parser = parse_complex)]
    pub complex: ComplexKind,
    /// betti<k> or euler.
    #[arg(long, default_value = "betti1", value_parser = parse_invariant)]
    pub invariant: InvariantSpec,
    /// Truncation dimension or `full`; defaults to the smallest the invariant allows.
    #[arg(long, value_parser = parse_max_dim)]
    pub max_dim: Option<MaxDim>,
    /// Abort a trial whose complex exceeds this many simplices.
    #[arg(long, default_value_t = DEFAULT_SIMPLEX_BUDGET)]
    pub budget: usize,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, conflicts_with = "grid")]
    pub t_min: Option<f64>,
    #[arg(long, conflicts_with = "grid")]
    pub t_max: Option<f64>,
    /// Number of evenly spaced scales from --t-min to --t-max.
    #[arg(long, conflicts_with = "grid")]
    pub steps: Option<usize>,
    /// Explicit comma-separated scales.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
}

impl GridArgs {
    fn spec(&self) -> Result<GridSpec, CliError> {
        if let Some(values) = &self.grid {
            return Ok(GridSpec::List { values: values.clone() });
        }
        let t_min = self
            .t_min
            .ok_or_else(|| CliError::usage("give --t-min/--t-max/--steps or --grid"))?;
        let steps = self.steps.unwrap_or(if self.t_max.is_some() { 32 } else { 1 });
        let t_max = match self.t_max {
            Some(t) => t,
            None if steps == 1 => t_min,
            None => return Err(CliError::usage("--t-max is required when --steps > 1")),
        };
        let spec = GridSpec::Range { t_min, t_max, steps };
        spec.expand()?;
        Ok(spec)
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to BETTI_WORKERS, then to the number of CPUs.
    #[arg(long, env = "BETTI_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; stdout when absent. CSV files get a sibling .gp script.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// csv or json.
    #[arg(long, default_value = "csv")]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Fixed scale.
    #[arg(long)]
    pub t: f64,
    /// Increasing comma-separated sample sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_values: Vec<usize>,
    /// Reference value; defaults to the invariant of the manifold.
    #[arg(long)]
    pub target: Option<f64>,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct RerunArgs {
    /// A CSV or JSON file written by this tool.
    #[arg(long)]
    pub config: PathBuf,
    /// Where to write the new results; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, env = "BETTI_WORKERS")]
    pub workers: Option<usize>,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn apply_model(config: &mut RunConfig, model: &ModelArgs) -> Result<(), CliError> {
    config.manifold = parse_manifold(&model.manifold, model.torus_dim)?;
    config.complex = model.complex;
    config.invariant = model.invariant;
    config.max_dim = model.max_dim;
    config.simplex_budget = model.budget;
    Ok(())
}

fn apply_run(config: &mut RunConfig, run: &RunArgs, default_trials: usize) {
    config.trials = run.trials.unwrap_or(default_trials);
    config.master_seed = run.seed;
    config.workers = run.workers.unwrap_or_else(default_workers);
}

fn apply_output(config: &mut RunConfig, out: &OutputArgs) {
    config.output = out.output.clone();
    config.format = out.format;
}

/// Turns parsed flags into a configuration.
pub fn build_config(command: &Command) -> Result<RunConfig, CliError> {
    match command {
        Command::Curve(a) => {
            let mut c = RunConfig::new(Subcommand::Curve);
            apply_model(&mut c, &a.model)?;
            c.n = a.n;
            c.grid = Some(a.grid.spec()?);
            apply_run(&mut c, &a.run, DEFAULT_TRIALS);
            apply_output(&mut c, &a.out);
            Ok(c)
        }
        Command::Oracle(a) => {
            let mut c = RunConfig::new(Subcommand::Oracle);
            c.n = a.n;
            c.grid = Some(a.grid.spec()?);
            c.trials = 0;
            apply_output(&mut c, &a.out);
            Ok(c)
        }
        Command::Converge(a) => {
            let mut c = RunConfig::new(Subcommand::Converge);
            apply_model(&mut c, &a.model)?;
            c.t = Some(a.t);
            c.n_values = a.n_values.clone();
            c.n = a.n_values.last().copied().unwrap_or(0);
            c.target = a.target;
            apply_run(&mut c, &a.run, DEFAULT_TRIALS);
            apply_output(&mut c, &a.out);
            Ok(c)
        }
        Command::Selftest(a) => {
            let mut c = RunConfig::new(Subcommand::Selftest);
            apply_run(&mut c, &a.run, SELFTEST_DEFAULT_TRIALS);
            Ok(c)
        }
        Command::Rerun(a) => {
            let text = fs::read_to_string(&a.config)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", a.config.display())))?;
            let mut c = extract_config(&text)?;
            // never overwrite the source file implicitly
            c.output = a.output.clone();
            if let Some(w) = a.workers {
                c.workers = w;
            }
            Ok(c)
        }
    }
}

/// Parses `args`, runs, reports errors on stderr and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match build_config(&cli.command).and_then(|c| run(&c)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
