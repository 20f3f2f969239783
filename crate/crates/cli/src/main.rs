//! `sinhlayer` command-line interface.
//!
//! Exit codes: 0 success, 1 a required check failed, 2 configuration
//! error, 3 solver failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sinhlayer::{LayerVariant, Model};

use commands::{Failure, Outcome};
use config::{Format, GradingKind, RunConfig};

#[derive(Parser)]
#[command(name = "sinhlayer", version, about = "Boundary layers of a nonlocal sinh-Poisson problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve once and write the nodal profile.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: Option<Model>,
    },
    /// Evaluate the closed-form expansions.
    Expand {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        variant: Option<LayerVariant>,
        #[arg(long, value_delimiter = ',')]
        p_grid: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        q_grid: Option<Vec<f64>>,
    },
    /// Run an eps sweep and fit convergence rates.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, value_delimiter = ',')]
        layer_p: Option<Vec<f64>>,
        #[arg(long)]
        min_order: Option<f64>,
        #[arg(long)]
        dtn_order: Option<f64>,
        #[arg(long)]
        layer_rel: Option<f64>,
        #[arg(long)]
        limit_rel: Option<f64>,
    },
    /// Tabulate weak limits of the gradient and value measures.
    Concentrate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, value_delimiter = ',')]
        window_p: Option<Vec<f64>>,
    },
    /// Check the inside/outside layer dichotomy along a sweep.
    Dichotomy {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: SweepArgs,
    },
}

#[derive(Args)]
struct Common {
    /// JSON config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "N", allow_negative_numbers = true)]
    dim: Option<f64>,
    #[arg(long = "R", allow_negative_numbers = true)]
    radius: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eps: Option<f64>,
    /// Number of mesh intervals.
    #[arg(long)]
    mesh_n: Option<usize>,
    #[arg(long, value_enum)]
    grading: Option<GradingKind>,
    /// Share of intervals inside the boundary layer (geometric grading).
    #[arg(long)]
    layer_fraction: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    tol_residual: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    /// Decreasing list, e.g. 0.08,0.04,0.02
    #[arg(long, value_delimiter = ',')]
    eps_list: Option<Vec<f64>>,
    #[arg(long)]
    variant: Option<LayerVariant>,
}

impl Common {
    fn flags(&self) -> RunConfig {
        RunConfig {
            dim: self.dim,
            radius: self.radius,
            gamma: self.gamma,
            a0: self.a0,
            eps: self.eps,
            mesh_n: self.mesh_n,
            grading: self.grading,
            layer_fraction: self.layer_fraction,
            out: self.out.clone(),
            format: self.format,
            tol_residual: self.tol_residual,
            max_iters: self.max_iters,
            ..RunConfig::default()
        }
    }
}

fn build(common: &Common, extra: RunConfig) -> Result<RunConfig, Failure> {
    let base = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let flags = common.flags().merged(extra);
    Ok(base.merged(flags).resolve()?)
}

fn sweep_extra(s: &SweepArgs) -> RunConfig {
    RunConfig { eps_list: s.eps_list.clone(), variant: s.variant, ..RunConfig::default() }
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    match cli.command {
        Command::Solve { common, model } => {
            let cfg = build(&common, RunConfig { model, ..RunConfig::default() })?;
            commands::solve_cmd(&cfg)
        }
        Command::Expand { common, variant, p_grid, q_grid } => {
            let cfg = build(&common, RunConfig { variant, p_grid, q_grid, ..RunConfig::default() })?;
            commands::expand_cmd(&cfg)
        }
        Command::Sweep { common, sweep, layer_p, min_order, dtn_order, layer_rel, limit_rel } => {
            let extra = RunConfig { layer_p, min_order, dtn_order, layer_rel, limit_rel, ..sweep_extra(&sweep) };
            commands::sweep_cmd(&build(&common, extra)?)
        }
        Command::Concentrate { common, sweep, window_p } => {
            let cfg = build(&common, RunConfig { window_p, ..sweep_extra(&sweep) })?;
            commands::concentrate_cmd(&cfg)
        }
        Command::Dichotomy { common, sweep } => commands::dichotomy_cmd(&build(&common, sweep_extra(&sweep))?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(m)) => {
            eprintln!("solver failure: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Io(m)) => {
            eprintln!("i/o error: {m}");
            ExitCode::from(2)
        }
    }
}
