//! Command-line configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qtradeoff::tradeoff::SearchBudget;

use crate::error::CliError;

/// Amount by which `--overlap` may differ from `sin 2·alpha` when both are given.
pub const OVERLAP_CONSISTENCY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "qtradeoff",
    version,
    about = "Information gain versus disturbance for two-state eavesdropping"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write results here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Output format; defaults to csv for curves and json for reports.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,

    /// Exit with status 3 when a numerical-consistency warning is raised.
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the optimal frontier D(pe).
    Curve {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// Minimize D over the closed-form family at evenly spaced pe targets.
    FamilyFrontier {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Minimize D over generic isometries at evenly spaced pe targets.
    IsometryFrontier {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 2)]
        dim_e: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Evaluate the closed forms on a lattice of family parameters.
    Sweep {
        #[command(flatten)]
        pair: PairArgs,
        /// Points per parameter axis.
        #[arg(long, default_value_t = 11)]
        grid: usize,
    },
    /// Smallest pe reachable with D at most 1e-9.
    ZeroDisturbance {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 2)]
        dim_e: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Search for a broadcaster of two density operators.
    BroadcastCheck {
        #[command(flatten)]
        inputs: InputArgs,
        #[arg(long)]
        anc_dim: Option<usize>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Common invariant blocks and nondisturbing information.
    Blocks {
        #[command(flatten)]
        inputs: InputArgs,
        /// Total-variation threshold for reporting information.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Sample random and engineered pairs and record which admit
    /// nondisturbing information.
    ConjectureProbe {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct PairArgs {
    /// Overlap S = |<a0|a1>| of the two states.
    #[arg(long, allow_hyphen_values = true)]
    pub overlap: Option<f64>,
    /// Half-angle alpha in radians, S = sin 2·alpha.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
}

impl PairArgs {
    pub fn overlap(&self) -> Result<f64, CliError> {
        match (self.overlap, self.alpha) {
            (None, None) => Err(CliError::Invalid(
                "one of --overlap or --alpha is required".into(),
            )),
            (Some(s), None) => Ok(s),
            (s, Some(alpha)) => {
                let from_alpha = qtradeoff::states::alice_pair(alpha)?.overlap();
                match s {
                    Some(s) if (s - from_alpha).abs() > OVERLAP_CONSISTENCY_TOL => {
                        Err(CliError::Invalid(format!(
                            "overlap = {s} disagrees with sin(2·alpha) = {from_alpha}"
                        )))
                    }
                    _ => Ok(from_alpha),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Density-operator JSON for the first state.
    #[arg(long)]
    pub input0: PathBuf,
    /// Density-operator JSON for the second state.
    #[arg(long)]
    pub input1: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct BudgetArgs {
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl BudgetArgs {
    pub fn budget(&self) -> Result<SearchBudget, CliError> {
        let base = SearchBudget::default();
        let b = SearchBudget {
            restarts: self.restarts.unwrap_or(base.restarts),
            iterations: self.iterations.unwrap_or(base.iterations),
            tolerance: self.tolerance.unwrap_or(base.tolerance),
            seed: self.seed,
        };
        b.validate()?;
        Ok(b)
    }
}
