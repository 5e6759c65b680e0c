//! Command-line front end: evaluation, boundary reports, inequality fuzzing,
//! directional derivatives and the fixture registry, with JSON in and out.
//!
//! Exit codes: `0` pass, `1` verdict false or violations found, `2` input
//! could not be parsed, `3` a precondition failed.

pub mod commands;
pub mod config;
pub mod input;
pub mod output;

use clap::{Args, Parser, Subcommand};

pub use config::{Format, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "ncjulia",
    version,
    about = "Boundary behaviour of nc Schur-class functions on polynomial polyhedra"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// RunConfig JSON (file path or inline object).
    #[arg(long, global = true)]
    pub config: Option<String>,
    /// Seed for all randomness; overrides the config file.
    #[arg(long, global = true, env = "NCJULIA_SEED")]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

/// Where `δ` and the realization come from. Explicit `--delta` and
/// `--realization` override the fixture's.
#[derive(Debug, Args, Clone, Default)]
pub struct Source {
    /// Built-in fixture, see `ncjulia fixtures`.
    #[arg(long)]
    pub fixture: Option<String>,
    /// Delta JSON (file or inline); entries may be polynomial strings.
    #[arg(long)]
    pub delta: Option<String>,
    /// Realization JSON (file or inline), or `random:<dim_E>:<seed>`.
    #[arg(long)]
    pub realization: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate φ(x), u(x), ‖δ(x)‖ and the model identity residual at a point.
    Eval {
        #[command(flatten)]
        source: Source,
        /// Point as a MatrixTuple (file or inline JSON).
        #[arg(long)]
        point: String,
    },
    /// Boundary report at T: α, W, u_T, range test, Julia inequality, TFAE.
    Bpoint {
        #[command(flatten)]
        source: Source,
        /// Boundary point T.
        #[arg(long = "t")]
        t: String,
        /// Approach along T + tK instead of radially.
        #[arg(long, conflicts_with = "radial")]
        ray: Option<String>,
        /// Approach along (1 − t)T (the default).
        #[arg(long)]
        radial: bool,
        /// Interior points for the Julia inequality.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Monte Carlo sweep of the model identity and the Julia inequality over
    /// random unitary realizations.
    Fuzz {
        #[arg(long = "dim-e", default_value_t = 1)]
        dim_e: usize,
        /// Defaults to the size of the chosen delta.
        #[arg(long = "j")]
        j: Option<usize>,
        /// Built-in delta fixture.
        #[arg(long, default_value = "polydisk:2")]
        delta: String,
        #[arg(long)]
        samples: Option<usize>,
        /// Perturb every colligation off the isometries (negative control).
        #[arg(long)]
        no_isometry: bool,
    },
    /// Directional derivative η(H) at a B-point T.
    Derivative {
        #[command(flatten)]
        source: Source,
        #[arg(long = "t")]
        t: String,
        /// Inward direction H.
        #[arg(long = "h")]
        h: String,
        /// Boundary value W; extracted radially when omitted.
        #[arg(long = "w")]
        w: Option<String>,
        /// Compare against the fixture's closed-form derivative.
        #[arg(long)]
        closed_form: bool,
    },
    /// List built-in fixtures, or print one.
    Fixtures {
        /// Fixture to print as JSON.
        name: Option<String>,
    },
    /// Describe the JSON formats, with examples.
    Schema {
        /// One of: matrix, tuple, polynomial, delta, realization, config.
        name: Option<String>,
    },
}

/// Result of a command: what to print and how to exit.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

pub fn run(cli: Cli) -> Outcome {
    commands::dispatch(cli).unwrap_or_else(|e| Outcome {
        stdout: String::new(),
        stderr: format!("ncjulia: {e}"),
        code: e.exit_code(),
    })
}
