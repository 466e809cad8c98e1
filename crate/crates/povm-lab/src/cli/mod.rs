//! Reproducible command-line front end.
//!
//! Verbs: `sample-haar`, `evolve`, `equivalence`, `phase-space`,
//! `transition`, `verify-protocols`. Every option can come from flags or
//! from a `--config` key-value file, with flags winning. All outputs
//! carry a provenance header (tool version, config hash, seed) and are
//! byte-identical for a fixed config and seed.
//!
//! Exit codes: 0 success, 2 config error, 3 numerical-guard violation.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::Error;
pub use config::{Provenance, RunConfig, StateSpec};

#[derive(Debug, Parser)]
#[command(
    name = "povm-lab",
    version,
    about = "Coherent-state POVM laboratory: channels, phase space, and measurement circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw Haar-distributed coherent-state angles and write them as CSV.
    SampleHaar(CommonArgs),
    /// Evolve a state through POVM rounds; write states and distances as JSON.
    Evolve(CommonArgs),
    /// Check the discrete-continuous equivalence; optional RK cross-check.
    Equivalence(CommonArgs),
    /// Export quasi-probability grids per round (one CSV each).
    PhaseSpace(CommonArgs),
    /// Export the single-shot classification table as CSV.
    Transition(CommonArgs),
    /// Cross-validate direct and swap-test protocols over sampled outcomes.
    VerifyProtocols(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Key-value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// System dimension N (for `transition`: the largest N in the table).
    #[arg(long)]
    dim: Option<usize>,
    /// Phase-space parameter s.
    #[arg(long, allow_negative_numbers = true)]
    s: Option<f64>,
    /// Decoherence rate.
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Number of POVM rounds.
    #[arg(long)]
    rounds: Option<u32>,
    /// RNG seed; required by commands that sample (never defaulted).
    #[arg(long)]
    seed: Option<u64>,
    /// Sample count (Haar draws / protocol outcomes).
    #[arg(long)]
    samples: Option<usize>,
    /// Measurement shots per outcome (0 = exact only).
    #[arg(long)]
    shots: Option<usize>,
    /// Grid resolution per axis.
    #[arg(long)]
    resolution: Option<usize>,
    /// Initial state: ground | mixed | min-negativity | path to JSON.
    #[arg(long)]
    state: Option<String>,
    /// Output file (or directory for `phase-space`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cross-check the closed form against RK integration (`equivalence`).
    #[arg(long)]
    rk_check: Option<bool>,
    /// First s value of the transition grid.
    #[arg(long, allow_negative_numbers = true)]
    s_start: Option<f64>,
    /// Last s value of the transition grid.
    #[arg(long, allow_negative_numbers = true)]
    s_stop: Option<f64>,
    /// Step of the transition grid.
    #[arg(long, allow_negative_numbers = true)]
    s_step: Option<f64>,
}

impl CommonArgs {
    /// defaults < config file < flags.
    fn resolve(self) -> crate::Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.dim {
            config.dim = v;
        }
        if let Some(v) = self.s {
            config.s = v;
        }
        if let Some(v) = self.gamma {
            config.gamma = v;
        }
        if let Some(v) = self.rounds {
            config.rounds = v;
        }
        if let Some(v) = self.seed {
            config.seed = Some(v);
        }
        if let Some(v) = self.samples {
            config.samples = v;
        }
        if let Some(v) = self.shots {
            config.shots = v;
        }
        if let Some(v) = self.resolution {
            config.resolution = v;
        }
        if let Some(v) = self.state {
            config.state = StateSpec::parse(&v);
        }
        if let Some(v) = self.out {
            config.out = Some(v);
        }
        if let Some(v) = self.rk_check {
            config.rk_check = v;
        }
        if let Some(v) = self.s_start {
            config.s_start = v;
        }
        if let Some(v) = self.s_stop {
            config.s_stop = v;
        }
        if let Some(v) = self.s_step {
            config.s_step = v;
        }
        config.validate()?;
        Ok(config)
    }
}

/// Exit code for an error: config problems are 2, numerical guards 3,
/// anything unexpected 1.
fn exit_code(error: &Error) -> i32 {
    match error {
        Error::NumericalGuard(_) => 3,
        Error::Config(_)
        | Error::InvalidDimension(_)
        | Error::InvalidArgument(_)
        | Error::InvalidAngles(_)
        | Error::InvalidState(_)
        | Error::InvalidSlice(_)
        | Error::TooFewSamples { .. }
        | Error::TooFewSteps { .. }
        | Error::MemoryGuard(_, _)
        | Error::Io(_)
        | Error::Json(_) => 2,
        _ => 1,
    }
}

/// Runs the CLI against explicit arguments; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            // clap reports usage problems with exit code 2; --help and
            // --version land here as successful prints.
            let _ = err.print();
            return if err.use_stderr() { 2 } else { 0 };
        }
    };

    let outcome = match cli.command {
        Command::SampleHaar(args) => args.resolve().and_then(|c| commands::cmd_sample_haar(&c)),
        Command::Evolve(args) => args.resolve().and_then(|c| commands::cmd_evolve(&c)),
        Command::Equivalence(args) => args.resolve().and_then(|c| commands::cmd_equivalence(&c)),
        Command::PhaseSpace(args) => args.resolve().and_then(|c| commands::cmd_phase_space(&c)),
        Command::Transition(args) => args.resolve().and_then(|c| commands::cmd_transition(&c)),
        Command::VerifyProtocols(args) => {
            args.resolve().and_then(|c| commands::cmd_verify_protocols(&c))
        }
    };

    match outcome {
        Ok(()) => 0,
        Err(error) => {
            eprintln!("error: {error}");
            exit_code(&error)
        }
    }
}

/// Entry point for the binary.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}
