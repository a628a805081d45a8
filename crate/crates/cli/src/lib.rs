//! Command-line verification harness.
//!
//! Every command builds a [`report::VerificationReport`]; the binary prints it
//! and maps the verdict to an exit code.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub mod report;
pub mod suites;

use report::VerificationReport;

pub const DEFAULT_ROTATIONS: usize = 100;
pub const DEFAULT_ROUNDS: u64 = 1_000_000;
pub const DEFAULT_CHANNEL_SAMPLES: u64 = 1000;
pub const DEFAULT_GRID: u64 = 200;
pub const DEFAULT_REFINE_TOL: f64 = 1e-12;
pub const DEFAULT_STARTS: u64 = 64;
pub const PROTOCOL_SHOTS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "alignfree",
    version,
    about = "Verify alignment-free nonlocality claims numerically"
)]
pub struct Cli {
    /// Root seed; every suite draws from its own named sub-stream.
    #[arg(long, global = true, env = "ALIGNFREE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact correlation values, unrotated and under random setup rotations.
    VerifyCorrelations {
        #[arg(long, default_value_t = DEFAULT_ROTATIONS)]
        rotations: usize,
        /// Overrides the default tolerances (1e-10 unrotated, 1e-9 rotated).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Monte-Carlo experiment with single-qubit measurements, plus the
    /// outcome-word statistics of the first protocol.
    Simulate {
        #[arg(long, default_value_t = DEFAULT_ROUNDS, value_parser = clap::value_parser!(u64).range(1..))]
        rounds: u64,
        #[arg(long)]
        rotate_each_round: bool,
        /// Writes the raw counts as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduced-state spectrum and immunity to collective unitaries.
    VerifyDecoherence {
        #[arg(long, default_value_t = DEFAULT_CHANNEL_SAMPLES, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
    },
    /// Scan for pairs separable by a fixed product basis.
    VerifyDistinguish {
        /// Grid points per angle (at least 100).
        #[arg(long, default_value_t = DEFAULT_GRID, value_parser = clap::value_parser!(u64).range(100..))]
        grid: u64,
        /// Step tolerance of the local refinement.
        #[arg(long, default_value_t = DEFAULT_REFINE_TOL)]
        refine: f64,
    },
    /// Optimal coincidence probability.
    OptimizeHardy {
        /// Also optimize over both wings' second observable.
        #[arg(long)]
        free_angles: bool,
        #[arg(long, default_value_t = DEFAULT_STARTS, value_parser = clap::value_parser!(u64).range(1..))]
        starts: u64,
    },
    /// Exact local-hidden-variable feasibility check.
    LhvCheck,
    /// Every suite with default settings.
    ReportAll,
}

#[derive(Debug)]
pub enum Failure {
    Core(alignfree_core::Error),
    Io(std::io::Error),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "I/O error: {e}"),
        }
    }
}

impl From<alignfree_core::Error> for Failure {
    fn from(e: alignfree_core::Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

/// Runs one command and assembles its report.
pub fn run(cli: &Cli) -> Result<VerificationReport, Failure> {
    let seed = cli.seed;
    let mut rep = VerificationReport::new(seed);
    match &cli.command {
        Command::VerifyCorrelations { rotations, tol } => {
            rep.record_samples("correlation_rotations", *rotations as u64);
            rep.add(suites::correlations(*rotations, seed, *tol)?);
        }
        Command::Simulate {
            rounds,
            rotate_each_round,
            out,
        } => {
            let (sec, record) = suites::experiment(*rounds, seed, *rotate_each_round)?;
            if let Some(path) = out {
                let mut json = serde_json::to_string_pretty(&record).expect("record serializes");
                json.push('\n');
                std::fs::write(path, json)?;
            }
            rep.record_samples("experiment_rounds", *rounds);
            rep.add(sec);
            rep.record_samples("protocol_shots", PROTOCOL_SHOTS as u64);
            rep.add(suites::protocol_split(PROTOCOL_SHOTS, seed)?);
        }
        Command::VerifyDecoherence { samples } => {
            rep.record_samples("channel_samples", *samples);
            rep.add(suites::decoherence(*samples as usize, seed)?);
        }
        Command::VerifyDistinguish { grid, refine } => {
            let (sec, points) = suites::distinguish(*grid as usize, *refine)?;
            rep.record_samples("scan_resolution", *grid);
            rep.record_samples("scan_grid_points", points as u64);
            rep.add(sec);
        }
        Command::OptimizeHardy { free_angles, starts } => {
            rep.record_samples("optimizer_starts", *starts);
            rep.add(suites::hardy(*free_angles, *starts as usize, seed)?);
        }
        Command::LhvCheck => rep.add(suites::lhv()?),
        Command::ReportAll => {
            rep.record_samples("correlation_rotations", DEFAULT_ROTATIONS as u64);
            rep.add(suites::correlations(DEFAULT_ROTATIONS, seed, None)?);
            rep.record_samples("experiment_rounds", DEFAULT_ROUNDS);
            rep.add(suites::experiment(DEFAULT_ROUNDS, seed, false)?.0);
            rep.record_samples("protocol_shots", PROTOCOL_SHOTS as u64);
            rep.add(suites::protocol_split(PROTOCOL_SHOTS, seed)?);
            rep.record_samples("channel_samples", DEFAULT_CHANNEL_SAMPLES);
            rep.add(suites::decoherence(DEFAULT_CHANNEL_SAMPLES as usize, seed)?);
            let (sec, points) = suites::distinguish(DEFAULT_GRID as usize, DEFAULT_REFINE_TOL)?;
            rep.record_samples("scan_resolution", DEFAULT_GRID);
            rep.record_samples("scan_grid_points", points as u64);
            rep.add(sec);
            rep.record_samples("optimizer_starts", DEFAULT_STARTS);
            rep.add(suites::hardy(true, DEFAULT_STARTS as usize, seed)?);
            rep.add(suites::lhv()?);
        }
    }
    Ok(rep)
}

pub fn render(rep: &VerificationReport, format: Format) -> String {
    match format {
        Format::Json => rep.to_json(),
        Format::Text => rep.to_text(),
    }
}
