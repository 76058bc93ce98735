use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod output;
mod ring;
mod sweep;
mod verify;

/// Exit status classes: 1 is a failed mathematical check, 2 bad input, 3 a refused precondition.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("check failed: {0}")]
    Check(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Refused(_) => 3,
        }
    }
}

impl From<hrlab::Error> for CliError {
    fn from(e: hrlab::Error) -> Self {
        use hrlab::Error as E;
        match e {
            E::Refused(m) => CliError::Refused(m),
            E::PairNotVerified(_) | E::CertificateInconsistency(_) | E::Num(_) => CliError::Check(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// Whether the command's check passed; errors are reported separately.
pub struct Outcome {
    pub pass: bool,
}

#[derive(Parser)]
#[command(
    name = "hrlab",
    version,
    about = "Hodge-Riemann pairs: verification runs, inequality sweeps and cohomology rings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify a pair (ν, ω): random, from form files, or inside a ring.
    Verify(verify::VerifyArgs),
    /// Seeded sweeps probing the local comparison inequalities.
    #[command(subcommand)]
    Sweep(SweepCommand),
    /// Build, validate and analyse cohomology rings.
    #[command(subcommand)]
    Ring(ring::RingCommand),
}

#[derive(Subcommand)]
enum SweepCommand {
    /// sup |να| / |α|_(ν,ω) against the comparability constant.
    Local1(SweepArgs),
    /// Kernel sweep: ρ(ε) for α with να = 0 under a perturbed pullback.
    Local2(SweepArgs),
    /// Metric equivalence after replacing ω_i by ω.
    Eliminate(SweepArgs),
    /// Triangle inequality for the metrics of ω_1 + ω_2 (r = 1).
    Triangle(SweepArgs),
}

#[derive(Args, Clone)]
pub struct SweepArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long, default_value_t = 0)]
    pub s: usize,
    /// Target dimension of the linear map (kernel sweep).
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Bound on λ_max/λ_min of random positive forms.
    #[arg(long, default_value_t = 10.0)]
    pub conditioning: f64,
    /// Comma-separated, strictly decreasing ε values (kernel sweep).
    #[arg(long, value_delimiter = ',')]
    pub eps_grid: Option<Vec<f64>>,
    /// JSON report path; the CSV goes next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Verify(args) => verify::run(&args),
        Command::Sweep(cmd) => {
            let (kind, args) = match cmd {
                SweepCommand::Local1(a) => (hrlab::ineqlab::SweepKind::Local1, a),
                SweepCommand::Local2(a) => (hrlab::ineqlab::SweepKind::Local2, a),
                SweepCommand::Eliminate(a) => (hrlab::ineqlab::SweepKind::Eliminate, a),
                SweepCommand::Triangle(a) => (hrlab::ineqlab::SweepKind::Triangle, a),
            };
            sweep::run(kind, &args)
        }
        Command::Ring(cmd) => ring::run(cmd),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome { pass: true }) => ExitCode::SUCCESS,
        Ok(Outcome { pass: false }) => ExitCode::from(1),
        Err(e) => {
            eprintln!("hrlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_errors_map_to_exit_classes() {
        let refused: CliError = hrlab::Error::Refused("x".into()).into();
        let parse: CliError = hrlab::Error::Parse("x".into()).into();
        let check: CliError = hrlab::Error::CertificateInconsistency("x".into()).into();
        assert_eq!(refused.exit_code(), 3);
        assert_eq!(parse.exit_code(), 2);
        assert_eq!(check.exit_code(), 1);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
