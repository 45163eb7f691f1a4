use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "cdising",
    version,
    about = "Counterdiabatic driving of the transverse-field Ising chain"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the couplings h_m(g) for m = 1 ..= N/2.
    Coeffs(CoeffsArgs),
    /// Final ground-state probability against the truncation range M.
    SweepTruncation(CommonArgs),
    /// Final ground-state probability against chain length and ramp time.
    SweepSize(CommonArgs),
    /// Instantaneous ground-state probability along one ramp.
    Trace(TraceArgs),
    /// Check the summation identities, closed forms and the spin oracle.
    Verify(VerifyArgs),
    /// Compare the fermionic and dense spin-space probabilities.
    Oracle(CommonArgs),
    /// One ramp, one summary row.
    Evolve(CommonArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Coeffs(_) => "coeffs",
            Command::SweepTruncation(_) => "sweep-truncation",
            Command::SweepSize(_) => "sweep-size",
            Command::Trace(_) => "trace",
            Command::Verify(_) => "verify",
            Command::Oracle(_) => "oracle",
            Command::Evolve(_) => "evolve",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CouplingKind {
    Exact,
    Thermo,
    Truncated,
    Direct,
}

impl std::str::FromStr for CouplingKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Chain length, or a comma-separated list for sweeps.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Initial transverse field.
    #[arg(long)]
    pub g0: Option<f64>,
    /// Final transverse field.
    #[arg(long)]
    pub gf: Option<f64>,
    /// Ramp duration, or a comma-separated list for sweeps.
    #[arg(long = "t-final", value_delimiter = ',')]
    pub t_final: Vec<f64>,
    #[arg(long, value_enum)]
    pub coupling: Option<CouplingKind>,
    /// Largest interaction range kept by the truncated coupling.
    #[arg(long = "m-max")]
    pub m_max: Option<usize>,
    #[arg(long = "rel-tol")]
    pub rel_tol: Option<f64>,
    #[arg(long = "abs-tol")]
    pub abs_tol: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key = value file with defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads; all available cores when absent.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct CoeffsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Transverse field at which the couplings are evaluated.
    #[arg(long)]
    pub g: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Number of evenly spaced samples, both endpoints included.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated field grid replacing the default 25 points.
    #[arg(long = "g-grid", value_delimiter = ',')]
    pub g_grid: Vec<f64>,
    /// Corrupt one coupling to confirm that the harness fails.
    #[arg(long = "inject-fault")]
    pub inject_fault: bool,
}
