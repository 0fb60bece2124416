mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;

/// Reproducing-kernel transforms on the unit disk.
///
/// Exit codes: 0 success, 1 verification failure, 2 usage error,
/// 3 numerical failure.
#[derive(Debug, Parser)]
#[command(name = "diskharm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Largest evaluation radius (at most 0.99).
    #[arg(long, default_value_t = 0.9)]
    pub r_max: f64,
    /// Number of radii, evenly spaced from 0 to r-max.
    #[arg(long, default_value_t = 40)]
    pub n_r: usize,
    /// Number of angles, evenly spaced over [-pi, pi).
    #[arg(long, default_value_t = 128)]
    pub n_theta: usize,
    /// Absolute error target per accepted quadrature panel.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Re-read every written grid file and check it matches bit for bit.
    #[arg(long)]
    pub reload: bool,
    /// Record the creation time in the metadata sidecar.
    #[arg(long)]
    pub timestamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Poisson,
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    /// (int |f|^p (1 - |z|)^alpha dm)^(1/p)
    Bergman,
    /// unweighted L2 norm over the disk
    HarmonicL2,
    /// largest squared circle mean over the field radii
    HardySup,
    /// L2 norm on the unit circle
    CircleL2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Dirichlet,
    Robin,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Kernel profiles over theta in [-pi, pi], one column per radius.
    Kernel {
        #[arg(long, value_enum, default_value_t = KernelArg::Poisson)]
        kernel: KernelArg,
        /// Radii (for Q: values of s = r rho), each in [0, 0.99].
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.75,0.85")]
        radii: Vec<f64>,
        /// Number of sample angles, endpoints included.
        #[arg(long, default_value_t = 721)]
        n_theta: usize,
        #[arg(long, default_value = "kernel.csv")]
        out: PathBuf,
    },
    /// Compute the field(s) for catalog figure 1 to 15.
    Figure {
        id: u32,
        #[command(flatten)]
        grid: GridArgs,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Q-transform of a disk source.
    Transform {
        #[arg(long)]
        source_file: PathBuf,
        /// Constant in front of the integral; accepts forms like 2/pi.
        #[arg(long, default_value = "1", value_parser = commands::parse_prefactor)]
        prefactor: f64,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value = "transform.csv")]
        out: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Poisson integral of a boundary function.
    Poisson {
        #[arg(long)]
        source_file: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value = "poisson.csv")]
        out: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Harmonic Bergman projection of a disk source.
    Project {
        #[arg(long)]
        source_file: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value = "project.csv")]
        out: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Norm of a source, boundary function, or grid file.
    Norms {
        /// Source or boundary configuration.
        #[arg(long, conflicts_with = "field", required_unless_present = "field")]
        source_file: Option<PathBuf>,
        /// Grid file written by another subcommand.
        #[arg(long)]
        field: Option<PathBuf>,
        /// Defaults to bergman for disk inputs and circle-l2 for boundary functions.
        #[arg(long, value_enum)]
        kind: Option<NormArg>,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        /// Disk norms integrate up to this radius, then add a tail estimate.
        #[arg(long, default_value_t = 0.999)]
        truncation: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// JSON report path; the report is always printed.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suite; exits 1 if any check fails.
    Verify {
        /// Largest evaluation radius used by the checks.
        #[arg(long, default_value_t = 0.9)]
        r_max: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Also check harmonicity of every catalog transform.
        #[arg(long)]
        catalog: bool,
        /// Also check harmonicity of this source's transform.
        #[arg(long)]
        source_file: Option<PathBuf>,
        #[arg(long, default_value = "1", value_parser = commands::parse_prefactor)]
        prefactor: f64,
        /// Stencil spacing for the harmonicity checks.
        #[arg(long, default_value_t = 2.5e-4)]
        h: f64,
        /// Negative control: flip the sign of the kernel in the normalization check.
        #[arg(long, hide = true)]
        sign_flipped: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a conduction solution with the Q-transform of its source.
    Conjecture {
        #[arg(long, conflicts_with = "figure", required_unless_present = "figure")]
        source_file: Option<PathBuf>,
        /// Take the source from a catalog figure instead.
        #[arg(long)]
        figure: Option<u32>,
        #[arg(long, value_enum, default_value_t = BoundaryArg::Dirichlet)]
        boundary: BoundaryArg,
        /// Heat-transfer coefficient for the Robin condition.
        #[arg(long, default_value_t = 1.0)]
        robin_h: f64,
        /// Radial mesh intervals.
        #[arg(long, default_value_t = 64)]
        n_r: usize,
        #[arg(long, default_value_t = 128)]
        n_theta: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Kernel { kernel, radii, n_theta, out } => commands::kernel(kernel, &radii, n_theta, &out),
        Command::Figure { id, grid, out, output } => commands::figure(id, &grid, &out, &output),
        Command::Transform { source_file, prefactor, grid, out, output } => {
            commands::transform(&source_file, prefactor, &grid, &out, &output)
        }
        Command::Poisson { source_file, grid, out, output } => commands::poisson(&source_file, &grid, &out, &output),
        Command::Project { source_file, grid, out, output } => commands::project(&source_file, &grid, &out, &output),
        Command::Norms { source_file, field, kind, p, alpha, truncation, tol, out } => {
            commands::norms(commands::NormsArgs { source_file, field, kind, p, alpha, truncation, tol }, out.as_deref())
        }
        Command::Verify { r_max, tol, catalog, source_file, prefactor, h, sign_flipped, out } => commands::verify(
            commands::VerifyArgs { r_max, tol, catalog, source_file, prefactor, h, sign_flipped },
            out.as_deref(),
        ),
        Command::Conjecture { source_file, figure, boundary, robin_h, n_r, n_theta, tol, out, output } => {
            commands::conjecture(
                commands::ConjectureArgs { source_file, figure, boundary, robin_h, n_r, n_theta, tol },
                &out,
                &output,
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
