//! `fevis` command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical/runtime failure,
//! 3 I/O failure.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "fevis",
    version,
    about = "Finite-element field construction, sampling and rendering"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// key=value file supplying defaults for subcommand flags; flags on the
    /// command line take precedence
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads for rendering and sampling (1 gives serial execution)
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Interpolate an expression into a Lagrange space and save the field
    Interp(InterpArgs),
    /// Sample a 2D field on a pixel grid
    Sample(SampleArgs),
    /// Maximum intensity projection of a 3D field
    Mip(MipArgs),
    /// Solve -lap(u) + u = f for the cos(2 pi x) cos(2 pi y) manufactured solution
    Helmholtz(HelmholtzArgs),
    /// Pixelwise absolute difference of two NRRD images
    Diff(DiffArgs),
    /// Re-express a field in the linear (P1) space on the same mesh
    Degrade(DegradeArgs),
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct MeshArgs {
    /// Lattice mesh: square:NxM or box:NxMxK
    #[arg(long, value_name = "KIND:COUNTS")]
    pub mesh: String,

    /// Domain side lengths, comma separated [default: 1 per axis]
    #[arg(long, value_name = "L,L[,L]")]
    pub lengths: Option<String>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct InterpArgs {
    #[command(flatten)]
    pub mesh: MeshArgs,

    /// Polynomial degree of the Lagrange element
    #[arg(long, default_value_t = 1)]
    pub degree: usize,

    /// Element family (P or CG)
    #[arg(long, default_value = "P")]
    pub family: String,

    /// Expression in x[0], x[1], x[2]
    #[arg(long)]
    pub expr: String,

    /// Output field container
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Nrrd,
    Pgm,
    Both,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct ImageOut {
    /// Output image path (with --format both, the extension is replaced by .nrrd and .pgm)
    #[arg(long)]
    pub out: PathBuf,

    /// Image format
    #[arg(long, value_enum, default_value_t = Format::Nrrd)]
    pub format: Format,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SampleArgs {
    /// Field container written by `interp`, `helmholtz` or `degrade`
    #[arg(long)]
    pub field: PathBuf,

    /// Pixels per side
    #[arg(long, default_value_t = 200)]
    pub res: usize,

    /// Sampled rectangle xmin,ymin,xmax,ymax [default: mesh bounding box]
    #[arg(long, value_name = "X0,Y0,X1,Y1")]
    pub window: Option<String>,

    #[command(flatten)]
    pub image: ImageOut,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct MipArgs {
    /// Field container holding a 3D field
    #[arg(long)]
    pub field: PathBuf,

    /// Render this expression directly over the field's bounding box instead
    /// of the stored coefficients
    #[arg(long, value_name = "EXPR")]
    pub analytic: Option<String>,

    /// Camera position [default: above the domain centre on the z axis]
    #[arg(long, value_name = "X,Y,Z")]
    pub eye: Option<String>,

    /// Point the camera aims at [default: domain centre]
    #[arg(long, value_name = "X,Y,Z")]
    pub lookat: Option<String>,

    /// Camera up vector
    #[arg(long, value_name = "X,Y,Z", default_value = "0,1,0")]
    pub up: String,

    /// Vertical field of view in degrees
    #[arg(long, default_value_t = 30.0)]
    pub fov: f64,

    /// Pixels per side
    #[arg(long, default_value_t = 200)]
    pub res: usize,

    /// Ray-march step length
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,

    /// Ray start distance from the eye [default: 0]
    #[arg(long)]
    pub near: Option<f64>,

    /// Ray end distance from the eye [default: twice the eye-lookat distance]
    #[arg(long)]
    pub far: Option<f64>,

    /// Only sample within this radius of the look-at point
    #[arg(long, value_name = "RADIUS")]
    pub clip: Option<f64>,

    /// Value of rays that see nothing larger
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub background: f64,

    #[command(flatten)]
    pub image: ImageOut,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct HelmholtzArgs {
    /// Subdivisions per side of the unit square
    #[arg(long, default_value_t = 10)]
    pub n: usize,

    /// Polynomial degree
    #[arg(long, default_value_t = 1)]
    pub degree: usize,

    /// Write the solution field here
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Write a sampled image of the solution here
    #[arg(long)]
    pub image: Option<PathBuf>,

    /// Pixels per side of the sampled image
    #[arg(long, default_value_t = 100)]
    pub res: usize,

    /// Image format
    #[arg(long, value_enum, default_value_t = Format::Nrrd)]
    pub format: Format,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct DiffArgs {
    /// First NRRD image
    #[arg(long)]
    pub a: PathBuf,

    /// Second NRRD image
    #[arg(long)]
    pub b: PathBuf,

    /// Write |a - b| here
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Image format for --out
    #[arg(long, value_enum, default_value_t = Format::Nrrd)]
    pub format: Format,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct DegradeArgs {
    /// Field container to degrade
    #[arg(long)]
    pub field: PathBuf,

    /// interpolate (vertex values) or l2project
    #[arg(long, default_value = "interpolate")]
    pub mode: String,

    /// Output field container
    #[arg(long)]
    pub out: PathBuf,
}

fn run() -> Result<(), CliError> {
    let argv = config::merge_config(std::env::args_os().collect())?;
    let cli = Cli::try_parse_from(argv)?;
    let threads = cli.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    pool.install(|| commands::dispatch(cli.command))
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            ExitCode::from(if e.use_stderr() { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("fevis: {e}");
            ExitCode::from(e.code())
        }
    }
}
