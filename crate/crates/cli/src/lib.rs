//! Command-line driver: mixed problems on the disc and ellipse, the point
//! vortex, reconstruction of analytic traces and Helmholtz checks.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use convex_utm::Complex64;

pub mod commands;
pub mod config;
pub mod output;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] convex_utm::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_validation() => 2,
            CliError::Core(_) | CliError::Io(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "convex-utm", version, about = "Transform-method solvers on convex domains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mixed Dirichlet/Neumann-type problem on the unit disc.
    #[command(allow_negative_numbers = true)]
    SolveDisc(MixedArgs),
    /// Mixed problem on the ellipse x²/a² + y²/b² = 1.
    #[command(allow_negative_numbers = true)]
    SolveEllipse(EllipseArgs),
    /// Point vortex inside an ellipse.
    #[command(allow_negative_numbers = true)]
    Vortex(VortexArgs),
    /// Reconstruct a polynomial from its boundary trace.
    #[command(allow_negative_numbers = true)]
    Reconstruct(ReconstructArgs),
    /// Verify the Helmholtz transform pair on an exact mode.
    #[command(allow_negative_numbers = true)]
    HelmholtzCheck(HelmholtzArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
    /// Report path; defaults to `<out>.report`.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Flat `key = value` file with flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = 1e-14)]
    pub tol: f64,
}

impl Common {
    pub fn report_path(&self) -> PathBuf {
        self.report.clone().unwrap_or_else(|| {
            let mut p = self.out.clone().into_os_string();
            p.push(".report");
            p.into()
        })
    }
}

#[derive(Debug, Args)]
pub struct MixedArgs {
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    #[arg(long = "N", default_value_t = 16)]
    pub n: usize,
    #[arg(long = "Mr", default_value_t = convex_utm::mixed_bvp::DEFAULT_RINGS)]
    pub rings: usize,
    #[arg(long, default_value_t = convex_utm::mixed_bvp::DEFAULT_THETAS_PER_RING)]
    pub thetas_per_ring: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct EllipseArgs {
    #[arg(long, default_value_t = 2.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    #[command(flatten)]
    pub mixed: MixedArgs,
}

#[derive(Debug, Args)]
pub struct VortexArgs {
    #[arg(long, default_value_t = 2.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    /// Vortex position as `x,y`.
    #[arg(long, value_parser = parse_pair, default_value = "0.3,0.2", allow_hyphen_values = true)]
    pub zeta0: Complex64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long = "N", default_value_t = 16)]
    pub n: usize,
    #[arg(long = "Mr", default_value_t = convex_utm::mixed_bvp::DEFAULT_RINGS)]
    pub rings: usize,
    #[arg(long, default_value_t = convex_utm::mixed_bvp::DEFAULT_THETAS_PER_RING)]
    pub thetas_per_ring: usize,
    /// Lattice size as `NXxNY`.
    #[arg(long, value_parser = parse_grid, default_value = "200x100")]
    pub grid: (usize, usize),
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DomainKind {
    Disc,
    Ellipse,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long, value_enum, default_value_t = DomainKind::Disc)]
    pub domain: DomainKind,
    #[arg(long, default_value_t = 2.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    /// Polynomial coefficients c₀;c₁;… each as `re,im`.
    #[arg(long, value_parser = parse_coeffs, default_value = "1,0;0,1;0.5,0", allow_hyphen_values = true)]
    pub coeffs: Coefficients,
    #[arg(long, value_parser = parse_grid, default_value = "41x21")]
    pub grid: (usize, usize),
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct HelmholtzArgs {
    #[arg(long, value_enum, default_value_t = DomainKind::Disc)]
    pub domain: DomainKind,
    #[arg(long, default_value_t = 1.5)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    /// σ as `re,im`.
    #[arg(long, value_parser = parse_pair, default_value = "0,1", allow_hyphen_values = true)]
    pub sigma: Complex64,
    /// Mode parameter t₀ as `re,im`.
    #[arg(long, value_parser = parse_pair, default_value = "0,1", allow_hyphen_values = true)]
    pub t0: Complex64,
    /// Number of interior probe points.
    #[arg(long, default_value_t = 10)]
    pub points: usize,
    #[command(flatten)]
    pub common: Common,
}

/// Polynomial coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients(pub Vec<Complex64>);

pub fn parse_pair(s: &str) -> Result<Complex64, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected re,im but got `{s}`"))?;
    let re: f64 = x.trim().parse().map_err(|e| format!("{e}"))?;
    let im: f64 = y.trim().parse().map_err(|e| format!("{e}"))?;
    Ok(Complex64::new(re, im))
}

pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (x, y) = s.split_once('x').ok_or_else(|| format!("expected NXxNY but got `{s}`"))?;
    let nx: usize = x.trim().parse().map_err(|e| format!("{e}"))?;
    let ny: usize = y.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((nx, ny))
}

pub fn parse_coeffs(s: &str) -> Result<Coefficients, String> {
    let v = s.split(';').map(parse_pair).collect::<Result<Vec<_>, _>>()?;
    Ok(Coefficients(v))
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match config::expand_args(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cmd = <Cli as clap::CommandFactory>::command().args_override_self(true);
    let cli = match cmd
        .try_get_matches_from(args)
        .and_then(|m| <Cli as clap::FromArgMatches>::from_arg_matches(&m))
    {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match commands::dispatch(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
