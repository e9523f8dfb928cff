use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "finsler",
    version,
    about = "Classify, construct and integrate spherically symmetric Finsler metrics"
)]
pub struct Cli {
    /// Record the wall-clock runtime in the report (makes output nondeterministic).
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep a lattice and classify the metric.
    Classify(ClassifyArgs),
    /// Every tensor and scalar at one point.
    Curvature(CurvatureArgs),
    /// Build and check one of the constructive families.
    #[command(subcommand)]
    Family(FamilyCommand),
    /// Integrate a geodesic and monitor conservation of F.
    Geodesic(GeodesicArgs),
    /// Rerun a worked example and check its expected values.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
#[group(skip)]
pub struct SourceArgs {
    /// Metric function phi(r, s) as an expression.
    #[arg(
        long,
        value_name = "EXPR",
        allow_hyphen_values = true,
        required_unless_present = "builtin",
        conflicts_with = "builtin"
    )]
    pub phi: Option<String>,

    /// Name of a registered metric.
    #[arg(long, value_name = "NAME", required_unless_present = "phi")]
    pub builtin: Option<String>,

    /// Builtin parameter as `name=expr`; may be repeated.
    #[arg(long = "param", value_name = "K=EXPR", conflicts_with = "phi")]
    pub params: Vec<String>,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Write the JSON report here; a summary goes to standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    #[arg(long, value_name = "N")]
    pub dim: usize,

    /// Lattice as `r0,r1,nr,ns`.
    #[arg(long, value_name = "R0,R1,NR,NS")]
    pub grid: Option<String>,

    /// Threshold below which a residual counts as zero.
    #[arg(long, value_name = "T")]
    pub tol: Option<f64>,

    #[command(flatten)]
    pub out: OutArgs,

    /// Also write one CSV row per lattice point.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    /// Point as `r,s,u`.
    #[arg(long, value_name = "R,S,U")]
    pub at: String,

    #[arg(long, value_name = "N")]
    pub dim: usize,

    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Subcommand)]
pub enum FamilyCommand {
    /// Landsberg sprays with c0 and c2 solved from the integrability conditions.
    Landsberg(LandsbergArgs),
    /// Berwald sprays of surfaces.
    SurfaceBerwald(SurfaceArgs),
    /// A two-dimensional spray class with constant c and coefficient c0(r).
    Zhou(ZhouArgs),
}

#[derive(Debug, Args)]
pub struct LandsbergArgs {
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    pub c1: String,

    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    pub c3: String,

    #[arg(long, value_name = "FLOAT", allow_hyphen_values = true)]
    pub c: f64,

    /// Radius interval as `lo,hi`.
    #[arg(long, value_name = "LO,HI")]
    pub interval: String,

    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    pub b0: String,
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    pub b1: String,
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    pub b2: String,
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    pub b3: String,

    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct ZhouArgs {
    #[arg(long, value_name = "FLOAT", allow_hyphen_values = true)]
    pub c: f64,

    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    pub c0: String,

    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    /// Initial position, comma separated.
    #[arg(long, value_name = "CSV", allow_hyphen_values = true)]
    pub x: String,

    /// Initial velocity, comma separated.
    #[arg(long, value_name = "CSV", allow_hyphen_values = true)]
    pub y: String,

    #[arg(long, value_name = "H")]
    pub step: f64,

    #[arg(long, value_name = "N")]
    pub steps: usize,

    #[command(flatten)]
    pub out: OutArgs,

    /// Also write the trajectory as CSV.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Example {
    Example1,
    Example2,
    ZhouDiscrepancy,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub example: Example,

    #[command(flatten)]
    pub out: OutArgs,
}
