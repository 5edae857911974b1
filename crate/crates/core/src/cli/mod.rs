//! Command-line front end.
//!
//! Every output starts with the [`RunManifest`] of the run: as a `# ` comment
//! line for CSV, or as the `manifest` member of the JSON document. `replay`
//! re-executes a manifest and reproduces the output byte for byte, since all
//! Monte Carlo commands are pure functions of their seed.

mod commands;
mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::{FadingModel, ProcessKind, QuadratureConfig};
use crate::simulate::TailPolicy;

/// Exit codes of the `hardcore` binary.
pub mod exit {
    pub const OK: i32 = 0;
    /// Output could not be written or a replay differed from its file.
    pub const FAILURE: i32 = 1;
    /// Bad flags or parameters outside a function's domain.
    pub const VALIDATION: i32 = 2;
    /// A numerical routine missed its tolerance.
    pub const TOLERANCE: i32 = 3;
}

#[derive(Debug, Parser)]
#[command(name = "hardcore", version, about = "Mean interference in Matérn hard-core processes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, value_enum, default_value_t = OutputFormat::Csv, global = true)]
    pub format: OutputFormat,

    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Intensity of the retained process.
    Intensity(ModelArgs),
    /// Union area of two disks of radius delta, and their overlap.
    Vunion(VunionArgs),
    /// K function and its derivative on a radius grid.
    Kfun(KfunArgs),
    /// Mean interference at the typical node.
    Interference(InterferenceArgs),
    /// Excess interference ratio against the Poisson process with a hole.
    Eir(EirArgs),
    /// Near-field bounds, the type I approximation and the type II bound.
    Bounds(BoundsArgs),
    /// One realization as x,y,mark rows.
    Sample(SampleArgs),
    /// Normalized mean interference curves over a range of delta.
    Figure1(Figure1Args),
    /// Re-run the command recorded in an output file.
    #[serde(skip)]
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Intensity(_) => "intensity",
            Command::Vunion(_) => "vunion",
            Command::Kfun(_) => "kfun",
            Command::Interference(_) => "interference",
            Command::Eir(_) => "eir",
            Command::Bounds(_) => "bounds",
            Command::Sample(_) => "sample",
            Command::Figure1(_) => "figure1",
            Command::Replay(_) => "replay",
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Command::Kfun(a) => a.mc.replicates.map(|_| a.mc.seed),
            Command::Interference(a) => a.mc.replicates.map(|_| a.mc.seed),
            Command::Sample(a) => Some(a.seed),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessArg {
    Poisson,
    Matern1,
    Matern2,
}

impl From<ProcessArg> for ProcessKind {
    fn from(p: ProcessArg) -> Self {
        match p {
            ProcessArg::Poisson => ProcessKind::PoissonHole,
            ProcessArg::Matern1 => ProcessKind::MaternI,
            ProcessArg::Matern2 => ProcessKind::MaternII,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ModelArgs {
    /// Intensity of the parent Poisson process.
    #[arg(long, default_value_t = 1.0)]
    pub lambda_p: f64,
    /// Hard-core distance.
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = ProcessArg::Matern1)]
    pub process: ProcessArg,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PathLossArgs {
    /// Path loss exponent, g(r) = max(r0, r)^-alpha.
    #[arg(long, default_value_t = 3.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub r0: f64,
}

/// Explicit radii, or an evenly spaced grid.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GridArgs {
    /// Comma-separated radii; overrides the grid flags.
    #[arg(long = "r", value_delimiter = ',', num_args = 1..)]
    pub radii: Vec<f64>,
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 21)]
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct QuadArgs {
    /// Relative tolerance of adaptive quadrature.
    #[arg(long, default_value_t = 1e-9)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_subdivisions: usize,
}

impl QuadArgs {
    pub(crate) fn config(&self) -> crate::Result<QuadratureConfig> {
        let cfg = QuadratureConfig {
            rel_tol: self.rel_tol,
            max_subdivisions: self.max_subdivisions,
            ..QuadratureConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FadingArg {
    None,
    Exponential,
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailArg {
    Analytic,
    Truncate,
}

impl From<TailArg> for TailPolicy {
    fn from(t: TailArg) -> Self {
        match t {
            TailArg::Analytic => TailPolicy::AnalyticTail,
            TailArg::Truncate => TailPolicy::TruncateOnly,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct MonteCarloArgs {
    /// Run this many Palm replicates in addition to the analytic values.
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Simulation window radius (default max(10 delta, 20/sqrt(lambda_p))).
    #[arg(long)]
    pub window_radius: Option<f64>,
    #[arg(long, value_enum, default_value_t = FadingArg::None)]
    pub fading: FadingArg,
    /// Shape of unit-mean gamma fading.
    #[arg(long, default_value_t = 2.0)]
    pub gamma_shape: f64,
    #[arg(long, value_enum, default_value_t = TailArg::Analytic)]
    pub tail: TailArg,
}

impl MonteCarloArgs {
    fn fading(&self) -> crate::Result<FadingModel> {
        match self.fading {
            FadingArg::None => Ok(FadingModel::None),
            FadingArg::Exponential => Ok(FadingModel::UnitMeanExponential),
            FadingArg::Gamma => FadingModel::gamma(self.gamma_shape),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct VunionArgs {
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct KfunArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub mc: MonteCarloArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct InterferenceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub pathloss: PathLossArgs,
    #[command(flatten)]
    pub mc: MonteCarloArgs,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EirMethodArg {
    Quadrature,
    #[value(alias = "upper_bound")]
    UpperBound,
    Approximation,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EirArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub pathloss: PathLossArgs,
    #[arg(long, value_enum, default_value_t = EirMethodArg::Quadrature)]
    pub method: EirMethodArg,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 2.0)]
    pub lambda_p: f64,
    #[arg(long, default_value_t = 2.0)]
    pub delta: f64,
    #[command(flatten)]
    pub pathloss: PathLossArgs,
    /// Only the type II constants.
    #[arg(long)]
    pub type2: bool,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SampleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Radius of the observation disk (default max(10 delta, 20/sqrt(lambda_p))).
    #[arg(long)]
    pub window_radius: Option<f64>,
    /// Sample the Palm distribution around a point of the process at the
    /// origin (the origin itself is not listed).
    #[arg(long)]
    pub palm: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct Figure1Args {
    #[arg(long, default_value_t = 2.0)]
    pub lambda_p: f64,
    #[command(flatten)]
    pub pathloss: PathLossArgs,
    #[arg(long, default_value_t = 0.1)]
    pub delta_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub delta_max: f64,
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ReplayArgs {
    /// File produced by an earlier run.
    pub file: PathBuf,
    /// Compare against the file instead of printing; exit 1 on any difference.
    #[arg(long)]
    pub check: bool,
}

/// Provenance record written at the top of every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub format: OutputFormat,
    pub parameters: Command,
    pub seed: Option<u64>,
    pub version: String,
    /// Wall-clock seconds. Left out of output files so that they reproduce
    /// exactly; reported on stderr instead.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_s: Option<f64>,
}

impl RunManifest {
    pub fn new(command: &Command, format: OutputFormat) -> Self {
        Self {
            command: command.name().to_owned(),
            format,
            parameters: command.clone(),
            seed: command.seed(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            duration_s: None,
        }
    }

    /// Reads the manifest at the top of a CSV or JSON output.
    pub fn parse_output(text: &str) -> crate::Result<Self> {
        let bad = |e: serde_json::Error| Error::Input(format!("unreadable run manifest: {e}"));
        if let Some(line) = text.lines().next().and_then(|l| l.strip_prefix("# ")) {
            return serde_json::from_str(line).map_err(bad);
        }
        #[derive(Deserialize)]
        struct Wrapper {
            manifest: RunManifest,
        }
        Ok(serde_json::from_str::<Wrapper>(text).map_err(bad)?.manifest)
    }
}

/// Full text of the output for `command`, manifest included.
pub fn render(command: &Command, format: OutputFormat) -> crate::Result<String> {
    let manifest = RunManifest::new(command, format);
    let table = commands::execute(command)?;
    let header = serde_json::to_string(&manifest).expect("manifest serializes");
    Ok(match format {
        OutputFormat::Csv => format!("# {header}\n{}", table.to_csv()),
        OutputFormat::Json => {
            let doc = serde_json::json!({
                "manifest": serde_json::to_value(&manifest).expect("manifest serializes"),
                "rows": table.to_json_rows(),
            });
            format!("{doc}\n")
        }
    })
}

fn error_code(err: &Error) -> i32 {
    match err {
        Error::Tolerance { .. } => exit::TOLERANCE,
        _ => exit::VALIDATION,
    }
}

fn write_output(out: Option<&Path>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

fn replay(args: &ReplayArgs, out: Option<&Path>) -> i32 {
    let text = match std::fs::read_to_string(&args.file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.file.display());
            return exit::VALIDATION;
        }
    };
    let manifest = match RunManifest::parse_output(&text) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return exit::VALIDATION;
        }
    };
    if manifest.version != env!("CARGO_PKG_VERSION") {
        eprintln!(
            "warning: file was written by version {}, replaying with {}",
            manifest.version,
            env!("CARGO_PKG_VERSION")
        );
    }
    let rendered = match render(&manifest.parameters, manifest.format) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return error_code(&e);
        }
    };
    if args.check {
        if rendered == text {
            eprintln!("replay matches {}", args.file.display());
            return exit::OK;
        }
        eprintln!("replay differs from {}", args.file.display());
        return exit::FAILURE;
    }
    match write_output(out, &rendered) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: cannot write output: {e}");
            exit::FAILURE
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::VALIDATION } else { exit::OK };
        }
    };
    if let Command::Replay(r) = &cli.command {
        return replay(r, cli.out.as_deref());
    }
    let start = Instant::now();
    let text = match render(&cli.command, cli.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return error_code(&e);
        }
    };
    if let Err(e) = write_output(cli.out.as_deref(), &text) {
        eprintln!("error: cannot write output: {e}");
        return exit::FAILURE;
    }
    let mut manifest = RunManifest::new(&cli.command, cli.format);
    manifest.duration_s = Some(start.elapsed().as_secs_f64());
    eprintln!("# {}", serde_json::to_string(&manifest).expect("manifest serializes"));
    exit::OK
}
