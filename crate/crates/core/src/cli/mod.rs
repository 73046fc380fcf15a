//! The `bubblerad` command line: `yield`, `spectrum`, `sweep` and `verify`.
//!
//! Exit codes: 0 success, 1 usage error, 2 bad input data or configuration,
//! 3 numerical failure (including failed verification checks).

pub mod sweep;
pub mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::io::{self, IoError, RunConfig};
use crate::oracles::{self, OBSERVED_PHOTONS_PER_FLASH};
use crate::spectral::{self, QuadratureSettings, SpectralError, YieldResult};
use crate::trajectory::Trajectory;
use crate::unitsys::PhysicalConstants;

pub use sweep::{run_sweep, Scale, SweepParameter, SweepSpec};

/// Environment fallback for `--jobs`.
pub const JOBS_ENV: &str = "BUBBLERAD_JOBS";

/// Warning printed by `yield` for a trajectory moving at or above c.
pub const SUPRALUMINAL_WARNING: &str =
    "WARNING: v_max >= c; this trajectory corresponds to supraluminal velocities and is unphysical";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Usage = 1,
    Data = 2,
    Numerical = 3,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::Usage,
            CliError::Io(_) | CliError::Data(_) => ExitCode::Data,
            CliError::Spectral(e) if e.is_numerical() => ExitCode::Numerical,
            CliError::Spectral(_) => ExitCode::Data,
            CliError::Numerical(_) => ExitCode::Numerical,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bubblerad", version, about = "Photon yield of a collapsing bubble interface")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Run configuration (`key = value` lines).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, env = JOBS_ENV, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: Option<u32>,
    /// Override the relative quadrature tolerance.
    #[arg(long, value_name = "X")]
    pub rel_tol: Option<f64>,
    /// Suppress the human-readable report.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Photon number, radiated energy and velocity bound as JSON.
    Yield {
        #[command(flatten)]
        common: Common,
    },
    /// Spectral density dN/dOmega on a uniform grid as CSV.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Upper end of the grid, rad/s (default 10/gamma, capped at Nyquist for traces).
        #[arg(long)]
        omega_max: Option<f64>,
        /// Grid points, at least 2.
        #[arg(long, default_value_t = 201, value_parser = clap::value_parser!(u32).range(2..))]
        points: u32,
    },
    /// Photon number and bound ratio across one parameter of a Lorentzian pulse.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        parameter: SweepParameter,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, default_value_t = 11, value_parser = clap::value_parser!(u32).range(2..))]
        points: u32,
        #[arg(long, value_enum, default_value_t = Scale::Linear)]
        scale: Scale,
    },
    /// Run the self-contained oracle suite; exit 3 if any check fails.
    Verify {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Yield { common }
            | Command::Spectrum { common, .. }
            | Command::Sweep { common, .. }
            | Command::Verify { common } => common,
        }
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    ExitCode::Success as i32
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    ExitCode::Usage as i32
                }
            };
        }
    };
    match execute(&cli.command, stdout, stderr) {
        Ok(code) => code as i32,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code() as i32
        }
    }
}

fn execute(command: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<ExitCode, CliError> {
    let common = command.common();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = common.jobs {
        pool = pool.num_threads(jobs as usize);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))?;
    let pool = &pool;
    match command {
        Command::Yield { common } => cmd_yield(common, pool, stdout, stderr),
        Command::Spectrum {
            common,
            omega_max,
            points,
        } => cmd_spectrum(common, pool, *omega_max, *points as usize, stdout, stderr),
        Command::Sweep {
            common,
            parameter,
            from,
            to,
            points,
            scale,
        } => {
            let spec = SweepSpec {
                parameter: *parameter,
                from: *from,
                to: *to,
                points: *points as usize,
                scale: *scale,
            };
            cmd_sweep(common, pool, &spec, stdout, stderr)
        }
        Command::Verify { common } => cmd_verify(common, pool, stdout),
    }
}

/// Everything a config-driven command needs.
pub struct Loaded {
    pub config: RunConfig,
    pub trajectory: Trajectory,
    pub constants: PhysicalConstants,
    pub settings: QuadratureSettings,
}

/// Read the config (relative trace paths resolve against its directory)
/// and apply the `--rel-tol` override.
pub fn load(config_path: &Path, rel_tol: Option<f64>) -> Result<Loaded, CliError> {
    let config = io::read_config(config_path)?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let trajectory = config.trajectory(base)?;
    let constants = PhysicalConstants::with_alpha(config.alpha).map_err(|e| CliError::Data(e.to_string()))?;
    let mut settings = config.quadrature;
    if let Some(r) = rel_tol {
        settings.rel_tol = r;
    }
    settings.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(Loaded {
        config,
        trajectory,
        constants,
        settings,
    })
}

fn require_config(common: &Common) -> Result<Loaded, CliError> {
    let Some(path) = &common.config else {
        return Err(CliError::Usage("--config is required".into()));
    };
    load(path, common.rel_tol)
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| {
            CliError::Io(IoError::Write {
                path: path.to_path_buf(),
                source,
            })
        }),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Data(format!("cannot write to stdout: {e}"))),
    }
}

/// Human-readable report for one evaluation; fixed wording.
pub fn yield_report(result: &YieldResult, c: f64) -> String {
    let mut lines = vec![
        format!(
            "photon number N = {:.6e} (error estimate {:.1e})",
            result.photon_number, result.quadrature_error_estimate
        ),
        format!("radiated energy = {:.6e} J", result.radiated_energy),
        format!(
            "maximal surface velocity = {:.6e} m/s ({:.6e} c), beta = {:.6e}",
            result.v_max,
            result.v_max / c,
            result.beta_effective
        ),
        format!("velocity bound 0.1 (v_max/c)^4 = {:.6e}", result.bound_value),
    ];
    if result.supraluminal {
        lines.push(SUPRALUMINAL_WARNING.to_string());
    } else {
        let gap = oracles::observed_gap(result.photon_number, OBSERVED_PHOTONS_PER_FLASH)
            .unwrap_or(f64::INFINITY);
        lines.push(format!(
            "verdict: subluminal motion, N {} 1 photon; deficit against {OBSERVED_PHOTONS_PER_FLASH:.0e} observed photons per flash = {gap:.3e}",
            if result.photon_number < 1.0 { "<" } else { ">=" }
        ));
    }
    lines.join("\n") + "\n"
}

fn cmd_yield(
    common: &Common,
    pool: &rayon::ThreadPool,
    stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<ExitCode, CliError> {
    let run = require_config(common)?;
    let result = pool.install(|| spectral::evaluate(&run.trajectory, &run.constants, &run.settings))?;
    emit(&io::render_result_json(&result), common.out.as_deref(), stdout)?;
    let report = yield_report(&result, run.constants.c);
    if !common.quiet {
        let _ = stderr.write_all(report.as_bytes());
    } else if result.supraluminal {
        let _ = writeln!(stderr, "{SUPRALUMINAL_WARNING}");
    }
    Ok(ExitCode::Success)
}

fn cmd_spectrum(
    common: &Common,
    pool: &rayon::ThreadPool,
    omega_max: Option<f64>,
    points: usize,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<ExitCode, CliError> {
    let run = require_config(common)?;
    let omega_max = match omega_max {
        Some(w) if w.is_finite() && w > 0.0 => w,
        Some(w) => return Err(CliError::Usage(format!("--omega-max must be positive, got {w}"))),
        None => default_omega_max(&run.trajectory),
    };
    let model = spectral::SpectralModel::new(&run.trajectory, &run.settings)?;
    let s = pool.install(|| model.spectrum_table(omega_max, points, &run.constants))?;
    emit(&io::render_spectrum_csv(&s), common.out.as_deref(), stdout)?;
    if !common.quiet {
        let summary = format!(
            "peak Omega = {:.6e} rad/s\nmean Omega = {:.6e} rad/s\nphotons in band = {:.6e}\n",
            s.peak_omega, s.mean_omega, s.total
        );
        let sink: &mut dyn Write = if common.out.is_some() { stdout } else { stderr };
        let _ = sink.write_all(summary.as_bytes());
    }
    Ok(ExitCode::Success)
}

/// Ten inverse collapse times, or the Nyquist frequency of a coarser trace.
pub fn default_omega_max(traj: &Trajectory) -> f64 {
    let w = 10.0 / traj.time_scale();
    match traj {
        Trajectory::Tabulated(t) => {
            let gap = t
                .samples()
                .windows(2)
                .map(|p| p[1].0 - p[0].0)
                .fold(0.0, f64::max);
            w.min(std::f64::consts::PI / gap)
        }
        Trajectory::Lorentzian(_) => w,
    }
}

fn cmd_sweep(
    common: &Common,
    pool: &rayon::ThreadPool,
    spec: &SweepSpec,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<ExitCode, CliError> {
    spec.validate().map_err(CliError::Usage)?;
    let run = require_config(common)?;
    let Trajectory::Lorentzian(base) = &run.trajectory else {
        return Err(CliError::Data(
            "sweeps need a config with model = lorentzian".into(),
        ));
    };
    let rows = pool.install(|| run_sweep(spec, base, &run.constants, &run.settings));
    emit(
        &io::render_sweep_csv(spec.parameter.name(), &rows),
        common.out.as_deref(),
        stdout,
    )?;
    let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
    if !common.quiet {
        let _ = writeln!(
            stderr,
            "{} grid points over {}, {failed} failed",
            rows.len(),
            spec.parameter
        );
    }
    Ok(ExitCode::Success)
}

fn cmd_verify(
    common: &Common,
    pool: &rayon::ThreadPool,
    stdout: &mut dyn Write,
) -> Result<ExitCode, CliError> {
    let rel_tol = common.rel_tol.unwrap_or(QuadratureSettings::default().rel_tol);
    let checks = pool.install(|| verify::run_suite(rel_tol));
    let table = verify::render_table(&checks);
    let failed = checks
        .iter()
        .filter(|c| c.status == verify::Status::Fail)
        .count();
    let summary = format!(
        "{table}{} checks, {failed} failed\n",
        checks.iter().filter(|c| c.status != verify::Status::Info).count()
    );
    emit(&summary, common.out.as_deref(), stdout)?;
    if failed > 0 {
        return Err(CliError::Numerical(format!("{failed} verification checks failed")));
    }
    Ok(ExitCode::Success)
}
