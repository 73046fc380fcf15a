//! Configuration files, trace ingestion and result serialisation.
//!
//! Every output is rendered by hand so that identical inputs give
//! byte-identical files: floats carry 17 significant digits (enough to
//! round-trip any `f64`), an exact zero is written as `0`, and every file
//! ends with a newline.

mod config;
mod trace;

pub use config::{
    parse_config, render_config, ConfigError, ModelConfig, RunConfig, DEFAULT_PERIOD_OVER_GAMMA,
    DEFAULT_SMOOTHING_WINDOW, KEYS,
};
pub use trace::{parse_trace, TraceError, TRACE_HEADER};

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::spectral::{Spectrum, YieldResult};
use crate::trajectory::{LorentzianPulse, TabulatedTrajectory, Trajectory, TrajectoryError};
use crate::unitsys::{Quantity, Unit, UnitError};

pub const SPECTRUM_HEADER: &str = "omega_rad_s,dN_dOmega_s";

/// Columns of a sweep file after the swept parameter.
pub const SWEEP_COLUMNS: [&str; 5] = ["photon_number", "v_max_m_s", "bound_value", "ratio", "status"];

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Config {
        path: PathBuf,
        #[source]
        source: ConfigError,
    },
    #[error("{}: {source}", path.display())]
    Trace {
        path: PathBuf,
        #[source]
        source: TraceError,
    },
    #[error("{}: {source}", path.display())]
    Trajectory {
        path: PathBuf,
        #[source]
        source: TrajectoryError,
    },
    #[error("invalid model parameters: {0}")]
    Model(#[source] TrajectoryError),
    #[error(transparent)]
    Unit(#[from] UnitError),
}

/// Shortest-form-independent rendering: 17 significant digits, `0` for zero.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn json_number(x: f64) -> String {
    if x.is_finite() {
        format_float(x)
    } else {
        "null".to_string()
    }
}

pub fn read_config(path: &Path) -> Result<RunConfig, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text).map_err(|source| IoError::Config {
        path: path.to_path_buf(),
        source,
    })
}

/// Read a `t_s,R_m` trace; the baseline radius is the mean over the first
/// and last 5 % of rows.
pub fn load_trajectory_csv(path: &Path) -> Result<TabulatedTrajectory, IoError> {
    trace::load(path)
        .map_err(|source| IoError::Read {
            path: path.to_path_buf(),
            source,
        })?
        .map_err(|source| IoError::Trace {
            path: path.to_path_buf(),
            source,
        })
}

impl RunConfig {
    /// Build the trajectory; a relative `trajectory_csv` is resolved against
    /// `base_dir` (normally the directory holding the config file).
    pub fn trajectory(&self, base_dir: &Path) -> Result<Trajectory, IoError> {
        match &self.model {
            ModelConfig::Lorentzian {
                r0_um,
                rmin_um,
                gamma_ns,
                period_us,
            } => {
                let r0 = Quantity::new(*r0_um, Unit::Micrometre)?.to_si();
                let rmin = Quantity::new(*rmin_um, Unit::Micrometre)?.to_si();
                let gamma = Quantity::new(*gamma_ns, Unit::Nanosecond)?.to_si();
                let period = match period_us {
                    Some(p) => Quantity::new(p * 1e3, Unit::Nanosecond)?.to_si(),
                    None => DEFAULT_PERIOD_OVER_GAMMA * gamma,
                };
                LorentzianPulse::new(r0, rmin, gamma, period)
                    .map(Trajectory::from)
                    .map_err(IoError::Model)
            }
            ModelConfig::Tabulated {
                trajectory_csv,
                baseline_r0_um,
                smoothing_window,
            } => {
                let path = base_dir.join(trajectory_csv);
                let wrap = |source| IoError::Trajectory {
                    path: path.clone(),
                    source,
                };
                let mut t = load_trajectory_csv(&path)?;
                if let Some(b) = baseline_r0_um {
                    let b = Quantity::new(*b, Unit::Micrometre)?.to_si();
                    t = t.with_baseline(b).map_err(wrap)?;
                }
                if let Some(w) = smoothing_window {
                    t = t.with_smoothing(*w).map_err(wrap)?;
                }
                Ok(t.into())
            }
        }
    }
}

pub fn render_result_json(result: &YieldResult) -> String {
    let fields = [
        ("photon_number", json_number(result.photon_number)),
        ("radiated_energy_J", json_number(result.radiated_energy)),
        ("v_max_m_s", json_number(result.v_max)),
        ("beta", json_number(result.beta_effective)),
        ("bound_value", json_number(result.bound_value)),
        ("supraluminal", result.supraluminal.to_string()),
        ("error_estimate", json_number(result.quadrature_error_estimate)),
    ];
    let mut out = String::from("{\n");
    for (i, (key, value)) in fields.iter().enumerate() {
        let sep = if i + 1 < fields.len() { "," } else { "" };
        let _ = writeln!(out, "  \"{key}\": {value}{sep}");
    }
    out.push_str("}\n");
    out
}

pub fn render_spectrum_csv(spectrum: &Spectrum) -> String {
    let mut out = format!("{SPECTRUM_HEADER}\n");
    for (w, d) in spectrum.omegas.iter().zip(&spectrum.densities) {
        let _ = writeln!(out, "{},{}", format_float(*w), format_float(*d));
    }
    out
}

/// Quantities recorded for one successful sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub photon_number: f64,
    pub v_max: f64,
    pub bound_value: f64,
    /// `N / (v_max/c)⁴`.
    pub ratio: f64,
}

/// One grid point of a sweep; failures are kept in place as messages.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub outcome: Result<SweepPoint, String>,
}

pub fn render_sweep_csv(parameter: &str, rows: &[SweepRow]) -> String {
    let mut out = format!("{parameter},{}\n", SWEEP_COLUMNS.join(","));
    for row in rows {
        let value = format_float(row.value);
        match &row.outcome {
            Ok(p) => {
                let _ = writeln!(
                    out,
                    "{value},{},{},{},{},ok",
                    format_float(p.photon_number),
                    format_float(p.v_max),
                    format_float(p.bound_value),
                    format_float(p.ratio)
                );
            }
            Err(message) => {
                // keep the message inside one CSV field
                let clean: String = message
                    .chars()
                    .map(|c| if matches!(c, ',' | '\n' | '\r' | '"') { ' ' } else { c })
                    .collect();
                let _ = writeln!(out, "{value},,,,,error: {clean}");
            }
        }
    }
    out
}

fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|source| IoError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_result_json(result: &YieldResult, path: &Path) -> Result<(), IoError> {
    write_text(path, &render_result_json(result))
}

pub fn write_spectrum_csv(spectrum: &Spectrum, path: &Path) -> Result<(), IoError> {
    write_text(path, &render_spectrum_csv(spectrum))
}

pub fn write_sweep_csv(parameter: &str, rows: &[SweepRow], path: &Path) -> Result<(), IoError> {
    write_text(path, &render_sweep_csv(parameter, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_rendering() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(-0.0), "0");
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, f64::MAX] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn zero_result_json() {
        let j = render_result_json(&YieldResult::zero());
        assert!(j.contains("\"photon_number\": 0,"));
        assert!(j.ends_with("}\n"));
    }

    #[test]
    fn spectrum_lines() {
        let s = Spectrum {
            omegas: vec![0.0, 1.0, 2.0],
            densities: vec![0.0, 0.5, 0.25],
            peak_omega: 1.0,
            mean_omega: 1.2,
            total: 1.0,
        };
        let text = render_spectrum_csv(&s);
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("omega_rad_s,dN_dOmega_s\n"));
    }

    #[test]
    fn sweep_rows_keep_errors_in_place() {
        let rows = vec![
            SweepRow {
                value: 1.0,
                outcome: Err("bad, very bad".into()),
            },
            SweepRow {
                value: 2.0,
                outcome: Ok(SweepPoint {
                    photon_number: 1.0,
                    v_max: 2.0,
                    bound_value: 3.0,
                    ratio: 4.0,
                }),
            },
        ];
        let text = render_sweep_csv("beta", &rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "beta,photon_number,v_max_m_s,bound_value,ratio,status");
        assert_eq!(lines[1].split(',').count(), 6);
        assert!(lines[1].ends_with("error: bad  very bad"));
        assert!(lines[2].ends_with(",ok"));
    }
}
