//! Flat `key = value` run configuration.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use thiserror::Error;

use super::format_float;
use crate::spectral::QuadratureSettings;
use crate::unitsys::DEFAULT_ALPHA;

/// Smoothing window used when `smoothing = true` gives no explicit size.
pub const DEFAULT_SMOOTHING_WINDOW: usize = 7;

/// Period of a Lorentzian pulse when `period_us` is omitted, in units of γ.
pub const DEFAULT_PERIOD_OVER_GAMMA: f64 = 100.0;

/// Every key the parser accepts.
pub const KEYS: &[&str] = &[
    "model",
    "r0_um",
    "rmin_um",
    "gamma_ns",
    "period_us",
    "trajectory_csv",
    "baseline_r0_um",
    "smoothing",
    "smoothing_window",
    "alpha",
    "rel_tol",
    "abs_tol",
    "max_panels",
    "oscillation_resolution",
    "tail_rel_threshold",
    "sampled_tail_rel_threshold",
    "subtract_baseline",
];

const LORENTZIAN_ONLY: &[&str] = &["r0_um", "rmin_um", "gamma_ns", "period_us"];
const TABULATED_ONLY: &[&str] = &[
    "trajectory_csv",
    "baseline_r0_um",
    "smoothing",
    "smoothing_window",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: unknown key `{key}`")]
    UnknownKey {
        line: usize,
        column: usize,
        key: String,
    },
    #[error("line {line}: duplicate key `{key}` (first set on line {first})")]
    Duplicate {
        line: usize,
        key: String,
        first: usize,
    },
    #[error("line {line}: missing required key `{key}`")]
    MissingKey { line: usize, key: &'static str },
    #[error("line {line}: `{key}` out of range: {reason}")]
    RangeViolation {
        line: usize,
        key: String,
        reason: String,
    },
    #[error("line {line}: `{key}` does not apply to model `{model}`")]
    NotApplicable {
        line: usize,
        key: String,
        model: &'static str,
    },
}

impl ConfigError {
    /// 1-based line the error refers to.
    pub fn line(&self) -> usize {
        match self {
            ConfigError::Syntax { line, .. }
            | ConfigError::UnknownKey { line, .. }
            | ConfigError::Duplicate { line, .. }
            | ConfigError::MissingKey { line, .. }
            | ConfigError::RangeViolation { line, .. }
            | ConfigError::NotApplicable { line, .. } => *line,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelConfig {
    Lorentzian {
        r0_um: f64,
        rmin_um: f64,
        gamma_ns: f64,
        period_us: Option<f64>,
    },
    Tabulated {
        trajectory_csv: PathBuf,
        baseline_r0_um: Option<f64>,
        /// Window of the quadratic pre-smoothing, if enabled.
        smoothing_window: Option<usize>,
    },
}

impl ModelConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ModelConfig::Lorentzian { .. } => "lorentzian",
            ModelConfig::Tabulated { .. } => "tabulated",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub alpha: f64,
    pub quadrature: QuadratureSettings,
}

struct Entry {
    line: usize,
    value_column: usize,
    value: String,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn strip_quotes(value: &str) -> &str {
    value
        .strip_prefix('"')
        .and_then(|v| v.strip_suffix('"'))
        .unwrap_or(value)
}

fn tokenize(text: &str) -> Result<HashMap<&'static str, Entry>, ConfigError> {
    let mut entries: HashMap<&'static str, Entry> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let Some(eq) = body.find('=') else {
            let column = body.len() - body.trim_start().len() + 1;
            return Err(syntax(line, column, "expected `key = value`"));
        };
        let key_part = &body[..eq];
        let key = key_part.trim();
        let key_column = key_part.len() - key_part.trim_start().len() + 1;
        if key.is_empty() {
            return Err(syntax(line, eq + 1, "missing key before `=`"));
        }
        if let Some(bad) = key.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')) {
            return Err(syntax(line, key_column + bad, format!("invalid key `{key}`")));
        }
        let value_part = &body[eq + 1..];
        let value = value_part.trim();
        let value_column = eq + 2 + (value_part.len() - value_part.trim_start().len());
        if value.is_empty() {
            return Err(syntax(line, eq + 2, format!("missing value for `{key}`")));
        }
        let Some(&known) = KEYS.iter().find(|k| **k == key) else {
            return Err(ConfigError::UnknownKey {
                line,
                column: key_column,
                key: key.to_string(),
            });
        };
        if let Some(first) = entries.get(known) {
            return Err(ConfigError::Duplicate {
                line,
                key: known.to_string(),
                first: first.line,
            });
        }
        entries.insert(
            known,
            Entry {
                line,
                value_column,
                value: value.to_string(),
            },
        );
    }
    Ok(entries)
}

fn number(key: &str, e: &Entry) -> Result<f64, ConfigError> {
    let v: f64 = e.value.parse().map_err(|_| {
        syntax(
            e.line,
            e.value_column,
            format!("`{key}` expects a number, got `{}`", e.value),
        )
    })?;
    if !v.is_finite() {
        return Err(ConfigError::RangeViolation {
            line: e.line,
            key: key.to_string(),
            reason: format!("must be finite, got {}", e.value),
        });
    }
    Ok(v)
}

fn positive(key: &str, e: &Entry) -> Result<f64, ConfigError> {
    let v = number(key, e)?;
    if v <= 0.0 {
        return Err(ConfigError::RangeViolation {
            line: e.line,
            key: key.to_string(),
            reason: format!("must be positive, got {}", e.value),
        });
    }
    Ok(v)
}

fn count(key: &str, e: &Entry) -> Result<usize, ConfigError> {
    let v: usize = e.value.parse().map_err(|_| {
        syntax(
            e.line,
            e.value_column,
            format!("`{key}` expects a non-negative integer, got `{}`", e.value),
        )
    })?;
    Ok(v)
}

fn flag(key: &str, e: &Entry) -> Result<bool, ConfigError> {
    match e.value.as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(syntax(
            e.line,
            e.value_column,
            format!("`{key}` expects true or false, got `{other}`"),
        )),
    }
}

/// Parse and validate a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let entries = tokenize(text)?;
    let last_line = text.lines().count().max(1);
    let get = |k: &str| entries.get(k);

    // Value-level checks, in line order so the first bad line is reported.
    let mut numbers: HashMap<&str, f64> = HashMap::new();
    let mut ordered: Vec<(&&str, &Entry)> = entries.iter().collect();
    ordered.sort_by_key(|(_, e)| e.line);
    for (key, e) in &ordered {
        let key: &str = key;
        match key {
            "r0_um" | "rmin_um" | "gamma_ns" | "period_us" | "baseline_r0_um" | "alpha"
            | "rel_tol" | "abs_tol" | "tail_rel_threshold" | "sampled_tail_rel_threshold" => {
                numbers.insert(key, positive(key, e)?);
            }
            "max_panels" => {
                if count(key, e)? == 0 {
                    return Err(ConfigError::RangeViolation {
                        line: e.line,
                        key: key.into(),
                        reason: "must be at least 1".into(),
                    });
                }
            }
            "oscillation_resolution" => {
                if count(key, e)? < 4 {
                    return Err(ConfigError::RangeViolation {
                        line: e.line,
                        key: key.into(),
                        reason: format!("must be at least 4, got {}", e.value),
                    });
                }
            }
            "smoothing_window" => {
                let w = count(key, e)?;
                if !(5..=11).contains(&w) || w % 2 == 0 {
                    return Err(ConfigError::RangeViolation {
                        line: e.line,
                        key: key.into(),
                        reason: format!("must be odd and between 5 and 11, got {w}"),
                    });
                }
            }
            "smoothing" | "subtract_baseline" => {
                flag(key, e)?;
            }
            "trajectory_csv" => {
                if strip_quotes(&e.value).is_empty() {
                    return Err(syntax(e.line, e.value_column, "empty path"));
                }
            }
            _ => {}
        }
    }
    if let (Some(&r0), Some(&rmin)) = (numbers.get("r0_um"), numbers.get("rmin_um")) {
        if rmin >= r0 {
            let e = &entries["rmin_um"];
            return Err(ConfigError::RangeViolation {
                line: e.line,
                key: "rmin_um".into(),
                reason: format!("must be smaller than r0_um ({rmin} >= {r0})"),
            });
        }
    }

    let Some(model_entry) = get("model") else {
        return Err(ConfigError::MissingKey {
            line: last_line,
            key: "model",
        });
    };
    let (name, own, foreign): (&'static str, &[&str], &[&str]) = match model_entry.value.as_str() {
        "lorentzian" => ("lorentzian", LORENTZIAN_ONLY, TABULATED_ONLY),
        "tabulated" => ("tabulated", TABULATED_ONLY, LORENTZIAN_ONLY),
        other => {
            return Err(syntax(
                model_entry.line,
                model_entry.value_column,
                format!("model must be `lorentzian` or `tabulated`, got `{other}`"),
            ))
        }
    };
    debug_assert!(own.iter().all(|k| KEYS.contains(k)));
    if let Some((key, e)) = ordered.iter().find(|(k, _)| foreign.contains(k)) {
        return Err(ConfigError::NotApplicable {
            line: e.line,
            key: key.to_string(),
            model: name,
        });
    }

    let model = if name == "lorentzian" {
        let mut required = [0.0; 3];
        for (slot, key) in required.iter_mut().zip(["r0_um", "rmin_um", "gamma_ns"]) {
            *slot = *numbers.get(key).ok_or(ConfigError::MissingKey {
                line: model_entry.line,
                key,
            })?;
        }
        let [r0_um, rmin_um, gamma_ns] = required;
        let period_us = numbers.get("period_us").copied();
        if let Some(period) = period_us {
            // γ ≪ T is what makes the pulse isolated
            let min = crate::trajectory::MIN_PERIOD_OVER_GAMMA * gamma_ns * 1e-3;
            if period < min {
                return Err(ConfigError::RangeViolation {
                    line: entries["period_us"].line,
                    key: "period_us".into(),
                    reason: format!(
                        "must be at least {} gamma ({min} us)",
                        crate::trajectory::MIN_PERIOD_OVER_GAMMA
                    ),
                });
            }
        }
        ModelConfig::Lorentzian {
            r0_um,
            rmin_um,
            gamma_ns,
            period_us,
        }
    } else {
        let path = get("trajectory_csv").ok_or(ConfigError::MissingKey {
            line: model_entry.line,
            key: "trajectory_csv",
        })?;
        let smoothing = match get("smoothing") {
            Some(e) => flag("smoothing", e)?,
            None => false,
        };
        let window = get("smoothing_window")
            .map(|e| count("smoothing_window", e))
            .transpose()?;
        if let (false, Some(_)) = (smoothing, window) {
            let e = &entries["smoothing_window"];
            return Err(ConfigError::NotApplicable {
                line: e.line,
                key: "smoothing_window".into(),
                model: "tabulated without smoothing = true",
            });
        }
        ModelConfig::Tabulated {
            trajectory_csv: PathBuf::from(strip_quotes(&path.value)),
            baseline_r0_um: numbers.get("baseline_r0_um").copied(),
            smoothing_window: smoothing.then(|| window.unwrap_or(DEFAULT_SMOOTHING_WINDOW)),
        }
    };

    let mut quadrature = QuadratureSettings::default();
    for (key, value) in &numbers {
        match *key {
            "rel_tol" => quadrature.rel_tol = *value,
            "abs_tol" => quadrature.abs_tol = *value,
            "tail_rel_threshold" => quadrature.tail_rel_threshold = *value,
            "sampled_tail_rel_threshold" => quadrature.sampled_tail_rel_threshold = *value,
            _ => {}
        }
    }
    if let Some(e) = get("max_panels") {
        quadrature.max_panels = count("max_panels", e)?;
    }
    if let Some(e) = get("oscillation_resolution") {
        quadrature.oscillation_resolution = count("oscillation_resolution", e)?;
    }
    if let Some(e) = get("subtract_baseline") {
        quadrature.subtract_baseline = flag("subtract_baseline", e)?;
    }

    Ok(RunConfig {
        model,
        alpha: numbers.get("alpha").copied().unwrap_or(DEFAULT_ALPHA),
        quadrature,
    })
}

/// Render a configuration that [`parse_config`] reads back unchanged.
pub fn render_config(config: &RunConfig) -> String {
    let mut out = String::new();
    let mut line = |key: &str, value: String| {
        let _ = writeln!(out, "{key} = {value}");
    };
    line("model", config.model.name().into());
    match &config.model {
        ModelConfig::Lorentzian {
            r0_um,
            rmin_um,
            gamma_ns,
            period_us,
        } => {
            line("r0_um", format_float(*r0_um));
            line("rmin_um", format_float(*rmin_um));
            line("gamma_ns", format_float(*gamma_ns));
            if let Some(p) = period_us {
                line("period_us", format_float(*p));
            }
        }
        ModelConfig::Tabulated {
            trajectory_csv,
            baseline_r0_um,
            smoothing_window,
        } => {
            line("trajectory_csv", trajectory_csv.display().to_string());
            if let Some(b) = baseline_r0_um {
                line("baseline_r0_um", format_float(*b));
            }
            if let Some(w) = smoothing_window {
                line("smoothing", "true".into());
                line("smoothing_window", w.to_string());
            }
        }
    }
    line("alpha", format_float(config.alpha));
    let q = &config.quadrature;
    line("rel_tol", format_float(q.rel_tol));
    line("abs_tol", format_float(q.abs_tol));
    line("max_panels", q.max_panels.to_string());
    line("oscillation_resolution", q.oscillation_resolution.to_string());
    line("tail_rel_threshold", format_float(q.tail_rel_threshold));
    line(
        "sampled_tail_rel_threshold",
        format_float(q.sampled_tail_rel_threshold),
    );
    line("subtract_baseline", q.subtract_baseline.to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str =
        "model = lorentzian\nr0_um = 2\nrmin_um = 1\ngamma_ns = 1\nperiod_us = 0.1\nalpha = 1e-4\n";

    #[test]
    fn parses_basic_lorentzian() {
        let c = parse_config(BASIC).unwrap();
        assert_eq!(
            c.model,
            ModelConfig::Lorentzian {
                r0_um: 2.0,
                rmin_um: 1.0,
                gamma_ns: 1.0,
                period_us: Some(0.1)
            }
        );
        assert_eq!(c.alpha, 1e-4);
        assert_eq!(c.quadrature, QuadratureSettings::default());
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# run\n\nmodel = lorentzian # inline\n  r0_um=2\nrmin_um = 1\ngamma_ns = 1\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.alpha, DEFAULT_ALPHA);
    }

    #[test]
    fn range_violation_on_radii() {
        let e = parse_config("rmin_um = 3\nr0_um = 2\n").unwrap_err();
        assert!(matches!(e, ConfigError::RangeViolation { line: 1, .. }), "{e}");
    }

    #[test]
    fn missing_trajectory() {
        let e = parse_config("model = tabulated\n").unwrap_err();
        assert!(
            matches!(e, ConfigError::MissingKey { key: "trajectory_csv", line: 1 }),
            "{e}"
        );
    }

    #[test]
    fn distinct_errors_with_locations() {
        let e = parse_config("model = lorentzian\nfoo = 1\n").unwrap_err();
        assert_eq!(
            e,
            ConfigError::UnknownKey {
                line: 2,
                column: 1,
                key: "foo".into()
            }
        );
        let e = parse_config("model lorentzian\n").unwrap_err();
        assert!(matches!(e, ConfigError::Syntax { line: 1, .. }));
        let e = parse_config("model = lorentzian\nr0_um = x2\n").unwrap_err();
        assert_eq!(e.line(), 2);
        assert!(matches!(e, ConfigError::Syntax { column: 9, .. }), "{e:?}");
        let e = parse_config("alpha = 1\nalpha = 2\n").unwrap_err();
        assert!(matches!(e, ConfigError::Duplicate { line: 2, first: 1, .. }));
        let e = parse_config("model = tabulated\ntrajectory_csv = a.csv\ngamma_ns = 1\n").unwrap_err();
        assert!(matches!(e, ConfigError::NotApplicable { line: 3, .. }));
        let e = parse_config(&format!("{BASIC}alpha2 = 3\n")).unwrap_err();
        assert!(matches!(e, ConfigError::UnknownKey { line: 7, .. }));
        let e = parse_config("model = lorentzian\nr0_um = -2\n").unwrap_err();
        assert!(matches!(e, ConfigError::RangeViolation { line: 2, .. }));
        let e = parse_config("r0_um = 2\n").unwrap_err();
        assert!(matches!(e, ConfigError::MissingKey { key: "model", .. }));
    }

    #[test]
    fn short_period_rejected() {
        let e = parse_config("model = lorentzian\nr0_um = 2\nrmin_um = 1\ngamma_ns = 1\nperiod_us = 0.01\n")
            .unwrap_err();
        assert!(matches!(e, ConfigError::RangeViolation { line: 5, .. }));
    }

    #[test]
    fn tabulated_round_trip() {
        let text = "model = tabulated\ntrajectory_csv = \"data/trace.csv\"\nsmoothing = true\nrel_tol = 1e-8\nsubtract_baseline = false\n";
        let c = parse_config(text).unwrap();
        assert_eq!(
            c.model,
            ModelConfig::Tabulated {
                trajectory_csv: "data/trace.csv".into(),
                baseline_r0_um: None,
                smoothing_window: Some(DEFAULT_SMOOTHING_WINDOW)
            }
        );
        assert!(!c.quadrature.subtract_baseline);
        assert_eq!(parse_config(&render_config(&c)).unwrap(), c);
        let b = parse_config(BASIC).unwrap();
        assert_eq!(parse_config(&render_config(&b)).unwrap(), b);
    }
}
