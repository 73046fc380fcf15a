//! Parameter sweeps over a Lorentzian pulse.

use std::fmt;

use rayon::prelude::*;

use crate::io::{SweepPoint, SweepRow};
use crate::oracles::BoundReport;
use crate::spectral::{self, QuadratureSettings};
use crate::trajectory::{LorentzianPulse, Trajectory, TrajectoryError};
use crate::unitsys::PhysicalConstants;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepParameter {
    /// β at fixed rmin/r0, γ and period (radii rescaled).
    #[value(name = "beta")]
    Beta,
    /// γ in ns at fixed radii; the period keeps its ratio to γ.
    #[value(name = "gamma_ns")]
    GammaNs,
    /// rmin/r0 at fixed β and γ.
    #[value(name = "rmin_over_r0")]
    RminOverR0,
    /// Maximal surface velocity in m/s, by rescaling time.
    #[value(name = "v_max_m_s")]
    VMaxMS,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Beta => "beta",
            SweepParameter::GammaNs => "gamma_ns",
            SweepParameter::RminOverR0 => "rmin_over_r0",
            SweepParameter::VMaxMS => "v_max_m_s",
        }
    }

    /// The base pulse with this parameter set to `value`.
    pub fn apply(self, base: &LorentzianPulse, value: f64) -> Result<LorentzianPulse, TrajectoryError> {
        let ratio = base.rmin / base.r0;
        match self {
            SweepParameter::Beta => LorentzianPulse::from_beta(value, ratio, base.gamma, base.period),
            SweepParameter::GammaNs => {
                let gamma = value * 1e-9;
                LorentzianPulse::new(base.r0, base.rmin, gamma, base.period * gamma / base.gamma)
            }
            SweepParameter::RminOverR0 => {
                LorentzianPulse::from_beta(base.beta(), value, base.gamma, base.period)
            }
            SweepParameter::VMaxMS => base.with_max_velocity(value),
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub scale: Scale,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.from.is_finite() && self.to.is_finite()) {
            return Err("sweep bounds must be finite".into());
        }
        if !(self.from < self.to) {
            return Err(format!("--from ({}) must be below --to ({})", self.from, self.to));
        }
        if self.points < 2 {
            return Err(format!("--points must be at least 2, got {}", self.points));
        }
        if self.scale == Scale::Log && self.from <= 0.0 {
            return Err("a log sweep needs positive bounds".into());
        }
        Ok(())
    }

    /// Grid values in order; the end points are hit exactly.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.from;
                }
                if i == n - 1 {
                    return self.to;
                }
                let f = i as f64 / (n - 1) as f64;
                match self.scale {
                    Scale::Linear => self.from + (self.to - self.from) * f,
                    Scale::Log => self.from * (self.to / self.from).powf(f),
                }
            })
            .collect()
    }
}

fn point(
    spec: &SweepSpec,
    base: &LorentzianPulse,
    value: f64,
    constants: &PhysicalConstants,
    settings: &QuadratureSettings,
) -> Result<SweepPoint, String> {
    let pulse = spec.parameter.apply(base, value).map_err(|e| e.to_string())?;
    let traj = Trajectory::from(pulse);
    let n = spectral::photon_number(&traj, constants, settings).map_err(|e| e.to_string())?;
    let report = BoundReport::new(traj.max_surface_velocity(), n.value, n.error, constants.c);
    Ok(SweepPoint {
        photon_number: report.photon_number,
        v_max: report.v_max,
        bound_value: report.bound_value,
        ratio: report.ratio,
    })
}

/// Evaluate every grid point (concurrently on the current rayon pool);
/// rows come back in grid order and failures stay in their row.
pub fn run_sweep(
    spec: &SweepSpec,
    base: &LorentzianPulse,
    constants: &PhysicalConstants,
    settings: &QuadratureSettings,
) -> Vec<SweepRow> {
    spec.grid()
        .into_par_iter()
        .map(|value| SweepRow {
            value,
            outcome: point(spec, base, value, constants, settings),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let s = SweepSpec {
            parameter: SweepParameter::Beta,
            from: 1e-6,
            to: 1e-2,
            points: 5,
            scale: Scale::Log,
        };
        let g = s.grid();
        assert_eq!(g[0], 1e-6);
        assert_eq!(g[4], 1e-2);
        assert!((g[2] / 1e-4 - 1.0).abs() < 1e-12);
        let bad = SweepSpec { from: -1.0, ..s };
        assert!(bad.validate().is_err());
        let lin = SweepSpec {
            scale: Scale::Linear,
            from: 0.0,
            to: 1.0,
            points: 3,
            ..s
        };
        assert_eq!(lin.grid(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn parameters_act_as_documented() {
        let base = LorentzianPulse::isolated(2e-6, 1e-6, 1e-9).unwrap();
        let b = SweepParameter::Beta.apply(&base, 1e-3).unwrap();
        assert!((b.beta() / 1e-3 - 1.0).abs() < 1e-12);
        assert!((b.rmin / b.r0 - 0.5).abs() < 1e-12);
        let g = SweepParameter::GammaNs.apply(&base, 2.0).unwrap();
        assert_eq!((g.gamma, g.r0), (2e-9, base.r0));
        let r = SweepParameter::RminOverR0.apply(&base, 0.8).unwrap();
        assert!((r.beta() / base.beta() - 1.0).abs() < 1e-12);
        let v = SweepParameter::VMaxMS.apply(&base, 1500.0).unwrap();
        assert!((v.max_surface_velocity() / 1500.0 - 1.0).abs() < 1e-9);
    }
}
