//! Closed-form references for the Lorentzian collapse, the velocity bound on
//! the photon yield, and the order-of-magnitude estimates built on them.
//!
//! For the R²-dip pulse the transform of the dynamic area is
//! `F(Ω) = −π β² γ³ e^{−γΩ}`, so the spectral density is
//! `α π² β⁴ γ⁶ Ω⁵ e^{−2γΩ}` and
//!
//! ```text
//! N = α π² β⁴ γ⁶ ∫₀^∞ Ω⁵ e^{−2γΩ} dΩ = α π² β⁴ · Γ(6)/2⁶ = (15π²/8) α β⁴.
//! ```

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::spectral::{self, QuadratureSettings, SpectralError};
use crate::trajectory::Trajectory;
use crate::unitsys::PhysicalConstants;

/// `N / (α β⁴)` for the R²-dip pulse: `π² Γ(6) / 2⁶`.
pub const K_ADOPTED: f64 = 15.0 * PI * PI / 8.0;

/// The same coefficient as quoted in the literature for this model, half of
/// [`K_ADOPTED`].
pub const K_STATED: f64 = 15.0 * PI * PI / 16.0;

/// Prefactor of the maximal-velocity bound `N ≤ 0.1 (v_max/c)⁴`.
pub const BOUND_PREFACTOR: f64 = 0.1;

/// Photons per flash in observed sonoluminescence (lower limit).
pub const OBSERVED_PHOTONS_PER_FLASH: f64 = 1e5;

/// Characteristic surface speed of a collapsing bubble, m/s.
pub const TYPICAL_SURFACE_SPEED: f64 = 1500.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("invalid {name}: {reason}")]
    InvalidArgument { name: &'static str, reason: String },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

fn non_negative(name: &'static str, value: f64) -> Result<f64, OracleError> {
    if !value.is_finite() || value < 0.0 {
        return Err(OracleError::InvalidArgument {
            name,
            reason: format!("must be finite and non-negative, got {value:e}"),
        });
    }
    Ok(value)
}

fn positive(name: &'static str, value: f64) -> Result<f64, OracleError> {
    if !value.is_finite() || value <= 0.0 {
        return Err(OracleError::InvalidArgument {
            name,
            reason: format!("must be finite and positive, got {value:e}"),
        });
    }
    Ok(value)
}

/// Which closed-form coefficient to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    /// Derived for the R²-dip pulse used throughout this crate.
    #[default]
    Adopted,
    /// The literature value, a factor of two smaller.
    Stated,
}

impl Convention {
    pub fn coefficient(self) -> f64 {
        match self {
            Convention::Adopted => K_ADOPTED,
            Convention::Stated => K_STATED,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Convention::Adopted => "15pi^2/8",
            Convention::Stated => "15pi^2/16",
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// `|F(Ω)| = π β² γ³ e^{−γΩ}`, s³.
pub fn lorentzian_form_factor_closed(
    beta: f64,
    gamma: f64,
    omega: f64,
) -> Result<f64, OracleError> {
    non_negative("beta", beta)?;
    positive("gamma", gamma)?;
    non_negative("omega", omega)?;
    Ok(PI * beta * beta * gamma.powi(3) * (-gamma * omega).exp())
}

/// `K α β⁴` with the adopted coefficient.
pub fn lorentzian_photon_number(alpha: f64, beta: f64) -> Result<f64, OracleError> {
    lorentzian_photon_number_with(alpha, beta, Convention::Adopted)
}

pub fn lorentzian_photon_number_with(
    alpha: f64,
    beta: f64,
    convention: Convention,
) -> Result<f64, OracleError> {
    positive("alpha", alpha)?;
    non_negative("beta", beta)?;
    Ok(convention.coefficient() * alpha * beta.powi(4))
}

/// `ħ (3/γ) N`, J: every photon pair carries ħΩ and the mean Ω is 3/γ.
pub fn lorentzian_radiated_energy(
    alpha: f64,
    beta: f64,
    gamma: f64,
    hbar: f64,
) -> Result<f64, OracleError> {
    positive("gamma", gamma)?;
    positive("hbar", hbar)?;
    let (_, mean) = peak_and_mean_omega(gamma)?;
    Ok(hbar * mean * lorentzian_photon_number(alpha, beta)?)
}

/// `0.1 (v_max/c)⁴`.
pub fn velocity_bound(v_max: f64, c: f64) -> f64 {
    BOUND_PREFACTOR * (v_max / c).powi(4)
}

/// Peak and mean of the spectrum `Ω⁵ e^{−2γΩ}`: `5/(2γ)` and `3/γ`, rad/s.
pub fn peak_and_mean_omega(gamma: f64) -> Result<(f64, f64), OracleError> {
    positive("gamma", gamma)?;
    Ok((2.5 / gamma, 3.0 / gamma))
}

/// Deficit factor `n_observed / n_predicted`; infinite for a zero prediction.
pub fn observed_gap(n_predicted: f64, n_observed: f64) -> Result<f64, OracleError> {
    non_negative("predicted photon number", n_predicted)?;
    positive("observed photon number", n_observed)?;
    if n_predicted == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(n_observed / n_predicted)
}

/// Outcome of testing one trajectory against the velocity bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    /// m/s.
    pub v_max: f64,
    pub bound_value: f64,
    pub photon_number: f64,
    /// Absolute quadrature error of `photon_number`.
    pub error_estimate: f64,
    /// `N / (v_max/c)⁴`; 0 for a trajectory that does not move.
    pub ratio: f64,
    pub satisfied: bool,
}

impl BoundReport {
    pub fn new(v_max: f64, photon_number: f64, error_estimate: f64, c: f64) -> Self {
        let bound_value = velocity_bound(v_max, c);
        let q = (v_max / c).powi(4);
        let ratio = if q == 0.0 && photon_number == 0.0 {
            0.0
        } else {
            photon_number / q
        };
        Self {
            v_max,
            bound_value,
            photon_number,
            error_estimate,
            ratio,
            satisfied: photon_number <= bound_value + error_estimate,
        }
    }
}

pub fn bound_check(
    traj: &Trajectory,
    constants: &PhysicalConstants,
    settings: &QuadratureSettings,
) -> Result<BoundReport, OracleError> {
    let n = spectral::photon_number(traj, constants, settings)?;
    let v_max = traj.max_surface_velocity();
    Ok(BoundReport::new(v_max, n.value, n.error, constants.c))
}

/// `N / (v_max/c)⁴` of the closed-form model, a function of `rmin/r0` only.
///
/// With `q = 1 − (rmin/r0)²` the maximal velocity is `v_max = c β m(q)`
/// where `m(q) = max_x x / ((1+x²)² sqrt(1 − q/(1+x²)))`, and the ratio is
/// `K α / (q² m(q)⁴)`.
pub fn lorentzian_bound_ratio(alpha: f64, rmin_over_r0: f64) -> Result<f64, OracleError> {
    positive("alpha", alpha)?;
    if !(rmin_over_r0 > 0.0 && rmin_over_r0 < 1.0) {
        return Err(OracleError::InvalidArgument {
            name: "rmin/r0",
            reason: format!("must lie in (0, 1), got {rmin_over_r0}"),
        });
    }
    let q = (1.0 - rmin_over_r0) * (1.0 + rmin_over_r0);
    let m = |x: f64| {
        let s = 1.0 + x * x;
        x / (s * s * (1.0 - q / s).sqrt())
    };
    // Unimodal on (0, ∞) with the maximum below x = 1/√3.
    let (_, peak) = crate::numerics::golden_section_max(m, 0.0, 1.0, 1e-14);
    Ok(K_ADOPTED * alpha / (q * q * peak.powi(4)))
}
