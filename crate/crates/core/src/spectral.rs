//! Form factor, photon spectral density, photon number and radiated energy.
//!
//! The photon number radiated by a moving interface is
//!
//! ```text
//! N = α ∫₀^∞ dΩ Ω⁵ |F(Ω)|²,    F(Ω) = ∫ dτ (R²(τ) − r0²)/c² · e^{iΩτ}
//! ```
//!
//! All quadrature runs on a nondimensional copy of the dynamic area: time in
//! units of the trajectory's collapse time `t_s`, area normalised by its peak
//! value. With `w = Ω t_s` and `P(w)` the transform of the normalised
//! profile, `N = α D² ∫ w⁵ |P(w)|² dw`, where `D` is the peak dynamic area
//! in units of `(c t_s)²`.
//!
//! Lorentzian pulses are treated as isolated pulses on the whole time axis.
//! Tabulated traces are held at their first and last radius outside the
//! record, which contributes an exact boundary term to the transform; their
//! spectrum is band-limited at the Nyquist frequency of the sampling. Their
//! interpolant is piecewise polynomial, so its transform is evaluated exactly
//! interval by interval from oscillatory moments instead of by the adaptive
//! rule.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::numerics::quadrature::CompensatedAccumulate;
use crate::numerics::{
    golden_section_max, integrate, simpson_uniform, CompensatedSum, EpsilonTable, Integral,
    PanelPlan, QuadValue, QuadratureError, Rule, Tolerance,
};
use crate::oracles;
use crate::trajectory::{Trajectory, TrajectoryError};
use crate::unitsys::{PhysicalConstants, Scales, UnitError};

/// Form factors are resolved this many times tighter than `rel_tol`,
/// measured against `∫ |a(τ)| dτ`.
pub const FORM_FACTOR_TOL_FACTOR: f64 = 1e-3;

/// Half-width of the directly integrated core of an infinite pulse, in units
/// of its own width.
const CORE_HALF_WIDTHS: f64 = 8.0;

/// Cap on half-period cycles summed for one tail of an infinite pulse.
const MAX_TAIL_CYCLES: usize = 2000;

/// Cap on the number of doubling intervals of the frequency integral.
const MAX_DOUBLINGS: usize = 60;

/// Frequency intervals always integrated before the tail test applies.
const MIN_INTERVALS: usize = 3;

/// Tolerances and limits shared by the time and frequency integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    /// Absolute floor, in normalised (nondimensional) units.
    pub abs_tol: f64,
    /// Panel budget of a single adaptive integral.
    pub max_panels: usize,
    /// Minimum number of panels per oscillation period 2π/Ω.
    pub oscillation_resolution: usize,
    /// The frequency integral stops once a doubling interval adds less than
    /// this fraction of the accumulated total.
    pub tail_rel_threshold: f64,
    /// Looser tail threshold accepted when a sampled trace reaches its
    /// Nyquist frequency.
    pub sampled_tail_rel_threshold: f64,
    /// Remove the static `r0²` before transforming. Turning this off is only
    /// meaningful for diagnostics of single form factors.
    pub subtract_baseline: bool,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-30,
            max_panels: 1_000_000,
            oscillation_resolution: 8,
            tail_rel_threshold: 1e-10,
            sampled_tail_rel_threshold: 1e-3,
            subtract_baseline: true,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<(), SpectralError> {
        let checks = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("tail_rel_threshold", self.tail_rel_threshold),
            ("sampled_tail_rel_threshold", self.sampled_tail_rel_threshold),
        ];
        for (name, v) in checks {
            if !(v.is_finite() && v > 0.0) {
                return Err(SpectralError::InvalidSettings(format!(
                    "{name} must be positive and finite, got {v:e}"
                )));
            }
        }
        if self.oscillation_resolution < 4 {
            return Err(SpectralError::InvalidSettings(format!(
                "oscillation_resolution must be at least 4, got {}",
                self.oscillation_resolution
            )));
        }
        if self.max_panels == 0 {
            return Err(SpectralError::InvalidSettings(
                "max_panels must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("invalid quadrature settings: {0}")]
    InvalidSettings(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{context}: {source}")]
    Quadrature {
        context: &'static str,
        #[source]
        source: QuadratureError,
    },
    #[error(
        "spectrum tail not decaying: interval ending at Omega = {omega:.4e} rad/s adds {fraction:.3e} of the total"
    )]
    TailNotDecaying { omega: f64, fraction: f64 },
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
    #[error(transparent)]
    Unit(#[from] UnitError),
}

impl SpectralError {
    fn quad(context: &'static str) -> impl FnOnce(QuadratureError) -> SpectralError {
        move |source| SpectralError::Quadrature { context, source }
    }

    /// True for failures of the numerical method (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            SpectralError::Quadrature { .. } | SpectralError::TailNotDecaying { .. }
        )
    }
}

/// Value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

/// Sampled photon spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Angular frequencies, rad/s.
    pub omegas: Vec<f64>,
    /// dN/dΩ, s.
    pub densities: Vec<f64>,
    pub peak_omega: f64,
    pub mean_omega: f64,
    /// Photons contained in the tabulated band.
    pub total: f64,
}

/// Everything a single evaluation reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YieldResult {
    pub photon_number: f64,
    /// J.
    pub radiated_energy: f64,
    /// m/s.
    pub v_max: f64,
    pub beta_effective: f64,
    /// `0.1 (v_max/c)⁴`.
    pub bound_value: f64,
    pub supraluminal: bool,
    /// Absolute error estimate of `photon_number`.
    pub quadrature_error_estimate: f64,
}

impl YieldResult {
    pub fn zero() -> Self {
        Self {
            photon_number: 0.0,
            radiated_energy: 0.0,
            v_max: 0.0,
            beta_effective: 0.0,
            bound_value: 0.0,
            supraluminal: false,
            quadrature_error_estimate: 0.0,
        }
    }
}

/// Photon number and radiated energy with their error estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralIntegrals {
    pub photon_number: Estimate<f64>,
    /// J.
    pub radiated_energy: Estimate<f64>,
    /// Highest angular frequency included, rad/s.
    pub omega_limit: f64,
    /// The integral was cut at the Nyquist frequency of sampled data.
    pub band_limited: bool,
}

enum Support {
    /// Whole time axis; `core` is the half-width (in u) integrated directly.
    Line { core: f64 },
    /// Finite record `[start, end]` in u, held at `left`/`right` outside.
    /// Sampled records also carry the profile as exact polynomial pieces.
    Window {
        knots: Vec<f64>,
        left: f64,
        right: f64,
        pieces: Option<Vec<Piece>>,
    },
}

/// One interpolation interval of a sampled profile: `p(a + h s) = Σ c_k s^k`.
struct Piece {
    a: f64,
    h: f64,
    coef: [f64; 7],
}

/// Normalised dynamic area of a sampled trace as polynomial pieces in u.
/// R is cubic on each interval, so `R² + offset − b²` has degree six.
fn profile_pieces(
    interp: &crate::trajectory::MonotoneCubic,
    origin: f64,
    ts: f64,
    baseline: f64,
    offset: f64,
    scale: f64,
) -> Vec<Piece> {
    let knots = interp.knots();
    (0..knots.len() - 1)
        .map(|i| {
            let c = interp.segment_coefficients(i);
            let mut d = [0.0; 7];
            for (j, cj) in c.iter().enumerate() {
                for (k, ck) in c.iter().enumerate() {
                    d[j + k] += cj * ck;
                }
            }
            d[0] = (c[0] - baseline) * (c[0] + baseline) + offset;
            for v in &mut d {
                *v /= scale;
            }
            let a = (knots[i] - origin) / ts;
            let b = (knots[i + 1] - origin) / ts;
            Piece { a, h: b - a, coef: d }
        })
        .collect()
}

/// `M_k(θ) = ∫₀¹ s^k e^{iθs} ds` for k = 0..6.
fn oscillatory_moments(theta: f64) -> [Complex64; 7] {
    let mut m = [Complex64::new(0.0, 0.0); 7];
    if theta.abs() <= 2.0 {
        // power series; the terms fall below 1e-18 well before 40
        let mut term = Complex64::new(1.0, 0.0);
        let step = Complex64::new(0.0, theta);
        for j in 0..40 {
            for (k, mk) in m.iter_mut().enumerate() {
                *mk += term / (k + j + 1) as f64;
            }
            term = term * step / (j + 1) as f64;
            if term.norm() < 1e-18 {
                break;
            }
        }
    } else {
        let e = Complex64::from_polar(1.0, theta);
        let inv = Complex64::new(0.0, -1.0 / theta);
        m[0] = (e - 1.0) * inv;
        for k in 1..7 {
            m[k] = (e - m[k - 1] * k as f64) * inv;
        }
    }
    m
}

/// `∫ p(u) e^{iwu} du` over all pieces, integrated exactly.
fn piecewise_transform(pieces: &[Piece], w: f64) -> Estimate<Complex64> {
    let mut acc_re = CompensatedSum::new();
    let mut acc_im = CompensatedSum::new();
    let mut magnitude = 0.0;
    let mut cached_h = f64::NAN;
    let mut moments = [Complex64::new(0.0, 0.0); 7];
    for piece in pieces {
        // uniformly sampled records differ in h only by rounding
        if !((piece.h - cached_h).abs() <= 4.0 * f64::EPSILON * piece.h) {
            cached_h = piece.h;
            moments = oscillatory_moments(w * piece.h);
        }
        let mut local = Complex64::new(0.0, 0.0);
        for (c, mk) in piece.coef.iter().zip(&moments) {
            local += mk * *c;
            magnitude += c.abs() * piece.h;
        }
        let v = local * Complex64::from_polar(piece.h, w * piece.a);
        acc_re.add(v.re);
        acc_im.add(v.im);
    }
    Estimate {
        value: Complex64::new(acc_re.value(), acc_im.value()),
        error: 64.0 * f64::EPSILON * magnitude,
    }
}

/// Precomputed nondimensional view of one trajectory.
pub struct SpectralModel<'a> {
    traj: &'a Trajectory,
    settings: QuadratureSettings,
    scales: Scales,
    /// Time of u = 0, s.
    origin: f64,
    /// Area used to normalise the profile, m².
    amplitude: f64,
    /// Additive constant applied before normalisation (r0² in raw mode).
    offset: f64,
    /// Peak dynamic area in units of (c t_s)².
    depth: f64,
    support: Support,
    /// ∫ |p(u)| du, the tolerance scale of every form factor.
    abs_area: f64,
    /// Nyquist limit in w, for sampled data.
    nyquist: Option<f64>,
}

impl<'a> SpectralModel<'a> {
    pub fn new(traj: &'a Trajectory, settings: &QuadratureSettings) -> Result<Self, SpectralError> {
        Self::with_scales(traj, traj.natural_scales(), settings)
    }

    /// Use explicit reference scales instead of the trajectory's own.
    pub fn with_scales(
        traj: &'a Trajectory,
        scales: Scales,
        settings: &QuadratureSettings,
    ) -> Result<Self, SpectralError> {
        settings.validate()?;
        let scales = Scales::new(scales.length, scales.time)?;
        let ts = scales.time;
        let (origin, amplitude, offset, support, nyquist) = match traj {
            Trajectory::Lorentzian(p) => {
                let origin = p.center();
                let offset = if settings.subtract_baseline {
                    0.0
                } else {
                    p.r0 * p.r0
                };
                let support = if settings.subtract_baseline {
                    Support::Line {
                        core: CORE_HALF_WIDTHS * p.gamma / ts,
                    }
                } else {
                    let u0 = -origin / ts;
                    Support::Window {
                        knots: vec![u0, 0.0, -u0],
                        left: 0.0,
                        right: 0.0,
                        pieces: None,
                    }
                };
                (origin, p.depth(), offset, support, None)
            }
            Trajectory::Tabulated(t) => {
                let origin = t.start();
                let b2 = t.baseline_r0() * t.baseline_r0();
                let (_, peak) = t.peak_area_offset();
                let knots: Vec<f64> = t.knots().iter().map(|&k| (k - origin) / ts).collect();
                let (offset, left, right) = if settings.subtract_baseline {
                    (0.0, t.area_offset(t.start()), t.area_offset(t.end()))
                } else {
                    (b2, 0.0, 0.0)
                };
                let max_gap = t
                    .knots()
                    .windows(2)
                    .map(|w| w[1] - w[0])
                    .fold(0.0, f64::max);
                let amplitude = if settings.subtract_baseline { peak } else { peak.max(b2) };
                let scale = if amplitude > 0.0 { amplitude } else { 1.0 };
                let pieces = profile_pieces(
                    t.interpolant(),
                    origin,
                    ts,
                    t.baseline_r0(),
                    offset,
                    scale,
                );
                let support = Support::Window {
                    knots,
                    left: left / scale,
                    right: right / scale,
                    pieces: Some(pieces),
                };
                (origin, amplitude, offset, support, Some(PI * ts / max_gap))
            }
        };
        let c_internal = scales.light_speed();
        let depth = amplitude / (scales.length * scales.length) / (c_internal * c_internal);
        let mut model = Self {
            traj,
            settings: *settings,
            scales,
            origin,
            amplitude,
            offset,
            depth,
            support,
            abs_area: 0.0,
            nyquist,
        };
        if !model.is_static() {
            model.abs_area = model.profile_abs_area()?;
        }
        Ok(model)
    }

    /// No dynamic component: every spectral quantity vanishes.
    pub fn is_static(&self) -> bool {
        self.amplitude == 0.0
    }

    pub fn scales(&self) -> Scales {
        self.scales
    }

    fn area(&self, t: f64) -> f64 {
        match self.traj {
            Trajectory::Lorentzian(p) => p.area_offset(t),
            Trajectory::Tabulated(tab) => tab.area_offset(tab.start().max(t.min(tab.end()))),
        }
    }

    /// Normalised dynamic area at nondimensional time `u`.
    fn profile(&self, u: f64) -> f64 {
        (self.area(self.origin + u * self.scales.time) + self.offset) / self.amplitude
    }

    fn inner_tolerance(&self) -> Tolerance {
        Tolerance {
            abs: self
                .settings
                .abs_tol
                .max(self.settings.rel_tol * FORM_FACTOR_TOL_FACTOR * self.abs_area),
            rel: 0.0,
        }
    }

    fn plan(&self, rule: Rule, max_width: f64) -> PanelPlan {
        PanelPlan {
            rule,
            max_width,
            max_panels: self.settings.max_panels,
        }
    }

    fn oscillation_width(&self, w: f64) -> f64 {
        if w == 0.0 {
            f64::INFINITY
        } else {
            2.0 * PI / w.abs() / self.settings.oscillation_resolution as f64
        }
    }

    fn profile_abs_area(&self) -> Result<f64, SpectralError> {
        let tol = Tolerance {
            abs: self.settings.abs_tol,
            rel: self.settings.rel_tol * FORM_FACTOR_TOL_FACTOR,
        };
        match &self.support {
            Support::Line { core } => {
                let core = *core;
                let plan = self.plan(Rule::Gk21, f64::INFINITY);
                let mid: Integral<f64> =
                    integrate(|u| self.profile(u).abs(), &[-core, 0.0, core], plan, tol)
                        .map_err(SpectralError::quad("profile area"))?;
                let right = mapped_tail(|s| self.profile(s).abs(), core, plan, tol)?;
                let left = mapped_tail(|s| self.profile(-s).abs(), core, plan, tol)?;
                Ok(mid.value + right + left)
            }
            Support::Window { knots, .. } => {
                let plan = self.plan(Rule::Gk15, f64::INFINITY);
                let r: Integral<f64> = integrate(|u| self.profile(u).abs(), knots, plan, tol)
                    .map_err(SpectralError::quad("profile area"))?;
                Ok(r.value)
            }
        }
    }

    /// Transform of the normalised profile at nondimensional frequency `w`.
    fn normalized_transform(&self, w: f64) -> Result<Estimate<Complex64>, SpectralError> {
        if self.is_static() {
            return Ok(Estimate {
                value: Complex64::new(0.0, 0.0),
                error: 0.0,
            });
        }
        let tol = self.inner_tolerance();
        let width = self.oscillation_width(w);
        match &self.support {
            Support::Line { core } => {
                let core = *core;
                let plan = self.plan(Rule::Gk15, width.min(core));
                let core_tol = Tolerance {
                    abs: 0.5 * tol.abs,
                    rel: 0.0,
                };
                let mid: Integral<Complex64> = integrate(
                    |u| Complex64::from_polar(self.profile(u), w * u),
                    &[-core, 0.0, core],
                    plan,
                    core_tol,
                )
                .map_err(SpectralError::quad("form factor core"))?;
                let tail_tol = Tolerance {
                    abs: 0.25 * tol.abs,
                    rel: 0.0,
                };
                let right = oscillatory_tail(|s| self.profile(s), core, w, plan, tail_tol, &self.settings)?;
                let left =
                    oscillatory_tail(|s| self.profile(-s), core, -w, plan, tail_tol, &self.settings)?;
                Ok(Estimate {
                    value: mid.value + right.value + left.value,
                    error: mid.error + right.error + left.error,
                })
            }
            Support::Window {
                knots,
                left,
                right,
                pieces,
            } => {
                let body = match pieces {
                    Some(pieces) => piecewise_transform(pieces, w),
                    None => {
                        let plan = self.plan(Rule::Gk15, width);
                        let r: Integral<Complex64> = integrate(
                            |u| Complex64::from_polar(self.profile(u), w * u),
                            knots,
                            plan,
                            tol,
                        )
                        .map_err(SpectralError::quad("form factor"))?;
                        Estimate {
                            value: r.value,
                            error: r.error,
                        }
                    }
                };
                let mut value = body.value;
                if w != 0.0 && (*left != 0.0 || *right != 0.0) {
                    let u0 = knots[0];
                    let u1 = knots[knots.len() - 1];
                    let held = Complex64::from_polar(*left, w * u0)
                        - Complex64::from_polar(*right, w * u1);
                    value += held / Complex64::new(0.0, w);
                }
                Ok(Estimate {
                    value,
                    error: body.error,
                })
            }
        }
    }

    /// F(Ω) in s³ (the time transform of the dynamic area divided by c²).
    pub fn form_factor(&self, omega: f64) -> Result<Estimate<Complex64>, SpectralError> {
        check_omega(omega)?;
        let ts = self.scales.time;
        let p = self.normalized_transform(omega * ts)?;
        let scale = ts * ts * ts * self.depth;
        let phase = Complex64::from_polar(1.0, omega * self.origin);
        Ok(Estimate {
            value: p.value * phase * scale,
            error: p.error * scale,
        })
    }

    /// dN/dΩ in s.
    pub fn spectral_density(
        &self,
        omega: f64,
        constants: &PhysicalConstants,
    ) -> Result<f64, SpectralError> {
        check_omega(omega)?;
        if self.is_static() || omega == 0.0 {
            return Ok(0.0);
        }
        let ts = self.scales.time;
        let w = omega * ts;
        let p = self.normalized_transform(w)?;
        Ok(constants.alpha * ts * self.depth * self.depth * w.powi(5) * p.value.norm_sqr())
    }

    /// Photon number and radiated energy from one pass over the spectrum.
    pub fn integrals(&self, constants: &PhysicalConstants) -> Result<SpectralIntegrals, SpectralError> {
        let ts = self.scales.time;
        if self.is_static() {
            let zero = Estimate {
                value: 0.0,
                error: 0.0,
            };
            return Ok(SpectralIntegrals {
                photon_number: zero,
                radiated_energy: zero,
                omega_limit: 0.0,
                band_limited: false,
            });
        }
        let failure: RefCell<Option<SpectralError>> = RefCell::new(None);
        let sample = |w: f64| -> Lanes {
            if failure.borrow().is_some() || w == 0.0 {
                return Lanes::default();
            }
            match self.normalized_transform(w) {
                Ok(p) => {
                    let m = p.value.norm();
                    let w5 = w.powi(5);
                    let n = w5 * m * m;
                    let dn = w5 * (2.0 * m * p.error + p.error * p.error);
                    Lanes([n, n * w, dn, dn * w])
                }
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    Lanes::default()
                }
            }
        };

        let thr = self.settings.tail_rel_threshold;
        let mut acc_n = CompensatedSum::new();
        let mut acc_e = CompensatedSum::new();
        let mut err_n = 0.0;
        let mut err_e = 0.0;
        let mut lo = 0.0;
        let mut hi = 1.0;
        let mut band_limited = false;
        let mut converged = false;
        let mut last_fraction = f64::INFINITY;

        for k in 0..MAX_DOUBLINGS {
            let mut upper = hi;
            let mut at_cap = false;
            if let Some(cap) = self.nyquist {
                if upper >= cap {
                    upper = cap;
                    at_cap = true;
                }
            }
            let scale = acc_n.value().max(acc_e.value());
            let tol = Tolerance {
                abs: self.settings.rel_tol * 0.1 * scale,
                rel: self.settings.rel_tol,
            };
            let plan = self.plan(Rule::Gk21, f64::INFINITY);
            let r: Integral<Lanes> = integrate(&sample, &[lo, upper], plan, tol)
                .map_err(SpectralError::quad("frequency integral"))?;
            if let Some(e) = failure.borrow_mut().take() {
                return Err(e);
            }
            let [n, e, dn, de] = r.value.0;
            acc_n.add(n);
            acc_e.add(e);
            err_n += r.error + dn;
            err_e += r.error + de;

            let total_n = acc_n.value();
            let total_e = acc_e.value();
            let fraction = if total_n > 0.0 {
                (n / total_n).max(e / total_e)
            } else {
                0.0
            };
            last_fraction = fraction;
            if k + 1 >= MIN_INTERVALS && fraction <= thr {
                converged = true;
                lo = upper;
                break;
            }
            if at_cap {
                lo = upper;
                if fraction <= self.settings.sampled_tail_rel_threshold {
                    band_limited = true;
                    converged = true;
                }
                break;
            }
            lo = upper;
            hi = 2.0 * upper;
        }
        if !converged {
            return Err(SpectralError::TailNotDecaying {
                omega: lo / ts,
                fraction: last_fraction,
            });
        }

        let prefactor = constants.alpha * self.depth * self.depth;
        let energy_factor = constants.hbar / ts;
        Ok(SpectralIntegrals {
            photon_number: Estimate {
                value: prefactor * acc_n.value(),
                error: prefactor * err_n,
            },
            radiated_energy: Estimate {
                value: prefactor * energy_factor * acc_e.value(),
                error: prefactor * energy_factor * err_e,
            },
            omega_limit: lo / ts,
            band_limited,
        })
    }

    /// Spectral density on `points` equally spaced frequencies in
    /// `[0, omega_max]`, with peak and mean frequency.
    pub fn spectrum_table(
        &self,
        omega_max: f64,
        points: usize,
        constants: &PhysicalConstants,
    ) -> Result<Spectrum, SpectralError> {
        if points < 2 {
            return Err(SpectralError::InvalidInput(format!(
                "spectrum needs at least 2 points, got {points}"
            )));
        }
        if !(omega_max.is_finite() && omega_max > 0.0) {
            return Err(SpectralError::InvalidInput(format!(
                "omega_max must be positive and finite, got {omega_max:e}"
            )));
        }
        let step = omega_max / (points - 1) as f64;
        let omegas: Vec<f64> = (0..points)
            .map(|i| if i + 1 == points { omega_max } else { step * i as f64 })
            .collect();
        let densities = omegas
            .par_iter()
            .map(|&om| self.spectral_density(om, constants))
            .collect::<Result<Vec<f64>, _>>()?;

        let total = simpson_uniform(&densities, step).max(0.0);
        if total == 0.0 {
            return Ok(Spectrum {
                omegas,
                densities,
                peak_omega: 0.0,
                mean_omega: 0.0,
                total: 0.0,
            });
        }
        let weighted: Vec<f64> = omegas.iter().zip(&densities).map(|(o, d)| o * d).collect();
        let mean_omega = simpson_uniform(&weighted, step) / total;

        let best = densities
            .iter()
            .enumerate()
            .fold(0, |b, (i, &d)| if d > densities[b] { i } else { b });
        let lo = omegas[best.saturating_sub(1)];
        let hi = omegas[(best + 1).min(points - 1)];
        let failure: RefCell<Option<SpectralError>> = RefCell::new(None);
        let (refined, value) = golden_section_max(
            |om| match self.spectral_density(om, constants) {
                Ok(d) => d,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NEG_INFINITY
                }
            },
            lo,
            hi,
            1e-10,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        let peak_omega = if value >= densities[best] {
            refined
        } else {
            omegas[best]
        };
        Ok(Spectrum {
            omegas,
            densities,
            peak_omega,
            mean_omega,
            total,
        })
    }
}

fn check_omega(omega: f64) -> Result<(), SpectralError> {
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(SpectralError::InvalidInput(format!(
            "omega must be non-negative and finite, got {omega:e}"
        )));
    }
    Ok(())
}

/// `∫_L^∞ g(s) ds` through the substitution `s = L/x`.
fn mapped_tail<G: Fn(f64) -> f64>(
    g: G,
    start: f64,
    plan: PanelPlan,
    tol: Tolerance,
) -> Result<f64, SpectralError> {
    let r: Integral<f64> = integrate(
        |x: f64| {
            let s = start / x;
            g(s) * start / (x * x)
        },
        &[0.0, 1.0],
        plan,
        tol,
    )
    .map_err(SpectralError::quad("profile tail"))?;
    Ok(r.value)
}

/// `∫_L^∞ g(s) e^{iws} ds` as a sum over half-period cycles, accelerated
/// with the epsilon algorithm. For w = 0 the plain integral is returned.
fn oscillatory_tail<G: Fn(f64) -> f64>(
    g: G,
    start: f64,
    w: f64,
    plan: PanelPlan,
    tol: Tolerance,
    settings: &QuadratureSettings,
) -> Result<Estimate<Complex64>, SpectralError> {
    if w == 0.0 {
        let v = mapped_tail(&g, start, PanelPlan { max_width: f64::INFINITY, ..plan }, tol)?;
        return Ok(Estimate {
            value: Complex64::new(v, 0.0),
            error: tol.abs,
        });
    }
    let half = PI / w.abs();
    let cycle_plan = PanelPlan {
        max_width: 2.0 * half / settings.oscillation_resolution as f64,
        ..plan
    };
    let term_tol = Tolerance {
        abs: 0.05 * tol.abs,
        rel: 0.0,
    };
    let mut re = EpsilonTable::new();
    let mut im = EpsilonTable::new();
    let mut partial = Complex64::new(0.0, 0.0);
    let mut term_errors = 0.0;
    let mut quiet = 0;
    for k in 0..MAX_TAIL_CYCLES {
        let a = start + half * k as f64;
        let b = a + half;
        let term: Integral<Complex64> = integrate(
            |s| Complex64::from_polar(g(s), w * s),
            &[a, b],
            cycle_plan,
            term_tol,
        )
        .map_err(SpectralError::quad("form factor tail"))?;
        partial += term.value;
        term_errors += term.error;
        re.push(partial.re);
        im.push(partial.im);

        if term.value.norm() <= 1e-3 * tol.abs {
            quiet += 1;
            if quiet >= 2 {
                return Ok(Estimate {
                    value: partial,
                    error: term_errors + term.value.norm(),
                });
            }
        } else {
            quiet = 0;
        }
        if k >= 4 {
            let extrapolation = re.error().max(im.error());
            if extrapolation + term_errors <= tol.abs {
                return Ok(Estimate {
                    value: Complex64::new(re.estimate(), im.estimate()),
                    error: extrapolation + term_errors,
                });
            }
        }
    }
    Err(SpectralError::Quadrature {
        context: "form factor tail",
        source: QuadratureError::NoConvergence {
            achieved: re.error().max(im.error()) + term_errors,
            tolerance: tol.abs,
            panels: MAX_TAIL_CYCLES,
        },
    })
}

/// Photon density, energy density and their propagated inner errors.
#[derive(Debug, Clone, Copy, Default)]
struct Lanes([f64; 4]);

impl Add for Lanes {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Lanes(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for Lanes {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Lanes(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Mul<f64> for Lanes {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Lanes(self.0.map(|v| v * k))
    }
}

impl QuadValue for Lanes {
    fn norm(self) -> f64 {
        self.0[0].abs().max(self.0[1].abs())
    }
}

impl CompensatedAccumulate for Lanes {
    type Acc = [CompensatedSum; 4];
    fn accumulate(acc: &mut Self::Acc, v: Self) {
        for (a, x) in acc.iter_mut().zip(v.0) {
            a.add(x);
        }
    }
    fn finish(acc: &Self::Acc) -> Self {
        Lanes(acc.map(|a| a.value()))
    }
}

pub fn form_factor(
    traj: &Trajectory,
    omega: f64,
    settings: &QuadratureSettings,
) -> Result<Estimate<Complex64>, SpectralError> {
    SpectralModel::new(traj, settings)?.form_factor(omega)
}

pub fn spectral_density(
    traj: &Trajectory,
    omega: f64,
    constants: &PhysicalConstants,
    settings: &QuadratureSettings,
) -> Result<f64, SpectralError> {
    SpectralModel::new(traj, settings)?.spectral_density(omega, constants)
}

pub fn photon_number(
    traj: &Trajectory,
    constants: &PhysicalConstants,
    settings: &QuadratureSettings,
) -> Result<Estimate<f64>, SpectralError> {
    Ok(SpectralModel::new(traj, settings)?
        .integrals(constants)?
        .photon_number)
}

/// Energy carried by the emitted pairs, `∫ ħΩ dN/dΩ dΩ`, in J.
pub fn radiated_energy(
    traj: &Trajectory,
    constants: &PhysicalConstants,
    settings: &QuadratureSettings,
) -> Result<Estimate<f64>, SpectralError> {
    Ok(SpectralModel::new(traj, settings)?
        .integrals(constants)?
        .radiated_energy)
}

pub fn spectrum_table(
    traj: &Trajectory,
    omega_max: f64,
    points: usize,
    constants: &PhysicalConstants,
    settings: &QuadratureSettings,
) -> Result<Spectrum, SpectralError> {
    SpectralModel::new(traj, settings)?.spectrum_table(omega_max, points, constants)
}

pub fn evaluate(
    traj: &Trajectory,
    constants: &PhysicalConstants,
    settings: &QuadratureSettings,
) -> Result<YieldResult, SpectralError> {
    let model = SpectralModel::new(traj, settings)?;
    let integrals = model.integrals(constants)?;
    let v_max = traj.max_surface_velocity();
    Ok(YieldResult {
        photon_number: integrals.photon_number.value,
        radiated_energy: integrals.radiated_energy.value,
        v_max,
        beta_effective: traj.beta_effective(),
        bound_value: oracles::velocity_bound(v_max, constants.c),
        supraluminal: v_max >= constants.c,
        quadrature_error_estimate: integrals.photon_number.error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{LorentzianPulse, TabulatedTrajectory};

    const UM: f64 = 1e-6;
    const NS: f64 = 1e-9;

    fn pulse() -> Trajectory {
        LorentzianPulse::new(2.0 * UM, 1.0 * UM, NS, 100.0 * NS)
            .unwrap()
            .into()
    }

    fn constant() -> Trajectory {
        TabulatedTrajectory::new((0..32).map(|i| (i as f64 * NS, 2.0 * UM)).collect())
            .unwrap()
            .into()
    }

    #[test]
    fn settings_validation() {
        let mut s = QuadratureSettings::default();
        assert!(s.validate().is_ok());
        s.oscillation_resolution = 3;
        assert!(s.validate().is_err());
        let s = QuadratureSettings {
            rel_tol: 0.0,
            ..Default::default()
        };
        assert!(s.validate().is_err());
    }

    #[test]
    fn lorentzian_transform_matches_closed_form() {
        let tr = pulse();
        let Trajectory::Lorentzian(p) = &tr else { unreachable!() };
        let s = QuadratureSettings::default();
        let model = SpectralModel::new(&tr, &s).unwrap();
        let beta = p.beta();
        let amp = PI * beta * beta * NS.powi(3);
        let f0 = model.form_factor(0.0).unwrap().value;
        assert!((f0.re + amp).abs() <= 1e-9 * amp, "{f0} vs {amp}");
        assert!(f0.im.abs() <= 1e-9 * amp);
        for wg in [0.3, 1.0, 4.0, 20.0] {
            let f = model.form_factor(wg / NS).unwrap().value.norm();
            let exact = amp * (-wg).exp();
            assert!(
                (f - exact).abs() <= 1e-9 * exact.max(1e-3 * amp),
                "w={wg}: {f:e} vs {exact:e}"
            );
        }
    }

    #[test]
    fn static_trajectory_is_dark() {
        let tr = constant();
        let s = QuadratureSettings::default();
        let c = PhysicalConstants::default();
        assert_eq!(form_factor(&tr, 1e9, &s).unwrap().value.norm(), 0.0);
        assert_eq!(spectral_density(&tr, 1e9, &c, &s).unwrap(), 0.0);
        assert_eq!(photon_number(&tr, &c, &s).unwrap().value, 0.0);
        assert_eq!(radiated_energy(&tr, &c, &s).unwrap().value, 0.0);
        let y = evaluate(&tr, &c, &s).unwrap();
        assert_eq!(y, YieldResult::zero());
    }

    #[test]
    fn density_is_zero_at_dc() {
        let s = QuadratureSettings::default();
        let c = PhysicalConstants::default();
        assert_eq!(spectral_density(&pulse(), 0.0, &c, &s).unwrap(), 0.0);
        assert!(spectral_density(&pulse(), -1.0, &c, &s).is_err());
    }

    #[test]
    fn unsubtracted_baseline_leaks_low_frequencies() {
        let tr = pulse();
        let raw = QuadratureSettings {
            subtract_baseline: false,
            ..Default::default()
        };
        let sub = QuadratureSettings::default();
        let om = 0.01 / NS;
        let f_raw = form_factor(&tr, om, &raw).unwrap().value.norm();
        let f_sub = form_factor(&tr, om, &sub).unwrap().value.norm();
        assert!(f_raw > 10.0 * f_sub, "{f_raw:e} vs {f_sub:e}");
    }

    #[test]
    fn piecewise_transform_matches_adaptive_rule() {
        let p = LorentzianPulse::isolated(2.0 * UM, 1.3 * UM, NS).unwrap();
        let samples: Vec<(f64, f64)> = (0..97)
            .map(|i| {
                // non-uniform spacing exercises the moment cache
                let x = -1.0 + 2.0 * i as f64 / 96.0;
                let t = p.center() + 12.0 * NS * x * (1.0 + 0.3 * x * x);
                (t, (p.r0 * p.r0 + p.area_offset(t)).sqrt())
            })
            .collect();
        let tr: Trajectory = TabulatedTrajectory::new(samples).unwrap().into();
        let s = QuadratureSettings::default();
        let model = SpectralModel::new(&tr, &s).unwrap();
        let Support::Window { knots, pieces: Some(pieces), .. } = &model.support else {
            unreachable!()
        };
        for w in [0.0, 0.05, 1.0, 7.5, 40.0] {
            let exact = piecewise_transform(pieces, w).value;
            let plan = model.plan(Rule::Gk21, model.oscillation_width(w));
            let tol = Tolerance { abs: 1e-12, rel: 0.0 };
            let r: Integral<Complex64> =
                integrate(|u| Complex64::from_polar(model.profile(u), w * u), knots, plan, tol)
                    .unwrap();
            assert!((exact - r.value).norm() < 1e-11, "w={w}: {exact} vs {}", r.value);
        }
    }

    #[test]
    fn moments_agree_across_branches() {
        for theta in [1.999_999, 2.000_001] {
            let m = oscillatory_moments(theta);
            for (k, mk) in m.iter().enumerate() {
                let n = 20_000;
                let h = 1.0 / n as f64;
                let f = |s: f64| Complex64::from_polar(s.powi(k as i32), theta * s);
                let mut acc = f(0.0) + f(1.0);
                for i in 1..n {
                    acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
                }
                let simpson = acc * h / 3.0;
                assert!((mk - simpson).norm() < 1e-13, "k={k} theta={theta}");
            }
        }
    }
}
