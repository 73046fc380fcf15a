//! Bubble-radius histories R(τ) and their kinematics.
//!
//! Two representations are supported: the analytic Lorentzian collapse, a
//! dip in R² of depth `r0² − rmin²` and half-width γ centred in the period,
//! and tabulated traces interpolated with a monotone cubic.

mod interp;

pub use interp::{smooth_quadratic, MonotoneCubic};

use thiserror::Error;

use crate::numerics::{scan_and_refine, stable_mean};
use crate::unitsys::{self, Quantity, Scales, UnitError, SPEED_OF_LIGHT};

/// Ratio period/γ required before the isolated-pulse closed forms apply.
pub const MIN_PERIOD_OVER_GAMMA: f64 = 40.0;

/// Samples scanned for the maximal surface velocity of a Lorentzian pulse.
pub const VELOCITY_SCAN_POINTS: usize = 4096;

/// Half-width of the velocity scan window, in units of γ.
pub const VELOCITY_SCAN_HALF_WIDTH: f64 = 10.0;

/// Relative τ-tolerance of the golden-section refinement.
pub const VELOCITY_REFINE_TOL: f64 = 1e-12;

pub const MIN_SAMPLES: usize = 8;

/// Fraction of samples at each end averaged for the default baseline radius.
pub const BASELINE_END_FRACTION: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrajectoryError {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("tau = {tau:e} s outside the trajectory domain [{start:e}, {end:e}] s")]
    OutOfDomain { tau: f64, start: f64, end: f64 },
    #[error("at least {MIN_SAMPLES} samples are required, got {0}")]
    TooFewSamples(usize),
    #[error("sample times must be strictly increasing (sample {index})")]
    NonMonotonicTime { index: usize },
    #[error("radius must be positive and finite (sample {index}: {value:e})")]
    NonPositiveRadius { index: usize, value: f64 },
    #[error(
        "period {period:e} s is shorter than {MIN_PERIOD_OVER_GAMMA} gamma ({gamma:e} s); the pulse is not isolated"
    )]
    NotIsolated { period: f64, gamma: f64 },
    #[error(transparent)]
    Unit(#[from] UnitError),
}

fn positive(name: &'static str, value: f64) -> Result<f64, TrajectoryError> {
    if !value.is_finite() || value <= 0.0 {
        return Err(TrajectoryError::InvalidParameter {
            name,
            reason: format!("must be positive and finite, got {value:e}"),
        });
    }
    Ok(value)
}

/// Analytic collapse: `R²(τ) = r0² − (r0² − rmin²) γ² / ((τ − T/2)² + γ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianPulse {
    /// Ambient radius, m.
    pub r0: f64,
    /// Radius at the centre of the collapse, m.
    pub rmin: f64,
    /// Half-width of the dip, s.
    pub gamma: f64,
    /// Pulsation period T, s. The pulse is centred at T/2.
    pub period: f64,
}

impl LorentzianPulse {
    pub fn new(r0: f64, rmin: f64, gamma: f64, period: f64) -> Result<Self, TrajectoryError> {
        positive("r0", r0)?;
        positive("rmin", rmin)?;
        positive("gamma", gamma)?;
        positive("period", period)?;
        if rmin >= r0 {
            return Err(TrajectoryError::InvalidParameter {
                name: "rmin",
                reason: format!("must be smaller than r0 ({rmin:e} >= {r0:e})"),
            });
        }
        Ok(Self {
            r0,
            rmin,
            gamma,
            period,
        })
    }

    /// Pulse with a period of 100 γ.
    pub fn isolated(r0: f64, rmin: f64, gamma: f64) -> Result<Self, TrajectoryError> {
        Self::new(r0, rmin, gamma, 100.0 * gamma)
    }

    /// Pulse with prescribed β and radius ratio `rmin/r0`.
    pub fn from_beta(
        beta: f64,
        rmin_over_r0: f64,
        gamma: f64,
        period: f64,
    ) -> Result<Self, TrajectoryError> {
        positive("beta", beta)?;
        if !(rmin_over_r0 > 0.0 && rmin_over_r0 < 1.0) {
            return Err(TrajectoryError::InvalidParameter {
                name: "rmin/r0",
                reason: format!("must lie in (0, 1), got {rmin_over_r0}"),
            });
        }
        let depth = (beta * SPEED_OF_LIGHT * gamma).powi(2);
        let r0 = (depth / ((1.0 - rmin_over_r0) * (1.0 + rmin_over_r0))).sqrt();
        Self::new(r0, rmin_over_r0 * r0, gamma, period)
    }

    pub fn center(&self) -> f64 {
        0.5 * self.period
    }

    /// `r0² − rmin²`, m².
    pub fn depth(&self) -> f64 {
        (self.r0 - self.rmin) * (self.r0 + self.rmin)
    }

    /// Characteristic surface velocity in units of c.
    pub fn beta(&self) -> f64 {
        self.depth().sqrt() / (SPEED_OF_LIGHT * self.gamma)
    }

    pub fn check_isolated(&self) -> Result<(), TrajectoryError> {
        if self.period < MIN_PERIOD_OVER_GAMMA * self.gamma {
            return Err(TrajectoryError::NotIsolated {
                period: self.period,
                gamma: self.gamma,
            });
        }
        Ok(())
    }

    /// Fraction of the dip area `∫ (R² − r0²) dτ` lying outside `[0, T]`.
    pub fn window_leakage(&self) -> f64 {
        1.0 - std::f64::consts::FRAC_2_PI * (0.5 * self.period / self.gamma).atan()
    }

    /// Same shape played `factor` times faster.
    pub fn compressed(&self, factor: f64) -> Result<Self, TrajectoryError> {
        positive("compression factor", factor)?;
        Self::new(self.r0, self.rmin, self.gamma / factor, self.period / factor)
    }

    /// Same pulse with its centre moved by `shift` seconds (the period grows
    /// by twice the shift so the pulse stays centred).
    pub fn translated(&self, shift: f64) -> Result<Self, TrajectoryError> {
        Self::new(self.r0, self.rmin, self.gamma, self.period + 2.0 * shift)
    }

    /// Same radii, time axis rescaled so that the maximal surface velocity
    /// equals `v_max` (m/s).
    pub fn with_max_velocity(&self, v_max: f64) -> Result<Self, TrajectoryError> {
        positive("v_max", v_max)?;
        let current = self.max_surface_velocity();
        self.compressed(v_max / current)
    }

    /// `R²(τ) − r0²` without domain checks.
    pub(crate) fn area_offset(&self, tau: f64) -> f64 {
        let x = tau - self.center();
        let g2 = self.gamma * self.gamma;
        -self.depth() * g2 / (x * x + g2)
    }

    fn radius_at(&self, tau: f64) -> f64 {
        (self.r0 * self.r0 + self.area_offset(tau)).sqrt()
    }

    fn velocity_at(&self, tau: f64) -> f64 {
        let x = tau - self.center();
        let g2 = self.gamma * self.gamma;
        let d = x * x + g2;
        self.depth() * g2 * x / (d * d * self.radius_at(tau))
    }

    fn check(&self, tau: f64) -> Result<(), TrajectoryError> {
        if !(0.0..=self.period).contains(&tau) {
            return Err(TrajectoryError::OutOfDomain {
                tau,
                start: 0.0,
                end: self.period,
            });
        }
        Ok(())
    }

    pub fn max_surface_velocity(&self) -> f64 {
        let c = self.center();
        let lo = (c - VELOCITY_SCAN_HALF_WIDTH * self.gamma).max(0.0);
        let hi = (c + VELOCITY_SCAN_HALF_WIDTH * self.gamma).min(self.period);
        let n = VELOCITY_SCAN_POINTS;
        let grid: Vec<f64> = (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect();
        let (_, v) = scan_and_refine(|t| self.velocity_at(t).abs(), &grid, VELOCITY_REFINE_TOL);
        v
    }
}

/// Sampled radius trace `(t, R)` with a monotone cubic interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedTrajectory {
    samples: Vec<(f64, f64)>,
    interp: MonotoneCubic,
    baseline_r0: f64,
    smoothing: Option<usize>,
}

impl TabulatedTrajectory {
    /// Validates the samples and sets the baseline to the mean radius over
    /// the first and last 5 % of samples.
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self, TrajectoryError> {
        if samples.len() < MIN_SAMPLES {
            return Err(TrajectoryError::TooFewSamples(samples.len()));
        }
        for (index, &(t, r)) in samples.iter().enumerate() {
            if !t.is_finite() {
                return Err(TrajectoryError::InvalidParameter {
                    name: "sample time",
                    reason: format!("sample {index} is not finite"),
                });
            }
            if !r.is_finite() || r <= 0.0 {
                return Err(TrajectoryError::NonPositiveRadius { index, value: r });
            }
            if index > 0 && t <= samples[index - 1].0 {
                return Err(TrajectoryError::NonMonotonicTime { index });
            }
        }
        let (t, r): (Vec<f64>, Vec<f64>) = samples.iter().copied().unzip();
        let baseline_r0 = default_baseline(&r);
        Ok(Self {
            interp: MonotoneCubic::new(t, r),
            samples,
            baseline_r0,
            smoothing: None,
        })
    }

    pub fn with_baseline(mut self, baseline_r0: f64) -> Result<Self, TrajectoryError> {
        self.baseline_r0 = positive("baseline_r0", baseline_r0)?;
        Ok(self)
    }

    /// Replace the interpolated radii by a local quadratic least-squares fit
    /// over `window` samples (odd, 5–11). The baseline is left unchanged.
    pub fn with_smoothing(mut self, window: usize) -> Result<Self, TrajectoryError> {
        if !(5..=11).contains(&window) || window % 2 == 0 {
            return Err(TrajectoryError::InvalidParameter {
                name: "smoothing window",
                reason: format!("must be odd and between 5 and 11, got {window}"),
            });
        }
        let (t, r): (Vec<f64>, Vec<f64>) = self.samples.iter().copied().unzip();
        let smoothed = smooth_quadratic(&t, &r, window);
        if let Some(index) = smoothed.iter().position(|&v| !(v > 0.0)) {
            return Err(TrajectoryError::NonPositiveRadius {
                index,
                value: smoothed[index],
            });
        }
        self.interp = MonotoneCubic::new(t, smoothed);
        self.smoothing = Some(window);
        Ok(self)
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn baseline_r0(&self) -> f64 {
        self.baseline_r0
    }

    pub fn smoothing(&self) -> Option<usize> {
        self.smoothing
    }

    pub fn start(&self) -> f64 {
        self.samples[0].0
    }

    pub fn end(&self) -> f64 {
        self.samples[self.samples.len() - 1].0
    }

    pub(crate) fn knots(&self) -> &[f64] {
        self.interp.knots()
    }

    pub(crate) fn interpolant(&self) -> &MonotoneCubic {
        &self.interp
    }

    pub(crate) fn radius_at(&self, tau: f64) -> f64 {
        self.interp.eval(tau)
    }

    /// `R²(τ) − baseline²` without domain checks (clamped to the samples).
    pub(crate) fn area_offset(&self, tau: f64) -> f64 {
        let r = self.interp.eval(tau);
        (r - self.baseline_r0) * (r + self.baseline_r0)
    }

    /// Largest `|R² − baseline²|` over the (possibly smoothed) knots.
    pub(crate) fn peak_area_offset(&self) -> (usize, f64) {
        self.interp
            .values()
            .iter()
            .map(|&r| ((r - self.baseline_r0) * (r + self.baseline_r0)).abs())
            .enumerate()
            .fold((0, 0.0), |best, (i, a)| if a > best.1 { (i, a) } else { best })
    }

    /// Half-width at half-depth of the dynamic-area dip, s. Falls back to
    /// half the record length when no dip is present.
    pub fn dip_half_width(&self) -> f64 {
        let duration = self.end() - self.start();
        let (k, peak) = self.peak_area_offset();
        if peak == 0.0 {
            return 0.5 * duration;
        }
        let half = 0.5 * peak;
        let knots = self.interp.knots();
        let level = |t: f64| self.area_offset(t).abs() - half;

        let left = (0..k)
            .rev()
            .find(|&j| level(knots[j]) < 0.0)
            .map(|j| bisect(&level, knots[j], knots[j + 1]));
        let right = (k + 1..knots.len())
            .find(|&j| level(knots[j]) < 0.0)
            .map(|j| bisect(&level, knots[j - 1], knots[j]));
        let centre = knots[k];
        match (left, right) {
            (Some(l), Some(r)) => 0.5 * (r - l),
            (Some(l), None) => centre - l,
            (None, Some(r)) => r - centre,
            (None, None) => 0.5 * duration,
        }
    }

    fn check(&self, tau: f64) -> Result<(), TrajectoryError> {
        if !(self.start()..=self.end()).contains(&tau) {
            return Err(TrajectoryError::OutOfDomain {
                tau,
                start: self.start(),
                end: self.end(),
            });
        }
        Ok(())
    }

    pub fn max_surface_velocity(&self) -> f64 {
        let knots = self.interp.knots();
        let mut grid = Vec::with_capacity(2 * knots.len());
        for w in knots.windows(2) {
            grid.push(w[0]);
            grid.push(0.5 * (w[0] + w[1]));
        }
        grid.push(knots[knots.len() - 1]);
        let speed = |t: f64| self.interp.derivative(t).abs();
        let (_, v) = scan_and_refine(speed, &grid, VELOCITY_REFINE_TOL);
        v
    }
}

fn default_baseline(radii: &[f64]) -> f64 {
    let n = radii.len();
    let k = ((BASELINE_END_FRACTION * n as f64).ceil() as usize).clamp(1, n / 2);
    let ends: Vec<f64> = radii[..k].iter().chain(&radii[n - k..]).copied().collect();
    stable_mean(&ends)
}

/// Root of `f` in `[a, b]` given `f(a) < 0 <= f(b)` or the reverse.
fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if !(a < m && m < b) {
            break;
        }
        let fm = f(m);
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// A bubble-radius history.
#[derive(Debug, Clone, PartialEq)]
pub enum Trajectory {
    Lorentzian(LorentzianPulse),
    Tabulated(TabulatedTrajectory),
}

impl From<LorentzianPulse> for Trajectory {
    fn from(p: LorentzianPulse) -> Self {
        Trajectory::Lorentzian(p)
    }
}

impl From<TabulatedTrajectory> for Trajectory {
    fn from(t: TabulatedTrajectory) -> Self {
        Trajectory::Tabulated(t)
    }
}

impl Trajectory {
    /// Closed time interval on which the radius is defined, s.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Trajectory::Lorentzian(p) => (0.0, p.period),
            Trajectory::Tabulated(t) => (t.start(), t.end()),
        }
    }

    pub fn radius(&self, tau: f64) -> Result<f64, TrajectoryError> {
        match self {
            Trajectory::Lorentzian(p) => {
                p.check(tau)?;
                Ok(p.radius_at(tau))
            }
            Trajectory::Tabulated(t) => {
                t.check(tau)?;
                Ok(t.radius_at(tau))
            }
        }
    }

    /// `R²(τ) − r0²` (Lorentzian) or `R²(τ) − baseline²` (tabulated), m².
    pub fn dynamic_area(&self, tau: f64) -> Result<f64, TrajectoryError> {
        match self {
            Trajectory::Lorentzian(p) => {
                p.check(tau)?;
                Ok(p.area_offset(tau))
            }
            Trajectory::Tabulated(t) => {
                t.check(tau)?;
                Ok(t.area_offset(tau))
            }
        }
    }

    /// dR/dτ, m/s.
    pub fn surface_velocity(&self, tau: f64) -> Result<f64, TrajectoryError> {
        match self {
            Trajectory::Lorentzian(p) => {
                p.check(tau)?;
                Ok(p.velocity_at(tau))
            }
            Trajectory::Tabulated(t) => {
                if !(tau > t.start() && tau < t.end()) {
                    return Err(TrajectoryError::OutOfDomain {
                        tau,
                        start: t.start(),
                        end: t.end(),
                    });
                }
                Ok(t.interp.derivative(tau))
            }
        }
    }

    /// Global maximum of |dR/dτ|, m/s.
    pub fn max_surface_velocity(&self) -> f64 {
        match self {
            Trajectory::Lorentzian(p) => p.max_surface_velocity(),
            Trajectory::Tabulated(t) => t.max_surface_velocity(),
        }
    }

    /// Time scale of the collapse: γ, or the fitted dip half-width.
    pub fn time_scale(&self) -> f64 {
        match self {
            Trajectory::Lorentzian(p) => p.gamma,
            Trajectory::Tabulated(t) => t.dip_half_width(),
        }
    }

    /// Reference scales for the nondimensional core.
    pub fn natural_scales(&self) -> Scales {
        let length = match self {
            Trajectory::Lorentzian(p) => p.r0,
            Trajectory::Tabulated(t) => t.baseline_r0,
        };
        Scales {
            length,
            time: self.time_scale(),
        }
    }

    /// β for a Lorentzian; for a tabulated trace the equivalent
    /// `sqrt(max |dynamic area|) / (c γ_fit)`.
    pub fn beta_effective(&self) -> f64 {
        match self {
            Trajectory::Lorentzian(p) => p.beta(),
            Trajectory::Tabulated(t) => {
                let (_, peak) = t.peak_area_offset();
                peak.sqrt() / (SPEED_OF_LIGHT * t.dip_half_width())
            }
        }
    }
}

/// Time for the surface to travel `radius` at `velocity`, s.
pub fn characteristic_time(radius: Quantity, velocity: Quantity) -> Result<f64, TrajectoryError> {
    Ok(unitsys::travel_time(radius, velocity)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const UM: f64 = 1e-6;
    const NS: f64 = 1e-9;

    fn pulse() -> LorentzianPulse {
        LorentzianPulse::new(2.0 * UM, 1.0 * UM, 1.0 * NS, 100.0 * NS).unwrap()
    }

    #[test]
    fn radius_at_centre_and_far_away() {
        let tr = Trajectory::from(pulse());
        let r = tr.radius(50.0 * NS).unwrap();
        assert!((r - 1.0 * UM).abs() < 1e-12 * UM);
        // closed form at tau = 0: R² = r0² - 3 um² / 2501
        let r0 = tr.radius(0.0).unwrap();
        let expected = (4.0 - 3.0 / 2501.0f64).sqrt() * UM;
        assert!((r0 - expected).abs() < 1e-14 * UM);
        assert!(((2.0 * UM - r0) / (2.0 * UM) - 1.5e-4).abs() < 1e-6);
        assert!((2.0 * UM - r0) / (2.0 * UM) < 4e-4);
        assert!(matches!(
            tr.radius(-1e-12),
            Err(TrajectoryError::OutOfDomain { .. })
        ));
        assert!(tr.radius(100.0 * NS + 1e-15).is_err());
    }

    #[test]
    fn dynamic_area_values() {
        let p = pulse();
        let tr = Trajectory::from(p);
        let depth = p.depth();
        assert!((tr.dynamic_area(50.0 * NS).unwrap() + depth).abs() < 1e-12 * depth);
        for tau in [49.0 * NS, 51.0 * NS] {
            let a = tr.dynamic_area(tau).unwrap();
            assert!((a + 0.5 * depth).abs() < 1e-12 * depth);
        }
    }

    #[test]
    fn velocity_values() {
        let tr = Trajectory::from(pulse());
        assert_eq!(tr.surface_velocity(50.0 * NS).unwrap(), 0.0);
        let v = tr.surface_velocity(51.0 * NS).unwrap();
        let r = (4.0f64 - 1.5).sqrt() * UM;
        let expected = 3.0 * UM * UM / (4.0 * NS * r);
        assert!((v - expected).abs() < 1e-9 * expected);
        assert!((v - 474.3).abs() < 0.05);
        // far tail of a long pulse
        let long = LorentzianPulse::new(2.0 * UM, 1.0 * UM, 1.0 * NS, 1e6 * NS).unwrap();
        let vt = Trajectory::from(long).surface_velocity(0.0).unwrap();
        assert!(vt.abs() < 1e-12 * v);
    }

    #[test]
    fn velocity_matches_richardson_difference() {
        let tr = Trajectory::from(pulse());
        for tau in [49.3, 49.9, 50.4, 51.7, 55.0].map(|x| x * NS) {
            let d = |h: f64| {
                (tr.radius(tau + h).unwrap() - tr.radius(tau - h).unwrap()) / (2.0 * h)
            };
            let h = 1e-3 * NS;
            let rich = (4.0 * d(h / 2.0) - d(h)) / 3.0;
            let v = tr.surface_velocity(tau).unwrap();
            assert!((rich - v).abs() <= 1e-8 * v.abs(), "tau={tau:e}: {rich} vs {v}");
        }
    }

    #[test]
    fn beta_values() {
        let p = pulse();
        assert!((p.beta() - 5.7774e-6).abs() < 1e-9);
        let near = LorentzianPulse::new(2.0 * UM, 2.0 * UM * (1.0 - 1e-12), NS, 100.0 * NS).unwrap();
        assert!(near.beta() < 1e-10);
        let scaled = LorentzianPulse::new(6.0 * UM, 3.0 * UM, NS, 100.0 * NS).unwrap();
        assert!((scaled.beta() / p.beta() - 3.0).abs() < 1e-14);
        let fast = p.compressed(2.0).unwrap();
        assert!((fast.beta() / p.beta() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn from_beta_round_trip() {
        let p = LorentzianPulse::from_beta(1e-4, 0.5, 1e-9, 1e-7).unwrap();
        assert!((p.beta() - 1e-4).abs() < 1e-16);
        assert!((p.rmin / p.r0 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn invalid_pulses() {
        assert!(LorentzianPulse::new(1.0, 2.0, 1.0, 100.0).is_err());
        assert!(LorentzianPulse::new(1.0, 1.0, 1.0, 100.0).is_err());
        assert!(LorentzianPulse::new(1.0, 0.5, 0.0, 100.0).is_err());
        let short = LorentzianPulse::new(1.0, 0.5, 1.0, 39.0).unwrap();
        assert!(matches!(
            short.check_isolated(),
            Err(TrajectoryError::NotIsolated { .. })
        ));
        assert!(LorentzianPulse::new(1.0, 0.5, 1.0, 40.0)
            .unwrap()
            .check_isolated()
            .is_ok());
    }

    #[test]
    fn max_velocity_scales_with_compression() {
        let p = pulse();
        let v1 = p.max_surface_velocity();
        let v10 = p.compressed(10.0).unwrap().max_surface_velocity();
        assert!((v10 / v1 - 10.0).abs() < 1e-9);
        let shifted = p.translated(17.0 * NS).unwrap().max_surface_velocity();
        assert!((shifted / v1 - 1.0).abs() < 1e-12);
        let target = p.with_max_velocity(1500.0).unwrap();
        assert!((target.max_surface_velocity() - 1500.0).abs() < 1e-9 * 1500.0);
    }

    fn constant_trace(n: usize) -> TabulatedTrajectory {
        TabulatedTrajectory::new((0..n).map(|i| (i as f64 * 1e-9, 3.3e-6)).collect()).unwrap()
    }

    #[test]
    fn constant_trace_is_static() {
        let t = constant_trace(16);
        assert_eq!(t.baseline_r0(), 3.3e-6);
        let tr = Trajectory::from(t);
        for k in 0..=30 {
            let tau = k as f64 * 0.5e-9;
            assert_eq!(tr.dynamic_area(tau).unwrap(), 0.0);
        }
        assert_eq!(tr.max_surface_velocity(), 0.0);
        assert_eq!(tr.beta_effective(), 0.0);
    }

    #[test]
    fn tabulated_validation() {
        let ok: Vec<(f64, f64)> = (0..8).map(|i| (i as f64, 1.0)).collect();
        assert!(TabulatedTrajectory::new(ok[..7].to_vec()).is_err());
        let mut dup = ok.clone();
        dup[3].0 = dup[2].0;
        assert_eq!(
            TabulatedTrajectory::new(dup),
            Err(TrajectoryError::NonMonotonicTime { index: 3 })
        );
        let mut neg = ok.clone();
        neg[5].1 = 0.0;
        assert!(matches!(
            TabulatedTrajectory::new(neg),
            Err(TrajectoryError::NonPositiveRadius { index: 5, .. })
        ));
        let t = TabulatedTrajectory::new(ok).unwrap();
        assert!(t.clone().with_smoothing(4).is_err());
        assert!(t.clone().with_smoothing(13).is_err());
        assert!(t.clone().with_smoothing(5).is_ok());
        let tr = Trajectory::from(t);
        assert!(tr.surface_velocity(0.0).is_err());
        assert!(tr.surface_velocity(7.0).is_err());
        assert!(tr.surface_velocity(3.5).is_ok());
    }

    #[test]
    fn tabulated_lorentzian_kinematics() {
        let p = pulse();
        let n = 1025;
        let samples: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let t = 30.0 * NS + 40.0 * NS * i as f64 / (n - 1) as f64;
                (t, Trajectory::from(p).radius(t).unwrap())
            })
            .collect();
        let tab = Trajectory::from(TabulatedTrajectory::new(samples.clone()).unwrap());
        for &(t, r) in samples.iter().step_by(37) {
            assert_eq!(tab.radius(t).unwrap(), r);
        }
        let rel = tab.max_surface_velocity() / p.max_surface_velocity() - 1.0;
        assert!(rel.abs() < 1e-3, "v_max rel err {rel}");
        let hw = tab.time_scale();
        assert!((hw / NS - 1.0).abs() < 0.02, "half width {hw:e}");
    }

    #[test]
    fn characteristic_times() {
        let um = Quantity::parse(1.0, "um").unwrap();
        assert_eq!(
            characteristic_time(um, Quantity::parse(1.0, "km/s").unwrap()).unwrap(),
            1e-9
        );
        let t = characteristic_time(um, Quantity::parse(1500.0, "m/s").unwrap()).unwrap();
        assert!((t - 0.667e-9).abs() < 1e-12);
        assert_eq!(
            characteristic_time(
                Quantity::parse(1.0, "m").unwrap(),
                Quantity::parse(1.0, "m/s").unwrap()
            )
            .unwrap(),
            1.0
        );
    }
}
