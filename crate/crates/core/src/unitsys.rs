//! Physical constants and unit handling at the library boundary.
//!
//! Everything inside the numerical core is nondimensional: lengths are
//! measured in a reference length, times in a reference time and velocities
//! in units of the speed of light. SI values only appear at the edges.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Speed of light in vacuum, m/s (exact by definition of the metre).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Coupling factor for a water/air interface.
pub const DEFAULT_ALPHA: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnitError {
    #[error("unknown unit tag `{0}` (expected one of um, m, ns, s, km/s, m/s)")]
    UnknownUnit(String),
    #[error("non-finite {what}: {value}")]
    NonFinite { what: &'static str, value: f64 },
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("expected a {expected} unit, got {found}")]
    WrongDimension { expected: Dimension, found: Unit },
}

/// Constants entering the photon-number integral.
///
/// `c` and `hbar` are compiled in; only the coupling `alpha` is a model
/// parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub c: f64,
    pub hbar: f64,
    pub alpha: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            c: SPEED_OF_LIGHT,
            hbar: HBAR,
            alpha: DEFAULT_ALPHA,
        }
    }
}

impl PhysicalConstants {
    pub fn with_alpha(alpha: f64) -> Result<Self, UnitError> {
        if !alpha.is_finite() {
            return Err(UnitError::NonFinite {
                what: "alpha",
                value: alpha,
            });
        }
        if alpha <= 0.0 {
            return Err(UnitError::NonPositive {
                what: "alpha",
                value: alpha,
            });
        }
        Ok(Self {
            alpha,
            ..Self::default()
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Time,
    Velocity,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::Length => "length",
            Dimension::Time => "time",
            Dimension::Velocity => "velocity",
        })
    }
}

/// Unit tags accepted at the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    Micrometre,
    Metre,
    Nanosecond,
    Second,
    KilometrePerSecond,
    MetrePerSecond,
}

impl Unit {
    pub const ALL: [Unit; 6] = [
        Unit::Micrometre,
        Unit::Metre,
        Unit::Nanosecond,
        Unit::Second,
        Unit::KilometrePerSecond,
        Unit::MetrePerSecond,
    ];

    pub fn dimension(self) -> Dimension {
        match self {
            Unit::Micrometre | Unit::Metre => Dimension::Length,
            Unit::Nanosecond | Unit::Second => Dimension::Time,
            Unit::KilometrePerSecond | Unit::MetrePerSecond => Dimension::Velocity,
        }
    }

    /// Decimal exponent of the unit relative to its SI base.
    fn decade(self) -> i32 {
        match self {
            Unit::Micrometre => -6,
            Unit::Metre | Unit::Second | Unit::MetrePerSecond => 0,
            Unit::Nanosecond => -9,
            Unit::KilometrePerSecond => 3,
        }
    }

    /// SI value of one unit.
    pub fn si_factor(self) -> f64 {
        power_of_ten(self.decade())
    }

    pub fn tag(self) -> &'static str {
        match self {
            Unit::Micrometre => "um",
            Unit::Metre => "m",
            Unit::Nanosecond => "ns",
            Unit::Second => "s",
            Unit::KilometrePerSecond => "km/s",
            Unit::MetrePerSecond => "m/s",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Unit {
    type Err = UnitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "um" | "µm" | "μm" => Ok(Unit::Micrometre),
            "m" => Ok(Unit::Metre),
            "ns" => Ok(Unit::Nanosecond),
            "s" => Ok(Unit::Second),
            "km/s" => Ok(Unit::KilometrePerSecond),
            "m/s" => Ok(Unit::MetrePerSecond),
            other => Err(UnitError::UnknownUnit(other.to_string())),
        }
    }
}

/// Exact decimal literals for the decades that can occur between the
/// supported units, so that ratios such as µm/(km/s) come out as the exact
/// nearest double of the decimal result.
fn power_of_ten(exp: i32) -> f64 {
    match exp {
        -18 => 1e-18,
        -15 => 1e-15,
        -12 => 1e-12,
        -9 => 1e-9,
        -6 => 1e-6,
        -3 => 1e-3,
        0 => 1.0,
        3 => 1e3,
        6 => 1e6,
        9 => 1e9,
        12 => 1e12,
        e => 10f64.powi(e),
    }
}

/// A value tagged with one of the supported units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub unit: Unit,
}

impl Quantity {
    pub fn new(value: f64, unit: Unit) -> Result<Self, UnitError> {
        if !value.is_finite() {
            return Err(UnitError::NonFinite {
                what: "quantity",
                value,
            });
        }
        Ok(Self { value, unit })
    }

    pub fn parse(value: f64, tag: &str) -> Result<Self, UnitError> {
        Self::new(value, tag.parse()?)
    }

    pub fn to_si(self) -> f64 {
        self.value * self.unit.si_factor()
    }

    fn expect(self, dim: Dimension) -> Result<Self, UnitError> {
        if self.unit.dimension() == dim {
            Ok(self)
        } else {
            Err(UnitError::WrongDimension {
                expected: dim,
                found: self.unit,
            })
        }
    }
}

/// Reference scales of the internal unit system. Velocities are always
/// measured in units of `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scales {
    /// Reference length, m.
    pub length: f64,
    /// Reference time, s.
    pub time: f64,
}

impl Scales {
    pub fn new(length: f64, time: f64) -> Result<Self, UnitError> {
        for (what, value) in [("reference length", length), ("reference time", time)] {
            if !value.is_finite() {
                return Err(UnitError::NonFinite { what, value });
            }
            if value <= 0.0 {
                return Err(UnitError::NonPositive { what, value });
            }
        }
        Ok(Self { length, time })
    }

    pub fn to_internal(&self, q: Quantity) -> Result<f64, UnitError> {
        if !q.value.is_finite() {
            return Err(UnitError::NonFinite {
                what: "quantity",
                value: q.value,
            });
        }
        let si = q.to_si();
        Ok(match q.unit.dimension() {
            Dimension::Length => si / self.length,
            Dimension::Time => si / self.time,
            Dimension::Velocity => si / SPEED_OF_LIGHT,
        })
    }

    pub fn from_internal(&self, value: f64, unit: Unit) -> Result<Quantity, UnitError> {
        if !value.is_finite() {
            return Err(UnitError::NonFinite {
                what: "internal value",
                value,
            });
        }
        let si = match unit.dimension() {
            Dimension::Length => value * self.length,
            Dimension::Time => value * self.time,
            Dimension::Velocity => value * SPEED_OF_LIGHT,
        };
        Quantity::new(si / unit.si_factor(), unit)
    }

    /// The speed of light expressed in reference lengths per reference time.
    pub fn light_speed(&self) -> f64 {
        SPEED_OF_LIGHT * self.time / self.length
    }
}

/// Time needed to cover `length` at `velocity`, in seconds.
///
/// The decimal prefixes are combined exactly, so 1 µm at 1 km/s gives the
/// double nearest to 1 ns.
pub fn travel_time(length: Quantity, velocity: Quantity) -> Result<f64, UnitError> {
    let length = length.expect(Dimension::Length)?;
    let velocity = velocity.expect(Dimension::Velocity)?;
    for (what, value) in [("length", length.value), ("velocity", velocity.value)] {
        if !value.is_finite() {
            return Err(UnitError::NonFinite { what, value });
        }
        if value <= 0.0 {
            return Err(UnitError::NonPositive { what, value });
        }
    }
    let ratio = length.value / velocity.value;
    let decade = length.unit.decade() - velocity.unit.decade();
    if ratio == 1.0 {
        Ok(power_of_ten(decade))
    } else {
        Ok(ratio * power_of_ten(decade))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_scaling() {
        let s = Scales::new(1e-6, 1e-9).unwrap();
        let um = Quantity::parse(1.0, "µm").unwrap();
        assert_eq!(s.to_internal(um).unwrap(), 1.0);
        let ns = Quantity::parse(1.0, "ns").unwrap();
        assert_eq!(s.to_internal(ns).unwrap(), 1.0);
    }

    #[test]
    fn velocity_in_units_of_c() {
        let s = Scales::new(1.0, 1.0).unwrap();
        let v = s.to_internal(Quantity::parse(1500.0, "m/s").unwrap()).unwrap();
        assert_eq!(v, 1500.0 / 299_792_458.0);
        assert!((v - 5.0035e-6).abs() < 1e-9);
        let kms = s.to_internal(Quantity::parse(1.5, "km/s").unwrap()).unwrap();
        assert!((kms - v).abs() <= 1e-15 * v);
    }

    #[test]
    fn errors() {
        assert_eq!(
            "furlong".parse::<Unit>(),
            Err(UnitError::UnknownUnit("furlong".into()))
        );
        assert!(Quantity::new(f64::NAN, Unit::Metre).is_err());
        assert!(Quantity::new(f64::INFINITY, Unit::Second).is_err());
        assert!(Scales::new(0.0, 1.0).is_err());
        assert!(PhysicalConstants::with_alpha(-1.0).is_err());
        assert_eq!(PhysicalConstants::default().alpha, 1e-4);
    }

    #[test]
    fn travel_times() {
        let um = Quantity::parse(1.0, "um").unwrap();
        let kms = Quantity::parse(1.0, "km/s").unwrap();
        assert_eq!(travel_time(um, kms).unwrap(), 1e-9);
        let t = travel_time(um, Quantity::parse(1500.0, "m/s").unwrap()).unwrap();
        assert!((t - 0.6667e-9).abs() < 1e-13);
        let m = Quantity::parse(1.0, "m").unwrap();
        let ms = Quantity::parse(1.0, "m/s").unwrap();
        assert_eq!(travel_time(m, ms).unwrap(), 1.0);
        assert!(matches!(
            travel_time(kms, um),
            Err(UnitError::WrongDimension { .. })
        ));
    }
}
