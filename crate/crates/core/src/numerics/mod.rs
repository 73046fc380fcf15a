//! Numerical building blocks shared by the trajectory and spectral modules.

pub mod extrapolation;
pub mod quadrature;
pub mod search;
pub mod summation;

pub use extrapolation::EpsilonTable;
pub use quadrature::{
    gauss_kronrod, integrate, simpson_uniform, Integral, PanelPlan, QuadValue, QuadratureError,
    Rule, Tolerance,
};
pub use search::{golden_section_max, scan_and_refine};
pub use summation::{compensated_sum, stable_mean, CompensatedSum};
