//! Photon yield of quantum vacuum radiation from a moving bubble interface.
//!
//! A bubble whose radius follows `R(τ)` radiates photon pairs; the number
//! of photons is `N = α ∫ dΩ Ω⁵ |F(Ω)|²` with `F` the time transform of the
//! dynamic area `(R² − r0²)/c²`. The crate evaluates this integral for
//! analytic Lorentzian collapses and for sampled radius traces, compares it
//! with closed forms and with the bound `N ≤ 0.1 (v_max/c)⁴`, and drives the
//! `bubblerad` command-line tool.

pub mod cli;
pub mod io;
pub mod numerics;
pub mod oracles;
pub mod spectral;
pub mod trajectory;
pub mod unitsys;
