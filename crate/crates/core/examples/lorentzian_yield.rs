//! Photon number of a Lorentzian collapse: numeric integral vs closed form.
//!
//!     cargo run --release --example lorentzian_yield

use bubblerad::oracles::{self, Convention};
use bubblerad::spectral::{self, QuadratureSettings};
use bubblerad::trajectory::{LorentzianPulse, Trajectory};
use bubblerad::unitsys::PhysicalConstants;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let constants = PhysicalConstants::default();
    let settings = QuadratureSettings::default();

    // r0 = 2 µm collapsing to 1 µm with a 1 ns half-width
    let pulse = LorentzianPulse::isolated(2e-6, 1e-6, 1e-9)?;
    let traj = Trajectory::from(pulse);
    let result = spectral::evaluate(&traj, &constants, &settings)?;

    let adopted = oracles::lorentzian_photon_number(constants.alpha, pulse.beta())?;
    let stated =
        oracles::lorentzian_photon_number_with(constants.alpha, pulse.beta(), Convention::Stated)?;

    println!("beta                 {:.6e}", pulse.beta());
    println!("N (numeric)          {:.12e} +- {:.1e}", result.photon_number, result.quadrature_error_estimate);
    println!("N (K = {})     {adopted:.12e}", Convention::Adopted);
    println!("N (K = {})    {stated:.12e}", Convention::Stated);
    println!("radiated energy      {:.6e} J", result.radiated_energy);
    println!(
        "closed-form energy   {:.6e} J",
        oracles::lorentzian_radiated_energy(constants.alpha, pulse.beta(), pulse.gamma, constants.hbar)?
    );
    println!("relative deviation   {:.2e}", (result.photon_number - adopted).abs() / adopted);
    Ok(())
}
