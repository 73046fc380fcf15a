//! Spectrum of a Lorentzian collapse: peak at 5/(2γ), mean at 3/γ, and a
//! total that does not depend on γ at fixed β.
//!
//!     cargo run --release --example spectrum_shape

use bubblerad::oracles;
use bubblerad::spectral::{self, QuadratureSettings};
use bubblerad::trajectory::LorentzianPulse;
use bubblerad::unitsys::PhysicalConstants;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let constants = PhysicalConstants::default();
    let settings = QuadratureSettings::default();

    println!("gamma [s]   peak [rad/s]  5/(2 gamma)   mean [rad/s]  3/gamma       N");
    for gamma in [1e-11, 1e-10, 1e-9, 1e-8] {
        let pulse = LorentzianPulse::from_beta(1e-3, 0.5, gamma, 100.0 * gamma)?;
        let traj = pulse.into();
        let s = spectral::spectrum_table(&traj, 20.0 / gamma, 2001, &constants, &settings)?;
        let n = spectral::photon_number(&traj, &constants, &settings)?.value;
        let (peak, mean) = oracles::peak_and_mean_omega(gamma)?;
        println!(
            "{gamma:<10.0e}  {:<12.6e}  {peak:<12.6e}  {:<12.6e}  {mean:<12.6e}  {n:.9e}",
            s.peak_omega, s.mean_omega
        );
    }
    Ok(())
}
