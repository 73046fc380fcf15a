//! The quartic velocity bound, the 1500 m/s estimate and the gap to the
//! observed photon count.
//!
//!     cargo run --release --example velocity_bound

use bubblerad::oracles::{self, Convention, OBSERVED_PHOTONS_PER_FLASH, TYPICAL_SURFACE_SPEED};
use bubblerad::spectral::QuadratureSettings;
use bubblerad::trajectory::{LorentzianPulse, Trajectory};
use bubblerad::unitsys::PhysicalConstants;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let constants = PhysicalConstants::default();
    let settings = QuadratureSettings::default();
    let c = constants.c;

    let bound = oracles::velocity_bound(TYPICAL_SURFACE_SPEED, c);
    let beta = TYPICAL_SURFACE_SPEED / c;
    println!("v_max = {TYPICAL_SURFACE_SPEED} m/s, v_max/c = {beta:.4e}");
    println!("  bound 0.1 (v/c)^4          {bound:.3e}");
    for conv in [Convention::Adopted, Convention::Stated] {
        let n = oracles::lorentzian_photon_number_with(constants.alpha, beta, conv)?;
        println!("  K alpha (v/c)^4, K = {conv:<9} {n:.3e}");
    }

    let pulse = LorentzianPulse::isolated(2e-6, 1e-6, 1e-9)?.with_max_velocity(TYPICAL_SURFACE_SPEED)?;
    let traj = Trajectory::from(pulse);
    let report = oracles::bound_check(&traj, &constants, &settings)?;
    println!("  full pipeline (rmin/r0 = 0.5, gamma = {:.3e} s)  {:.3e}", pulse.gamma, report.photon_number);
    println!("  satisfied: {}, N/(v/c)^4 = {:.4}", report.satisfied, report.ratio);

    let gap = oracles::observed_gap(bound, OBSERVED_PHOTONS_PER_FLASH)?;
    println!("deficit against {OBSERVED_PHOTONS_PER_FLASH:.0e} observed photons: {gap:.3e}");

    // The ratio N/(v_max/c)^4 of this pulse family depends only on rmin/r0.
    println!("\nrmin/r0   N/(v_max/c)^4   (closed form)   pipeline");
    for ratio in [0.05, 0.25, 0.5, 0.6, 0.7, 0.9, 0.95] {
        let p = LorentzianPulse::isolated(2e-6, 2e-6 * ratio, 1e-9)?;
        let r = oracles::bound_check(&p.into(), &constants, &settings)?;
        let closed = oracles::lorentzian_bound_ratio(constants.alpha, ratio)?;
        println!("{ratio:<8}  {:<14.4}  {closed:<14.4}  satisfied = {}", r.ratio, r.satisfied);
    }
    Ok(())
}
