//! Sweep β over four decades and watch the quartic law.
//!
//!     cargo run --release --example parameter_sweep

use bubblerad::cli::{run_sweep, Scale, SweepParameter, SweepSpec};
use bubblerad::io;
use bubblerad::spectral::QuadratureSettings;
use bubblerad::trajectory::LorentzianPulse;
use bubblerad::unitsys::PhysicalConstants;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = LorentzianPulse::isolated(2e-6, 1e-6, 1e-9)?;
    let spec = SweepSpec {
        parameter: SweepParameter::Beta,
        from: 1e-6,
        to: 1e-2,
        points: 5,
        scale: Scale::Log,
    };
    spec.validate()?;
    let rows = run_sweep(&spec, &base, &PhysicalConstants::default(), &QuadratureSettings::default());
    print!("{}", io::render_sweep_csv(spec.parameter.name(), &rows));

    let n: Vec<f64> = rows
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok().map(|p| p.photon_number))
        .collect();
    for w in n.windows(2) {
        println!("ratio per decade of beta: {:.6e}", w[1] / w[0]);
    }
    Ok(())
}
