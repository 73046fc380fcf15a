//! Ingest a sampled radius trace from CSV and compare its yield with the
//! analytic pulse it was sampled from.
//!
//!     cargo run --release --example tabulated_trace

use std::fmt::Write as _;

use bubblerad::io;
use bubblerad::spectral::{self, QuadratureSettings};
use bubblerad::trajectory::{LorentzianPulse, Trajectory};
use bubblerad::unitsys::PhysicalConstants;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let constants = PhysicalConstants::default();
    let settings = QuadratureSettings::default();
    let pulse = LorentzianPulse::isolated(2e-6, 1e-6, 1e-9)?;
    let exact = spectral::photon_number(&pulse.into(), &constants, &settings)?.value;

    let dir = std::env::temp_dir().join("bubblerad-tabulated-example");
    std::fs::create_dir_all(&dir)?;
    println!("samples   N (trace)        rel. deviation   v_max [m/s]");
    for points in [257, 513, 1025] {
        let mut csv = String::from("t_s,R_m\n");
        for (t, r) in bubblerad::cli::verify::sample_pulse(&pulse, points, 20.0) {
            writeln!(csv, "{},{}", io::format_float(t), io::format_float(r))?;
        }
        let path = dir.join(format!("trace_{points}.csv"));
        std::fs::write(&path, csv)?;

        // the record ends 20 γ from the centre, so fix the baseline at r0
        let trace = io::load_trajectory_csv(&path)?.with_baseline(pulse.r0)?;
        let traj = Trajectory::from(trace);
        let n = spectral::photon_number(&traj, &constants, &settings)?.value;
        println!(
            "{points:<8}  {n:.9e}  {:.2e}         {:.2}",
            (n - exact).abs() / exact,
            traj.max_surface_velocity()
        );
    }
    println!("analytic  {exact:.9e}                   {:.2}", pulse.max_surface_velocity());
    Ok(())
}
