//! Drive a run from a configuration file, exactly as the CLI does.
//!
//!     cargo run --release --example config_run [path/to/run.cfg]

use std::path::PathBuf;

use bubblerad::{cli, io, spectral};

const DEFAULT_CONFIG: &str = "\
# Lorentzian collapse, 2 um -> 1 um in 1 ns
model = lorentzian
r0_um = 2
rmin_um = 1
gamma_ns = 1
period_us = 0.1
alpha = 1e-4
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = match std::env::args().nth(1) {
        Some(p) => PathBuf::from(p),
        None => {
            let p = std::env::temp_dir().join("bubblerad-example.cfg");
            std::fs::write(&p, DEFAULT_CONFIG)?;
            p
        }
    };
    let run = cli::load(&path, None)?;
    print!("{}", io::render_config(&run.config));
    let result = spectral::evaluate(&run.trajectory, &run.constants, &run.settings)?;
    print!("{}", io::render_result_json(&result));
    eprint!("{}", cli::yield_report(&result, run.constants.c));
    Ok(())
}
