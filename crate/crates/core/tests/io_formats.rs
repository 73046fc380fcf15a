//! File formats: traces in, results out.

use bubblerad::io::{self, IoError, TraceError};
use bubblerad::spectral::{self, QuadratureSettings};
use bubblerad::trajectory::{LorentzianPulse, Trajectory};
use bubblerad::unitsys::PhysicalConstants;

fn trace_text(n: usize) -> String {
    let mut s = String::from("# sampled radius\nt_s,R_m\n");
    for i in 0..n {
        let t = i as f64 * 1e-10;
        s.push_str(&format!("{},{}\n", io::format_float(t), io::format_float(2e-6 - 1e-9 * (i % 3) as f64)));
    }
    s
}

#[test]
fn trace_file_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    std::fs::write(&path, trace_text(40)).unwrap();
    let t = io::load_trajectory_csv(&path).unwrap();
    assert_eq!(t.samples(), io::parse_trace(&trace_text(40)).unwrap().as_slice());
    assert_eq!(t.samples()[7], (7.0 * 1e-10, 2e-6 - 1e-9));
}

#[test]
fn trace_errors_name_the_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "time,radius\n0,1\n").unwrap();
    let err = io::load_trajectory_csv(&path).unwrap_err();
    assert!(matches!(err, IoError::Trace { source: TraceError::BadHeader { .. }, .. }));
    let msg = err.to_string();
    assert!(msg.contains("bad.csv") && msg.contains("line 1"), "{msg}");

    // comment on line 1, header on line 2, first row on line 3
    let mut lines: Vec<String> = trace_text(20).lines().map(String::from).collect();
    lines[2] = "0,-2e-6".into();
    let text = lines.join("\n");
    let err = io::parse_trace(&text).unwrap_err();
    assert!(matches!(err, TraceError::NonPositive { line: 3, .. }), "{err:?}");

    let missing = io::load_trajectory_csv(&dir.path().join("none.csv")).unwrap_err();
    assert!(matches!(missing, IoError::Read { .. }));
}

#[test]
fn renderings_are_deterministic() {
    let constants = PhysicalConstants::default();
    let settings = QuadratureSettings::default();
    let traj = Trajectory::from(LorentzianPulse::isolated(2e-6, 1e-6, 1e-9).unwrap());
    let render = || {
        let r = spectral::evaluate(&traj, &constants, &settings).unwrap();
        let s = spectral::spectrum_table(&traj, 1e10, 33, &constants, &settings).unwrap();
        (io::render_result_json(&r), io::render_spectrum_csv(&s))
    };
    let (j1, s1) = render();
    let (j2, s2) = render();
    assert_eq!(j1, j2);
    assert_eq!(s1, s2);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectrum.csv");
    let s = spectral::spectrum_table(&traj, 1e10, 33, &constants, &settings).unwrap();
    io::write_spectrum_csv(&s, &path).unwrap();
    let back = std::fs::read_to_string(&path).unwrap();
    assert_eq!(back, s1);
    for (line, w) in back.lines().skip(1).zip(&s.omegas) {
        let (a, b) = line.split_once(',').unwrap();
        assert_eq!(a.parse::<f64>().unwrap(), *w);
        assert!(b.parse::<f64>().unwrap() >= 0.0);
    }
}

#[test]
fn config_relative_trace_resolves_against_config_dir() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("data")).unwrap();
    std::fs::write(dir.path().join("data/run.csv"), trace_text(40)).unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "model = tabulated\ntrajectory_csv = data/run.csv\nbaseline_r0_um = 2\n").unwrap();
    let config = io::read_config(&cfg).unwrap();
    let traj = config.trajectory(dir.path()).unwrap();
    let Trajectory::Tabulated(t) = traj else {
        panic!("expected a tabulated trajectory")
    };
    assert_eq!(t.baseline_r0(), 2e-6);
    assert_eq!(t.samples().len(), 40);
}
