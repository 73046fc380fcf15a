//! Randomised invariants of the public API.

use bubblerad::io::{parse_config, render_config, ModelConfig, RunConfig};
use bubblerad::oracles;
use bubblerad::spectral::{self, QuadratureSettings, SpectralModel};
use bubblerad::trajectory::{LorentzianPulse, Trajectory};
use bubblerad::unitsys::{PhysicalConstants, Quantity, Scales, Unit, SPEED_OF_LIGHT};
use proptest::prelude::*;

const UM: f64 = 1e-6;
const NS: f64 = 1e-9;

fn costly() -> ProptestConfig {
    ProptestConfig {
        cases: 24,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn cheap() -> ProptestConfig {
    ProptestConfig {
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn unit() -> impl Strategy<Value = Unit> {
    prop::sample::select(Unit::ALL.to_vec())
}

fn pulse() -> impl Strategy<Value = LorentzianPulse> {
    (0.5f64..50.0, 0.05f64..0.95, 0.05f64..20.0)
        .prop_map(|(r0, ratio, gamma)| LorentzianPulse::isolated(r0 * UM, ratio * r0 * UM, gamma * NS).unwrap())
}

fn photons(traj: &Trajectory) -> f64 {
    spectral::photon_number(traj, &PhysicalConstants::default(), &QuadratureSettings::default())
        .unwrap()
        .value
}

proptest! {
    #![proptest_config(cheap())]

    #[test]
    fn units_round_trip(value in 1e-6f64..1e6, u in unit(), length in 1e-9f64..1.0, time in 1e-12f64..1.0) {
        let scales = Scales::new(length, time).unwrap();
        let q = Quantity::new(value, u).unwrap();
        let back = scales.from_internal(scales.to_internal(q).unwrap(), u).unwrap();
        prop_assert_eq!(back.unit, u);
        prop_assert!(((back.value - value) / value).abs() < 1e-12);
    }

    #[test]
    fn bound_is_quartic(v in 1.0f64..1e8, s in 0.1f64..10.0) {
        let b1 = oracles::velocity_bound(v, SPEED_OF_LIGHT);
        let b2 = oracles::velocity_bound(s * v, SPEED_OF_LIGHT);
        prop_assert!((b2 / b1 / s.powi(4) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lorentzian_config_round_trips(
        r0 in 0.5f64..100.0,
        ratio in 0.01f64..0.99,
        gamma in 0.01f64..100.0,
        period in prop::option::of(100.0f64..1000.0),
        alpha in 1e-6f64..1e-2,
        rel_tol in 1e-12f64..1e-3,
    ) {
        let config = RunConfig {
            model: ModelConfig::Lorentzian {
                r0_um: r0,
                rmin_um: ratio * r0,
                gamma_ns: gamma,
                period_us: period.map(|p| p * gamma * 1e-3),
            },
            alpha,
            quadrature: QuadratureSettings { rel_tol, ..Default::default() },
        };
        let back = parse_config(&render_config(&config)).unwrap();
        prop_assert_eq!(back, config);
    }

    #[test]
    fn tabulated_config_round_trips(baseline in prop::option::of(0.5f64..100.0), window in prop::option::of(2usize..=5)) {
        let config = RunConfig {
            model: ModelConfig::Tabulated {
                trajectory_csv: "traces/run 1.csv".into(),
                baseline_r0_um: baseline,
                smoothing_window: window.map(|w| 2 * w + 1),
            },
            alpha: 1e-4,
            quadrature: QuadratureSettings::default(),
        };
        let back = parse_config(&render_config(&config)).unwrap();
        prop_assert_eq!(back, config);
    }

    #[test]
    fn spectral_density_is_non_negative(p in pulse(), w in 0.0f64..50.0) {
        let traj = Trajectory::from(p);
        let d = spectral::spectral_density(
            &traj,
            w / p.gamma,
            &PhysicalConstants::default(),
            &QuadratureSettings::default(),
        )
        .unwrap();
        prop_assert!(d >= 0.0);
    }

    #[test]
    fn velocity_matches_finite_differences(p in pulse(), x in -8.0f64..8.0) {
        let traj = Trajectory::from(p);
        let t = p.center() + x * p.gamma;
        let h = 1e-3 * p.gamma;
        let r = |dt: f64| traj.radius(t + dt).unwrap();
        let fd = (8.0 * (r(h) - r(-h)) - (r(2.0 * h) - r(-2.0 * h))) / (12.0 * h);
        let v = traj.surface_velocity(t).unwrap();
        prop_assert!((fd - v).abs() <= 1e-8 * traj.max_surface_velocity(), "fd {} v {}", fd, v);
    }
}

proptest! {
    #![proptest_config(costly())]

    #[test]
    fn photon_number_is_non_negative(p in pulse()) {
        prop_assert!(photons(&p.into()) >= 0.0);
    }

    #[test]
    fn result_does_not_depend_on_internal_units(p in pulse(), l in 0.01f64..100.0, s in 0.01f64..100.0) {
        let traj = Trajectory::from(p);
        let settings = QuadratureSettings::default();
        let constants = PhysicalConstants::default();
        let natural = traj.natural_scales();
        let other = Scales::new(natural.length * l, natural.time * s).unwrap();
        let a = SpectralModel::with_scales(&traj, natural, &settings).unwrap().integrals(&constants).unwrap();
        let b = SpectralModel::with_scales(&traj, other, &settings).unwrap().integrals(&constants).unwrap();
        let (na, nb) = (a.photon_number.value, b.photon_number.value);
        prop_assert!(((na - nb) / na).abs() < 1e-10, "{} vs {}", na, nb);
    }

    #[test]
    fn photon_number_follows_closed_form(p in pulse()) {
        let exact = oracles::lorentzian_photon_number(PhysicalConstants::default().alpha, p.beta()).unwrap();
        prop_assert!((photons(&p.into()) / exact - 1.0).abs() < 1e-6);
    }
}

#[test]
fn max_velocity_matches_brute_force_scan() {
    let traj = Trajectory::from(LorentzianPulse::isolated(2.0 * UM, UM, NS).unwrap());
    let Trajectory::Lorentzian(p) = &traj else { unreachable!() };
    let (lo, span) = (p.center() - 10.0 * p.gamma, 20.0 * p.gamma);
    let n = 1_000_000;
    let brute = (0..=n)
        .map(|i| traj.surface_velocity(lo + span * i as f64 / n as f64).unwrap().abs())
        .fold(0.0, f64::max);
    let refined = traj.max_surface_velocity();
    assert!(((refined - brute) / brute).abs() < 1e-6, "{refined} vs {brute}");
    assert!(refined >= brute);
}

#[test]
fn worked_examples() {
    let p = LorentzianPulse::isolated(2.0 * UM, UM, NS).unwrap();
    assert!((p.beta() - 5.7774e-6).abs() < 1e-9);
    // one γ after the centre
    let v = Trajectory::from(p).surface_velocity(p.center() + p.gamma).unwrap();
    assert!((v - 474.3).abs() < 0.05, "{v}");
}
