use adpass_core::addressing::TrapGeometry;
use adpass_core::dynamics::{adiabatic_switch_off, evolve, BlochState, DampingModel};
use adpass_core::transport::*;
use adpass_core::units::khz_to_rad_s;
use adpass_core::IntegratorConfig;
use proptest::prelude::*;

fn plan(inv_tau_per_ms: f64) -> TransportPlan {
    TransportPlan {
        d: 132.0,
        tau: 1e-3 / inv_tau_per_ms,
        omega_r: khz_to_rad_s(26.0),
        delta_0: khz_to_rad_s(-72.0),
        spread: khz_to_rad_s(32.0),
        shape: SpreadShape::Uniform,
        g: TrapGeometry::new(3.2, 9.8, 400.0).unwrap(),
    }
}

fn opts() -> TransportOptions {
    TransportOptions::default()
}

#[test]
fn adiabatic_at_slow_transport() {
    let o = transport_transfer(&plan(0.2), DampingModel::NONE, 32, 3, &opts()).unwrap();
    assert!(o.mean >= 0.999, "{}", o.mean);
    assert!(o.std_dev < 0.01);
    assert_eq!(o.members.len(), 32);
}

#[test]
fn fast_transport_loses_adiabaticity() {
    let o = transport_transfer(&plan(50.0), DampingModel::NONE, 16, 3, &opts()).unwrap();
    assert!(o.mean < 0.5, "{}", o.mean);
}

#[test]
fn zero_spread_equals_a_single_trajectory() {
    let p = TransportPlan { spread: 0.0, ..plan(1.0) };
    let o = transport_transfer(&p, DampingModel::NONE, 1, 0, &opts()).unwrap();
    assert_eq!(o.stderr, 0.0);
    let drive = TransportDrive { plan: p, delta_r: p.delta_0, ramp: 0.0 };
    let (d0, d1) = (transport_detuning(0.0, p.delta_0, &p).unwrap(), transport_detuning(p.tau, p.delta_0, &p).unwrap());
    let norm = (p.omega_r.powi(2) + d0 * d0).sqrt();
    let start = BlochState::new(p.omega_r / norm, 0.0, d0 / norm).unwrap();
    let end = evolve(start, &drive, DampingModel::NONE, &IntegratorConfig::default()).unwrap();
    let direct = adiabatic_switch_off(&end, p.omega_r, d1);
    assert!((o.mean - direct).abs() < 1e-9);
}

#[test]
fn ramped_switching_agrees_with_ideal_switching() {
    let ramp = TransportOptions { switch_on: SwitchOn::Ramp(5e-4), ..opts() };
    for inv in [0.2, 1.0, 2.0] {
        let a = transport_transfer(&plan(inv), DampingModel::NONE, 8, 1, &opts()).unwrap().mean;
        let b = transport_transfer(&plan(inv), DampingModel::NONE, 8, 1, &ramp).unwrap().mean;
        assert!((a - b).abs() < 0.005, "1/τ = {inv}: {a} vs {b}");
    }
}

#[test]
fn dephasing_reduces_slow_transfer() {
    let clean = transport_transfer(&plan(0.1), DampingModel::NONE, 4, 1, &opts()).unwrap().mean;
    let damped = transport_transfer(&plan(0.1), DampingModel::new(2e3).unwrap(), 4, 1, &opts()).unwrap().mean;
    assert!(damped < clean - 0.01, "{damped} vs {clean}");
}

#[test]
fn gaussian_spread_statistics() {
    let p = TransportPlan { shape: SpreadShape::Gaussian, ..plan(1.0) };
    let n = 20_000;
    let d: Vec<f64> = (0..n).map(|i| member_detuning(&p, 8, i)).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let sd = (d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    let sigma = p.spread / (2.0 * (2.0 * 2f64.ln()).sqrt());
    assert!((mean - p.delta_0).abs() < 5.0 * sigma / (n as f64).sqrt());
    assert!((sd / sigma - 1.0).abs() < 0.03);
}

#[test]
fn scan_is_ordered_and_reproducible() {
    let grid = [0.5, 3.0, 8.0];
    let a = transport_scan(&plan(1.0), &grid, DampingModel::NONE, 4, 7, &opts()).unwrap();
    let b = transport_scan(&plan(1.0), &grid, DampingModel::NONE, 4, 7, &opts()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.abscissas(), grid.to_vec());
    assert!(a.points[0].value > a.points[2].value);
    assert!(transport_scan(&plan(1.0), &[], DampingModel::NONE, 4, 7, &opts()).is_err());
    assert!(transport_scan(&plan(1.0), &[0.0], DampingModel::NONE, 4, 7, &opts()).is_err());
    assert!(transport_transfer(&plan(1.0), DampingModel::NONE, 0, 7, &opts()).is_err());
}

#[test]
fn linear_crossings_follow_landau_zener() {
    let omega = khz_to_rad_s(26.0);
    let knee = std::f64::consts::PI * omega * omega / (2.0 * 2f64.ln());
    let cfg = IntegratorConfig::default();
    for k in 0..=12 {
        let alpha = knee * 10f64.powf(-1.5 + 0.25 * k as f64);
        let c = LinearCrossing { omega, alpha, delta_edge: 100.0 * omega };
        let sim = linear_crossing_transfer(&c, &cfg).unwrap();
        let lz = landau_zener_oracle(omega, alpha).unwrap();
        assert!((sim - lz).abs() < 0.02, "α = {alpha:e}: {sim} vs {lz}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn every_member_crosses_resonance_once(u in 0.0f64..=1.0, inv_tau in 0.05f64..10.0) {
        let p = plan(inv_tau);
        let dr = p.delta_0 + p.spread * (u - 0.5);
        let n = 2000;
        let mut changes = 0;
        let mut prev = transport_detuning(0.0, dr, &p).unwrap();
        for i in 1..=n {
            let d = transport_detuning(p.tau * (i as f64 / n as f64), dr, &p).unwrap();
            if d.signum() != prev.signum() {
                changes += 1;
            }
            prev = d;
        }
        prop_assert_eq!(changes, 1);
        prop_assert!(p.crossing_time(dr).is_some());
    }
}
