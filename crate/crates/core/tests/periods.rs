use std::f64::consts::PI;
use std::sync::Arc;

use hamkit::expr::{parse_expression, Chart};
use hamkit::period::{
    dependence_test, detect_period, equivalence_obstruction, integrate, period_energy_scan, period_table_from_seeds,
    Dependence, FlowOptions, FlowSystem, Obstruction, PeriodOutcome,
};

fn system(h: &str, n: usize) -> FlowSystem {
    let names: Vec<String> = (1..=n).map(|k| format!("q{k}")).chain((1..=n).map(|k| format!("p{k}"))).collect();
    let chart = Arc::new(Chart::new(&names).unwrap());
    FlowSystem::from_hamiltonian(&chart, parse_expression(h, &chart).unwrap()).unwrap()
}

fn harmonic() -> FlowSystem {
    system("(p1^2 + q1^2)/2", 1)
}

fn quartic() -> FlowSystem {
    system("(p1^2 + q1^2)^2", 1)
}

/// Fixed-step classical RK4, independent of the adaptive integrator. The
/// period is the first time `p` crosses zero downward with `q > 0`, located by
/// linear interpolation between steps. Seeds start on the positive `q` axis.
fn rk4_period(h: impl Fn(f64, f64) -> (f64, f64), q0: f64, dt: f64) -> f64 {
    let f = |x: [f64; 2]| {
        let (dq, dp) = h(x[0], x[1]);
        [dq, dp]
    };
    let mut x = [q0, 0.0];
    let mut t = 0.0;
    loop {
        let k1 = f(x);
        let k2 = f([x[0] + 0.5 * dt * k1[0], x[1] + 0.5 * dt * k1[1]]);
        let k3 = f([x[0] + 0.5 * dt * k2[0], x[1] + 0.5 * dt * k2[1]]);
        let k4 = f([x[0] + dt * k3[0], x[1] + dt * k3[1]]);
        let next = [
            x[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            x[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        // q̇ = ∂H/∂p, ṗ = −∂H/∂q: starting at (q0, 0) p first goes negative,
        // so the return crosses p = 0 from above.
        if t > dt && x[1] > 0.0 && next[1] <= 0.0 && next[0] > 0.0 {
            return t + dt * x[1] / (x[1] - next[1]);
        }
        x = next;
        t += dt;
    }
}

#[test]
fn harmonic_period_is_constant() {
    let sys = harmonic();
    let energies: Vec<f64> = (0..10).map(|i| 0.25 * 2f64.powi(i)).collect();
    let table = period_energy_scan(&sys, &energies, 3, 42, &FlowOptions::default()).unwrap();
    assert_eq!(table.records.len(), 30);
    for r in &table.records {
        assert!(r.converged);
        assert!((r.period.unwrap() - 2.0 * PI).abs() < 1e-6, "{:?}", r);
    }
    assert!(dependence_test(&table, 1e-6).unwrap().is_dependent());
}

#[test]
fn harmonic_period_is_seed_independent() {
    let sys = system("(p1^2 + q1^2 + p2^2 + q2^2)/2", 2);
    let table = period_energy_scan(&sys, &[0.5, 2.0, 8.0], 10, 3, &FlowOptions::default()).unwrap();
    for (_, idx) in table.levels() {
        let p: Vec<f64> = idx.iter().map(|&i| table.records[i].period.unwrap()).collect();
        let mean = p.iter().sum::<f64>() / p.len() as f64;
        let sd = (p.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / p.len() as f64).sqrt();
        assert!(sd < 1e-8, "std-dev {sd}");
    }
}

#[test]
fn quartic_period_follows_energy() {
    let sys = quartic();
    let energies = [0.25, 1.0, 4.0, 16.0];
    let table = period_energy_scan(&sys, &energies, 3, 42, &FlowOptions::default()).unwrap();
    let mut scaled = Vec::new();
    for r in &table.records {
        let tau = r.period.unwrap();
        let expected = PI / (2.0 * r.level.sqrt());
        assert!((tau - expected).abs() / expected < 1e-4);
        scaled.push(tau * r.energy.sqrt());
    }
    let first = scaled[0];
    assert!(scaled.iter().all(|v| (v - first).abs() / first < 1e-4));
    assert!(dependence_test(&table, 1e-6).unwrap().is_dependent());
}

#[test]
fn quartic_period_against_fixed_step_rk4() {
    // H = (p² + q²)²: q̇ = 4p(p² + q²), ṗ = −4q(p² + q²).
    let vf = |q: f64, p: f64| {
        let r2 = p * p + q * q;
        (4.0 * p * r2, -4.0 * q * r2)
    };
    let sys = quartic();
    for q0 in [0.7, 1.0, 1.3] {
        let brute = rk4_period(vf, q0, 1e-5);
        let tau = detect_period(&sys, &[q0, 0.0], &FlowOptions::default()).unwrap().period().unwrap();
        assert!((tau - brute).abs() < 1e-7, "{tau} vs {brute}");
    }
}

#[test]
fn obstruction_between_harmonic_and_quartic() {
    let opts = FlowOptions::default();
    let energies = [0.25, 1.0, 4.0, 16.0];
    let h = period_energy_scan(&harmonic(), &energies, 3, 42, &opts).unwrap();
    let q = period_energy_scan(&quartic(), &energies, 3, 42, &opts).unwrap();
    assert_eq!(
        equivalence_obstruction(&h, &q, 1e-6).unwrap(),
        Obstruction::Obstructed("constant vs. energy-dependent period".into())
    );
    assert_eq!(equivalence_obstruction(&h, &h, 1e-6).unwrap(), Obstruction::Inconclusive);
    // q → 2q, p → p/2 applied to ½(p² + q²).
    let rescaled = period_energy_scan(&system("p1^2/8 + 2*q1^2", 1), &energies, 3, 42, &opts).unwrap();
    assert_eq!(equivalence_obstruction(&h, &rescaled, 1e-6).unwrap(), Obstruction::Inconclusive);
}

#[test]
fn anisotropic_level_violates_dependence() {
    let sys = system("(p1^2 + q1^2)/2 + (p2^2 + q2^2)^2", 2);
    let e: f64 = 1.0;
    let r1 = (2.0 * e).sqrt();
    let r2 = e.powf(0.25);
    let seeds = vec![(e, vec![r1, 0.0, 0.0, 0.0]), (e, vec![0.0, r2, 0.0, 0.0])];
    let table = period_table_from_seeds(&sys, &seeds, &FlowOptions::default()).unwrap();
    let periods: Vec<f64> = table.records.iter().map(|r| r.period.unwrap()).collect();
    assert!((periods[0] - 2.0 * PI).abs() < 1e-6);
    assert!((periods[1] - PI / (2.0 * e.sqrt())).abs() < 1e-6);
    match dependence_test(&table, 1e-6).unwrap() {
        Dependence::Violated(v) => assert_eq!(v[0].records, vec![0, 1]),
        other => panic!("expected a violation, got {other:?}"),
    }
}

#[test]
fn quartic_energy_drift_is_small() {
    let sys = quartic();
    let traj = integrate(&sys, &[1.0, 0.0], 10.0, 1e-10, 1e-12).unwrap();
    assert!(traj.energy_drift < 1e-9, "drift {}", traj.energy_drift);
    assert!(traj.energy_drift <= 10.0 * 1e-10 * 10.0 * traj.energy0.abs());
    // Halving the tolerances moves the end state by less than the tolerance scale.
    let fine = integrate(&sys, &[1.0, 0.0], 10.0, 5e-11, 5e-13).unwrap();
    let d: f64 = traj.final_state().iter().zip(fine.final_state()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    assert!(d < 1e-7, "{d}");
}

#[test]
fn returned_period_closes_the_orbit() {
    let opts = FlowOptions::default();
    for (sys, x0) in [(harmonic(), vec![0.4, -1.1]), (quartic(), vec![0.9, 0.3])] {
        let tau = match detect_period(&sys, &x0, &opts).unwrap() {
            PeriodOutcome::Periodic { tau, ambiguous, .. } => {
                assert!(!ambiguous);
                tau
            }
            other => panic!("{other:?}"),
        };
        let end = integrate(&sys, &x0, tau, opts.rtol, opts.atol).unwrap().final_state();
        let d: f64 = end.iter().zip(&x0).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(d < opts.eps);
    }
}

#[test]
fn quasi_periodic_orbit_is_not_periodic() {
    // Mode frequencies 1 and 1 + 0.8·I₂ = 1.196 at this amplitude: the first
    // common period, 500π, is beyond t_max.
    let sys = system("(p1^2 + q1^2)/2 + (p2^2 + q2^2)/2 + (p2^2 + q2^2)^2/10", 2);
    let opts = FlowOptions { t_max: 200.0, ..FlowOptions::default() };
    let out = detect_period(&sys, &[1.0, 0.7, 0.0, 0.0], &opts).unwrap();
    assert!(out.period().is_none(), "{out:?}");
}

#[test]
fn scan_is_deterministic() {
    let sys = quartic();
    let a = period_energy_scan(&sys, &[1.0, 4.0], 3, 9, &FlowOptions::default()).unwrap();
    let b = period_energy_scan(&sys, &[1.0, 4.0], 3, 9, &FlowOptions::default()).unwrap();
    assert_eq!(a, b);
}
