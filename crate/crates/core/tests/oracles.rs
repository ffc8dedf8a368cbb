//! Independent oracles for plant analysis, sampling and loop causality.

use proptest::prelude::*;
use ulocal_core::lti::{library, step_response};
use ulocal_core::{
    discretize_zoh, run_closed_loop, Complex64, ControllerConfig, DisturbanceSpec, GainFunction, GainMemory,
    IpiConfig, IstarPiConfig, PidConfig, PidTuning, ReferenceSpec, Scenario, StateSpaceModel, SwitchState,
    TransferFunction,
};

/// `(num, den)` of `C (sI - A)^-1 B` for the 2x2 plants with `B = [b1, 0]`.
fn symbolic_2x2(m: &StateSpaceModel) -> ([f64; 2], [f64; 3]) {
    let (a, b, c) = (m.a(), m.b(), m.c());
    assert_eq!(b[1], 0.0);
    let num = [b[0] * c[0], b[0] * (c[1] * a[(1, 0)] - c[0] * a[(1, 1)])];
    let den = [1.0, -(a[(0, 0)] + a[(1, 1)]), a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]];
    (num, den)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn two_state_plants_match_symbolic_oracle() {
    for m in [library::sigma1(), library::sigma2(), library::sigma3(), library::sigma4()] {
        let (num, den) = symbolic_2x2(&m);
        let zero = -num[1] / num[0];
        let (re, disc) = (-den[1] / 2.0, den[1] * den[1] / 4.0 - den[2]);
        assert!(disc < 0.0, "{}: complex poles expected", m.name);
        let im = (-disc).sqrt();

        let zeros = m.zeros();
        assert_eq!(zeros.len(), 1);
        assert!(close(zeros[0].re, zero, 1e-9) && zeros[0].im == 0.0, "{}: {:?} vs {zero}", m.name, zeros);
        let poles = m.poles();
        assert_eq!(poles.len(), 2);
        for p in &poles {
            assert!(close(p.re, re, 1e-9) && close(p.im.abs(), im, 1e-9), "{}: {p}", m.name);
        }
        assert!(poles[0].im * poles[1].im < 0.0);
        assert!(close(m.dc_gain().unwrap(), num[1] / den[2], 1e-9));
        assert_eq!(m.is_minimum_phase(), zero < 0.0, "{}", m.name);
        // and through the transfer function
        let tf = m.to_transfer_function();
        for (x, y) in tf.num().iter().zip(num) {
            assert!(close(*x, y, 1e-12));
        }
        for (x, y) in tf.den().iter().zip(den) {
            assert!(close(*x, y, 1e-12));
        }
    }
}

#[test]
fn documented_plant_values() {
    let s1 = library::sigma1();
    assert!(close(s1.zeros()[0].re, 5000.0, 1e-12));
    assert!(close(s1.dc_gain().unwrap(), 10.0, 1e-12));
    assert!(close(s1.poles()[1].im, 9682.458, 1e-7));
    assert!(!s1.is_minimum_phase());
    assert!(close(library::sigma2().zeros()[0].re, 2653.846, 1e-6));
    assert!(!library::sigma2().is_minimum_phase());
    assert!(close(library::sigma3().zeros()[0].re, -9653.846, 1e-6));
    assert!(library::sigma3().is_minimum_phase());
    assert!(close(library::sigma4().zeros()[0].re, -15500.0, 1e-12));
    assert!(library::sigma4().is_minimum_phase());
    assert!(close(library::triple_lag().dc_gain().unwrap(), 4.0, 1e-12));
}

/// Partial-fraction step response of a strictly proper plant with simple poles:
/// `y(t) = G(0) + sum_i N(p_i) / (p_i D'(p_i)) e^(p_i t)`.
fn analytic_step(tf: &TransferFunction, t: f64) -> f64 {
    let den = tf.den();
    let n = den.len() - 1;
    let dden: Vec<f64> = den[..n].iter().enumerate().map(|(i, c)| c * (n - i) as f64).collect();
    let horner = |c: &[f64], s: Complex64| c.iter().fold(Complex64::new(0.0, 0.0), |acc, &k| acc * s + k);
    let mut y = tf.eval(Complex64::new(0.0, 0.0));
    for p in tf.poles() {
        y += horner(tf.num(), p) / (p * horner(&dden, p)) * (p * t).exp();
    }
    y.re
}

#[test]
fn zoh_step_matches_partial_fractions() {
    for (m, ts, n) in
        [(library::sigma1(), 1e-6, 1000), (library::sigma2(), 1e-6, 1000), (library::sigma4(), 1e-5, 2000)]
    {
        let tf = m.to_transfer_function();
        let sampled = step_response(&m, ts, n).unwrap();
        let exact: Vec<f64> = (0..n).map(|k| analytic_step(&tf, k as f64 * ts)).collect();
        let scale = exact.iter().fold(0.0f64, |a, y| a.max(y.abs()));
        let worst = sampled.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst / scale < 1e-9, "{}: {}", m.name, worst / scale);
    }
}

#[test]
fn step_response_classification() {
    for (m, nmp) in [
        (library::sigma1(), true),
        (library::sigma2(), true),
        (library::sigma3(), false),
        (library::sigma4(), false),
    ] {
        let y = step_response(&m, 1e-6, 20_000).unwrap();
        let min = y.iter().copied().fold(f64::INFINITY, f64::min);
        let last = *y.last().unwrap();
        assert_eq!(min < 0.0, nmp, "{}: min {min}", m.name);
        assert!(last > 0.0);
        assert!(close(last, m.dc_gain().unwrap(), 1e-3), "{}: {last}", m.name);
    }
}

#[test]
fn sampled_eigenvalues_are_exponentials_of_poles() {
    for name in library::PLANT_NAMES {
        let m = library::plant_by_name(name).unwrap();
        let scale = m.poles().iter().map(|p| p.norm()).fold(0.0, f64::max);
        for ts in [1e-5, 1e-6, 1e-7] {
            let d = discretize_zoh(&m, ts).unwrap();
            let mut want: Vec<Complex64> = m.poles().iter().map(|p| (p * ts).exp()).collect();
            let mut got = d.eigenvalues();
            let key = |z: &Complex64| (z.re, z.im);
            want.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
            got.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
            // repeated poles perturb eigenvalues by O(sqrt(eps)) per unit of pole
            let tol = if name.starts_with("triple") { 1e-6 } else { 1e-12 * (1.0 + scale * ts) };
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).norm() < tol, "{name} ts={ts}: {g} vs {w}");
            }
            assert!(d.spectral_radius() < 1.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn transfer_function_round_trip(re in -2e4f64..2e4, im in -2e4f64..2e4) {
        let s = Complex64::new(re, im);
        for name in library::PLANT_NAMES {
            let m = library::plant_by_name(name).unwrap();
            let tf = m.to_transfer_function();
            let back = tf.to_state_space("rt").unwrap().to_transfer_function();
            let (a, b) = (tf.eval(s), back.eval(s));
            prop_assert!((a - b).norm() <= 1e-9 * a.norm().max(1e-300), "{name} at {s}");
            // state-space resolvent directly
            let n = m.order();
            let si_a = nalgebra::DMatrix::<Complex64>::from_fn(n, n, |i, j| {
                let aij = Complex64::new(m.a()[(i, j)], 0.0);
                if i == j { s - aij } else { -aij }
            });
            let bc = m.b().map(|v| Complex64::new(v, 0.0));
            let x = si_a.lu().solve(&bc).unwrap();
            let direct: Complex64 = m.c().iter().zip(x.iter()).map(|(c, x)| x * *c).sum::<Complex64>() + m.d();
            prop_assert!((direct - a).norm() <= 1e-9 * a.norm().max(1e-300), "{name} at {s}");
        }
    }
}

fn sigma1_scenario(controller: ControllerConfig) -> Scenario {
    Scenario {
        label: "causal".into(),
        plants: vec![library::sigma1()],
        switch_times: vec![],
        switch_state: SwitchState::Continuous,
        controller,
        reference: ReferenceSpec::Exponential { amplitude: 10.0, time_constant: 5e-4, offset: 0.0 },
        disturbance: DisturbanceSpec::None,
        ts: 1e-6,
        duration: 2e-3,
        smoothing: 0.0,
        u_limit: None,
    }
}

#[test]
fn future_plant_change_does_not_affect_the_past() {
    let controllers = [
        ControllerConfig::IstarPi(IstarPiConfig {
            lambda: -0.05,
            delta1: -2e-6,
            delta2: -4e-9,
            gain: GainFunction::Integrator { ki: 4.0 },
            memory: GainMemory::Bracket,
        }),
        ControllerConfig::Pid(PidTuning::Gains(PidConfig { kp: 0.01, ki: 50.0, kd: 0.0 })),
    ];
    for c in controllers {
        let base = sigma1_scenario(c);
        let mut switched = base.clone();
        switched.plants.push(library::sigma4());
        switched.switch_times = vec![1e-3];
        let k = switched.switch_ticks()[0];
        let a = run_closed_loop(&base).unwrap();
        let b = run_closed_loop(&switched).unwrap();
        assert_eq!(&a.rows[..k], &b.rows[..k]);
        // u_k only sees outputs up to k - 1
        assert_eq!(a.rows[k].u.to_bits(), b.rows[k].u.to_bits());
        // the switch keeps y_k continuous, so the runs part only after it
        assert!(a.rows[k..].iter().zip(&b.rows[k..]).any(|(x, y)| x.u != y.u));
    }
}

#[test]
fn error_column_is_reference_minus_output() {
    let tr = run_closed_loop(&sigma1_scenario(ControllerConfig::Ipi(IpiConfig {
        alpha: 2.0,
        order: 1,
        kp: 1.0,
        ki: 0.0,
    })))
    .unwrap();
    for (k, r) in tr.rows.iter().enumerate() {
        assert_eq!(r.eps, r.r - r.y);
        assert_eq!(r.t, k as f64 * 1e-6);
    }
}
