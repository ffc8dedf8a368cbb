//! Built-in plants, referencable by name from scenario files.

use super::{poly, StateSpaceModel, TransferFunction};

pub const PLANT_NAMES: &[&str] = &["sigma1", "sigma2", "sigma3", "sigma4", "triple_lag", "triple_lag_aged"];

fn two_state(name: &str, a: [[f64; 2]; 2], c: [f64; 2]) -> StateSpaceModel {
    StateSpaceModel::from_rows(name, &[&a[0], &a[1]], &[2e4, 0.0], &c, 0.0)
        .expect("built-in plant is well formed")
}

/// Non-minimum phase, zero at s = +5000.
pub fn sigma1() -> StateSpaceModel {
    two_state("sigma1", [[0.0, -1000.0], [1e5, -5000.0]], [-10.0, 1.0])
}

/// Non-minimum phase, zero near s = +2653.8.
pub fn sigma2() -> StateSpaceModel {
    two_state("sigma2", [[0.0, -900.0], [8e4, -3500.0]], [-13.0, 1.0])
}

/// Minimum phase; same dynamics as `sigma2` with the output sign of the first state flipped.
pub fn sigma3() -> StateSpaceModel {
    two_state("sigma3", [[0.0, -900.0], [8e4, -3500.0]], [13.0, 1.0])
}

/// Minimum phase, zero at s = -15500.
pub fn sigma4() -> StateSpaceModel {
    two_state("sigma4", [[0.0, -400.0], [7e4, -1500.0]], [5.0, 1.0])
}

/// `(s + 2)^2 / (s + p)^3` in controllable canonical form.
pub fn triple_lag_with_pole(name: &str, pole: f64) -> StateSpaceModel {
    let num = poly::from_real_roots(&[-2.0, -2.0]);
    let den = poly::from_real_roots(&[-pole, -pole, -pole]);
    TransferFunction::new(&num, &den)
        .and_then(|tf| tf.to_state_space(name))
        .expect("built-in plant is well formed")
}

/// `(s + 2)^2 / (s + 1)^3`.
pub fn triple_lag() -> StateSpaceModel {
    triple_lag_with_pole("triple_lag", 1.0)
}

/// The triple lag after its pole drifts from 1 to 1.5.
pub fn triple_lag_aged() -> StateSpaceModel {
    triple_lag_with_pole("triple_lag_aged", 1.5)
}

pub fn plant_by_name(name: &str) -> Option<StateSpaceModel> {
    Some(match name {
        "sigma1" => sigma1(),
        "sigma2" => sigma2(),
        "sigma3" => sigma3(),
        "sigma4" => sigma4(),
        "triple_lag" => triple_lag(),
        "triple_lag_aged" => triple_lag_aged(),
        _ => return None,
    })
}
