//! Fixed-step closed-loop executor and trace metrics.

use serde::{Deserialize, Serialize};

use crate::control::{ControlInputs, Controller, ControllerConfig};
use crate::derivative::DerivativeEstimator;
use crate::error::{Error, Result};
use crate::lti::{discretize_zoh, DiscretePlant, StateSpaceModel};
use crate::signal::{DisturbanceSpec, ReferenceSpec};

/// Fraction of the reference amplitude defining the settling band.
pub const SETTLING_BAND: f64 = 0.02;
/// Multiple of the reference amplitude beyond which a run is declared diverged.
pub const DIVERGENCE_FACTOR: f64 = 1e3;

/// How the incoming plant's state is chosen at a switch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwitchState {
    /// Minimum-norm state whose output equals the outgoing plant's output.
    #[default]
    Continuous,
    /// Zero state.
    Reset,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub label: String,
    pub plants: Vec<StateSpaceModel>,
    pub switch_times: Vec<f64>,
    pub switch_state: SwitchState,
    pub controller: ControllerConfig,
    pub reference: ReferenceSpec,
    pub disturbance: DisturbanceSpec,
    pub ts: f64,
    pub duration: f64,
    /// Derivative-estimator smoothing coefficient.
    pub smoothing: f64,
    /// Optional symmetric clamp on the controller output.
    pub u_limit: Option<f64>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Scenario(format!("{}: {msg}", self.label)));
        if !(self.ts > 0.0 && self.ts.is_finite()) {
            return bad(format!("ts must be > 0, got {}", self.ts));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return bad(format!("duration must be > 0, got {}", self.duration));
        }
        if self.ticks() == 0 {
            return bad("duration is shorter than one sample".into());
        }
        if self.plants.is_empty() {
            return bad("at least one plant is required".into());
        }
        if self.switch_times.len() + 1 != self.plants.len() {
            return bad(format!(
                "{} plants need {} switch times, got {}",
                self.plants.len(),
                self.plants.len() - 1,
                self.switch_times.len()
            ));
        }
        let mut prev = 0.0;
        for &s in &self.switch_times {
            if !(s > prev && s < self.duration) {
                return bad(format!("switch times must increase strictly within (0, duration), got {s}"));
            }
            prev = s;
        }
        let ticks = self.switch_ticks();
        if ticks.windows(2).any(|w| w[0] >= w[1]) || ticks.first() == Some(&0) {
            return bad("switch times collapse onto the same tick".into());
        }
        if !(0.0..1.0).contains(&self.smoothing) {
            return bad(format!("smoothing must lie in [0, 1), got {}", self.smoothing));
        }
        self.reference.validate()?;
        self.disturbance.validate()?;
        // Instantiating checks the controller parameters.
        Controller::new(&self.controller, self.ts, self.u_limit)?;
        Ok(())
    }

    pub fn ticks(&self) -> usize {
        (self.duration / self.ts).round() as usize
    }

    pub fn switch_ticks(&self) -> Vec<usize> {
        self.switch_times.iter().map(|s| (s / self.ts).round() as usize).collect()
    }

    /// Reference amplitude used for bands and thresholds (1 for a zero reference).
    pub fn amplitude_scale(&self) -> f64 {
        let a = self.reference.amplitude().abs();
        if a > 0.0 {
            a
        } else {
            1.0
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub r: f64,
    pub y: f64,
    pub u: f64,
    pub eps: f64,
    pub plant_id: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub iae: f64,
    pub max_abs_u: f64,
    pub max_overshoot: f64,
    /// First time after which `|eps|` stays inside the band; `None` if never.
    pub settling_time: Option<f64>,
    /// Per switch, time from the switch until `|eps|` stays inside the band.
    pub post_switch_recovery: Vec<Option<f64>>,
    pub diverged: bool,
}

#[derive(Clone, Debug)]
pub struct SimulationTrace {
    pub label: String,
    pub rows: Vec<TraceRow>,
    pub metrics: Metrics,
    /// Set when a non-finite value stopped the run.
    pub fault: Option<String>,
}

/// Runs the loop. Per tick `k`: sample the reference, form the error from
/// the last measurement, compute `u_k`, add the disturbance, step the active
/// plant (which reports `y_k` before advancing), feed the estimator, record.
pub fn run_closed_loop(sc: &Scenario) -> Result<SimulationTrace> {
    sc.validate()?;
    let plants: Vec<DiscretePlant> =
        sc.plants.iter().map(|m| discretize_zoh(m, sc.ts)).collect::<Result<_>>()?;
    let switch_ticks = sc.switch_ticks();
    let threshold = DIVERGENCE_FACTOR * sc.amplitude_scale();

    let mut controller = Controller::new(&sc.controller, sc.ts, sc.u_limit)?;
    let mut estimator = DerivativeEstimator::new(sc.ts, sc.controller.derivative_order(), sc.smoothing)?;
    let mut active = 0;
    let mut plant = plants[0].clone();
    let mut y_meas = 0.0;
    let mut diverged = false;
    let mut fault = None;

    let n = sc.ticks();
    let mut rows = Vec::with_capacity(n);
    for k in 0..n {
        let t = k as f64 * sc.ts;
        if switch_ticks.get(active) == Some(&k) {
            let y_now = plant.output();
            active += 1;
            plant = plants[active].clone();
            if sc.switch_state == SwitchState::Continuous {
                plant.set_state(sc.plants[active].state_for_output(y_now))?;
            }
        }

        let reference = sc.reference.sample(t);
        let inputs =
            ControlInputs { error: reference.value - y_meas, output: estimator.estimate(), reference };
        let step = controller
            .step(&inputs)
            .and_then(|u| Ok((u, plant.step(u + sc.disturbance.sample(t))?)))
            .and_then(|(u, y)| estimator.push(y).map(|_| (u, y)));
        let (u, y) = match step {
            Ok(v) => v,
            Err(Error::Fault(msg)) => {
                diverged = true;
                fault = Some(format!("t = {t:e}: {msg}"));
                break;
            }
            Err(e) => return Err(e),
        };

        rows.push(TraceRow { t, r: reference.value, y, u, eps: reference.value - y, plant_id: active });
        y_meas = y;
        if y.abs() > threshold {
            diverged = true;
            break;
        }
    }

    let mut metrics = compute_metrics(&rows, sc);
    metrics.diverged |= diverged;
    if metrics.diverged {
        metrics.settling_time = None;
        metrics.post_switch_recovery.iter_mut().for_each(|r| *r = None);
    }
    Ok(SimulationTrace { label: sc.label.clone(), rows, metrics, fault })
}

/// Time from `start` until the error stays in the band through the end of the
/// trace. `None` if the last row is out of band or the trace ends first.
fn time_to_stay_in_band(rows: &[TraceRow], from: usize, start: f64, band: f64) -> Option<f64> {
    let tail = rows.get(from..).filter(|r| !r.is_empty())?;
    match tail.iter().rposition(|r| r.eps.abs() >= band) {
        None => Some(0.0),
        Some(j) if j + 1 == tail.len() => None,
        Some(j) => Some(tail[j + 1].t - start),
    }
}

pub fn compute_metrics(rows: &[TraceRow], sc: &Scenario) -> Metrics {
    let scale = sc.amplitude_scale();
    let band = SETTLING_BAND * scale;
    let sign = if sc.reference.amplitude() < 0.0 { -1.0 } else { 1.0 };
    let iae = rows.iter().map(|r| r.eps.abs()).sum::<f64>() * sc.ts;
    let max_abs_u = rows.iter().map(|r| r.u.abs()).fold(0.0, f64::max);
    let max_overshoot = rows.iter().map(|r| sign * (r.y - r.r)).fold(0.0, f64::max) / scale;
    let diverged = rows.iter().any(|r| !r.y.is_finite() || r.y.abs() > DIVERGENCE_FACTOR * scale);
    let post_switch_recovery = sc
        .switch_ticks()
        .iter()
        .zip(&sc.switch_times)
        .map(|(&k, &s)| time_to_stay_in_band(rows, k, s, band))
        .collect();
    Metrics {
        iae,
        max_abs_u,
        max_overshoot,
        settling_time: time_to_stay_in_band(rows, 0, 0.0, band),
        post_switch_recovery,
        diverged,
    }
}
