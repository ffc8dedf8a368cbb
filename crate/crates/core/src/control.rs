//! Control laws: discrete PID, the intelligent PI (i-PI) built on the
//! ultra-local model `y^(n) = F + alpha u`, and the derivative-feedback
//! i*-PI law for non-minimum-phase plants.
//!
//! Every controller is stepped once per sample with the tracking error and,
//! where needed, the latest output-derivative estimate and the analytic
//! reference derivatives at the current tick.

use serde::{Deserialize, Serialize};

use crate::derivative::DerivativeEstimate;
use crate::error::{ensure_finite, Error, Result};
use crate::signal::ReferenceSample;

/// Per-tick controller inputs.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ControlInputs {
    /// Tracking error `y* - y` from the latest measurement.
    pub error: f64,
    /// Output derivative estimates available at this tick (one sample old).
    pub output: DerivativeEstimate,
    /// Reference and its analytic derivatives at this tick.
    pub reference: ReferenceSample,
}

fn clamp(u: f64, limit: Option<f64>) -> f64 {
    match limit {
        Some(l) => u.clamp(-l, l),
        None => u,
    }
}

// ---------------------------------------------------------------------------
// PID

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PidConfig {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

/// First-order-plus-delay approximation `K e^(-tau s) / (T s + 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelayModel {
    pub k: f64,
    pub t: f64,
    pub tau: f64,
}

/// Broïda PID gains for a first-order-plus-delay model.
pub fn broida_gains(model: DelayModel) -> Result<PidConfig> {
    let DelayModel { k, t, tau } = model;
    if !(k > 0.0 && t > 0.0 && tau > 0.0) || ![k, t, tau].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "Broïda tuning needs K, T, tau > 0 (got K={k}, T={t}, tau={tau})"
        )));
    }
    Ok(PidConfig {
        kp: 100.0 * (0.4 * tau + t) / (120.0 * k * tau),
        ki: 1.0 / (1.33 * k * tau),
        kd: 0.35 * t / k,
    })
}

/// Parallel-form PID: `u = Kp e + Ki sum(e) Ts + Kd (e_k - e_{k-1}) / Ts`.
///
/// The integral uses the left rectangle rule (excludes the current error).
/// The first tick has no derivative term.
#[derive(Clone, Debug)]
pub struct Pid {
    config: PidConfig,
    ts: f64,
    integral: f64,
    prev_error: Option<f64>,
    limit: Option<f64>,
}

impl Pid {
    pub fn new(config: PidConfig, ts: f64) -> Result<Self> {
        if ![config.kp, config.ki, config.kd].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("PID gains must be finite".into()));
        }
        check_period(ts)?;
        Ok(Self { config, ts, integral: 0.0, prev_error: None, limit: None })
    }

    pub fn with_limit(mut self, limit: Option<f64>) -> Self {
        self.limit = limit;
        self
    }

    pub fn config(&self) -> &PidConfig {
        &self.config
    }

    pub fn integral(&self) -> f64 {
        self.integral
    }

    pub fn step(&mut self, error: f64) -> Result<f64> {
        ensure_finite(error, "PID error")?;
        let PidConfig { kp, ki, kd } = self.config;
        let derivative = self.prev_error.map_or(0.0, |prev| (error - prev) / self.ts);
        let u = kp * error + ki * self.integral + kd * derivative;
        self.integral += error * self.ts;
        self.prev_error = Some(error);
        ensure_finite(clamp(u, self.limit), "PID output")
    }
}

// ---------------------------------------------------------------------------
// i-PI

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IpiConfig {
    pub alpha: f64,
    /// Order `n` of the ultra-local model, 1 or 2.
    #[serde(default = "default_order")]
    pub order: usize,
    pub kp: f64,
    pub ki: f64,
}

fn default_order() -> usize {
    1
}

/// Discrete intelligent PI:
/// `u_k = u_{k-1} - (y^(n)_{k-1} - y*^(n)_k) / alpha + Kp e_k + Ki I_k`.
///
/// `u_{k-1}` and the output derivative together carry the estimate of `F`, so
/// no separate estimator state is kept. `I_k` includes the current error.
#[derive(Clone, Debug)]
pub struct Ipi {
    config: IpiConfig,
    ts: f64,
    u_prev: f64,
    integral: f64,
    limit: Option<f64>,
}

impl Ipi {
    pub fn new(config: IpiConfig, ts: f64) -> Result<Self> {
        if config.alpha == 0.0 || !config.alpha.is_finite() {
            return Err(Error::InvalidParameter("i-PI alpha must be finite and non-zero".into()));
        }
        if !(1..=2).contains(&config.order) {
            return Err(Error::InvalidParameter(format!("i-PI order must be 1 or 2, got {}", config.order)));
        }
        if !(config.kp.is_finite() && config.ki.is_finite()) {
            return Err(Error::InvalidParameter("i-PI gains must be finite".into()));
        }
        check_period(ts)?;
        Ok(Self { config, ts, u_prev: 0.0, integral: 0.0, limit: None })
    }

    pub fn with_limit(mut self, limit: Option<f64>) -> Self {
        self.limit = limit;
        self
    }

    pub fn config(&self) -> &IpiConfig {
        &self.config
    }

    pub fn u_prev(&self) -> f64 {
        self.u_prev
    }

    /// One tick given the n-th output derivative at `k-1` and the n-th
    /// reference derivative at `k`.
    pub fn step(&mut self, y_deriv_prev: f64, y_star_deriv: f64, error: f64) -> Result<f64> {
        ensure_finite(y_deriv_prev, "i-PI output derivative")?;
        ensure_finite(y_star_deriv, "i-PI reference derivative")?;
        ensure_finite(error, "i-PI error")?;
        let IpiConfig { alpha, kp, ki, .. } = self.config;
        self.integral += error * self.ts;
        let corrector = kp * error + ki * self.integral;
        let u = self.u_prev - (y_deriv_prev - y_star_deriv) / alpha + corrector;
        let u = ensure_finite(clamp(u, self.limit), "i-PI output")?;
        self.u_prev = u;
        Ok(u)
    }

    fn step_inputs(&mut self, inputs: &ControlInputs) -> Result<f64> {
        let (y, r) = match self.config.order {
            1 => (inputs.output.d1, inputs.reference.d1),
            _ => (inputs.output.d2, inputs.reference.d2),
        };
        self.step(y, r, inputs.error)
    }
}

// ---------------------------------------------------------------------------
// i*-PI

/// Multiplicative gain function `G(e)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GainFunction {
    /// `G = Ki * integral of e`.
    Integrator { ki: f64 },
    /// `G = value`.
    Pure { value: f64 },
}

/// What the i*-PI law carries from one tick to the next.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainMemory {
    /// The previous control output `u_{k-1}` inside the bracket.
    #[default]
    Output,
    /// The previous bracket value, so the gain function scales an
    /// accumulated derivative correction instead of compounding on `u`.
    Bracket,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IstarPiConfig {
    pub lambda: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub gain: GainFunction,
    #[serde(default)]
    pub memory: GainMemory,
}

/// Derivative-feedback i*-PI:
/// `u_k = G(e) { u_{k-1} - d2 (lambda y''_{k-1} - y*''_k) - d1 (lambda y'_{k-1} - y*'_k) }`.
///
/// The gain function multiplies the whole bracket. With the integrator gain
/// `G = Ki I_k`, `I_k = I_{k-1} + e_k Ts`, the output is exactly zero while the
/// accumulated error is zero.
#[derive(Clone, Debug)]
pub struct IstarPi {
    config: IstarPiConfig,
    ts: f64,
    memory: f64,
    integral: f64,
    limit: Option<f64>,
}

/// Intermediate terms of one i*-PI step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IstarPiTerms {
    pub first: f64,
    pub second: f64,
    pub bracket: f64,
    pub gain: f64,
    pub u: f64,
}

impl IstarPi {
    pub fn new(config: IstarPiConfig, ts: f64) -> Result<Self> {
        let IstarPiConfig { lambda, delta1, delta2, gain, .. } = config;
        let g = match gain {
            GainFunction::Integrator { ki } => ki,
            GainFunction::Pure { value } => value,
        };
        if ![lambda, delta1, delta2, g].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("i*-PI coefficients must be finite".into()));
        }
        if delta1 == 0.0 && delta2 == 0.0 {
            return Err(Error::InvalidParameter("i*-PI needs at least one non-zero delta".into()));
        }
        check_period(ts)?;
        Ok(Self { config, ts, memory: 0.0, integral: 0.0, limit: None })
    }

    pub fn with_limit(mut self, limit: Option<f64>) -> Self {
        self.limit = limit;
        self
    }

    pub fn config(&self) -> &IstarPiConfig {
        &self.config
    }

    pub fn integral(&self) -> f64 {
        self.integral
    }

    /// Value carried into the next bracket (`u_{k-1}` for output memory).
    pub fn memory(&self) -> f64 {
        self.memory
    }

    /// Overrides the carried value and error integral.
    pub fn set_state(&mut self, memory: f64, integral: f64) {
        self.memory = memory;
        self.integral = integral;
    }

    pub fn step(
        &mut self,
        output: DerivativeEstimate,
        reference: ReferenceSample,
        error: f64,
    ) -> Result<f64> {
        Ok(self.step_terms(output, reference, error)?.u)
    }

    /// Same as [`IstarPi::step`], returning every intermediate term.
    pub fn step_terms(
        &mut self,
        output: DerivativeEstimate,
        reference: ReferenceSample,
        error: f64,
    ) -> Result<IstarPiTerms> {
        ensure_finite(output.d1, "i*-PI first output derivative")?;
        ensure_finite(output.d2, "i*-PI second output derivative")?;
        ensure_finite(reference.d1, "i*-PI first reference derivative")?;
        ensure_finite(reference.d2, "i*-PI second reference derivative")?;
        ensure_finite(error, "i*-PI error")?;
        let IstarPiConfig { lambda, delta1, delta2, gain, memory } = self.config;

        self.integral = ensure_finite(self.integral + error * self.ts, "i*-PI error integral")?;
        let gain = match gain {
            GainFunction::Integrator { ki } => ki * self.integral,
            GainFunction::Pure { value } => value,
        };
        let gain = ensure_finite(gain, "i*-PI gain function")?;
        let first =
            ensure_finite(delta1 * (lambda * output.d1 - reference.d1), "i*-PI first-derivative term")?;
        let second =
            ensure_finite(delta2 * (lambda * output.d2 - reference.d2), "i*-PI second-derivative term")?;
        let bracket = ensure_finite(self.memory - second - first, "i*-PI bracket")?;
        let u = ensure_finite(clamp(gain * bracket, self.limit), "i*-PI output")?;
        self.memory = match memory {
            GainMemory::Output => u,
            GainMemory::Bracket => bracket,
        };
        Ok(IstarPiTerms { first, second, bracket, gain, u })
    }
}

fn check_period(ts: f64) -> Result<()> {
    if ts > 0.0 && ts.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("sample period must be > 0, got {ts}")))
    }
}

// ---------------------------------------------------------------------------
// Tagged union over the three laws

/// PID gains, given directly or derived from a delay model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PidTuning {
    Gains(PidConfig),
    Broida(BroidaTuning),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BroidaTuning {
    pub broida: DelayModel,
}

impl PidTuning {
    pub fn gains(&self) -> Result<PidConfig> {
        match *self {
            Self::Gains(g) => Ok(g),
            Self::Broida(b) => broida_gains(b.broida),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ControllerConfig {
    Pid(PidTuning),
    Ipi(IpiConfig),
    IstarPi(IstarPiConfig),
}

impl ControllerConfig {
    /// Highest output derivative the law consumes.
    pub fn derivative_order(&self) -> usize {
        match self {
            Self::Pid(_) => 1,
            Self::Ipi(c) => c.order,
            Self::IstarPi(_) => 2,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Pid(_) => "pid",
            Self::Ipi(_) => "ipi",
            Self::IstarPi(_) => "istar_pi",
        }
    }
}

#[derive(Clone, Debug)]
pub enum Controller {
    Pid(Pid),
    Ipi(Ipi),
    IstarPi(IstarPi),
}

impl Controller {
    pub fn new(config: &ControllerConfig, ts: f64, limit: Option<f64>) -> Result<Self> {
        if let Some(l) = limit {
            if l.is_nan() || l <= 0.0 {
                return Err(Error::InvalidParameter(format!("output limit must be > 0, got {l}")));
            }
        }
        Ok(match config {
            ControllerConfig::Pid(t) => Self::Pid(Pid::new(t.gains()?, ts)?.with_limit(limit)),
            ControllerConfig::Ipi(c) => Self::Ipi(Ipi::new(*c, ts)?.with_limit(limit)),
            ControllerConfig::IstarPi(c) => Self::IstarPi(IstarPi::new(*c, ts)?.with_limit(limit)),
        })
    }

    pub fn step(&mut self, inputs: &ControlInputs) -> Result<f64> {
        match self {
            Self::Pid(c) => c.step(inputs.error),
            Self::Ipi(c) => c.step_inputs(inputs),
            Self::IstarPi(c) => c.step(inputs.output, inputs.reference, inputs.error),
        }
    }
}
