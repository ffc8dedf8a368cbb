//! Reference trajectories and input disturbances sampled on the simulation clock.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reference trajectory `y*(t)`. All kinds are zero-based plus `offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceSpec {
    /// `offset + amplitude` for every `t >= 0`.
    Step {
        amplitude: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `offset + amplitude (1 - e^(-t / time_constant))`.
    Exponential {
        amplitude: f64,
        time_constant: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `offset + amplitude sin(2 pi frequency t + phase)`.
    Sinusoid {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        offset: f64,
    },
}

/// Reference value with its first two analytic time derivatives.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ReferenceSample {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl ReferenceSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("reference {what} must be finite")))
            }
        };
        match *self {
            Self::Step { amplitude, offset } => {
                finite(amplitude, "amplitude")?;
                finite(offset, "offset")
            }
            Self::Exponential { amplitude, time_constant, offset } => {
                finite(amplitude, "amplitude")?;
                finite(offset, "offset")?;
                if !(time_constant > 0.0 && time_constant.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "exponential reference needs time_constant > 0".into(),
                    ));
                }
                Ok(())
            }
            Self::Sinusoid { amplitude, frequency, phase, offset } => {
                finite(amplitude, "amplitude")?;
                finite(phase, "phase")?;
                finite(offset, "offset")?;
                if !(frequency > 0.0 && frequency.is_finite()) {
                    return Err(Error::InvalidParameter("sinusoidal reference needs frequency > 0".into()));
                }
                Ok(())
            }
        }
    }

    pub fn amplitude(&self) -> f64 {
        match *self {
            Self::Step { amplitude, .. }
            | Self::Exponential { amplitude, .. }
            | Self::Sinusoid { amplitude, .. } => amplitude,
        }
    }

    pub fn sample(&self, t: f64) -> ReferenceSample {
        match *self {
            Self::Step { amplitude, offset } => {
                ReferenceSample { value: offset + amplitude, d1: 0.0, d2: 0.0 }
            }
            Self::Exponential { amplitude, time_constant, offset } => {
                let e = (-t / time_constant).exp();
                ReferenceSample {
                    value: offset + amplitude * (1.0 - e),
                    d1: amplitude / time_constant * e,
                    d2: -amplitude / (time_constant * time_constant) * e,
                }
            }
            Self::Sinusoid { amplitude, frequency, phase, offset } => {
                let w = TAU * frequency;
                let (s, c) = (w * t + phase).sin_cos();
                ReferenceSample {
                    value: offset + amplitude * s,
                    d1: amplitude * w * c,
                    d2: -amplitude * w * w * s,
                }
            }
        }
    }
}

/// Disturbance added to the controller output before it reaches the plant.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DisturbanceSpec {
    #[default]
    None,
    /// `amplitude cos(2 pi t / period + phase)`.
    Sinusoid {
        amplitude: f64,
        period: f64,
        #[serde(default)]
        phase: f64,
    },
}

impl DisturbanceSpec {
    pub fn validate(&self) -> Result<()> {
        if let Self::Sinusoid { amplitude, period, phase } = *self {
            if !(amplitude.is_finite() && phase.is_finite()) {
                return Err(Error::InvalidParameter("disturbance parameters must be finite".into()));
            }
            if !(period > 0.0 && period.is_finite()) {
                return Err(Error::InvalidParameter("sinusoidal disturbance needs period > 0".into()));
            }
        }
        Ok(())
    }

    pub fn sample(&self, t: f64) -> f64 {
        match *self {
            Self::None => 0.0,
            Self::Sinusoid { amplitude, period, phase } => amplitude * (TAU * t / period + phase).cos(),
        }
    }
}
