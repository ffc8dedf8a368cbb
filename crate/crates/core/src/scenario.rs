//! JSON scenario documents and their resolution into runnable [`Scenario`]s.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector, RowDVector};
use serde::{Deserialize, Serialize};

use crate::control::ControllerConfig;
use crate::error::{Error, Result};
use crate::lti::{library, StateSpaceModel, TransferFunction};
use crate::signal::{DisturbanceSpec, ReferenceSpec};
use crate::sim::{Scenario, SwitchState};

/// A plant given by library name or inline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PlantRef {
    Named(String),
    StateSpace(InlineStateSpace),
    TransferFunction(InlineTransferFunction),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineStateSpace {
    #[serde(default)]
    pub name: Option<String>,
    /// Row-major.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    #[serde(default)]
    pub d: f64,
}

/// Coefficients in descending powers of `s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineTransferFunction {
    #[serde(default)]
    pub name: Option<String>,
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

impl PlantRef {
    pub fn resolve(&self) -> Result<StateSpaceModel> {
        match self {
            Self::Named(name) => library::plant_by_name(name).ok_or_else(|| {
                Error::Scenario(format!(
                    "unknown plant {name:?}; built-ins are {}",
                    library::PLANT_NAMES.join(", ")
                ))
            }),
            Self::StateSpace(p) => {
                let n = p.a.len();
                if p.a.iter().any(|row| row.len() != n) {
                    return Err(Error::Dimension(format!("A must be square, got {n} ragged rows")));
                }
                let a = DMatrix::from_row_iterator(n, n, p.a.iter().flatten().copied());
                let name = p.name.clone().unwrap_or_else(|| "inline".into());
                StateSpaceModel::new(
                    name,
                    a,
                    DVector::from_column_slice(&p.b),
                    RowDVector::from_row_slice(&p.c),
                    p.d,
                )
            }
            Self::TransferFunction(p) => {
                let name = p.name.as_deref().unwrap_or("inline");
                TransferFunction::new(&p.num, &p.den)?.to_state_space(name)
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSpec {
    #[serde(default)]
    pub smoothing: f64,
}

/// On-disk form of a [`Scenario`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub label: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub ts: f64,
    pub duration: f64,
    pub plants: Vec<PlantRef>,
    #[serde(default)]
    pub switch_times: Vec<f64>,
    #[serde(default)]
    pub switch_state: SwitchState,
    pub reference: ReferenceSpec,
    #[serde(default)]
    pub disturbance: DisturbanceSpec,
    pub controller: ControllerConfig,
    #[serde(default)]
    pub estimator: EstimatorSpec,
    #[serde(default)]
    pub u_limit: Option<f64>,
    /// Which values are calibration choices rather than given, and how they were obtained.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub calibration: BTreeMap<String, String>,
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// Resolves plants and validates the whole scenario.
    pub fn to_scenario(&self) -> Result<Scenario> {
        let plants = self.plants.iter().map(PlantRef::resolve).collect::<Result<Vec<_>>>()?;
        let sc = Scenario {
            label: self.label.clone(),
            plants,
            switch_times: self.switch_times.clone(),
            switch_state: self.switch_state,
            controller: self.controller,
            reference: self.reference.clone(),
            disturbance: self.disturbance.clone(),
            ts: self.ts,
            duration: self.duration,
            smoothing: self.estimator.smoothing,
            u_limit: self.u_limit,
        };
        sc.validate()?;
        Ok(sc)
    }
}
