//! Model-free control of sampled SISO plants: plant modelling, controllers
//! (PID, intelligent PI and its non-minimum-phase variant), a closed-loop
//! executor with plant switching, and the canned scenario suite.

pub mod calibrate;
pub mod control;
pub mod derivative;
pub mod error;
pub mod lti;
pub mod scenario;
pub mod signal;
pub mod sim;
pub mod suite;
pub mod trace_io;

pub use control::{
    broida_gains, BroidaTuning, Controller, ControllerConfig, DelayModel, GainFunction, GainMemory,
    IpiConfig, IstarPiConfig, PidConfig, PidTuning,
};
pub use derivative::{DerivativeEstimate, DerivativeEstimator};
pub use error::{Error, Result};
pub use lti::{discretize_zoh, DiscretePlant, StateSpaceModel, TransferFunction};
pub use num_complex::Complex64;
pub use scenario::{PlantRef, ScenarioFile};
pub use signal::{DisturbanceSpec, ReferenceSample, ReferenceSpec};
pub use sim::{run_closed_loop, Metrics, Scenario, SimulationTrace, SwitchState, TraceRow};
pub use trace_io::MetricsReport;
