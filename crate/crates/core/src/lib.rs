//! Deterministic discrete-event simulator for SCOR and VCOR supply chains.

pub mod actors;
pub mod engine;
pub mod error;
pub mod kpi;
pub mod model;
pub mod run;
pub mod satisfaction;
pub mod scenario;
pub mod sweep;

pub use error::{Result, SimError};
pub use run::{run_scenario, RunArtifacts};
pub use scenario::{load_scenario, Mode, Scenario};
