//! Deterministic tabletop kitchen: world state, primitive effects, plan
//! execution with mask checks, and the evaluation scenario generator.

mod exec;
mod scenario;
mod world;

use thiserror::Error;

use crate::scene::SceneError;

pub use exec::{run_plan, ExecutionTrace, StepTrace, IOU_THRESHOLD};
pub use scenario::{
    generate_scenario, names_match_compilation, perceive, Level, NoiseConfig, Scenario,
    ScenarioGenerator,
};
pub use world::{Location, WorldObject, WorldState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("precondition {literal} of `{action}` does not hold")]
    PreconditionUnmet { action: String, literal: String },
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown primitive `{0}`")]
    UnknownAction(String),
    #[error("inconsistent world: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Scene(SceneError),
}
