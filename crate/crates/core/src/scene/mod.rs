//! Symbolic scene model: scene graphs with closed vocabularies, the
//! affordance knowledge base, segmentation masks and compilation of a
//! perceived scene into a PDDL initial state.

mod graph;
mod kb;
mod mask;
mod prob;
mod vocab;

use thiserror::Error;

pub use graph::*;
pub use kb::*;
pub use mask::{iou, RleMask, SegmentMask};
pub use prob::{graph_probability, ComponentScores};
pub use vocab::*;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error("probability {0} outside [0, 1]")]
    DomainError(f64),
    #[error("mask dimensions differ")]
    DimensionMismatch,
    #[error("invalid bounding box {0:?}")]
    InvalidBox([f64; 4]),
    #[error("object `{0}` lies outside the image")]
    OutOfImage(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("relationship refers to missing object index {0}")]
    RelationIndex(usize),
    #[error("relationship refers to unknown object `{0}`")]
    UnknownObject(String),
    #[error("knowledge base has no entry for category `{0}`")]
    UnknownCategory(String),
    #[error("`{0}` is not declared in the domain")]
    UndeclaredPredicate(String),
    #[error("invalid scene JSON: {0}")]
    Json(String),
}
