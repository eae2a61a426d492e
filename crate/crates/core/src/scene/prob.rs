use serde::{Deserialize, Serialize};

use super::SceneError;

/// Component probabilities of a scene-graph parse: boxes given the image,
/// each box's attributes, and each relationship.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentScores {
    pub p_boxes: f64,
    pub p_attrs: Vec<f64>,
    pub p_rels: Vec<f64>,
}

fn check(v: f64) -> Result<f64, SceneError> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(SceneError::DomainError(v))
    }
}

/// `P(G|I) = P(B|I) * prod_i P(A_i|B,I) * prod_j P(R_j|A,B,I)`.
pub fn graph_probability(s: &ComponentScores) -> Result<f64, SceneError> {
    let mut p = check(s.p_boxes)?;
    for &a in &s.p_attrs {
        p *= check(a)?;
    }
    for &r in &s.p_rels {
        p *= check(r)?;
    }
    Ok(p)
}
