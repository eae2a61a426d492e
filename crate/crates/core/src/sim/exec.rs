use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::WorldState;
use crate::pddl::Plan;
use crate::scene::{iou, SegmentMask};

/// Minimum mask overlap for a manipulation to count as on target.
pub const IOU_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepTrace {
    pub action: String,
    pub applied: bool,
    /// IoU of detected against true mask, per manipulated object.
    pub iou: Vec<(String, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl StepTrace {
    pub fn ok(&self) -> bool {
        self.applied && self.iou.iter().all(|(_, v)| *v > IOU_THRESHOLD)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub steps: Vec<StepTrace>,
    pub success: bool,
    /// Index of the first failing step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_at: Option<usize>,
}

impl ExecutionTrace {
    pub fn summary(&self) -> String {
        match self.failed_at {
            None => format!("execution succeeded ({} steps)", self.steps.len()),
            Some(i) => {
                let s = &self.steps[i];
                match &s.error {
                    Some(e) => format!("execution failed at step {}: {e}", i + 1),
                    None => format!("execution failed at step {}: mask IoU at or below {IOU_THRESHOLD}", i + 1),
                }
            }
        }
    }
}

/// Execute `plan` step by step, stopping at the first failure. Each
/// manipulated object (every action argument) is located through its
/// detected mask; a missing detection counts as IoU 0.
pub fn run_plan(
    world: &WorldState,
    plan: &Plan,
    detected: &BTreeMap<String, SegmentMask>,
) -> (ExecutionTrace, WorldState) {
    let mut state = world.clone();
    let mut steps = Vec::with_capacity(plan.len());
    let mut failed_at = None;
    for (i, a) in plan.steps.iter().enumerate() {
        let overlaps = a
            .args
            .iter()
            .map(|id| {
                let v = match (world.mask(id), detected.get(id)) {
                    (Some(truth), Some(seen)) => iou(seen, &truth).unwrap_or(0.0),
                    _ => 0.0,
                };
                (id.clone(), v)
            })
            .collect();
        let (applied, error) = match state.step(a) {
            Ok(next) => {
                state = next;
                (true, None)
            }
            Err(e) => (false, Some(e.to_string())),
        };
        let trace = StepTrace {
            action: a.name(),
            applied,
            iou: overlaps,
            error,
        };
        let ok = trace.ok();
        steps.push(trace);
        if !ok {
            failed_at = Some(i);
            break;
        }
    }
    (
        ExecutionTrace {
            success: failed_at.is_none(),
            steps,
            failed_at,
        },
        state,
    )
}
