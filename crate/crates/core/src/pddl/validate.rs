use std::collections::BTreeSet;

use super::ground::instantiate;
use super::model::*;

/// Outcome of checking a plan against a problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationResult {
    Ok,
    /// Step `step` is not a well-formed instantiation of a domain action.
    BadStep { step: usize, reason: String },
    /// Precondition `literal` of step `step` does not hold.
    PreconditionUnmet { step: usize, literal: Literal },
    /// The final state (after `step` = plan length steps) misses a goal literal.
    GoalUnmet { step: usize, literal: Literal },
}

impl ValidationResult {
    pub fn is_ok(&self) -> bool {
        matches!(self, ValidationResult::Ok)
    }
}

pub fn holds(state: &BTreeSet<Atom>, lit: &Literal) -> bool {
    state.contains(&lit.atom) == lit.positive
}

/// Apply delete effects before add effects.
pub fn apply(state: &mut BTreeSet<Atom>, action: &GroundAction) {
    for d in &action.del {
        state.remove(d);
    }
    for a in &action.add {
        state.insert(a.clone());
    }
}

/// Replay `plan` from the initial state. Each step is re-instantiated from
/// the domain so stale precondition or effect lists cannot slip through.
pub fn validate_plan(d: &Domain, p: &Problem, plan: &Plan) -> ValidationResult {
    let mut state: BTreeSet<Atom> = p.init.iter().cloned().collect();
    for (i, step) in plan.steps.iter().enumerate() {
        let fresh = match instantiate(d, p, &step.schema, &step.args) {
            Ok(g) => g,
            Err(e) => {
                return ValidationResult::BadStep {
                    step: i,
                    reason: e.to_string(),
                }
            }
        };
        if let Some(l) = fresh.pre.iter().find(|l| !holds(&state, l)) {
            return ValidationResult::PreconditionUnmet {
                step: i,
                literal: l.clone(),
            };
        }
        apply(&mut state, &fresh);
    }
    match p.goal.iter().find(|l| !holds(&state, l)) {
        Some(l) => ValidationResult::GoalUnmet {
            step: plan.steps.len(),
            literal: l.clone(),
        },
        None => ValidationResult::Ok,
    }
}
