//! Goal-learning accuracy, per-stage trial attribution and the
//! VSR / ISR / SR success-rate report.

mod report;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::goal::{compile_goal, CompilationTable, GoalTriple, TaskAction};
use crate::pddl::{kitchen_domain, validate_plan, Plan, ValidationResult};
use crate::scene::{build_initial_state, KnowledgeBase, SceneGraph};
use crate::sim::{ExecutionTrace, Level, Scenario};

pub use report::{MetricsReport, StageCounts, StageRates, TaskLevelCell};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("{0} predictions but {1} gold triples")]
    LengthMismatch(usize, usize),
    #[error("nothing to evaluate")]
    EmptySet,
}

/// 1 when action, subject and object all match exactly, else 0.
pub fn rgl(pred: &GoalTriple, gold: &GoalTriple) -> u8 {
    u8::from(pred.action == gold.action)
        * u8::from(pred.subject == gold.subject)
        * u8::from(pred.object == gold.object)
}

/// Percentage of exact triple matches.
pub fn rgl_accuracy(preds: &[GoalTriple], golds: &[GoalTriple]) -> Result<f64, EvalError> {
    if preds.len() != golds.len() {
        return Err(EvalError::LengthMismatch(preds.len(), golds.len()));
    }
    if preds.is_empty() {
        return Err(EvalError::EmptySet);
    }
    let hits: u64 = preds.iter().zip(golds).map(|(p, g)| u64::from(rgl(p, g))).sum();
    Ok(100.0 * hits as f64 / preds.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stage {
    Perception,
    GoalLearning,
    TaskPlanning,
    Execution,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::Perception, Stage::GoalLearning, Stage::TaskPlanning, Stage::Execution];

    pub fn short(self) -> &'static str {
        match self {
            Stage::Perception => "P",
            Stage::GoalLearning => "GL",
            Stage::TaskPlanning => "TP",
            Stage::Execution => "E",
        }
    }
}

/// What the planning stage produced, with plan constants already mapped
/// to world ids.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanAttempt {
    Plan(Plan),
    /// Either the goal names something the scene lacks or search exhausted
    /// the reachable states.
    NoSolution(String),
    ResourceExceeded,
    /// An earlier stage failed (no goal to plan for).
    NotAttempted(String),
}

impl PlanAttempt {
    pub fn status(&self) -> &'static str {
        match self {
            PlanAttempt::Plan(_) => "plan",
            PlanAttempt::NoSolution(_) => "no-solution",
            PlanAttempt::ResourceExceeded => "resource-exceeded",
            PlanAttempt::NotAttempted(_) => "not-attempted",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub scenario: String,
    pub task: TaskAction,
    pub level: Level,
    pub seed: u64,
    pub request: String,
    pub gold: GoalTriple,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted: Option<GoalTriple>,
    pub perception_ok: bool,
    pub goal_ok: bool,
    pub plan_ok: bool,
    pub exec_ok: bool,
    pub plan_status: String,
    pub plan: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub execution: Option<String>,
}

impl TrialRecord {
    /// Whether the trial counts as a success at `stage` in the report.
    ///
    /// Valid scenarios cascade: a stage passes only if every earlier stage
    /// did. At Hard2 each stage is judged on its own, since rejecting the
    /// request is correct even after a wrong goal.
    pub fn passed(&self, stage: Stage) -> bool {
        let own = [self.perception_ok, self.goal_ok, self.plan_ok, self.exec_ok];
        let k = stage as usize;
        if self.level.has_solution() {
            own[..=k].iter().all(|&b| b)
        } else {
            own[k]
        }
    }

    /// Every stage succeeded.
    pub fn success(&self) -> bool {
        self.perception_ok && self.goal_ok && self.plan_ok && self.exec_ok
    }
}

/// Judge every stage of one trial.
///
/// - perception: every object the gold goal involves was detected with its
///   category;
/// - goal learning: `rgl(pred, gold) == 1`;
/// - planning: for a valid scenario the plan validates in the true world
///   against the gold goal compiled on the true scene; at Hard2 the outcome
///   is `NoSolution`;
/// - execution: the trace succeeded; vacuously true at Hard2.
pub fn attribute_trial(
    scenario: &Scenario,
    detected: &SceneGraph,
    pred: Option<&GoalTriple>,
    attempt: &PlanAttempt,
    trace: Option<&ExecutionTrace>,
) -> TrialRecord {
    let perception_ok = scenario.involved().iter().all(|id| {
        let truth = scenario.world.object(id).map(|o| o.category);
        detected
            .objects()
            .iter()
            .any(|o| &o.id == id && Some(o.attrs.category) == truth)
    });
    let goal_ok = pred.is_some_and(|p| rgl(p, &scenario.gold) == 1);
    let valid = scenario.level.has_solution();
    let plan_ok = match attempt {
        PlanAttempt::Plan(p) if valid => achieves_gold(scenario, p),
        PlanAttempt::NoSolution(_) => !valid,
        _ => false,
    };
    let exec_ok = if valid { trace.is_some_and(|t| t.success) } else { true };
    let (plan, note) = match attempt {
        PlanAttempt::Plan(p) => (p.steps.iter().map(|s| s.name()).collect(), None),
        PlanAttempt::NoSolution(r) | PlanAttempt::NotAttempted(r) => (vec![], Some(r.clone())),
        PlanAttempt::ResourceExceeded => (vec![], None),
    };
    TrialRecord {
        scenario: scenario.id.clone(),
        task: scenario.task,
        level: scenario.level,
        seed: scenario.seed,
        request: scenario.request.clone(),
        gold: scenario.gold,
        predicted: pred.copied(),
        perception_ok,
        goal_ok,
        plan_ok,
        exec_ok,
        plan_status: attempt.status().to_string(),
        plan,
        note,
        execution: trace.map(|t| t.summary()),
    }
}

/// Does `plan` (in world ids) reach the gold goal from the true world?
pub fn achieves_gold(scenario: &Scenario, plan: &Plan) -> bool {
    let kb = KnowledgeBase::kitchen();
    let d = kitchen_domain();
    let Ok(fragment) = build_initial_state(&scenario.world.scene(), &kb, &d) else {
        return false;
    };
    let Ok(goal) = compile_goal(&scenario.gold, &fragment, &CompilationTable::kitchen()) else {
        return false;
    };
    let problem = scenario.world.problem(&kb, &d, &scenario.id, goal);
    validate_plan(&d, &problem, plan) == ValidationResult::Ok
}

/// Per task × level × stage counts and the VSR / ISR / SR rates.
pub fn aggregate(records: &[TrialRecord]) -> Result<MetricsReport, EvalError> {
    if records.is_empty() {
        return Err(EvalError::EmptySet);
    }
    Ok(MetricsReport::from_records(records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::goal::Participant;
    use crate::scene::Category;

    fn t(a: TaskAction, s: Participant, o: Participant) -> GoalTriple {
        GoalTriple { action: a, subject: s, object: o }
    }

    #[test]
    fn rgl_examples() {
        let k = |c| Participant::Known(c);
        let g = t(TaskAction::Cut, k(Category::Tomato), k(Category::Knife));
        assert_eq!(rgl(&g, &g), 1);
        assert_eq!(rgl(&t(TaskAction::Cut, k(Category::Bread), k(Category::Knife)), &g), 0);
        let u = t(TaskAction::Cut, Participant::Unknown, k(Category::Knife));
        assert_eq!(rgl(&u, &u), 1);
        assert_eq!(rgl(&u, &g), 0);
    }

    #[test]
    fn accuracy_examples() {
        let g = GoalTriple::new(TaskAction::Cut, Category::Tomato, Category::Knife);
        let h = GoalTriple::new(TaskAction::Cook, Category::Egg, Category::Pan);
        assert_eq!(rgl_accuracy(&[g, g], &[g, g]).unwrap(), 100.0);
        assert_eq!(rgl_accuracy(&[g, h], &[g, g]).unwrap(), 50.0);
        assert_eq!(rgl_accuracy(&[], &[]), Err(EvalError::EmptySet));
        assert_eq!(rgl_accuracy(&[g], &[g, g]), Err(EvalError::LengthMismatch(1, 2)));
    }
}
