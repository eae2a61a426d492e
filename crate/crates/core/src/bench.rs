//! The four-stage pipeline (perception, goal learning, planning, execution)
//! and the task × level benchmark suite.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eval::{attribute_trial, PlanAttempt, TrialRecord};
use crate::goal::{
    compile_goal, train_cooccurrence, BaselinePredictor, CompilationTable, GoalError,
    GoalPredictor, GoalTriple, OraclePredictor, TaskAction,
};
use crate::pddl::{kitchen_domain, Domain, Literal, Plan};
use crate::planner::{plan, Outcome, SearchConfig};
use crate::scene::{build_initial_state, KnowledgeBase, SceneFragment, SceneGraph, SegmentMask};
use crate::sim::{run_plan, ExecutionTrace, Level, NoiseConfig, Scenario, ScenarioGenerator, WorldState};
use crate::text::{generate_goal_dataset, scene_pool, TemplateSplit};

/// Everything one request produced, stage by stage.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub goal: Result<GoalTriple, GoalError>,
    pub fragment: Option<SceneFragment>,
    pub compiled: Option<Vec<Literal>>,
    /// Plan over the compiled constant names (`knife-1`, ...).
    pub local_plan: Option<Plan>,
    /// The same attempt with constants mapped to scene object ids.
    pub attempt: PlanAttempt,
    pub expansions: usize,
}

#[derive(Debug, Clone)]
pub struct Pipeline {
    pub kb: KnowledgeBase,
    pub domain: Domain,
    pub compilation: CompilationTable,
    pub search: SearchConfig,
}

impl Default for Pipeline {
    fn default() -> Self {
        Pipeline::kitchen(SearchConfig::default())
    }
}

impl Pipeline {
    pub fn kitchen(search: SearchConfig) -> Self {
        Pipeline {
            kb: KnowledgeBase::kitchen(),
            domain: kitchen_domain(),
            compilation: CompilationTable::kitchen(),
            search,
        }
    }

    /// Predict, compile against `scene` and plan.
    pub fn run(&self, scene: &SceneGraph, instruction: &str, predictor: &dyn GoalPredictor) -> PipelineRun {
        let goal = predictor.predict(instruction, scene);
        let mut out = PipelineRun {
            goal: goal.clone(),
            fragment: None,
            compiled: None,
            local_plan: None,
            attempt: PlanAttempt::NotAttempted(String::new()),
            expansions: 0,
        };
        let g = match goal {
            Ok(g) => g,
            Err(e) => {
                out.attempt = PlanAttempt::NotAttempted(e.to_string());
                return out;
            }
        };
        let fragment = match build_initial_state(scene, &self.kb, &self.domain) {
            Ok(f) => f,
            Err(e) => {
                out.attempt = PlanAttempt::NotAttempted(e.to_string());
                return out;
            }
        };
        let compiled = match compile_goal(&g, &fragment, &self.compilation) {
            Ok(c) => c,
            Err(e @ GoalError::MissingObject(_)) => {
                out.attempt = PlanAttempt::NoSolution(e.to_string());
                out.fragment = Some(fragment);
                return out;
            }
            Err(e) => {
                out.attempt = PlanAttempt::NotAttempted(e.to_string());
                out.fragment = Some(fragment);
                return out;
            }
        };
        let problem = fragment.to_problem("request", &self.domain, compiled.clone());
        let result = plan(&self.domain, &problem, &self.search);
        out.expansions = result.stats.expansions;
        out.attempt = match result.outcome {
            Outcome::Plan(p) => {
                let ids: BTreeMap<String, String> = fragment
                    .objects
                    .iter()
                    .map(|o| (o.name.clone(), scene.objects()[o.box_index].id.clone()))
                    .collect();
                let renamed = p.rename(&ids);
                out.local_plan = Some(p);
                PlanAttempt::Plan(renamed)
            }
            Outcome::NoSolution => PlanAttempt::NoSolution("search exhausted the reachable states".into()),
            Outcome::ResourceExceeded => PlanAttempt::ResourceExceeded,
        };
        out.fragment = Some(fragment);
        out.compiled = Some(compiled);
        out
    }

    /// Execute a run's plan in `world`, locating objects through `detected`.
    pub fn execute(
        &self,
        run: &PipelineRun,
        world: &WorldState,
        detected: &BTreeMap<String, SegmentMask>,
    ) -> Option<(ExecutionTrace, WorldState)> {
        match &run.attempt {
            PlanAttempt::Plan(p) => Some(run_plan(world, p, detected)),
            _ => None,
        }
    }

    /// One benchmark trial: the pipeline sees the scenario's detected scene
    /// and request and acts in its world.
    pub fn run_trial(&self, scenario: &Scenario, predictor: &dyn GoalPredictor) -> TrialRecord {
        let run = self.run(&scenario.detected, &scenario.request, predictor);
        let trace = if scenario.level.has_solution() {
            self.execute(&run, &scenario.world, &scenario.detected_masks()).map(|(t, _)| t)
        } else {
            None
        };
        attribute_trial(
            scenario,
            &scenario.detected,
            run.goal.as_ref().ok(),
            &run.attempt,
            trace.as_ref(),
        )
    }
}

/// Which goal predictor a benchmark uses.
#[derive(Clone)]
pub enum PredictorSpec {
    /// The scenario's gold triple.
    Oracle,
    Model(Arc<dyn GoalPredictor>),
}

impl PredictorSpec {
    pub fn name(&self) -> &str {
        match self {
            PredictorSpec::Oracle => "oracle",
            PredictorSpec::Model(m) => m.name(),
        }
    }
}

impl std::fmt::Debug for PredictorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub seed: u64,
    /// Scenarios per task × level cell.
    pub trials: usize,
    pub tasks: Vec<TaskAction>,
    pub levels: Vec<Level>,
    pub noise: NoiseConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            seed: 0,
            trials: 10,
            tasks: TaskAction::ALL.to_vec(),
            levels: Level::ALL.to_vec(),
            noise: NoiseConfig::default(),
        }
    }
}

/// Scenarios in task, level, trial order. Trial `i` uses seed `seed + i`.
pub fn suite(cfg: &BenchConfig) -> Vec<Scenario> {
    let g = ScenarioGenerator::default();
    let mut out = Vec::with_capacity(cfg.tasks.len() * cfg.levels.len() * cfg.trials);
    for &t in &cfg.tasks {
        for &l in &cfg.levels {
            for i in 0..cfg.trials {
                out.push(g.generate(t, l, cfg.seed.wrapping_add(i as u64), cfg.noise));
            }
        }
    }
    out
}

/// Run every scenario of the suite in parallel; records keep suite order.
pub fn run_bench(cfg: &BenchConfig, predictor: &PredictorSpec, pipeline: &Pipeline) -> Vec<TrialRecord> {
    suite(cfg)
        .par_iter()
        .map(|s| match predictor {
            PredictorSpec::Oracle => pipeline.run_trial(s, &OraclePredictor { gold: s.gold }),
            PredictorSpec::Model(m) => pipeline.run_trial(s, m.as_ref()),
        })
        .collect()
}

/// Scenes in the training pool used by [`train_baseline`].
pub const TRAINING_POOL: usize = 150;

/// Baseline predictor with a co-occurrence table learned from `count`
/// generated training-split records.
pub fn train_baseline(seed: u64, count: usize) -> Result<BaselinePredictor, GoalError> {
    let pool = scene_pool(seed, TRAINING_POOL);
    let records = generate_goal_dataset(seed, count, &pool, TemplateSplit::Train)
        .map_err(|e| GoalError::Format(e.to_string()))?;
    let table = train_cooccurrence(records.iter().map(|r| (r.instruction.as_str(), &r.goal)))?;
    Ok(BaselinePredictor::kitchen().with_table(table))
}
