use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::templates::{render, uses_object, uses_subject, Templates, KINDS};
use super::TextError;
use crate::goal::{role_candidates, GoalTriple, Participant, Role, TaskAction};
use crate::scene::{Category, Relationship, SceneGraph};
use crate::sim::{Level, NoiseConfig, ScenarioGenerator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Style {
    ExplicitComplete,
    ExplicitIncomplete,
    ImplicitIntent,
}

impl Style {
    pub const ALL: [Style; 3] = [Style::ExplicitComplete, Style::ExplicitIncomplete, Style::ImplicitIntent];

    /// Expected share of each style in a generated goal dataset.
    pub fn expected_share(self) -> f64 {
        match self {
            Style::ExplicitComplete => 0.4,
            Style::ExplicitIncomplete => 0.3,
            Style::ImplicitIntent => 0.3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Style::ExplicitComplete => "explicit-complete",
            Style::ExplicitIncomplete => "explicit-incomplete",
            Style::ImplicitIntent => "implicit-intent",
        }
    }
}

/// How an explicit instruction leaves information out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IncompleteMode {
    /// The thing acted upon is not named.
    MissingObject,
    /// No action verb.
    MissingAction,
    /// A vague verb ("prep", "take care of").
    HighLevelVerb,
    /// The subject is named once and then referred to as "it".
    Anaphoric,
}

impl IncompleteMode {
    pub const ALL: [IncompleteMode; 4] = [
        IncompleteMode::MissingObject,
        IncompleteMode::MissingAction,
        IncompleteMode::HighLevelVerb,
        IncompleteMode::Anaphoric,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IncompleteMode::MissingObject => "missing-object",
            IncompleteMode::MissingAction => "missing-action",
            IncompleteMode::HighLevelVerb => "high-level-verb",
            IncompleteMode::Anaphoric => "anaphoric",
        }
    }
}

/// Which template bank to draw from. Evaluation requests always use the
/// held-out bank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemplateSplit {
    Train,
    HeldOut,
}

/// Probability that a goal record simulates a missed detection.
pub const IMPERFECT_VISION_RATE: f64 = 0.15;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalRecord {
    pub scene_id: String,
    pub instruction: String,
    pub style: Style,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<IncompleteMode>,
    pub goal: GoalTriple,
    /// Categories removed from the source scene before the instruction was
    /// posed (imperfect vision).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub absent: Vec<Category>,
}

impl GoalRecord {
    /// The scene the instruction refers to.
    pub fn scene(&self, pool: &[PoolScene]) -> Option<SceneGraph> {
        let base = pool.iter().find(|p| p.id == self.scene_id)?;
        Some(without_categories(&base.scene, &self.absent))
    }
}

/// A scene in the generator's source pool.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolScene {
    pub id: String,
    pub scene: SceneGraph,
}

/// Perfectly perceived scenes from valid scenarios, tasks and levels in
/// rotation.
pub fn scene_pool(seed: u64, n: usize) -> Vec<PoolScene> {
    let g = ScenarioGenerator::default();
    (0..n)
        .map(|i| {
            let task = TaskAction::ALL[i % TaskAction::ALL.len()];
            let level = Level::VALID[(i / TaskAction::ALL.len()) % Level::VALID.len()];
            let s = g.generate(task, level, seed.wrapping_add(i as u64), NoiseConfig::none());
            PoolScene {
                id: format!("scene-{i:05}"),
                scene: s.detected,
            }
        })
        .collect()
}

/// `scene` without any object of the given categories.
pub fn without_categories(scene: &SceneGraph, cats: &[Category]) -> SceneGraph {
    if cats.is_empty() {
        return scene.clone();
    }
    let mut remap = Vec::new();
    let mut objects = Vec::new();
    for o in scene.objects() {
        if cats.contains(&o.attrs.category) {
            remap.push(None);
        } else {
            remap.push(Some(objects.len()));
            objects.push(o.clone());
        }
    }
    let rels = scene
        .relationships()
        .iter()
        .filter_map(|r| {
            Some(Relationship {
                subject: remap[r.subject]?,
                relation: r.relation,
                object: remap[r.object]?,
            })
        })
        .collect();
    SceneGraph::new(scene.image(), objects, rels).expect("subset of a valid scene")
}

fn expect(cands: &[Category], p: Participant) -> bool {
    match p {
        Participant::Known(c) => cands == [c],
        Participant::Unknown => cands.is_empty(),
    }
}

/// Whether a template's unnamed roles are recoverable from `scene` alone,
/// i.e. the scene offers exactly the gold participant (or nothing, when the
/// gold is `UNKNOWN`).
pub(crate) fn consistent(
    template: &str,
    scene: &SceneGraph,
    subject: Category,
    object: Category,
    gold: &GoalTriple,
) -> bool {
    let a = gold.action;
    let (us, uo) = (uses_subject(template), uses_object(template));
    let subject_ok = us || {
        let other = uo.then_some(object);
        expect(&role_candidates(scene, a, Role::Subject, other), gold.subject)
    };
    let object_ok = uo || {
        let other = if us { Some(subject) } else { gold.subject.category() };
        expect(&role_candidates(scene, a, Role::Object, other), gold.object)
    };
    subject_ok && object_ok
}

fn pick_style(rng: &mut ChaCha8Rng) -> (Style, Option<IncompleteMode>) {
    let r: f64 = rng.gen();
    if r < Style::ExplicitComplete.expected_share() {
        (Style::ExplicitComplete, None)
    } else if r < 1.0 - Style::ImplicitIntent.expected_share() {
        let m = *IncompleteMode::ALL.choose(rng).expect("modes");
        (Style::ExplicitIncomplete, Some(m))
    } else {
        (Style::ImplicitIntent, None)
    }
}

/// Draw a style, then a template of that style whose unnamed roles the
/// scene resolves to the gold. Falls back to other modes of the same style,
/// then to any style.
pub(crate) fn choose_request(
    templates: &Templates,
    rng: &mut ChaCha8Rng,
    split: TemplateSplit,
    scene: &SceneGraph,
    subject: Category,
    object: Category,
    gold: &GoalTriple,
) -> (String, Style, Option<IncompleteMode>) {
    let (style, mode) = pick_style(rng);
    let pick = |style, mode, rng: &mut ChaCha8Rng| {
        let ok: Vec<&String> = templates
            .get(gold.action, style, mode, split)
            .iter()
            .filter(|t| consistent(t, scene, subject, object, gold))
            .collect();
        ok.choose(rng).map(|t| render(t, subject, object))
    };
    if let Some(text) = pick(style, mode, rng) {
        return (text, style, mode);
    }
    let same_style = KINDS.iter().filter(|k| k.0 == style);
    let others = KINDS.iter().filter(|k| k.0 != style);
    for &(s, m) in same_style.chain(others) {
        if let Some(text) = pick(s, m, rng) {
            return (text, s, m);
        }
    }
    unreachable!("template validation guarantees a two-slot explicit template")
}

/// Every `(action, subject, object)` the scene can host.
fn feasible_triples(scene: &SceneGraph) -> Vec<(TaskAction, Category, Category)> {
    let mut out = Vec::new();
    for a in TaskAction::ALL {
        for s in role_candidates(scene, a, Role::Subject, None) {
            for o in role_candidates(scene, a, Role::Object, Some(s)) {
                out.push((a, s, o));
            }
        }
    }
    out
}

/// Instruction/goal pairs over scenes from `pool`. Each record picks a
/// scene, an action the scene supports, participants, a style and a
/// template. With probability [`IMPERFECT_VISION_RATE`] the subject, the
/// object or both are removed from the scene and the gold marks them
/// `UNKNOWN`.
pub fn generate_goal_dataset(
    seed: u64,
    count: usize,
    pool: &[PoolScene],
    split: TemplateSplit,
) -> Result<Vec<GoalRecord>, TextError> {
    generate_goal_dataset_with(&Templates::kitchen(), seed, count, pool, split)
}

pub fn generate_goal_dataset_with(
    templates: &Templates,
    seed: u64,
    count: usize,
    pool: &[PoolScene],
    split: TemplateSplit,
) -> Result<Vec<GoalRecord>, TextError> {
    if pool.is_empty() {
        return Err(TextError::EmptySceneSource);
    }
    let options: Vec<(usize, Vec<(TaskAction, Category, Category)>)> = pool
        .iter()
        .enumerate()
        .map(|(i, p)| (i, feasible_triples(&p.scene)))
        .filter(|(_, t)| !t.is_empty())
        .collect();
    if options.is_empty() {
        return Err(TextError::EmptySceneSource);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let (idx, triples) = options.choose(&mut rng).expect("non-empty");
        let actions: BTreeSet<TaskAction> = triples.iter().map(|t| t.0).collect();
        let actions: Vec<TaskAction> = actions.into_iter().collect();
        let action = *actions.choose(&mut rng).expect("non-empty");
        let for_action: Vec<_> = triples.iter().filter(|t| t.0 == action).collect();
        let &&(_, s, o) = for_action.choose(&mut rng).expect("non-empty");
        let base = &pool[*idx].scene;

        let mut absent = Vec::new();
        let mut gold = GoalTriple::new(action, s, o);
        if s != o && rng.gen_bool(IMPERFECT_VISION_RATE) {
            let r: f64 = rng.gen();
            if r < 0.5 || r >= 0.85 {
                absent.push(s);
                gold.subject = Participant::Unknown;
            }
            if r >= 0.5 {
                absent.push(o);
                gold.object = Participant::Unknown;
            }
        }
        let scene = without_categories(base, &absent);
        let (instruction, style, mode) = choose_request(templates, &mut rng, split, &scene, s, o, &gold);
        out.push(GoalRecord {
            scene_id: pool[*idx].id.clone(),
            instruction,
            style,
            mode,
            goal: gold,
            absent,
        });
    }
    Ok(out)
}
