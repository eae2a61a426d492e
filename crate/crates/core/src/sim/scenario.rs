use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{SimError, WorldObject, WorldState};
use crate::goal::{GoalTriple, Participant, Role, TaskAction};
use crate::scene::{
    build_initial_state, Attribute, BoundingBox, Category, ImageSize, KnowledgeBase, Label,
    Relation, Relationship, SceneFile, SceneGraph, SceneObject, SegmentMask, DEFAULT_IMAGE_SIZE,
};
use crate::text::{choose_request, IncompleteMode, Style, TemplateSplit, Templates};
use crate::pddl::kitchen_domain;

/// Evaluation difficulty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// Only the task's participants.
    Easy,
    /// Participants plus irrelevant objects.
    Medium,
    /// Two or more instances of the subject.
    Hard1,
    /// At least one participant missing; the correct answer is no plan.
    Hard2,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::Easy, Level::Medium, Level::Hard1, Level::Hard2];
    pub const VALID: [Level; 3] = [Level::Easy, Level::Medium, Level::Hard1];

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Easy => "easy",
            Level::Medium => "medium",
            Level::Hard1 => "hard1",
            Level::Hard2 => "hard2",
        }
    }

    /// Whether a valid plan exists at this level.
    pub fn has_solution(self) -> bool {
        self != Level::Hard2
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Level {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Level::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| SimError::Inconsistent(format!("unknown level `{s}`")))
    }
}

/// Perception noise applied to the detected scene.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Probability that an object is missed entirely.
    pub category_dropout: f64,
    /// Maximum box/mask displacement in pixels along each axis.
    pub mask_jitter: f64,
}

impl NoiseConfig {
    pub fn none() -> Self {
        NoiseConfig {
            category_dropout: 0.0,
            mask_jitter: 0.0,
        }
    }

    pub fn is_noise_free(&self) -> bool {
        self.category_dropout == 0.0 && self.mask_jitter == 0.0
    }
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            category_dropout: 0.02,
            mask_jitter: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    pub task: TaskAction,
    pub level: Level,
    pub seed: u64,
    pub world: WorldState,
    pub request: String,
    pub style: Style,
    pub mode: Option<IncompleteMode>,
    /// Intended participants; at Hard2 one or both are absent from the world.
    pub subject_category: Category,
    pub object_category: Category,
    pub gold: GoalTriple,
    pub detected: SceneGraph,
}

impl Scenario {
    /// World ids of the objects the gold goal involves: lowest-ordinal
    /// subject and object instances present in the world.
    pub fn involved(&self) -> Vec<String> {
        let mut out = Vec::new();
        let ids = |c: Category| {
            let mut v: Vec<&String> = self
                .world
                .objects()
                .iter()
                .filter(|(_, o)| o.category == c)
                .map(|(id, _)| id)
                .collect();
            v.sort_by_key(|id| ordinal(id));
            v.into_iter().cloned().collect::<Vec<_>>()
        };
        if let Participant::Known(s) = self.gold.subject {
            if let Some(first) = ids(s).into_iter().next() {
                out.push(first);
            }
        }
        if let Participant::Known(o) = self.gold.object {
            if let Some(first) = ids(o).into_iter().find(|id| !out.contains(id)) {
                out.push(first);
            }
        }
        out
    }

    /// Detected masks keyed by world id.
    pub fn detected_masks(&self) -> BTreeMap<String, SegmentMask> {
        let size = self.detected.image();
        self.detected
            .objects()
            .iter()
            .map(|o| (o.id.clone(), o.mask_or_box(size)))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ScenarioFile::from(self)).expect("scenario serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let f: ScenarioFile =
            serde_json::from_str(text).map_err(|e| SimError::Inconsistent(e.to_string()))?;
        f.try_into()
    }
}

fn ordinal(id: &str) -> usize {
    id.rsplit('-').next().and_then(|n| n.parse().ok()).unwrap_or(usize::MAX)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScenarioFile {
    id: String,
    task: TaskAction,
    level: Level,
    seed: u64,
    request: String,
    style: Style,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mode: Option<IncompleteMode>,
    subject_category: Category,
    object_category: Category,
    gold: GoalTriple,
    world: WorldState,
    detected: SceneFile,
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        ScenarioFile {
            id: s.id.clone(),
            task: s.task,
            level: s.level,
            seed: s.seed,
            request: s.request.clone(),
            style: s.style,
            mode: s.mode,
            subject_category: s.subject_category,
            object_category: s.object_category,
            gold: s.gold,
            world: s.world.clone(),
            detected: SceneFile::from(&s.detected),
        }
    }
}

impl TryFrom<ScenarioFile> for Scenario {
    type Error = SimError;

    fn try_from(f: ScenarioFile) -> Result<Self, Self::Error> {
        f.world.check()?;
        Ok(Scenario {
            id: f.id,
            task: f.task,
            level: f.level,
            seed: f.seed,
            request: f.request,
            style: f.style,
            mode: f.mode,
            subject_category: f.subject_category,
            object_category: f.object_category,
            gold: f.gold,
            world: f.world,
            detected: SceneGraph::try_from(f.detected).map_err(SimError::Scene)?,
        })
    }
}

/// Builds scenarios from a knowledge base and template bank.
#[derive(Debug, Clone)]
pub struct ScenarioGenerator {
    kb: KnowledgeBase,
    templates: Templates,
    image: ImageSize,
}

impl Default for ScenarioGenerator {
    fn default() -> Self {
        Self::new(KnowledgeBase::kitchen(), Templates::kitchen())
    }
}

impl ScenarioGenerator {
    pub fn new(kb: KnowledgeBase, templates: Templates) -> Self {
        ScenarioGenerator {
            kb,
            templates,
            image: DEFAULT_IMAGE_SIZE,
        }
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn templates(&self) -> &Templates {
        &self.templates
    }

    fn role_pool(&self, task: TaskAction, role: Role) -> Vec<Category> {
        self.kb.categories_with(task.role_label(role))
    }

    /// Categories that can fill neither role of `task`.
    fn irrelevant_pool(&self, task: TaskAction) -> Vec<Category> {
        let (ls, lo) = (task.role_label(Role::Subject), task.role_label(Role::Object));
        Category::ALL
            .iter()
            .copied()
            .filter(|&c| !self.kb.supports(c, ls) && !self.kb.supports(c, lo))
            .collect()
    }

    /// Deterministic in `(task, level, seed)`. The world and request do not
    /// depend on `noise`; only the detected scene does.
    pub fn generate(&self, task: TaskAction, level: Level, seed: u64, noise: NoiseConfig) -> Scenario {
        let stream = task as u64 * 4 + level as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);

        let subject = *self.role_pool(task, Role::Subject).choose(&mut rng).expect("subject pool");
        let objects: Vec<Category> = self
            .role_pool(task, Role::Object)
            .into_iter()
            .filter(|&c| c != subject)
            .collect();
        let object = *objects.choose(&mut rng).expect("object pool");
        let irrelevant = self.irrelevant_pool(task);

        let mut cats = Vec::new();
        let (mut has_subject, mut has_object) = (true, true);
        let extra = match level {
            Level::Easy => {
                cats.extend([subject, object]);
                0
            }
            Level::Medium => {
                cats.extend([subject, object]);
                rng.gen_range(1..=3)
            }
            Level::Hard1 => {
                let n = rng.gen_range(2..=3);
                cats.extend(std::iter::repeat_n(subject, n));
                cats.push(object);
                rng.gen_range(0..=2)
            }
            Level::Hard2 => {
                let r: f64 = rng.gen();
                if r < 0.4 {
                    has_subject = false;
                } else if r < 0.8 {
                    has_object = false;
                } else {
                    has_subject = false;
                    has_object = false;
                }
                if has_subject {
                    cats.push(subject);
                }
                if has_object {
                    cats.push(object);
                }
                rng.gen_range(1..=3)
            }
        };
        let mut pool = irrelevant;
        pool.shuffle(&mut rng);
        cats.extend(pool.into_iter().take(extra));
        cats.shuffle(&mut rng);

        let world = self.layout(task, subject, &cats, &mut rng);
        let gold = GoalTriple {
            action: task,
            subject: if has_subject { Participant::Known(subject) } else { Participant::Unknown },
            object: if has_object { Participant::Known(object) } else { Participant::Unknown },
        };
        let truth = world.scene();
        let (request, style, mode) = choose_request(
            &self.templates,
            &mut rng,
            TemplateSplit::HeldOut,
            &truth,
            subject,
            object,
            &gold,
        );

        let mut noise_rng = ChaCha8Rng::seed_from_u64(seed);
        noise_rng.set_stream(stream + 64);
        let detected = perceive(&truth, noise, &mut noise_rng);
        Scenario {
            id: format!("{}-{}-{}", task.as_str().to_lowercase(), level, seed),
            task,
            level,
            seed,
            world,
            request,
            style,
            mode,
            subject_category: subject,
            object_category: object,
            gold,
            detected,
        }
    }

    /// One box per object in disjoint horizontal slots; ids are
    /// `category-ordinal`, counted left to right.
    fn layout(&self, task: TaskAction, subject: Category, cats: &[Category], rng: &mut ChaCha8Rng) -> WorldState {
        let (w, h) = (self.image.width as f64, self.image.height as f64);
        let n = cats.len().max(1) as f64;
        let slot = (w / n).floor();
        let mut placed: Vec<(Category, BoundingBox)> = Vec::new();
        for (i, &c) in cats.iter().enumerate() {
            let bw = (slot * rng.gen_range(0.55..0.85)).round().max(4.0);
            let x1 = (i as f64 * slot + rng.gen_range(0.0..=(slot - bw))).round();
            let bh = rng.gen_range(50.0..110.0f64).round();
            let y1 = rng.gen_range(40.0..=(h - bh - 20.0)).round();
            placed.push((c, BoundingBox::new(x1, y1, x1 + bw, y1 + bh).expect("positive box")));
        }
        placed.sort_by(|a, b| a.1.center_x().total_cmp(&b.1.center_x()));
        let mut counters: BTreeMap<Category, usize> = BTreeMap::new();
        let mut objects = BTreeMap::new();
        let mut order = Vec::new();
        for (c, bbox) in placed {
            let k = counters.entry(c).or_insert(0);
            *k += 1;
            let id = format!("{c}-{k}");
            let entry = self.kb.entry(c).expect("complete knowledge base");
            let mut o = WorldObject::new(entry.default_tuple(), bbox);
            o.dirty = task == TaskAction::Clean
                && c == subject
                && self.kb.supports(c, Label::Attribute(Attribute::Dirty));
            objects.insert(id.clone(), o);
            order.push(id);
        }
        let relations = order
            .windows(2)
            .map(|p| (p[0].clone(), Relation::NextTo, p[1].clone()))
            .collect();
        WorldState::new(self.image, objects, relations).expect("generated world is consistent")
    }
}

/// Apply dropout and jitter to a perfect scene. Surviving objects keep their ids.
pub fn perceive(truth: &SceneGraph, noise: NoiseConfig, rng: &mut ChaCha8Rng) -> SceneGraph {
    let size = truth.image();
    let mut keep = Vec::new();
    let mut objects = Vec::new();
    for o in truth.objects() {
        let dropped = rng.gen::<f64>() < noise.category_dropout;
        let (dx, dy) = if noise.mask_jitter > 0.0 {
            (
                rng.gen_range(-noise.mask_jitter..=noise.mask_jitter),
                rng.gen_range(-noise.mask_jitter..=noise.mask_jitter),
            )
        } else {
            (0.0, 0.0)
        };
        if dropped {
            keep.push(None);
            continue;
        }
        keep.push(Some(objects.len()));
        let b = o.bbox;
        let dx = dx.clamp(-b.x1, size.width as f64 - b.x2);
        let dy = dy.clamp(-b.y1, size.height as f64 - b.y2);
        let bbox = BoundingBox::new(b.x1 + dx, b.y1 + dy, b.x2 + dx, b.y2 + dy).expect("shifted box");
        objects.push(SceneObject {
            id: o.id.clone(),
            bbox,
            attrs: o.attrs.clone(),
            mask: None,
        });
    }
    let relationships = truth
        .relationships()
        .iter()
        .filter_map(|r| {
            Some(Relationship {
                subject: keep[r.subject]?,
                relation: r.relation,
                object: keep[r.object]?,
            })
        })
        .collect();
    SceneGraph::new(size, objects, relationships).expect("perceived scene stays valid")
}

/// [`ScenarioGenerator::generate`] with the shipped knowledge base and templates.
pub fn generate_scenario(task: TaskAction, level: Level, seed: u64, noise: NoiseConfig) -> Scenario {
    ScenarioGenerator::default().generate(task, level, seed, noise)
}

/// Ground-truth names agree with the names scene compilation assigns.
pub fn names_match_compilation(s: &Scenario, kb: &KnowledgeBase) -> bool {
    let truth = s.world.scene();
    match build_initial_state(&truth, kb, &kitchen_domain()) {
        Ok(f) => f
            .objects
            .iter()
            .all(|g| truth.objects()[g.box_index].id == g.name),
        Err(_) => false,
    }
}
