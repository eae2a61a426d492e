//! Symbolic goal triples, the baseline instruction-to-goal predictor and
//! compilation of goal triples into PDDL goal conjunctions.

mod compile;
mod cooccur;
mod lexicon;
mod predict;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::scene::{Affordance, Attribute, Category, Label};

pub use compile::{compile_goal, CompilationRule, CompilationTable, RoleRef};
pub use cooccur::{train_cooccurrence, CooccurrenceTable};
pub use lexicon::{Mention, PredictorLexicon};
pub use predict::{role_candidates, BaselinePredictor, GoalPredictor, OraclePredictor};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GoalError {
    #[error("instruction is empty")]
    EmptyInstruction,
    #[error("no action verb or intent pattern in `{0}`")]
    UnresolvableAction(String),
    #[error("no grounded constant for the {0}")]
    MissingObject(Role),
    #[error("training dataset is empty")]
    EmptyDataset,
    #[error("predicate `{0}` is not declared in the domain")]
    UndeclaredPredicate(String),
    #[error("{0}")]
    Format(String),
}

/// The five household activities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TaskAction {
    PickPlace,
    Deliver,
    Cut,
    Cook,
    Clean,
}

impl TaskAction {
    pub const ALL: [TaskAction; 5] = [
        TaskAction::PickPlace,
        TaskAction::Deliver,
        TaskAction::Cut,
        TaskAction::Cook,
        TaskAction::Clean,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskAction::PickPlace => "PickPlace",
            TaskAction::Deliver => "Deliver",
            TaskAction::Cut => "Cut",
            TaskAction::Cook => "Cook",
            TaskAction::Clean => "Clean",
        }
    }

    /// Label a category must carry to fill `role` for this task.
    pub fn role_label(self, role: Role) -> Label {
        use TaskAction::*;
        match (self, role) {
            (Cut, Role::Subject) => Label::Affordance(Affordance::Cuttable),
            (Cut, Role::Object) => Label::Affordance(Affordance::Cut),
            (Cook, Role::Subject) => Label::Attribute(Attribute::Cookable),
            (Cook, Role::Object) => Label::Affordance(Affordance::Heat),
            (Clean, Role::Subject) => Label::Attribute(Attribute::Dirty),
            (Clean, Role::Object) => Label::Attribute(Attribute::Cleaner),
            (PickPlace, Role::Subject) | (Deliver, Role::Subject) => {
                Label::Attribute(Attribute::Graspable)
            }
            (PickPlace, Role::Object) => Label::Affordance(Affordance::Contain),
            (Deliver, Role::Object) => Label::Attribute(Attribute::Receiver),
        }
    }
}

impl fmt::Display for TaskAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskAction {
    type Err = GoalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_alphanumeric())
            .flat_map(char::to_lowercase)
            .collect();
        TaskAction::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(&key))
            .ok_or_else(|| GoalError::Format(format!("unknown task action `{s}`")))
    }
}

/// Goal-triple slot: subject is the patient, object the instrument or
/// destination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Subject,
    Object,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Subject => "subject",
            Role::Object => "object",
        })
    }
}

/// A scene category, or `UNKNOWN` when the participant cannot be found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Participant {
    Known(Category),
    Unknown,
}

pub const UNKNOWN: &str = "UNKNOWN";

impl Participant {
    pub fn category(self) -> Option<Category> {
        match self {
            Participant::Known(c) => Some(c),
            Participant::Unknown => None,
        }
    }
}

impl From<Category> for Participant {
    fn from(c: Category) -> Self {
        Participant::Known(c)
    }
}

impl fmt::Display for Participant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Participant::Known(c) => write!(f, "{c}"),
            Participant::Unknown => f.write_str(UNKNOWN),
        }
    }
}

impl FromStr for Participant {
    type Err = GoalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case(UNKNOWN) {
            return Ok(Participant::Unknown);
        }
        s.parse::<Category>()
            .map(Participant::Known)
            .map_err(|e| GoalError::Format(e.to_string()))
    }
}

impl Serialize for Participant {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Participant {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `(action, subject, object)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GoalTriple {
    pub action: TaskAction,
    pub subject: Participant,
    pub object: Participant,
}

impl GoalTriple {
    pub fn new(action: TaskAction, subject: impl Into<Participant>, object: impl Into<Participant>) -> Self {
        GoalTriple {
            action,
            subject: subject.into(),
            object: object.into(),
        }
    }

    pub fn participant(&self, role: Role) -> Participant {
        match role {
            Role::Subject => self.subject,
            Role::Object => self.object,
        }
    }
}

impl fmt::Display for GoalTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.action, self.subject, self.object)
    }
}
