use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{GoalError, GoalTriple, Role, TaskAction};
use crate::scene::Category;
use crate::text::tokenize;

const FORMAT: &str = "goalbridge-cooccurrence";
const FORMAT_VERSION: u32 = 1;
const ALPHA: f64 = 1.0;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
struct TokenCounts {
    /// Records containing the token.
    count: u32,
    action: BTreeMap<TaskAction, u32>,
    subject: BTreeMap<Category, u32>,
    object: BTreeMap<Category, u32>,
}

/// Token to action / participant association counts learned from
/// instruction-goal pairs. Immutable once trained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CooccurrenceTable {
    format: String,
    version: u32,
    records: u32,
    tokens: BTreeMap<String, TokenCounts>,
}

/// Count, per record, each distinct instruction token against the record's
/// gold action and known participants.
pub fn train_cooccurrence<'a, I>(records: I) -> Result<CooccurrenceTable, GoalError>
where
    I: IntoIterator<Item = (&'a str, &'a GoalTriple)>,
{
    let mut table = CooccurrenceTable {
        format: FORMAT.into(),
        version: FORMAT_VERSION,
        records: 0,
        tokens: BTreeMap::new(),
    };
    for (text, gold) in records {
        table.records += 1;
        let distinct: BTreeSet<String> = tokenize(text).into_iter().collect();
        for t in distinct {
            let e = table.tokens.entry(t).or_default();
            e.count += 1;
            *e.action.entry(gold.action).or_default() += 1;
            if let Some(c) = gold.subject.category() {
                *e.subject.entry(c).or_default() += 1;
            }
            if let Some(c) = gold.object.category() {
                *e.object.entry(c).or_default() += 1;
            }
        }
    }
    if table.records == 0 {
        return Err(GoalError::EmptyDataset);
    }
    Ok(table)
}

impl CooccurrenceTable {
    pub fn records(&self) -> u32 {
        self.records
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.tokens.keys().map(String::as_str)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.tokens.contains_key(token)
    }

    /// Smoothed `P(action | token)`; `None` for unseen tokens.
    pub fn action_score(&self, token: &str, action: TaskAction) -> Option<f64> {
        let e = self.tokens.get(token)?;
        let c = e.action.get(&action).copied().unwrap_or(0);
        Some(smoothed(c, e.count, TaskAction::ALL.len()))
    }

    /// Smoothed `P(category fills role | token)`; `None` for unseen tokens.
    pub fn participant_score(&self, token: &str, role: Role, category: Category) -> Option<f64> {
        let e = self.tokens.get(token)?;
        let m = match role {
            Role::Subject => &e.subject,
            Role::Object => &e.object,
        };
        let c = m.get(&category).copied().unwrap_or(0);
        Some(smoothed(c, e.count, Category::ALL.len()))
    }

    /// Highest-scoring action for a single token, ties to the first action.
    pub fn top_action(&self, token: &str) -> Option<TaskAction> {
        let mut best: Option<(f64, TaskAction)> = None;
        for a in TaskAction::ALL {
            let s = self.action_score(token, a)?;
            if best.is_none_or(|(b, _)| s > b) {
                best = Some((s, a));
            }
        }
        best.map(|(_, a)| a)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, GoalError> {
        let t: CooccurrenceTable =
            serde_json::from_str(text).map_err(|e| GoalError::Format(e.to_string()))?;
        if t.format != FORMAT || t.version != FORMAT_VERSION {
            return Err(GoalError::Format(format!(
                "unsupported table format {} v{}",
                t.format, t.version
            )));
        }
        Ok(t)
    }
}

fn smoothed(c: u32, total: u32, classes: usize) -> f64 {
    (c as f64 + ALPHA) / (total as f64 + ALPHA * classes as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::goal::Participant;

    fn triple(a: TaskAction, s: Category, o: Category) -> GoalTriple {
        GoalTriple::new(a, s, o)
    }

    #[test]
    fn deliver_token_scores_deliver() {
        let d = triple(TaskAction::Deliver, Category::Apple, Category::Person);
        let c = triple(TaskAction::Cut, Category::Apple, Category::Knife);
        let data = [
            ("deliver the apple", &d),
            ("please deliver it", &d),
            ("cut the apple", &c),
        ];
        let t = train_cooccurrence(data.iter().map(|(s, g)| (*s, *g))).unwrap();
        assert_eq!(t.top_action("deliver"), Some(TaskAction::Deliver));
        assert_eq!(t.top_action("cut"), Some(TaskAction::Cut));
        assert_eq!(t.top_action("unseen"), None);
        assert!(
            t.participant_score("apple", Role::Subject, Category::Apple).unwrap()
                > t.participant_score("apple", Role::Subject, Category::Bread).unwrap()
        );
    }

    #[test]
    fn single_record_has_its_token_set() {
        let g = GoalTriple::new(TaskAction::Cut, Participant::Unknown, Category::Knife);
        let t = train_cooccurrence([("Cut the the knife!", &g)]).unwrap();
        assert_eq!(t.tokens().collect::<Vec<_>>(), vec!["cut", "knife", "the"]);
        assert_eq!(t.records(), 1);
    }

    #[test]
    fn empty_dataset() {
        assert_eq!(
            train_cooccurrence(std::iter::empty()),
            Err(GoalError::EmptyDataset)
        );
    }

    #[test]
    fn order_independent_and_round_trips() {
        let a = triple(TaskAction::Cook, Category::Egg, Category::Stove);
        let b = triple(TaskAction::Clean, Category::Plate, Category::Sink);
        let t1 = train_cooccurrence([("fry the egg", &a), ("wash the plate", &b)]).unwrap();
        let t2 = train_cooccurrence([("wash the plate", &b), ("fry the egg", &a)]).unwrap();
        assert_eq!(t1, t2);
        assert_eq!(CooccurrenceTable::from_json(&t1.to_json()).unwrap(), t1);
        assert!(CooccurrenceTable::from_json(&t1.to_json().replace(FORMAT, "other")).is_err());
    }
}
