use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::goalgen::{IncompleteMode, Style, TemplateSplit};
use super::TextError;
use crate::goal::TaskAction;
use crate::scene::Category;

const SHIPPED_TEMPLATES: &str = include_str!("../../data/templates.json");

/// Training and held-out phrasings for one (task, style) cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateSet {
    pub train: Vec<String>,
    pub heldout: Vec<String>,
}

impl TemplateSet {
    pub fn split(&self, split: TemplateSplit) -> &[String] {
        match split {
            TemplateSplit::Train => &self.train,
            TemplateSplit::HeldOut => &self.heldout,
        }
    }
}

/// Instruction templates with `{s}` (subject) and `{o}` (object) slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Templates {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub tasks: BTreeMap<TaskAction, BTreeMap<String, TemplateSet>>,
}

/// Template-file key of a style.
pub fn kind_key(style: Style, mode: Option<IncompleteMode>) -> &'static str {
    match (style, mode) {
        (Style::ExplicitComplete, _) => "explicit-complete",
        (Style::ImplicitIntent, _) => "implicit-intent",
        (Style::ExplicitIncomplete, Some(m)) => m.as_str(),
        (Style::ExplicitIncomplete, None) => "missing-object",
    }
}

pub(crate) const KINDS: [(Style, Option<IncompleteMode>); 6] = [
    (Style::ExplicitComplete, None),
    (Style::ExplicitIncomplete, Some(IncompleteMode::MissingObject)),
    (Style::ExplicitIncomplete, Some(IncompleteMode::MissingAction)),
    (Style::ExplicitIncomplete, Some(IncompleteMode::HighLevelVerb)),
    (Style::ExplicitIncomplete, Some(IncompleteMode::Anaphoric)),
    (Style::ImplicitIntent, None),
];

pub fn uses_subject(t: &str) -> bool {
    t.contains("{s}")
}

pub fn uses_object(t: &str) -> bool {
    t.contains("{o}")
}

/// Surface form of a category inside a sentence.
pub fn surface(c: Category) -> &'static str {
    match c {
        Category::ButterKnife => "butter knife",
        other => other.as_str(),
    }
}

pub fn render(template: &str, subject: Category, object: Category) -> String {
    template
        .replace("{s}", surface(subject))
        .replace("{o}", surface(object))
}

impl Templates {
    pub fn kitchen() -> Self {
        Self::from_json(SHIPPED_TEMPLATES).expect("shipped templates are valid")
    }

    pub fn from_json(text: &str) -> Result<Self, TextError> {
        let t: Templates = serde_json::from_str(text).map_err(|e| TextError::Format(e.to_string()))?;
        t.check()?;
        Ok(t)
    }

    /// Every task has every style in both splits; slot usage matches the
    /// style (missing-object never names the subject, missing-action names
    /// both, all others name the subject).
    fn check(&self) -> Result<(), TextError> {
        for a in TaskAction::ALL {
            let cells = self
                .tasks
                .get(&a)
                .ok_or_else(|| TextError::Format(format!("no templates for {a}")))?;
            for (style, mode) in KINDS {
                let key = kind_key(style, mode);
                let set = cells
                    .get(key)
                    .ok_or_else(|| TextError::Format(format!("no {key} templates for {a}")))?;
                for split in [TemplateSplit::Train, TemplateSplit::HeldOut] {
                    if set.split(split).is_empty() {
                        return Err(TextError::Format(format!("empty {key} split for {a}")));
                    }
                    for t in set.split(split) {
                        let rest = t.replace("{s}", "").replace("{o}", "");
                        let ok_slots = match mode {
                            Some(IncompleteMode::MissingObject) => !uses_subject(t),
                            Some(IncompleteMode::MissingAction) => uses_subject(t) && uses_object(t),
                            _ => uses_subject(t),
                        };
                        if rest.contains('{') || rest.contains('}') || !ok_slots {
                            return Err(TextError::Format(format!("bad template `{t}`")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn get(
        &self,
        action: TaskAction,
        style: Style,
        mode: Option<IncompleteMode>,
        split: TemplateSplit,
    ) -> &[String] {
        self.tasks
            .get(&action)
            .and_then(|c| c.get(kind_key(style, mode)))
            .map_or(&[], |s| s.split(split))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("templates serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_templates_are_complete() {
        let t = Templates::kitchen();
        assert_eq!(Templates::from_json(&t.to_json()).unwrap(), t);
    }

    #[test]
    fn splits_are_disjoint() {
        let t = Templates::kitchen();
        for cells in t.tasks.values() {
            for set in cells.values() {
                assert!(set.train.iter().all(|x| !set.heldout.contains(x)));
            }
        }
    }

    #[test]
    fn rendering() {
        assert_eq!(
            render("Please cut me some {s} slices", Category::Tomato, Category::Knife),
            "Please cut me some tomato slices"
        );
        assert_eq!(render("use the {o}", Category::Tomato, Category::ButterKnife), "use the butter knife");
    }

    #[test]
    fn rejects_bad_slots() {
        let mut t = Templates::kitchen();
        t.tasks
            .get_mut(&TaskAction::Cut)
            .unwrap()
            .get_mut("missing-object")
            .unwrap()
            .train
            .push("cut the {s}".into());
        assert!(Templates::from_json(&t.to_json()).is_err());
    }
}
