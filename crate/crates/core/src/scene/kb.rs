use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::graph::{AttributeTuple, SceneGraph};
use super::vocab::{Affordance, Attribute, Category, Label};
use super::SceneError;
use crate::pddl::{Atom, Domain, Literal, Problem, Typed};

/// One predicate emitted for each object carrying `label`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateTemplate {
    pub label: Label,
    pub predicate: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KbEntry {
    pub category: Category,
    /// PDDL type of constants of this category.
    #[serde(rename = "type")]
    pub type_name: String,
    pub affordances: BTreeSet<Affordance>,
    /// Attributes the category can carry. State attributes (`dirty`) are
    /// listed here but only emitted when the detected box has them.
    pub attributes: BTreeSet<Attribute>,
    pub templates: Vec<PredicateTemplate>,
}

impl KbEntry {
    pub fn supports(&self, label: Label) -> bool {
        match label {
            Label::Affordance(a) => self.affordances.contains(&a),
            Label::Attribute(a) => self.attributes.contains(&a),
        }
    }

    /// Labels a freshly observed, clean instance carries.
    pub fn default_tuple(&self) -> AttributeTuple {
        AttributeTuple {
            category: self.category,
            affordances: self.affordances.clone(),
            attributes: self
                .attributes
                .iter()
                .copied()
                .filter(|a| !a.is_state())
                .collect(),
        }
    }
}

/// Category -> affordances, attributes and predicate templates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    version: String,
    entries: BTreeMap<Category, KbEntry>,
}

#[derive(Serialize, Deserialize)]
struct KbFile {
    version: String,
    categories: Vec<KbEntry>,
}

const SHIPPED_KB: &str = include_str!("../../data/knowledge_base.json");

impl KnowledgeBase {
    pub fn new(version: impl Into<String>, entries: impl IntoIterator<Item = KbEntry>) -> Self {
        KnowledgeBase {
            version: version.into(),
            entries: entries.into_iter().map(|e| (e.category, e)).collect(),
        }
    }

    /// The shipped kitchen knowledge base.
    pub fn kitchen() -> Self {
        Self::from_json(SHIPPED_KB).expect("shipped knowledge base is valid")
    }

    pub fn from_json(text: &str) -> Result<Self, SceneError> {
        let f: KbFile = serde_json::from_str(text).map_err(|e| SceneError::Json(e.to_string()))?;
        let mut seen = BTreeSet::new();
        for e in &f.categories {
            if !seen.insert(e.category) {
                return Err(SceneError::DuplicateId(e.category.to_string()));
            }
            for t in &e.templates {
                if !e.supports(t.label) {
                    return Err(SceneError::Json(format!(
                        "template label `{}` not carried by `{}`",
                        t.label, e.category
                    )));
                }
            }
        }
        Ok(Self::new(f.version, f.categories))
    }

    pub fn to_json(&self) -> String {
        let f = KbFile {
            version: self.version.clone(),
            categories: self.entries.values().cloned().collect(),
        };
        serde_json::to_string_pretty(&f).expect("kb serializes")
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn entry(&self, c: Category) -> Option<&KbEntry> {
        self.entries.get(&c)
    }

    pub fn entries(&self) -> impl Iterator<Item = &KbEntry> {
        self.entries.values()
    }

    /// Every vocabulary category has an entry.
    pub fn is_complete(&self) -> bool {
        Category::ALL.iter().all(|c| self.entries.contains_key(c))
    }

    /// Whether category `c` can carry `label`.
    pub fn supports(&self, c: Category, label: Label) -> bool {
        self.entry(c).is_some_and(|e| e.supports(label))
    }

    /// Categories able to carry `label`, in vocabulary order.
    pub fn categories_with(&self, label: Label) -> Vec<Category> {
        Category::ALL
            .iter()
            .copied()
            .filter(|&c| self.supports(c, label))
            .collect()
    }

    /// Every template predicate and type is declared in `d` with the right arity.
    pub fn check_against(&self, d: &Domain) -> Result<(), SceneError> {
        for e in self.entries.values() {
            if !d.has_type(&e.type_name) {
                return Err(SceneError::UndeclaredPredicate(e.type_name.clone()));
            }
            for t in &e.templates {
                match d.predicate(&t.predicate) {
                    Some(p) if p.params.len() == 1 => {}
                    _ => return Err(SceneError::UndeclaredPredicate(t.predicate.clone())),
                }
            }
        }
        Ok(())
    }
}

/// A grounded scene object: PDDL constant plus provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundedObject {
    pub name: String,
    pub type_name: String,
    pub category: Category,
    /// Index into the source scene's objects.
    pub box_index: usize,
    /// 1-based left-to-right ordinal within the category.
    pub ordinal: usize,
}

/// Objects and initial atoms compiled from a scene.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SceneFragment {
    pub objects: Vec<GroundedObject>,
    pub init: Vec<Atom>,
}

impl SceneFragment {
    /// Objects of `category`, lowest ordinal first.
    pub fn candidates(&self, category: Category) -> impl Iterator<Item = &GroundedObject> {
        self.objects.iter().filter(move |o| o.category == category)
    }

    pub fn by_name(&self, name: &str) -> Option<&GroundedObject> {
        self.objects.iter().find(|o| o.name == name)
    }

    pub fn by_box(&self, box_index: usize) -> Option<&GroundedObject> {
        self.objects.iter().find(|o| o.box_index == box_index)
    }

    /// Complete a problem with `goal`.
    pub fn to_problem(&self, name: &str, domain: &Domain, goal: Vec<Literal>) -> Problem {
        Problem {
            name: name.to_string(),
            domain_name: domain.name.clone(),
            objects: self
                .objects
                .iter()
                .map(|o| Typed::new(o.name.clone(), o.type_name.clone()))
                .collect(),
            init: self.init.clone(),
            goal,
        }
    }
}

/// Compile a perceived scene into PDDL objects and initial atoms.
///
/// Objects are named `category-ordinal`, ordinals counted left to right by
/// box center. For each object, every knowledge-base template whose label the
/// box carries emits one atom; each relationship emits one atom.
pub fn build_initial_state(
    scene: &SceneGraph,
    kb: &KnowledgeBase,
    d: &Domain,
) -> Result<SceneFragment, SceneError> {
    let mut counters: BTreeMap<Category, usize> = BTreeMap::new();
    let mut fragment = SceneFragment::default();
    let mut names = vec![String::new(); scene.len()];

    for idx in scene.left_to_right() {
        let obj = &scene.objects()[idx];
        let category = obj.attrs.category;
        let entry = kb
            .entry(category)
            .ok_or_else(|| SceneError::UnknownCategory(category.to_string()))?;
        if !d.has_type(&entry.type_name) {
            return Err(SceneError::UndeclaredPredicate(entry.type_name.clone()));
        }
        let ordinal = counters.entry(category).or_insert(0);
        *ordinal += 1;
        let name = format!("{}-{}", category, ordinal);
        for t in &entry.templates {
            if obj.attrs.has(t.label) {
                if d.predicate(&t.predicate).is_none() {
                    return Err(SceneError::UndeclaredPredicate(t.predicate.clone()));
                }
                fragment.init.push(Atom::new(t.predicate.clone(), [name.clone()]));
            }
        }
        names[idx] = name.clone();
        fragment.objects.push(GroundedObject {
            name,
            type_name: entry.type_name.clone(),
            category,
            box_index: idx,
            ordinal: *ordinal,
        });
    }
    for r in scene.relationships() {
        let pred = r.relation.as_str();
        if d.predicate(pred).is_none() {
            return Err(SceneError::UndeclaredPredicate(pred.to_string()));
        }
        fragment.init.push(Atom::new(
            pred,
            [names[r.subject].clone(), names[r.object].clone()],
        ));
    }
    Ok(fragment)
}
