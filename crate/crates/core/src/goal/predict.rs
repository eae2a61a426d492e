use super::{
    CooccurrenceTable, GoalError, GoalTriple, Mention, Participant, PredictorLexicon, Role,
    TaskAction,
};
use crate::scene::{Category, KnowledgeBase, SceneGraph};
use crate::text::tokenize;

/// Instruction + perceived scene to goal triple.
pub trait GoalPredictor: Send + Sync {
    fn name(&self) -> &str;

    fn predict(&self, instruction: &str, scene: &SceneGraph) -> Result<GoalTriple, GoalError>;
}

/// Returns a fixed, known-correct triple. Used to measure the ceiling of the
/// rest of the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OraclePredictor {
    pub gold: GoalTriple,
}

impl GoalPredictor for OraclePredictor {
    fn name(&self) -> &str {
        "oracle"
    }

    fn predict(&self, instruction: &str, _scene: &SceneGraph) -> Result<GoalTriple, GoalError> {
        if tokenize(instruction).is_empty() {
            return Err(GoalError::EmptyInstruction);
        }
        Ok(self.gold)
    }
}

/// Lexical matching backed by an optional learned co-occurrence table.
///
/// The action comes from the first lexicon verb, else the earliest intent
/// phrase, else the co-occurrence table restricted to actions whose roles
/// can absorb every named category. Named categories fill roles in text
/// order (an object marker such as "with" or "into" prefers the object
/// role). A named category missing from the scene becomes `UNKNOWN`; an
/// unnamed role is filled from the scene by co-occurrence score, ties to
/// the leftmost candidate, and is `UNKNOWN` when nothing in view fits.
#[derive(Debug, Clone)]
pub struct BaselinePredictor {
    kb: KnowledgeBase,
    lexicon: PredictorLexicon,
    table: Option<CooccurrenceTable>,
}

struct Assignment {
    subject: Option<Category>,
    object: Option<Category>,
    unplaced: usize,
}

impl BaselinePredictor {
    pub fn new(kb: KnowledgeBase, lexicon: PredictorLexicon, table: Option<CooccurrenceTable>) -> Self {
        BaselinePredictor { kb, lexicon, table }
    }

    /// Shipped knowledge base and lexicon, no learned table.
    pub fn kitchen() -> Self {
        Self::new(KnowledgeBase::kitchen(), PredictorLexicon::kitchen(), None)
    }

    pub fn with_table(mut self, table: CooccurrenceTable) -> Self {
        self.table = Some(table);
        self
    }

    pub fn table(&self) -> Option<&CooccurrenceTable> {
        self.table.as_ref()
    }

    fn assign(&self, action: TaskAction, mentions: &[Mention]) -> Assignment {
        let fits = |c: Category, role| self.kb.supports(c, action.role_label(role));
        let mut a = Assignment {
            subject: None,
            object: None,
            unplaced: 0,
        };
        for m in mentions {
            let (fs, fo) = (fits(m.category, Role::Subject), fits(m.category, Role::Object));
            if m.after_marker && fo && a.object.is_none() {
                a.object = Some(m.category);
            } else if fs && a.subject.is_none() {
                a.subject = Some(m.category);
            } else if fo && a.object.is_none() {
                a.object = Some(m.category);
            } else {
                a.unplaced += 1;
            }
        }
        a
    }

    fn content<'t>(&self, tokens: &'t [String]) -> impl Iterator<Item = &'t str> + use<'t, '_> {
        tokens
            .iter()
            .map(String::as_str)
            .filter(|t| !self.lexicon.is_stopword(t))
    }

    fn resolve_action(
        &self,
        tokens: &[String],
        mentions: &[Mention],
        text: &str,
    ) -> Result<TaskAction, GoalError> {
        if let Some(a) = self.lexicon.verb_action(tokens) {
            return Ok(a);
        }
        if let Some(a) = self.lexicon.intent_action(tokens) {
            return Ok(a);
        }
        let unresolvable = || GoalError::UnresolvableAction(text.to_string());
        let table = self.table.as_ref().ok_or_else(unresolvable)?;
        let mut feasible: Vec<TaskAction> = TaskAction::ALL
            .into_iter()
            .filter(|&a| self.assign(a, mentions).unplaced == 0)
            .collect();
        if feasible.is_empty() {
            feasible = TaskAction::ALL.to_vec();
        }
        let mut best: Option<(f64, TaskAction)> = None;
        for a in feasible {
            let mut score = 0.0;
            let mut seen = false;
            for t in self.content(tokens) {
                if let Some(s) = table.action_score(t, a) {
                    score += s;
                    seen = true;
                }
            }
            if seen && best.is_none_or(|(b, _)| score > b) {
                best = Some((score, a));
            }
        }
        best.map(|(_, a)| a).ok_or_else(unresolvable)
    }

    fn from_scene(
        &self,
        action: TaskAction,
        role: Role,
        other: Option<Category>,
        tokens: &[String],
        scene: &SceneGraph,
    ) -> Participant {
        let mut best: Option<(f64, Category)> = None;
        for c in role_candidates(scene, action, role, other) {
            let score: f64 = match &self.table {
                Some(t) => self
                    .content(tokens)
                    .filter_map(|tok| t.participant_score(tok, role, c))
                    .sum(),
                None => 0.0,
            };
            if best.is_none_or(|(b, _)| score > b) {
                best = Some((score, c));
            }
        }
        best.map_or(Participant::Unknown, |(_, c)| Participant::Known(c))
    }
}

/// Scene categories, left to right, with an instance able to fill `role`.
/// The category already filling the other role is skipped unless the scene
/// holds at least two of it.
pub fn role_candidates(
    scene: &SceneGraph,
    action: TaskAction,
    role: Role,
    other: Option<Category>,
) -> Vec<Category> {
    let label = action.role_label(role);
    scene
        .categories()
        .into_iter()
        .filter(|&c| {
            let instances: Vec<_> = scene
                .objects()
                .iter()
                .filter(|o| o.attrs.category == c)
                .collect();
            instances.iter().any(|o| o.attrs.has(label)) && (other != Some(c) || instances.len() >= 2)
        })
        .collect()
}

impl GoalPredictor for BaselinePredictor {
    fn name(&self) -> &str {
        "baseline"
    }

    fn predict(&self, instruction: &str, scene: &SceneGraph) -> Result<GoalTriple, GoalError> {
        let tokens = tokenize(instruction);
        if tokens.is_empty() {
            return Err(GoalError::EmptyInstruction);
        }
        let mentions = self.lexicon.mentions(&tokens);
        let action = self.resolve_action(&tokens, &mentions, instruction)?;
        let assigned = self.assign(action, &mentions);
        let named = |c: Category| {
            if scene.contains_category(c) {
                Participant::Known(c)
            } else {
                Participant::Unknown
            }
        };
        let subject = match assigned.subject {
            Some(c) => named(c),
            None => self.from_scene(action, Role::Subject, assigned.object, &tokens, scene),
        };
        let object = match assigned.object {
            Some(c) => named(c),
            None => self.from_scene(action, Role::Object, subject.category(), &tokens, scene),
        };
        Ok(GoalTriple {
            action,
            subject,
            object,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::goal::train_cooccurrence;
    use crate::scene::{BoundingBox, SceneObject, DEFAULT_IMAGE_SIZE};

    fn scene(cats: &[Category]) -> SceneGraph {
        let kb = KnowledgeBase::kitchen();
        let objects = cats
            .iter()
            .enumerate()
            .map(|(i, &c)| SceneObject {
                id: format!("o{i}"),
                bbox: BoundingBox::new(10.0 + 40.0 * i as f64, 10.0, 40.0 + 40.0 * i as f64, 50.0)
                    .unwrap(),
                attrs: kb.entry(c).unwrap().default_tuple(),
                mask: None,
            })
            .collect();
        SceneGraph::new(DEFAULT_IMAGE_SIZE, objects, vec![]).unwrap()
    }

    use Category::*;

    #[test]
    fn tomato_slices_request() {
        let p = BaselinePredictor::kitchen();
        let g = p
            .predict("Please cut me some tomato slices", &scene(&[Bread, Knife, Tomato]))
            .unwrap();
        assert_eq!(g, GoalTriple::new(TaskAction::Cut, Tomato, Knife));
    }

    #[test]
    fn named_but_absent_is_unknown() {
        let p = BaselinePredictor::kitchen();
        let g = p.predict("slice the apple", &scene(&[Knife, Tomato])).unwrap();
        assert_eq!(g, GoalTriple::new(TaskAction::Cut, Participant::Unknown, Knife));
    }

    #[test]
    fn unnamed_and_absent_is_unknown() {
        let p = BaselinePredictor::kitchen();
        let g = p.predict("cut the tomato", &scene(&[Tomato, Plate])).unwrap();
        assert_eq!(g, GoalTriple::new(TaskAction::Cut, Tomato, Participant::Unknown));
    }

    #[test]
    fn errors() {
        let p = BaselinePredictor::kitchen();
        let s = scene(&[Apple]);
        assert_eq!(p.predict("", &s), Err(GoalError::EmptyInstruction));
        assert_eq!(p.predict("?!", &s), Err(GoalError::EmptyInstruction));
        assert!(matches!(
            p.predict("the apple and the bowl", &s),
            Err(GoalError::UnresolvableAction(_))
        ));
    }

    #[test]
    fn marker_prefers_object_role() {
        let p = BaselinePredictor::kitchen();
        let g = p
            .predict("put the bowl into the sink", &scene(&[Sink, Bowl]))
            .unwrap();
        assert_eq!(g, GoalTriple::new(TaskAction::PickPlace, Bowl, Sink));
        let g = p
            .predict("put the apple in the bowl", &scene(&[Bowl, Apple]))
            .unwrap();
        assert_eq!(g, GoalTriple::new(TaskAction::PickPlace, Apple, Bowl));
    }

    #[test]
    fn learned_table_resolves_verbless_requests() {
        let gold = GoalTriple::new(TaskAction::PickPlace, Apple, Bowl);
        let other = GoalTriple::new(TaskAction::Cook, Egg, Microwave);
        let table = train_cooccurrence([
            ("apple into the bowl", &gold),
            ("the egg in the microwave", &other),
        ])
        .unwrap();
        let p = BaselinePredictor::kitchen().with_table(table);
        let g = p.predict("apple into bowl", &scene(&[Apple, Bowl])).unwrap();
        assert_eq!(g, gold);
    }

    #[test]
    fn oracle_returns_gold() {
        let gold = GoalTriple::new(TaskAction::Deliver, Apple, Person);
        let p = OraclePredictor { gold };
        assert_eq!(p.predict("anything", &SceneGraph::empty()).unwrap(), gold);
        assert_eq!(p.predict(" ", &SceneGraph::empty()), Err(GoalError::EmptyInstruction));
    }

    #[test]
    fn grounding_closure() {
        let p = BaselinePredictor::kitchen();
        let s = scene(&[Knife, Tomato, Bowl]);
        for text in ["cut the apple", "put the egg in the pan", "bring the cup to the person"] {
            let g = p.predict(text, &s).unwrap();
            for part in [g.subject, g.object] {
                if let Participant::Known(c) = part {
                    assert!(s.contains_category(c), "{text}: {g}");
                }
            }
        }
    }
}
