use serde::{Deserialize, Serialize};

use super::{GoalError, GoalTriple, Participant, Role, TaskAction};
use crate::pddl::{Atom, Domain, Literal};
use crate::scene::SceneFragment;

const SHIPPED_TABLE: &str = include_str!("../../data/goal_compilation.json");

/// Goal-atom argument drawn from a triple slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoleRef {
    Subject,
    Object,
}

impl From<RoleRef> for Role {
    fn from(r: RoleRef) -> Self {
        match r {
            RoleRef::Subject => Role::Subject,
            RoleRef::Object => Role::Object,
        }
    }
}

/// One positive goal atom emitted for `action`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompilationRule {
    pub action: TaskAction,
    pub predicate: String,
    pub args: Vec<RoleRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompilationTable {
    pub version: u32,
    pub rules: Vec<CompilationRule>,
}

impl CompilationTable {
    pub fn kitchen() -> Self {
        Self::from_json(SHIPPED_TABLE).expect("shipped compilation table is valid")
    }

    pub fn from_json(text: &str) -> Result<Self, GoalError> {
        serde_json::from_str(text).map_err(|e| GoalError::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn rules_for(&self, action: TaskAction) -> impl Iterator<Item = &CompilationRule> {
        self.rules.iter().filter(move |r| r.action == action)
    }

    /// Every rule's predicate is declared in `d` with matching arity.
    pub fn check_against(&self, d: &Domain) -> Result<(), GoalError> {
        for r in &self.rules {
            match d.predicate(&r.predicate) {
                Some(p) if p.params.len() == r.args.len() => {}
                _ => return Err(GoalError::UndeclaredPredicate(r.predicate.clone())),
            }
        }
        Ok(())
    }
}

/// Compile `g` into a conjunction over the scene's constants.
///
/// Participants resolve to the lowest-ordinal constant of their category;
/// the object never reuses the subject's constant. A `UNKNOWN` subject, or a
/// named participant with no constant in `fragment`, is `MissingObject`.
/// An `UNKNOWN` object is only an error when a goal atom refers to it.
pub fn compile_goal(
    g: &GoalTriple,
    fragment: &SceneFragment,
    table: &CompilationTable,
) -> Result<Vec<Literal>, GoalError> {
    let subject = match g.subject {
        Participant::Known(c) => fragment
            .candidates(c)
            .next()
            .map(|o| o.name.clone())
            .ok_or(GoalError::MissingObject(Role::Subject))?,
        Participant::Unknown => return Err(GoalError::MissingObject(Role::Subject)),
    };
    let object = match g.object {
        Participant::Known(c) => Some(
            fragment
                .candidates(c)
                .find(|o| o.name != subject)
                .map(|o| o.name.clone())
                .ok_or(GoalError::MissingObject(Role::Object))?,
        ),
        Participant::Unknown => None,
    };
    let mut goal = Vec::new();
    for rule in table.rules_for(g.action) {
        let mut args = Vec::with_capacity(rule.args.len());
        for r in &rule.args {
            match r {
                RoleRef::Subject => args.push(subject.clone()),
                RoleRef::Object => args.push(
                    object
                        .clone()
                        .ok_or(GoalError::MissingObject(Role::Object))?,
                ),
            }
        }
        goal.push(Literal::pos(Atom::new(rule.predicate.clone(), args)));
    }
    Ok(goal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::kitchen_domain;
    use crate::scene::{Category, GroundedObject};

    fn fragment(names: &[(&str, Category)]) -> SceneFragment {
        SceneFragment {
            objects: names
                .iter()
                .enumerate()
                .map(|(i, (n, c))| GroundedObject {
                    name: n.to_string(),
                    type_name: "item".into(),
                    category: *c,
                    box_index: i,
                    ordinal: n.rsplit('-').next().unwrap().parse().unwrap(),
                })
                .collect(),
            init: vec![],
        }
    }

    use Category::*;

    #[test]
    fn shipped_table_covers_every_action() {
        let t = CompilationTable::kitchen();
        t.check_against(&kitchen_domain()).unwrap();
        for a in TaskAction::ALL {
            assert!(t.rules_for(a).count() >= 1);
        }
    }

    #[test]
    fn table_rows() {
        let t = CompilationTable::kitchen();
        let f = fragment(&[("tomato-1", Tomato), ("knife-1", Knife), ("apple-1", Apple), ("bowl-1", Bowl)]);
        let cut = compile_goal(&GoalTriple::new(TaskAction::Cut, Tomato, Knife), &f, &t).unwrap();
        assert_eq!(cut, vec![Literal::pos(Atom::new("sliced", ["tomato-1"]))]);
        let pp = compile_goal(&GoalTriple::new(TaskAction::PickPlace, Apple, Bowl), &f, &t).unwrap();
        assert_eq!(pp, vec![Literal::pos(Atom::new("on", ["apple-1", "bowl-1"]))]);
    }

    #[test]
    fn missing_objects() {
        let t = CompilationTable::kitchen();
        let f = fragment(&[("knife-1", Knife), ("apple-1", Apple)]);
        let unk = GoalTriple::new(TaskAction::Cut, Participant::Unknown, Knife);
        assert_eq!(compile_goal(&unk, &f, &t), Err(GoalError::MissingObject(Role::Subject)));
        let absent = GoalTriple::new(TaskAction::Cut, Tomato, Knife);
        assert_eq!(compile_goal(&absent, &f, &t), Err(GoalError::MissingObject(Role::Subject)));
        let no_tool = GoalTriple::new(TaskAction::Cut, Apple, ButterKnife);
        assert_eq!(compile_goal(&no_tool, &f, &t), Err(GoalError::MissingObject(Role::Object)));
        let no_dest = GoalTriple::new(TaskAction::PickPlace, Apple, Participant::Unknown);
        assert_eq!(compile_goal(&no_dest, &f, &t), Err(GoalError::MissingObject(Role::Object)));
        let no_knife = GoalTriple::new(TaskAction::Cut, Apple, Participant::Unknown);
        assert_eq!(
            compile_goal(&no_knife, &f, &t).unwrap(),
            vec![Literal::pos(Atom::new("sliced", ["apple-1"]))]
        );
    }

    #[test]
    fn lowest_ordinal_and_distinct_constants() {
        let t = CompilationTable::kitchen();
        let f = fragment(&[("bowl-1", Bowl), ("bowl-2", Bowl), ("tomato-1", Tomato), ("tomato-2", Tomato)]);
        let g = compile_goal(&GoalTriple::new(TaskAction::Cut, Tomato, Participant::Unknown), &f, &t);
        assert_eq!(g.unwrap()[0].atom.args, vec!["tomato-1"]);
        let g = compile_goal(&GoalTriple::new(TaskAction::PickPlace, Bowl, Bowl), &f, &t).unwrap();
        assert_eq!(g[0].atom.args, vec!["bowl-1", "bowl-2"]);
    }
}
