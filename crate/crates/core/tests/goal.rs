mod support;

use goalbridge_core::bench::Pipeline;
use goalbridge_core::eval::PlanAttempt;
use goalbridge_core::goal::{
    compile_goal, train_cooccurrence, BaselinePredictor, CompilationTable, GoalError, GoalPredictor, GoalTriple,
    Participant, Role, TaskAction,
};
use goalbridge_core::pddl::{kitchen_domain, Atom, Literal};
use goalbridge_core::scene::{build_initial_state, Category, KnowledgeBase, SceneGraph};
use goalbridge_core::sim::{run_plan, WorldState};
use support::read_fixture;

fn tomato_scene() -> SceneGraph {
    SceneGraph::from_json(&read_fixture("tomato_scene.json")).unwrap()
}

/// A predictor that ignores its input; the pipeline must accept any
/// implementation of the trait.
struct Fixed(GoalTriple);

impl GoalPredictor for Fixed {
    fn name(&self) -> &str {
        "fixed"
    }

    fn predict(&self, instruction: &str, _scene: &SceneGraph) -> Result<GoalTriple, GoalError> {
        if instruction.trim().is_empty() {
            return Err(GoalError::EmptyInstruction);
        }
        Ok(self.0)
    }
}

#[test]
fn pipeline_accepts_any_predictor() {
    let scene = tomato_scene();
    let p = Fixed(GoalTriple::new(TaskAction::Cut, Category::Bread, Category::Knife));
    let run = Pipeline::default().run(&scene, "whatever", &p);
    let PlanAttempt::Plan(plan) = &run.attempt else {
        panic!("{:?}", run.attempt);
    };
    assert_eq!(plan.to_numbered(), "1. grasp knife-1\n2. cut bread-1 knife-1\n");
    let world = WorldState::from_scene(&scene).unwrap();
    let (trace, _) = run_plan(&world, plan, &world.true_masks());
    assert!(trace.success);

    let run = Pipeline::default().run(&scene, "  ", &p);
    assert!(matches!(run.attempt, PlanAttempt::NotAttempted(_)));
}

#[test]
fn baseline_reads_tomato_scene_requests() {
    let scene = tomato_scene();
    let b = BaselinePredictor::kitchen();
    let cases = [
        ("Please cut me some tomato slices", (TaskAction::Cut, "tomato", "knife")),
        ("slice the bread with the knife", (TaskAction::Cut, "bread", "knife")),
    ];
    for (text, (a, s, o)) in cases {
        let g = b.predict(text, &scene).unwrap();
        assert_eq!(g, GoalTriple::new(a, s.parse::<Category>().unwrap(), o.parse::<Category>().unwrap()), "{text}");
    }
}

#[test]
fn named_absent_object_becomes_unknown_and_no_solution() {
    let scene = tomato_scene();
    let b = BaselinePredictor::kitchen();
    let g = b.predict("cut the cucumber with the knife", &scene).unwrap();
    assert_eq!(g.subject, Participant::Unknown);
    assert_eq!(g.object, Participant::Known(Category::Knife));
    let run = Pipeline::default().run(&scene, "cut the cucumber with the knife", &b);
    assert!(matches!(run.attempt, PlanAttempt::NoSolution(_)), "{:?}", run.attempt);
}

#[test]
fn unresolvable_and_empty_instructions_error() {
    let b = BaselinePredictor::kitchen();
    assert_eq!(b.predict("", &tomato_scene()), Err(GoalError::EmptyInstruction));
    assert!(matches!(b.predict("the weather is nice", &tomato_scene()), Err(GoalError::UnresolvableAction(_))));
}

#[test]
fn compilation_uses_lowest_ordinal_and_checks_roles() {
    let kb = KnowledgeBase::kitchen();
    let d = kitchen_domain();
    let table = CompilationTable::kitchen();
    table.check_against(&d).unwrap();
    let f = build_initial_state(&tomato_scene(), &kb, &d).unwrap();
    let g = GoalTriple::new(TaskAction::Cut, Category::Tomato, Category::Knife);
    assert_eq!(compile_goal(&g, &f, &table).unwrap(), [Literal::pos(Atom::new("sliced", ["tomato-1"]))]);
    let missing = GoalTriple::new(TaskAction::Cut, Participant::Unknown, Category::Knife);
    assert_eq!(compile_goal(&missing, &f, &table), Err(GoalError::MissingObject(Role::Subject)));
    let absent = GoalTriple::new(TaskAction::PickPlace, Category::Tomato, Category::Plate);
    assert_eq!(compile_goal(&absent, &f, &table), Err(GoalError::MissingObject(Role::Object)));
}

#[test]
fn training_needs_records() {
    let none: Vec<(&str, &GoalTriple)> = vec![];
    assert_eq!(train_cooccurrence(none).unwrap_err(), GoalError::EmptyDataset);
    let g = GoalTriple::new(TaskAction::Cook, Category::Egg, Category::Pan);
    let t = train_cooccurrence([("fry the egg in the pan", &g)]).unwrap();
    assert_eq!(t.records(), 1);
    assert_eq!(t.top_action("fry"), Some(TaskAction::Cook));
}
