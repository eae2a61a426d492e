mod support;

use goalbridge_core::bench::Pipeline;
use goalbridge_core::goal::{OraclePredictor, TaskAction};
use goalbridge_core::pddl::{apply, ground, holds, kitchen_domain};
use goalbridge_core::scene::KnowledgeBase;
use goalbridge_core::sim::{generate_scenario, names_match_compilation, run_plan, Level, NoiseConfig};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    /// Native step effects agree with the PDDL schemas applied to the
    /// symbolic projection, for applicable and inapplicable actions alike.
    #[test]
    fn step_matches_domain_effects(task in 0usize..5, level in 0usize..4, seed in 0u64..10_000) {
        let kb = KnowledgeBase::kitchen();
        let d = kitchen_domain();
        let s = generate_scenario(TaskAction::ALL[task], Level::ALL[level], seed, NoiseConfig::none());
        let mut world = s.world.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..6 {
            let p = world.problem(&kb, &d, "walk", vec![]);
            let state = world.projection(&kb);
            let actions = ground(&d, &p);
            let mut applicable = Vec::new();
            for a in &actions {
                let ok = a.pre.iter().all(|l| holds(&state, l));
                match world.step(a) {
                    Ok(next) => {
                        prop_assert!(ok, "{} stepped but preconditions fail", a.name());
                        let mut expect = state.clone();
                        apply(&mut expect, a);
                        prop_assert_eq!(next.projection(&kb), expect, "{}", a.name());
                        next.check().unwrap();
                        applicable.push(next);
                    }
                    Err(e) => prop_assert!(!ok, "{} rejected: {}", a.name(), e),
                }
            }
            match applicable.choose(&mut rng) {
                Some(next) => world = next.clone(),
                None => break,
            }
        }
    }
}

#[test]
fn generated_ids_match_compiled_names() {
    let kb = KnowledgeBase::kitchen();
    for t in TaskAction::ALL {
        for l in Level::ALL {
            for seed in 0..8 {
                let s = generate_scenario(t, l, seed, NoiseConfig::default());
                assert!(names_match_compilation(&s, &kb), "{}", s.id);
            }
        }
    }
}

#[test]
fn validated_plans_execute_with_true_masks() {
    let pipeline = Pipeline::default();
    for t in TaskAction::ALL {
        for l in Level::VALID {
            for seed in 0..5 {
                let s = generate_scenario(t, l, seed, NoiseConfig::none());
                let run = pipeline.run(&s.detected, &s.request, &OraclePredictor { gold: s.gold });
                let goalbridge_core::eval::PlanAttempt::Plan(p) = &run.attempt else {
                    panic!("{}: {:?}", s.id, run.attempt);
                };
                let (trace, end) = run_plan(&s.world, p, &s.world.true_masks());
                assert!(trace.success, "{}: {}", s.id, trace.summary());
                end.check().unwrap();
            }
        }
    }
}

#[test]
fn heavy_jitter_breaks_execution_not_planning() {
    let noise = NoiseConfig {
        category_dropout: 0.0,
        mask_jitter: 60.0,
    };
    let pipeline = Pipeline::default();
    let mut exec_failures = 0;
    for seed in 0..20 {
        let s = generate_scenario(TaskAction::Cut, Level::Easy, seed, noise);
        let r = pipeline.run_trial(&s, &OraclePredictor { gold: s.gold });
        assert!(r.perception_ok && r.goal_ok && r.plan_ok, "{r:?}");
        exec_failures += usize::from(!r.exec_ok);
    }
    assert!(exec_failures > 0);
}
