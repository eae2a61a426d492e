use std::sync::OnceLock;

use goalbridge_core::bench::{run_bench, BenchConfig, Pipeline, PredictorSpec};
use goalbridge_core::eval::{aggregate, attribute_trial, rgl, EvalError, PlanAttempt, Stage, TrialRecord};
use goalbridge_core::goal::{GoalTriple, OraclePredictor, Participant, TaskAction};
use goalbridge_core::scene::{Category, SegmentMask};
use goalbridge_core::sim::{generate_scenario, run_plan, Level, NoiseConfig};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn correct_trial_passes_every_stage() {
    let s = generate_scenario(TaskAction::PickPlace, Level::Medium, 2, NoiseConfig::none());
    let r = Pipeline::default().run_trial(&s, &OraclePredictor { gold: s.gold });
    assert!(r.perception_ok && r.goal_ok && r.plan_ok && r.exec_ok, "{r:?}");
    assert!(Stage::ALL.iter().all(|&st| r.passed(st)));
}

#[test]
fn hard2_rejection_counts_despite_wrong_goal() {
    let s = generate_scenario(TaskAction::Cut, Level::Hard2, 0, NoiseConfig::none());
    let wrong = GoalTriple::new(TaskAction::Cook, Participant::Unknown, Category::Pan);
    let attempt = PlanAttempt::NoSolution("missing subject".into());
    let r = attribute_trial(&s, &s.detected, Some(&wrong), &attempt, None);
    assert!(!r.goal_ok);
    assert!(r.plan_ok && r.exec_ok);
    assert!(r.passed(Stage::TaskPlanning) && !r.passed(Stage::GoalLearning));
    assert!(!r.success());
}

#[test]
fn low_overlap_fails_execution_only() {
    let s = generate_scenario(TaskAction::Cut, Level::Easy, 5, NoiseConfig::none());
    let run = Pipeline::default().run(&s.detected, &s.request, &OraclePredictor { gold: s.gold });
    let PlanAttempt::Plan(plan) = &run.attempt else {
        panic!("{:?}", run.attempt);
    };
    // Keep 40% of the first manipulated object's true pixels: IoU 0.4.
    let target = plan.steps[0].args[0].clone();
    let truth = s.world.mask(&target).unwrap();
    let size = truth.size();
    let keep = truth.area() * 2 / 5;
    let mut seen = 0;
    let mut bits = Vec::with_capacity(size.pixels());
    for y in 0..size.height {
        for x in 0..size.width {
            let on = truth.get(x, y) && seen < keep;
            seen += usize::from(truth.get(x, y));
            bits.push(on);
        }
    }
    let mut masks = s.world.true_masks();
    masks.insert(target.clone(), SegmentMask::from_bits(size, bits).unwrap());
    let (trace, _) = run_plan(&s.world, plan, &masks);
    assert!(!trace.success);
    assert_eq!(trace.failed_at, Some(0));
    let v = trace.steps[0].iou.iter().find(|(id, _)| id == &target).unwrap().1;
    assert!((v - keep as f64 / truth.area() as f64).abs() < 1e-12 && v <= 0.41);

    let r = attribute_trial(&s, &s.detected, Some(&s.gold), &run.attempt, Some(&trace));
    assert!(r.perception_ok && r.goal_ok && r.plan_ok);
    assert!(!r.exec_ok && !r.passed(Stage::Execution));
}

#[test]
fn aggregate_rejects_empty() {
    assert_eq!(aggregate(&[]), Err(EvalError::EmptySet));
}

fn records() -> Vec<TrialRecord> {
    static RECORDS: OnceLock<Vec<TrialRecord>> = OnceLock::new();
    RECORDS
        .get_or_init(|| {
            let cfg = BenchConfig {
                trials: 3,
                ..BenchConfig::default()
            };
            run_bench(&cfg, &PredictorSpec::Oracle, &Pipeline::default())
        })
        .clone()
}

fn participant() -> impl Strategy<Value = Participant> {
    prop_oneof![
        Just(Participant::Unknown),
        (0..Category::ALL.len()).prop_map(|i| Participant::Known(Category::ALL[i])),
    ]
}

fn triple() -> impl Strategy<Value = GoalTriple> {
    (0..5usize, participant(), participant()).prop_map(|(a, s, o)| GoalTriple {
        action: TaskAction::ALL[a],
        subject: s,
        object: o,
    })
}

proptest! {
    #[test]
    fn rgl_is_componentwise_equality(a in triple(), b in triple()) {
        let same = a.action == b.action && a.subject == b.subject && a.object == b.object;
        prop_assert_eq!(rgl(&a, &b) == 1, same);
        prop_assert_eq!(rgl(&a, &b), rgl(&b, &a));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Random stage flags over a real suite: rates stay in range, SR is the
    /// trial-weighted mean of VSR and ISR, and record order does not matter.
    #[test]
    fn aggregate_invariants(seed in any::<u64>(), flips in prop::collection::vec(any::<[bool; 4]>(), 60)) {
        let mut recs = records();
        for (r, f) in recs.iter_mut().zip(&flips) {
            r.perception_ok = f[0];
            r.goal_ok = f[1];
            r.plan_ok = f[2];
            r.exec_ok = f[3];
        }
        let m = aggregate(&recs).unwrap();
        prop_assert_eq!(m.trials, recs.len());
        let (vsr, isr) = (m.vsr.unwrap(), m.isr.unwrap());
        for st in Stage::ALL {
            for rates in [&vsr, &isr, &m.sr] {
                prop_assert!((0.0..=100.0).contains(&rates.get(st)));
            }
            let want = (vsr.get(st) * vsr.trials as f64 + isr.get(st) * isr.trials as f64)
                / (vsr.trials + isr.trials) as f64;
            prop_assert!((m.sr.get(st) - want).abs() < 1e-9);
            let direct = 100.0 * recs.iter().filter(|r| r.passed(st)).count() as f64 / recs.len() as f64;
            prop_assert!((m.sr.get(st) - direct).abs() < 1e-9);
        }
        prop_assert_eq!(m.successes, recs.iter().filter(|r| r.success()).count());
        let mut shuffled = recs.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(aggregate(&shuffled).unwrap(), m);
    }
}
