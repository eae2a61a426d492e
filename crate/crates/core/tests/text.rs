use std::collections::BTreeMap;

use goalbridge_core::goal::{Participant, UNKNOWN};
use goalbridge_core::text::{
    check_sts_pair, cosine_similarity, embed, generate_goal_dataset, generate_sts_dataset, jsonl, scene_pool,
    sts_loss, tokenize, Embedding, GoalRecord, StsConfig, StsPair, Style, TemplateSplit, TextError, Vocabulary,
};
use proptest::prelude::*;

#[test]
fn style_shares_are_within_two_points_at_ten_thousand() {
    let pool = scene_pool(11, 150);
    let records = generate_goal_dataset(11, 10_000, &pool, TemplateSplit::Train).unwrap();
    let mut counts: BTreeMap<Style, usize> = BTreeMap::new();
    for r in &records {
        *counts.entry(r.style).or_default() += 1;
    }
    for s in Style::ALL {
        let share = counts.get(&s).copied().unwrap_or(0) as f64 / records.len() as f64;
        assert!((share - s.expected_share()).abs() <= 0.02, "{}: {share}", s.as_str());
    }
}

#[test]
fn goal_records_refer_to_their_scene() {
    let pool = scene_pool(5, 40);
    let records = generate_goal_dataset(5, 500, &pool, TemplateSplit::HeldOut).unwrap();
    for r in &records {
        let scene = r.scene(&pool).expect("scene id resolves");
        for p in [r.goal.subject, r.goal.object] {
            match p {
                Participant::Known(c) => assert!(scene.contains_category(c), "{r:?}"),
                Participant::Unknown => assert!(!r.absent.is_empty(), "{r:?}"),
            }
        }
        for c in &r.absent {
            assert!(!scene.contains_category(*c));
        }
    }
}

#[test]
fn goal_records_round_trip_through_jsonl() {
    let pool = scene_pool(2, 30);
    let records = generate_goal_dataset(2, 300, &pool, TemplateSplit::Train).unwrap();
    let text = jsonl::to_string(jsonl::GOAL_SCHEMA, Some(2), &records);
    assert!(text.contains(UNKNOWN) || records.iter().all(|r| r.absent.is_empty()));
    let (h, back): (_, Vec<GoalRecord>) = jsonl::read(text.as_bytes(), jsonl::GOAL_SCHEMA).unwrap();
    assert_eq!((h.count, h.seed), (300, Some(2)));
    assert_eq!(back, records);
    assert!(jsonl::read::<_, GoalRecord>(text.as_bytes(), jsonl::STS_SCHEMA).is_err());
    let truncated: String = text.lines().take(10).map(|l| format!("{l}\n")).collect();
    assert!(jsonl::read::<_, GoalRecord>(truncated.as_bytes(), jsonl::GOAL_SCHEMA).is_err());
}

#[test]
fn generators_are_seed_deterministic() {
    assert_eq!(generate_sts_dataset(9, 200), generate_sts_dataset(9, 200));
    assert_ne!(generate_sts_dataset(9, 200), generate_sts_dataset(10, 200));
    let pool = scene_pool(9, 20);
    assert_eq!(
        generate_goal_dataset(9, 200, &pool, TemplateSplit::Train).unwrap(),
        generate_goal_dataset(9, 200, &pool, TemplateSplit::Train).unwrap()
    );
}

#[test]
fn sts_pairs_are_consistent_and_round_trip() {
    let pairs = generate_sts_dataset(4, 2000);
    for p in &pairs {
        check_sts_pair(p).unwrap();
    }
    let text = jsonl::to_string(jsonl::STS_SCHEMA, None, &pairs);
    let (_, back): (_, Vec<StsPair>) = jsonl::read(text.as_bytes(), jsonl::STS_SCHEMA).unwrap();
    assert_eq!(back, pairs);
}

#[test]
fn sts_loss_on_generated_pairs_matches_direct_computation() {
    let pairs = generate_sts_dataset(8, 100);
    let vocab = Vocabulary::build(pairs.iter().flat_map(|p| tokenize(&p.explicit).into_iter().chain(tokenize(&p.implicit)))).unwrap();
    let batch: Vec<_> = pairs
        .iter()
        .map(|p| (embed(&tokenize(&p.explicit), &vocab), embed(&tokenize(&p.implicit), &vocab), p.score))
        .collect();
    let cfg = StsConfig::default();
    let mut want = 0.0;
    for (u, v, g) in &batch {
        let dot: f64 = u.0.iter().zip(&v.0).map(|(a, b)| a * b).sum();
        let nu = u.0.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nv = v.0.iter().map(|x| x * x).sum::<f64>().sqrt();
        let c = dot / (nu * nv).max(1e-8);
        want += (c - g / 5.0).powi(2);
    }
    want /= batch.len() as f64;
    assert!((sts_loss(&batch, &cfg).unwrap() - want).abs() < 1e-12);
}

#[test]
fn sts_loss_errors() {
    let cfg = StsConfig::default();
    assert_eq!(sts_loss(&[], &cfg), Err(TextError::EmptyBatch));
    let e = Embedding(vec![1.0]);
    assert_eq!(sts_loss(&[(e.clone(), e.clone(), 4.0)], &cfg), Err(TextError::InvalidScore(4.0)));
    assert_eq!(
        cosine_similarity(&e, &Embedding(vec![1.0, 0.0]), &cfg),
        Err(TextError::DimensionMismatch(1, 2))
    );
    assert!(StsConfig::new(0.0).is_err());
}

proptest! {
    #[test]
    fn cosine_of_counts_is_bounded_and_symmetric(
        a in prop::collection::vec("[a-e]{1,2}", 0..12),
        b in prop::collection::vec("[a-e]{1,2}", 0..12),
    ) {
        let vocab = Vocabulary::build(a.iter().chain(&b).chain(std::iter::once(&"z".to_string()))).unwrap();
        let (u, v) = (embed(&a, &vocab), embed(&b, &vocab));
        let cfg = StsConfig::default();
        let c = cosine_similarity(&u, &v, &cfg).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&c));
        prop_assert_eq!(c, cosine_similarity(&v, &u, &cfg).unwrap());
        prop_assert_eq!(u.0.iter().sum::<f64>() as usize, a.len());
        if !a.is_empty() {
            prop_assert!((cosine_similarity(&u, &u, &cfg).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tokens_are_lowercase_alphanumeric(s in "\\PC{0,40}") {
        for t in tokenize(&s) {
            prop_assert!(!t.is_empty());
            prop_assert!(t.chars().all(|c| c.is_alphanumeric()));
            prop_assert_eq!(t.to_lowercase(), t.clone());
        }
    }
}
