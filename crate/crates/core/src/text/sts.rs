use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::goalgen::{IncompleteMode, Style};
use super::templates::{render, surface, uses_object, Templates};
use crate::goal::{Role, TaskAction};
use crate::scene::{Category, KnowledgeBase};

/// An explicit instruction and an implicit intent with a similarity score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StsPair {
    pub explicit: String,
    pub implicit: String,
    pub score: f64,
    pub task: TaskAction,
    pub explicit_subject: Category,
    pub explicit_object: Category,
    pub implicit_subject: Category,
    pub implicit_object: Category,
}

/// Score of two same-task sentences: 5.0 when subject and object both
/// match, 3.3 when exactly one does, 1.7 otherwise.
pub fn rule_score(a: (Category, Category), b: (Category, Category)) -> f64 {
    match (a.0 == b.0, a.1 == b.1) {
        (true, true) => 5.0,
        (true, false) | (false, true) => 3.3,
        (false, false) => 1.7,
    }
}

/// Recompute a pair's score from its metadata and check that each
/// sentence mentions its subject.
pub fn check_sts_pair(p: &StsPair) -> Result<(), String> {
    let subject_ok = |text: &str, c: Category| text.to_lowercase().contains(surface(c));
    if !subject_ok(&p.explicit, p.explicit_subject) {
        return Err(format!("`{}` does not mention {}", p.explicit, p.explicit_subject));
    }
    if !subject_ok(&p.implicit, p.implicit_subject) {
        return Err(format!("`{}` does not mention {}", p.implicit, p.implicit_subject));
    }
    let expected = if p.explicit_subject == p.implicit_subject {
        if p.explicit_object == p.implicit_object { 5.0 } else { 3.3 }
    } else if p.explicit_object == p.implicit_object {
        3.3
    } else {
        1.7
    };
    if p.score != expected {
        return Err(format!("score {} but metadata implies {expected}", p.score));
    }
    Ok(())
}

struct Pools {
    subjects: Vec<Category>,
    objects: Vec<Category>,
}

impl Pools {
    fn new(kb: &KnowledgeBase, task: TaskAction) -> Self {
        Pools {
            subjects: kb.categories_with(task.role_label(Role::Subject)),
            objects: kb.categories_with(task.role_label(Role::Object)),
        }
    }

    fn pair(&self, rng: &mut ChaCha8Rng) -> (Category, Category) {
        loop {
            let s = *self.subjects.choose(rng).expect("subjects");
            let o = *self.objects.choose(rng).expect("objects");
            if s != o {
                return (s, o);
            }
        }
    }

    /// A second participant pair related to `a` by the requested score.
    fn related(&self, a: (Category, Category), score: f64, rng: &mut ChaCha8Rng) -> Option<(Category, Category)> {
        let keep_subject = match score {
            5.0 => return Some(a),
            3.3 => rng.gen_bool(0.5),
            _ => false,
        };
        let keep_object = score == 3.3 && !keep_subject;
        let subjects: Vec<Category> = if keep_subject {
            vec![a.0]
        } else {
            self.subjects.iter().copied().filter(|&s| s != a.0).collect()
        };
        let objects: Vec<Category> = if keep_object {
            vec![a.1]
        } else {
            self.objects.iter().copied().filter(|&o| o != a.1).collect()
        };
        let combos: Vec<(Category, Category)> = subjects
            .iter()
            .flat_map(|&s| objects.iter().map(move |&o| (s, o)))
            .filter(|(s, o)| s != o)
            .collect();
        combos.choose(rng).copied()
    }
}

/// `count` explicit/implicit pairs. Task and score class are drawn
/// uniformly; a class a task cannot realise (a single receiver rules out
/// 1.7 for delivery) is redrawn. Explicit sentences come from
/// explicit-complete templates naming both participants, implicit ones from
/// implicit-intent templates; both splits are used.
pub fn generate_sts_dataset(seed: u64, count: usize) -> Vec<StsPair> {
    let kb = KnowledgeBase::kitchen();
    let templates = Templates::kitchen();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bank = |task, style, mode: Option<IncompleteMode>, need_object: bool| -> Vec<String> {
        [super::TemplateSplit::Train, super::TemplateSplit::HeldOut]
            .into_iter()
            .flat_map(|sp| templates.get(task, style, mode, sp).iter().cloned())
            .filter(|t| !need_object || uses_object(t))
            .collect()
    };
    let per_task: Vec<(TaskAction, Pools, Vec<String>, Vec<String>)> = TaskAction::ALL
        .into_iter()
        .map(|a| {
            (
                a,
                Pools::new(&kb, a),
                bank(a, Style::ExplicitComplete, None, true),
                bank(a, Style::ImplicitIntent, None, false),
            )
        })
        .collect();

    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (task, pools, explicit, implicit) = per_task.choose(&mut rng).expect("tasks");
        let score = *super::STS_SCORES.choose(&mut rng).expect("scores");
        let a = pools.pair(&mut rng);
        let Some(b) = pools.related(a, score, &mut rng) else {
            continue;
        };
        let e = explicit.choose(&mut rng).expect("explicit templates");
        let i = implicit.choose(&mut rng).expect("implicit templates");
        out.push(StsPair {
            explicit: render(e, a.0, a.1),
            implicit: render(i, b.0, b.1),
            score,
            task: *task,
            explicit_subject: a.0,
            explicit_object: a.1,
            implicit_subject: b.0,
            implicit_object: b.1,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules() {
        use Category::*;
        assert_eq!(rule_score((Apple, Bowl), (Apple, Bowl)), 5.0);
        assert_eq!(rule_score((Apple, Bowl), (Apple, Plate)), 3.3);
        assert_eq!(rule_score((Apple, Bowl), (Bread, Bowl)), 3.3);
        assert_eq!(rule_score((Apple, Bowl), (Bread, Plate)), 1.7);
    }

    #[test]
    fn generated_pairs_pass_the_checker() {
        let pairs = generate_sts_dataset(5, 2000);
        assert_eq!(pairs.len(), 2000);
        for p in &pairs {
            check_sts_pair(p).unwrap();
        }
        for s in super::super::STS_SCORES {
            assert!(pairs.iter().any(|p| p.score == s));
        }
        assert!(pairs
            .iter()
            .filter(|p| p.task == TaskAction::Deliver)
            .all(|p| p.score != 1.7));
    }

    #[test]
    fn checker_rejects_wrong_score() {
        let mut p = generate_sts_dataset(1, 1).remove(0);
        p.score = if p.score == 5.0 { 1.7 } else { 5.0 };
        assert!(check_sts_pair(&p).is_err());
    }

    #[test]
    fn deterministic() {
        assert_eq!(generate_sts_dataset(3, 300), generate_sts_dataset(3, 300));
        assert_ne!(generate_sts_dataset(3, 300), generate_sts_dataset(4, 300));
    }
}
