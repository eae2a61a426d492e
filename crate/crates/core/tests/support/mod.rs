//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::path::PathBuf;

use goalbridge_core::pddl::{Atom, Domain, Literal, Problem};
use goalbridge_core::scene::{
    build_initial_state, Attribute, BoundingBox, Category, KnowledgeBase, SceneGraph, SceneObject,
    DEFAULT_IMAGE_SIZE,
};
use goalbridge_core::pddl::kitchen_domain;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// A schema instantiated by plain substitution.
pub struct NaiveAction {
    pub name: String,
    pub pre: Vec<Literal>,
    pub add: Vec<Atom>,
    pub del: Vec<Atom>,
}

fn subtype(d: &Domain, t: &str, want: &str) -> bool {
    let mut cur = t.to_string();
    loop {
        if cur == want || want == "object" {
            return true;
        }
        match d.types.iter().find(|x| x.name == cur) {
            Some(x) => cur = x.parent.clone(),
            None => return false,
        }
    }
}

/// Every type-correct instantiation of every action, by enumerating
/// argument tuples.
pub fn naive_ground(d: &Domain, p: &Problem) -> Vec<NaiveAction> {
    let mut out = Vec::new();
    for a in &d.actions {
        let n = a.params.len();
        let mut idx = vec![0usize; n];
        let m = p.objects.len();
        if n > 0 && m == 0 {
            continue;
        }
        loop {
            let args: Vec<&str> = idx.iter().map(|&i| p.objects[i].name.as_str()).collect();
            let typed = idx
                .iter()
                .zip(&a.params)
                .all(|(&i, par)| subtype(d, &p.objects[i].type_name, &par.type_name));
            if typed {
                let sub = |at: &Atom| Atom {
                    predicate: at.predicate.clone(),
                    args: at
                        .args
                        .iter()
                        .map(|x| match a.params.iter().position(|q| &q.name == x) {
                            Some(k) => args[k].to_string(),
                            None => x.clone(),
                        })
                        .collect(),
                };
                out.push(NaiveAction {
                    name: std::iter::once(a.name.as_str()).chain(args.iter().copied()).collect::<Vec<_>>().join(" "),
                    pre: a
                        .precondition
                        .iter()
                        .map(|l| Literal { atom: sub(&l.atom), positive: l.positive })
                        .collect(),
                    add: a.effect.iter().filter(|l| l.positive).map(|l| sub(&l.atom)).collect(),
                    del: a.effect.iter().filter(|l| !l.positive).map(|l| sub(&l.atom)).collect(),
                });
            }
            // Odometer increment.
            let mut k = 0;
            loop {
                if k == n {
                    break;
                }
                idx[k] += 1;
                if idx[k] < m {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
    }
    out
}

fn sat(state: &BTreeSet<Atom>, lits: &[Literal]) -> bool {
    lits.iter().all(|l| state.contains(&l.atom) == l.positive)
}

/// Exhaustive breadth-first search; the length of a shortest plan, or
/// `None` when no reachable state satisfies the goal.
pub fn bfs_oracle(d: &Domain, p: &Problem) -> Option<usize> {
    let actions = naive_ground(d, p);
    let start: BTreeSet<Atom> = p.init.iter().cloned().collect();
    let mut seen: HashSet<Vec<Atom>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.iter().cloned().collect());
    queue.push_back((start, 0usize));
    while let Some((s, depth)) = queue.pop_front() {
        if sat(&s, &p.goal) {
            return Some(depth);
        }
        for a in &actions {
            if !sat(&s, &a.pre) {
                continue;
            }
            let mut next = s.clone();
            for x in &a.del {
                next.remove(x);
            }
            for x in &a.add {
                next.insert(x.clone());
            }
            if seen.insert(next.iter().cloned().collect()) {
                queue.push_back((next, depth + 1));
            }
        }
    }
    None
}

/// A seeded kitchen problem with 1..=max_objects objects and a one- or
/// two-atom goal. Usually the objects include a subject/object pair for a
/// random task and the goal targets it; the rest of the time categories and
/// goal atoms are arbitrary, which makes many instances unsolvable.
pub fn random_kitchen_problem(seed: u64, max_objects: usize) -> (SceneGraph, Problem) {
    use goalbridge_core::goal::{Role, TaskAction};
    let kb = KnowledgeBase::kitchen();
    let d = kitchen_domain();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_objects);
    let task = *TaskAction::ALL.choose(&mut rng).unwrap();
    let mut cats = Vec::new();
    if n >= 2 && rng.gen_bool(0.7) {
        let s = *kb.categories_with(task.role_label(Role::Subject)).choose(&mut rng).unwrap();
        let objs: Vec<Category> = kb
            .categories_with(task.role_label(Role::Object))
            .into_iter()
            .filter(|&c| c != s)
            .collect();
        cats.push(s);
        cats.push(*objs.choose(&mut rng).unwrap());
    }
    while cats.len() < n {
        cats.push(*Category::ALL.choose(&mut rng).unwrap());
    }
    cats.shuffle(&mut rng);
    let mut objects = Vec::new();
    for (i, &c) in cats.iter().enumerate() {
        let mut attrs = kb.entry(c).unwrap().default_tuple();
        if !rng.gen_bool(0.6) {
            attrs.attributes.remove(&Attribute::Dirty);
        }
        let x = 5.0 + 48.0 * i as f64;
        objects.push(SceneObject {
            id: format!("obj{i}"),
            bbox: BoundingBox::new(x, 100.0, x + 40.0, 140.0).unwrap(),
            attrs,
            mask: None,
        });
    }
    let scene = SceneGraph::new(DEFAULT_IMAGE_SIZE, objects, vec![]).unwrap();
    let f = build_initial_state(&scene, &kb, &d).unwrap();
    let names: Vec<String> = f.objects.iter().map(|o| o.name.clone()).collect();
    let pick = |rng: &mut ChaCha8Rng, role: Role| {
        let fitting: Vec<&String> = f
            .objects
            .iter()
            .filter(|o| kb.supports(o.category, task.role_label(role)))
            .map(|o| &o.name)
            .collect();
        if rng.gen_bool(0.8) && !fitting.is_empty() {
            (*fitting.choose(rng).unwrap()).clone()
        } else {
            names.choose(rng).unwrap().clone()
        }
    };
    let mut goal = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let a = pick(&mut rng, Role::Subject);
        let kind = if rng.gen_bool(0.7) { task as usize } else { rng.gen_range(0..5) };
        let atom = match TaskAction::ALL[kind] {
            TaskAction::Cut => Atom::new("sliced", [a]),
            TaskAction::Cook => Atom::new("cooked", [a]),
            TaskAction::Clean => Atom::new("clean", [a]),
            TaskAction::Deliver => Atom::new("delivered", [a]),
            TaskAction::PickPlace => Atom::new("on", [a, pick(&mut rng, Role::Object)]),
        };
        if !goal.contains(&Literal::pos(atom.clone())) {
            goal.push(Literal::pos(atom));
        }
    }
    let p = f.to_problem(&format!("random-{seed}"), &d, goal);
    (scene, p)
}
