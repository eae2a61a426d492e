//! Forward state-space search over grounded STRIPS actions.
//!
//! Two strategies share one search loop: breadth-first (shortest plans) and
//! greedy best-first on the goal-count heuristic. Ties are broken by the
//! canonical ground-action name, so results are deterministic.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, VecDeque};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pddl::{ground, Atom, Domain, GroundAction, Literal, Plan, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Bfs,
    #[default]
    GreedyGoalCount,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bfs" => Ok(Strategy::Bfs),
            "greedy" | "greedy-goal-count" => Ok(Strategy::GreedyGoalCount),
            other => Err(format!("unknown strategy `{other}` (expected bfs or greedy)")),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlannerError {
    #[error("max_expansions must be positive")]
    ZeroExpansions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub max_expansions: usize,
}

impl SearchConfig {
    pub const DEFAULT_MAX_EXPANSIONS: usize = 100_000;

    pub fn new(strategy: Strategy, max_expansions: usize) -> Result<Self, PlannerError> {
        if max_expansions == 0 {
            return Err(PlannerError::ZeroExpansions);
        }
        Ok(SearchConfig {
            strategy,
            max_expansions,
        })
    }

    pub fn bfs() -> Self {
        SearchConfig {
            strategy: Strategy::Bfs,
            ..Self::default()
        }
    }
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::GreedyGoalCount,
            max_expansions: Self::DEFAULT_MAX_EXPANSIONS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Plan(Plan),
    /// The reachable state space was exhausted without meeting the goal.
    NoSolution,
    /// `max_expansions` was hit before a plan or a proof of unsolvability.
    ResourceExceeded,
}

impl Outcome {
    pub fn plan(&self) -> Option<&Plan> {
        match self {
            Outcome::Plan(p) => Some(p),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Plan(_) => "plan",
            Outcome::NoSolution => "no-solution",
            Outcome::ResourceExceeded => "resource-exceeded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SearchStats {
    pub expansions: usize,
    pub generated: usize,
}

#[derive(Debug, Clone)]
pub struct PlanResult {
    pub outcome: Outcome,
    pub stats: SearchStats,
    pub elapsed: Duration,
}

/// Number of goal literals not satisfied by `state`.
pub fn goal_count_heuristic(state: &BTreeSet<Atom>, goal: &[Literal]) -> usize {
    goal.iter()
        .filter(|l| state.contains(&l.atom) != l.positive)
        .count()
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct State(Vec<u64>);

impl State {
    fn empty(n: usize) -> Self {
        State(vec![0; n.div_ceil(64).max(1)])
    }

    fn get(&self, i: u32) -> bool {
        self.0[(i / 64) as usize] & (1 << (i % 64)) != 0
    }

    fn set(&mut self, i: u32, v: bool) {
        let w = &mut self.0[(i / 64) as usize];
        if v {
            *w |= 1 << (i % 64);
        } else {
            *w &= !(1 << (i % 64));
        }
    }
}

struct CompiledAction {
    source: usize,
    pre_pos: Vec<u32>,
    pre_neg: Vec<u32>,
    add: Vec<u32>,
    del: Vec<u32>,
}

impl CompiledAction {
    fn applicable(&self, s: &State) -> bool {
        self.pre_pos.iter().all(|&a| s.get(a)) && self.pre_neg.iter().all(|&a| !s.get(a))
    }

    fn apply(&self, s: &State) -> State {
        let mut next = s.clone();
        for &d in &self.del {
            next.set(d, false);
        }
        for &a in &self.add {
            next.set(a, true);
        }
        next
    }
}

struct Task {
    actions: Vec<GroundAction>,
    compiled: Vec<CompiledAction>,
    init: State,
    goal_pos: Vec<u32>,
    goal_neg: Vec<u32>,
}

impl Task {
    fn new(d: &Domain, p: &Problem) -> Self {
        let mut actions = ground(d, p);
        // predicates no action touches keep their initial truth value
        let fluent: BTreeSet<&str> = d
            .actions
            .iter()
            .flat_map(|a| a.effect.iter().map(|l| l.atom.predicate.as_str()))
            .collect();
        let init_set: BTreeSet<&Atom> = p.init.iter().collect();
        actions.retain(|a| {
            a.pre.iter().all(|l| {
                fluent.contains(l.atom.predicate.as_str())
                    || init_set.contains(&l.atom) == l.positive
            })
        });
        actions.sort_by_cached_key(GroundAction::name);

        let mut ids: HashMap<Atom, u32> = HashMap::new();
        let mut intern = |a: &Atom| -> u32 {
            let n = ids.len() as u32;
            *ids.entry(a.clone()).or_insert(n)
        };
        for a in &p.init {
            intern(a);
        }
        for l in &p.goal {
            intern(&l.atom);
        }
        let compiled: Vec<CompiledAction> = actions
            .iter()
            .enumerate()
            .map(|(i, a)| CompiledAction {
                source: i,
                pre_pos: a.pre.iter().filter(|l| l.positive).map(|l| intern(&l.atom)).collect(),
                pre_neg: a.pre.iter().filter(|l| !l.positive).map(|l| intern(&l.atom)).collect(),
                add: a.add.iter().map(&mut intern).collect(),
                del: a.del.iter().map(&mut intern).collect(),
            })
            .collect();
        let goal_pos = p.goal.iter().filter(|l| l.positive).map(|l| intern(&l.atom)).collect();
        let goal_neg = p.goal.iter().filter(|l| !l.positive).map(|l| intern(&l.atom)).collect();
        let mut init = State::empty(ids.len());
        for a in &p.init {
            init.set(ids[a], true);
        }
        Task {
            actions,
            compiled,
            init,
            goal_pos,
            goal_neg,
        }
    }

    fn h(&self, s: &State) -> usize {
        self.goal_pos.iter().filter(|&&a| !s.get(a)).count()
            + self.goal_neg.iter().filter(|&&a| s.get(a)).count()
    }
}

struct Node {
    state: State,
    parent: usize,
    action: usize,
    g: usize,
}

enum Frontier {
    Fifo(VecDeque<usize>),
    Heap(BinaryHeap<Reverse<(usize, usize, usize)>>),
}

impl Frontier {
    fn pop(&mut self) -> Option<usize> {
        match self {
            Frontier::Fifo(q) => q.pop_front(),
            Frontier::Heap(h) => h.pop().map(|Reverse((_, _, id))| id),
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            Frontier::Fifo(q) => q.is_empty(),
            Frontier::Heap(h) => h.is_empty(),
        }
    }
}

/// Search for a plan. A returned plan always validates against `(d, p)`.
pub fn plan(d: &Domain, p: &Problem, cfg: &SearchConfig) -> PlanResult {
    let start = Instant::now();
    let task = Task::new(d, p);
    let (outcome, stats) = search(&task, cfg);
    PlanResult {
        outcome,
        stats,
        elapsed: start.elapsed(),
    }
}

fn search(task: &Task, cfg: &SearchConfig) -> (Outcome, SearchStats) {
    let mut stats = SearchStats::default();
    let mut nodes = vec![Node {
        state: task.init.clone(),
        parent: usize::MAX,
        action: usize::MAX,
        g: 0,
    }];
    if task.h(&task.init) == 0 {
        return (Outcome::Plan(Plan::default()), stats);
    }
    let mut seen: HashMap<State, usize> = HashMap::new();
    seen.insert(task.init.clone(), 0);
    let mut frontier = match cfg.strategy {
        Strategy::Bfs => Frontier::Fifo(VecDeque::from([0])),
        Strategy::GreedyGoalCount => Frontier::Heap(BinaryHeap::from([Reverse((task.h(&task.init), 0, 0))])),
    };

    while let Some(id) = frontier.pop() {
        if stats.expansions >= cfg.max_expansions {
            return (Outcome::ResourceExceeded, stats);
        }
        stats.expansions += 1;
        let g = nodes[id].g + 1;
        for (ai, act) in task.compiled.iter().enumerate() {
            if !act.applicable(&nodes[id].state) {
                continue;
            }
            let next = act.apply(&nodes[id].state);
            if seen.contains_key(&next) {
                continue;
            }
            stats.generated += 1;
            let h = task.h(&next);
            let child = nodes.len();
            seen.insert(next.clone(), child);
            nodes.push(Node {
                state: next,
                parent: id,
                action: ai,
                g,
            });
            if h == 0 {
                return (Outcome::Plan(extract(task, &nodes, child)), stats);
            }
            match &mut frontier {
                Frontier::Fifo(q) => q.push_back(child),
                Frontier::Heap(heap) => heap.push(Reverse((h, g, child))),
            }
        }
    }
    debug_assert!(frontier.is_empty());
    (Outcome::NoSolution, stats)
}

fn extract(task: &Task, nodes: &[Node], mut id: usize) -> Plan {
    let mut steps = Vec::new();
    while nodes[id].parent != usize::MAX {
        let src = task.compiled[nodes[id].action].source;
        steps.push(task.actions[src].clone());
        id = nodes[id].parent;
    }
    steps.reverse();
    Plan::new(steps)
}
