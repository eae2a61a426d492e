use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Stage, TrialRecord};
use crate::goal::TaskAction;
use crate::sim::Level;

/// Trials that passed each stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounts {
    pub perception: usize,
    pub goal_learning: usize,
    pub task_planning: usize,
    pub execution: usize,
}

impl StageCounts {
    pub fn get(&self, s: Stage) -> usize {
        match s {
            Stage::Perception => self.perception,
            Stage::GoalLearning => self.goal_learning,
            Stage::TaskPlanning => self.task_planning,
            Stage::Execution => self.execution,
        }
    }

    fn add(&mut self, r: &TrialRecord) {
        self.perception += usize::from(r.passed(Stage::Perception));
        self.goal_learning += usize::from(r.passed(Stage::GoalLearning));
        self.task_planning += usize::from(r.passed(Stage::TaskPlanning));
        self.execution += usize::from(r.passed(Stage::Execution));
    }

    fn merge(&mut self, o: &StageCounts) {
        self.perception += o.perception;
        self.goal_learning += o.goal_learning;
        self.task_planning += o.task_planning;
        self.execution += o.execution;
    }
}

/// Per-stage success percentages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageRates {
    pub trials: usize,
    pub perception: f64,
    pub goal_learning: f64,
    pub task_planning: f64,
    pub execution: f64,
}

impl StageRates {
    fn from_counts(c: &StageCounts, trials: usize) -> Option<Self> {
        if trials == 0 {
            return None;
        }
        let pct = |n: usize| 100.0 * n as f64 / trials as f64;
        Some(StageRates {
            trials,
            perception: pct(c.perception),
            goal_learning: pct(c.goal_learning),
            task_planning: pct(c.task_planning),
            execution: pct(c.execution),
        })
    }

    pub fn get(&self, s: Stage) -> f64 {
        match s {
            Stage::Perception => self.perception,
            Stage::GoalLearning => self.goal_learning,
            Stage::TaskPlanning => self.task_planning,
            Stage::Execution => self.execution,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskLevelCell {
    pub task: TaskAction,
    pub level: Level,
    pub trials: usize,
    pub passed: StageCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRates {
    pub task: TaskAction,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vsr: Option<StageRates>,
    pub sr: StageRates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRates {
    pub level: Level,
    pub rates: StageRates,
}

/// Success counts per task, level and stage with the VSR (Easy, Medium,
/// Hard1), ISR (Hard2) and SR (all trials) aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub trials: usize,
    /// Trials that passed every stage.
    pub successes: usize,
    pub cells: Vec<TaskLevelCell>,
    pub tasks: Vec<TaskRates>,
    pub levels: Vec<LevelRates>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vsr: Option<StageRates>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub isr: Option<StageRates>,
    pub sr: StageRates,
}

impl MetricsReport {
    pub(super) fn from_records(records: &[TrialRecord]) -> Self {
        let mut cells = Vec::new();
        for task in TaskAction::ALL {
            for level in Level::ALL {
                let mut passed = StageCounts::default();
                let mut trials = 0;
                for r in records.iter().filter(|r| r.task == task && r.level == level) {
                    passed.add(r);
                    trials += 1;
                }
                if trials > 0 {
                    cells.push(TaskLevelCell { task, level, trials, passed });
                }
            }
        }
        let sum = |keep: &dyn Fn(&TaskLevelCell) -> bool| {
            let mut c = StageCounts::default();
            let mut n = 0;
            for cell in cells.iter().filter(|c| keep(c)) {
                c.merge(&cell.passed);
                n += cell.trials;
            }
            StageRates::from_counts(&c, n)
        };
        let tasks = TaskAction::ALL
            .into_iter()
            .filter_map(|t| {
                Some(TaskRates {
                    task: t,
                    vsr: sum(&|c| c.task == t && c.level.has_solution()),
                    sr: sum(&|c| c.task == t)?,
                })
            })
            .collect();
        let levels = Level::ALL
            .into_iter()
            .filter_map(|l| {
                Some(LevelRates {
                    level: l,
                    rates: sum(&|c| c.level == l)?,
                })
            })
            .collect();
        MetricsReport {
            trials: records.len(),
            successes: records.iter().filter(|r| r.success()).count(),
            vsr: sum(&|c| c.level.has_solution()),
            isr: sum(&|c| !c.level.has_solution()),
            sr: sum(&|_| true).expect("non-empty records"),
            cells,
            tasks,
            levels,
        }
    }

    pub fn cell(&self, task: TaskAction, level: Level) -> Option<&TaskLevelCell> {
        self.cells.iter().find(|c| c.task == task && c.level == level)
    }

    pub fn level(&self, level: Level) -> Option<&StageRates> {
        self.levels.iter().find(|l| l.level == level).map(|l| &l.rates)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned text table: one row per level with per-task stage counts and
    /// the level's rates, then per-task VSR and SR rows.
    pub fn to_table(&self) -> String {
        const W: usize = 6;
        let label_w = 10;
        let mut out = String::new();
        let group = |out: &mut String, vals: [String; 4]| {
            out.push_str(" |");
            for v in vals {
                let _ = write!(out, "{v:>W$}");
            }
        };
        let counts = |c: Option<&TaskLevelCell>| {
            Stage::ALL.map(|s| c.map_or("-".to_string(), |c| c.passed.get(s).to_string()))
        };
        let rates = |r: Option<&StageRates>| Stage::ALL.map(|s| r.map_or("-".into(), |r| format!("{:.1}", r.get(s))));

        let _ = write!(out, "{:label_w$}", "");
        for t in TaskAction::ALL {
            let _ = write!(out, " |{:^w$}", t.as_str(), w = 4 * W);
        }
        let _ = writeln!(out, " |{:^w$}", "rate (%)", w = 4 * W);
        let _ = write!(out, "{:label_w$}", "");
        for _ in 0..=TaskAction::ALL.len() {
            group(&mut out, Stage::ALL.map(|s| s.short().to_string()));
        }
        out.push('\n');

        let rate_name = |l: Level| if l.has_solution() { "VSR" } else { "ISR" };
        for l in Level::ALL {
            if self.level(l).is_none() {
                continue;
            }
            if l == Level::Hard2 {
                self.summary_row(&mut out, "VSR (%)", |t| t.vsr.as_ref(), self.vsr.as_ref(), label_w);
            }
            let _ = write!(out, "{:label_w$}", l.as_str());
            for t in TaskAction::ALL {
                group(&mut out, counts(self.cell(t, l)));
            }
            group(&mut out, rates(self.level(l)));
            let _ = writeln!(out, "  {}", rate_name(l));
        }
        if self.level(Level::Hard2).is_none() {
            self.summary_row(&mut out, "VSR (%)", |t| t.vsr.as_ref(), self.vsr.as_ref(), label_w);
        }
        if let Some(isr) = &self.isr {
            let _ = writeln!(
                out,
                "{:label_w$} | ISR over {} trials: P {:.1}  GL {:.1}  TP {:.1}  E {:.1}",
                "",
                isr.trials,
                isr.perception,
                isr.goal_learning,
                isr.task_planning,
                isr.execution
            );
        }
        self.summary_row(&mut out, "SR (%)", |t| Some(&t.sr), Some(&self.sr), label_w);
        let _ = writeln!(out, "{} of {} trials succeeded at every stage", self.successes, self.trials);
        out
    }

    fn summary_row(
        &self,
        out: &mut String,
        name: &str,
        pick: impl Fn(&TaskRates) -> Option<&StageRates>,
        total: Option<&StageRates>,
        label_w: usize,
    ) {
        let fmt = |r: Option<&StageRates>| Stage::ALL.map(|s| r.map_or("-".into(), |r| format!("{:.1}", r.get(s))));
        let _ = write!(out, "{name:label_w$}");
        for t in TaskAction::ALL {
            let r = self.tasks.iter().find(|x| x.task == t).and_then(&pick);
            out.push_str(" |");
            for v in fmt(r) {
                let _ = write!(out, "{v:>6}");
            }
        }
        out.push_str(" |");
        for v in fmt(total) {
            let _ = write!(out, "{v:>6}");
        }
        out.push('\n');
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::aggregate;
    use crate::goal::GoalTriple;
    use crate::scene::Category;

    fn rec(task: TaskAction, level: Level, ok: [bool; 4]) -> TrialRecord {
        TrialRecord {
            scenario: format!("{task}-{level}"),
            task,
            level,
            seed: 0,
            request: String::new(),
            gold: GoalTriple::new(task, Category::Tomato, Category::Knife),
            predicted: None,
            perception_ok: ok[0],
            goal_ok: ok[1],
            plan_ok: ok[2],
            exec_ok: ok[3],
            plan_status: "plan".into(),
            plan: vec![],
            note: None,
            execution: None,
        }
    }

    #[test]
    fn easy_goal_learning_rate() {
        let mut rs = Vec::new();
        for i in 0..50 {
            let gl = i < 46;
            rs.push(rec(TaskAction::ALL[i % 5], Level::Easy, [true, gl, true, true]));
        }
        let r = aggregate(&rs).unwrap();
        let easy = r.level(Level::Easy).unwrap();
        assert_eq!(easy.goal_learning, 92.0);
        assert_eq!(easy.perception, 100.0);
        // Cascade: planning and execution cannot exceed goal learning.
        assert_eq!(easy.execution, 92.0);
        assert!(r.isr.is_none());
    }

    #[test]
    fn hard2_stages_are_independent() {
        let rs: Vec<_> = (0..50)
            .map(|i| rec(TaskAction::ALL[i % 5], Level::Hard2, [true, i % 2 == 0, true, true]))
            .collect();
        let r = aggregate(&rs).unwrap();
        let isr = r.isr.unwrap();
        assert_eq!(isr.task_planning, 100.0);
        assert_eq!(isr.execution, 100.0);
        assert_eq!(isr.goal_learning, 50.0);
    }

    #[test]
    fn sr_is_trial_weighted_mean() {
        let mut rs = Vec::new();
        for i in 0..30 {
            rs.push(rec(TaskAction::ALL[i % 5], Level::VALID[i % 3], [true, i % 3 != 0, true, i % 4 != 0]));
        }
        for i in 0..10 {
            rs.push(rec(TaskAction::ALL[i % 5], Level::Hard2, [i % 2 == 0, true, i != 3, true]));
        }
        let r = aggregate(&rs).unwrap();
        let (v, i, s) = (r.vsr.unwrap(), r.isr.unwrap(), r.sr);
        for st in Stage::ALL {
            let w = (v.get(st) * 30.0 + i.get(st) * 10.0) / 40.0;
            assert!((w - s.get(st)).abs() < 1e-9);
            assert!((0.0..=100.0).contains(&s.get(st)));
        }
        let table = r.to_table();
        assert!(table.contains("VSR (%)") && table.contains("SR (%)") && table.contains("hard2"));
    }

    #[test]
    fn all_pass_is_all_hundred() {
        let rs: Vec<_> = TaskAction::ALL
            .into_iter()
            .flat_map(|t| Level::ALL.map(|l| rec(t, l, [true; 4])))
            .collect();
        let r = aggregate(&rs).unwrap();
        for st in Stage::ALL {
            assert_eq!(r.sr.get(st), 100.0);
            assert_eq!(r.vsr.unwrap().get(st), 100.0);
        }
        assert_eq!(r.successes, 20);
        let back: MetricsReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
