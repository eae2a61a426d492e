//! `goalbridge`: plan PDDL problems, ask the pipeline for a plan from a scene
//! and an instruction, generate datasets and run the benchmark suite.
//!
//! Exit codes: 0 success, 1 no solution (or search budget exhausted) for
//! `plan`, 2 usage/IO/parse error, 3 benchmark below a requested threshold.

use std::fs::File;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use goalbridge_core::bench::{run_bench, train_baseline, BenchConfig, Pipeline, PredictorSpec};
use goalbridge_core::eval::aggregate;
use goalbridge_core::goal::{
    BaselinePredictor, CooccurrenceTable, GoalPredictor, GoalTriple, OraclePredictor, Participant,
    TaskAction,
};
use goalbridge_core::pddl::{kitchen_domain, parse_domain, parse_problem, Domain};
use goalbridge_core::planner::{plan, Outcome, SearchConfig, Strategy};
use goalbridge_core::scene::SceneGraph;
use goalbridge_core::sim::{Level, NoiseConfig, WorldState};
use goalbridge_core::text::{generate_goal_dataset, generate_sts_dataset, jsonl, scene_pool, TemplateSplit};

const EXIT_NO_SOLUTION: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_BELOW_THRESHOLD: u8 = 3;

#[derive(Parser)]
#[command(name = "goalbridge", version, about = "Language-to-goal task planning in a simulated kitchen")]
struct Cli {
    /// Directory used to resolve relative input paths that do not exist
    /// under the working directory.
    #[arg(long, global = true, env = "GOALBRIDGE_FIXTURES")]
    fixtures: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a PDDL problem and print the numbered plan.
    Plan(PlanArgs),
    /// Run the full pipeline on a scene and one or more instructions.
    Ask(AskArgs),
    /// Generate a dataset as JSON lines.
    Gen(GenArgs),
    /// Run the task × level benchmark and report success rates.
    Bench(BenchArgs),
    /// Learn the baseline's co-occurrence table from generated records.
    Train(TrainArgs),
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value = "greedy")]
    strategy: Strategy,
    #[arg(long, default_value_t = 100_000)]
    max_expansions: usize,
}

impl SearchArgs {
    fn config(&self) -> Result<SearchConfig> {
        Ok(SearchConfig::new(self.strategy, self.max_expansions)?)
    }
}

#[derive(Args)]
struct PlanArgs {
    /// Domain file; the built-in kitchen domain when omitted.
    #[arg(long)]
    domain: Option<PathBuf>,
    #[arg(long)]
    problem: PathBuf,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PredictorKind {
    Baseline,
    Oracle,
}

#[derive(Args)]
struct AskArgs {
    #[arg(long)]
    scene: PathBuf,
    /// Instruction; read line by line from standard input when omitted.
    instruction: Option<String>,
    #[arg(long, value_enum, default_value = "baseline")]
    predictor: PredictorKind,
    /// Goal the oracle predictor returns, as `Action,subject,object`.
    #[arg(long, required_if_eq("predictor", "oracle"))]
    gold: Option<String>,
    /// Co-occurrence table written by `train`.
    #[arg(long)]
    table: Option<PathBuf>,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum DatasetKind {
    Sts,
    Goal,
    Scenarios,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: DatasetKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    count: usize,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Template split for goal records.
    #[arg(long, default_value = "train")]
    split: SplitArg,
    /// Scenes in the pool goal records draw from.
    #[arg(long, default_value_t = 150)]
    pool: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    Train,
    HeldOut,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "baseline")]
    predictor: PredictorKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scenarios per task × level cell.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Restrict to these tasks (comma separated).
    #[arg(long, value_delimiter = ',')]
    tasks: Vec<TaskAction>,
    /// Restrict to these levels (comma separated).
    #[arg(long, value_delimiter = ',')]
    levels: Vec<Level>,
    /// Probability that a detection is dropped.
    #[arg(long, default_value_t = 0.02)]
    dropout: f64,
    /// Maximum mask displacement in pixels.
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    /// Disable all perception noise.
    #[arg(long)]
    noise_free: bool,
    #[arg(long)]
    table: Option<PathBuf>,
    /// Training records for the baseline when no table is given.
    #[arg(long, default_value_t = 2000)]
    train_count: usize,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long)]
    json: bool,
    /// Also write the trial records as JSON lines.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 3 when VSR at execution falls below this percentage.
    #[arg(long)]
    min_vsr: Option<f64>,
    /// Exit with status 3 when SR at execution falls below this percentage.
    #[arg(long)]
    min_sr: Option<f64>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2000)]
    count: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let fx = cli.fixtures.as_deref();
    match &cli.cmd {
        Command::Plan(a) => cmd_plan(a, fx),
        Command::Ask(a) => cmd_ask(a, fx),
        Command::Gen(a) => cmd_gen(a),
        Command::Bench(a) => cmd_bench(a, fx),
        Command::Train(a) => cmd_train(a),
    }
}

fn resolve(path: &Path, fixtures: Option<&Path>) -> PathBuf {
    match fixtures {
        Some(dir) if path.is_relative() && !path.exists() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

fn read(path: &Path, fixtures: Option<&Path>) -> Result<String> {
    let p = resolve(path, fixtures);
    std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))
}

fn load_domain(path: Option<&Path>, fixtures: Option<&Path>) -> Result<Domain> {
    match path {
        Some(p) => parse_domain(&read(p, fixtures)?).with_context(|| format!("parsing {}", p.display())),
        None => Ok(kitchen_domain()),
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_plan(a: &PlanArgs, fx: Option<&Path>) -> Result<u8> {
    let domain = load_domain(a.domain.as_deref(), fx)?;
    let problem = parse_problem(&read(&a.problem, fx)?, &domain)
        .with_context(|| format!("parsing {}", a.problem.display()))?;
    let result = plan(&domain, &problem, &a.search.config()?);
    if a.json {
        let steps: Vec<String> = result.outcome.plan().map_or(vec![], |p| p.steps.iter().map(|s| s.name()).collect());
        let v = serde_json::json!({
            "outcome": result.outcome.label(),
            "plan": steps,
            "expansions": result.stats.expansions,
            "generated": result.stats.generated,
            "elapsed_ms": result.elapsed.as_secs_f64() * 1e3,
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
    }
    match &result.outcome {
        Outcome::Plan(p) => {
            if !a.json {
                print!("{}", p.to_numbered());
            }
            Ok(0)
        }
        Outcome::NoSolution => {
            if !a.json {
                println!("NO SOLUTION");
            }
            Ok(EXIT_NO_SOLUTION)
        }
        Outcome::ResourceExceeded => {
            if !a.json {
                println!("NO SOLUTION (search budget of {} expansions exhausted)", a.search.max_expansions);
            }
            Ok(EXIT_NO_SOLUTION)
        }
    }
}

fn parse_triple(s: &str) -> Result<GoalTriple> {
    let parts: Vec<&str> = s.trim_matches(|c| c == '(' || c == ')').split(',').map(str::trim).collect();
    let [a, sub, obj] = parts[..] else {
        bail!("expected `Action,subject,object`, got `{s}`");
    };
    Ok(GoalTriple {
        action: a.parse()?,
        subject: sub.parse::<Participant>()?,
        object: obj.parse::<Participant>()?,
    })
}

fn load_table(path: &Path, fx: Option<&Path>) -> Result<CooccurrenceTable> {
    CooccurrenceTable::from_json(&read(path, fx)?).with_context(|| format!("parsing {}", path.display()))
}

fn cmd_ask(a: &AskArgs, fx: Option<&Path>) -> Result<u8> {
    let scene = SceneGraph::from_json(&read(&a.scene, fx)?).with_context(|| format!("parsing {}", a.scene.display()))?;
    let world = WorldState::from_scene(&scene)?;
    let predictor: Box<dyn GoalPredictor> = match a.predictor {
        PredictorKind::Oracle => {
            let gold = a.gold.as_deref().ok_or_else(|| anyhow!("--gold is required with the oracle"))?;
            Box::new(OraclePredictor { gold: parse_triple(gold)? })
        }
        PredictorKind::Baseline => {
            let mut p = BaselinePredictor::kitchen();
            if let Some(t) = &a.table {
                p = p.with_table(load_table(t, fx)?);
            }
            Box::new(p)
        }
    };
    let pipeline = Pipeline::kitchen(a.search.config()?);
    let mut out = io::stdout().lock();
    let answer = |instruction: &str, out: &mut dyn Write| -> Result<()> {
        let report = ask_once(&pipeline, &scene, &world, predictor.as_ref(), instruction);
        if a.json {
            writeln!(out, "{}", serde_json::to_string(&report)?)?;
        } else {
            write!(out, "{}", render_ask(&report))?;
        }
        Ok(())
    };
    if let Some(i) = &a.instruction {
        answer(i, &mut out)?;
        return Ok(0);
    }
    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    loop {
        write!(out, "> ")?;
        out.flush()?;
        let Some(line) = lines.next() else { break };
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        answer(line, &mut out)?;
    }
    writeln!(out)?;
    Ok(0)
}

fn ask_once(
    pipeline: &Pipeline,
    scene: &SceneGraph,
    world: &WorldState,
    predictor: &dyn GoalPredictor,
    instruction: &str,
) -> serde_json::Value {
    use goalbridge_core::eval::PlanAttempt;
    let run = pipeline.run(scene, instruction, predictor);
    let goal = match &run.goal {
        Ok(g) => serde_json::json!({ "triple": g.to_string(), "value": g }),
        Err(e) => serde_json::json!({ "error": e.to_string() }),
    };
    let compiled: Option<Vec<String>> = run.compiled.as_ref().map(|c| c.iter().map(|l| l.to_string()).collect());
    let (plan, note) = match &run.attempt {
        PlanAttempt::Plan(p) => (Some(p.steps.iter().map(|s| s.name()).collect::<Vec<_>>()), None),
        PlanAttempt::NoSolution(r) | PlanAttempt::NotAttempted(r) => (None, Some(r.clone())),
        PlanAttempt::ResourceExceeded => (None, Some("search budget exhausted".to_string())),
    };
    let execution = pipeline
        .execute(&run, world, &world.true_masks())
        .map(|(t, _)| serde_json::json!({ "success": t.success, "summary": t.summary() }));
    serde_json::json!({
        "instruction": instruction,
        "goal": goal,
        "compiled": compiled,
        "status": run.attempt.status(),
        "plan": plan,
        "note": note,
        "execution": execution,
    })
}

fn render_ask(r: &serde_json::Value) -> String {
    let mut s = String::new();
    match r["goal"]["triple"].as_str() {
        Some(t) => s += &format!("goal: {t}\n"),
        None => s += &format!("goal: error: {}\n", r["goal"]["error"].as_str().unwrap_or("")),
    }
    if let Some(c) = r["compiled"].as_array() {
        let lits: Vec<&str> = c.iter().filter_map(|x| x.as_str()).collect();
        s += &format!("compiled goal: {}\n", lits.join(" "));
    }
    match r["plan"].as_array() {
        Some(steps) => {
            s += "plan:\n";
            for (i, st) in steps.iter().enumerate() {
                s += &format!("{}. {}\n", i + 1, st.as_str().unwrap_or(""));
            }
        }
        None if r["status"] == "not-attempted" => {
            s += &format!("plan: not attempted ({})\n", r["note"].as_str().unwrap_or(""));
        }
        None => {
            s += "NO SOLUTION\n";
            if let Some(n) = r["note"].as_str() {
                s += &format!("  {n}\n");
            }
        }
    }
    if let Some(e) = r["execution"]["summary"].as_str() {
        s += &format!("{e}\n");
    }
    s
}

fn cmd_gen(a: &GenArgs) -> Result<u8> {
    let out = output(a.out.as_deref())?;
    match a.kind {
        DatasetKind::Sts => {
            let pairs = generate_sts_dataset(a.seed, a.count);
            jsonl::write(out, jsonl::STS_SCHEMA, Some(a.seed), &pairs)?;
        }
        DatasetKind::Goal => {
            let split = match a.split {
                SplitArg::Train => TemplateSplit::Train,
                SplitArg::HeldOut => TemplateSplit::HeldOut,
            };
            let pool = scene_pool(a.seed, a.pool);
            let records = generate_goal_dataset(a.seed, a.count, &pool, split)?;
            jsonl::write(out, jsonl::GOAL_SCHEMA, Some(a.seed), &records)?;
        }
        DatasetKind::Scenarios => {
            let cfg = BenchConfig {
                seed: a.seed,
                trials: a.count,
                ..BenchConfig::default()
            };
            let scenarios: Vec<serde_json::Value> = goalbridge_core::bench::suite(&cfg)
                .iter()
                .map(|s| serde_json::from_str(&s.to_json()))
                .collect::<Result<_, _>>()?;
            jsonl::write(out, jsonl::SCENARIO_SCHEMA, Some(a.seed), &scenarios)?;
        }
    }
    Ok(0)
}

fn cmd_bench(a: &BenchArgs, fx: Option<&Path>) -> Result<u8> {
    let noise = if a.noise_free {
        NoiseConfig::none()
    } else {
        NoiseConfig {
            category_dropout: a.dropout,
            mask_jitter: a.jitter,
        }
    };
    if !(0.0..=1.0).contains(&noise.category_dropout) || noise.mask_jitter < 0.0 {
        bail!("dropout must lie in [0, 1] and jitter must be non-negative");
    }
    let cfg = BenchConfig {
        seed: a.seed,
        trials: a.trials,
        tasks: if a.tasks.is_empty() { TaskAction::ALL.to_vec() } else { a.tasks.clone() },
        levels: if a.levels.is_empty() { Level::ALL.to_vec() } else { a.levels.clone() },
        noise,
    };
    let spec = match a.predictor {
        PredictorKind::Oracle => PredictorSpec::Oracle,
        PredictorKind::Baseline => {
            let p = match &a.table {
                Some(t) => BaselinePredictor::kitchen().with_table(load_table(t, fx)?),
                None => train_baseline(a.seed, a.train_count)?,
            };
            PredictorSpec::Model(Arc::new(p))
        }
    };
    let records = run_bench(&cfg, &spec, &Pipeline::kitchen(a.search.config()?));
    let report = aggregate(&records)?;
    if let Some(p) = &a.out {
        jsonl::write(output(Some(p))?, "goalbridge-trial-record", Some(a.seed), &records)?;
    }
    if a.json {
        println!("{}", report.to_json());
    } else {
        println!("predictor: {}  seed: {}  trials: {}", spec.name(), a.seed, report.trials);
        print!("{}", report.to_table());
    }
    let mut below = false;
    if let Some(min) = a.min_vsr {
        let got = report.vsr.map(|r| r.execution);
        if got.is_none_or(|v| v < min) {
            eprintln!("VSR {got:?} below threshold {min}");
            below = true;
        }
    }
    if let Some(min) = a.min_sr {
        if report.sr.execution < min {
            eprintln!("SR {:.1} below threshold {min}", report.sr.execution);
            below = true;
        }
    }
    Ok(if below { EXIT_BELOW_THRESHOLD } else { 0 })
}

fn cmd_train(a: &TrainArgs) -> Result<u8> {
    let p = train_baseline(a.seed, a.count)?;
    let table = p.table().ok_or_else(|| anyhow!("training produced no table"))?;
    let mut out = output(a.out.as_deref())?;
    writeln!(out, "{}", table.to_json())?;
    out.flush()?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triples_parse() {
        let g = parse_triple("Cut, tomato, knife").unwrap();
        assert_eq!(g.to_string(), "(Cut, tomato, knife)");
        assert_eq!(parse_triple("(Cut, UNKNOWN, knife)").unwrap().subject, Participant::Unknown);
        assert!(parse_triple("Cut,tomato").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
