//! `ringforge`: solve, check and benchmark ring augmentation instances.
//!
//! Exit codes: 0 success, 1 validation failure, 2 parse or usage error,
//! 3 infeasible instance or exhausted oracle budget.

mod bench;
mod input;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ringforge::component_dp::{find_best_drop_component, DpWeights};
use ringforge::decomposition::decompose;
use ringforge::directed::{
    is_directed_solution, make_non_shortenable, verify_structure, Arborescence, DirectedSolution,
};
use ringforge::dropcalc::drop_set;
use ringforge::generate::{random_instance, rng_from_seed};
use ringforge::model::{format_cost, load_solution, save_instance, save_solution, uncovered_cuts, LinkId};
use ringforge::oracle::{exact_opt, OracleBudget};
use ringforge::reduction::{random_cactus, save_cactus};
use ringforge::solvers::{
    initial_directed_solution, local_search, parse_epsilon, relative_greedy, two_approx, Epsilon, SolveReport,
};
use ringforge::thinness::alpha_thin_witness;
use ringforge::{Cost, Error};

use input::Problem;

const SCHEMA: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) | CliError::Usage(_) => 2,
            CliError::Lib(e) => match e {
                Error::Parse { .. }
                | Error::NegativeCost { .. }
                | Error::EndpointOutOfRange { .. }
                | Error::LoopLink { .. }
                | Error::TooFewVertices(_)
                | Error::Overflow
                | Error::NotCactus(_)
                | Error::EpsilonOutOfRange(_)
                | Error::InvalidArgument(_) => 2,
                Error::Infeasible | Error::BudgetExceeded(_) => 3,
                _ => 1,
            },
        }
    }
}

#[derive(Parser)]
#[command(name = "ringforge", version, about = "Weighted ring and cactus augmentation solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    TwoApprox,
    Greedy,
    Local,
    Exact,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver and write the solution.
    Solve {
        #[arg(long, value_enum)]
        algo: Algo,
        /// Accuracy parameter, as `0.25` or `1/4`; local search needs at most 1/2.
        #[arg(long, default_value = "1/2")]
        eps: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON file receiving the per-iteration component, dropped links and potential.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Also run the exact oracle and report the optimum and ratio.
        #[arg(long)]
        opt: bool,
        /// Include wall time in the report, which makes it non-reproducible.
        #[arg(long)]
        timing: bool,
    },
    /// Optimum by exhaustive search within the oracle budget.
    Exact {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a solution file against an instance.
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Split a solution into thin components plus a cheap removed set.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        solution: PathBuf,
        /// Directed solution to decompose against; defaults to the cheapest one.
        #[arg(long)]
        directed: Option<PathBuf>,
    },
    /// Best α-thin component for a head weighting of the directed solution.
    Component {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        alpha: usize,
        /// `uniform` (each directed link weighs its cost) or a `ctilde` file.
        #[arg(long)]
        ctilde: String,
        #[arg(long)]
        directed: Option<PathBuf>,
    },
    /// Check the arborescence, planarity and direction properties.
    VerifyStructure {
        #[arg(long = "in")]
        input: PathBuf,
        /// Directed solution file; defaults to the cheapest one.
        #[arg(long)]
        directed: Option<PathBuf>,
        /// Shorten the directed solution before checking.
        #[arg(long)]
        shorten: bool,
    },
    /// Write a seeded random feasible instance.
    Gen {
        /// Vertices of the ring, or the edge bound of a cactus.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 10)]
        max_cost: Cost,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        cactus: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV comparing all solvers with the optimum over a seed range.
    Bench {
        /// Inclusive range such as `1..100`.
        #[arg(long)]
        seeds: String,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        m: usize,
        #[arg(long, default_value_t = 10)]
        max_cost: Cost,
        #[arg(long, default_value = "1/4")]
        greedy_eps: String,
        #[arg(long, default_value = "1/2")]
        local_eps: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn budget() -> Result<OracleBudget, CliError> {
    Ok(OracleBudget::from_env()?)
}

fn print(report: Value) {
    println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
}

fn emit(text: String, out: Option<PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => input::write(&path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cost_fields(report: &mut Value, key: &str, cost: Cost, scale: Cost) {
    report[key] = json!(cost);
    report[format!("{key}_text")] = json!(format_cost(cost, scale));
}

fn eps_arg(text: &str) -> Result<Epsilon, CliError> {
    Ok(parse_epsilon(text)?)
}

fn directed_arg(inst: &ringforge::Instance, path: Option<PathBuf>) -> Result<DirectedSolution, CliError> {
    match path {
        Some(p) => input::load_directed(inst, &input::read(&p)?),
        None => Ok(initial_directed_solution(inst)?),
    }
}

/// Solution ids from a file; ids out of range are a validation failure.
fn solution_arg(problem: &Problem, path: &Path) -> Result<Vec<LinkId>, CliError> {
    let ids = load_solution(&input::read(path)?)?;
    if let Some(bad) = ids.iter().find(|&&i| i >= problem.link_count()) {
        return Err(CliError::Validation(format!("unknown link id {bad}")));
    }
    Ok(ids)
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Solve { algo, eps, input, out, trace, opt, timing } => {
            solve(algo, &eps, input, out, trace, opt, timing)
        }
        Command::Exact { input, out } => exact(input, out),
        Command::Validate { input, solution } => validate(input, solution),
        Command::Decompose { input, eps, solution, directed } => run_decompose(input, &eps, solution, directed),
        Command::Component { input, alpha, ctilde, directed } => component(input, alpha, &ctilde, directed),
        Command::VerifyStructure { input, directed, shorten } => structure(input, directed, shorten),
        Command::Gen { n, m, max_cost, seed, cactus, out } => {
            let text = if cactus {
                save_cactus(&random_cactus(&mut rng_from_seed(seed), n, m, max_cost)?)
            } else {
                save_instance(&random_instance(n, m, max_cost, seed)?)
            };
            emit(text, out)
        }
        Command::Bench { seeds, n, m, max_cost, greedy_eps, local_eps, out } => {
            let cfg = bench::BenchConfig {
                n,
                m,
                max_cost,
                greedy_eps: eps_arg(&greedy_eps)?,
                local_eps: eps_arg(&local_eps)?,
                budget: budget()?,
            };
            emit(bench::bench(&bench::parse_seeds(&seeds)?, &cfg)?, out)
        }
    }
}

fn run_solver(algo: Algo, inst: &ringforge::Instance, eps: &str) -> Result<SolveReport, CliError> {
    Ok(match algo {
        Algo::TwoApprox => two_approx(inst)?,
        Algo::Greedy => relative_greedy(inst, eps_arg(eps)?)?,
        Algo::Local => local_search(inst, eps_arg(eps)?)?,
        Algo::Exact => {
            let (solution, cost) = exact_opt(inst, &budget()?)?;
            SolveReport {
                algorithm: "exact".into(),
                solution,
                cost,
                epsilon: None,
                alpha: None,
                alpha_capped: false,
                initial_cost: cost,
                iterations: 0,
                trace: Vec::new(),
                warnings: Vec::new(),
            }
        }
    })
}

/// Maps a ring solution back to input ids and refuses to emit anything that
/// fails the feasibility check.
fn checked_solution(problem: &Problem, ring_solution: &[LinkId]) -> Result<(Vec<LinkId>, Cost), CliError> {
    let ids = problem.to_input_ids(ring_solution)?;
    if !problem.is_solution(&ids) {
        return Err(CliError::Validation("solver output is not a solution".into()));
    }
    let cost = problem.cost_of(&ids);
    Ok((ids, cost))
}

fn solve(
    algo: Algo,
    eps: &str,
    input: PathBuf,
    out: Option<PathBuf>,
    trace: Option<PathBuf>,
    with_opt: bool,
    timing: bool,
) -> Result<(), CliError> {
    let problem = Problem::load(&input)?;
    let start = Instant::now();
    let report = run_solver(algo, problem.ring(), eps)?;
    let elapsed = start.elapsed();
    let (solution, cost) = checked_solution(&problem, &report.solution)?;
    let scale = problem.cost_scale();
    let mut json = json!({
        "schema": SCHEMA,
        "command": "solve",
        "input": problem.kind(),
        "algorithm": report.algorithm,
        "epsilon": report.epsilon,
        "alpha": report.alpha,
        "alpha_capped": report.alpha_capped,
        "iterations": report.iterations,
        "solution": solution,
        "cost_scale": scale,
        "warnings": report.warnings,
    });
    cost_fields(&mut json, "cost", cost, scale);
    cost_fields(&mut json, "initial_cost", report.initial_cost, scale);
    if with_opt {
        let (_, opt) = exact_opt(problem.ring(), &budget()?)?;
        cost_fields(&mut json, "opt", opt, scale);
        json["ratio"] = match (cost, opt) {
            (0, 0) => json!("1"),
            (_, 0) => Value::Null,
            _ => json!(format_cost(cost, opt)),
        };
    }
    if timing {
        json["wall_time_ms"] = json!(elapsed.as_secs_f64() * 1000.0);
    }
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }
    if let Some(path) = trace {
        let text =
            serde_json::to_string_pretty(&json!({ "schema": SCHEMA, "ring_link_ids": true, "trace": report.trace }))
                .expect("traces serialize");
        input::write(&path, &text)?;
    }
    if let Some(path) = out {
        input::write(&path, &save_solution(&solution))?;
    }
    print(json);
    Ok(())
}

fn exact(input: PathBuf, out: Option<PathBuf>) -> Result<(), CliError> {
    let problem = Problem::load(&input)?;
    let (ring_solution, _) = exact_opt(problem.ring(), &budget()?)?;
    let (solution, cost) = checked_solution(&problem, &ring_solution)?;
    let scale = problem.cost_scale();
    let mut json = json!({
        "schema": SCHEMA,
        "command": "exact",
        "input": problem.kind(),
        "solution": solution,
        "cost_scale": scale,
    });
    cost_fields(&mut json, "opt", cost, scale);
    if let Some(path) = out {
        input::write(&path, &save_solution(&solution))?;
    }
    print(json);
    Ok(())
}

fn validate(input: PathBuf, solution: PathBuf) -> Result<(), CliError> {
    let problem = Problem::load(&input)?;
    let ids = solution_arg(&problem, &solution)?;
    let valid = problem.is_solution(&ids);
    let scale = problem.cost_scale();
    let mut json = json!({
        "schema": SCHEMA,
        "command": "validate",
        "input": problem.kind(),
        "valid": valid,
        "cost_scale": scale,
    });
    cost_fields(&mut json, "cost", problem.cost_of(&ids), scale);
    if let Problem::Ring(inst) = &problem {
        json["uncovered_cuts"] = json!(uncovered_cuts(inst, &ids));
    }
    print(json);
    if valid {
        Ok(())
    } else {
        Err(CliError::Validation("the link set is not a solution".into()))
    }
}

fn run_decompose(input: PathBuf, eps: &str, solution: PathBuf, directed: Option<PathBuf>) -> Result<(), CliError> {
    let problem = Problem::load(&input)?;
    let inst = problem.require_ring("decompose")?;
    let eps = eps_arg(eps)?;
    let ids = solution_arg(&problem, &solution)?;
    let f0 = directed_arg(inst, directed)?;
    let d = decompose(inst, &ids, &f0, eps)?;
    let mut json = json!({
        "schema": SCHEMA,
        "command": "decompose",
        "epsilon": format!("{}/{}", eps.numer(), eps.denom()),
        "directed": f0.links,
    });
    if let (Value::Object(fields), Value::Object(extra)) = (&mut json, serde_json::to_value(&d).expect("serializes")) {
        fields.extend(extra);
    }
    print(json);
    Ok(())
}

fn component(input: PathBuf, alpha: usize, ctilde: &str, directed: Option<PathBuf>) -> Result<(), CliError> {
    if alpha == 0 {
        return Err(CliError::Usage("alpha must be at least 1".into()));
    }
    let problem = Problem::load(&input)?;
    let inst = problem.require_ring("component")?;
    let f0 = directed_arg(inst, directed)?;
    let arb = Arborescence::build(inst, &f0)?;
    let overlay: Vec<i128> = if ctilde == "uniform" {
        arb.links().iter().map(|d| d.cost as i128).collect()
    } else {
        let by_head = input::load_head_weights(inst.n(), &input::read(&PathBuf::from(ctilde))?)?;
        arb.links().iter().map(|d| by_head[d.head]).collect()
    };
    let weights = DpWeights::new(inst, &arb, &overlay)?;
    let best = find_best_drop_component(inst, &arb, &weights, alpha);
    let witness = alpha_thin_witness(inst, &best.links, alpha)
        .ok_or_else(|| CliError::Validation("component is not thin".into()))?;
    let dropped: Vec<_> = drop_set(inst, &arb, &best.links).into_iter().map(|i| arb.links()[i]).collect();
    print(json!({
        "schema": SCHEMA,
        "command": "component",
        "alpha": alpha,
        "directed": arb.links(),
        "component": best.links,
        "value": best.value,
        "witness": witness,
        "drop": dropped,
    }));
    Ok(())
}

fn structure(input: PathBuf, directed: Option<PathBuf>, shorten: bool) -> Result<(), CliError> {
    let problem = Problem::load(&input)?;
    let inst = problem.require_ring("verify-structure")?;
    let mut f = directed_arg(inst, directed)?;
    let is_solution = is_directed_solution(inst, &f.links);
    if shorten && is_solution {
        f = make_non_shortenable(inst, &f.links)?;
    }
    let report = verify_structure(inst, &f.links);
    let passed = is_solution && report.passed();
    print(json!({
        "schema": SCHEMA,
        "command": "verify-structure",
        "directed_solution": is_solution,
        "arborescence": report.arborescence,
        "planar": report.planar,
        "directions": report.directions,
        "violations": report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "checked": input::save_directed(&f),
        "passed": passed,
    }));
    if passed {
        Ok(())
    } else {
        Err(CliError::Validation("structure check failed".into()))
    }
}
