//! Per-seed comparison of every solver against the exact optimum.

use std::fmt::Write as _;
use std::num::NonZeroUsize;

use ringforge::generate::random_instance;
use ringforge::model::is_wrap_solution;
use ringforge::oracle::{exact_opt, OracleBudget};
use ringforge::solvers::{local_search, relative_greedy, two_approx, Epsilon, SolveReport};
use ringforge::Cost;

use crate::CliError;

pub const HEADER: &str =
    "seed,n,m,opt,two_approx,greedy,local,two_approx_ratio,greedy_ratio,local_ratio,greedy_iterations,local_iterations";

pub struct BenchConfig {
    pub n: usize,
    pub m: usize,
    pub max_cost: Cost,
    pub greedy_eps: Epsilon,
    pub local_eps: Epsilon,
    pub budget: OracleBudget,
}

/// `a..b` or `a..=b` (both inclusive) or a single seed.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Usage(format!("seed range `{text}` is not `a..b`"));
    let (lo, hi) = match text.split_once("..") {
        Some((lo, hi)) => (lo, hi.strip_prefix('=').unwrap_or(hi)),
        None => (text, text),
    };
    let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

fn ratio(cost: Cost, opt: Cost) -> String {
    match (cost, opt) {
        (0, 0) => "1.000000".into(),
        (_, 0) => "inf".into(),
        _ => format!("{:.6}", cost as f64 / opt as f64),
    }
}

fn checked(inst: &ringforge::Instance, report: SolveReport) -> Result<SolveReport, CliError> {
    if is_wrap_solution(inst, &report.solution) {
        Ok(report)
    } else {
        Err(CliError::Validation(format!("{} returned a non-solution", report.algorithm)))
    }
}

fn row(seed: u64, cfg: &BenchConfig) -> Result<String, CliError> {
    let inst = random_instance(cfg.n, cfg.m, cfg.max_cost, seed)?;
    let (_, opt) = exact_opt(&inst, &cfg.budget)?;
    let two = checked(&inst, two_approx(&inst)?)?;
    let greedy = checked(&inst, relative_greedy(&inst, cfg.greedy_eps)?)?;
    let local = checked(&inst, local_search(&inst, cfg.local_eps)?)?;
    let mut out = String::new();
    let _ = write!(
        out,
        "{seed},{},{},{opt},{},{},{},{},{},{},{},{}",
        inst.n(),
        inst.links().len(),
        two.cost,
        greedy.cost,
        local.cost,
        ratio(two.cost, opt),
        ratio(greedy.cost, opt),
        ratio(local.cost, opt),
        greedy.iterations,
        local.iterations
    );
    Ok(out)
}

/// CSV with a header and one row per seed in seed order. Seeds are spread
/// over worker threads; the first failing seed aborts the table.
pub fn bench(seeds: &[u64], cfg: &BenchConfig) -> Result<String, CliError> {
    let workers = std::thread::available_parallelism().map_or(1, NonZeroUsize::get).min(seeds.len().max(1));
    let chunk = seeds.len().div_ceil(workers).max(1);
    let rows: Vec<Result<String, CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = seeds
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|&seed| row(seed, cfg)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("bench worker panicked")).collect()
    });
    let mut csv = format!("{HEADER}\n");
    for r in rows {
        csv.push_str(&r?);
        csv.push('\n');
    }
    Ok(csv)
}
