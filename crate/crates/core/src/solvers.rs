//! End-to-end solvers: the directed 2-approximation, the relative greedy
//! algorithm and the witness-set local search.

use num_rational::Ratio;
use serde::Serialize;

use crate::component_dp::{find_best_drop_component, find_min_ratio_component, DpWeights};
use crate::directed::{
    make_non_shortenable, min_cost_directed_solution, shadows, verify_structure, Arborescence, DirectedLink,
    DirectedSolution,
};
use crate::dropcalc::drop_set;
use crate::error::{Error, Result};
use crate::model::{enumerate_cuts, is_feasible, is_wrap_solution, Cost, Instance, LinkId};
use crate::thinness::ALPHA_CAP;

pub type Epsilon = Ratio<i64>;

/// Parses `0.25`, `1/4` or `1`.
pub fn parse_epsilon(text: &str) -> Result<Epsilon> {
    let bad = || Error::EpsilonOutOfRange(text.to_string());
    let text = text.trim();
    if text.starts_with('-') {
        return Err(bad());
    }
    let eps = if let Some((whole, frac)) = text.split_once('.') {
        if frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10i64.pow(frac.len() as u32);
        let whole: i64 = if whole.is_empty() { 0 } else { whole.parse().map_err(|_| bad())? };
        let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        Ratio::new(whole * den + frac, den)
    } else {
        text.parse::<Epsilon>().map_err(|_| bad())?
    };
    if eps <= Ratio::from_integer(0) {
        return Err(bad());
    }
    Ok(eps)
}

/// `4⌈k/ε⌉` capped at [`ALPHA_CAP`]; the flag reports whether the cap bit.
pub fn thin_parameter(k: i64, eps: Epsilon) -> (usize, bool) {
    let wanted = 4 * (Ratio::from_integer(k) / eps).ceil().to_integer();
    let wanted = usize::try_from(wanted).unwrap_or(usize::MAX);
    (wanted.min(ALPHA_CAP), wanted > ALPHA_CAP)
}

/// One step of an iterative solver.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IterationRecord {
    pub component: Vec<LinkId>,
    pub component_cost: Cost,
    pub dropped: Vec<DirectedLink>,
    pub dropped_cost: Cost,
    /// Greedy only: `c(K) / c(dropped)` as `num/den`.
    pub ratio: Option<String>,
    /// Local search only: twice the potential before and after the step,
    /// and the lower bound `2c̄(Drop) − 3c(K)` on its decrease.
    pub potential2_before: Option<i128>,
    pub potential2_after: Option<i128>,
    pub promised_decrease2: Option<i128>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveReport {
    pub algorithm: String,
    pub solution: Vec<LinkId>,
    pub cost: Cost,
    pub epsilon: Option<String>,
    pub alpha: Option<usize>,
    pub alpha_capped: bool,
    pub initial_cost: Cost,
    pub iterations: usize,
    pub trace: Vec<IterationRecord>,
    pub warnings: Vec<String>,
}

fn ratio_text(r: &Ratio<i128>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn eps_text(eps: Epsilon) -> String {
    format!("{}/{}", eps.numer(), eps.denom())
}

fn cap_warning(alpha: usize, capped: bool) -> Vec<String> {
    if capped {
        vec![format!("thinness parameter capped at {alpha}; the approximation guarantee does not apply")]
    } else {
        Vec::new()
    }
}

fn sorted_origins(links: &[DirectedLink]) -> Vec<LinkId> {
    let mut ids: Vec<LinkId> = links.iter().map(|l| l.origin).collect();
    ids.sort_unstable();
    ids.dedup();
    ids
}

fn require_feasible(inst: &Instance) -> Result<()> {
    if is_feasible(inst) {
        Ok(())
    } else {
        Err(Error::Infeasible)
    }
}

/// The cheapest directed solution, made non-shortenable.
pub fn initial_directed_solution(inst: &Instance) -> Result<DirectedSolution> {
    require_feasible(inst)?;
    make_non_shortenable(inst, &min_cost_directed_solution(inst)?.links)
}

/// Origins of a non-shortenable cheapest directed solution.
pub fn two_approx(inst: &Instance) -> Result<SolveReport> {
    let f0 = initial_directed_solution(inst)?;
    let solution = sorted_origins(&f0.links);
    let cost = inst.cost_of(&solution);
    Ok(SolveReport {
        algorithm: "two-approx".into(),
        solution,
        cost,
        epsilon: None,
        alpha: None,
        alpha_capped: false,
        initial_cost: cost,
        iterations: 0,
        trace: Vec::new(),
        warnings: Vec::new(),
    })
}

/// Every cut is covered by `links` or entered by an active directed link.
fn mixed_feasible(inst: &Instance, links: &[LinkId], directed: &[DirectedLink]) -> bool {
    enumerate_cuts(inst)
        .into_iter()
        .all(|c| links.iter().any(|&i| inst.link(i).covers(c)) || directed.iter().any(|d| d.enters(c)))
}

/// Repeatedly buys a thin component of least cost per unit of dropped
/// directed cost, until the initial directed solution is used up.
pub fn relative_greedy(inst: &Instance, eps: Epsilon) -> Result<SolveReport> {
    if eps <= Ratio::from_integer(0) {
        return Err(Error::EpsilonOutOfRange(eps_text(eps)));
    }
    let (alpha, alpha_capped) = thin_parameter(2, eps);
    let f0 = initial_directed_solution(inst)?;
    let arb = Arborescence::build(inst, &f0)?;
    let initial_cost = f0.cost();
    let mut active: Vec<usize> = (0..arb.links().len()).collect();
    let mut chosen: Vec<LinkId> = Vec::new();
    let mut trace = Vec::new();
    while !active.is_empty() {
        if trace.len() >= inst.n() - 1 {
            return Err(Error::InvariantViolated("greedy exceeded n - 1 iterations".into()));
        }
        let found = find_min_ratio_component(inst, &arb, &active, alpha)?;
        let dropped: Vec<usize> =
            drop_set(inst, &arb, &found.links).into_iter().filter(|i| active.contains(i)).collect();
        if dropped.is_empty() {
            return Err(Error::InvariantViolated("greedy component drops nothing".into()));
        }
        if found.ratio > Ratio::from_integer(1) {
            return Err(Error::InvariantViolated(format!("greedy ratio {} exceeds 1", ratio_text(&found.ratio))));
        }
        active.retain(|i| !dropped.contains(i));
        chosen.extend(&found.links);
        chosen.sort_unstable();
        chosen.dedup();
        let remaining: Vec<DirectedLink> = active.iter().map(|&i| arb.links()[i]).collect();
        if !mixed_feasible(inst, &chosen, &remaining) {
            return Err(Error::InvariantViolated("greedy lost feasibility".into()));
        }
        let dropped_links: Vec<DirectedLink> = dropped.iter().map(|&i| arb.links()[i]).collect();
        trace.push(IterationRecord {
            component_cost: inst.cost_of(&found.links),
            component: found.links,
            dropped_cost: dropped_links.iter().map(|l| l.cost).sum(),
            dropped: dropped_links,
            ratio: Some(ratio_text(&found.ratio)),
            potential2_before: None,
            potential2_after: None,
            promised_decrease2: None,
        });
    }
    let cost = inst.cost_of(&chosen);
    Ok(SolveReport {
        algorithm: "greedy".into(),
        solution: chosen,
        cost,
        epsilon: Some(eps_text(eps)),
        alpha: Some(alpha),
        alpha_capped,
        initial_cost,
        iterations: trace.len(),
        trace,
        warnings: cap_warning(alpha, alpha_capped),
    })
}

/// A solution `F` with its witness sets. The witness set of `f` is the set
/// of directed links whose origin is `f`; `F` is exactly the set of origins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedState {
    directed: Vec<DirectedLink>,
}

impl MixedState {
    /// Both full shadows of every link of `links`, made non-shortenable.
    pub fn from_links(inst: &Instance, links: &[LinkId]) -> Result<Self> {
        let doubled: Vec<DirectedLink> = links.iter().flat_map(|&i| both_orientations(inst, i)).collect();
        let directed = make_non_shortenable(inst, &doubled)?.links;
        Ok(MixedState { directed })
    }

    pub fn links(&self) -> Vec<LinkId> {
        sorted_origins(&self.directed)
    }

    pub fn directed(&self) -> &[DirectedLink] {
        &self.directed
    }

    pub fn witnesses(&self, f: LinkId) -> Vec<DirectedLink> {
        self.directed.iter().copied().filter(|d| d.origin == f).collect()
    }

    pub fn cost(&self, inst: &Instance) -> Cost {
        inst.cost_of(&self.links())
    }

    /// Checks the witness discipline and that `F` is a solution.
    pub fn validate(&self, inst: &Instance) -> Result<()> {
        let report = verify_structure(inst, &self.directed);
        if !report.passed() {
            return Err(Error::InvariantViolated(format!(
                "witness links lost their structure: {:?}",
                report.violations
            )));
        }
        let mut rerun = make_non_shortenable(inst, &self.directed)?.links;
        let mut current = self.directed.clone();
        rerun.sort();
        current.sort();
        if rerun != current {
            return Err(Error::InvariantViolated("witness links are shortenable".into()));
        }
        for f in self.links() {
            let w = self.witnesses(f);
            if w.len() > 2
                || w.iter().any(|d| !shadows(inst.link(f)).iter().any(|s| s.head == d.head && s.tail == d.tail))
            {
                return Err(Error::InvariantViolated(format!("witness set of link {f} is malformed")));
            }
        }
        if !is_wrap_solution(inst, &self.links()) {
            return Err(Error::InvariantViolated("maintained links do not cover every cut".into()));
        }
        Ok(())
    }
}

fn both_orientations(inst: &Instance, id: LinkId) -> [DirectedLink; 2] {
    let l = inst.link(id);
    [DirectedLink::new(l.u, l.v, l), DirectedLink::new(l.v, l.u, l)]
}

/// Twice `c̄`: the owner's cost when it has two witnesses, double it otherwise.
pub fn cbar2(inst: &Instance, state: &MixedState, dl: &DirectedLink) -> Result<i128> {
    if !state.directed.contains(dl) {
        return Err(Error::InvalidArgument(format!("{dl} is not a witness link")));
    }
    let c = inst.link(dl.origin).cost as i128;
    Ok(if state.witnesses(dl.origin).len() == 2 { c } else { 2 * c })
}

/// Twice the potential: `3c(f)` per link with two witnesses, `2c(f)` per link
/// with one.
pub fn potential2(inst: &Instance, state: &MixedState) -> i128 {
    state
        .links()
        .into_iter()
        .map(|f| {
            let c = inst.link(f).cost as i128;
            if state.witnesses(f).len() == 2 {
                3 * c
            } else {
                2 * c
            }
        })
        .sum()
}

/// Applies one exchange: drop, add `K` with fresh witnesses, re-shorten.
fn apply_step(
    inst: &Instance,
    state: &MixedState,
    arb: &Arborescence,
    component: &[LinkId],
) -> Result<(MixedState, Vec<DirectedLink>)> {
    let dropped: Vec<DirectedLink> = drop_set(inst, arb, component).into_iter().map(|i| arb.links()[i]).collect();
    let mut next: Vec<DirectedLink> =
        state.directed.iter().copied().filter(|d| !dropped.contains(d) && !component.contains(&d.origin)).collect();
    next.extend(component.iter().flat_map(|&i| both_orientations(inst, i)));
    let directed = make_non_shortenable(inst, &next)?.links;
    Ok((MixedState { directed }, dropped))
}

/// Local search over witness-carrying solutions, starting from all links and
/// stopping once a step fails to shrink the potential by `1 − ε/(6n)`. A
/// potential of zero cannot shrink, so a step must also strictly decrease it.
pub fn local_search(inst: &Instance, eps: Epsilon) -> Result<SolveReport> {
    if eps <= Ratio::from_integer(0) || eps > Ratio::new(1, 2) {
        return Err(Error::EpsilonOutOfRange(eps_text(eps)));
    }
    require_feasible(inst)?;
    let (alpha, alpha_capped) = thin_parameter(4, eps);
    let mut state = MixedState::from_links(inst, &inst.all_ids())?;
    state.validate(inst)?;
    let initial_cost = state.cost(inst);
    let six_n = 6 * inst.n() as i128;
    let (a, b) = (*eps.numer() as i128, *eps.denom() as i128);
    let mut trace = Vec::new();
    loop {
        let arb = Arborescence::build(inst, &DirectedSolution::new(state.directed.clone()))?;
        let overlay = arb.links().iter().map(|d| cbar2(inst, &state, d)).collect::<Result<Vec<_>>>()?;
        let weights = DpWeights::new(inst, &arb, &overlay)?.scale_links(3);
        let best = find_best_drop_component(inst, &arb, &weights, alpha);
        let before = potential2(inst, &state);
        let (next, dropped) = apply_step(inst, &state, &arb, &best.links)?;
        let after = potential2(inst, &next);
        if after >= before || six_n * b * after > (six_n * b - a) * before {
            break;
        }
        next.validate(inst)?;
        if before - after < best.value {
            return Err(Error::InvariantViolated(format!(
                "potential fell by {} but the step promised {}",
                before - after,
                best.value
            )));
        }
        trace.push(IterationRecord {
            component_cost: inst.cost_of(&best.links),
            component: best.links,
            dropped_cost: dropped.iter().map(|d| d.cost).sum(),
            dropped,
            ratio: None,
            potential2_before: Some(before),
            potential2_after: Some(after),
            promised_decrease2: Some(best.value),
        });
        state = next;
    }
    let solution = state.links();
    let cost = inst.cost_of(&solution);
    Ok(SolveReport {
        algorithm: "local".into(),
        solution,
        cost,
        epsilon: Some(eps_text(eps)),
        alpha: Some(alpha),
        alpha_capped,
        initial_cost,
        iterations: trace.len(),
        trace,
        warnings: cap_warning(alpha, alpha_capped),
    })
}
