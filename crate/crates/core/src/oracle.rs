//! Brute-force ground truth: exhaustive enumeration over link subsets and
//! in-link choices, with cut coverage kept as bitmasks.

use std::time::{Duration, Instant};

use num_rational::Ratio;

use crate::component_dp::{BestComponent, DpWeights};
use crate::directed::{all_shadows, responsibilities, Arborescence, DirectedLink, DirectedSolution};
use crate::error::{Error, Result};
use crate::model::{cut_count, cut_index, enumerate_cuts, Cost, Instance, LinkId};
use crate::thinness::is_alpha_thin;

/// Environment variable overriding the budget, formatted `links[,n]`.
pub const BUDGET_ENV: &str = "RINGFORGE_BUDGET";

/// Limits on exhaustive enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_links: usize,
    pub max_n: usize,
    pub timeout: Option<Duration>,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_links: 16, max_n: 8, timeout: None }
    }
}

impl OracleBudget {
    /// Parses `links[,n]`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("budget `{text}` is not `links[,n]`"));
        let mut fields = text.split(',').map(|f| f.trim().parse::<usize>().map_err(|_| bad()));
        let mut budget = OracleBudget { max_links: fields.next().ok_or_else(bad)??, ..Default::default() };
        if let Some(n) = fields.next() {
            budget.max_n = n?;
        }
        if fields.next().is_some() {
            return Err(bad());
        }
        Ok(budget)
    }

    /// The default budget, overridden by the environment when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BUDGET_ENV) {
            Ok(text) => Self::parse(&text),
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = Some(timeout);
        self
    }

    fn admit(&self, inst: &Instance) -> Result<Clock> {
        if inst.links().len() > self.max_links.min(63) {
            return Err(Error::BudgetExceeded(format!("{} links, limit {}", inst.links().len(), self.max_links)));
        }
        if inst.n() > self.max_n || cut_count(inst.n()) > 128 {
            return Err(Error::BudgetExceeded(format!("{} vertices, limit {}", inst.n(), self.max_n)));
        }
        Ok(Clock { start: Instant::now(), timeout: self.timeout, ticks: 0 })
    }
}

struct Clock {
    start: Instant,
    timeout: Option<Duration>,
    ticks: u32,
}

impl Clock {
    fn tick(&mut self) -> Result<()> {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks.is_multiple_of(4096) {
            if let Some(t) = self.timeout {
                if self.start.elapsed() > t {
                    return Err(Error::BudgetExceeded(format!("timeout of {t:?}")));
                }
            }
        }
        Ok(())
    }
}

fn full_mask(inst: &Instance) -> u128 {
    let k = cut_count(inst.n());
    if k == 128 {
        u128::MAX
    } else {
        (1u128 << k) - 1
    }
}

fn link_masks(inst: &Instance) -> Vec<u128> {
    let cuts = enumerate_cuts(inst);
    inst.links()
        .iter()
        .map(|l| cuts.iter().enumerate().filter(|(_, c)| l.covers(**c)).fold(0, |m, (i, _)| m | 1 << i))
        .collect()
}

fn arc_mask(inst: &Instance, dl: &DirectedLink) -> u128 {
    dl.entered_cuts(inst.n()).iter().fold(0, |m, &c| m | 1 << cut_index(inst.n(), c))
}

fn ids_of(mask: u64) -> Vec<LinkId> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// A minimum-cost link set covering every cut, over all subsets in Gray-code
/// order; ties go to the lexicographically smaller set.
pub fn exact_opt(inst: &Instance, budget: &OracleBudget) -> Result<(Vec<LinkId>, Cost)> {
    let mut clock = budget.admit(inst)?;
    let m = inst.links().len();
    let masks = link_masks(inst);
    let cuts = cut_count(inst.n());
    let mut count = vec![0u32; cuts];
    let mut uncovered = cuts;
    let mut cost: Cost = 0;
    let mut set: u64 = 0;
    let mut best: Option<(Cost, Vec<LinkId>)> = None;
    for step in 0u64..1 << m {
        if step > 0 {
            let bit = step.trailing_zeros() as usize;
            set ^= 1 << bit;
            let adding = set >> bit & 1 == 1;
            cost += if adding { inst.link(bit).cost } else { -inst.link(bit).cost };
            for c in (0..cuts).filter(|&c| masks[bit] >> c & 1 == 1) {
                if adding {
                    count[c] += 1;
                    if count[c] == 1 {
                        uncovered -= 1;
                    }
                } else {
                    count[c] -= 1;
                    if count[c] == 0 {
                        uncovered += 1;
                    }
                }
            }
        }
        clock.tick()?;
        if uncovered == 0 && best.as_ref().is_none_or(|(c, _)| cost <= *c) {
            let ids = ids_of(set);
            if best.as_ref().is_none_or(|(c, b)| cost < *c || ids < *b) {
                best = Some((cost, ids));
            }
        }
    }
    best.map(|(c, ids)| (ids, c)).ok_or(Error::Infeasible)
}

/// A minimum-cost directed solution. Every non-root vertex takes exactly one
/// incoming shadow, the cheapest one per tail; branch and bound over these
/// choices.
pub fn exact_directed_opt(inst: &Instance, budget: &OracleBudget) -> Result<(DirectedSolution, Cost)> {
    let mut clock = budget.admit(inst)?;
    let n = inst.n();
    let mut options: Vec<Vec<(DirectedLink, u128)>> = vec![Vec::new(); n];
    for dl in all_shadows(inst) {
        if dl.head == 0 {
            continue;
        }
        let slot = &mut options[dl.head];
        match slot.iter_mut().find(|(d, _)| d.tail == dl.tail) {
            Some((d, _)) if (dl.cost, dl.origin) < (d.cost, d.origin) => *d = dl,
            Some(_) => {}
            None => slot.push((dl, 0)),
        }
    }
    for slot in &mut options {
        for (d, m) in slot.iter_mut() {
            *m = arc_mask(inst, d);
        }
        slot.sort_by_key(|(d, _)| (d.cost, d.tail));
    }
    if (1..n).any(|v| options[v].is_empty()) {
        return Err(Error::Infeasible);
    }
    let min_rest: Vec<Cost> = {
        let mut acc = vec![0; n + 1];
        for v in (1..n).rev() {
            acc[v] = acc[v + 1] + options[v][0].0.cost;
        }
        acc
    };
    struct Search<'a> {
        options: &'a [Vec<(DirectedLink, u128)>],
        min_rest: &'a [Cost],
        full: u128,
        chosen: Vec<DirectedLink>,
        best: Option<(Cost, Vec<DirectedLink>)>,
    }
    fn go(s: &mut Search, clock: &mut Clock, v: usize, cost: Cost, mask: u128) -> Result<()> {
        clock.tick()?;
        if let Some((b, _)) = &s.best {
            if cost + s.min_rest[v] >= *b {
                return Ok(());
            }
        }
        if v == s.options.len() {
            if mask == s.full {
                s.best = Some((cost, s.chosen.clone()));
            }
            return Ok(());
        }
        for k in 0..s.options[v].len() {
            let (d, m) = s.options[v][k];
            s.chosen.push(d);
            go(s, clock, v + 1, cost + d.cost, mask | m)?;
            s.chosen.pop();
        }
        Ok(())
    }
    let mut search =
        Search { options: &options, min_rest: &min_rest, full: full_mask(inst), chosen: Vec::new(), best: None };
    go(&mut search, &mut clock, 1, 0, 0)?;
    let (cost, links) = search.best.ok_or(Error::Infeasible)?;
    Ok((DirectedSolution::new(links), cost))
}

/// Per-link responsibility masks and per-link-id coverage masks.
struct DropTable {
    resp: Vec<u128>,
    cover: Vec<u128>,
}

impl DropTable {
    fn new(inst: &Instance, arb: &Arborescence) -> Self {
        let n = inst.n();
        let resp = responsibilities(inst, arb)
            .iter()
            .map(|cuts| cuts.iter().fold(0, |m, &c| m | 1 << cut_index(n, c)))
            .collect();
        DropTable { resp, cover: link_masks(inst) }
    }

    /// Indices of arborescence links whose responsibilities `set` covers.
    fn dropped(&self, set: u64) -> impl Iterator<Item = usize> + '_ {
        let covered = ids_of(set).into_iter().fold(0u128, |m, i| m | self.cover[i]);
        self.resp.iter().enumerate().filter(move |(_, &r)| r & !covered == 0).map(|(i, _)| i)
    }
}

/// Degree filter that rejects most non-thin sets before the interval check.
fn singleton_degrees_ok(inst: &Instance, set: u64, alpha: usize) -> bool {
    let mut deg = vec![0usize; inst.n()];
    for i in ids_of(set) {
        let l = inst.link(i);
        deg[l.u] += 1;
        deg[l.v] += 1;
    }
    deg[1..].iter().all(|&d| d <= alpha)
}

fn thin_subsets<'a>(inst: &'a Instance, alpha: usize, clock: &'a mut Clock) -> impl Iterator<Item = Result<u64>> + 'a {
    let m = inst.links().len();
    (0u64..1 << m).filter_map(move |set| {
        if let Err(e) = clock.tick() {
            return Some(Err(e));
        }
        (singleton_degrees_ok(inst, set, alpha) && is_alpha_thin(inst, &ids_of(set), alpha)).then_some(Ok(set))
    })
}

/// Maximum of `c̃(Drop(K)) − c(K)` over all α-thin `K`, with `Drop` taken
/// from the responsibility definition. Ties go to fewer links, then to the
/// lexicographically smaller set.
pub fn exact_best_component(
    inst: &Instance,
    arb: &Arborescence,
    weights: &DpWeights,
    alpha: usize,
    budget: &OracleBudget,
) -> Result<BestComponent> {
    let mut clock = budget.admit(inst)?;
    let table = DropTable::new(inst, arb);
    let mut best = BestComponent { links: Vec::new(), value: 0 };
    for set in thin_subsets(inst, alpha, &mut clock) {
        let set = set?;
        let ids = ids_of(set);
        let gain: i128 = table.dropped(set).map(|i| weights.head(arb.links()[i].head)).sum();
        let value = gain - ids.iter().map(|&i| weights.link(i)).sum::<i128>();
        let key = |v: i128, l: &Vec<LinkId>| (std::cmp::Reverse(v), l.len(), l.clone());
        if key(value, &ids) < key(best.value, &best.links) {
            best = BestComponent { links: ids, value };
        }
    }
    Ok(best)
}

/// Minimum of `c(K) / c(Drop(K) ∩ F⃗)` over all α-thin `K`, with `0/0 = 1`
/// and sets of positive cost that drop nothing excluded. `active` indexes
/// `F⃗` within `arb.links()`.
pub fn exact_min_ratio(
    inst: &Instance,
    arb: &Arborescence,
    active: &[usize],
    alpha: usize,
    budget: &OracleBudget,
) -> Result<Ratio<i128>> {
    let mut clock = budget.admit(inst)?;
    let table = DropTable::new(inst, arb);
    let mut best = Ratio::from_integer(1i128);
    for set in thin_subsets(inst, alpha, &mut clock) {
        let set = set?;
        let num = inst.cost_of(&ids_of(set)) as i128;
        let den: i128 = table.dropped(set).filter(|i| active.contains(i)).map(|i| arb.links()[i].cost as i128).sum();
        if den > 0 {
            best = best.min(Ratio::new(num, den));
        }
    }
    Ok(best)
}
