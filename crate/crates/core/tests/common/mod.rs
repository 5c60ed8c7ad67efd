//! Brute-force reference implementations and generators shared by the
//! integration tests. Each oracle works from first principles and shares no
//! code with the library beyond its data types.
#![allow(dead_code)]

use num_rational::Ratio;
use proptest::prelude::*;
use rand::Rng;
use ringforge::component_dp::{
    compatible, merge, pattern_objective, pattern_of, shared_boundary, u_set, DpWeights, Pattern,
};
use ringforge::decomposition::{is_festoon, Decomposition};
use ringforge::directed::{make_non_shortenable, Arborescence, DirectedLink, DirectedSolution};
use ringforge::dropcalc::drop_set;
use ringforge::generate::{random_directed_solution, random_instance_with};
use ringforge::model::{enumerate_cuts, is_feasible, Cost, Instance, LinkId, Vertex};
use ringforge::thinness::{crossing_count, is_alpha_thin};

/// All intervals `[lo, hi]` with `1 <= lo <= hi <= n-1`.
pub fn intervals(n: usize) -> Vec<(Vertex, Vertex)> {
    (1..n).flat_map(|lo| (lo..n).map(move |hi| (lo, hi))).collect()
}

fn inside(x: Vertex, (lo, hi): (Vertex, Vertex)) -> bool {
    lo <= x && x <= hi
}

pub fn link_crosses(inst: &Instance, id: LinkId, cut: (Vertex, Vertex)) -> bool {
    let l = inst.link(id);
    inside(l.u, cut) != inside(l.v, cut)
}

pub fn naive_is_solution(inst: &Instance, ids: &[LinkId]) -> bool {
    intervals(inst.n()).into_iter().all(|c| ids.iter().any(|&i| link_crosses(inst, i, c)))
}

pub fn subsets(m: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u64..1 << m).map(move |mask| (0..m).filter(|&i| mask >> i & 1 == 1).collect())
}

/// Cheapest solution cost by trying every subset.
pub fn naive_opt(inst: &Instance) -> Option<Cost> {
    subsets(inst.links().len()).filter(|s| naive_is_solution(inst, s)).map(|s| inst.cost_of(&s)).min()
}

/// Every directed link `(t, h)` obtained by orienting a link and moving its
/// tail towards its head.
pub fn naive_shadows(inst: &Instance) -> Vec<(Vertex, Vertex, LinkId, Cost)> {
    let mut out = Vec::new();
    for l in inst.links() {
        for t in l.u..l.v {
            out.push((t, l.v, l.id, l.cost));
        }
        for t in l.u + 1..=l.v {
            out.push((t, l.u, l.id, l.cost));
        }
    }
    out
}

/// Head inside the cut, tail outside.
pub fn naive_enters(t: Vertex, h: Vertex, cut: (Vertex, Vertex)) -> bool {
    inside(h, cut) && !inside(t, cut)
}

/// Cheapest set of shadows entering every cut, by subset enumeration.
pub fn naive_directed_opt(inst: &Instance) -> Option<Cost> {
    let pool = naive_shadows(inst);
    let cuts = intervals(inst.n());
    subsets(pool.len())
        .filter(|s| cuts.iter().all(|&c| s.iter().any(|&i| naive_enters(pool[i].0, pool[i].1, c))))
        .map(|s| s.iter().map(|&i| pool[i].3).sum())
        .min()
}

/// Whether `[lo, hi]` admits a laminar refinement down to singletons whose
/// members are all crossed by at most `alpha` links of `set`.
pub fn naive_thin_on(inst: &Instance, set: &[LinkId], alpha: usize, lo: Vertex, hi: Vertex) -> bool {
    let crossing = set.iter().filter(|&&i| link_crosses(inst, i, (lo, hi))).count();
    if crossing > alpha {
        return false;
    }
    lo == hi || (lo..hi).any(|m| naive_thin_on(inst, set, alpha, lo, m) && naive_thin_on(inst, set, alpha, m + 1, hi))
}

pub fn naive_is_thin(inst: &Instance, set: &[LinkId], alpha: usize) -> bool {
    naive_thin_on(inst, set, alpha, 1, inst.n() - 1)
}

/// Directed links whose removal keeps `(F ∖ {l}) ∪ K` a mixed solution.
pub fn removable_one_at_a_time(inst: &Instance, arb: &Arborescence, set: &[LinkId]) -> Vec<usize> {
    let links = arb.links();
    (0..links.len()).filter(|&i| mixed_solution(inst, links, &[i], set)).collect()
}

/// Every cut is entered by a directed link not in `removed` or crossed by a
/// link of `set`.
pub fn mixed_solution(inst: &Instance, links: &[DirectedLink], removed: &[usize], set: &[LinkId]) -> bool {
    intervals(inst.n()).into_iter().all(|c| {
        links.iter().enumerate().any(|(i, d)| !removed.contains(&i) && naive_enters(d.tail, d.head, c))
            || set.iter().any(|&k| link_crosses(inst, k, c))
    })
}

/// Seeded instance with `n` in `3..=max_n` and `m` in `n..=max_m`.
pub fn seeded_instance<R: Rng>(rng: &mut R, max_n: usize, max_m: usize, max_cost: Cost) -> Instance {
    let n = rng.gen_range(3..=max_n);
    let m = rng.gen_range(n..=max_m.max(n));
    random_instance_with(rng, n, m, max_cost).expect("random instances are feasible")
}

/// A random non-shortenable directed solution.
pub fn seeded_directed<R: Rng>(rng: &mut R, inst: &Instance) -> DirectedSolution {
    let keep = rng.gen_range(0.0..0.6);
    let raw = random_directed_solution(rng, inst, keep).expect("feasible instance");
    make_non_shortenable(inst, &raw).expect("a directed solution")
}

/// Feasible instances with `n` in `3..=max_n` and up to `max_m` links.
pub fn instances(max_n: usize, max_m: usize, max_cost: Cost) -> impl Strategy<Value = Instance> {
    (3..=max_n)
        .prop_flat_map(move |n| {
            let link = (0..n, 1..n, 0..=max_cost).prop_map(move |(u, d, c)| (u, (u + d) % n, c));
            (Just(n), prop::collection::vec(link, 1..=max_m))
        })
        .prop_filter_map("infeasible", |(n, links)| {
            let inst = Instance::new(n, links).ok()?;
            is_feasible(&inst).then_some(inst)
        })
}

/// Two patterns on neighbouring cuts `[lo, mid]` and `[mid+1, hi]`, realized
/// by sets that agree on the links joining the two sides.
pub struct CompatiblePair {
    pub left_set: Vec<LinkId>,
    pub right_set: Vec<LinkId>,
    pub left: Pattern,
    pub right: Pattern,
    pub shared: Vec<LinkId>,
}

pub fn random_compatible_pair<R: Rng>(rng: &mut R, inst: &Instance, arb: &Arborescence) -> CompatiblePair {
    let n = inst.n();
    let lo = rng.gen_range(1..n - 1);
    let hi = rng.gen_range(lo + 1..n);
    let mid = rng.gen_range(lo..hi);
    let (c1, c2) = ((lo, mid), (mid + 1, hi));
    let touches = |id: LinkId, c: (Vertex, Vertex)| inst.link(id).endpoints().iter().any(|&x| inside(x, c));
    let mut left_set = Vec::new();
    let mut right_set = Vec::new();
    let mut shared = Vec::new();
    for id in 0..inst.links().len() {
        let (a, b) = (touches(id, c1), touches(id, c2));
        if !rng.gen_bool(0.5) {
            continue;
        }
        match (a, b) {
            (true, true) => {
                left_set.push(id);
                right_set.push(id);
                shared.push(id);
            }
            (true, false) => left_set.push(id),
            (false, true) => right_set.push(id),
            (false, false) => {}
        }
    }
    let cut = |(lo, hi)| ringforge::model::Cut::new(lo, hi);
    let left = pattern_of(inst, arb, &left_set, cut(c1)).expect("every link touches its side");
    let right = pattern_of(inst, arb, &right_set, cut(c2)).expect("every link touches its side");
    CompatiblePair { left_set, right_set, left, right, shared }
}

/// The merger of a compatible pair equals the pattern of the union, and the
/// union's objective is the sum of both sides, plus the price of the shared
/// boundary, plus the weight of the heads in the merge's U-set.
pub fn check_pi_identity(
    inst: &Instance,
    arb: &Arborescence,
    w: &DpWeights,
    pair: &CompatiblePair,
) -> Result<(), String> {
    let alpha = usize::MAX;
    if !compatible(inst, &pair.left, &pair.right, alpha) {
        return Err("generated pair is not compatible".into());
    }
    let union_cut = ringforge::model::Cut::new(pair.left.cut.lo, pair.right.cut.hi);
    let mut union: Vec<LinkId> = pair.left_set.iter().chain(&pair.right_set).copied().collect();
    union.sort_unstable();
    union.dedup();
    let merged = merge(inst, arb, &pair.left, &pair.right, alpha).map_err(|e| e.to_string())?;
    if Some(&merged) != pattern_of(inst, arb, &union, union_cut).as_ref() {
        return Err(format!("merge {merged:?} differs from the pattern of the union"));
    }
    let overlap = shared_boundary(&pair.left, &pair.right);
    if overlap != pair.shared {
        return Err(format!("shared boundary {overlap:?} differs from {:?}", pair.shared));
    }
    let u = u_set(inst, arb, &pair.left, &pair.right, alpha).map_err(|e| e.to_string())?;
    let lhs = pattern_objective(inst, arb, w, &union, union_cut);
    let rhs = pattern_objective(inst, arb, w, &pair.left_set, pair.left.cut)
        + pattern_objective(inst, arb, w, &pair.right_set, pair.right.cut)
        + overlap.iter().map(|&i| w.link(i)).sum::<i128>()
        + u.iter().map(|&v| w.head(v)).sum::<i128>();
    if lhs != rhs {
        return Err(format!("objective of the union is {lhs}, the sum is {rhs}"));
    }
    Ok(())
}

/// Re-checks every guarantee of a decomposition without trusting its report.
pub fn check_decomposition(
    inst: &Instance,
    solution: &[LinkId],
    f0: &DirectedSolution,
    eps: Ratio<i64>,
    d: &Decomposition,
) -> Result<(), String> {
    let q = (eps.recip()).ceil().to_integer() as usize;
    let mut all: Vec<LinkId> = d.components.iter().flatten().copied().collect();
    all.sort_unstable();
    let mut expected = solution.to_vec();
    expected.sort_unstable();
    if all != expected {
        return Err("components do not partition the solution".into());
    }
    for k in &d.components {
        if !is_alpha_thin(inst, k, 4 * q) {
            return Err(format!("{k:?} is not {}-thin", 4 * q));
        }
    }
    let removed: i64 = d.removed.iter().map(|l| l.cost).sum();
    if removed * eps.denom() > eps.numer() * f0.cost() {
        return Err(format!("removed cost {removed} is above {eps} of {}", f0.cost()));
    }
    if !d.removed.iter().all(|r| f0.links.contains(r)) {
        return Err("removed links are not part of the directed solution".into());
    }
    let arb = Arborescence::build(inst, f0).map_err(|e| e.to_string())?;
    let dropped: Vec<DirectedLink> =
        d.components.iter().flat_map(|k| drop_set(inst, &arb, k)).map(|i| arb.links()[i]).collect();
    for l in &f0.links {
        if !d.removed.contains(l) && !dropped.contains(l) {
            return Err(format!("{l} is neither removed nor dropped"));
        }
    }
    check_festoons(inst, d)
}

/// Festoon conditions, the four-crossing bound on every cut, interval
/// laminarity and the branching property of the dependency graph.
pub fn check_festoons(inst: &Instance, d: &Decomposition) -> Result<(), String> {
    for f in &d.festoons {
        if !is_festoon(inst, &f.links) {
            return Err(format!("{:?} is not a festoon", f.links));
        }
        for cut in enumerate_cuts(inst) {
            if crossing_count(inst, &f.links, cut) > 4 {
                return Err(format!("{:?} crosses {cut:?} too often", f.links));
            }
        }
    }
    for (i, a) in d.festoons.iter().enumerate() {
        for b in &d.festoons[i + 1..] {
            let (x, y) = (a.interval, b.interval);
            let laminar = x.1 < y.0 || y.1 < x.0 || (x.0 <= y.0 && y.1 <= x.1) || (y.0 <= x.0 && x.1 <= y.1);
            if !laminar {
                return Err(format!("intervals {x:?} and {y:?} cross"));
            }
        }
    }
    let mut indegree = vec![0; d.festoons.len()];
    for a in &d.graph.arcs {
        indegree[a.to] += 1;
        if !d.festoons[a.to].strictly_within(&d.festoons[a.from]) {
            return Err(format!("arc {a:?} does not go to a smaller festoon"));
        }
    }
    if indegree.iter().any(|&k| k > 1) {
        return Err("dependency graph is not a branching".into());
    }
    Ok(())
}
