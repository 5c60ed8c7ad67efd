//! Executable decomposition of a solution into thin components: festoons,
//! tangledness, minimal connecting festoon chains, the dependency branching,
//! its labelling, and the resulting partition with every guarantee checked.

use std::collections::{BTreeSet, VecDeque};

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::directed::{make_non_shortenable, Arborescence, DirectedLink, DirectedSolution};
use crate::dropcalc::{components, drop_set, intersects};
use crate::error::{Error, Result};
use crate::model::{enumerate_cuts, is_wrap_solution, Cost, Instance, LinkId, Vertex};
use crate::solvers::Epsilon;
use crate::thinness::{crossing_count, is_alpha_thin};

/// Links forming a path in the intersection graph with left and right
/// endpoints both strictly increasing along `links`. `interval` runs from
/// the first link's left endpoint to the last link's right endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Festoon {
    pub links: Vec<LinkId>,
    pub interval: (Vertex, Vertex),
}

impl Festoon {
    pub fn size(&self) -> usize {
        self.interval.1 - self.interval.0 + 1
    }

    pub fn interval_contains(&self, x: Vertex) -> bool {
        self.interval.0 <= x && x <= self.interval.1
    }

    /// `I_self ⊆ I_other`.
    pub fn within(&self, other: &Festoon) -> bool {
        other.interval.0 <= self.interval.0 && self.interval.1 <= other.interval.1
    }

    /// `I_self ⊊ I_other`.
    pub fn strictly_within(&self, other: &Festoon) -> bool {
        self.within(other) && self.interval != other.interval
    }

    pub fn touches(&self, inst: &Instance, x: Vertex) -> bool {
        self.links.iter().any(|&i| inst.link(i).has_endpoint(x))
    }

    fn sorted_ids(&self) -> Vec<LinkId> {
        let mut ids = self.links.clone();
        ids.sort_unstable();
        ids
    }
}

/// Checks the festoon conditions for links in the given order.
pub fn is_festoon(inst: &Instance, ordered: &[LinkId]) -> bool {
    if ordered.is_empty() {
        return false;
    }
    let links: Vec<_> = ordered.iter().map(|&i| inst.link(i)).collect();
    links.windows(2).all(|w| w[0].left() < w[1].left() && w[0].right() < w[1].right())
        && (0..links.len()).all(|i| (i + 1..links.len()).all(|j| intersects(links[i], links[j]) == (j == i + 1)))
}

fn festoon_of(inst: &Instance, ordered: Vec<LinkId>) -> Festoon {
    let interval = (inst.link(ordered[0]).left(), inst.link(*ordered.last().unwrap()).right());
    Festoon { links: ordered, interval }
}

/// Every shortest path from `from` to `to` in a DAG given by adjacency lists.
fn all_shortest_paths(adj: &[Vec<usize>], from: usize, to: usize) -> Vec<Vec<usize>> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[from] = 0;
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    if dist[to] == usize::MAX {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut stack = vec![vec![from]];
    while let Some(path) = stack.pop() {
        let last = *path.last().unwrap();
        if last == to {
            out.push(path);
            continue;
        }
        for &y in &adj[last] {
            if dist[y] == dist[last] + 1 && dist[y] <= dist[to] {
                let mut next = path.clone();
                next.push(y);
                stack.push(next);
            }
        }
    }
    out
}

/// A festoon inside `pool` with the largest interval; ties go to the
/// lexicographically smallest sorted id list.
pub fn max_festoon(inst: &Instance, pool: &[LinkId]) -> Result<Festoon> {
    if pool.is_empty() {
        return Err(Error::InvalidArgument("no links to build a festoon from".into()));
    }
    let links: Vec<_> = pool.iter().map(|&i| inst.link(i)).collect();
    let adj: Vec<Vec<usize>> = (0..links.len())
        .map(|a| {
            (0..links.len())
                .filter(|&b| {
                    intersects(links[a], links[b])
                        && links[a].left() < links[b].left()
                        && links[a].right() < links[b].right()
                })
                .collect()
        })
        .collect();
    let mut best: Option<Festoon> = None;
    for a in 0..links.len() {
        for b in 0..links.len() {
            if links[b].right() < links[a].left() {
                continue;
            }
            let size = links[b].right() - links[a].left() + 1;
            if best.as_ref().is_some_and(|f| f.size() > size) {
                continue;
            }
            for path in all_shortest_paths(&adj, a, b) {
                let cand = festoon_of(inst, path.iter().map(|&k| pool[k]).collect());
                let better = match &best {
                    None => true,
                    Some(f) => {
                        cand.size() > f.size() || (cand.size() == f.size() && cand.sorted_ids() < f.sorted_ids())
                    }
                };
                if better {
                    best = Some(cand);
                }
            }
        }
    }
    let best = best.expect("a single link is a festoon");
    debug_assert!(is_festoon(inst, &best.links));
    Ok(best)
}

/// Repeatedly removes a maximum festoon until `set` is exhausted.
pub fn partition_into_festoons(inst: &Instance, set: &[LinkId]) -> Result<Vec<Festoon>> {
    let mut rest: Vec<LinkId> = set.to_vec();
    rest.sort_unstable();
    rest.dedup();
    let mut out = Vec::new();
    while !rest.is_empty() {
        let f = max_festoon(inst, &rest)?;
        rest.retain(|i| !f.links.contains(i));
        out.push(f);
    }
    Ok(out)
}

/// Some link of `x` intersects some link of `y`.
pub fn tangled(inst: &Instance, x: &Festoon, y: &Festoon) -> bool {
    x.links.iter().any(|&a| y.links.iter().any(|&b| intersects(inst.link(a), inst.link(b))))
}

/// For `I_x ⊆ I_y`: does `y` have an endpoint inside `I_x`?
pub fn tangled_by_interval(inst: &Instance, x: &Festoon, y: &Festoon) -> bool {
    y.links.iter().any(|&b| inst.link(b).endpoints().iter().any(|&e| x.interval_contains(e)))
}

fn laminar(a: (Vertex, Vertex), b: (Vertex, Vertex)) -> bool {
    a.1 < b.0 || b.1 < a.0 || (a.0 <= b.0 && b.1 <= a.1) || (b.0 <= a.0 && a.1 <= b.1)
}

/// Minimal festoon chain connecting `v` to a vertex outside its subtree,
/// with the smallest possible top festoon, then fewest festoons, then the
/// lexicographically smallest index sequence. Returned bottom to top.
pub fn minimal_connecting_set(
    inst: &Instance,
    festoons: &[Festoon],
    arb: &Arborescence,
    v: Vertex,
) -> Result<Vec<usize>> {
    let k = festoons.len();
    let good = |x: Vertex| !arb.is_descendant(x, v);
    let touches_good: Vec<bool> =
        festoons.iter().map(|f| f.links.iter().any(|&i| inst.link(i).endpoints().into_iter().any(good))).collect();
    let touches_v: Vec<bool> = festoons.iter().map(|f| f.touches(inst, v)).collect();
    let tangle: Vec<Vec<bool>> =
        (0..k).map(|a| (0..k).map(|b| a != b && tangled(inst, &festoons[a], &festoons[b])).collect()).collect();
    let mut targets: Vec<usize> = (0..k).filter(|&t| touches_good[t]).collect();
    targets.sort_by_key(|&t| (festoons[t].size(), t));
    for t in targets {
        if touches_v[t] {
            return Ok(vec![t]);
        }
        // Walk down from the top through festoons touching neither v nor a
        // good vertex until one touches v.
        let mut dist = vec![usize::MAX; k];
        dist[t] = 0;
        let mut queue = VecDeque::from([t]);
        let mut reach = usize::MAX;
        while let Some(x) = queue.pop_front() {
            if dist[x] >= reach || (x != t && touches_v[x]) {
                continue;
            }
            for y in 0..k {
                if tangle[x][y] && dist[y] == usize::MAX && !touches_good[y] {
                    dist[y] = dist[x] + 1;
                    if touches_v[y] {
                        reach = reach.min(dist[y]);
                    }
                    queue.push_back(y);
                }
            }
        }
        if reach == usize::MAX {
            continue;
        }
        let mut best: Option<Vec<usize>> = None;
        let mut stack = vec![vec![t]];
        while let Some(path) = stack.pop() {
            let last = *path.last().unwrap();
            if path.len() - 1 == reach {
                if touches_v[last] {
                    let mut chain = path.clone();
                    chain.reverse();
                    if best.as_ref().is_none_or(|b| chain < *b) {
                        best = Some(chain);
                    }
                }
                continue;
            }
            if last != t && touches_v[last] {
                continue;
            }
            for y in 0..k {
                if tangle[last][y] && dist[y] == dist[last] + 1 && !touches_good[y] {
                    let mut next = path.clone();
                    next.push(y);
                    stack.push(next);
                }
            }
        }
        if let Some(chain) = best {
            return Ok(chain);
        }
    }
    Err(Error::Decomposition(format!("no festoons connect vertex {v} to a vertex outside its subtree")))
}

/// `links` of the chosen festoons connect `v` to a vertex outside its subtree.
fn chain_connects(inst: &Instance, festoons: &[Festoon], members: &[usize], arb: &Arborescence, v: Vertex) -> bool {
    let links: Vec<LinkId> = members.iter().flat_map(|&i| festoons[i].links.iter().copied()).collect();
    components(inst, &links).iter().any(|comp| {
        let ends: Vec<Vertex> = comp.iter().flat_map(|&i| inst.link(i).endpoints()).collect();
        ends.contains(&v) && ends.iter().any(|&x| !arb.is_descendant(x, v))
    })
}

/// Arc from festoon `from` to the strictly smaller festoon `to`, contributed
/// by the chain of vertex `owner`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DependencyArc {
    pub from: usize,
    pub to: usize,
    pub owner: Vertex,
    pub label: usize,
}

/// The branching over festoons built from the chains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DependencyGraph {
    pub nodes: usize,
    pub arcs: Vec<DependencyArc>,
}

impl DependencyGraph {
    /// Arcs of consecutive chain members, top to bottom, tagged by owner.
    pub fn build(nodes: usize, chains: &[(Vertex, Vec<usize>)]) -> Result<Self> {
        let mut arcs = Vec::new();
        let mut incoming = vec![None; nodes];
        for (owner, chain) in chains {
            for w in chain.windows(2) {
                let (to, from) = (w[0], w[1]);
                if let Some(prev) = incoming[to] {
                    return Err(Error::Decomposition(format!(
                        "festoon {to} has incoming arcs from chains of {prev} and {owner}"
                    )));
                }
                incoming[to] = Some(*owner);
                arcs.push(DependencyArc { from, to, owner: *owner, label: 0 });
            }
        }
        Ok(DependencyGraph { nodes, arcs })
    }

    pub fn incoming(&self, node: usize) -> Option<&DependencyArc> {
        self.arcs.iter().find(|a| a.to == node)
    }

    /// Labels arcs top-down: 1 at sources, inherited along an owner's chain
    /// and incremented when the owner changes.
    fn assign_labels(&mut self, festoons: &[Festoon]) {
        let mut order: Vec<usize> = (0..self.arcs.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(festoons[self.arcs[i].from].size()));
        for i in order {
            let a = self.arcs[i];
            self.arcs[i].label = match self.incoming(a.from) {
                None => 1,
                Some(above) if above.owner == a.owner => above.label,
                Some(above) => above.label + 1,
            };
        }
    }

    fn ancestors(&self, mut node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while let Some(a) = self.incoming(node) {
            node = a.from;
            out.push(node);
        }
        out
    }
}

/// Name and outcome of one verified guarantee.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub festoons: Vec<Festoon>,
    /// `chains[v]`: the festoon chain for vertex `v`, bottom to top.
    pub chains: Vec<Option<Vec<usize>>>,
    pub graph: DependencyGraph,
    pub classes: usize,
    pub class_costs: Vec<Cost>,
    pub removed_class: usize,
    pub removed: Vec<DirectedLink>,
    pub removed_cost: Cost,
    pub directed_cost: Cost,
    pub kept_vertices: Vec<Vertex>,
    pub components: Vec<Vec<LinkId>>,
    pub component_festoons: Vec<Vec<usize>>,
    pub thinness: usize,
    pub checks: Vec<Check>,
}

fn fail(what: impl Into<String>) -> Error {
    Error::Decomposition(what.into())
}

/// Splits `solution` into `4⌈1/ε⌉`-thin components and picks a set of
/// directed links of cost at most `ε·c(F⃗)` such that every other link of
/// `directed` is dropped by some component. All guarantees are checked.
pub fn decompose(
    inst: &Instance,
    solution: &[LinkId],
    directed: &DirectedSolution,
    eps: Epsilon,
) -> Result<Decomposition> {
    if eps <= Epsilon::from_integer(0) {
        return Err(Error::EpsilonOutOfRange(format!("{eps}")));
    }
    inst.check_ids(solution)?;
    if !is_wrap_solution(inst, solution) {
        return Err(Error::Infeasible);
    }
    let arb = Arborescence::build(inst, directed)?;
    let mut given = directed.links.clone();
    let mut shortened = make_non_shortenable(inst, &directed.links)?.links;
    given.sort();
    shortened.sort();
    if given != shortened {
        return Err(Error::InvalidArgument("the directed solution is shortenable".into()));
    }
    let n = inst.n();
    let mut checks = Vec::new();

    let festoons = partition_into_festoons(inst, solution)?;
    for f in &festoons {
        if !is_festoon(inst, &f.links) {
            return Err(fail(format!("{:?} is not a festoon", f.links)));
        }
        for cut in enumerate_cuts(inst) {
            if crossing_count(inst, &f.links, cut) > 4 {
                return Err(fail(format!("festoon {:?} crosses {cut:?} more than four times", f.links)));
            }
        }
    }
    checks.push(Check {
        name: "festoon-cut-bound",
        detail: format!("{} festoons cross every cut at most 4 times", festoons.len()),
    });
    for (i, a) in festoons.iter().enumerate() {
        for b in &festoons[i + 1..] {
            if !laminar(a.interval, b.interval) {
                return Err(fail(format!("festoon intervals {:?} and {:?} cross", a.interval, b.interval)));
            }
            let (lo, hi) = if a.within(b) { (a, b) } else { (b, a) };
            if lo.within(hi) && tangled(inst, lo, hi) != tangled_by_interval(inst, lo, hi) {
                return Err(fail(format!("tangledness characterisations disagree on {:?}, {:?}", lo.links, hi.links)));
            }
        }
    }
    checks.push(Check { name: "festoon-laminarity", detail: "festoon intervals form a laminar family".into() });

    let mut chains: Vec<Option<Vec<usize>>> = vec![None; n];
    let mut tagged = Vec::new();
    #[allow(clippy::needless_range_loop)]
    for v in 1..n {
        let chain = minimal_connecting_set(inst, &festoons, &arb, v)?;
        for w in chain.windows(2) {
            if !festoons[w[0]].strictly_within(&festoons[w[1]]) {
                return Err(fail(format!("chain of {v} is not strictly nested")));
            }
        }
        for i in 0..chain.len() {
            for j in i + 1..chain.len() {
                if tangled(inst, &festoons[chain[i]], &festoons[chain[j]]) != (j == i + 1) {
                    return Err(fail(format!("chain of {v} has tangled non-neighbours")));
                }
            }
        }
        if !chain_connects(inst, &festoons, &chain, &arb, v) {
            return Err(fail(format!("chain of {v} does not connect it to a good vertex")));
        }
        for skip in 0..chain.len() {
            let rest: Vec<usize> = chain.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &x)| x).collect();
            if !rest.is_empty() && chain_connects(inst, &festoons, &rest, &arb, v) {
                return Err(fail(format!("chain of {v} is not minimal")));
            }
        }
        tagged.push((v, chain.clone()));
        chains[v] = Some(chain);
    }
    checks.push(Check {
        name: "minimal-chains",
        detail: format!("{} chains are nested, minimal and consecutive", n - 1),
    });

    let mut graph = DependencyGraph::build(festoons.len(), &tagged)?;
    graph.assign_labels(&festoons);
    checks.push(Check {
        name: "branching",
        detail: format!("{} arcs, every festoon has in-degree at most 1", graph.arcs.len()),
    });

    let q = eps.recip().ceil().to_integer();
    let q = usize::try_from(q).map_err(|_| Error::EpsilonOutOfRange(format!("{eps}")))?;
    let chain_label = |v: Vertex| graph.arcs.iter().find(|a| a.owner == v).map(|a| a.label);
    for v in 1..n {
        if graph.arcs.iter().any(|a| a.owner == v && Some(a.label) != chain_label(v)) {
            return Err(fail(format!("arcs of the chain of {v} carry different labels")));
        }
    }
    let in_cost = |v: Vertex| arb.links()[arb.in_link(v).unwrap()].cost;
    let mut class_costs = vec![0 as Cost; q];
    for v in 1..n {
        if let Some(l) = chain_label(v) {
            class_costs[l % q] += in_cost(v);
        }
    }
    let removed_class = (0..q).min_by_key(|&i| (class_costs[i], i)).unwrap();
    let removed_vertices: Vec<Vertex> =
        (1..n).filter(|&v| chain_label(v).is_some_and(|l| l % q == removed_class)).collect();
    let removed: Vec<DirectedLink> = removed_vertices.iter().map(|&v| arb.links()[arb.in_link(v).unwrap()]).collect();
    let removed_cost: Cost = removed.iter().map(|d| d.cost).sum();
    let directed_cost = directed.cost();
    if (removed_cost as i128) * (*eps.denom() as i128) > (*eps.numer() as i128) * (directed_cost as i128) {
        return Err(fail(format!("removed cost {removed_cost} exceeds {eps} of {directed_cost}")));
    }
    checks.push(Check { name: "removed-cost", detail: format!("c(R) = {removed_cost} <= {eps} * {directed_cost}") });

    let kept_vertices: Vec<Vertex> = (1..n).filter(|v| !removed_vertices.contains(v)).collect();
    let kept_arcs: Vec<DependencyArc> =
        graph.arcs.iter().copied().filter(|a| kept_vertices.contains(&a.owner)).collect();
    let kept = DependencyGraph { nodes: festoons.len(), arcs: kept_arcs };
    let mut uf = UnionFind::new(festoons.len());
    for a in &kept.arcs {
        uf.union(a.from, a.to);
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of = vec![usize::MAX; festoons.len()];
    for x in 0..festoons.len() {
        let root = uf.find(x);
        if group_of[root] == usize::MAX {
            group_of[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[group_of[root]].push(x);
    }
    let component_links: Vec<Vec<LinkId>> = groups
        .iter()
        .map(|g| {
            let mut ids: Vec<LinkId> = g.iter().flat_map(|&x| festoons[x].links.iter().copied()).collect();
            ids.sort_unstable();
            ids
        })
        .collect();

    for g in &groups {
        for &x in g {
            for &y in g {
                if x < y && tangled(inst, &festoons[x], &festoons[y]) {
                    let related = kept.ancestors(x).contains(&y) || kept.ancestors(y).contains(&x);
                    if !related {
                        return Err(fail(format!("tangled festoons {x} and {y} share a component without ancestry")));
                    }
                }
            }
        }
    }
    checks.push(Check { name: "ancestry", detail: "tangled festoons in a component are related".into() });

    let thinness = 4 * q;
    for (g, links) in groups.iter().zip(&component_links) {
        if !is_alpha_thin(inst, links, thinness) {
            return Err(fail(format!("component {links:?} is not {thinness}-thin")));
        }
        let owners = g
            .iter()
            .map(|&x| {
                let mut seen = BTreeSet::new();
                let mut node = x;
                while let Some(a) = kept.incoming(node) {
                    seen.insert(a.owner);
                    node = a.from;
                }
                seen.len()
            })
            .max()
            .unwrap_or(0);
        if !is_alpha_thin(inst, links, 4 * (owners + 1)) {
            return Err(fail(format!(
                "component {links:?} is not {}-thin despite {owners} owners per path",
                4 * (owners + 1)
            )));
        }
    }
    checks.push(Check { name: "thinness", detail: format!("{} components are {thinness}-thin", groups.len()) });

    let mut covered = vec![false; arb.links().len()];
    for links in &component_links {
        for i in drop_set(inst, &arb, links) {
            covered[i] = true;
        }
    }
    for &v in &kept_vertices {
        let i = arb.in_link(v).unwrap();
        if !covered[i] {
            return Err(fail(format!("{} is kept but no component drops it", arb.links()[i])));
        }
    }
    checks
        .push(Check { name: "drop-cover", detail: format!("{} kept directed links are dropped", kept_vertices.len()) });

    graph.arcs.sort_by_key(|a| (a.owner, std::cmp::Reverse(festoons[a.from].size())));
    Ok(Decomposition {
        festoons,
        chains,
        graph,
        classes: q,
        class_costs,
        removed_class,
        removed,
        removed_cost,
        directed_cost,
        kept_vertices,
        components: component_links,
        component_festoons: groups,
        thinness,
        checks,
    })
}
