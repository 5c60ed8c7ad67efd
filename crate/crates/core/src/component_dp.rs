//! Maximising `c̃(Drop(K)) − c(K)` over α-thin link sets with a dynamic
//! program over interval patterns, and minimising the cost-to-drop ratio by
//! binary search over that maximisation.

use std::collections::HashMap;

use num_rational::Ratio;
use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::directed::Arborescence;
use crate::dropcalc::{components, drop_set, endpoints, intersects};
use crate::error::{Error, Result};
use crate::model::{Cut, Instance, LinkId, Vertex};

/// One connected component of a partial solution, seen from its cut: the
/// component's links on the boundary, the lca of all its endpoints, and
/// whether that lca is itself an endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Part {
    pub links: Vec<LinkId>,
    pub lca: Vertex,
    pub lca_is_endpoint: bool,
}

/// Boundary summary of a partial solution on `cut`. Components without a
/// boundary link are finished and leave no trace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Pattern {
    pub cut: Cut,
    pub boundary: Vec<LinkId>,
    pub parts: Vec<Part>,
}

impl Pattern {
    pub fn empty(cut: Cut) -> Self {
        Pattern { cut, boundary: Vec::new(), parts: Vec::new() }
    }
}

/// Best value found for a pattern together with a set attaining it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DpEntry {
    pub value: i128,
    pub realizer: Vec<LinkId>,
}

/// Objective weights: `head[v]` is the overlay cost of the link entering `v`
/// and `link[id]` the price charged for using a link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpWeights {
    head: Vec<i128>,
    link: Vec<i128>,
}

impl DpWeights {
    /// `overlay[i]` prices `arb.links()[i]`; link prices are the instance costs.
    pub fn new(inst: &Instance, arb: &Arborescence, overlay: &[i128]) -> Result<Self> {
        if overlay.len() != arb.links().len() {
            return Err(Error::InvalidArgument(format!(
                "overlay has {} entries for {} directed links",
                overlay.len(),
                arb.links().len()
            )));
        }
        if overlay.iter().any(|&x| x < 0) {
            return Err(Error::InvalidArgument("overlay costs must be non-negative".into()));
        }
        let head = (0..inst.n()).map(|v| arb.in_link(v).map_or(0, |i| overlay[i])).collect();
        let link = inst.links().iter().map(|l| l.cost as i128).collect();
        Ok(DpWeights { head, link })
    }

    /// Multiplies every link price by `factor`.
    pub fn scale_links(mut self, factor: i128) -> Self {
        for c in &mut self.link {
            *c *= factor;
        }
        self
    }

    pub fn head(&self, v: Vertex) -> i128 {
        self.head[v]
    }

    pub fn link(&self, id: LinkId) -> i128 {
        self.link[id]
    }

    fn links_cost(&self, set: &[LinkId]) -> i128 {
        set.iter().map(|&i| self.link[i]).sum()
    }
}

fn has_endpoint_in(inst: &Instance, id: LinkId, cut: Cut) -> bool {
    let l = inst.link(id);
    cut.contains(l.u) || cut.contains(l.v)
}

/// Overlay weight of links in `Drop(set)` whose head lies in `cut`, minus the
/// price of `set`.
pub fn pattern_objective(inst: &Instance, arb: &Arborescence, w: &DpWeights, set: &[LinkId], cut: Cut) -> i128 {
    let gain: i128 = drop_set(inst, arb, set)
        .into_iter()
        .map(|i| arb.links()[i].head)
        .filter(|&h| cut.contains(h))
        .map(|h| w.head(h))
        .sum();
    gain - w.links_cost(set)
}

/// The pattern `set` realizes on `cut`, or `None` if a link of `set` has no
/// endpoint in `cut`.
pub fn pattern_of(inst: &Instance, arb: &Arborescence, set: &[LinkId], cut: Cut) -> Option<Pattern> {
    if !set.iter().all(|&i| has_endpoint_in(inst, i, cut)) {
        return None;
    }
    let crosses = |i: &LinkId| inst.link(*i).covers(cut);
    let mut boundary: Vec<LinkId> = set.iter().copied().filter(crosses).collect();
    boundary.sort_unstable();
    let mut parts: Vec<Part> = components(inst, set)
        .into_iter()
        .filter_map(|comp| {
            let links: Vec<LinkId> = comp.iter().copied().filter(crosses).collect();
            if links.is_empty() {
                return None;
            }
            let vs = endpoints(inst, &comp);
            let lca = arb.lca(&vs);
            Some(Part { links, lca, lca_is_endpoint: vs.contains(&lca) })
        })
        .collect();
    parts.sort();
    Some(Pattern { cut, boundary, parts })
}

pub fn realizes(inst: &Instance, arb: &Arborescence, set: &[LinkId], pattern: &Pattern) -> bool {
    pattern_of(inst, arb, set, pattern.cut).as_ref() == Some(pattern)
}

/// Orders two patterns left to right if their cuts are neighbours.
fn ordered<'a>(q1: &'a Pattern, q2: &'a Pattern) -> Option<(&'a Pattern, &'a Pattern)> {
    if q1.cut.hi + 1 == q2.cut.lo {
        Some((q1, q2))
    } else if q2.cut.hi + 1 == q1.cut.lo {
        Some((q2, q1))
    } else {
        None
    }
}

fn boundary_into(inst: &Instance, boundary: &[LinkId], cut: Cut) -> Vec<LinkId> {
    boundary.iter().copied().filter(|&i| has_endpoint_in(inst, i, cut)).collect()
}

fn union_cut(a: &Pattern, b: &Pattern) -> Cut {
    Cut::new(a.cut.lo, b.cut.hi)
}

fn merged_boundary(inst: &Instance, a: &Pattern, b: &Pattern) -> Vec<LinkId> {
    let cut = union_cut(a, b);
    let mut out: Vec<LinkId> =
        a.boundary.iter().chain(&b.boundary).copied().filter(|&i| inst.link(i).covers(cut)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub fn compatible(inst: &Instance, q1: &Pattern, q2: &Pattern, alpha: usize) -> bool {
    let Some((a, b)) = ordered(q1, q2) else {
        return false;
    };
    boundary_into(inst, &a.boundary, b.cut) == boundary_into(inst, &b.boundary, a.cut)
        && merged_boundary(inst, a, b).len() <= alpha
}

/// Merger of two compatible patterns plus the vertices that stop being a
/// component's lca.
fn merge_with_u(inst: &Instance, arb: &Arborescence, a: &Pattern, b: &Pattern) -> (Pattern, Vec<Vertex>) {
    let cut = union_cut(a, b);
    let all: Vec<(&Part, Cut)> = a.parts.iter().map(|p| (p, a.cut)).chain(b.parts.iter().map(|p| (p, b.cut))).collect();
    let mut uf = UnionFind::new(all.len());
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            let touching = all[i]
                .0
                .links
                .iter()
                .any(|&x| all[j].0.links.iter().any(|&y| x == y || intersects(inst.link(x), inst.link(y))));
            if touching {
                uf.union(i, j);
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..all.len() {
        groups.entry(uf.find(i)).or_default().push(i);
    }
    let mut parts = Vec::new();
    let mut tops = Vec::new();
    for members in groups.values() {
        let lcas: Vec<Vertex> = members.iter().map(|&i| all[i].0.lca).collect();
        let top = arb.lca(&lcas);
        tops.push(top);
        let lca_is_endpoint = members.iter().any(|&i| all[i].0.lca == top && all[i].0.lca_is_endpoint);
        let mut links: Vec<LinkId> = members
            .iter()
            .flat_map(|&i| all[i].0.links.iter().copied())
            .filter(|&x| inst.link(x).covers(cut))
            .collect();
        links.sort_unstable();
        links.dedup();
        if !links.is_empty() {
            parts.push(Part { links, lca: top, lca_is_endpoint });
        }
    }
    parts.sort();
    let mut u: Vec<Vertex> = all
        .iter()
        .filter(|(p, c)| p.lca_is_endpoint && c.contains(p.lca) && !tops.contains(&p.lca))
        .map(|(p, _)| p.lca)
        .collect();
    u.sort_unstable();
    u.dedup();
    let boundary = merged_boundary(inst, a, b);
    (Pattern { cut, boundary, parts }, u)
}

pub fn merge(inst: &Instance, arb: &Arborescence, q1: &Pattern, q2: &Pattern, alpha: usize) -> Result<Pattern> {
    if !compatible(inst, q1, q2, alpha) {
        return Err(Error::Incompatible);
    }
    let (a, b) = ordered(q1, q2).unwrap();
    Ok(merge_with_u(inst, arb, a, b).0)
}

/// Lcas of parts that sit inside their own cut and are endpoints, minus every
/// lca of the merged parts.
pub fn u_set(inst: &Instance, arb: &Arborescence, q1: &Pattern, q2: &Pattern, alpha: usize) -> Result<Vec<Vertex>> {
    if !compatible(inst, q1, q2, alpha) {
        return Err(Error::Incompatible);
    }
    let (a, b) = ordered(q1, q2).unwrap();
    Ok(merge_with_u(inst, arb, a, b).1)
}

/// Boundary overlap of two compatible patterns.
pub fn shared_boundary(q1: &Pattern, q2: &Pattern) -> Vec<LinkId> {
    q1.boundary.iter().copied().filter(|i| q2.boundary.contains(i)).collect()
}

/// Best entry per realizable pattern for every interval of non-root vertices.
#[derive(Debug, Clone)]
pub struct DpTable {
    cells: HashMap<Cut, HashMap<Pattern, DpEntry>>,
    full: Cut,
}

impl DpTable {
    pub fn cell(&self, cut: Cut) -> impl Iterator<Item = (&Pattern, &DpEntry)> {
        self.cells.get(&cut).into_iter().flat_map(|m| m.iter())
    }

    pub fn get(&self, pattern: &Pattern) -> Option<&DpEntry> {
        self.cells.get(&pattern.cut)?.get(pattern)
    }

    pub fn pattern_count(&self) -> usize {
        self.cells.values().map(HashMap::len).sum()
    }

    /// Highest value on the full interval; ties go to fewer links, then to
    /// the lexicographically smaller set.
    pub fn best(&self) -> DpEntry {
        self.cell(self.full)
            .map(|(_, e)| e)
            .min_by(|x, y| {
                y.value.cmp(&x.value).then(x.realizer.len().cmp(&y.realizer.len())).then(x.realizer.cmp(&y.realizer))
            })
            .cloned()
            .unwrap_or(DpEntry { value: 0, realizer: Vec::new() })
    }
}

fn better(new: &DpEntry, old: &DpEntry) -> bool {
    new.value > old.value || (new.value == old.value && new.realizer < old.realizer)
}

fn offer(cell: &mut HashMap<Pattern, DpEntry>, pattern: Pattern, entry: DpEntry) {
    match cell.get_mut(&pattern) {
        Some(old) if better(&entry, old) => *old = entry,
        Some(_) => {}
        None => {
            cell.insert(pattern, entry);
        }
    }
}

fn base_cell(inst: &Instance, arb: &Arborescence, w: &DpWeights, v: Vertex, alpha: usize) -> HashMap<Pattern, DpEntry> {
    let cut = Cut::singleton(v);
    let incident: Vec<LinkId> = inst.links().iter().filter(|l| l.has_endpoint(v)).map(|l| l.id).collect();
    let mut cell = HashMap::new();
    cell.insert(Pattern::empty(cut), DpEntry { value: 0, realizer: Vec::new() });
    let k = incident.len();
    let mut choose = Vec::new();
    subsets_up_to(k, alpha.min(k), 0, &mut choose, &mut |idx| {
        if idx.is_empty() {
            return;
        }
        let set: Vec<LinkId> = idx.iter().map(|&i| incident[i]).collect();
        let vs = endpoints(inst, &set);
        let lca = arb.lca(&vs);
        let gain = if lca != v { w.head(v) } else { 0 };
        let pattern = Pattern {
            cut,
            boundary: set.clone(),
            parts: vec![Part { links: set.clone(), lca, lca_is_endpoint: vs.contains(&lca) }],
        };
        let value = gain - w.links_cost(&set);
        offer(&mut cell, pattern, DpEntry { value, realizer: set });
    });
    cell
}

/// Calls `f` on every increasing index sequence of length at most `max`.
fn subsets_up_to(k: usize, max: usize, from: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    f(cur);
    if cur.len() == max {
        return;
    }
    for i in from..k {
        cur.push(i);
        subsets_up_to(k, max, i + 1, cur, f);
        cur.pop();
    }
}

fn union_sorted(a: &[LinkId], b: &[LinkId]) -> Vec<LinkId> {
    let mut out: Vec<LinkId> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Fills the pattern table bottom-up over interval length and split point.
pub fn dp_max_realizers(inst: &Instance, arb: &Arborescence, w: &DpWeights, alpha: usize) -> DpTable {
    let n = inst.n();
    let mut cells: HashMap<Cut, HashMap<Pattern, DpEntry>> = HashMap::new();
    for v in 1..n {
        cells.insert(Cut::singleton(v), base_cell(inst, arb, w, v, alpha));
    }
    for len in 2..n {
        for lo in 1..=n - len {
            let hi = lo + len - 1;
            let mut cell = HashMap::new();
            for m in lo..hi {
                let (left, right) = (Cut::new(lo, m), Cut::new(m + 1, hi));
                let mut by_key: HashMap<Vec<LinkId>, Vec<(&Pattern, &DpEntry)>> = HashMap::new();
                for (q, e) in &cells[&right] {
                    by_key.entry(boundary_into(inst, &q.boundary, left)).or_default().push((q, e));
                }
                for (q1, e1) in &cells[&left] {
                    let Some(matches) = by_key.get(&boundary_into(inst, &q1.boundary, right)) else {
                        continue;
                    };
                    for &(q2, e2) in matches {
                        if merged_boundary(inst, q1, q2).len() > alpha {
                            continue;
                        }
                        let (pattern, u) = merge_with_u(inst, arb, q1, q2);
                        let value = e1.value
                            + e2.value
                            + w.links_cost(&shared_boundary(q1, q2))
                            + u.iter().map(|&x| w.head(x)).sum::<i128>();
                        let realizer = union_sorted(&e1.realizer, &e2.realizer);
                        offer(&mut cell, pattern, DpEntry { value, realizer });
                    }
                }
            }
            cells.insert(Cut::new(lo, hi), cell);
        }
    }
    DpTable { cells, full: inst.full_cut() }
}

/// A maximiser of `c̃(Drop(K)) − c(K)` over α-thin sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BestComponent {
    pub links: Vec<LinkId>,
    pub value: i128,
}

pub fn find_best_drop_component(inst: &Instance, arb: &Arborescence, w: &DpWeights, alpha: usize) -> BestComponent {
    let best = dp_max_realizers(inst, arb, w, alpha).best();
    BestComponent { links: best.realizer, value: best.value }
}

/// `c(K) / c(Drop(K) ∩ F⃗)` with `0/0 = 1`; `None` stands for `x/0`, x > 0.
pub fn component_ratio(inst: &Instance, arb: &Arborescence, active: &[usize], set: &[LinkId]) -> Option<Ratio<i128>> {
    let num = inst.cost_of(set) as i128;
    let den: i128 =
        drop_set(inst, arb, set).into_iter().filter(|i| active.contains(i)).map(|i| arb.links()[i].cost as i128).sum();
    match (num, den) {
        (0, 0) => Some(Ratio::from_integer(1)),
        (_, 0) => None,
        _ => Some(Ratio::new(num, den)),
    }
}

/// Result of the ratio search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioComponent {
    pub links: Vec<LinkId>,
    pub ratio: Ratio<i128>,
}

/// Minimises `c(K) / c(Drop(K) ∩ F⃗)` over α-thin `K`, where `active` holds
/// the indices of `F⃗` within `arb.links()`. For nonempty `F⃗` the returned
/// set drops at least one active link.
pub fn find_min_ratio_component(
    inst: &Instance,
    arb: &Arborescence,
    active: &[usize],
    alpha: usize,
) -> Result<RatioComponent> {
    if alpha == 0 {
        return Err(Error::InvalidArgument("alpha must be at least 1".into()));
    }
    if let Some(&bad) = active.iter().find(|&&i| i >= arb.links().len()) {
        return Err(Error::InvalidArgument(format!("directed link index {bad} out of range")));
    }
    if active.is_empty() {
        return Ok(RatioComponent { links: Vec::new(), ratio: Ratio::from_integer(1) });
    }
    let total: i128 = active.iter().map(|&i| arb.links()[i].cost as i128).sum();
    let fallback = || {
        let pick = active.iter().copied().find(|&i| (total == 0) == (arb.links()[i].cost == 0)).unwrap_or(active[0]);
        vec![arb.links()[pick].origin]
    };
    let mut found: Option<Vec<LinkId>> = None;
    if total > 0 {
        let precision = Ratio::new(1, total * total);
        let (mut lo, mut hi) = (Ratio::from_integer(0i128), Ratio::from_integer(1i128));
        while hi - lo >= precision {
            let mid = (lo + hi) / 2;
            let overlay: Vec<i128> = (0..arb.links().len())
                .map(|i| if active.contains(&i) { *mid.numer() * arb.links()[i].cost as i128 } else { 0 })
                .collect();
            let w = DpWeights::new(inst, arb, &overlay)?.scale_links(*mid.denom());
            let best = find_best_drop_component(inst, arb, &w, alpha);
            if best.value > 0 {
                hi = mid;
                found = Some(best.links);
            } else {
                lo = mid;
            }
        }
    }
    let links = found.unwrap_or_else(fallback);
    let ratio = component_ratio(inst, arb, active, &links)
        .ok_or_else(|| Error::InvalidArgument("ratio search produced a component that drops nothing".into()))?;
    Ok(RatioComponent { links, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directed::{DirectedLink, DirectedSolution};

    fn r3() -> Instance {
        Instance::new(3, [(0, 2, 10), (1, 2, 1), (0, 1, 1)]).unwrap()
    }

    fn r3_arb(inst: &Instance) -> Arborescence {
        let sol =
            DirectedSolution::new(vec![DirectedLink::new(0, 1, inst.link(2)), DirectedLink::new(1, 2, inst.link(1))]);
        Arborescence::build(inst, &sol).unwrap()
    }

    fn cost_overlay(arb: &Arborescence) -> Vec<i128> {
        arb.links().iter().map(|l| l.cost as i128).collect()
    }

    #[test]
    fn objective_examples() {
        let inst = r3();
        let arb = r3_arb(&inst);
        let w = DpWeights::new(&inst, &arb, &cost_overlay(&arb)).unwrap();
        let c = Cut::new(1, 2);
        assert_eq!(pattern_objective(&inst, &arb, &w, &[], c), 0);
        assert_eq!(pattern_objective(&inst, &arb, &w, &[1], c), 0);
        assert_eq!(pattern_objective(&inst, &arb, &w, &[1, 2], c), 0);
    }

    #[test]
    fn realization_examples() {
        let inst = r3();
        let arb = r3_arb(&inst);
        assert!(realizes(&inst, &arb, &[], &Pattern::empty(Cut::new(1, 2))));
        assert!(realizes(&inst, &arb, &[1], &Pattern::empty(Cut::new(1, 2))));
        // c = {0,1} crosses {1}; its component's lca is the root, outside the cut.
        let p = pattern_of(&inst, &arb, &[2], Cut::singleton(1)).unwrap();
        assert_eq!(p.parts, vec![Part { links: vec![2], lca: 0, lca_is_endpoint: true }]);
        assert!(pattern_of(&inst, &arb, &[0], Cut::singleton(1)).is_none());
    }

    #[test]
    fn compatibility_and_merge() {
        let inst = r3();
        let arb = r3_arb(&inst);
        let e1 = Pattern::empty(Cut::singleton(1));
        let e2 = Pattern::empty(Cut::singleton(2));
        assert!(compatible(&inst, &e1, &e2, 1));
        assert_eq!(merge(&inst, &arb, &e1, &e2, 1).unwrap(), Pattern::empty(Cut::new(1, 2)));
        let q1 = pattern_of(&inst, &arb, &[1], Cut::singleton(1)).unwrap();
        let q2 = pattern_of(&inst, &arb, &[1], Cut::singleton(2)).unwrap();
        assert!(compatible(&inst, &q1, &q2, 1));
        assert_eq!(merge(&inst, &arb, &q1, &q2, 1).unwrap(), Pattern::empty(Cut::new(1, 2)));
        assert_eq!(u_set(&inst, &arb, &q1, &q2, 1).unwrap(), Vec::<Vertex>::new());
        let far = Pattern::empty(Cut::new(1, 1));
        assert!(!compatible(&inst, &far, &far, 1));
        assert_eq!(merge(&inst, &arb, &q1, &e2, 1), Err(Error::Incompatible));
    }

    #[test]
    fn best_component_examples() {
        let inst = r3();
        let arb = r3_arb(&inst);
        let w = DpWeights::new(&inst, &arb, &cost_overlay(&arb)).unwrap();
        let best = find_best_drop_component(&inst, &arb, &w, 2);
        assert_eq!(best, BestComponent { links: vec![], value: 0 });
        let zero = DpWeights::new(&inst, &arb, &[0, 0]).unwrap();
        assert_eq!(find_best_drop_component(&inst, &arb, &zero, 2).value, 0);
        // Raising the overlay on (1,2) to 5 makes b = {1,2} worth 5 - 1.
        let w5 = DpWeights::new(&inst, &arb, &[1, 5]).unwrap();
        assert_eq!(find_best_drop_component(&inst, &arb, &w5, 2), BestComponent { links: vec![1], value: 4 });
    }

    #[test]
    fn ratio_examples() {
        let inst = r3();
        let arb = r3_arb(&inst);
        let all = find_min_ratio_component(&inst, &arb, &[0, 1], 2).unwrap();
        assert_eq!(all.ratio, Ratio::from_integer(1));
        assert!(!all.links.is_empty());
        let none = find_min_ratio_component(&inst, &arb, &[], 2).unwrap();
        assert_eq!(none, RatioComponent { links: vec![], ratio: Ratio::from_integer(1) });
        let single = find_min_ratio_component(&inst, &arb, &[1], 1).unwrap();
        assert!(single.ratio <= Ratio::from_integer(1));
    }

    #[test]
    fn overlay_validation() {
        let inst = r3();
        let arb = r3_arb(&inst);
        assert!(DpWeights::new(&inst, &arb, &[1]).is_err());
        assert!(DpWeights::new(&inst, &arb, &[1, -1]).is_err());
    }
}
