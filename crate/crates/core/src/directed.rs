//! Directed shadow solutions: shadows, coverage, the minimum-cost directed
//! solution, the shortening procedure, structural verification, ancestry and
//! responsibilities.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{cut_count, cut_index, enumerate_cuts, Cost, Cut, Instance, Link, LinkId, Vertex};

/// A shadow of an undirected link, oriented from `tail` to `head`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DirectedLink {
    pub tail: Vertex,
    pub head: Vertex,
    pub origin: LinkId,
    pub cost: Cost,
}

impl DirectedLink {
    pub fn new(tail: Vertex, head: Vertex, origin: &Link) -> Self {
        DirectedLink { tail, head, origin: origin.id, cost: origin.cost }
    }

    /// True iff the head is inside `cut` and the tail is not.
    pub fn enters(&self, cut: Cut) -> bool {
        cut.contains(self.head) && !cut.contains(self.tail)
    }

    pub fn goes_left(&self) -> bool {
        self.head < self.tail
    }

    pub fn span(&self) -> (Vertex, Vertex) {
        (self.tail.min(self.head), self.tail.max(self.head))
    }

    /// All cuts entered, as a rectangle of `(lo, hi)` ranges.
    fn entered_ranges(&self, n: usize) -> Option<((Vertex, Vertex), (Vertex, Vertex))> {
        let (t, h) = (self.tail, self.head);
        if h == 0 {
            None
        } else if t < h {
            Some(((t + 1, h), (h, n - 1)))
        } else {
            Some(((1, h), (h, t - 1)))
        }
    }

    pub fn entered_cuts(&self, n: usize) -> Vec<Cut> {
        let mut out = Vec::new();
        if let Some(((l0, l1), (h0, h1))) = self.entered_ranges(n) {
            for lo in l0..=l1 {
                for hi in h0.max(lo)..=h1 {
                    out.push(Cut::new(lo, hi));
                }
            }
        }
        out
    }
}

impl fmt::Display for DirectedLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})#{}", self.tail, self.head, self.origin)
    }
}

/// A set of directed links over the shadows of an instance.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct DirectedSolution {
    pub links: Vec<DirectedLink>,
}

impl DirectedSolution {
    pub fn new(links: Vec<DirectedLink>) -> Self {
        DirectedSolution { links }
    }

    pub fn cost(&self) -> Cost {
        self.links.iter().map(|l| l.cost).sum()
    }

    /// Undirected links the shadows come from, sorted and deduplicated.
    pub fn origins(&self) -> Vec<LinkId> {
        let mut ids: Vec<_> = self.links.iter().map(|l| l.origin).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

/// Every shortening of `(u, v)` and of `(v, u)`.
pub fn shadows(link: &Link) -> Vec<DirectedLink> {
    let (u, v) = (link.u, link.v);
    let mut out: Vec<_> = (u..v).map(|s| DirectedLink::new(s, v, link)).collect();
    out.extend((u + 1..=v).map(|s| DirectedLink::new(s, u, link)));
    out
}

pub fn all_shadows(inst: &Instance) -> Vec<DirectedLink> {
    inst.links().iter().flat_map(shadows).collect()
}

pub fn is_shadow(inst: &Instance, dl: &DirectedLink) -> bool {
    let Some(l) = inst.links().get(dl.origin) else {
        return false;
    };
    dl.cost == l.cost
        && ((dl.head == l.v && l.u <= dl.tail && dl.tail < l.v) || (dl.head == l.u && l.u < dl.tail && dl.tail <= l.v))
}

pub fn enters(dl: &DirectedLink, cut: Cut) -> bool {
    dl.enters(cut)
}

pub fn is_directed_solution(inst: &Instance, links: &[DirectedLink]) -> bool {
    enumerate_cuts(inst).into_iter().all(|cut| links.iter().any(|l| l.enters(cut)))
}

/// Per-cut entry counters used to test deletions and shortenings locally.
struct EntryCounter {
    n: usize,
    count: Vec<u32>,
}

impl EntryCounter {
    fn new(n: usize) -> Self {
        EntryCounter { n, count: vec![0; cut_count(n)] }
    }

    fn apply(&mut self, dl: &DirectedLink, add: bool) {
        for cut in dl.entered_cuts(self.n) {
            let c = &mut self.count[cut_index(self.n, cut)];
            if add {
                *c += 1;
            } else {
                *c -= 1;
            }
        }
    }

    fn all_entered(&self) -> bool {
        self.count.iter().all(|&c| c > 0)
    }

    fn entered_on(&self, cuts: &[Cut]) -> bool {
        cuts.iter().all(|&c| self.count[cut_index(self.n, c)] > 0)
    }
}

/// Deletes and shortens links until no deletion or strict shortening keeps
/// feasibility.
///
/// Links are visited once in ascending `(origin, tail, head)` order. A link is
/// deleted if possible, otherwise replaced by its shortest feasible strict
/// shortening. One pass suffices: later changes only weaken the rest of the
/// set, so an earlier refusal stays valid. Shortenings keep their origin.
pub fn make_non_shortenable(inst: &Instance, links: &[DirectedLink]) -> Result<DirectedSolution> {
    let n = inst.n();
    let mut counter = EntryCounter::new(n);
    for l in links {
        counter.apply(l, true);
    }
    if !counter.all_entered() {
        return Err(Error::NotDirectedSolution);
    }
    let mut order: Vec<usize> = (0..links.len()).collect();
    order.sort_by_key(|&i| (links[i].origin, links[i].tail, links[i].head, i));
    let mut result: Vec<Option<DirectedLink>> = links.iter().copied().map(Some).collect();
    for i in order {
        let l = links[i];
        let needed = l.entered_cuts(n);
        counter.apply(&l, false);
        if counter.entered_on(&needed) {
            result[i] = None;
            continue;
        }
        let tails: Vec<Vertex> =
            if l.tail < l.head { (l.tail + 1..l.head).rev().collect() } else { (l.head + 1..l.tail).collect() };
        let mut kept = l;
        for s in tails {
            let cand = DirectedLink { tail: s, ..l };
            counter.apply(&cand, true);
            if counter.entered_on(&needed) {
                kept = cand;
                break;
            }
            counter.apply(&cand, false);
        }
        if kept == l {
            counter.apply(&l, true);
        }
        result[i] = Some(kept);
    }
    Ok(DirectedSolution::new(result.into_iter().flatten().collect()))
}

/// Minimum-cost spanning arborescence by contraction of zero-reduced cycles.
///
/// `arcs` are `(from, to, weight)`; returns indices of the chosen arcs, or
/// `None` when some vertex is unreachable from `root`.
pub fn min_arborescence(n: usize, root: usize, arcs: &[(usize, usize, i64)]) -> Option<Vec<usize>> {
    let tagged: Vec<(usize, usize, i64, usize)> = arcs.iter().enumerate().map(|(i, &(a, b, w))| (a, b, w, i)).collect();
    let mut out = contract_solve(n, root, &tagged)?;
    out.sort_unstable();
    Some(out)
}

fn contract_solve(n: usize, root: usize, arcs: &[(usize, usize, i64, usize)]) -> Option<Vec<usize>> {
    let mut best: Vec<Option<usize>> = vec![None; n];
    for (i, &(a, b, w, _)) in arcs.iter().enumerate() {
        if b == root || a == b {
            continue;
        }
        match best[b] {
            Some(j) if arcs[j].2 <= w => {}
            _ => best[b] = Some(i),
        }
    }
    if (0..n).any(|v| v != root && best[v].is_none()) {
        return None;
    }
    let from = |v: usize| arcs[best[v].unwrap()].0;

    let mut cycle_of: Vec<Option<usize>> = vec![None; n];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut seen_by = vec![usize::MAX; n];
    for start in 0..n {
        let mut x = start;
        while x != root && seen_by[x] == usize::MAX && cycle_of[x].is_none() {
            seen_by[x] = start;
            x = from(x);
        }
        if x != root && seen_by[x] == start && cycle_of[x].is_none() {
            let mut cycle = vec![x];
            let mut y = from(x);
            while y != x {
                cycle.push(y);
                y = from(y);
            }
            for &y in &cycle {
                cycle_of[y] = Some(cycles.len());
            }
            cycles.push(cycle);
        }
    }
    if cycles.is_empty() {
        return Some((0..n).filter(|&v| v != root).map(|v| arcs[best[v].unwrap()].3).collect());
    }

    let mut new_id = vec![0; n];
    let mut next = cycles.len();
    for v in 0..n {
        new_id[v] = match cycle_of[v] {
            Some(c) => c,
            None => {
                next += 1;
                next - 1
            }
        };
    }
    let mut reduced = Vec::new();
    for (i, &(a, b, w, _)) in arcs.iter().enumerate() {
        let (na, nb) = (new_id[a], new_id[b]);
        if na == nb {
            continue;
        }
        let w2 = match cycle_of[b] {
            Some(_) => w - arcs[best[b].unwrap()].2,
            None => w,
        };
        reduced.push((na, nb, w2, i));
    }
    let chosen = contract_solve(next, new_id[root], &reduced)?;
    let mut out: Vec<usize> = chosen.iter().map(|&i| arcs[i].3).collect();
    for cycle in &cycles {
        let entry_head = chosen
            .iter()
            .map(|&i| arcs[i].1)
            .find(|&h| cycle.contains(&h))
            .expect("contracted cycle has an entering arc");
        for &y in cycle {
            if y != entry_head {
                out.push(arcs[best[y].unwrap()].3);
            }
        }
    }
    Some(out)
}

/// Cheapest directed solution over all shadows.
///
/// Every spanning arborescence rooted at vertex 0 enters every cut, and every
/// directed solution shortens to an arborescence of no greater cost, so the
/// optimum is a minimum-cost arborescence of the shadow digraph.
pub fn min_cost_directed_solution(inst: &Instance) -> Result<DirectedSolution> {
    let n = inst.n();
    let mut cheapest: Vec<Vec<Option<DirectedLink>>> = vec![vec![None; n]; n];
    for dl in all_shadows(inst) {
        if dl.head == 0 {
            continue;
        }
        let slot = &mut cheapest[dl.tail][dl.head];
        if slot.is_none_or(|cur| (dl.cost, dl.origin) < (cur.cost, cur.origin)) {
            *slot = Some(dl);
        }
    }
    let candidates: Vec<DirectedLink> = cheapest.into_iter().flatten().flatten().collect();
    let arcs: Vec<_> = candidates.iter().map(|d| (d.tail, d.head, d.cost)).collect();
    let chosen = min_arborescence(n, 0, &arcs).ok_or(Error::Infeasible)?;
    Ok(DirectedSolution::new(chosen.into_iter().map(|i| candidates[i]).collect()))
}

/// Links `a`, `b` cross when their spans strictly interleave.
pub fn spans_cross(a: (Vertex, Vertex), b: (Vertex, Vertex)) -> bool {
    (a.0 < b.0 && b.0 < a.1 && a.1 < b.1) || (b.0 < a.0 && a.0 < b.1 && b.1 < a.1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum StructureViolation {
    RootEntered(DirectedLink),
    InDegree { vertex: Vertex, count: usize },
    Unreachable { vertex: Vertex },
    Crossing(DirectedLink, DirectedLink),
    SameDirection { vertex: Vertex, first: DirectedLink, second: DirectedLink },
}

impl fmt::Display for StructureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureViolation::RootEntered(l) => write!(f, "{l} enters the root"),
            StructureViolation::InDegree { vertex, count } => {
                write!(f, "vertex {vertex} has in-degree {count}")
            }
            StructureViolation::Unreachable { vertex } => {
                write!(f, "vertex {vertex} is not reachable from the root")
            }
            StructureViolation::Crossing(a, b) => write!(f, "{a} crosses {b}"),
            StructureViolation::SameDirection { vertex, first, second } => {
                write!(f, "{first} and {second} leave {vertex} in the same direction")
            }
        }
    }
}

/// Outcome of the three structural checks on a directed solution.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct StructureReport {
    pub arborescence: bool,
    pub planar: bool,
    pub directions: bool,
    pub violations: Vec<StructureViolation>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.arborescence && self.planar && self.directions
    }
}

/// Checks the arborescence, planarity and out-direction properties.
pub fn verify_structure(inst: &Instance, links: &[DirectedLink]) -> StructureReport {
    let n = inst.n();
    let mut violations = Vec::new();

    let mut indeg = vec![0usize; n];
    let mut parent = vec![None; n];
    for l in links {
        indeg[l.head] += 1;
        parent[l.head] = Some(l.tail);
        if l.head == 0 {
            violations.push(StructureViolation::RootEntered(*l));
        }
    }
    for (v, &count) in indeg.iter().enumerate().skip(1) {
        if count != 1 {
            violations.push(StructureViolation::InDegree { vertex: v, count });
        }
    }
    if violations.is_empty() {
        for v in 1..n {
            let mut x = v;
            let mut steps = 0;
            while x != 0 && steps <= n {
                x = parent[x].unwrap();
                steps += 1;
            }
            if x != 0 {
                violations.push(StructureViolation::Unreachable { vertex: v });
            }
        }
    }
    let arborescence = violations.is_empty();

    let before = violations.len();
    for (i, a) in links.iter().enumerate() {
        for b in &links[i + 1..] {
            if spans_cross(a.span(), b.span()) {
                violations.push(StructureViolation::Crossing(*a, *b));
            }
        }
    }
    let planar = violations.len() == before;

    let before = violations.len();
    for v in 0..n {
        for side in [true, false] {
            let out: Vec<_> = links.iter().filter(|l| l.tail == v && l.goes_left() == side).collect();
            if out.len() > 1 {
                violations.push(StructureViolation::SameDirection { vertex: v, first: *out[0], second: *out[1] });
            }
        }
    }
    let directions = violations.len() == before;

    StructureReport { arborescence, planar, directions, violations }
}

/// Ancestry structure of a directed solution in which every non-root vertex
/// has exactly one incoming link and descendant sets are intervals.
#[derive(Debug, Clone)]
pub struct Arborescence {
    n: usize,
    links: Vec<DirectedLink>,
    in_link: Vec<Option<usize>>,
    parent: Vec<Vertex>,
    depth: Vec<usize>,
    desc: Vec<(Vertex, Vertex)>,
    jump: Vec<Vec<Vertex>>,
}

impl Arborescence {
    pub fn build(inst: &Instance, solution: &DirectedSolution) -> Result<Self> {
        let n = inst.n();
        let links = solution.links.clone();
        let mut in_link = vec![None; n];
        for (i, l) in links.iter().enumerate() {
            if l.head == 0 || in_link[l.head].is_some() {
                return Err(Error::Structure(format!("vertex {} has in-degree above 1", l.head)));
            }
            in_link[l.head] = Some(i);
        }
        if let Some(v) = (1..n).find(|&v| in_link[v].is_none()) {
            return Err(Error::Structure(format!("vertex {v} has no incoming link")));
        }
        let mut parent = vec![0; n];
        let mut children = vec![Vec::new(); n];
        for v in 1..n {
            let p = links[in_link[v].unwrap()].tail;
            parent[v] = p;
            children[p].push(v);
        }
        let mut depth = vec![usize::MAX; n];
        let mut order = vec![0];
        depth[0] = 0;
        let mut k = 0;
        while k < order.len() {
            let x = order[k];
            for &c in &children[x] {
                depth[c] = depth[x] + 1;
                order.push(c);
            }
            k += 1;
        }
        if order.len() != n {
            return Err(Error::Structure("directed links contain a cycle".into()));
        }
        let mut desc: Vec<(Vertex, Vertex)> = (0..n).map(|v| (v, v)).collect();
        let mut size = vec![1usize; n];
        for &x in order.iter().rev() {
            if x != 0 {
                let p = parent[x];
                desc[p] = (desc[p].0.min(desc[x].0), desc[p].1.max(desc[x].1));
                size[p] += size[x];
            }
        }
        if let Some(v) = (0..n).find(|&v| desc[v].1 - desc[v].0 + 1 != size[v]) {
            return Err(Error::Structure(format!("descendants of {v} are not an interval")));
        }
        let levels = usize::BITS as usize - n.leading_zeros() as usize;
        let mut jump = vec![parent.clone()];
        for k in 1..levels.max(1) {
            let prev = &jump[k - 1];
            jump.push((0..n).map(|v| prev[prev[v]]).collect());
        }
        Ok(Arborescence { n, links, in_link, parent, depth, desc, jump })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn links(&self) -> &[DirectedLink] {
        &self.links
    }

    pub fn solution(&self) -> DirectedSolution {
        DirectedSolution::new(self.links.clone())
    }

    /// Index of the link entering `v`, `None` for the root.
    pub fn in_link(&self, v: Vertex) -> Option<usize> {
        self.in_link[v]
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        (v != 0).then(|| self.parent[v])
    }

    pub fn depth(&self, v: Vertex) -> usize {
        self.depth[v]
    }

    /// Descendants of `v` (including `v`) as an inclusive interval.
    pub fn descendants(&self, v: Vertex) -> (Vertex, Vertex) {
        self.desc[v]
    }

    pub fn is_descendant(&self, x: Vertex, of: Vertex) -> bool {
        let (lo, hi) = self.desc[of];
        lo <= x && x <= hi
    }

    fn lca_pair(&self, mut a: Vertex, mut b: Vertex) -> Vertex {
        if self.depth[a] < self.depth[b] {
            std::mem::swap(&mut a, &mut b);
        }
        let mut diff = self.depth[a] - self.depth[b];
        let mut k = 0;
        while diff > 0 {
            if diff & 1 == 1 {
                a = self.jump[k][a];
            }
            diff >>= 1;
            k += 1;
        }
        if a == b {
            return a;
        }
        for k in (0..self.jump.len()).rev() {
            if self.jump[k][a] != self.jump[k][b] {
                a = self.jump[k][a];
                b = self.jump[k][b];
            }
        }
        self.parent[a]
    }

    /// Least common ancestor of a nonempty vertex set; only the leftmost and
    /// rightmost members matter.
    pub fn lca(&self, set: &[Vertex]) -> Vertex {
        let lo = *set.iter().min().expect("lca of an empty set");
        let hi = *set.iter().max().unwrap();
        self.lca_pair(lo, hi)
    }
}

pub fn lca(arb: &Arborescence, set: &[Vertex]) -> Vertex {
    arb.lca(set)
}

/// Cuts each link is responsible for: it enters the cut and no link on the
/// root path of its tail does.
pub fn responsibilities(inst: &Instance, arb: &Arborescence) -> Vec<Vec<Cut>> {
    let links = arb.links();
    let mut out = vec![Vec::new(); links.len()];
    for cut in enumerate_cuts(inst) {
        for (i, l) in links.iter().enumerate() {
            if !l.enters(cut) {
                continue;
            }
            let mut x = l.tail;
            let mut blocked = false;
            while let Some(j) = arb.in_link(x) {
                if links[j].enters(cut) {
                    blocked = true;
                    break;
                }
                x = links[j].tail;
            }
            if !blocked {
                out[i].push(cut);
            }
        }
    }
    out
}

/// The same sets via the descendant characterisation: the head is in the cut
/// and every vertex of the cut descends from the head.
pub fn responsibilities_by_descendants(inst: &Instance, arb: &Arborescence) -> Vec<Vec<Cut>> {
    arb.links()
        .iter()
        .map(|l| {
            enumerate_cuts(inst)
                .into_iter()
                .filter(|c| c.contains(l.head) && arb.is_descendant(c.lo, l.head) && arb.is_descendant(c.hi, l.head))
                .collect()
        })
        .collect()
}
