//! Cactus instances, their unfolding into rings with zero-cost links, and
//! connectivity checks for validating solutions on general graphs.

use std::collections::BTreeSet;
use std::convert::Infallible;
use std::fmt::Write as _;

use petgraph::graph::{NodeIndex, UnGraph};
use petgraph::unionfind::UnionFind;
use rand::Rng;
use rustworkx_core::connectivity::stoer_wagner_min_cut;

use crate::error::{Error, Result};
use crate::generate::MAX_TRIES;
use crate::model::{
    content_lines, format_cost, parse_cost, parse_err, parse_usize, scale_to_integers, Cost, Instance, LinkId, Vertex,
};

/// A connected multigraph in which every edge lies on exactly one cycle,
/// plus weighted links. Costs are stored as multiples of `1 / cost_scale`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CactusInstance {
    vertices: usize,
    edges: Vec<(Vertex, Vertex)>,
    links: Vec<(Vertex, Vertex, Cost)>,
    cost_scale: Cost,
}

impl CactusInstance {
    pub fn new(vertices: usize, edges: Vec<(Vertex, Vertex)>, links: Vec<(Vertex, Vertex, Cost)>) -> Result<Self> {
        validate_cactus(vertices, &edges)?;
        for (id, &(u, v, cost)) in links.iter().enumerate() {
            for x in [u, v] {
                if x >= vertices {
                    return Err(Error::EndpointOutOfRange { vertex: x, n: vertices });
                }
            }
            if u == v {
                return Err(Error::LoopLink { id, vertex: u });
            }
            if cost < 0 {
                return Err(Error::NegativeCost { line: id + 2 });
            }
        }
        Ok(CactusInstance { vertices, edges, links, cost_scale: 1 })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn links(&self) -> &[(Vertex, Vertex, Cost)] {
        &self.links
    }

    pub fn cost_scale(&self) -> Cost {
        self.cost_scale
    }

    pub fn cost_of(&self, ids: &[LinkId]) -> Cost {
        ids.iter().map(|&i| self.links[i].2).sum()
    }
}

/// Checks connectivity and that every biconnected block is a single cycle.
pub fn validate_cactus(vertices: usize, edges: &[(Vertex, Vertex)]) -> Result<()> {
    if vertices == 0 || edges.is_empty() {
        return Err(Error::NotCactus("a cactus needs at least one edge".into()));
    }
    let mut adj = vec![Vec::new(); vertices];
    let mut uf = UnionFind::new(vertices);
    for (e, &(u, v)) in edges.iter().enumerate() {
        if u >= vertices || v >= vertices {
            return Err(Error::EndpointOutOfRange { vertex: u.max(v), n: vertices });
        }
        if u == v {
            return Err(Error::NotCactus(format!("edge {e} is a loop")));
        }
        adj[u].push((e, v));
        adj[v].push((e, u));
        uf.union(u, v);
    }
    if (1..vertices).any(|v| !uf.equiv(0, v)) {
        return Err(Error::NotCactus("graph is disconnected".into()));
    }
    for block in biconnected_blocks(&adj) {
        let nodes: BTreeSet<Vertex> = block.iter().flat_map(|&e| [edges[e].0, edges[e].1]).collect();
        if block.len() != nodes.len() {
            let what = if block.len() == 1 { "lies on no cycle" } else { "lies on several cycles" };
            return Err(Error::NotCactus(format!("edge {} {what}", block[0])));
        }
    }
    Ok(())
}

/// Edge sets of the biconnected blocks of a connected multigraph.
fn biconnected_blocks(adj: &[Vec<(usize, Vertex)>]) -> Vec<Vec<usize>> {
    const NONE: usize = usize::MAX;
    let mut disc = vec![NONE; adj.len()];
    let mut low = vec![0; adj.len()];
    let mut time = 0;
    let mut blocks = Vec::new();
    let mut edge_stack = Vec::new();
    // (vertex, edge used to enter it, next adjacency index)
    let mut stack = vec![(0, NONE, 0)];
    disc[0] = 0;
    low[0] = 0;
    while let Some(frame) = stack.last_mut() {
        let (v, entry) = (frame.0, frame.1);
        if frame.2 < adj[v].len() {
            let (e, w) = adj[v][frame.2];
            frame.2 += 1;
            if e == entry {
                continue;
            }
            if disc[w] == NONE {
                time += 1;
                disc[w] = time;
                low[w] = time;
                edge_stack.push(e);
                stack.push((w, e, 0));
            } else if disc[w] < disc[v] {
                edge_stack.push(e);
                low[v] = low[v].min(disc[w]);
            }
        } else {
            stack.pop();
            if let Some(&(p, _, _)) = stack.last() {
                low[p] = low[p].min(low[v]);
                if low[v] >= disc[p] {
                    let mut block = Vec::new();
                    while let Some(e) = edge_stack.pop() {
                        block.push(e);
                        if e == entry {
                            break;
                        }
                    }
                    blocks.push(block);
                }
            }
        }
    }
    blocks
}

/// Correspondence between an unfolded ring and its cactus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnfoldMap {
    /// Cactus vertex copied by each ring vertex.
    pub copy_of: Vec<Vertex>,
    /// Ring vertex of the first visit of each cactus vertex.
    pub first_copy: Vec<Vertex>,
    /// Ids of the zero-cost links joining later copies to first copies.
    pub added: Vec<LinkId>,
    /// Cactus links keep their ids; added links follow them.
    pub original_links: usize,
}

/// Closed Euler walk from vertex 0, taking edges in input order. The
/// returning step to 0 is omitted.
pub fn euler_walk(vertices: usize, edges: &[(Vertex, Vertex)]) -> Vec<Vertex> {
    let mut adj = vec![Vec::new(); vertices];
    for (e, &(u, v)) in edges.iter().enumerate() {
        adj[u].push((e, v));
        adj[v].push((e, u));
    }
    let mut next = vec![0; vertices];
    let mut used = vec![false; edges.len()];
    let mut stack = vec![0];
    let mut circuit = Vec::with_capacity(edges.len() + 1);
    while let Some(&v) = stack.last() {
        while next[v] < adj[v].len() && used[adj[v][next[v]].0] {
            next[v] += 1;
        }
        if let Some(&(e, w)) = adj[v].get(next[v]) {
            used[e] = true;
            stack.push(w);
        } else {
            circuit.push(v);
            stack.pop();
        }
    }
    circuit.reverse();
    circuit.pop();
    circuit
}

/// Ring whose vertices are the steps of an Euler walk. Cactus links join the
/// first copies of their endpoints; each repeated visit gets a zero-cost
/// link to the first copy.
pub fn unfold_cactus(c: &CactusInstance) -> Result<(Instance, UnfoldMap)> {
    let walk = euler_walk(c.vertices, &c.edges);
    let mut first_copy = vec![usize::MAX; c.vertices];
    for (i, &x) in walk.iter().enumerate() {
        if first_copy[x] == usize::MAX {
            first_copy[x] = i;
        }
    }
    let mut links: Vec<(Vertex, Vertex, Cost)> =
        c.links.iter().map(|&(u, v, cost)| (first_copy[u], first_copy[v], cost)).collect();
    let mut added = Vec::new();
    for (i, &x) in walk.iter().enumerate() {
        if first_copy[x] != i {
            added.push(links.len());
            links.push((first_copy[x], i, 0));
        }
    }
    let inst = Instance::new(walk.len(), links)?.with_cost_scale(c.cost_scale);
    Ok((inst, UnfoldMap { copy_of: walk, first_copy, added, original_links: c.links.len() }))
}

/// Drops the added zero-cost links from a ring solution; the remaining ids
/// are cactus link ids.
pub fn map_solution_back(ring: &Instance, map: &UnfoldMap, solution: &[LinkId]) -> Result<Vec<LinkId>> {
    ring.check_ids(solution)?;
    if !crate::model::is_wrap_solution(ring, solution) {
        return Err(Error::Infeasible);
    }
    let mut out: Vec<LinkId> = solution.iter().copied().filter(|&i| i < map.original_links).collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Global edge connectivity, or `None` with fewer than two vertices.
pub fn edge_connectivity(vertices: usize, edges: &[(Vertex, Vertex)]) -> Option<usize> {
    if vertices < 2 {
        return None;
    }
    let mut g: UnGraph<(), ()> = UnGraph::with_capacity(vertices, edges.len());
    for _ in 0..vertices {
        g.add_node(());
    }
    for &(u, v) in edges {
        g.add_edge(NodeIndex::new(u), NodeIndex::new(v), ());
    }
    let cut = stoer_wagner_min_cut(&g, |_| Ok::<usize, Infallible>(1)).unwrap_or_else(|never| match never {});
    Some(cut.map_or(0, |(value, _)| value))
}

/// Adding `links` raises the edge connectivity of the graph.
pub fn is_wcap_solution(vertices: usize, edges: &[(Vertex, Vertex)], links: &[(Vertex, Vertex)]) -> bool {
    let Some(before) = edge_connectivity(vertices, edges) else {
        return true;
    };
    let all: Vec<_> = edges.iter().chain(links).copied().collect();
    edge_connectivity(vertices, &all).is_some_and(|after| after > before)
}

pub fn is_cactus_solution(c: &CactusInstance, ids: &[LinkId]) -> bool {
    let links: Vec<_> = ids.iter().map(|&i| (c.links[i].0, c.links[i].1)).collect();
    is_wcap_solution(c.vertices, &c.edges, &links)
}

/// Random cactus of up to `max_edges` edges (at least 3) grown by gluing
/// cycles of length 2 to 4 onto existing vertices, with `m` links redrawn
/// until all of them together form a solution.
pub fn random_cactus<R: Rng>(rng: &mut R, max_edges: usize, m: usize, max_cost: Cost) -> Result<CactusInstance> {
    if max_edges < 3 {
        return Err(Error::InvalidArgument("a cactus unfolding to a ring needs at least 3 edges".into()));
    }
    let target = rng.gen_range(3..=max_edges);
    let mut vertices = 0;
    let mut edges = Vec::new();
    let cycle = |anchor: Option<Vertex>, len: usize, vertices: &mut usize, edges: &mut Vec<(Vertex, Vertex)>| {
        let start = anchor.unwrap_or_else(|| {
            *vertices += 1;
            *vertices - 1
        });
        let mut prev = start;
        for _ in 1..len {
            *vertices += 1;
            edges.push((prev, *vertices - 1));
            prev = *vertices - 1;
        }
        edges.push((prev, start));
    };
    let first = rng.gen_range(3..=target.min(4));
    cycle(None, first, &mut vertices, &mut edges);
    while target - edges.len() >= 2 {
        let len = rng.gen_range(2..=(target - edges.len()).min(4));
        let anchor = rng.gen_range(0..vertices);
        cycle(Some(anchor), len, &mut vertices, &mut edges);
    }
    for _ in 0..MAX_TRIES {
        let links: Vec<_> = (0..m)
            .map(|_| {
                let u = rng.gen_range(0..vertices);
                let v = (u + rng.gen_range(1..vertices)) % vertices;
                (u, v, rng.gen_range(0..=max_cost))
            })
            .collect();
        let c = CactusInstance::new(vertices, edges.clone(), links)?;
        if is_cactus_solution(&c, &(0..m).collect::<Vec<_>>()) {
            return Ok(c);
        }
    }
    Err(Error::Infeasible)
}

/// Reads the `cactus <vertices>` format with `edge u v` and
/// `link u v cost` lines.
pub fn load_cactus(text: &str) -> Result<CactusInstance> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("cactus") {
        return Err(parse_err(hline, "expected `cactus <vertices>` header"));
    }
    let vertices = parse_usize(toks.next(), hline, "vertex count")?;
    if toks.next().is_some() {
        return Err(parse_err(hline, "trailing tokens after header"));
    }
    let mut edges = Vec::new();
    let mut raw = Vec::new();
    for (line, body) in lines {
        let mut toks = body.split_whitespace();
        let kind = toks.next();
        let u = parse_usize(toks.next(), line, "endpoint")?;
        let v = parse_usize(toks.next(), line, "endpoint")?;
        match kind {
            Some("edge") => edges.push((u, v)),
            Some("link") => {
                let cost = toks.next().ok_or_else(|| parse_err(line, "missing cost"))?;
                raw.push((u, v, parse_cost(cost, line)?));
            }
            _ => return Err(parse_err(line, "expected `edge <u> <v>` or `link <u> <v> <cost>`")),
        }
        if toks.next().is_some() {
            return Err(parse_err(line, "trailing tokens"));
        }
    }
    let (links, scale) = scale_to_integers(raw)?;
    let mut c = CactusInstance::new(vertices, edges, links)?;
    c.cost_scale = scale;
    Ok(c)
}

pub fn save_cactus(c: &CactusInstance) -> String {
    let mut out = format!("cactus {}\n", c.vertices);
    for &(u, v) in &c.edges {
        let _ = writeln!(out, "edge {u} {v}");
    }
    for &(u, v, cost) in &c.links {
        let _ = writeln!(out, "link {u} {v} {}", format_cost(cost, c.cost_scale));
    }
    out
}
