//! Rooted ring instances, 2-cuts and undirected coverage.
//!
//! Vertices are `0..n` in path order. Vertex 0 is the root and the ring edge
//! `{n-1, 0}` is the distinguished edge whose removal leaves the path, so
//! "left of" is plain integer comparison. Every 2-cut is an interval of
//! non-root vertices.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};

pub type Vertex = usize;
pub type LinkId = usize;
pub type Cost = i64;

/// An undirected candidate edge, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Link {
    pub id: LinkId,
    pub u: Vertex,
    pub v: Vertex,
    pub cost: Cost,
}

impl Link {
    pub fn left(&self) -> Vertex {
        self.u
    }

    pub fn right(&self) -> Vertex {
        self.v
    }

    pub fn has_endpoint(&self, x: Vertex) -> bool {
        self.u == x || self.v == x
    }

    pub fn endpoints(&self) -> [Vertex; 2] {
        [self.u, self.v]
    }

    /// True iff exactly one endpoint lies in `cut`.
    pub fn covers(&self, cut: Cut) -> bool {
        cut.contains(self.u) != cut.contains(self.v)
    }
}

/// The interval `{lo, ..., hi}` of non-root vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cut {
    pub lo: Vertex,
    pub hi: Vertex,
}

impl Cut {
    pub fn new(lo: Vertex, hi: Vertex) -> Self {
        debug_assert!(lo <= hi);
        Cut { lo, hi }
    }

    pub fn singleton(v: Vertex) -> Self {
        Cut { lo: v, hi: v }
    }

    pub fn contains(&self, x: Vertex) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Number of vertices; a cut is never empty.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_subset_of(&self, other: &Cut) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }
}

/// A rooted ring instance with exact integer costs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    links: Vec<Link>,
    /// Costs are stored as multiples of `1 / cost_scale` input units.
    cost_scale: Cost,
}

impl Instance {
    /// Builds an instance from `(u, v, cost)` triples; ids follow input order.
    pub fn new(n: usize, links: impl IntoIterator<Item = (Vertex, Vertex, Cost)>) -> Result<Self> {
        if n < 3 {
            return Err(Error::TooFewVertices(n));
        }
        let mut out = Vec::new();
        for (id, (a, b, cost)) in links.into_iter().enumerate() {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::EndpointOutOfRange { vertex: x, n });
                }
            }
            if a == b {
                return Err(Error::LoopLink { id, vertex: a });
            }
            if cost < 0 {
                return Err(Error::NegativeCost { line: id + 2 });
            }
            out.push(Link { id, u: a.min(b), v: a.max(b), cost });
        }
        Ok(Instance { n, links: out, cost_scale: 1 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id]
    }

    pub(crate) fn with_cost_scale(mut self, scale: Cost) -> Self {
        self.cost_scale = scale;
        self
    }

    pub fn cost_scale(&self) -> Cost {
        self.cost_scale
    }

    pub fn cost_of(&self, ids: &[LinkId]) -> Cost {
        ids.iter().map(|&i| self.links[i].cost).sum()
    }

    pub fn all_ids(&self) -> Vec<LinkId> {
        (0..self.links.len()).collect()
    }

    /// Full ground interval `[1, n-1]`.
    pub fn full_cut(&self) -> Cut {
        Cut::new(1, self.n - 1)
    }

    pub fn check_ids(&self, ids: &[LinkId]) -> Result<()> {
        match ids.iter().find(|&&i| i >= self.links.len()) {
            Some(&bad) => Err(Error::UnknownLink(bad)),
            None => Ok(()),
        }
    }
}

/// Number of 2-cuts of an `n`-vertex ring.
pub fn cut_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Dense index of the cut `[lo, hi]`, consistent with [`enumerate_cuts`].
pub fn cut_index(n: usize, cut: Cut) -> usize {
    // Cuts are listed by `lo`, then `hi`; row `lo` has `n - lo` entries.
    let before: usize = (1..cut.lo).map(|l| n - l).sum();
    before + (cut.hi - cut.lo)
}

pub fn enumerate_cuts(inst: &Instance) -> Vec<Cut> {
    cuts_of(inst.n)
}

pub fn cuts_of(n: usize) -> Vec<Cut> {
    let mut out = Vec::with_capacity(cut_count(n));
    for lo in 1..n {
        for hi in lo..n {
            out.push(Cut::new(lo, hi));
        }
    }
    out
}

pub fn covers(link: &Link, cut: Cut) -> bool {
    link.covers(cut)
}

pub fn is_wrap_solution(inst: &Instance, ids: &[LinkId]) -> bool {
    enumerate_cuts(inst).into_iter().all(|cut| ids.iter().any(|&i| inst.links[i].covers(cut)))
}

pub fn is_feasible(inst: &Instance) -> bool {
    is_wrap_solution(inst, &inst.all_ids())
}

/// Cuts not covered by any link of `ids`.
pub fn uncovered_cuts(inst: &Instance, ids: &[LinkId]) -> Vec<Cut> {
    enumerate_cuts(inst).into_iter().filter(|&cut| !ids.iter().any(|&i| inst.links[i].covers(cut))).collect()
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.abs()
}

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub(crate) fn parse_usize(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse::<usize>().map_err(|_| parse_err(line, format!("bad {what} `{tok}`")))
}

/// Parses `num` or `num/den` into a reduced fraction.
pub(crate) fn parse_cost(tok: &str, line: usize) -> Result<(i64, i64)> {
    let (num, den) = match tok.split_once('/') {
        Some((a, b)) => (a, b),
        None => (tok, "1"),
    };
    let num: i64 = num.parse().map_err(|_| parse_err(line, format!("bad cost `{tok}`")))?;
    let den: i64 = den.parse().map_err(|_| parse_err(line, format!("bad cost `{tok}`")))?;
    if den <= 0 {
        return Err(parse_err(line, format!("bad denominator in `{tok}`")));
    }
    if num < 0 {
        return Err(Error::NegativeCost { line });
    }
    let g = gcd(num, den).max(1);
    Ok((num / g, den / g))
}

/// Strips a `#` comment and surrounding whitespace.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then_some((i + 1, body))
    })
}

/// Reads the line-oriented `wrap` format.
pub fn load_instance(text: &str) -> Result<Instance> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("wrap") {
        return Err(parse_err(hline, "expected `wrap <n>` header"));
    }
    let n = parse_usize(toks.next(), hline, "vertex count")?;
    if toks.next().is_some() {
        return Err(parse_err(hline, "trailing tokens after header"));
    }
    if n < 3 {
        return Err(Error::TooFewVertices(n));
    }
    let mut raw = Vec::new();
    for (line, body) in lines {
        let mut toks = body.split_whitespace();
        if toks.next() != Some("link") {
            return Err(parse_err(line, "expected `link <u> <v> <cost>`"));
        }
        let u = parse_usize(toks.next(), line, "endpoint")?;
        let v = parse_usize(toks.next(), line, "endpoint")?;
        let cost = toks.next().ok_or_else(|| parse_err(line, "missing cost"))?;
        let cost = parse_cost(cost, line)?;
        if toks.next().is_some() {
            return Err(parse_err(line, "trailing tokens"));
        }
        for x in [u, v] {
            if x >= n {
                return Err(Error::EndpointOutOfRange { vertex: x, n });
            }
        }
        if u == v {
            return Err(Error::LoopLink { id: raw.len(), vertex: u });
        }
        raw.push((u, v, cost));
    }
    let (triples, scale) = scale_to_integers(raw)?;
    let mut inst = Instance::new(n, triples)?;
    inst.cost_scale = scale;
    Ok(inst)
}

pub(crate) type LinkTriple = (Vertex, Vertex, Cost);

/// Multiplies fractional costs by the lcm of their denominators.
pub(crate) fn scale_to_integers(raw: Vec<(Vertex, Vertex, (i64, i64))>) -> Result<(Vec<LinkTriple>, Cost)> {
    let mut scale: i64 = 1;
    for &(_, _, (_, den)) in &raw {
        scale = (scale / gcd(scale, den)).checked_mul(den).ok_or(Error::Overflow)?;
    }
    let mut triples = Vec::with_capacity(raw.len());
    for (u, v, (num, den)) in raw {
        let c = num.checked_mul(scale / den).ok_or(Error::Overflow)?;
        triples.push((u, v, c));
    }
    Ok((triples, scale))
}

/// Writes `cost / scale` reduced, as `num` or `num/den`.
pub fn format_cost(cost: Cost, scale: Cost) -> String {
    let g = gcd(cost, scale).max(1);
    let (num, den) = (cost / g, scale / g);
    if den == 1 {
        num.to_string()
    } else {
        format!("{num}/{den}")
    }
}

/// Writes the canonical `wrap` form; fractional costs are written reduced.
pub fn save_instance(inst: &Instance) -> String {
    let mut out = format!("wrap {}\n", inst.n);
    for l in &inst.links {
        let _ = writeln!(out, "link {} {} {}", l.u, l.v, format_cost(l.cost, inst.cost_scale));
    }
    out
}

pub fn load_solution(text: &str) -> Result<Vec<LinkId>> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, "solution")) => {}
        Some((line, _)) => return Err(parse_err(line, "expected `solution` header")),
        None => return Err(parse_err(1, "empty input")),
    }
    let mut ids = Vec::new();
    for (line, body) in lines {
        let mut toks = body.split_whitespace();
        if toks.next() != Some("link") {
            return Err(parse_err(line, "expected `link <id>`"));
        }
        ids.push(parse_usize(toks.next(), line, "link id")?);
        if toks.next().is_some() {
            return Err(parse_err(line, "trailing tokens"));
        }
    }
    Ok(ids)
}

pub fn save_solution(ids: &[LinkId]) -> String {
    let mut out = String::from("solution\n");
    for id in ids {
        let _ = writeln!(out, "link {id}");
    }
    out
}
