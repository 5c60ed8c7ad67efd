//! The link intersection graph and the three routes to `Drop`.

use petgraph::unionfind::UnionFind;

use crate::directed::{responsibilities, spans_cross, Arborescence};
use crate::error::{Error, Result};
use crate::model::{Cut, Instance, Link, LinkId, Vertex};

/// Links intersect when they cross as chords of the ring or share an
/// endpoint. A link never intersects itself.
pub fn intersects(a: &Link, b: &Link) -> bool {
    if a.id == b.id {
        return false;
    }
    a.has_endpoint(b.u) || a.has_endpoint(b.v) || spans_cross((a.u, a.v), (b.u, b.v))
}

/// Adjacency of the link intersection graph over a whole instance.
#[derive(Debug, Clone)]
pub struct IntersectionGraph {
    adjacency: Vec<Vec<LinkId>>,
}

impl IntersectionGraph {
    pub fn new(inst: &Instance) -> Self {
        let links = inst.links();
        let adjacency =
            links.iter().map(|a| links.iter().filter(|b| intersects(a, b)).map(|b| b.id).collect()).collect();
        IntersectionGraph { adjacency }
    }

    pub fn neighbours(&self, id: LinkId) -> &[LinkId] {
        &self.adjacency[id]
    }

    pub fn adjacent(&self, a: LinkId, b: LinkId) -> bool {
        self.adjacency[a].contains(&b)
    }
}

/// Connected components of `H[set]`, each sorted, ordered by smallest id.
pub fn components(inst: &Instance, set: &[LinkId]) -> Vec<Vec<LinkId>> {
    let mut uf = UnionFind::new(set.len());
    for i in 0..set.len() {
        for j in i + 1..set.len() {
            if intersects(inst.link(set[i]), inst.link(set[j])) {
                uf.union(i, j);
            }
        }
    }
    let mut groups: Vec<(usize, Vec<LinkId>)> = Vec::new();
    for (i, &id) in set.iter().enumerate() {
        let root = uf.find(i);
        match groups.iter_mut().find(|(r, _)| *r == root) {
            Some((_, g)) => g.push(id),
            None => groups.push((root, vec![id])),
        }
    }
    let mut out: Vec<Vec<LinkId>> = groups
        .into_iter()
        .map(|(_, mut g)| {
            g.sort_unstable();
            g
        })
        .collect();
    out.sort();
    out
}

/// Endpoints of a link set, sorted and deduplicated.
pub fn endpoints(inst: &Instance, set: &[LinkId]) -> Vec<Vertex> {
    let mut vs: Vec<Vertex> = set.iter().flat_map(|&i| inst.link(i).endpoints()).collect();
    vs.sort_unstable();
    vs.dedup();
    vs
}

/// Is there a path in `H[set]` from a link at `u` to a link at `v`?
pub fn connected_vertices(inst: &Instance, set: &[LinkId], u: Vertex, v: Vertex) -> bool {
    components(inst, set).iter().any(|comp| {
        let at = |x: Vertex| comp.iter().any(|&i| inst.link(i).has_endpoint(x));
        at(u) && at(v)
    })
}

/// The `v`-bad vertices: descendants of `v`, as an inclusive interval.
pub fn v_bad_interval(arb: &Arborescence, v: Vertex) -> (Vertex, Vertex) {
    arb.descendants(v)
}

/// Is `δ_set(cut)` nonempty?
pub fn covered_by(inst: &Instance, set: &[LinkId], cut: Cut) -> bool {
    set.iter().any(|&i| inst.link(i).covers(cut))
}

/// Indices of arborescence links all of whose responsible cuts are covered.
pub fn drop_by_definition(inst: &Instance, arb: &Arborescence, set: &[LinkId]) -> Vec<usize> {
    responsibilities(inst, arb)
        .iter()
        .enumerate()
        .filter(|(_, cuts)| cuts.iter().all(|&c| covered_by(inst, set, c)))
        .map(|(i, _)| i)
        .collect()
}

/// Indices of links whose head connects in `H[set]` to a non-descendant.
pub fn drop_by_characterization(inst: &Instance, arb: &Arborescence, set: &[LinkId]) -> Vec<usize> {
    let comps = components(inst, set);
    let links = arb.links();
    (0..links.len())
        .filter(|&i| {
            let v = links[i].head;
            comps.iter().any(|comp| {
                let touches_v = comp.iter().any(|&j| inst.link(j).has_endpoint(v));
                touches_v && endpoints(inst, comp).into_iter().any(|w| !arb.is_descendant(w, v))
            })
        })
        .collect()
}

/// Closed form for a set connected in `H`: every link entering a vertex of
/// the set except the one entering the set's least common ancestor.
pub fn drop_connected(inst: &Instance, arb: &Arborescence, set: &[LinkId]) -> Result<Vec<usize>> {
    if set.is_empty() {
        return Ok(Vec::new());
    }
    if components(inst, set).len() != 1 {
        return Err(Error::NotConnected);
    }
    Ok(drop_of_component(inst, arb, set))
}

fn drop_of_component(inst: &Instance, arb: &Arborescence, comp: &[LinkId]) -> Vec<usize> {
    let vs = endpoints(inst, comp);
    let top = arb.lca(&vs);
    vs.into_iter().filter(|&v| v != top).filter_map(|v| arb.in_link(v)).collect()
}

/// Union of the closed form over the components of `H[set]`.
pub fn drop_componentwise(inst: &Instance, arb: &Arborescence, set: &[LinkId]) -> Vec<usize> {
    let mut out: Vec<usize> =
        components(inst, set).iter().flat_map(|comp| drop_of_component(inst, arb, comp)).collect();
    out.sort_unstable();
    out
}

/// Default `Drop` used by the solvers.
pub fn drop_set(inst: &Instance, arb: &Arborescence, set: &[LinkId]) -> Vec<usize> {
    drop_componentwise(inst, arb, set)
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

    #[test]
    fn figure_intersections() {
        let inst = Instance::new(11, [(10, 3, 1), (1, 5, 1), (6, 10, 1)]).unwrap();
        let (l1, l2, l3) = (inst.link(0), inst.link(1), inst.link(2));
        assert!(intersects(l1, l2));
        assert!(intersects(l1, l3));
        assert!(!intersects(l2, l3));
        assert!(!intersects(l1, l1));
    }

    #[test]
    fn vertex_connectivity() {
        let inst = r3();
        assert!(connected_vertices(&inst, &[1], 1, 2));
        assert!(!connected_vertices(&inst, &[2], 2, 0));
        assert!(connected_vertices(&inst, &[1, 2], 0, 2));
    }

    #[test]
    fn bad_intervals() {
        let inst = r3();
        let arb = r3_arb(&inst);
        assert_eq!(v_bad_interval(&arb, 1), (1, 2));
        assert_eq!(v_bad_interval(&arb, 2), (2, 2));
        assert_eq!(v_bad_interval(&arb, 0), (0, 2));
    }

    #[test]
    fn drop_examples_agree() {
        let inst = r3();
        let arb = r3_arb(&inst);
        for (set, expected) in [(vec![1], vec![1]), (vec![2], vec![0]), (vec![], vec![])] {
            assert_eq!(drop_by_definition(&inst, &arb, &set), expected);
            assert_eq!(drop_by_characterization(&inst, &arb, &set), expected);
            assert_eq!(drop_componentwise(&inst, &arb, &set), expected);
        }
        assert_eq!(drop_connected(&inst, &arb, &[2]).unwrap(), vec![0]);
        let mut both = drop_connected(&inst, &arb, &[1, 2]).unwrap();
        both.sort_unstable();
        assert_eq!(both, vec![0, 1]);
        assert_eq!(drop_connected(&inst, &arb, &[1]).unwrap(), vec![1]);
    }

    #[test]
    fn chain_of_links_reaches_good_vertex() {
        // Path 0-1-2-3-4-5 rooted at 0 with the arborescence 0->1->2->3->4->5.
        // Links l0={3,5}, l1={2,4}, l2={1,3} chain from head 5 to vertex 1,
        // which is 5-good, so (4,5) drops.
        let inst =
            Instance::new(6, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 5, 1), (3, 5, 1), (2, 4, 1), (1, 3, 1)])
                .unwrap();
        let sol = DirectedSolution::new((0..5).map(|i| DirectedLink::new(i, i + 1, inst.link(i))).collect());
        let arb = Arborescence::build(&inst, &sol).unwrap();
        let k = [5, 6, 7];
        assert!(drop_by_characterization(&inst, &arb, &k).contains(&4));
        assert_eq!(drop_by_definition(&inst, &arb, &k), drop_by_characterization(&inst, &arb, &k));
    }

    #[test]
    fn disconnected_set_is_rejected() {
        let inst = Instance::new(5, [(1, 2, 1), (3, 4, 1), (0, 1, 1)]).unwrap();
        let sol = DirectedSolution::new(vec![
            DirectedLink::new(0, 1, inst.link(2)),
            DirectedLink::new(1, 2, inst.link(0)),
            DirectedLink::new(0, 4, inst.link(2)),
            DirectedLink::new(4, 3, inst.link(1)),
        ]);
        let arb = Arborescence::build(&inst, &sol).unwrap();
        assert_eq!(drop_connected(&inst, &arb, &[0, 1]), Err(Error::NotConnected));
    }

    #[test]
    fn single_link_to_root_drops_its_head() {
        let inst = Instance::new(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1)]).unwrap();
        let sol = DirectedSolution::new(vec![
            DirectedLink::new(0, 1, inst.link(0)),
            DirectedLink::new(1, 2, inst.link(1)),
            DirectedLink::new(2, 3, inst.link(2)),
        ]);
        let arb = Arborescence::build(&inst, &sol).unwrap();
        // {0,3} touches head 3 and the 3-good root; heads 1 and 2 are untouched.
        assert_eq!(drop_by_characterization(&inst, &arb, &[3]), vec![2]);
        assert!(drop_by_characterization(&inst, &arb, &[]).is_empty());
    }
}
