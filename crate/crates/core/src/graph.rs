//! Simple undirected graphs with stable vertex ids, induced subgraphs,
//! quotients by contraction, connectivity and bipartiteness.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};

pub type Vertex = usize;
pub type Edge = (Vertex, Vertex);

/// Undirected simple graph. Vertex ids are arbitrary non-negative integers and
/// survive every derived-graph operation unchanged.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    adj: BTreeMap<Vertex, Vec<Vertex>>,
    apex: BTreeSet<Vertex>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vertices<I: IntoIterator<Item = Vertex>>(vertices: I) -> Self {
        let mut g = Graph::new();
        for v in vertices {
            g.adj.entry(v).or_default();
        }
        g
    }

    /// Builds a graph from a vertex list and an edge list. Rejects self-loops,
    /// repeated edges and endpoints missing from `vertices`.
    pub fn from_edges<I, J>(vertices: I, edges: J) -> Result<Self>
    where
        I: IntoIterator<Item = Vertex>,
        J: IntoIterator<Item = Edge>,
    {
        let mut g = Graph::with_vertices(vertices);
        for (u, v) in edges {
            g.try_add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: Vertex) {
        self.adj.entry(v).or_default();
    }

    pub fn try_add_edge(&mut self, u: Vertex, v: Vertex) -> Result<()> {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        for x in [u, v] {
            if !self.adj.contains_key(&x) {
                return Err(Error::UnknownVertex(x));
            }
        }
        if self.has_edge(u, v) {
            return Err(Error::DuplicateEdge(u.min(v), u.max(v)));
        }
        self.insert_edge(u, v);
        Ok(())
    }

    /// Adds the edge unless it is a loop or already present. Both endpoints
    /// are created if missing.
    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> bool {
        if u == v {
            return false;
        }
        self.add_vertex(u);
        self.add_vertex(v);
        if self.has_edge(u, v) {
            return false;
        }
        self.insert_edge(u, v);
        true
    }

    fn insert_edge(&mut self, u: Vertex, v: Vertex) {
        for (a, b) in [(u, v), (v, u)] {
            let list = self.adj.get_mut(&a).expect("endpoint present");
            let pos = list.binary_search(&b).unwrap_err();
            list.insert(pos, b);
        }
    }

    pub fn remove_edge(&mut self, u: Vertex, v: Vertex) -> bool {
        let mut removed = false;
        for (a, b) in [(u, v), (v, u)] {
            if let Some(list) = self.adj.get_mut(&a) {
                if let Ok(pos) = list.binary_search(&b) {
                    list.remove(pos);
                    removed = true;
                }
            }
        }
        removed
    }

    pub fn set_apex_set(&mut self, apex: BTreeSet<Vertex>) -> Result<()> {
        if let Some(&v) = apex.iter().find(|v| !self.adj.contains_key(v)) {
            return Err(Error::UnknownVertex(v));
        }
        self.apex = apex;
        Ok(())
    }

    pub fn apex_set(&self) -> &BTreeSet<Vertex> {
        &self.apex
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.adj.values().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_set(&self) -> BTreeSet<Vertex> {
        self.adj.keys().copied().collect()
    }

    /// Sorted neighbour list; empty for unknown vertices.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        self.adj.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.neighbors(v).len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj
            .get(&u)
            .is_some_and(|list| list.binary_search(&v).is_ok())
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj
            .iter()
            .flat_map(|(&u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    fn check_known<'a, I: IntoIterator<Item = &'a Vertex>>(&self, s: I) -> Result<()> {
        for &v in s {
            if !self.contains(v) {
                return Err(Error::UnknownVertex(v));
            }
        }
        Ok(())
    }

    pub fn induced_subgraph(&self, s: &BTreeSet<Vertex>) -> Result<Graph> {
        self.check_known(s)?;
        Ok(self.induced_unchecked(s))
    }

    pub(crate) fn induced_unchecked(&self, s: &BTreeSet<Vertex>) -> Graph {
        let adj = s
            .iter()
            .map(|&v| {
                let list = self
                    .neighbors(v)
                    .iter()
                    .copied()
                    .filter(|u| s.contains(u))
                    .collect();
                (v, list)
            })
            .collect();
        let apex = self.apex.intersection(s).copied().collect();
        Graph { adj, apex }
    }

    /// The graph with the given vertices removed.
    pub fn without(&self, removed: &BTreeSet<Vertex>) -> Graph {
        let keep: BTreeSet<Vertex> = self.vertices().filter(|v| !removed.contains(v)).collect();
        self.induced_unchecked(&keep)
    }

    /// Maximal connected vertex sets, ordered by their minimum id.
    pub fn connected_components(&self) -> Vec<BTreeSet<Vertex>> {
        components_of(self, |_| true)
    }

    /// Connected components of `G[x]`, ordered by minimum id.
    pub fn components_within(&self, x: &BTreeSet<Vertex>) -> Vec<BTreeSet<Vertex>> {
        components_of(self, |v| x.contains(&v))
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    pub fn bipartition(&self) -> Bipartition {
        bipartition_within(self, |_| true)
    }

    pub fn is_bipartite(&self) -> bool {
        matches!(self.bipartition(), Bipartition::Bipartite(_))
    }

    /// Contracts every connected component of `G[x]` to a single vertex named
    /// by the component's minimum id.
    pub fn contract(&self, x: &BTreeSet<Vertex>) -> Result<QuotientGraph> {
        self.check_known(x)?;
        let mut image = BTreeMap::new();
        let mut preimage: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
        for comp in self.components_within(x) {
            let rep = *comp.iter().next().expect("components are non-empty");
            for &v in &comp {
                image.insert(v, rep);
            }
            preimage.insert(rep, comp.into_iter().collect());
        }
        for v in self.vertices() {
            if !x.contains(&v) {
                image.insert(v, v);
                preimage.insert(v, vec![v]);
            }
        }
        let mut graph = Graph::with_vertices(preimage.keys().copied());
        for (u, v) in self.edges() {
            let (a, b) = (image[&u], image[&v]);
            graph.add_edge(a, b);
        }
        graph.apex = self
            .apex
            .iter()
            .filter(|v| !x.contains(v))
            .copied()
            .collect();
        Ok(QuotientGraph {
            graph,
            preimage,
            image,
            contracted_set: x.clone(),
        })
    }
}

fn components_of<F: Fn(Vertex) -> bool>(g: &Graph, keep: F) -> Vec<BTreeSet<Vertex>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for s in g.vertices() {
        if !keep(s) || seen.contains(&s) {
            continue;
        }
        let mut comp = BTreeSet::new();
        let mut queue = VecDeque::from([s]);
        seen.insert(s);
        while let Some(v) = queue.pop_front() {
            comp.insert(v);
            for &u in g.neighbors(v) {
                if keep(u) && seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Result of a two-colouring attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bipartition {
    /// Colour 0 or 1 per vertex; the minimum-id vertex of every component has
    /// colour 0, which makes the colouring unique.
    Bipartite(BTreeMap<Vertex, u8>),
    /// A closed walk of odd length, listed without repeating the first vertex.
    OddCycle(Vec<Vertex>),
}

impl Bipartition {
    pub fn coloring(&self) -> Option<&BTreeMap<Vertex, u8>> {
        match self {
            Bipartition::Bipartite(c) => Some(c),
            Bipartition::OddCycle(_) => None,
        }
    }
}

/// Two-colours `G[{v : keep(v)}]`.
pub(crate) fn bipartition_within<F: Fn(Vertex) -> bool>(g: &Graph, keep: F) -> Bipartition {
    let mut color: BTreeMap<Vertex, u8> = BTreeMap::new();
    let mut parent: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    for s in g.vertices() {
        if !keep(s) || color.contains_key(&s) {
            continue;
        }
        color.insert(s, 0);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            let cv = color[&v];
            for &u in g.neighbors(v) {
                if !keep(u) {
                    continue;
                }
                match color.get(&u) {
                    None => {
                        color.insert(u, 1 - cv);
                        parent.insert(u, v);
                        queue.push_back(u);
                    }
                    Some(&cu) if cu == cv => {
                        return Bipartition::OddCycle(odd_cycle(&parent, v, u));
                    }
                    _ => {}
                }
            }
        }
    }
    Bipartition::Bipartite(color)
}

/// Closes the BFS tree paths from `a` and `b` (equal depth parity) at their
/// lowest common ancestor.
fn odd_cycle(parent: &BTreeMap<Vertex, Vertex>, a: Vertex, b: Vertex) -> Vec<Vertex> {
    let path_to_root = |mut v: Vertex| {
        let mut path = vec![v];
        while let Some(&p) = parent.get(&v) {
            path.push(p);
            v = p;
        }
        path
    };
    let pa = path_to_root(a);
    let pb = path_to_root(b);
    let on_a: BTreeSet<Vertex> = pa.iter().copied().collect();
    let lca_pos_b = pb
        .iter()
        .position(|v| on_a.contains(v))
        .expect("same BFS tree");
    let lca = pb[lca_pos_b];
    let lca_pos_a = pa.iter().position(|&v| v == lca).expect("lca on path");
    let mut cycle: Vec<Vertex> = pa[..=lca_pos_a].to_vec();
    cycle.extend(pb[..lca_pos_b].iter().rev());
    cycle
}

/// `G/X` together with the map back to the original vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientGraph {
    pub graph: Graph,
    /// Quotient vertex -> sorted original vertices.
    pub preimage: BTreeMap<Vertex, Vec<Vertex>>,
    /// Original vertex -> quotient vertex.
    pub image: BTreeMap<Vertex, Vertex>,
    pub contracted_set: BTreeSet<Vertex>,
}

impl QuotientGraph {
    /// Whether quotient vertex `q` stands for a component of the contracted set.
    pub fn is_contracted(&self, q: Vertex) -> bool {
        self.contracted_set.contains(&q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(0..n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let edges: Vec<Edge> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Graph::from_edges(0..n, edges).unwrap()
    }

    fn set(v: &[Vertex]) -> BTreeSet<Vertex> {
        v.iter().copied().collect()
    }

    #[test]
    fn rejects_loops_duplicates_and_unknown_vertices() {
        assert!(matches!(
            Graph::from_edges(0..2, [(1, 1)]),
            Err(Error::SelfLoop(1))
        ));
        assert!(matches!(
            Graph::from_edges(0..2, [(0, 1), (1, 0)]),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            Graph::from_edges(0..2, [(0, 5)]),
            Err(Error::UnknownVertex(5))
        ));
        let mut g = cycle(3);
        assert!(g.set_apex_set(set(&[7])).is_err());
    }

    #[test]
    fn induced_subgraph_restricts_edges() {
        let c4 = Graph::from_edges([1, 2, 3, 4], [(1, 2), (2, 3), (3, 4), (4, 1)]).unwrap();
        let h = c4.induced_subgraph(&set(&[1, 2])).unwrap();
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(1, 2)]);
        assert!(c4.induced_subgraph(&BTreeSet::new()).unwrap().is_empty());
        let tri = complete(4).induced_subgraph(&set(&[0, 1, 2])).unwrap();
        assert_eq!(tri.m(), 3);
        assert!(matches!(
            c4.induced_subgraph(&set(&[9])),
            Err(Error::UnknownVertex(9))
        ));
    }

    #[test]
    fn contract_path_prefix() {
        let path = Graph::from_edges([0, 1, 2], [(0, 1), (1, 2)]).unwrap();
        let q = path.contract(&set(&[0, 1])).unwrap();
        assert_eq!(q.graph.n(), 2);
        assert_eq!(q.graph.m(), 1);
        assert_eq!(q.preimage[&0], vec![0, 1]);
        assert_eq!(q.preimage[&2], vec![2]);
    }

    #[test]
    fn contract_empty_set_is_identity() {
        let g = complete(4);
        let q = g.contract(&BTreeSet::new()).unwrap();
        assert_eq!(q.graph, g);
        assert!(q.preimage.values().all(|p| p.len() == 1));
    }

    #[test]
    fn contract_non_adjacent_pair_keeps_c4() {
        let c4 = Graph::from_edges([1, 2, 3, 4], [(1, 2), (2, 3), (3, 4), (4, 1)]).unwrap();
        let q = c4.contract(&set(&[1, 3])).unwrap();
        assert_eq!(q.graph.n(), 4);
        assert_eq!(q.graph, c4);
        assert!(q.graph.contract(&set(&[8])).is_err());
    }

    #[test]
    fn components() {
        let g = Graph::from_edges(0..4, [(0, 1), (2, 3)]).unwrap();
        let comps = g.connected_components();
        assert_eq!(comps, vec![set(&[0, 1]), set(&[2, 3])]);
        assert!(Graph::new().connected_components().is_empty());
        assert_eq!(cycle(5).connected_components(), vec![set(&[0, 1, 2, 3, 4])]);
    }

    #[test]
    fn bipartition_examples() {
        let c4 = cycle(4).bipartition();
        let col = c4.coloring().unwrap();
        assert_eq!(col.values().copied().collect::<Vec<_>>(), vec![0, 1, 0, 1]);

        match cycle(5).bipartition() {
            Bipartition::OddCycle(c) => {
                assert_eq!(c.len(), 5);
                assert_eq!(c.iter().collect::<BTreeSet<_>>().len(), 5);
            }
            _ => panic!("C5 is not bipartite"),
        }
        assert!(!complete(4).is_bipartite());
    }

    #[test]
    fn odd_cycle_witness_is_a_closed_walk() {
        let g = Graph::from_edges(
            0..7,
            [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 2)],
        )
        .unwrap();
        let Bipartition::OddCycle(c) = g.bipartition() else {
            panic!("contains a 5-cycle")
        };
        assert_eq!(c.len() % 2, 1);
        for i in 0..c.len() {
            assert!(g.has_edge(c[i], c[(i + 1) % c.len()]));
        }
    }
}
