//! Odd cycle transversal and edge bipartization: instances, the brute-force
//! oracle, tree-decomposition DP (plain and on quotients) and the Baker
//! driver that enumerates `(i, Z')` pairs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Vertex};

pub mod baker;
mod dp;

pub use baker::{baker_solve, BakerOptions, BakerOutcome, BakerStats};
pub use dp::{dp_solve, dp_solve_contracted};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Oct,
    Eb,
}

impl std::str::FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "oct" => Ok(ProblemKind::Oct),
            "eb" => Ok(ProblemKind::Eb),
            other => Err(Error::Input(format!(
                "unknown problem `{other}`, expected oct or eb"
            ))),
        }
    }
}

/// Vertices (OCT) or edges (EB) that a solution may use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Candidate {
    Vertices(BTreeSet<Vertex>),
    Edges(BTreeSet<Edge>),
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Graph,
    pub problem: ProblemKind,
    pub k: usize,
    pub candidate: Candidate,
}

/// Every vertex (OCT) or every edge (EB).
pub fn trivial_candidate(g: &Graph, problem: ProblemKind) -> Candidate {
    match problem {
        ProblemKind::Oct => Candidate::Vertices(g.vertex_set()),
        ProblemKind::Eb => Candidate::Edges(g.edges().collect()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum Deletion {
    Vertices(Vec<Vertex>),
    Edges(Vec<Edge>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Solution {
    pub deleted: Deletion,
    pub size: usize,
}

impl Instance {
    /// Instance with the trivial candidate set.
    pub fn new(graph: Graph, problem: ProblemKind, k: usize) -> Self {
        let candidate = trivial_candidate(&graph, problem);
        Instance {
            graph,
            problem,
            k,
            candidate,
        }
    }

    pub fn with_candidate(
        graph: Graph,
        problem: ProblemKind,
        k: usize,
        candidate: Candidate,
    ) -> Result<Self> {
        match (&candidate, problem) {
            (Candidate::Vertices(c), ProblemKind::Oct) => {
                if let Some(v) = c.iter().find(|v| !graph.contains(**v)) {
                    return Err(Error::UnknownVertex(*v));
                }
            }
            (Candidate::Edges(c), ProblemKind::Eb) => {
                if let Some((u, v)) = c.iter().find(|(u, v)| u >= v || !graph.has_edge(*u, *v)) {
                    return Err(Error::Input(format!(
                        "candidate edge ({u}, {v}) is not an edge u < v of the graph"
                    )));
                }
            }
            _ => {
                return Err(Error::Input(
                    "candidate kind does not match the problem".into(),
                ))
            }
        }
        Ok(Instance {
            graph,
            problem,
            k,
            candidate,
        })
    }

    /// Candidate items as sorted ids: vertex ids for OCT, positions in the
    /// lexicographic edge list for EB.
    pub(crate) fn candidate_items(&self) -> BTreeSet<usize> {
        match &self.candidate {
            Candidate::Vertices(c) => c.clone(),
            Candidate::Edges(c) => {
                let idx = self.edge_index();
                c.iter().map(|e| idx[e]).collect()
            }
        }
    }

    pub(crate) fn edge_index(&self) -> BTreeMap<Edge, usize> {
        self.graph
            .edges()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect()
    }

    pub(crate) fn solution_from_items(&self, items: &[usize]) -> Solution {
        let deleted = match self.problem {
            ProblemKind::Oct => Deletion::Vertices(items.to_vec()),
            ProblemKind::Eb => {
                let edges: Vec<Edge> = self.graph.edges().collect();
                Deletion::Edges(items.iter().map(|&i| edges[i]).collect())
            }
        };
        Solution {
            deleted,
            size: items.len(),
        }
    }

    /// Whether `sol` fits the budget, uses only candidates and leaves a
    /// bipartite graph.
    pub fn is_solution(&self, sol: &Solution) -> bool {
        if sol.size > self.k {
            return false;
        }
        match (&sol.deleted, &self.candidate) {
            (Deletion::Vertices(vs), Candidate::Vertices(c)) => {
                let set: BTreeSet<Vertex> = vs.iter().copied().collect();
                set.len() == sol.size
                    && set.is_subset(c)
                    && bipartite_without(&self.graph, &set, &BTreeSet::new())
            }
            (Deletion::Edges(es), Candidate::Edges(c)) => {
                let set: BTreeSet<Edge> = es.iter().copied().collect();
                set.len() == sol.size
                    && set.is_subset(c)
                    && bipartite_without(&self.graph, &BTreeSet::new(), &set)
            }
            _ => false,
        }
    }
}

/// Two-colourability of `G - vertices - edges`; edges are given as `(u, v)`
/// with `u < v`.
pub fn bipartite_without(g: &Graph, vertices: &BTreeSet<Vertex>, edges: &BTreeSet<Edge>) -> bool {
    let mut color: BTreeMap<Vertex, u8> = BTreeMap::new();
    for s in g.vertices() {
        if vertices.contains(&s) || color.contains_key(&s) {
            continue;
        }
        color.insert(s, 0);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            let cv = color[&v];
            for &u in g.neighbors(v) {
                if vertices.contains(&u) || edges.contains(&(v.min(u), v.max(u))) {
                    continue;
                }
                match color.get(&u) {
                    None => {
                        color.insert(u, 1 - cv);
                        queue.push_back(u);
                    }
                    Some(&cu) if cu == cv => return false,
                    _ => {}
                }
            }
        }
    }
    true
}

/// Exhaustive search over candidate subsets by increasing size, each size
/// in lexicographic order. The first hit is the lexicographically least
/// minimum solution.
pub fn brute_force(inst: &Instance) -> Option<Solution> {
    match &inst.candidate {
        Candidate::Vertices(c) => {
            let none = BTreeSet::new();
            (0..=inst.k.min(c.len())).find_map(|s| {
                c.iter().copied().combinations(s).find_map(|combo| {
                    let set: BTreeSet<Vertex> = combo.iter().copied().collect();
                    bipartite_without(&inst.graph, &set, &none).then_some(Solution {
                        size: s,
                        deleted: Deletion::Vertices(combo),
                    })
                })
            })
        }
        Candidate::Edges(c) => {
            let none = BTreeSet::new();
            (0..=inst.k.min(c.len())).find_map(|s| {
                c.iter().copied().combinations(s).find_map(|combo| {
                    let set: BTreeSet<Edge> = combo.iter().copied().collect();
                    bipartite_without(&inst.graph, &none, &set).then_some(Solution {
                        size: s,
                        deleted: Deletion::Edges(combo),
                    })
                })
            })
        }
    }
}
