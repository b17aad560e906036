//! Combinatorial plane embeddings: rotation systems, traced faces, the
//! vertex-face incidence graph and its (face-weighted) distances.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::planarity::planar_rotation;

/// Cyclic neighbour order per vertex. The face to the left of dart `u -> v`
/// continues with `v -> w`, where `w` follows `u` in the order around `v`.
pub type Rotation = BTreeMap<Vertex, Vec<Vertex>>;

pub type FaceId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Face {
    pub id: FaceId,
    pub boundary_vertices: BTreeSet<Vertex>,
    pub boundary_walk: Vec<(Vertex, Vertex)>,
    pub marked: bool,
}

fn check_rotation(g: &Graph, rotation: &Rotation) -> Result<()> {
    for v in g.vertices() {
        let Some(order) = rotation.get(&v) else {
            if g.degree(v) == 0 {
                continue;
            }
            return Err(Error::Rotation(format!("vertex {v} has no rotation")));
        };
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted != g.neighbors(v) {
            return Err(Error::Rotation(format!(
                "rotation at {v} is not a permutation of its neighbours"
            )));
        }
    }
    if let Some(v) = rotation.keys().find(|v| !g.contains(**v)) {
        return Err(Error::UnknownVertex(*v));
    }
    Ok(())
}

/// Traces the faces of a rotation system. Darts are scanned in lexicographic
/// order and each unvisited dart opens the next face id; isolated vertices get
/// one face each afterwards, in id order.
pub fn faces_from_rotation(g: &Graph, rotation: &Rotation) -> Result<Vec<Face>> {
    check_rotation(g, rotation)?;
    // position of each neighbour in the rotation around a vertex
    let mut pos: HashMap<(Vertex, Vertex), usize> = HashMap::new();
    for (&v, order) in rotation {
        for (i, &u) in order.iter().enumerate() {
            pos.insert((v, u), i);
        }
    }
    let mut visited: HashMap<(Vertex, Vertex), bool> = HashMap::new();
    let mut faces = Vec::new();
    let darts: Vec<(Vertex, Vertex)> = g
        .vertices()
        .flat_map(|u| g.neighbors(u).iter().map(move |&v| (u, v)))
        .collect();
    let limit = darts.len();
    for &start in &darts {
        if visited.contains_key(&start) {
            continue;
        }
        let mut walk = Vec::new();
        let mut dart = start;
        loop {
            if visited.insert(dart, true).is_some() {
                return Err(Error::Rotation(format!(
                    "face walk from {start:?} revisits dart {dart:?} before closing"
                )));
            }
            walk.push(dart);
            let (u, v) = dart;
            let order = &rotation[&v];
            let w = order[(pos[&(v, u)] + 1) % order.len()];
            dart = (v, w);
            if dart == start {
                break;
            }
            if walk.len() > limit {
                return Err(Error::Rotation("face walk does not close".into()));
            }
        }
        let boundary_vertices = walk.iter().map(|&(u, _)| u).collect();
        faces.push(Face {
            id: faces.len(),
            boundary_vertices,
            boundary_walk: walk,
            marked: false,
        });
    }
    for v in g.vertices().filter(|&v| g.degree(v) == 0) {
        faces.push(Face {
            id: faces.len(),
            boundary_vertices: BTreeSet::from([v]),
            boundary_walk: Vec::new(),
            marked: false,
        });
    }
    Ok(faces)
}

/// Embedding of a connected plane graph.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub graph: Graph,
    pub rotation: Rotation,
    pub faces: Vec<Face>,
    /// Index into `faces`.
    pub outer: usize,
    face_of_dart: HashMap<(Vertex, Vertex), usize>,
}

impl Embedding {
    /// Builds a connected genus-0 embedding from a rotation system, with the
    /// default outer face (longest boundary walk, lowest id on ties).
    pub fn from_rotation(g: Graph, rotation: Rotation) -> Result<Self> {
        let faces = faces_from_rotation(&g, &rotation)?;
        Self::from_faces(g, rotation, faces)
    }

    fn from_faces(g: Graph, rotation: Rotation, faces: Vec<Face>) -> Result<Self> {
        if g.is_empty() {
            return Err(Error::Input("cannot embed an empty graph".into()));
        }
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        let euler = g.n() as i64 - g.m() as i64 + faces.len() as i64;
        if euler != 2 {
            return Err(Error::Rotation(format!(
                "rotation system has Euler characteristic {euler}, expected 2"
            )));
        }
        let mut face_of_dart = HashMap::new();
        for (idx, f) in faces.iter().enumerate() {
            for &d in &f.boundary_walk {
                face_of_dart.insert(d, idx);
            }
        }
        let outer = default_outer(&faces);
        Ok(Embedding {
            graph: g,
            rotation,
            faces,
            outer,
            face_of_dart,
        })
    }

    /// Replaces the outer face; `face_id` is a face id, not an index.
    pub fn with_outer(mut self, face_id: FaceId) -> Result<Self> {
        self.outer = self
            .face_index(face_id)
            .ok_or(Error::UnknownFace(face_id))?;
        Ok(self)
    }

    pub fn face_index(&self, face_id: FaceId) -> Option<usize> {
        self.faces.iter().position(|f| f.id == face_id)
    }

    pub fn outer_face(&self) -> &Face {
        &self.faces[self.outer]
    }

    /// Index of the face to the left of dart `u -> v`.
    pub fn face_of_dart(&self, u: Vertex, v: Vertex) -> Option<usize> {
        self.face_of_dart.get(&(u, v)).copied()
    }

    /// Faces of the embedded induced subgraph `G[keep]`. Each face of the
    /// subgraph is a union of faces of this embedding, glued across every
    /// removed edge.
    pub fn induced_faces(&self, keep: &BTreeSet<Vertex>) -> InducedFaces {
        let mut uf = UnionFind::new(self.faces.len());
        for (u, v) in self.graph.edges() {
            if !(keep.contains(&u) && keep.contains(&v)) {
                let a = self.face_of_dart[&(u, v)];
                let b = self.face_of_dart[&(v, u)];
                uf.union(a, b);
            }
        }
        let mut class_of_root: BTreeMap<usize, usize> = BTreeMap::new();
        let mut faces: Vec<InducedFace> = Vec::new();
        let mut class = vec![0; self.faces.len()];
        for (idx, f) in self.faces.iter().enumerate() {
            let root = uf.find(idx);
            let c = *class_of_root.entry(root).or_insert_with(|| {
                faces.push(InducedFace::default());
                faces.len() - 1
            });
            class[idx] = c;
            faces[c].members.push(idx);
            faces[c]
                .boundary
                .extend(f.boundary_vertices.iter().filter(|v| keep.contains(v)));
        }
        InducedFaces {
            outer: class[self.outer],
            class,
            faces,
        }
    }
}

fn default_outer(faces: &[Face]) -> usize {
    let mut best = 0;
    for (idx, f) in faces.iter().enumerate() {
        let len = f.boundary_walk.len();
        let best_len = faces[best].boundary_walk.len();
        if len > best_len || (len == best_len && f.id < faces[best].id) {
            best = idx;
        }
    }
    best
}

/// Faces of an induced sub-embedding, each a class of parent faces.
#[derive(Debug, Clone)]
pub struct InducedFaces {
    pub faces: Vec<InducedFace>,
    /// Parent face index -> index into `faces`.
    pub class: Vec<usize>,
    /// Index of the face containing the parent's outer face.
    pub outer: usize,
}

#[derive(Debug, Clone, Default)]
pub struct InducedFace {
    /// Parent face indices merged into this face.
    pub members: Vec<usize>,
    pub boundary: BTreeSet<Vertex>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

/// Planar embedding of a connected graph, via the left-right planarity test.
pub fn embed_planar(g: &Graph) -> Result<Embedding> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let rotation = planar_rotation_of(g)?;
    Embedding::from_rotation(g.clone(), rotation).map_err(|e| match e {
        Error::Rotation(msg) => Error::Internal(format!("planarity embedding invalid: {msg}")),
        other => other,
    })
}

fn planar_rotation_of(g: &Graph) -> Result<Rotation> {
    let ids: Vec<Vertex> = g.vertices().collect();
    let index: HashMap<Vertex, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj: Vec<Vec<usize>> = ids
        .iter()
        .map(|&v| g.neighbors(v).iter().map(|u| index[u]).collect())
        .collect();
    let lists = planar_rotation(&adj).ok_or(Error::NonPlanar)?;
    Ok(lists
        .into_iter()
        .enumerate()
        .map(|(i, l)| (ids[i], l.into_iter().map(|j| ids[j]).collect()))
        .collect())
}

/// A possibly disconnected plane graph: one embedding per connected component,
/// with face ids numbered over the whole graph.
#[derive(Debug, Clone)]
pub struct PlaneGraph {
    pub graph: Graph,
    pub components: Vec<Embedding>,
}

impl PlaneGraph {
    pub fn embed(g: &Graph) -> Result<Self> {
        let mut rotation = Rotation::new();
        for comp in g.connected_components() {
            let sub = g.induced_unchecked(&comp);
            if sub.n() > 1 {
                rotation.extend(planar_rotation_of(&sub)?);
            }
        }
        Self::from_rotation(g, rotation, &BTreeSet::new())
    }

    /// Builds the embedding from an explicit rotation system and marks the
    /// listed face ids.
    pub fn from_rotation(g: &Graph, rotation: Rotation, marked: &BTreeSet<FaceId>) -> Result<Self> {
        let mut faces = faces_from_rotation(g, &rotation)?;
        for &id in marked {
            faces.get_mut(id).ok_or(Error::UnknownFace(id))?.marked = true;
        }
        let mut components = Vec::new();
        for comp in g.connected_components() {
            let sub = g.induced_unchecked(&comp);
            let sub_rot: Rotation = comp
                .iter()
                .filter_map(|v| rotation.get(v).map(|r| (*v, r.clone())))
                .collect();
            let sub_faces: Vec<Face> = faces
                .iter()
                .filter(|f| f.boundary_vertices.iter().any(|v| comp.contains(v)))
                .cloned()
                .collect();
            components.push(Embedding::from_faces(sub, sub_rot, sub_faces)?);
        }
        Ok(PlaneGraph {
            graph: g.clone(),
            components,
        })
    }

    pub fn faces(&self) -> impl Iterator<Item = &Face> {
        self.components.iter().flat_map(|e| e.faces.iter())
    }

    pub fn num_marked(&self) -> usize {
        self.faces().filter(|f| f.marked).count()
    }

    /// Component embedding containing vertex `v`.
    pub fn component_of(&self, v: Vertex) -> Option<&Embedding> {
        self.components.iter().find(|e| e.graph.contains(v))
    }

    pub fn rotation(&self) -> Rotation {
        self.components
            .iter()
            .flat_map(|e| e.rotation.iter().map(|(k, v)| (*k, v.clone())))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum VfiNode {
    Vertex(Vertex),
    Face(FaceId),
}

/// Bipartite vertex-face incidence graph.
#[derive(Debug, Clone)]
pub struct VfiGraph {
    nodes: Vec<VfiNode>,
    index: HashMap<VfiNode, usize>,
    adj: Vec<Vec<usize>>,
}

/// Incidence graph of an embedding: `v ~ f` iff `v` lies on the boundary of `f`.
pub fn build_vfi(e: &Embedding) -> VfiGraph {
    VfiGraph::from_incidences(
        e.graph.vertices(),
        e.faces.iter().map(|f| (f.id, &f.boundary_vertices)),
    )
}

impl VfiGraph {
    pub fn from_incidences<'a, V, F>(vertices: V, faces: F) -> Self
    where
        V: IntoIterator<Item = Vertex>,
        F: IntoIterator<Item = (FaceId, &'a BTreeSet<Vertex>)>,
    {
        let mut nodes: Vec<VfiNode> = vertices.into_iter().map(VfiNode::Vertex).collect();
        let nv = nodes.len();
        let mut index: HashMap<VfiNode, usize> =
            nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut adj = vec![Vec::new(); nv];
        for (id, boundary) in faces {
            let fi = nodes.len();
            nodes.push(VfiNode::Face(id));
            index.insert(VfiNode::Face(id), fi);
            adj.push(Vec::new());
            for v in boundary {
                let vi = index[&VfiNode::Vertex(*v)];
                adj[vi].push(fi);
                adj[fi].push(vi);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        VfiGraph { nodes, index, adj }
    }

    pub fn nodes(&self) -> &[VfiNode] {
        &self.nodes
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_incidences(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, node: VfiNode) -> impl Iterator<Item = VfiNode> + '_ {
        let list = self
            .index
            .get(&node)
            .map(|&i| self.adj[i].as_slice())
            .unwrap_or(&[]);
        list.iter().map(|&j| self.nodes[j])
    }

    pub fn is_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return true;
        }
        self.bfs(0).iter().all(Option::is_some)
    }

    fn bfs(&self, s: usize) -> Vec<Option<u64>> {
        let mut dist = vec![None; self.nodes.len()];
        dist[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].expect("queued nodes have distances");
            for &y in &self.adj[x] {
                if dist[y].is_none() {
                    dist[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    fn node_weight(&self, i: usize, weights: Option<&BTreeMap<FaceId, u64>>) -> u64 {
        match (self.nodes[i], weights) {
            (VfiNode::Face(f), Some(w)) => w.get(&f).copied().unwrap_or(0),
            _ => 0,
        }
    }

    /// Costs of cheapest paths from `a` to every node, where a path costs its
    /// length plus the weights of the faces it visits (endpoints included).
    /// `None` marks unreachable nodes.
    pub fn distances_from(
        &self,
        a: VfiNode,
        weights: Option<&BTreeMap<FaceId, u64>>,
    ) -> Result<Vec<Option<u64>>> {
        let s = *self.index.get(&a).ok_or_else(|| unknown_node(a))?;
        if weights.is_none() {
            return Ok(self.bfs(s));
        }
        let mut dist: Vec<Option<u64>> = vec![None; self.nodes.len()];
        let mut heap = BinaryHeap::new();
        let w0 = self.node_weight(s, weights);
        dist[s] = Some(w0);
        heap.push(Reverse((w0, s)));
        while let Some(Reverse((d, x))) = heap.pop() {
            if dist[x].is_some_and(|best| best < d) {
                continue;
            }
            for &y in &self.adj[x] {
                let nd = d + 1 + self.node_weight(y, weights);
                if dist[y].is_none_or(|best| nd < best) {
                    dist[y] = Some(nd);
                    heap.push(Reverse((nd, y)));
                }
            }
        }
        Ok(dist)
    }

    pub fn position(&self, node: VfiNode) -> Option<usize> {
        self.index.get(&node).copied()
    }

    /// Weighted vertex-face distance; `None` when `b` is unreachable.
    pub fn distance(
        &self,
        a: VfiNode,
        b: VfiNode,
        weights: Option<&BTreeMap<FaceId, u64>>,
    ) -> Result<Option<u64>> {
        let t = *self.index.get(&b).ok_or_else(|| unknown_node(b))?;
        Ok(self.distances_from(a, weights)?[t])
    }

    /// Largest finite weighted distance over all ordered node pairs.
    pub fn diameter(&self, weights: Option<&BTreeMap<FaceId, u64>>) -> u64 {
        let mut best = 0;
        for &node in &self.nodes {
            let dist = self.distances_from(node, weights).expect("own node");
            best = best.max(dist.into_iter().flatten().max().unwrap_or(0));
        }
        best
    }
}

fn unknown_node(n: VfiNode) -> Error {
    match n {
        VfiNode::Vertex(v) => Error::UnknownVertex(v),
        VfiNode::Face(f) => Error::UnknownFace(f),
    }
}

/// Weighted vertex-face distance between two nodes of `v`.
pub fn vfi_distance(
    v: &VfiGraph,
    a: VfiNode,
    b: VfiNode,
    weights: Option<&BTreeMap<FaceId, u64>>,
) -> Result<Option<u64>> {
    v.distance(a, b, weights)
}
