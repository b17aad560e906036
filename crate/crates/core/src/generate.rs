//! Seeded generators for the test corpus. Every generator also returns a
//! rotation system realising a plane embedding.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::Rotation;
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone)]
pub struct Generated {
    pub graph: Graph,
    pub rotation: Rotation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphKind {
    Grid {
        rows: usize,
        cols: usize,
    },
    Cycle {
        n: usize,
    },
    /// Random triangulation on `n` vertices (stacked insertions followed by
    /// random edge flips); each edge is then dropped with probability `drop`.
    RandomPlanar {
        n: usize,
        drop: f64,
    },
    /// Grid with `chords` random unit-square diagonals.
    GridWithChords {
        rows: usize,
        cols: usize,
        chords: usize,
    },
}

pub fn generate(kind: GraphKind, seed: u64) -> Result<Generated> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        GraphKind::Grid { rows, cols } => grid(rows, cols),
        GraphKind::Cycle { n } => cycle(n),
        GraphKind::RandomPlanar { n, drop } => {
            if !(0.0..=1.0).contains(&drop) {
                return Err(Error::Input(format!(
                    "drop probability {drop} outside [0, 1]"
                )));
            }
            Ok(random_planar(n, drop, &mut rng))
        }
        GraphKind::GridWithChords { rows, cols, chords } => {
            grid_with_chords(rows, cols, chords, &mut rng)
        }
    }
}

/// Counter-clockwise neighbour order for a grid cell: east, north, west, south,
/// with the diagonals slotted between them.
fn grid_rotation(g: &Graph, rows: usize, cols: usize) -> Rotation {
    let dirs: [(i64, i64); 8] = [
        (0, 1),
        (-1, 1),
        (-1, 0),
        (-1, -1),
        (0, -1),
        (1, -1),
        (1, 0),
        (1, 1),
    ];
    let mut rot = Rotation::new();
    for i in 0..rows as i64 {
        for j in 0..cols as i64 {
            let v = (i * cols as i64 + j) as Vertex;
            let order: Vec<Vertex> = dirs
                .iter()
                .filter_map(|&(di, dj)| {
                    let (a, b) = (i + di, j + dj);
                    if a < 0 || b < 0 || a >= rows as i64 || b >= cols as i64 {
                        return None;
                    }
                    let u = (a * cols as i64 + b) as Vertex;
                    g.has_edge(v, u).then_some(u)
                })
                .collect();
            if !order.is_empty() {
                rot.insert(v, order);
            }
        }
    }
    rot
}

pub fn grid(rows: usize, cols: usize) -> Result<Generated> {
    if rows == 0 || cols == 0 {
        return Err(Error::Input("grid dimensions must be positive".into()));
    }
    let mut g = Graph::with_vertices(0..rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let v = i * cols + j;
            if j + 1 < cols {
                g.add_edge(v, v + 1);
            }
            if i + 1 < rows {
                g.add_edge(v, v + cols);
            }
        }
    }
    let rotation = grid_rotation(&g, rows, cols);
    Ok(Generated { graph: g, rotation })
}

pub fn cycle(n: usize) -> Result<Generated> {
    if n < 3 {
        return Err(Error::Input("a cycle needs at least 3 vertices".into()));
    }
    let g = Graph::from_edges(0..n, (0..n).map(|i| (i, (i + 1) % n)))?;
    let rotation = (0..n)
        .map(|i| (i, vec![(i + 1) % n, (i + n - 1) % n]))
        .collect();
    Ok(Generated { graph: g, rotation })
}

fn grid_with_chords(
    rows: usize,
    cols: usize,
    chords: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Generated> {
    let base = grid(rows, cols)?;
    let mut g = base.graph;
    let mut cells: Vec<(usize, usize)> = (0..rows.saturating_sub(1))
        .flat_map(|i| (0..cols.saturating_sub(1)).map(move |j| (i, j)))
        .collect();
    if chords > cells.len() {
        return Err(Error::Input(format!(
            "{chords} chords requested but the grid has {} cells",
            cells.len()
        )));
    }
    cells.shuffle(rng);
    for &(i, j) in cells.iter().take(chords) {
        let v = i * cols + j;
        if rng.gen_bool(0.5) {
            g.add_edge(v, v + cols + 1);
        } else {
            g.add_edge(v + 1, v + cols);
        }
    }
    let rotation = grid_rotation(&g, rows, cols);
    Ok(Generated { graph: g, rotation })
}

/// Oriented triangles; a dart `x -> y` belongs to exactly one triangle.
struct Triangulation {
    faces: Vec<[Vertex; 3]>,
    dart_face: HashMap<(Vertex, Vertex), usize>,
    edges: HashSet<(Vertex, Vertex)>,
}

impl Triangulation {
    fn set_face(&mut self, idx: usize, t: [Vertex; 3]) {
        if idx == self.faces.len() {
            self.faces.push(t);
        } else {
            self.faces[idx] = t;
        }
        for k in 0..3 {
            self.dart_face.insert((t[k], t[(k + 1) % 3]), idx);
        }
    }

    fn add_edge(&mut self, a: Vertex, b: Vertex) {
        self.edges.insert((a.min(b), a.max(b)));
    }

    fn insert_vertex(&mut self, f: usize, v: Vertex) {
        let [a, b, c] = self.faces[f];
        self.set_face(f, [a, b, v]);
        let n = self.faces.len();
        self.set_face(n, [b, c, v]);
        self.set_face(n + 1, [c, a, v]);
        for x in [a, b, c] {
            self.add_edge(x, v);
        }
    }

    fn try_flip(&mut self, f: usize, k: usize) -> bool {
        let t = self.faces[f];
        let (a, b, c) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
        let g = self.dart_face[&(b, a)];
        let s = self.faces[g];
        let pos = (0..3)
            .find(|&i| s[i] == b && s[(i + 1) % 3] == a)
            .expect("twin dart");
        let d = s[(pos + 2) % 3];
        if c == d || self.edges.contains(&(c.min(d), c.max(d))) {
            return false;
        }
        self.dart_face.remove(&(a, b));
        self.dart_face.remove(&(b, a));
        self.edges.remove(&(a.min(b), a.max(b)));
        self.set_face(f, [c, a, d]);
        self.set_face(g, [d, b, c]);
        self.add_edge(c, d);
        true
    }
}

fn random_planar(n: usize, drop: f64, rng: &mut ChaCha8Rng) -> Generated {
    if n < 3 {
        let mut g = Graph::with_vertices(0..n);
        let mut rotation = Rotation::new();
        if n == 2 && !rng.gen_bool(drop) {
            g.add_edge(0, 1);
            rotation.insert(0, vec![1]);
            rotation.insert(1, vec![0]);
        }
        return Generated { graph: g, rotation };
    }
    let mut tri = Triangulation {
        faces: Vec::new(),
        dart_face: HashMap::new(),
        edges: HashSet::new(),
    };
    tri.set_face(0, [0, 1, 2]);
    tri.set_face(1, [0, 2, 1]);
    for (a, b) in [(0, 1), (1, 2), (0, 2)] {
        tri.add_edge(a, b);
    }
    for v in 3..n {
        let f = rng.gen_range(0..tri.faces.len());
        tri.insert_vertex(f, v);
    }
    for _ in 0..4 * n {
        let f = rng.gen_range(0..tri.faces.len());
        let k = rng.gen_range(0..3);
        tri.try_flip(f, k);
    }
    let mut edges: Vec<(Vertex, Vertex)> = tri.edges.iter().copied().collect();
    edges.sort_unstable();
    let mut g = Graph::with_vertices(0..n);
    for (u, v) in edges {
        if !rng.gen_bool(drop) {
            g.add_edge(u, v);
        }
    }
    // Around y, the face walk x -> y -> z puts z right after x.
    let mut succ: HashMap<(Vertex, Vertex), Vertex> = HashMap::new();
    for t in &tri.faces {
        for k in 0..3 {
            succ.insert((t[(k + 1) % 3], t[k]), t[(k + 2) % 3]);
        }
    }
    let mut rotation = Rotation::new();
    for v in g.vertices() {
        if g.degree(v) == 0 {
            continue;
        }
        // walk the full triangulation link and keep surviving neighbours
        let start = *g.neighbors(v).first().expect("degree > 0");
        let mut order = Vec::new();
        let mut cur = start;
        loop {
            if g.has_edge(v, cur) {
                order.push(cur);
            }
            cur = succ[&(v, cur)];
            if cur == start {
                break;
            }
        }
        rotation.insert(v, order);
    }
    Generated { graph: g, rotation }
}
