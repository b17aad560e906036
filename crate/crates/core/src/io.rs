//! Text graph format.
//!
//! ```text
//! # comment
//! n m
//! u v            (m edge lines, ids in 0..n)
//! apex: a b ...
//! rot u: v1 v2 ...
//! marked_faces: f1 f2 ...
//! ```
//!
//! Rotation lines give the cyclic neighbour order of the graph without its
//! apices. Marked face ids refer to the traced face order of that embedding.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::embedding::{FaceId, PlaneGraph, Rotation};
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone, Default)]
pub struct GraphFile {
    pub graph: Graph,
    pub rotation: Option<Rotation>,
    pub marked: BTreeSet<FaceId>,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_ids(line: usize, s: &str) -> Result<Vec<usize>> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| perr(line, format!("expected an integer, got `{t}`")))
        })
        .collect()
}

pub fn parse_graph(text: &str) -> Result<GraphFile> {
    let mut header: Option<(usize, usize)> = None;
    let mut g = Graph::new();
    let mut edges = 0usize;
    let mut apex: Option<BTreeSet<Vertex>> = None;
    let mut rotation: Option<Rotation> = None;
    let mut marked = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((n, _)) = header else {
            let ids = parse_ids(lineno, line)?;
            let [n, m] = ids[..] else {
                return Err(perr(lineno, "header must be `n m`"));
            };
            header = Some((n, m));
            g = Graph::with_vertices(0..n);
            continue;
        };
        let check = |v: usize| {
            if v >= n {
                Err(perr(lineno, format!("vertex {v} outside 0..{n}")))
            } else {
                Ok(v)
            }
        };
        if let Some(rest) = line.strip_prefix("apex:") {
            let ids = parse_ids(lineno, rest)?;
            let set = ids
                .into_iter()
                .map(check)
                .collect::<Result<BTreeSet<_>>>()?;
            apex.get_or_insert_with(BTreeSet::new).extend(set);
        } else if let Some(rest) = line.strip_prefix("marked_faces:") {
            marked.extend(parse_ids(lineno, rest)?);
        } else if let Some(rest) = line.strip_prefix("rot") {
            let (head, tail) = rest
                .split_once(':')
                .ok_or_else(|| perr(lineno, "rotation line must be `rot u: v1 v2 ...`"))?;
            let u =
                check(head.trim().parse::<usize>().map_err(|_| {
                    perr(lineno, format!("bad rotation vertex `{}`", head.trim()))
                })?)?;
            let order = parse_ids(lineno, tail)?
                .into_iter()
                .map(check)
                .collect::<Result<Vec<_>>>()?;
            if rotation
                .get_or_insert_with(Rotation::new)
                .insert(u, order)
                .is_some()
            {
                return Err(perr(lineno, format!("second rotation for vertex {u}")));
            }
        } else {
            let ids = parse_ids(lineno, line)?;
            let [u, v] = ids[..] else {
                return Err(perr(lineno, "edge line must be `u v`"));
            };
            g.try_add_edge(check(u)?, check(v)?)
                .map_err(|e| perr(lineno, e.to_string()))?;
            edges += 1;
        }
    }
    let (_, m) = header.ok_or_else(|| perr(0, "missing `n m` header"))?;
    if edges != m {
        return Err(perr(
            0,
            format!("header announces {m} edges, found {edges}"),
        ));
    }
    if let Some(a) = apex {
        g.set_apex_set(a)?;
    }
    if let Some(rot) = &rotation {
        if let Some(v) = rot.keys().find(|v| g.apex_set().contains(v)) {
            return Err(Error::Rotation(format!(
                "apex vertex {v} has a rotation line"
            )));
        }
    }
    Ok(GraphFile {
        graph: g,
        rotation,
        marked,
    })
}

pub fn read_graph_file(path: &Path) -> Result<GraphFile> {
    parse_graph(&std::fs::read_to_string(path)?)
}

/// Serialises in the format accepted by [`parse_graph`]. Vertex ids must be
/// `0..n`.
pub fn write_graph(gf: &GraphFile) -> Result<String> {
    let g = &gf.graph;
    let n = g.n();
    if let Some(v) = g.vertices().find(|&v| v >= n) {
        return Err(Error::Input(format!(
            "vertex ids must be 0..{n}, found {v}"
        )));
    }
    let mut out = format!("{} {}\n", n, g.m());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    if !g.apex_set().is_empty() {
        out.push_str("apex:");
        for a in g.apex_set() {
            let _ = write!(out, " {a}");
        }
        out.push('\n');
    }
    if let Some(rot) = &gf.rotation {
        for (u, order) in rot {
            let _ = write!(out, "rot {u}:");
            for v in order {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
    }
    if !gf.marked.is_empty() {
        out.push_str("marked_faces:");
        for f in &gf.marked {
            let _ = write!(out, " {f}");
        }
        out.push('\n');
    }
    Ok(out)
}

impl GraphFile {
    /// Plane embedding of the graph without its apices, from the rotation
    /// lines when present and from the planarity test otherwise.
    pub fn plane_graph(&self) -> Result<PlaneGraph> {
        let planar = self.graph.without(self.graph.apex_set());
        match &self.rotation {
            Some(rot) => PlaneGraph::from_rotation(&planar, rot.clone(), &self.marked),
            None => {
                let pg = PlaneGraph::embed(&planar)?;
                if self.marked.is_empty() {
                    Ok(pg)
                } else {
                    PlaneGraph::from_rotation(&planar, pg.rotation(), &self.marked)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FaceRow {
    pub id: FaceId,
    pub boundary: Vec<Vertex>,
    pub marked: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FaceTable {
    pub faces: Vec<FaceRow>,
    /// Outer face of the first component.
    pub outer: Option<FaceId>,
    /// Outer face of every component, in component order.
    pub outer_faces: Vec<FaceId>,
}

pub fn face_table(pg: &PlaneGraph) -> FaceTable {
    // boundary in walk order; an isolated vertex has an empty walk
    let mut faces: Vec<FaceRow> = pg
        .faces()
        .map(|f| FaceRow {
            id: f.id,
            boundary: if f.boundary_walk.is_empty() {
                f.boundary_vertices.iter().copied().collect()
            } else {
                f.boundary_walk.iter().map(|&(u, _)| u).collect()
            },
            marked: f.marked,
        })
        .collect();
    faces.sort_by_key(|f| f.id);
    let outer_faces: Vec<FaceId> = pg.components.iter().map(|e| e.outer_face().id).collect();
    FaceTable {
        faces,
        outer: outer_faces.first().copied(),
        outer_faces,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_full_file() {
        let text = "# wheel\n5 8\n0 1\n1 2\n2 3\n3 0\n4 0\n4 1\n4 2\n4 3\napex: 4\n\
                    rot 0: 1 3\nrot 1: 2 0\nrot 2: 3 1\nrot 3: 0 2\nmarked_faces: 0\n";
        let gf = parse_graph(text).unwrap();
        assert_eq!((gf.graph.n(), gf.graph.m()), (5, 8));
        assert_eq!(gf.graph.apex_set(), &BTreeSet::from([4]));
        let pg = gf.plane_graph().unwrap();
        assert_eq!(pg.num_marked(), 1);
        assert_eq!(pg.graph.n(), 4);
        let again = parse_graph(&write_graph(&gf).unwrap()).unwrap();
        assert_eq!(again.graph, gf.graph);
        assert_eq!(again.rotation, gf.rotation);
        assert_eq!(again.marked, gf.marked);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_graph("").is_err());
        assert!(parse_graph("2 1\n0 2\n").is_err());
        assert!(parse_graph("2 2\n0 1\n").is_err());
        assert!(parse_graph("2 1\n0 0\n").is_err());
        assert!(parse_graph("3 1\n0 1\nrot x: 1\n").is_err());
        assert!(matches!(
            parse_graph("2 1\n0 1 2\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn marks_without_rotation_use_traced_order() {
        let gf = parse_graph("4 4\n0 1\n1 2\n2 3\n3 0\nmarked_faces: 1\n").unwrap();
        let pg = gf.plane_graph().unwrap();
        let table = face_table(&pg);
        assert_eq!(table.faces.len(), 2);
        assert!(table.faces[1].marked && !table.faces[0].marked);
        assert!(parse_graph("4 4\n0 1\n1 2\n2 3\n3 0\nmarked_faces: 7\n")
            .unwrap()
            .plane_graph()
            .is_err());
    }
}
