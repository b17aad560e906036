//! Vertex-face layers from the outer face, bad layers, residues and the
//! congruence-class sets `Z_1..Z_p`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::embedding::{build_vfi, Embedding, Face, PlaneGraph, VfiNode};
use crate::error::{Error, Result};
use crate::graph::Vertex;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Layering {
    /// Layer index of every vertex, starting at 1.
    pub ell: BTreeMap<Vertex, usize>,
    /// `layers[i - 1]` is `L_i`.
    pub layers: Vec<BTreeSet<Vertex>>,
    pub m: usize,
    pub bad_layers: BTreeSet<usize>,
}

impl Layering {
    /// `L_i`, empty outside `1..=m`.
    pub fn layer(&self, i: i64) -> &BTreeSet<Vertex> {
        static EMPTY: BTreeSet<Vertex> = BTreeSet::new();
        if i < 1 || i as usize > self.m {
            return &EMPTY;
        }
        &self.layers[i as usize - 1]
    }

    /// Union of `L_lo..=L_hi`.
    pub fn range(&self, lo: i64, hi: i64) -> BTreeSet<Vertex> {
        (lo.max(1)..=hi.min(self.m as i64))
            .flat_map(|i| self.layer(i).iter().copied())
            .collect()
    }

    /// Vertices with layer index strictly above `i`.
    pub fn above(&self, i: i64) -> BTreeSet<Vertex> {
        self.range(i + 1, self.m as i64)
    }

    fn from_ell(ell: BTreeMap<Vertex, usize>) -> Self {
        let m = ell.values().copied().max().unwrap_or(0);
        let mut layers = vec![BTreeSet::new(); m];
        for (&v, &i) in &ell {
            layers[i - 1].insert(v);
        }
        Layering {
            ell,
            layers,
            m,
            bad_layers: BTreeSet::new(),
        }
    }
}

/// Layers of one connected embedding: `ell(v) = (d(outer, v) + 1) / 2` for
/// the vertex-face distance `d`. Bad layers come from the marked faces.
pub fn compute_layering(e: &Embedding) -> Layering {
    let vfi = build_vfi(e);
    let outer = VfiNode::Face(e.outer_face().id);
    let dist = vfi
        .distances_from(outer, None)
        .expect("outer face is a VFI node");
    let ell = e
        .graph
        .vertices()
        .map(|v| {
            let d = dist[vfi.position(VfiNode::Vertex(v)).expect("vertex node")]
                .expect("VFI of a connected embedding is connected");
            (v, d.div_ceil(2) as usize)
        })
        .collect();
    let mut l = Layering::from_ell(ell);
    l.bad_layers = classify_bad_layers(&l, &e.faces);
    l
}

/// Per-component layering of a possibly disconnected plane graph. Each
/// component is layered from its own outer face and the indices are merged.
pub fn compute_plane_layering(pg: &PlaneGraph) -> Layering {
    let mut ell = BTreeMap::new();
    for e in &pg.components {
        ell.extend(compute_layering(e).ell);
    }
    let mut l = Layering::from_ell(ell);
    let faces: Vec<&Face> = pg.faces().collect();
    l.bad_layers = classify_bad_layers(&l, faces.iter().copied());
    l
}

/// Indices of layers that meet the boundary of some marked face.
pub fn classify_bad_layers<'a, I>(l: &Layering, faces: I) -> BTreeSet<usize>
where
    I: IntoIterator<Item = &'a Face>,
{
    faces
        .into_iter()
        .filter(|f| f.marked)
        .flat_map(|f| {
            f.boundary_vertices
                .iter()
                .filter_map(|v| l.ell.get(v).copied())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResiduePlan {
    pub p: usize,
    pub p_prime: usize,
    /// `q_1..q_p`, each in `1..=p_prime`.
    pub good_residues: Vec<usize>,
}

/// Picks the `p` smallest residues in `1..=p'` that avoid every bad layer
/// modulo `p' = p + 2 * marked_faces`.
pub fn choose_residues(
    bad: &BTreeSet<usize>,
    p: usize,
    marked_faces: usize,
) -> Result<ResiduePlan> {
    if p == 0 {
        return Err(Error::Input("p must be at least 1".into()));
    }
    let p_prime = p + 2 * marked_faces;
    let bad_res: BTreeSet<usize> = bad.iter().map(|&i| residue(i, p_prime)).collect();
    let good_residues: Vec<usize> = (1..=p_prime)
        .filter(|q| !bad_res.contains(q))
        .take(p)
        .collect();
    if good_residues.len() < p {
        return Err(Error::Internal(format!(
            "only {} good residues modulo {p_prime}; bad layers hit more than {} classes",
            good_residues.len(),
            2 * marked_faces
        )));
    }
    Ok(ResiduePlan {
        p,
        p_prime,
        good_residues,
    })
}

/// Representative of `i` modulo `p'` in `1..=p'`.
pub fn residue(i: usize, p_prime: usize) -> usize {
    (i + p_prime - 1) % p_prime + 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayerSets {
    /// `z[i - 1]` is `Z_i`.
    pub z: Vec<BTreeSet<Vertex>>,
}

impl LayerSets {
    /// `Z_i` for `i` in `1..=p`.
    pub fn get(&self, i: usize) -> Result<&BTreeSet<Vertex>> {
        i.checked_sub(1)
            .and_then(|idx| self.z.get(idx))
            .ok_or_else(|| Error::Input(format!("set index {i} outside 1..={}", self.z.len())))
    }
}

pub fn build_layer_sets(l: &Layering, plan: &ResiduePlan) -> LayerSets {
    let z = plan
        .good_residues
        .iter()
        .map(|&q| {
            (q..=l.m)
                .step_by(plan.p_prime)
                .flat_map(|i| l.layers[i - 1].iter().copied())
                .collect()
        })
        .collect();
    LayerSets { z }
}

/// Layering, residues and sets for a plane graph in one call.
pub fn decompose_layers(pg: &PlaneGraph, p: usize) -> Result<(Layering, ResiduePlan, LayerSets)> {
    let l = compute_plane_layering(pg);
    let plan = choose_residues(&l.bad_layers, p, pg.num_marked())?;
    let sets = build_layer_sets(&l, &plan);
    Ok((l, plan, sets))
}
