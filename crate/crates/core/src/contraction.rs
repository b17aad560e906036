//! Quotients `G/(Z_i \ Z')` and the structural diagnostics around them:
//! support tree, deep and shallow annulus faces, the kappa map and weighted
//! vertex-face diameters.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IteratorRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::embedding::{Embedding, FaceId, VfiGraph};
use crate::error::{Error, Result};
use crate::graph::{Graph, QuotientGraph, Vertex};
use crate::layering::{LayerSets, Layering, ResiduePlan};
use crate::treedec::heuristic_decompose;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionRequest {
    /// Index of the layer set, starting at 1.
    pub i: usize,
    pub z_prime: BTreeSet<Vertex>,
}

/// `G/(Z_i \ Z')`.
pub fn contract_decomposition(
    g: &Graph,
    sets: &LayerSets,
    req: &ContractionRequest,
) -> Result<QuotientGraph> {
    let z = sets.get(req.i)?;
    if let Some(v) = req.z_prime.iter().find(|v| !z.contains(v)) {
        return Err(Error::Input(format!(
            "vertex {v} of Z' is not in Z_{}",
            req.i
        )));
    }
    let x: BTreeSet<Vertex> = z.difference(&req.z_prime).copied().collect();
    g.contract(&x)
}

/// Residue `q_i` with the derived indices `i_j = (j - 2) p' + q_i`.
#[derive(Debug, Clone, Copy)]
struct Levels {
    q: i64,
    p_prime: i64,
    m_prime: usize,
}

impl Levels {
    fn new(l: &Layering, plan: &ResiduePlan, i: usize) -> Result<Self> {
        let q = *i
            .checked_sub(1)
            .and_then(|idx| plan.good_residues.get(idx))
            .ok_or_else(|| Error::Input(format!("set index {i} outside 1..={}", plan.p)))?
            as i64;
        let p_prime = plan.p_prime as i64;
        let m_prime = ((l.m as i64 - q).div_euclid(p_prime) + 2).max(0) as usize;
        Ok(Levels {
            q,
            p_prime,
            m_prime,
        })
    }

    fn i_j(&self, j: usize) -> i64 {
        (j as i64 - 2) * self.p_prime + self.q
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportNode {
    pub level: usize,
    pub parent: Option<usize>,
    /// Component of `G[L_{> i_j}]`; empty for the root.
    pub component: BTreeSet<Vertex>,
    /// `V_t`: vertices of the component with `i_j < ell <= i_{j+1}`.
    pub vertices: BTreeSet<Vertex>,
}

/// Containment tree of the components of `G[L_{> i_1}], ..., G[L_{> i_m'}]`
/// under a dummy root stored at index 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportTree {
    pub q: usize,
    pub p_prime: usize,
    pub m_prime: usize,
    pub nodes: Vec<SupportNode>,
}

pub fn build_support_tree(
    g: &Graph,
    l: &Layering,
    plan: &ResiduePlan,
    i: usize,
) -> Result<SupportTree> {
    let lv = Levels::new(l, plan, i)?;
    let mut nodes = vec![SupportNode {
        level: 0,
        parent: None,
        component: BTreeSet::new(),
        vertices: BTreeSet::new(),
    }];
    let mut prev_owner: BTreeMap<Vertex, usize> = BTreeMap::new();
    for j in 1..=lv.m_prime {
        let (lo, hi) = (lv.i_j(j), lv.i_j(j + 1));
        let above = l.above(lo);
        let mut owner = BTreeMap::new();
        for comp in g.components_within(&above) {
            let first = *comp.iter().next().expect("non-empty component");
            let parent = if j == 1 { 0 } else { prev_owner[&first] };
            let vertices = comp
                .iter()
                .copied()
                .filter(|v| {
                    let e = l.ell[v] as i64;
                    lo < e && e <= hi
                })
                .collect();
            let t = nodes.len();
            owner.extend(comp.iter().map(|&v| (v, t)));
            nodes.push(SupportNode {
                level: j,
                parent: Some(parent),
                component: comp,
                vertices,
            });
        }
        prev_owner = owner;
    }
    Ok(SupportTree {
        q: lv.q as usize,
        p_prime: plan.p_prime,
        m_prime: lv.m_prime,
        nodes,
    })
}

impl SupportTree {
    /// Violations of the three support-tree properties: the `V_t` partition
    /// `V(G)`, every component of `G[contracted]` sits inside one `V_t`, and
    /// edges only join a node to itself, its parent or a child.
    pub fn check(&self, g: &Graph, contracted: &BTreeSet<Vertex>) -> Vec<String> {
        let mut errs = Vec::new();
        let mut owner: BTreeMap<Vertex, usize> = BTreeMap::new();
        for (t, node) in self.nodes.iter().enumerate() {
            for &v in &node.vertices {
                if let Some(prev) = owner.insert(v, t) {
                    errs.push(format!("vertex {v} lies in V_{prev} and V_{t}"));
                }
            }
        }
        for v in g.vertices() {
            if !owner.contains_key(&v) {
                errs.push(format!("vertex {v} lies in no V_t"));
            }
        }
        if !errs.is_empty() {
            return errs;
        }
        for comp in g.components_within(contracted) {
            let ts: BTreeSet<usize> = comp.iter().map(|v| owner[v]).collect();
            if ts.len() > 1 {
                errs.push(format!(
                    "component with minimum {} spreads over nodes {ts:?}",
                    comp.iter().next().expect("non-empty")
                ));
            }
        }
        for (u, v) in g.edges() {
            let (a, b) = (owner[&u], owner[&v]);
            let related =
                a == b || self.nodes[a].parent == Some(b) || self.nodes[b].parent == Some(a);
            if !related {
                errs.push(format!("edge ({u}, {v}) joins unrelated nodes {a} and {b}"));
            }
        }
        errs
    }
}

/// The annulus `L_lo..=L_hi` attached to level `level` of the support tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Annulus {
    pub level: usize,
    pub lo: usize,
    pub hi: usize,
}

/// Annuli `i_j + 1 ..= i_{j+1}` for `j` in `1..=m'`, clipped to `1..=m`;
/// empty ones are dropped.
pub fn annuli(l: &Layering, plan: &ResiduePlan, i: usize) -> Result<Vec<Annulus>> {
    let lv = Levels::new(l, plan, i)?;
    Ok((1..=lv.m_prime)
        .filter_map(|j| {
            let lo = (lv.i_j(j) + 1).max(1);
            let hi = lv.i_j(j + 1).min(l.m as i64);
            (lo <= hi).then_some(Annulus {
                level: j,
                lo: lo as usize,
                hi: hi as usize,
            })
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassifiedFace {
    /// Index within the classification.
    pub id: FaceId,
    /// Ids of the faces of the full embedding merged into this face.
    pub members: Vec<FaceId>,
    pub boundary: BTreeSet<Vertex>,
    pub deep: bool,
    /// Components of `G[Z_i \ Z']` meeting the boundary, by minimum id.
    pub components: Vec<Vertex>,
    /// `U_f`: the smallest boundary vertex of each such component.
    pub reps: BTreeSet<Vertex>,
    pub kappa: BTreeSet<Vertex>,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaceClassification {
    pub annulus: Annulus,
    pub vertices: BTreeSet<Vertex>,
    pub faces: Vec<ClassifiedFace>,
    pub outer: FaceId,
}

impl FaceClassification {
    pub fn vfi(&self) -> VfiGraph {
        VfiGraph::from_incidences(
            self.vertices.iter().copied(),
            self.faces.iter().map(|f| (f.id, &f.boundary)),
        )
    }

    pub fn weights(&self) -> BTreeMap<FaceId, u64> {
        self.faces.iter().map(|f| (f.id, f.weight)).collect()
    }

    /// Largest number of components met by a deep face.
    pub fn max_deep_components(&self) -> usize {
        self.faces
            .iter()
            .filter(|f| f.deep)
            .map(|f| f.components.len())
            .max()
            .unwrap_or(0)
    }
}

/// Faces of the embedded annulus `G[L_lo..=L_hi]`. A face is deep when it is
/// not contained in the outer face of `G[L_hi]`; deep faces get
/// `kappa(f) = U_f + (Z' on the boundary)`.
pub fn classify_faces(
    e: &Embedding,
    l: &Layering,
    z: &BTreeSet<Vertex>,
    z_prime: &BTreeSet<Vertex>,
    ann: Annulus,
) -> FaceClassification {
    let layer_of = |v: &Vertex| l.ell.get(v).copied().unwrap_or(0);
    let vertices: BTreeSet<Vertex> = e
        .graph
        .vertices()
        .filter(|v| (ann.lo..=ann.hi).contains(&layer_of(v)))
        .collect();
    let top: BTreeSet<Vertex> = vertices
        .iter()
        .copied()
        .filter(|v| layer_of(v) == ann.hi)
        .collect();
    let annulus_faces = e.induced_faces(&vertices);
    let top_faces = e.induced_faces(&top);

    let contracted: BTreeSet<Vertex> = e
        .graph
        .vertices()
        .filter(|v| z.contains(v) && !z_prime.contains(v))
        .collect();
    let mut comp_of: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    for comp in e.graph.components_within(&contracted) {
        let rep = *comp.iter().next().expect("non-empty component");
        comp_of.extend(comp.into_iter().map(|v| (v, rep)));
    }

    let faces = annulus_faces
        .faces
        .iter()
        .enumerate()
        .map(|(id, f)| {
            let deep = top_faces.class[f.members[0]] != top_faces.outer;
            let mut first_hit: BTreeMap<Vertex, Vertex> = BTreeMap::new();
            if deep {
                for &v in &f.boundary {
                    if let Some(&c) = comp_of.get(&v) {
                        first_hit.entry(c).or_insert(v);
                    }
                }
            }
            let reps: BTreeSet<Vertex> = first_hit.values().copied().collect();
            let kappa: BTreeSet<Vertex> = if deep {
                reps.iter()
                    .copied()
                    .chain(f.boundary.iter().copied().filter(|v| z_prime.contains(v)))
                    .collect()
            } else {
                BTreeSet::new()
            };
            ClassifiedFace {
                id,
                members: f.members.iter().map(|&m| e.faces[m].id).collect(),
                boundary: f.boundary.clone(),
                deep,
                components: first_hit.keys().copied().collect(),
                reps,
                weight: kappa.len() as u64,
                kappa,
            }
        })
        .collect();
    FaceClassification {
        annulus: ann,
        vertices,
        faces,
        outer: annulus_faces.outer,
    }
}

/// Largest `w_kappa`-weighted vertex-face distance between two nodes of the
/// annulus' incidence graph.
pub fn weighted_diameter(fc: &FaceClassification) -> u64 {
    fc.vfi().diameter(Some(&fc.weights()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub i: usize,
    pub zprime: Vec<Vertex>,
    pub quotient_n: usize,
    pub quotient_m: usize,
    pub width: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ReportOptions {
    /// Sizes `0..=max_zprime` are sampled for every set.
    pub max_zprime: usize,
    pub samples_per_size: usize,
    pub seed: u64,
}

/// Requests `(i, Z')` for every `i`: one `Z'` of size 0 and of size `|Z_i|`
/// (when within the cap) and `samples_per_size` random subsets of each size
/// in between.
pub fn sample_requests(sets: &LayerSets, opts: ReportOptions) -> Vec<ContractionRequest> {
    let mut requests = Vec::new();
    for (idx, z) in sets.z.iter().enumerate() {
        for s in 0..=opts.max_zprime.min(z.len()) {
            let count = if s == 0 || s == z.len() {
                1
            } else {
                opts.samples_per_size
            };
            for k in 0..count {
                let mut rng = ChaCha8Rng::seed_from_u64(
                    opts.seed ^ ((idx as u64) << 40) ^ ((s as u64) << 20) ^ k as u64,
                );
                let mut zp: Vec<Vertex> = z.iter().copied().choose_multiple(&mut rng, s);
                zp.sort_unstable();
                requests.push(ContractionRequest {
                    i: idx + 1,
                    z_prime: zp.into_iter().collect(),
                });
            }
        }
    }
    requests
}

/// Heuristic width of `G/(Z_i \ Z')` for every `i` and randomly sampled `Z'`,
/// with `ratio = width / (p + |Z'| + 1)`.
pub fn treewidth_bound_report(
    g: &Graph,
    sets: &LayerSets,
    plan: &ResiduePlan,
    opts: ReportOptions,
) -> Result<Vec<ReportRow>> {
    let requests = sample_requests(sets, opts);
    requests
        .par_iter()
        .map(|req| {
            let q = contract_decomposition(g, sets, req)?;
            let width = heuristic_decompose(&q.graph).width();
            Ok(ReportRow {
                i: req.i,
                zprime: req.z_prime.iter().copied().collect(),
                quotient_n: q.graph.n(),
                quotient_m: q.graph.m(),
                width,
                ratio: width as f64 / (plan.p + req.z_prime.len() + 1) as f64,
            })
        })
        .collect()
}
