//! Baker-style driver: for every pair `(i, Z')` contract `Z_i \ Z'`, decompose
//! the quotient and run the contraction-aware DP. Apex vertices are fixed
//! first by explicit branching.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use super::dp::{run_dp, DpContext, Unary};
use super::{Instance, ProblemKind, Solution};
use crate::embedding::PlaneGraph;
use crate::error::{Error, Result};
use crate::graph::{bipartition_within, Bipartition, Graph, Vertex};
use crate::layering::decompose_layers;
use crate::treedec::{heuristic_decompose, to_nice};

#[derive(Debug, Clone, Copy)]
pub struct BakerOptions {
    /// Worker threads for the pair fan-out; 0 uses the rayon default.
    pub threads: usize,
    /// Overrides `p = floor(sqrt(k))`.
    pub p: Option<usize>,
    /// Validate every decomposition built along the way.
    pub validate: bool,
}

impl Default for BakerOptions {
    fn default() -> Self {
        BakerOptions {
            threads: 1,
            p: None,
            validate: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BakerStats {
    pub p: usize,
    pub apex_branches: usize,
    /// Pairs `(i, Z')` enumerated over all apex branches.
    pub pairs_tried: usize,
    /// Pairs dropped because `G[Z_i \ Z']` is not bipartite.
    pub pairs_skipped: usize,
    pub max_width: usize,
    #[serde(skip)]
    pub wall_ms: u128,
}

#[derive(Debug, Clone)]
pub struct BakerOutcome {
    pub solution: Option<Solution>,
    pub stats: BakerStats,
}

/// `p = floor(sqrt(k))`, at least 1.
pub fn default_p(k: usize) -> usize {
    (k as f64).sqrt().floor().max(1.0) as usize
}

/// Solves the instance through layer sets of the plane part `G - A`. When
/// `plane` is `None` the plane part is embedded with the planarity test.
///
/// Every pair is evaluated and the results are reduced by (size,
/// lexicographic deleted set), so the answer is the same for any thread
/// count and equals the brute-force answer.
pub fn baker_solve(
    inst: &Instance,
    plane: Option<&PlaneGraph>,
    opts: BakerOptions,
) -> Result<BakerOutcome> {
    let start = Instant::now();
    let apices: BTreeSet<Vertex> = inst.graph.apex_set().clone();
    let planar = inst.graph.without(&apices);
    let owned;
    let pg = match plane {
        Some(pg) => {
            if pg.graph != planar {
                return Err(Error::Input(
                    "embedding does not match the graph without apices".into(),
                ));
            }
            pg
        }
        None => {
            owned = PlaneGraph::embed(&planar)?;
            &owned
        }
    };
    let p = opts.p.unwrap_or_else(|| default_p(inst.k)).max(1);
    let mut stats = BakerStats {
        p,
        ..Default::default()
    };
    if inst.graph.is_bipartite() {
        stats.wall_ms = start.elapsed().as_millis();
        return Ok(BakerOutcome {
            solution: Some(inst.solution_from_items(&[])),
            stats,
        });
    }

    let (_, _, sets) = decompose_layers(pg, p)?;
    let candidate = inst.candidate_items();
    let edge_index = inst.edge_index();
    let edges: Vec<(Vertex, Vertex)> = inst.graph.edges().collect();

    // Z' ranges over Z_i restricted to candidate vertices, or to endpoints of
    // candidate edges for EB.
    let (allowed, cap): (BTreeSet<Vertex>, usize) = match inst.problem {
        ProblemKind::Oct => (candidate.clone(), inst.k / p),
        ProblemKind::Eb => (
            candidate
                .iter()
                .flat_map(|&i| [edges[i].0, edges[i].1])
                .collect(),
            2 * inst.k / p,
        ),
    };
    let mut pairs: Vec<(usize, Vec<Vertex>)> = Vec::new();
    for (idx, z) in sets.z.iter().enumerate() {
        let pool: Vec<Vertex> = z.iter().copied().filter(|v| allowed.contains(v)).collect();
        for s in 0..=cap.min(pool.len()) {
            pairs.extend(pool.iter().copied().combinations(s).map(|c| (idx, c)));
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;

    let mut best: Option<Vec<usize>> = None;
    for branch in apex_branches(inst, &apices, &candidate, &edge_index) {
        stats.apex_branches += 1;
        let Some(budget) = inst.k.checked_sub(branch.items.len()) else {
            continue;
        };
        let ctx = DpContext {
            graph: &planar,
            problem: inst.problem,
            candidate: &candidate,
            edge_index: &edge_index,
            unary: &branch.unary,
            budget,
        };
        let bound = AtomicUsize::new(budget);
        let results: Vec<Result<PairResult>> = pool.install(|| {
            pairs
                .par_iter()
                .map(|(idx, zp)| solve_pair(&ctx, &sets.z[*idx], zp, &bound, opts.validate))
                .collect()
        });
        for r in results {
            let r = r?;
            stats.pairs_tried += 1;
            match r {
                PairResult::Skipped => stats.pairs_skipped += 1,
                PairResult::Solved { width, items } => {
                    stats.max_width = stats.max_width.max(width);
                    if let Some(items) = items {
                        let mut all = merge(&branch.items, &items);
                        all.dedup();
                        if best
                            .as_ref()
                            .is_none_or(|b| (all.len(), &all) < (b.len(), b))
                        {
                            best = Some(all);
                        }
                    }
                }
            }
        }
    }
    stats.wall_ms = start.elapsed().as_millis();
    Ok(BakerOutcome {
        solution: best.map(|items| inst.solution_from_items(&items)),
        stats,
    })
}

enum PairResult {
    Skipped,
    Solved {
        width: usize,
        items: Option<Vec<usize>>,
    },
}

fn solve_pair(
    ctx: &DpContext,
    z: &BTreeSet<Vertex>,
    z_prime: &[Vertex],
    bound: &AtomicUsize,
    validate: bool,
) -> Result<PairResult> {
    let x: BTreeSet<Vertex> = z
        .iter()
        .copied()
        .filter(|v| z_prime.binary_search(v).is_err())
        .collect();
    if let Bipartition::OddCycle(_) = bipartition_within(ctx.graph, |v| x.contains(&v)) {
        return Ok(PairResult::Skipped);
    }
    let q = ctx.graph.contract(&x)?;
    let td = heuristic_decompose(&q.graph);
    let ntd = to_nice(&td)?;
    if validate {
        let v = td.validate(&q.graph);
        let nice = ntd.as_tree_decomposition().validate(&q.graph);
        let form = ntd.check_nice();
        if !v.valid || !nice.valid || !form.is_empty() || ntd.width() != td.width() {
            return Err(Error::Internal(format!(
                "invalid decomposition of a quotient: {:?} {:?} {form:?}",
                v.violations, nice.violations
            )));
        }
    }
    // a pair only has to match the best size found so far
    let local = DpContext {
        budget: ctx.budget.min(bound.load(Ordering::Relaxed)),
        ..*ctx
    };
    let items = run_dp(&local, &q, &ntd)?;
    if let Some(items) = &items {
        bound.fetch_min(items.len(), Ordering::Relaxed);
    }
    Ok(PairResult::Solved {
        width: td.width(),
        items,
    })
}

fn merge(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v
}

struct ApexBranch {
    items: Vec<usize>,
    unary: BTreeMap<Vertex, Unary>,
}

/// Every consistent assignment of states to the apices, with its own cost
/// and the constraints it imposes on plane neighbours.
fn apex_branches(
    inst: &Instance,
    apices: &BTreeSet<Vertex>,
    candidate: &BTreeSet<usize>,
    edge_index: &BTreeMap<(Vertex, Vertex), usize>,
) -> Vec<ApexBranch> {
    let oct = inst.problem == ProblemKind::Oct;
    let list: Vec<Vertex> = apices.iter().copied().collect();
    let options: Vec<Vec<u8>> = list
        .iter()
        .map(|a| {
            let mut o = vec![0, 1];
            if oct && candidate.contains(a) {
                o.push(2);
            }
            o
        })
        .collect();
    let g: &Graph = &inst.graph;
    let mut out = Vec::new();
    let assignments: Vec<Vec<u8>> = if options.is_empty() {
        vec![Vec::new()]
    } else {
        options.into_iter().multi_cartesian_product().collect()
    };
    for assignment in assignments {
        let state: BTreeMap<Vertex, u8> = list.iter().copied().zip(assignment).collect();
        let mut items = Vec::new();
        let mut ok = true;
        for (&a, &sa) in &state {
            if sa == 2 {
                items.push(a);
                continue;
            }
            for &u in g.neighbors(a) {
                let e = (a.min(u), a.max(u));
                let Some(&su) = state.get(&u) else {
                    continue;
                };
                if a > u || su != sa {
                    continue;
                }
                if oct || !candidate.contains(&edge_index[&e]) {
                    ok = false;
                } else {
                    items.push(edge_index[&e]);
                }
            }
        }
        if !ok {
            continue;
        }
        let mut unary: BTreeMap<Vertex, Unary> = BTreeMap::new();
        for (&a, &sa) in &state {
            if sa == 2 {
                continue;
            }
            for &u in g.neighbors(a) {
                if apices.contains(&u) {
                    continue;
                }
                let un = unary.entry(u).or_default();
                let s = sa as usize;
                let e = edge_index[&(a.min(u), a.max(u))];
                if oct {
                    un.forbid[s] = true;
                } else if candidate.contains(&e) {
                    un.items[s].push(e);
                } else {
                    un.forbid[s] = true;
                }
            }
        }
        items.sort_unstable();
        out.push(ApexBranch { items, unary });
    }
    out
}
