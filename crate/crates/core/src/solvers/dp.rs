//! Nice-decomposition DP over a quotient graph. Ordinary vertices take one
//! of three states (side A, side B, deleted); a contracted bipartite
//! component only picks which of its two colour classes goes to side A.
//!
//! Each table entry keeps the sorted list of deleted items, so the minimum
//! by (size, lexicographic order) is exact: partial solutions of disjoint
//! subtrees use disjoint items, and that order is preserved under disjoint
//! union.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{Instance, ProblemKind, Solution};
use crate::error::{Error, Result};
use crate::graph::{bipartition_within, Bipartition, Graph, QuotientGraph, Vertex};
use crate::treedec::{NiceKind, NiceTreeDecomposition};

const DELETED: u8 = 2;
/// Two bits of state per bag slot in a `u64`.
const MAX_BAG: usize = 31;

/// Unary effect of fixed apex states on a vertex placed on side 0 or 1:
/// the side may be forbidden, or cost the listed (edge) items.
#[derive(Debug, Clone, Default)]
pub(crate) struct Unary {
    pub forbid: [bool; 2],
    pub items: [Vec<usize>; 2],
}

pub(crate) struct DpContext<'a> {
    /// Graph whose quotient is solved; edges to vertices outside the
    /// quotient are ignored here and handled through `unary`.
    pub graph: &'a Graph,
    pub problem: ProblemKind,
    /// Candidate vertex ids (OCT) or edge positions (EB).
    pub candidate: &'a BTreeSet<usize>,
    pub edge_index: &'a BTreeMap<(Vertex, Vertex), usize>,
    pub unary: &'a BTreeMap<Vertex, Unary>,
    pub budget: usize,
}

/// Original edge between two quotient vertices, with the colours of its
/// endpoints inside their components.
#[derive(Debug, Clone, Copy)]
struct Cross {
    cu: u8,
    cw: u8,
    item: usize,
    allowed: bool,
}

struct QVertex {
    contracted: bool,
    forbid: [bool; 2],
    items: [Vec<usize>; 2],
}

type Table = HashMap<u64, Vec<usize>>;

#[inline]
fn get(code: u64, pos: usize) -> u8 {
    ((code >> (2 * pos)) & 3) as u8
}

#[inline]
fn low_mask(pos: usize) -> u64 {
    (1u64 << (2 * pos)) - 1
}

#[inline]
fn insert_at(code: u64, pos: usize, s: u8) -> u64 {
    (code & low_mask(pos)) | ((s as u64) << (2 * pos)) | ((code >> (2 * pos)) << (2 * pos + 2))
}

#[inline]
fn remove_at(code: u64, pos: usize) -> u64 {
    (code & low_mask(pos)) | ((code >> (2 * pos + 2)) << (2 * pos))
}

fn better(a: &[usize], b: &[usize]) -> bool {
    (a.len(), a) < (b.len(), b)
}

fn offer(table: &mut Table, code: u64, items: Vec<usize>) {
    match table.get(&code) {
        Some(old) if !better(&items, old) => {}
        _ => {
            table.insert(code, items);
        }
    }
}

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Minimum deleted-item list (size, then lexicographic) among solutions that
/// avoid the contracted part, or `None` when none fits the budget. The
/// decomposition must be valid for `q.graph`.
pub(crate) fn run_dp(
    ctx: &DpContext,
    q: &QuotientGraph,
    ntd: &NiceTreeDecomposition,
) -> Result<Option<Vec<usize>>> {
    if ntd.nodes.iter().any(|n| n.bag.len() > MAX_BAG) {
        return Err(Error::Input(format!(
            "decomposition width {} exceeds the DP limit {}",
            ntd.width(),
            MAX_BAG - 1
        )));
    }
    let Bipartition::Bipartite(colour) =
        bipartition_within(ctx.graph, |v| q.contracted_set.contains(&v))
    else {
        return Ok(None);
    };
    let colour_of = |v: Vertex| colour.get(&v).copied().unwrap_or(0);

    let mut qv: HashMap<Vertex, QVertex> = HashMap::new();
    for (&x, pre) in &q.preimage {
        let mut info = QVertex {
            contracted: q.is_contracted(x),
            forbid: [false; 2],
            items: [Vec::new(), Vec::new()],
        };
        for &u in pre {
            if let Some(un) = ctx.unary.get(&u) {
                let cu = colour_of(u) as usize;
                for s in 0..2 {
                    info.forbid[s] |= un.forbid[cu ^ s];
                    info.items[s].extend_from_slice(&un.items[cu ^ s]);
                }
            }
        }
        for list in &mut info.items {
            list.sort_unstable();
        }
        qv.insert(x, info);
    }
    let mut cross: HashMap<(Vertex, Vertex), Vec<Cross>> = HashMap::new();
    for (u, w) in ctx.graph.edges() {
        let (Some(&a), Some(&b)) = (q.image.get(&u), q.image.get(&w)) else {
            continue;
        };
        if a == b {
            continue;
        }
        let item = match ctx.problem {
            ProblemKind::Oct => 0,
            ProblemKind::Eb => ctx.edge_index[&(u, w)],
        };
        let allowed = ctx.problem == ProblemKind::Eb && ctx.candidate.contains(&item);
        let (cu, cw) = (colour_of(u), colour_of(w));
        cross.entry((a, b)).or_default().push(Cross {
            cu,
            cw,
            item,
            allowed,
        });
        cross.entry((b, a)).or_default().push(Cross {
            cu: cw,
            cw: cu,
            item,
            allowed,
        });
    }

    let oct = ctx.problem == ProblemKind::Oct;
    let states_of = |x: Vertex| -> Vec<u8> {
        let info = &qv[&x];
        let mut out: Vec<u8> = (0..2u8).filter(|&s| !info.forbid[s as usize]).collect();
        if oct && !info.contracted && ctx.candidate.contains(&x) {
            out.push(DELETED);
        }
        out
    };
    // Edge rules between x in state sx and y in state sy.
    let compatible = |x: Vertex, sx: u8, y: Vertex, sy: u8| -> bool {
        let Some(list) = cross.get(&(x, y)) else {
            return true;
        };
        if oct {
            sx == DELETED || sy == DELETED || list.iter().all(|c| (c.cu ^ sx) != (c.cw ^ sy))
        } else {
            list.iter().all(|c| c.allowed || (c.cu ^ sx) != (c.cw ^ sy))
        }
    };

    let mut tables: Vec<Option<Table>> = vec![None; ntd.nodes.len()];
    for (t, node) in ntd.nodes.iter().enumerate() {
        let table = match node.kind {
            NiceKind::Leaf => Table::from([(0, Vec::new())]),
            NiceKind::Introduce(x) => {
                let child = tables[node.children[0]].take().expect("child computed");
                let pos = node
                    .bag
                    .binary_search(&x)
                    .expect("introduced vertex in bag");
                let others: Vec<(usize, Vertex)> = node
                    .bag
                    .iter()
                    .enumerate()
                    .filter(|&(_, &y)| y != x)
                    .map(|(i, &y)| (if i > pos { i - 1 } else { i }, y))
                    .filter(|&(_, y)| cross.contains_key(&(x, y)))
                    .collect();
                let states = states_of(x);
                let mut out = Table::with_capacity(child.len() * states.len());
                for (code, items) in child {
                    for &sx in &states {
                        if others
                            .iter()
                            .all(|&(i, y)| compatible(x, sx, y, get(code, i)))
                        {
                            out.insert(insert_at(code, pos, sx), items.clone());
                        }
                    }
                }
                out
            }
            NiceKind::Forget(x) => {
                let child = tables[node.children[0]].take().expect("child computed");
                let child_bag = &ntd.nodes[node.children[0]].bag;
                let pos = child_bag
                    .binary_search(&x)
                    .expect("forgotten vertex in child bag");
                let others: Vec<(usize, Vertex)> = child_bag
                    .iter()
                    .enumerate()
                    .filter(|&(_, &y)| y != x && cross.contains_key(&(x, y)))
                    .map(|(i, &y)| (i, y))
                    .collect();
                let info = &qv[&x];
                let mut out = Table::with_capacity(child.len());
                for (code, items) in child {
                    let sx = get(code, pos);
                    let mut add: Vec<usize> = Vec::new();
                    if sx == DELETED {
                        add.push(x);
                    } else {
                        add.extend_from_slice(&info.items[sx as usize]);
                        if !oct {
                            for &(i, y) in &others {
                                let sy = get(code, i);
                                for c in &cross[&(x, y)] {
                                    if (c.cu ^ sx) == (c.cw ^ sy) {
                                        add.push(c.item);
                                    }
                                }
                            }
                        }
                    }
                    if items.len() + add.len() > ctx.budget {
                        continue;
                    }
                    add.sort_unstable();
                    offer(&mut out, remove_at(code, pos), merge_sorted(&items, &add));
                }
                out
            }
            NiceKind::Join => {
                let left = tables[node.children[0]].take().expect("child computed");
                let right = tables[node.children[1]].take().expect("child computed");
                let (small, large) = if left.len() <= right.len() {
                    (left, right)
                } else {
                    (right, left)
                };
                let mut out = Table::with_capacity(small.len());
                for (code, a) in small {
                    if let Some(b) = large.get(&code) {
                        if a.len() + b.len() <= ctx.budget {
                            out.insert(code, merge_sorted(&a, b));
                        }
                    }
                }
                out
            }
        };
        tables[t] = Some(table);
    }
    let root = tables[ntd.root].take().expect("root computed");
    Ok(root.get(&0).cloned())
}

fn check_decomposition(g: &Graph, ntd: &NiceTreeDecomposition) -> Result<()> {
    let errs = ntd.check_nice();
    if let Some(e) = errs.first() {
        return Err(Error::InvalidDecomposition(e.clone()));
    }
    let v = ntd.as_tree_decomposition().validate(g);
    if let Some(first) = v.violations.first() {
        return Err(Error::InvalidDecomposition(format!("{first:?}")));
    }
    Ok(())
}

/// Minimum solution of size at most `k` using only candidates, by DP over a
/// nice decomposition of the whole instance graph.
pub fn dp_solve(inst: &Instance, ntd: &NiceTreeDecomposition) -> Result<Option<Solution>> {
    let q = inst.graph.contract(&BTreeSet::new())?;
    dp_solve_contracted(inst, &q, ntd)
}

/// Minimum solution avoiding the contracted part of `q` (its vertices for
/// OCT, the edges inside contracted components for EB). `ntd` must be a
/// nice decomposition of `q.graph`.
pub fn dp_solve_contracted(
    inst: &Instance,
    q: &QuotientGraph,
    ntd: &NiceTreeDecomposition,
) -> Result<Option<Solution>> {
    if q.image.len() != inst.graph.n() || q.image.keys().any(|v| !inst.graph.contains(*v)) {
        return Err(Error::Input(
            "quotient was not built from the instance graph".into(),
        ));
    }
    check_decomposition(&q.graph, ntd)?;
    let candidate = inst.candidate_items();
    let edge_index = inst.edge_index();
    let unary = BTreeMap::new();
    let ctx = DpContext {
        graph: &inst.graph,
        problem: inst.problem,
        candidate: &candidate,
        edge_index: &edge_index,
        unary: &unary,
        budget: inst.k,
    };
    Ok(run_dp(&ctx, q, ntd)?.map(|items| inst.solution_from_items(&items)))
}
