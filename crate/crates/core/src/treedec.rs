//! Tree decompositions: validation, min-fill construction, exact treewidth
//! for tiny graphs, nice form, apex augmentation and PACE-style text I/O.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

/// Rooted tree of bags. `parent[root]` is `None`; every other node points to
/// its parent. Bags are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<Vertex>>,
    pub parent: Vec<Option<usize>>,
    pub root: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// Parent pointers do not form a single tree rooted at `root`.
    NotATree(String),
    UncoveredVertex(Vertex),
    UncoveredEdge(Vertex, Vertex),
    /// The nodes containing this vertex are not connected.
    DisconnectedOccurrence(Vertex),
    UnknownVertex(Vertex),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl TreeDecomposition {
    /// One bag holding every vertex of `g`.
    pub fn trivial(g: &Graph) -> Self {
        TreeDecomposition {
            bags: vec![g.vertices().collect()],
            parent: vec![None],
            root: 0,
        }
    }

    pub fn from_parts(bags: Vec<Vec<Vertex>>, parent: Vec<Option<usize>>, root: usize) -> Self {
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        TreeDecomposition { bags, parent, root }
    }

    pub fn num_nodes(&self) -> usize {
        self.bags.len()
    }

    /// Largest bag size minus one; 0 for decompositions without vertices.
    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.bags.len()];
        for (t, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                ch[*p].push(t);
            }
        }
        ch
    }

    pub fn tree_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(t, p)| p.map(|p| (p, t)))
    }

    /// Nodes in an order where every child precedes its parent.
    fn postorder(&self) -> std::result::Result<Vec<usize>, String> {
        let n = self.bags.len();
        if n == 0 {
            return Err("decomposition has no nodes".into());
        }
        if self.parent.len() != n {
            return Err("parent list and bag list differ in length".into());
        }
        if self.root >= n || self.parent[self.root].is_some() {
            return Err(format!("node {} is not a valid root", self.root));
        }
        if let Some(t) = (0..n).find(|&t| t != self.root && self.parent[t].is_none_or(|p| p >= n)) {
            return Err(format!("node {t} has no valid parent"));
        }
        let ch = self.children();
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![(self.root, false)];
        while let Some((t, done)) = stack.pop() {
            if done {
                order.push(t);
                continue;
            }
            stack.push((t, true));
            stack.extend(ch[t].iter().map(|&c| (c, false)));
        }
        if order.len() != n {
            return Err("parent pointers contain a cycle".into());
        }
        Ok(order)
    }

    /// Checks the three decomposition axioms against `g`.
    pub fn validate(&self, g: &Graph) -> Validation {
        let mut violations = Vec::new();
        if let Err(msg) = self.postorder() {
            violations.push(Violation::NotATree(msg));
            return Validation {
                valid: false,
                violations,
            };
        }
        let occ = self.occurrences();
        for &v in occ.keys() {
            if !g.contains(v) {
                violations.push(Violation::UnknownVertex(v));
            }
        }
        for v in g.vertices() {
            if !occ.contains_key(&v) {
                violations.push(Violation::UncoveredVertex(v));
            }
        }
        for (u, v) in g.edges() {
            let (Some(a), Some(b)) = (occ.get(&u), occ.get(&v)) else {
                violations.push(Violation::UncoveredEdge(u, v));
                continue;
            };
            if !sorted_intersect(a, b) {
                violations.push(Violation::UncoveredEdge(u, v));
            }
        }
        violations.extend(
            self.disconnected_vertices()
                .into_iter()
                .map(Violation::DisconnectedOccurrence),
        );
        Validation {
            valid: violations.is_empty(),
            violations,
        }
    }

    fn occurrences(&self) -> BTreeMap<Vertex, Vec<usize>> {
        let mut occ: BTreeMap<Vertex, Vec<usize>> = BTreeMap::new();
        for (t, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                occ.entry(v).or_default().push(t);
            }
        }
        occ
    }

    /// Vertices whose occurrence set is not a subtree. A set of nodes is
    /// connected iff exactly one of its nodes has its parent outside the set.
    fn disconnected_vertices(&self) -> Vec<Vertex> {
        let mut tops: BTreeMap<Vertex, usize> = BTreeMap::new();
        for (t, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                let top = match self.parent[t] {
                    None => true,
                    Some(p) => self.bags[p].binary_search(&v).is_err(),
                };
                if top {
                    *tops.entry(v).or_default() += 1;
                }
            }
        }
        tops.into_iter()
            .filter(|&(_, c)| c > 1)
            .map(|(v, _)| v)
            .collect()
    }

    /// Adds `apices` to every bag.
    pub fn add_apices(&self, apices: &BTreeSet<Vertex>) -> TreeDecomposition {
        let bags = self
            .bags
            .iter()
            .map(|b| {
                let mut s: BTreeSet<Vertex> = b.iter().copied().collect();
                s.extend(apices);
                s.into_iter().collect()
            })
            .collect();
        TreeDecomposition {
            bags,
            parent: self.parent.clone(),
            root: self.root,
        }
    }

    /// Writes the PACE layout: `s td <bags> <width+1> <n>`, then
    /// `b <id> <vertices>` lines and tree edges, with 1-based bag ids.
    pub fn to_pace(&self, n: usize) -> String {
        let max_bag = self.bags.iter().map(Vec::len).max().unwrap_or(0);
        let mut out = format!("s td {} {} {}\n", self.bags.len(), max_bag, n);
        for (t, bag) in self.bags.iter().enumerate() {
            let _ = write!(out, "b {}", t + 1);
            for v in bag {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        for (p, c) in self.tree_edges() {
            let _ = writeln!(out, "{} {}", p + 1, c + 1);
        }
        out
    }

    /// Parses the PACE layout written by [`TreeDecomposition::to_pace`].
    /// Bag 1 becomes the root. Lines starting with `c` are comments.
    pub fn from_pace(text: &str) -> Result<Self> {
        let mut header: Option<usize> = None;
        let mut bags: Vec<Option<Vec<Vertex>>> = Vec::new();
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = lineno + 1;
            let perr = |msg: String| Error::Parse { line: lineno, msg };
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| perr(format!("expected a number, got `{s}`")))
            };
            match toks[0] {
                "s" => {
                    if toks.len() != 5 || toks[1] != "td" {
                        return Err(perr("header must be `s td <bags> <width+1> <n>`".into()));
                    }
                    let nb = num(toks[2])?;
                    header = Some(nb);
                    bags = vec![None; nb];
                }
                "b" => {
                    let nb = header.ok_or_else(|| perr("bag before header".into()))?;
                    let id = num(toks.get(1).ok_or_else(|| perr("missing bag id".into()))?)?;
                    if id == 0 || id > nb {
                        return Err(perr(format!("bag id {id} outside 1..={nb}")));
                    }
                    let verts = toks[2..]
                        .iter()
                        .map(|t| num(t))
                        .collect::<Result<Vec<_>>>()?;
                    if bags[id - 1].replace(verts).is_some() {
                        return Err(perr(format!("bag {id} listed twice")));
                    }
                }
                _ => {
                    let nb = header.ok_or_else(|| perr("edge before header".into()))?;
                    if toks.len() != 2 {
                        return Err(perr("tree edge must be `<id1> <id2>`".into()));
                    }
                    let (a, b) = (num(toks[0])?, num(toks[1])?);
                    if a == 0 || b == 0 || a > nb || b > nb {
                        return Err(perr(format!("tree edge {a} {b} references a missing bag")));
                    }
                    edges.push((a - 1, b - 1));
                }
            }
        }
        let nb = header.ok_or_else(|| Error::Parse {
            line: 0,
            msg: "missing `s td` header".into(),
        })?;
        if nb == 0 {
            return Err(Error::InvalidDecomposition("no bags".into()));
        }
        if edges.len() != nb - 1 {
            return Err(Error::InvalidDecomposition(format!(
                "{} tree edges for {nb} bags",
                edges.len()
            )));
        }
        let bags: Vec<Vec<Vertex>> = bags
            .into_iter()
            .enumerate()
            .map(|(i, b)| {
                b.ok_or_else(|| Error::InvalidDecomposition(format!("bag {} missing", i + 1)))
            })
            .collect::<Result<_>>()?;
        // orient the tree away from bag 1
        let mut adj = vec![Vec::new(); nb];
        for &(a, b) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut parent = vec![None; nb];
        let mut seen = vec![false; nb];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(t) = stack.pop() {
            for &s in &adj[t] {
                if !seen[s] {
                    seen[s] = true;
                    parent[s] = Some(t);
                    stack.push(s);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidDecomposition(
                "tree edges do not connect all bags".into(),
            ));
        }
        Ok(TreeDecomposition::from_parts(bags, parent, 0))
    }
}

fn sorted_intersect(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// Greedy min-fill elimination ordering, ties broken by degree and then by
/// vertex id.
pub fn min_fill_order(g: &Graph) -> Vec<Vertex> {
    let ids: Vec<Vertex> = g.vertices().collect();
    let index: HashMap<Vertex, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = ids.len();
    let mut adj: Vec<Vec<usize>> = ids
        .iter()
        .map(|&v| g.neighbors(v).iter().map(|u| index[u]).collect())
        .collect();
    let mut alive = vec![true; n];
    let mut mark = vec![usize::MAX; n];
    let mut stamp = 0usize;

    let fill_of = |u: usize, adj: &[Vec<usize>], mark: &mut [usize], stamp: &mut usize| -> usize {
        *stamp += 1;
        for &x in &adj[u] {
            mark[x] = *stamp;
        }
        let d = adj[u].len();
        let mut linked = 0;
        for &x in &adj[u] {
            linked += adj[x].iter().filter(|&&y| mark[y] == *stamp).count();
        }
        (d * d.saturating_sub(1) - linked) / 2
    };

    let mut key: Vec<(usize, usize)> = (0..n)
        .map(|u| (fill_of(u, &adj, &mut mark, &mut stamp), adj[u].len()))
        .collect();
    let mut queue: BTreeSet<(usize, usize, usize)> =
        (0..n).map(|u| (key[u].0, key[u].1, u)).collect();
    let mut order = Vec::with_capacity(n);
    while let Some((_, _, v)) = queue.pop_first() {
        alive[v] = false;
        order.push(ids[v]);
        let nb = std::mem::take(&mut adj[v]);
        for &a in &nb {
            adj[a].retain(|&x| x != v);
        }
        let mut touched: BTreeSet<usize> = nb.iter().copied().collect();
        for (i, &a) in nb.iter().enumerate() {
            stamp += 1;
            for &x in &adj[a] {
                mark[x] = stamp;
            }
            for &b in &nb[i + 1..] {
                if mark[b] != stamp {
                    adj[a].push(b);
                    adj[b].push(a);
                    mark[b] = stamp;
                    // common neighbours of a and b lose one missing pair
                    touched.extend(adj[a].iter().copied());
                    touched.extend(adj[b].iter().copied());
                }
            }
        }
        for u in touched {
            if !alive[u] {
                continue;
            }
            let new = (fill_of(u, &adj, &mut mark, &mut stamp), adj[u].len());
            if new != key[u] {
                queue.remove(&(key[u].0, key[u].1, u));
                key[u] = new;
                queue.insert((new.0, new.1, u));
            }
        }
    }
    order
}

/// Decomposition induced by an elimination ordering: one bag per vertex,
/// holding the vertex and its later neighbours in the filled graph. The
/// parent of a bag is the bag of the earliest-eliminated later neighbour;
/// the roots of different components are chained together.
pub fn decomposition_from_order(g: &Graph, order: &[Vertex]) -> TreeDecomposition {
    let n = order.len();
    if n == 0 {
        return TreeDecomposition {
            bags: vec![Vec::new()],
            parent: vec![None],
            root: 0,
        };
    }
    let pos: HashMap<Vertex, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut later: Vec<BTreeSet<usize>> = (0..n)
        .map(|i| {
            g.neighbors(order[i])
                .iter()
                .map(|u| pos[u])
                .filter(|&j| j > i)
                .collect()
        })
        .collect();
    let mut bags = Vec::with_capacity(n);
    let mut parent = vec![None; n];
    for i in 0..n {
        let nb = std::mem::take(&mut later[i]);
        if let Some(&first) = nb.iter().next() {
            parent[i] = Some(first);
            // the clique on nb: passing the rest to `first` is enough
            later[first].extend(nb.iter().copied().filter(|&j| j != first));
        }
        let mut bag: Vec<Vertex> = nb.iter().map(|&j| order[j]).collect();
        bag.push(order[i]);
        bag.sort_unstable();
        bags.push(bag);
        later[i] = nb;
    }
    let roots: Vec<usize> = (0..n).filter(|&i| parent[i].is_none()).collect();
    for w in roots.windows(2) {
        parent[w[0]] = Some(w[1]);
    }
    TreeDecomposition {
        bags,
        parent,
        root: *roots.last().expect("at least one root"),
    }
}

/// Min-fill heuristic decomposition. Deterministic for a given graph.
pub fn heuristic_decompose(g: &Graph) -> TreeDecomposition {
    decomposition_from_order(g, &min_fill_order(g))
}

/// Exact treewidth by dynamic programming over vertex subsets; `None` when
/// the treewidth exceeds `limit`. Exponential, meant for about 14 vertices.
pub fn exact_treewidth_small(g: &Graph, limit: usize) -> Option<usize> {
    let ids: Vec<Vertex> = g.vertices().collect();
    let n = ids.len();
    assert!(n < 26, "exact treewidth is limited to tiny graphs");
    if n == 0 {
        return Some(0);
    }
    let index: HashMap<Vertex, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let nbr: Vec<u32> = ids
        .iter()
        .map(|&v| g.neighbors(v).iter().fold(0u32, |m, u| m | 1 << index[u]))
        .collect();
    // |Q(S, v)|: vertices outside S + v reachable from v through S
    let q = |s: u32, v: usize| -> usize {
        let mut seen = 1u32 << v;
        let mut frontier = 1u32 << v;
        let mut reach = 0u32;
        while frontier != 0 {
            let x = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let nx = nbr[x] & !seen;
            seen |= nx;
            reach |= nx & !s;
            frontier |= nx & s;
        }
        reach.count_ones() as usize
    };
    let full = (1u32 << n) - 1;
    let mut tw = vec![usize::MAX; 1 << n];
    tw[0] = 0;
    for s in 1..=full {
        let mut best = usize::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            let cand = tw[prev as usize].max(q(prev, v));
            best = best.min(cand);
        }
        tw[s as usize] = best;
    }
    let w = tw[full as usize];
    (w <= limit).then_some(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NiceKind {
    Leaf,
    Introduce(Vertex),
    Forget(Vertex),
    Join,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NiceNode {
    pub kind: NiceKind,
    pub bag: Vec<Vertex>,
    pub children: Vec<usize>,
}

/// Nice decomposition with every child stored before its parent, so a
/// forward scan is a valid bottom-up order. The root bag is empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NiceTreeDecomposition {
    pub nodes: Vec<NiceNode>,
    pub root: usize,
}

impl NiceTreeDecomposition {
    pub fn width(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.bag.len())
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    pub fn as_tree_decomposition(&self) -> TreeDecomposition {
        let mut parent = vec![None; self.nodes.len()];
        for (t, node) in self.nodes.iter().enumerate() {
            for &c in &node.children {
                parent[c] = Some(t);
            }
        }
        TreeDecomposition {
            bags: self.nodes.iter().map(|n| n.bag.clone()).collect(),
            parent,
            root: self.root,
        }
    }

    /// Problems with the node-kind rules, empty when the form is nice.
    pub fn check_nice(&self) -> Vec<String> {
        let mut errs = Vec::new();
        for (t, node) in self.nodes.iter().enumerate() {
            if node.children.iter().any(|&c| c >= t) {
                errs.push(format!("node {t} has a child stored after it"));
            }
            let child_bag = |i: usize| &self.nodes[node.children[i]].bag;
            let ok = match node.kind {
                NiceKind::Leaf => node.children.is_empty() && node.bag.is_empty(),
                NiceKind::Join => {
                    node.children.len() == 2
                        && *child_bag(0) == node.bag
                        && *child_bag(1) == node.bag
                }
                NiceKind::Introduce(v) => {
                    node.children.len() == 1 && {
                        let mut b = child_bag(0).clone();
                        b.push(v);
                        b.sort_unstable();
                        !child_bag(0).contains(&v) && b == node.bag
                    }
                }
                NiceKind::Forget(v) => {
                    node.children.len() == 1 && {
                        let mut b = node.bag.clone();
                        b.push(v);
                        b.sort_unstable();
                        !node.bag.contains(&v) && b == *child_bag(0)
                    }
                }
            };
            if !ok {
                errs.push(format!("node {t} violates the {:?} rule", node.kind));
            }
        }
        if self.nodes.get(self.root).is_none_or(|r| !r.bag.is_empty()) {
            errs.push("root bag is not empty".into());
        }
        errs
    }
}

struct NiceBuilder {
    nodes: Vec<NiceNode>,
}

impl NiceBuilder {
    fn push(&mut self, kind: NiceKind, bag: Vec<Vertex>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode {
            kind,
            bag,
            children,
        });
        self.nodes.len() - 1
    }

    /// Walks from node `from` (bag `from_bag`) to bag `to` by forgetting
    /// first and introducing afterwards.
    fn morph(&mut self, mut from: usize, to: &[Vertex]) -> usize {
        let start = self.nodes[from].bag.clone();
        let mut bag = start.clone();
        for v in start.iter().filter(|v| to.binary_search(v).is_err()) {
            bag.retain(|x| x != v);
            from = self.push(NiceKind::Forget(*v), bag.clone(), vec![from]);
        }
        for v in to.iter().filter(|v| start.binary_search(v).is_err()) {
            let at = bag.binary_search(v).unwrap_err();
            bag.insert(at, *v);
            from = self.push(NiceKind::Introduce(*v), bag.clone(), vec![from]);
        }
        from
    }
}

/// Converts a decomposition into nice form with an empty root. Width is
/// preserved since every intermediate bag is a subset of an original bag.
pub fn to_nice(td: &TreeDecomposition) -> Result<NiceTreeDecomposition> {
    let order = td.postorder().map_err(Error::InvalidDecomposition)?;
    if let Some(v) = td.disconnected_vertices().first() {
        return Err(Error::InvalidDecomposition(format!(
            "bags containing vertex {v} are not connected"
        )));
    }
    let ch = td.children();
    let mut b = NiceBuilder { nodes: Vec::new() };
    let mut top = vec![usize::MAX; td.bags.len()];
    for t in order {
        let bag = &td.bags[t];
        let branches: Vec<usize> = if ch[t].is_empty() {
            let leaf = b.push(NiceKind::Leaf, Vec::new(), Vec::new());
            vec![b.morph(leaf, bag)]
        } else {
            ch[t].iter().map(|&c| b.morph(top[c], bag)).collect()
        };
        let mut cur = branches[0];
        for &other in &branches[1..] {
            cur = b.push(NiceKind::Join, bag.clone(), vec![cur, other]);
        }
        top[t] = cur;
    }
    let root = b.morph(top[td.root], &[]);
    Ok(NiceTreeDecomposition {
        nodes: b.nodes,
        root,
    })
}
