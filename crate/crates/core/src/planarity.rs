//! Left-right planarity test with embedding extraction (Brandes' formulation
//! of the de Fraysseix–Rosenstiehl criterion). Works on dense local indices;
//! callers translate to vertex ids.

use std::collections::HashMap;

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, Default, Debug)]
struct Interval {
    low: Option<usize>,
    high: Option<usize>,
}

impl Interval {
    fn is_empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Clone, Copy, Debug)]
struct ConflictPair {
    id: usize,
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }
}

struct LrState<'a> {
    adj: &'a [Vec<usize>],
    height: Vec<usize>,
    parent_edge: Vec<Option<usize>>,
    // oriented edges
    src: Vec<usize>,
    dst: Vec<usize>,
    edge_id: HashMap<(usize, usize), usize>,
    out: Vec<Vec<usize>>,
    ordered: Vec<Vec<usize>>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting: Vec<i64>,
    reference: Vec<Option<usize>>,
    side: Vec<i64>,
    lowpt_edge: Vec<Option<usize>>,
    stack: Vec<ConflictPair>,
    stack_bottom: Vec<Option<usize>>,
    next_pair_id: usize,
}

/// Returns, for each vertex, its neighbours in cyclic order of a planar
/// embedding, or `None` if the graph is not planar. `adj` must be symmetric
/// and loop-free.
pub(crate) fn planar_rotation(adj: &[Vec<usize>]) -> Option<Vec<Vec<usize>>> {
    let n = adj.len();
    let m: usize = adj.iter().map(Vec::len).sum::<usize>() / 2;
    if n > 2 && m > 3 * n - 6 {
        return None;
    }
    let mut st = LrState {
        adj,
        height: vec![NONE; n],
        parent_edge: vec![None; n],
        src: Vec::with_capacity(m),
        dst: Vec::with_capacity(m),
        edge_id: HashMap::with_capacity(2 * m),
        out: vec![Vec::new(); n],
        ordered: vec![Vec::new(); n],
        lowpt: Vec::with_capacity(m),
        lowpt2: Vec::with_capacity(m),
        nesting: Vec::with_capacity(m),
        reference: Vec::new(),
        side: Vec::new(),
        lowpt_edge: Vec::new(),
        stack: Vec::new(),
        stack_bottom: Vec::new(),
        next_pair_id: 0,
    };
    let mut roots = Vec::new();
    for v in 0..n {
        if st.height[v] == NONE {
            st.height[v] = 0;
            roots.push(v);
            st.orient(v);
        }
    }
    let me = st.src.len();
    st.reference = vec![None; me];
    st.side = vec![1; me];
    st.lowpt_edge = vec![None; me];
    st.stack_bottom = vec![None; me];
    for v in 0..n {
        let mut list = st.out[v].clone();
        list.sort_by_key(|&e| st.nesting[e]);
        st.ordered[v] = list;
    }
    for &r in &roots {
        if !st.test(r) {
            return None;
        }
    }
    for e in 0..me {
        let s = st.sign(e);
        st.nesting[e] *= s;
    }
    let mut rot = Rotation::new(n);
    for v in 0..n {
        let mut list = st.out[v].clone();
        list.sort_by_key(|&e| st.nesting[e]);
        let mut prev = None;
        for &e in &list {
            let w = st.dst[e];
            rot.add_cw(v, w, prev);
            prev = Some(w);
        }
        st.ordered[v] = list;
    }
    let mut left_ref = vec![NONE; n];
    let mut right_ref = vec![NONE; n];
    for &r in &roots {
        st.embed(r, &mut rot, &mut left_ref, &mut right_ref);
    }
    Some(rot.into_lists())
}

impl LrState<'_> {
    fn orient(&mut self, root: usize) {
        // Explicit stack of (vertex, next neighbour position) replaces recursion.
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            if *pos > 0 {
                // Finish the edge examined in the previous step.
                let w = self.adj[v][*pos - 1];
                if let Some(&vw) = self.edge_id.get(&(v, w)) {
                    if self.src[vw] == v
                        && self.parent_edge[w] == Some(vw)
                        && !self.finished_edge(vw)
                    {
                        self.after_edge(v, vw);
                    }
                }
            }
            if *pos == self.adj[v].len() {
                frames.pop();
                continue;
            }
            let w = self.adj[v][*pos];
            *pos += 1;
            if self.edge_id.contains_key(&(v, w)) || self.edge_id.contains_key(&(w, v)) {
                continue;
            }
            let vw = self.src.len();
            self.src.push(v);
            self.dst.push(w);
            self.edge_id.insert((v, w), vw);
            self.out[v].push(vw);
            self.lowpt.push(self.height[v]);
            self.lowpt2.push(self.height[v]);
            self.nesting.push(NONE as i64);
            if self.height[w] == NONE {
                self.parent_edge[w] = Some(vw);
                self.height[w] = self.height[v] + 1;
                frames.push((w, 0));
            } else {
                self.lowpt[vw] = self.height[w];
                self.after_edge(v, vw);
            }
        }
    }

    fn finished_edge(&self, e: usize) -> bool {
        self.nesting[e] != NONE as i64
    }

    fn after_edge(&mut self, v: usize, vw: usize) {
        self.nesting[vw] = 2 * self.lowpt[vw] as i64;
        if self.lowpt2[vw] < self.height[v] {
            self.nesting[vw] += 1;
        }
        if let Some(e) = self.parent_edge[v] {
            if self.lowpt[vw] < self.lowpt[e] {
                self.lowpt2[e] = self.lowpt[e].min(self.lowpt2[vw]);
                self.lowpt[e] = self.lowpt[vw];
            } else if self.lowpt[vw] > self.lowpt[e] {
                self.lowpt2[e] = self.lowpt2[e].min(self.lowpt[vw]);
            } else {
                self.lowpt2[e] = self.lowpt2[e].min(self.lowpt2[vw]);
            }
        }
    }

    fn top_id(&self) -> Option<usize> {
        self.stack.last().map(|p| p.id)
    }

    fn new_pair(&mut self) -> ConflictPair {
        self.next_pair_id += 1;
        ConflictPair {
            id: self.next_pair_id,
            left: Interval::default(),
            right: Interval::default(),
        }
    }

    fn conflicting(&self, i: &Interval, b: usize) -> bool {
        match i.high {
            Some(h) => self.lowpt[h] > self.lowpt[b],
            None => false,
        }
    }

    fn lowest(&self, p: &ConflictPair) -> usize {
        match (p.left.low, p.right.low) {
            (None, Some(r)) => self.lowpt[r],
            (Some(l), None) => self.lowpt[l],
            (Some(l), Some(r)) => self.lowpt[l].min(self.lowpt[r]),
            (None, None) => NONE,
        }
    }

    fn test(&mut self, root: usize) -> bool {
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            if *pos > 0 {
                let ei = self.ordered[v][*pos - 1];
                if !self.integrate(v, ei) {
                    return false;
                }
            }
            if *pos == self.ordered[v].len() {
                frames.pop();
                if let Some(e) = self.parent_edge[v] {
                    self.remove_back_edges(e);
                }
                continue;
            }
            let ei = self.ordered[v][*pos];
            *pos += 1;
            self.stack_bottom[ei] = self.top_id();
            let w = self.dst[ei];
            if self.parent_edge[w] == Some(ei) {
                frames.push((w, 0));
            } else {
                self.lowpt_edge[ei] = Some(ei);
                let mut p = self.new_pair();
                p.right = Interval {
                    low: Some(ei),
                    high: Some(ei),
                };
                self.stack.push(p);
            }
        }
        true
    }

    /// Post-processing of out-edge `ei` of `v` once its subtree is done.
    fn integrate(&mut self, v: usize, ei: usize) -> bool {
        if self.lowpt[ei] < self.height[v] {
            let e = self.parent_edge[v].expect("return edges imply a parent");
            if ei == self.ordered[v][0] {
                self.lowpt_edge[e] = self.lowpt_edge[ei];
            } else if !self.add_constraints(ei, e) {
                return false;
            }
        }
        true
    }

    fn add_constraints(&mut self, ei: usize, e: usize) -> bool {
        let mut p = self.new_pair();
        loop {
            let mut q = self.stack.pop().expect("return edge pairs on stack");
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false;
            }
            let qrl = q.right.low.expect("non-empty right interval");
            if self.lowpt[qrl] > self.lowpt[e] {
                if p.right.is_empty() {
                    p.right = q.right;
                } else if let Some(prl) = p.right.low {
                    self.reference[prl] = q.right.high;
                }
                p.right.low = q.right.low;
            } else {
                self.reference[qrl] = self.lowpt_edge[e];
            }
            if self.top_id() == self.stack_bottom[ei] {
                break;
            }
        }
        while let Some(top) = self.stack.last() {
            if !(self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().expect("checked non-empty");
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false;
            }
            if let Some(prl) = p.right.low {
                self.reference[prl] = q.right.high;
            }
            if q.right.low.is_some() {
                p.right.low = q.right.low;
            }
            if p.left.is_empty() {
                p.left = q.left;
            } else if let Some(pll) = p.left.low {
                self.reference[pll] = q.left.high;
            }
            p.left.low = q.left.low;
        }
        if !(p.left.is_empty() && p.right.is_empty()) {
            self.stack.push(p);
        }
        true
    }

    fn remove_back_edges(&mut self, e: usize) {
        let u = self.src[e];
        while let Some(top) = self.stack.last() {
            if self.lowest(top) != self.height[u] {
                break;
            }
            let p = self.stack.pop().expect("checked non-empty");
            if let Some(l) = p.left.low {
                self.side[l] = -1;
            }
        }
        if let Some(mut p) = self.stack.pop() {
            while let Some(h) = p.left.high {
                if self.dst[h] != u {
                    break;
                }
                p.left.high = self.reference[h];
            }
            if p.left.high.is_none() {
                if let Some(l) = p.left.low {
                    self.reference[l] = p.right.low;
                    self.side[l] = -1;
                    p.left.low = None;
                }
            }
            while let Some(h) = p.right.high {
                if self.dst[h] != u {
                    break;
                }
                p.right.high = self.reference[h];
            }
            if p.right.high.is_none() {
                if let Some(r) = p.right.low {
                    self.reference[r] = p.left.low;
                    self.side[r] = -1;
                    p.right.low = None;
                }
            }
            self.stack.push(p);
        }
        if self.lowpt[e] < self.height[u] {
            let top = self.stack.last().expect("return edge keeps a pair");
            let (hl, hr) = (top.left.high, top.right.high);
            self.reference[e] = match (hl, hr) {
                (Some(l), None) => Some(l),
                (Some(l), Some(r)) if self.lowpt[l] > self.lowpt[r] => Some(l),
                _ => hr,
            };
        }
    }

    fn sign(&mut self, e: usize) -> i64 {
        let mut chain = vec![e];
        while let Some(r) = self.reference[*chain.last().expect("non-empty")] {
            chain.push(r);
        }
        for idx in (0..chain.len() - 1).rev() {
            let (x, r) = (chain[idx], chain[idx + 1]);
            self.side[x] *= self.side[r];
            self.reference[x] = None;
        }
        self.side[e]
    }

    fn embed(
        &self,
        root: usize,
        rot: &mut Rotation,
        left_ref: &mut [usize],
        right_ref: &mut [usize],
    ) {
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            if *pos == self.ordered[v].len() {
                frames.pop();
                continue;
            }
            let ei = self.ordered[v][*pos];
            *pos += 1;
            let w = self.dst[ei];
            if self.parent_edge[w] == Some(ei) {
                rot.add_first(w, v);
                left_ref[v] = w;
                right_ref[v] = w;
                frames.push((w, 0));
            } else if self.side[ei] == 1 {
                rot.add_cw(w, v, Some(right_ref[w]));
            } else {
                rot.add_ccw(w, v, Some(left_ref[w]));
                left_ref[w] = v;
            }
        }
    }
}

/// Per-vertex circular doubly linked neighbour lists.
struct Rotation {
    cw: HashMap<(usize, usize), usize>,
    ccw: HashMap<(usize, usize), usize>,
    first: Vec<Option<usize>>,
}

impl Rotation {
    fn new(n: usize) -> Self {
        Rotation {
            cw: HashMap::new(),
            ccw: HashMap::new(),
            first: vec![None; n],
        }
    }

    fn add_cw(&mut self, v: usize, w: usize, reference: Option<usize>) {
        match reference {
            None => {
                self.cw.insert((v, w), w);
                self.ccw.insert((v, w), w);
                self.first[v] = Some(w);
            }
            Some(r) => {
                let next = self.cw[&(v, r)];
                self.cw.insert((v, r), w);
                self.ccw.insert((v, w), r);
                self.cw.insert((v, w), next);
                self.ccw.insert((v, next), w);
            }
        }
    }

    fn add_ccw(&mut self, v: usize, w: usize, reference: Option<usize>) {
        match reference {
            None => self.add_cw(v, w, None),
            Some(r) => {
                let prev = self.ccw[&(v, r)];
                self.add_cw(v, w, Some(prev));
                if self.first[v] == Some(r) {
                    self.first[v] = Some(w);
                }
            }
        }
    }

    fn add_first(&mut self, v: usize, w: usize) {
        let first = self.first[v];
        self.add_ccw(v, w, first);
    }

    fn into_lists(self) -> Vec<Vec<usize>> {
        self.first
            .iter()
            .enumerate()
            .map(|(v, f)| {
                let mut list = Vec::new();
                if let Some(start) = *f {
                    let mut cur = start;
                    loop {
                        list.push(cur);
                        cur = self.cw[&(v, cur)];
                        if cur == start {
                            break;
                        }
                    }
                }
                list
            })
            .collect()
    }
}
