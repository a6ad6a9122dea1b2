//! Balanced box-decomposition tree.
//!
//! Cells are quadtree boxes, optionally with box-shaped holes. A node is
//! split at the midpoint of its longest side; when that would leave more
//! than two thirds of the points on one side, a centroid shrink carves out
//! an inner quadtree box instead. Leaves hold one point or a group of
//! coincident points.

use crate::instance::euclid;

const NONE: usize = usize::MAX;

#[derive(Clone, Debug)]
pub struct BbdNode {
    pub parent: usize,
    pub children: Option<(usize, usize)>,
    /// The node's points are `order[start..end]`.
    pub start: usize,
    pub end: usize,
    pub depth: usize,
    /// Cell: outer box minus the holes.
    pub outer: (Vec<f64>, Vec<f64>),
    pub holes: Vec<(Vec<f64>, Vec<f64>)>,
    /// Tight bounding box of the node's points.
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BbdNode {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct BbdTree {
    d: usize,
    points: Vec<Vec<f64>>,
    nodes: Vec<BbdNode>,
    order: Vec<usize>,
    leaf_of: Vec<usize>,
}

/// Per-node storage declared by a caller.
pub type NodeSlots<T> = Vec<T>;

fn bbox(points: &[Vec<f64>], idx: &[usize], d: usize) -> (Vec<f64>, Vec<f64>) {
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for &i in idx {
        for a in 0..d {
            lo[a] = lo[a].min(points[i][a]);
            hi[a] = hi[a].max(points[i][a]);
        }
    }
    (lo, hi)
}

fn longest_side(lo: &[f64], hi: &[f64]) -> usize {
    let mut best = 0;
    for a in 1..lo.len() {
        if hi[a] - lo[a] > hi[best] - lo[best] {
            best = a;
        }
    }
    best
}

fn box_inside(inner: &(Vec<f64>, Vec<f64>), outer: &(Vec<f64>, Vec<f64>)) -> bool {
    (0..inner.0.len()).all(|a| outer.0[a] <= inner.0[a] && inner.1[a] <= outer.1[a])
}

impl BbdTree {
    /// Builds the tree. Duplicate points are allowed.
    pub fn build(points: &[Vec<f64>]) -> BbdTree {
        assert!(!points.is_empty(), "BBD tree needs at least one point");
        let d = points[0].len();
        let n = points.len();
        let mut t = BbdTree {
            d,
            points: points.to_vec(),
            nodes: Vec::with_capacity(2 * n),
            order: (0..n).collect(),
            leaf_of: vec![NONE; n],
        };
        let cell = bbox(points, &t.order, d);
        t.grow(NONE, 0, n, 0, cell, Vec::new());
        t
    }

    fn push_node(&mut self, parent: usize, start: usize, end: usize, depth: usize, outer: (Vec<f64>, Vec<f64>), holes: Vec<(Vec<f64>, Vec<f64>)>) -> usize {
        let (lo, hi) = bbox(&self.points, &self.order[start..end], self.d);
        self.nodes.push(BbdNode { parent, children: None, start, end, depth, outer, holes, lo, hi });
        self.nodes.len() - 1
    }

    fn grow(&mut self, parent: usize, start: usize, end: usize, depth: usize, outer: (Vec<f64>, Vec<f64>), holes: Vec<(Vec<f64>, Vec<f64>)>) -> usize {
        let id = self.push_node(parent, start, end, depth, outer.clone(), holes.clone());
        let coincident = {
            let nd = &self.nodes[id];
            nd.lo == nd.hi
        };
        if coincident {
            for i in start..end {
                self.leaf_of[self.order[i]] = id;
            }
            return id;
        }
        let n = end - start;
        let (split, cells) = self.choose_partition(start, end, &outer, &holes);
        let (left_cell, right_cell) = cells;
        let mid = start + split;
        debug_assert!(split > 0 && split < n);
        let l = self.grow(id, start, mid, depth + 1, left_cell.0, left_cell.1);
        let r = self.grow(id, mid, end, depth + 1, right_cell.0, right_cell.1);
        self.nodes[id].children = Some((l, r));
        id
    }

    /// Reorders `order[start..end]` so the first child's points come first.
    /// Returns the split position and the two child cells.
    #[allow(clippy::type_complexity)]
    fn choose_partition(
        &mut self,
        start: usize,
        end: usize,
        outer: &(Vec<f64>, Vec<f64>),
        holes: &[(Vec<f64>, Vec<f64>)],
    ) -> (usize, (((Vec<f64>, Vec<f64>), Vec<(Vec<f64>, Vec<f64>)>), ((Vec<f64>, Vec<f64>), Vec<(Vec<f64>, Vec<f64>)>))) {
        let n = end - start;
        let a = longest_side(&outer.0, &outer.1);
        let mid = 0.5 * (outer.0[a] + outer.1[a]);
        if mid > outer.0[a] && mid < outer.1[a] {
            let nl = self.order[start..end].iter().filter(|&&i| self.points[i][a] < mid).count();
            if 3 * nl.max(n - nl) <= 2 * n {
                self.partition(start, end, |p| p[a] < mid);
                let mut lbox = outer.clone();
                lbox.1[a] = mid;
                let mut rbox = outer.clone();
                rbox.0[a] = mid;
                let (lh, rh): (Vec<_>, Vec<_>) = holes.iter().cloned().partition(|h| h.1[a] <= mid);
                return (nl, ((lbox, lh), (rbox, rh)));
            }
            if let Some((inner, members)) = self.centroid_shrink(start, end, outer) {
                let mut mark = vec![false; self.points.len()];
                for &i in &members {
                    mark[i] = true;
                }
                let k = self.partition_idx(start, end, |i| mark[i]);
                if k > 0 && k < n {
                    let (ih, mut oh): (Vec<_>, Vec<_>) = holes.iter().cloned().partition(|h| box_inside(h, &inner));
                    oh.push(inner.clone());
                    return (k, ((inner, ih), (outer.clone(), oh)));
                }
            }
        }
        self.fallback_partition(start, end)
    }

    /// Descends the quadtree from `outer` into the heavier child while it
    /// holds more than two thirds of the points.
    #[allow(clippy::type_complexity)]
    fn centroid_shrink(&self, start: usize, end: usize, outer: &(Vec<f64>, Vec<f64>)) -> Option<((Vec<f64>, Vec<f64>), Vec<usize>)> {
        let n = end - start;
        let mut cur: Vec<usize> = self.order[start..end].to_vec();
        let mut b = outer.clone();
        for _ in 0..4096 {
            let a = longest_side(&b.0, &b.1);
            let mid = 0.5 * (b.0[a] + b.1[a]);
            if !(mid > b.0[a] && mid < b.1[a]) {
                return None;
            }
            let (l, r): (Vec<usize>, Vec<usize>) = cur.iter().partition(|&&i| self.points[i][a] < mid);
            let (next, child) = if l.len() >= r.len() {
                let mut c = b.clone();
                c.1[a] = mid;
                (l, c)
            } else {
                let mut c = b.clone();
                c.0[a] = mid;
                (r, c)
            };
            let (plo, phi) = bbox(&self.points, &next, self.d);
            if 3 * next.len() <= 2 * n || plo == phi {
                return Some((child, next));
            }
            cur = next;
            b = child;
        }
        None
    }

    /// Split used when the cell cannot be halved in floating point: separate
    /// the minimum coordinate along some axis with positive extent.
    #[allow(clippy::type_complexity)]
    fn fallback_partition(&mut self, start: usize, end: usize) -> (usize, (((Vec<f64>, Vec<f64>), Vec<(Vec<f64>, Vec<f64>)>), ((Vec<f64>, Vec<f64>), Vec<(Vec<f64>, Vec<f64>)>))) {
        let (lo, hi) = bbox(&self.points, &self.order[start..end], self.d);
        let a = longest_side(&lo, &hi);
        let cut = lo[a];
        let k = self.partition(start, end, |p| p[a] <= cut);
        let mut lbox = (lo.clone(), hi.clone());
        lbox.1[a] = cut;
        let mut rbox = (lo, hi);
        rbox.0[a] = cut;
        (k, ((lbox, Vec::new()), (rbox, Vec::new())))
    }

    fn partition<F: Fn(&[f64]) -> bool>(&mut self, start: usize, end: usize, first: F) -> usize {
        let pts = std::mem::take(&mut self.points);
        let k = self.partition_idx(start, end, |i| first(&pts[i]));
        self.points = pts;
        k
    }

    fn partition_idx<F: Fn(usize) -> bool>(&mut self, start: usize, end: usize, first: F) -> usize {
        let slice = &mut self.order[start..end];
        let (mut yes, no): (Vec<usize>, Vec<usize>) = slice.iter().partition(|&&i| first(i));
        let k = yes.len();
        yes.extend(no);
        slice.copy_from_slice(&yes);
        k
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn nodes(&self) -> &[BbdNode] {
        &self.nodes
    }

    pub fn node(&self, u: usize) -> &BbdNode {
        &self.nodes[u]
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn height(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    pub fn leaf_of(&self, i: usize) -> usize {
        self.leaf_of[i]
    }

    /// Points stored under node `u`.
    pub fn points_of(&self, u: usize) -> &[usize] {
        let n = &self.nodes[u];
        &self.order[n.start..n.end]
    }

    /// Fresh per-node storage.
    pub fn slots<T: Clone>(&self, init: T) -> NodeSlots<T> {
        vec![init; self.nodes.len()]
    }

    /// Walk from the leaf holding point `i` up to the root.
    pub fn path(&self, i: usize) -> PathIter<'_> {
        PathIter { tree: self, cur: self.leaf_of[i] }
    }

    fn dist_bounds(&self, u: usize, x: &[f64]) -> (f64, f64) {
        let n = &self.nodes[u];
        let mut near = 0.0;
        let mut far = 0.0;
        for a in 0..self.d {
            let lo_gap = n.lo[a] - x[a];
            let hi_gap = x[a] - n.hi[a];
            let g = if lo_gap > 0.0 {
                lo_gap
            } else if hi_gap > 0.0 {
                hi_gap
            } else {
                0.0
            };
            near += g * g;
            let f = (x[a] - n.lo[a]).abs().max((n.hi[a] - x[a]).abs());
            far += f * f;
        }
        (near.sqrt(), far.sqrt())
    }

    /// Canonical nodes for the ball `B(x, r)`: their points include every
    /// point within `r` and none farther than `(1+eps) r`.
    pub fn ball_query(&self, x: &[f64], r: f64, eps: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.query_rec(0, x, r, eps, None, &mut out);
        out
    }

    /// Ball query restricted to the live part of the tree.
    pub fn ball_query_active(&self, x: &[f64], r: f64, eps: f64, act: &ActiveSet) -> Vec<usize> {
        let mut out = Vec::new();
        self.query_rec(0, x, r, eps, Some(act), &mut out);
        out
    }

    fn query_rec(&self, u: usize, x: &[f64], r: f64, eps: f64, act: Option<&ActiveSet>, out: &mut Vec<usize>) {
        let state = act.map_or(Life::Full, |a| a.state[u]);
        if state == Life::Dead {
            return;
        }
        let (near, far) = self.dist_bounds(u, x);
        if near > r {
            return;
        }
        if far <= (1.0 + eps) * r && state == Life::Full {
            out.push(u);
            return;
        }
        match self.nodes[u].children {
            Some((l, rr)) => {
                self.query_rec(l, x, r, eps, act, out);
                self.query_rec(rr, x, r, eps, act, out);
            }
            None => {
                // Leaves hold coincident points, so near == far here.
                if near <= r && state == Life::Full {
                    out.push(u);
                }
            }
        }
    }

    /// Points covered by a set of canonical nodes.
    pub fn collect(&self, nodes: &[usize]) -> Vec<usize> {
        let mut v: Vec<usize> = nodes.iter().flat_map(|&u| self.points_of(u).iter().copied()).collect();
        v.sort_unstable();
        v
    }

    /// Linear-scan reference: points within `r` of `x`.
    pub fn scan(&self, x: &[f64], r: f64) -> Vec<usize> {
        (0..self.points.len()).filter(|&i| euclid(&self.points[i], x) <= r).collect()
    }
}

pub struct PathIter<'a> {
    tree: &'a BbdTree,
    cur: usize,
}

impl Iterator for PathIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.cur == NONE {
            return None;
        }
        let u = self.cur;
        self.cur = self.tree.nodes[u].parent;
        Some(u)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Life {
    Full,
    Partial,
    Dead,
}

/// Activity flags, live weights and representatives over a BBD tree.
#[derive(Clone, Debug)]
pub struct ActiveSet {
    pub state: NodeSlots<Life>,
    /// Total weight of live points under each node.
    pub weight: NodeSlots<u64>,
    /// Some live point under each node.
    pub rep: NodeSlots<usize>,
}

impl ActiveSet {
    /// Everything live, each point carrying `weights[i]`.
    pub fn new(tree: &BbdTree, weights: &[u64]) -> ActiveSet {
        let m = tree.nodes.len();
        let mut s = ActiveSet { state: vec![Life::Full; m], weight: vec![0; m], rep: vec![NONE; m] };
        for u in (0..m).rev() {
            match tree.nodes[u].children {
                None => {
                    s.weight[u] = tree.points_of(u).iter().map(|&i| weights[i]).sum();
                    s.rep[u] = tree.points_of(u)[0];
                }
                Some((l, r)) => {
                    s.weight[u] = s.weight[l] + s.weight[r];
                    s.rep[u] = s.rep[l];
                }
            }
        }
        s
    }

    pub fn root_alive(&self) -> bool {
        self.state[0] != Life::Dead
    }

    pub fn total(&self) -> u64 {
        if self.root_alive() {
            self.weight[0]
        } else {
            0
        }
    }

    /// Kills the given nodes and repairs their ancestors bottom-up.
    pub fn deactivate(&mut self, tree: &BbdTree, nodes: &[usize]) {
        for &u in nodes {
            self.state[u] = Life::Dead;
            self.weight[u] = 0;
        }
        let mut touched: Vec<usize> = nodes.iter().map(|&u| tree.nodes[u].parent).filter(|&p| p != NONE).collect();
        // Deeper nodes first so each parent sees repaired children.
        touched.sort_by_key(|&u| std::cmp::Reverse(tree.nodes[u].depth));
        touched.dedup();
        let mut queue = std::collections::BTreeSet::new();
        for u in touched {
            queue.insert((std::cmp::Reverse(tree.nodes[u].depth), u));
        }
        while let Some((key, u)) = queue.pop_first() {
            let _ = key;
            if self.state[u] == Life::Dead {
                continue;
            }
            let (l, r) = tree.nodes[u].children.expect("parent has children");
            let (sl, sr) = (self.state[l], self.state[r]);
            self.state[u] = match (sl, sr) {
                (Life::Dead, Life::Dead) => Life::Dead,
                (Life::Full, Life::Full) => Life::Full,
                _ => Life::Partial,
            };
            self.weight[u] = if self.state[u] == Life::Dead {
                0
            } else {
                (if sl != Life::Dead { self.weight[l] } else { 0 }) + (if sr != Life::Dead { self.weight[r] } else { 0 })
            };
            self.rep[u] = if sl != Life::Dead { self.rep[l] } else { self.rep[r] };
            let p = tree.nodes[u].parent;
            if p != NONE {
                queue.insert((std::cmp::Reverse(tree.nodes[p].depth), p));
            }
        }
    }

    /// Whether point `i` is still live.
    pub fn point_alive(&self, tree: &BbdTree, i: usize) -> bool {
        tree.path(i).all(|u| self.state[u] != Life::Dead)
    }

    /// Live points under node `u`.
    pub fn live_points(&self, tree: &BbdTree, u: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![u];
        while let Some(v) = stack.pop() {
            match self.state[v] {
                Life::Dead => {}
                Life::Full => out.extend_from_slice(tree.points_of(v)),
                Life::Partial => {
                    let (l, r) = tree.nodes[v].children.expect("partial nodes are internal");
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| (0..d).map(|_| rng.gen_range(0.0..100.0)).collect()).collect()
    }

    #[test]
    fn single_point_is_leaf() {
        let t = BbdTree::build(&[vec![1.0, 2.0]]);
        assert_eq!(t.nodes().len(), 1);
        assert!(t.node(0).is_leaf());
    }

    #[test]
    fn every_point_in_one_leaf() {
        let pts = random_points(1000, 2, 1);
        let t = BbdTree::build(&pts);
        let mut seen = vec![0; pts.len()];
        for u in 0..t.nodes().len() {
            if t.node(u).is_leaf() {
                for &i in t.points_of(u) {
                    seen[i] += 1;
                    assert_eq!(t.leaf_of(i), u);
                }
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn duplicates_share_a_leaf() {
        let pts = vec![vec![1.0, 1.0], vec![1.0, 1.0], vec![5.0, 0.0]];
        let t = BbdTree::build(&pts);
        assert_eq!(t.leaf_of(0), t.leaf_of(1));
        assert_ne!(t.leaf_of(0), t.leaf_of(2));
    }

    #[test]
    fn height_is_logarithmic_on_clustered_data() {
        let mut pts = random_points(500, 2, 2);
        // A tight cluster forces shrinks.
        pts.extend((0..500).map(|i| vec![50.0 + 1e-6 * i as f64, 50.0 + 1e-7 * (i % 7) as f64]));
        let t = BbdTree::build(&pts);
        let bound = 4.0 * (pts.len() as f64).log2();
        assert!((t.height() as f64) <= bound, "height {} > {}", t.height(), bound);
    }

    #[test]
    fn zero_radius_finds_coincident_points() {
        let pts = vec![vec![0.0], vec![0.0], vec![1.0]];
        let t = BbdTree::build(&pts);
        assert_eq!(t.collect(&t.ball_query(&[0.0], 0.0, 0.1)), vec![0, 1]);
        assert!(t.ball_query(&[0.5], 0.0, 0.1).is_empty());
    }

    #[test]
    fn deactivation_hides_points() {
        let pts = random_points(200, 2, 3);
        let t = BbdTree::build(&pts);
        let mut act = ActiveSet::new(&t, &vec![1; 200]);
        let q = t.ball_query_active(&pts[0], 30.0, 0.1, &act);
        let gone = t.collect(&q);
        act.deactivate(&t, &q);
        assert_eq!(act.total(), 200 - gone.len() as u64);
        let again = t.collect(&t.ball_query_active(&pts[0], 60.0, 0.1, &act));
        assert!(again.iter().all(|i| gone.binary_search(i).is_err()));
        for i in 0..200 {
            assert_eq!(act.point_alive(&t, i), gone.binary_search(&i).is_err());
        }
        if act.root_alive() {
            assert!(act.point_alive(&t, act.rep[0]));
        }
    }
}
