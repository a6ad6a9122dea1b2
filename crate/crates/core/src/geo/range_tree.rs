//! Multi-level range tree with exact canonical decompositions of
//! axis-parallel rectangles.
//!
//! Level `a` is a balanced tree over the points sorted by coordinate `a`;
//! each of its nodes owns a level `a+1` tree over the same points. Nodes of
//! the last level are the canonical nodes reported by queries.

use crate::error::{Error, Result};
use crate::instance::Rect;

const NONE: usize = usize::MAX;

#[derive(Clone, Debug)]
pub struct RtNode {
    pub level: usize,
    pub parent: usize,
    pub children: Option<(usize, usize)>,
    /// Smallest and largest key (coordinate `level`) under this node.
    pub min_key: f64,
    pub max_key: f64,
    /// Root of the next-level tree, absent on the last level.
    pub next: usize,
    /// The node's points are `arrays[array][start..end]`.
    array: usize,
    start: usize,
    end: usize,
}

#[derive(Clone, Debug)]
pub struct RangeTree {
    d: usize,
    n: usize,
    nodes: Vec<RtNode>,
    arrays: Vec<Vec<usize>>,
    /// Last-level leaves holding each point.
    leaves_of: Vec<Vec<usize>>,
}

impl RangeTree {
    pub fn build(points: &[Vec<f64>]) -> RangeTree {
        assert!(!points.is_empty(), "range tree needs at least one point");
        let d = points[0].len();
        let mut t = RangeTree { d, n: points.len(), nodes: Vec::new(), arrays: Vec::new(), leaves_of: vec![Vec::new(); points.len()] };
        let all: Vec<usize> = (0..points.len()).collect();
        t.build_level(points, all, 0);
        t
    }

    fn build_level(&mut self, points: &[Vec<f64>], mut ids: Vec<usize>, level: usize) -> usize {
        ids.sort_by(|&a, &b| points[a][level].total_cmp(&points[b][level]).then(a.cmp(&b)));
        let len = ids.len();
        self.arrays.push(ids);
        let arr = self.arrays.len() - 1;
        self.build_node(points, arr, 0, len, level, NONE)
    }

    fn build_node(&mut self, points: &[Vec<f64>], arr: usize, start: usize, end: usize, level: usize, parent: usize) -> usize {
        let min_key = points[self.arrays[arr][start]][level];
        let max_key = points[self.arrays[arr][end - 1]][level];
        let id = self.nodes.len();
        self.nodes.push(RtNode { level, parent, children: None, min_key, max_key, next: NONE, array: arr, start, end });
        if level + 1 < self.d {
            let sub = self.arrays[arr][start..end].to_vec();
            let nx = self.build_level(points, sub, level + 1);
            self.nodes[id].next = nx;
        }
        if end - start > 1 {
            let mid = start + (end - start) / 2;
            let l = self.build_node(points, arr, start, mid, level, id);
            let r = self.build_node(points, arr, mid, end, level, id);
            self.nodes[id].children = Some((l, r));
        } else if level + 1 == self.d {
            self.leaves_of[self.arrays[arr][start]].push(id);
        }
        id
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn num_points(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[RtNode] {
        &self.nodes
    }

    pub fn node(&self, u: usize) -> &RtNode {
        &self.nodes[u]
    }

    pub fn points_of(&self, u: usize) -> &[usize] {
        let nd = &self.nodes[u];
        &self.arrays[nd.array][nd.start..nd.end]
    }

    pub fn count_of(&self, u: usize) -> usize {
        self.nodes[u].end - self.nodes[u].start
    }

    /// Last-level leaves holding point `i`, one per chain of ancestors.
    pub fn leaves_of(&self, i: usize) -> &[usize] {
        &self.leaves_of[i]
    }

    /// Every last-level node whose point set contains `i`: the leaves of `i`
    /// and their ancestors within the same last-level tree.
    pub fn last_level_path(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for &leaf in &self.leaves_of[i] {
            let mut u = leaf;
            while u != NONE && self.nodes[u].level + 1 == self.d {
                out.push(u);
                u = self.nodes[u].parent;
            }
        }
        out
    }

    pub fn slots<T: Clone>(&self, init: T) -> Vec<T> {
        vec![init; self.nodes.len()]
    }

    /// Canonical last-level nodes whose point sets partition `rect ∩ P`.
    pub fn query(&self, rect: &Rect) -> Result<Vec<usize>> {
        if rect.dim() != self.d {
            return Err(Error::Dimension { record: "range query".into(), detail: format!("rect has {} axes, tree has {}", rect.dim(), self.d) });
        }
        if !rect.well_ordered() {
            return Err(Error::Precondition("rectangle has an axis with hi < lo".into()));
        }
        let mut out = Vec::new();
        self.query_rec(0, rect, &mut out);
        Ok(out)
    }

    fn query_rec(&self, u: usize, rect: &Rect, out: &mut Vec<usize>) {
        let nd = &self.nodes[u];
        let (lo, hi) = rect.interval(nd.level);
        if nd.max_key < lo || nd.min_key > hi {
            return;
        }
        if lo <= nd.min_key && nd.max_key <= hi {
            if nd.next == NONE {
                out.push(u);
            } else {
                self.query_rec(nd.next, rect, out);
            }
            return;
        }
        if let Some((l, r)) = nd.children {
            self.query_rec(l, rect, out);
            self.query_rec(r, rect, out);
        }
    }

    pub fn count(&self, rect: &Rect) -> Result<usize> {
        Ok(self.query(rect)?.iter().map(|&u| self.count_of(u)).sum())
    }

    pub fn report(&self, rect: &Rect) -> Result<Vec<usize>> {
        let mut v: Vec<usize> = self.query(rect)?.iter().flat_map(|&u| self.points_of(u).iter().copied()).collect();
        v.sort_unstable();
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Bound;

    #[test]
    fn bounding_box_counts_everything() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 5.0], vec![3.0, 2.0], vec![3.0, 2.0]];
        let t = RangeTree::build(&pts);
        assert_eq!(t.count(&Rect::from_f64(&[0.0, 0.0], &[3.0, 5.0])).unwrap(), 4);
        assert_eq!(t.count(&Rect::full(2)).unwrap(), 4);
    }

    #[test]
    fn inverted_rect_is_rejected() {
        let t = RangeTree::build(&[vec![0.0]]);
        let r = Rect::new(vec![Bound::Finite(2.0)], vec![Bound::Finite(1.0)]);
        assert!(matches!(t.query(&r), Err(Error::Precondition(_))));
    }

    #[test]
    fn last_level_path_matches_reports() {
        let pts: Vec<Vec<f64>> = (0..30).map(|i| vec![(i * 7 % 11) as f64, (i * 5 % 13) as f64]).collect();
        let t = RangeTree::build(&pts);
        for i in 0..pts.len() {
            for u in t.last_level_path(i) {
                assert!(t.points_of(u).contains(&i));
            }
        }
    }
}
