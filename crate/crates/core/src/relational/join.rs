//! Join trees and Yannakakis-style evaluation of the full natural join.
//!
//! A bottom-up pass stores, for every surviving tuple, the number of join
//! results in its subtree. Those counts give the exact result size,
//! proportional top-down sampling, and enumeration without dead ends.

use std::collections::{HashMap, HashSet};
use std::ops::ControlFlow;

use rand::Rng;

use super::schema::{key_bits, Database, Mask, TupleId};
use crate::error::{Error, Result};
use crate::instance::Rect;

/// Rooted tree over relations in which every attribute's relations are
/// connected.
#[derive(Clone, Debug, PartialEq)]
pub struct JoinTree {
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub root: usize,
    /// Preorder from the root.
    pub order: Vec<usize>,
}

impl JoinTree {
    /// GYO ear removal over the relations' attribute sets.
    pub fn build(schema: &[Vec<usize>]) -> Result<JoinTree> {
        let g = schema.len();
        if g == 0 {
            return Err(Error::Malformed("empty schema".into()));
        }
        let sets: Vec<HashSet<usize>> = schema.iter().map(|s| s.iter().copied().collect()).collect();
        let mut alive = vec![true; g];
        let mut parent = vec![None; g];
        for _ in 1..g {
            let mut removed = false;
            'ear: for e in (0..g).filter(|&e| alive[e]) {
                let shared: Vec<usize> = sets[e]
                    .iter()
                    .copied()
                    .filter(|a| (0..g).any(|o| o != e && alive[o] && sets[o].contains(a)))
                    .collect();
                for f in (0..g).filter(|&f| f != e && alive[f]) {
                    if shared.iter().all(|a| sets[f].contains(a)) {
                        parent[e] = Some(f);
                        alive[e] = false;
                        removed = true;
                        break 'ear;
                    }
                }
            }
            if !removed {
                return Err(Error::NotAcyclic);
            }
        }
        let root = alive.iter().position(|&a| a).expect("one relation remains");
        let mut children = vec![Vec::new(); g];
        for (c, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(c);
            }
        }
        let mut order = Vec::with_capacity(g);
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            order.push(u);
            stack.extend(children[u].iter().rev());
        }
        Ok(JoinTree { parent, children, root, order })
    }

    /// True when every attribute's relations form a connected subtree.
    pub fn is_valid(&self, schema: &[Vec<usize>]) -> bool {
        let attrs: HashSet<usize> = schema.iter().flatten().copied().collect();
        attrs.into_iter().all(|a| {
            let holders: Vec<usize> = (0..schema.len()).filter(|&r| schema[r].contains(&a)).collect();
            // A connected subtree has exactly one holder whose parent is not a holder.
            holders
                .iter()
                .filter(|&&r| self.parent[r].is_none_or(|p| !schema[p].contains(&a)))
                .count()
                == 1
        })
    }

    /// Graphviz rendering with relation names and shared attributes on edges.
    pub fn to_dot(&self, db: &Database) -> String {
        let mut s = String::from("graph join_tree {\n");
        for (i, r) in db.relations().iter().enumerate() {
            let attrs: Vec<&str> = r.attrs.iter().map(|&a| db.attrs()[a].as_str()).collect();
            s.push_str(&format!("  r{i} [label=\"{}({})\"];\n", r.name, attrs.join(",")));
        }
        for &c in &self.order {
            if let Some(p) = self.parent[c] {
                let shared: Vec<&str> = db
                    .relation(c)
                    .attrs
                    .iter()
                    .filter(|a| db.relation(p).attrs.contains(a))
                    .map(|&a| db.attrs()[a].as_str())
                    .collect();
                s.push_str(&format!("  r{p} -- r{c} [label=\"{}\"];\n", shared.join(",")));
            }
        }
        s.push_str("}\n");
        s
    }
}

pub fn build_join_tree(db: &Database) -> Result<JoinTree> {
    let schema: Vec<Vec<usize>> = db.relations().iter().map(|r| r.attrs.clone()).collect();
    JoinTree::build(&schema)
}

/// One join result with the row it uses in every relation.
#[derive(Clone, Debug, PartialEq)]
pub struct JoinResult {
    pub point: Vec<f64>,
    pub rows: Vec<usize>,
}

impl JoinResult {
    /// The constituent input tuples, one per relation.
    pub fn tuples(&self) -> impl Iterator<Item = TupleId> + '_ {
        self.rows.iter().enumerate().map(|(rel, &row)| TupleId { rel, row })
    }
}

/// Column positions shared by a relation and its parent.
#[derive(Clone, Debug)]
struct Link {
    child_pos: Vec<usize>,
    parent_pos: Vec<usize>,
}

type Key = Vec<u64>;

fn project(row: &[f64], pos: &[usize]) -> Key {
    pos.iter().map(|&p| key_bits(row[p])).collect()
}

/// Natural join of all relations of a (sub-)database.
#[derive(Clone, Debug)]
pub struct Query<'a> {
    db: &'a Database,
    tree: JoinTree,
    links: Vec<Option<Link>>,
    /// For every attribute, a relation holding it and its column.
    attr_src: Vec<(usize, usize)>,
    mask: Mask,
}

impl<'a> Query<'a> {
    pub fn new(db: &'a Database) -> Result<Query<'a>> {
        let tree = build_join_tree(db)?;
        let links = (0..db.relations().len())
            .map(|c| {
                tree.parent[c].map(|p| {
                    let (cr, pr) = (db.relation(c), db.relation(p));
                    let mut link = Link { child_pos: Vec::new(), parent_pos: Vec::new() };
                    for (ci, a) in cr.attrs.iter().enumerate() {
                        if let Some(pi) = pr.attrs.iter().position(|b| b == a) {
                            link.child_pos.push(ci);
                            link.parent_pos.push(pi);
                        }
                    }
                    link
                })
            })
            .collect();
        let mut attr_src = vec![(usize::MAX, 0); db.dim()];
        for (ri, r) in db.relations().iter().enumerate() {
            for (pos, &a) in r.attrs.iter().enumerate() {
                if attr_src[a].0 == usize::MAX {
                    attr_src[a] = (ri, pos);
                }
            }
        }
        Ok(Query { db, tree, links, attr_src, mask: db.full_mask() })
    }

    /// Same query over the rows allowed by `mask`.
    pub fn restrict(&self, mask: Mask) -> Query<'a> {
        Query { mask, ..self.clone() }
    }

    /// Same query with `removed` tuples dropped on top of the current mask.
    pub fn without(&self, removed: &[TupleId]) -> Query<'a> {
        let mut mask = self.mask.clone();
        for t in removed {
            mask[t.rel][t.row] = false;
        }
        self.restrict(mask)
    }

    pub fn db(&self) -> &'a Database {
        self.db
    }

    pub fn tree(&self) -> &JoinTree {
        &self.tree
    }

    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    pub fn dim(&self) -> usize {
        self.db.dim()
    }

    /// Values of attribute `a` among the allowed rows of one relation
    /// holding it. Every join result takes one of these.
    pub fn domain(&self, a: usize) -> Vec<f64> {
        let (ri, pos) = self.attr_src[a];
        let mut v: Vec<f64> = self
            .db
            .relation(ri)
            .rows
            .iter()
            .enumerate()
            .filter(|(i, _)| self.mask[ri][*i])
            .map(|(_, r)| r[pos])
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Counting pass over rows allowed by the mask whose every value passes
    /// `keep(attribute, value)`.
    pub fn counted<F: Fn(usize, f64) -> bool>(&self, keep: F) -> Counted<'_, 'a> {
        let g = self.db.relations().len();
        let mut cnt: Vec<Vec<u128>> = vec![Vec::new(); g];
        let mut groups: Vec<HashMap<Key, Group>> = vec![HashMap::new(); g];
        for &u in self.tree.order.iter().rev() {
            let rel = self.db.relation(u);
            let mut cu = vec![0u128; rel.rows.len()];
            for (i, row) in rel.rows.iter().enumerate() {
                if !self.mask[u][i] || !rel.attrs.iter().zip(row).all(|(&a, &v)| keep(a, v)) {
                    continue;
                }
                let mut c: u128 = 1;
                for &ch in &self.tree.children[u] {
                    let key = project(row, &self.links[ch].as_ref().unwrap().parent_pos);
                    c = c.saturating_mul(groups[ch].get(&key).map_or(0, Group::total));
                    if c == 0 {
                        break;
                    }
                }
                cu[i] = c;
                if c > 0 {
                    let key = match &self.links[u] {
                        Some(l) => project(row, &l.child_pos),
                        None => Vec::new(),
                    };
                    groups[u].entry(key).or_default().push(i, c);
                }
            }
            cnt[u] = cu;
        }
        let total = groups[self.tree.root].get(&Vec::new()).map_or(0, Group::total);
        Counted { q: self, cnt, groups, total }
    }

    /// Counting pass restricted to a rectangle.
    pub fn counted_rect(&self, rect: &Rect) -> Counted<'_, 'a> {
        self.counted(|a, v| rect.contains_coord(a, v))
    }

    /// Builds the result point from one row per relation.
    fn assemble(&self, rows: &[usize]) -> JoinResult {
        let point = self.attr_src.iter().map(|&(ri, pos)| self.db.relation(ri).rows[rows[ri]][pos]).collect();
        JoinResult { point, rows: rows.to_vec() }
    }

    /// Whether `p` is a join result of this (sub-)database.
    pub fn contains(&self, p: &[f64]) -> bool {
        self.counted(|a, v| key_bits(v) == key_bits(p[a])).total > 0
    }

    /// Whether all constituent tuples of `res` are allowed here.
    pub fn uses_allowed(&self, res: &JoinResult) -> bool {
        res.tuples().all(|t| self.mask[t.rel][t.row])
    }

    /// Full reducer: the rows that take part in at least one result.
    pub fn semijoin_reduce(&self) -> Mask {
        let c = self.counted(|_, _| true);
        let g = self.db.relations().len();
        let mut alive: Mask = (0..g).map(|u| vec![false; self.db.relation(u).rows.len()]).collect();
        for &u in &self.tree.order {
            let rel = self.db.relation(u);
            let parent_keys: Option<HashSet<Key>> = self.tree.parent[u].map(|p| {
                let link = self.links[u].as_ref().unwrap();
                self.db
                    .relation(p)
                    .rows
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| alive[p][*i])
                    .map(|(_, r)| project(r, &link.parent_pos))
                    .collect()
            });
            for (i, row) in rel.rows.iter().enumerate() {
                alive[u][i] = c.cnt[u][i] > 0
                    && parent_keys.as_ref().is_none_or(|ks| ks.contains(&project(row, &self.links[u].as_ref().unwrap().child_pos)));
            }
        }
        alive
    }
}

/// Rows sharing one join key with their parent, with running weights.
#[derive(Clone, Debug, Default)]
struct Group {
    rows: Vec<usize>,
    cum: Vec<u128>,
}

impl Group {
    fn push(&mut self, row: usize, w: u128) {
        let t = self.total();
        self.rows.push(row);
        self.cum.push(t.saturating_add(w));
    }

    fn total(&self) -> u128 {
        self.cum.last().copied().unwrap_or(0)
    }

    fn pick<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let x = rng.gen_range(0..self.total());
        self.rows[self.cum.partition_point(|&c| c <= x)]
    }
}

/// Result of one counting pass.
pub struct Counted<'q, 'a> {
    q: &'q Query<'a>,
    /// Results in the subtree of every row; 0 for filtered rows.
    pub cnt: Vec<Vec<u128>>,
    groups: Vec<HashMap<Key, Group>>,
    pub total: u128,
}

impl Counted<'_, '_> {
    fn group_of(&self, u: usize, chosen: &[usize]) -> Option<&Group> {
        match self.q.tree.parent[u] {
            None => self.groups[u].get(&Vec::new()),
            Some(p) => {
                let link = self.q.links[u].as_ref().unwrap();
                self.groups[u].get(&project(&self.q.db.relation(p).rows[chosen[p]], &link.parent_pos))
            }
        }
    }

    /// One uniform result.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<JoinResult> {
        if self.total == 0 {
            return None;
        }
        let mut chosen = vec![usize::MAX; self.q.tree.order.len()];
        for &u in &self.q.tree.order {
            chosen[u] = self.group_of(u, &chosen).expect("counts are consistent").pick(rng);
        }
        Some(self.q.assemble(&chosen))
    }

    /// `s` uniform results drawn with replacement.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, s: usize) -> Result<Vec<JoinResult>> {
        if self.total == 0 {
            return Err(Error::Empty);
        }
        Ok((0..s).map(|_| self.sample_one(rng).unwrap()).collect())
    }

    /// Visits every result in a fixed order until `f` breaks.
    pub fn try_for_each<B, F: FnMut(JoinResult) -> ControlFlow<B>>(&self, mut f: F) -> ControlFlow<B> {
        if self.total == 0 {
            return ControlFlow::Continue(());
        }
        let mut chosen = vec![usize::MAX; self.q.tree.order.len()];
        self.walk(0, &mut chosen, &mut f)
    }

    fn walk<B, F: FnMut(JoinResult) -> ControlFlow<B>>(&self, depth: usize, chosen: &mut Vec<usize>, f: &mut F) -> ControlFlow<B> {
        if depth == self.q.tree.order.len() {
            return f(self.q.assemble(chosen));
        }
        let u = self.q.tree.order[depth];
        let rows = self.group_of(u, chosen).expect("counts are consistent").rows.clone();
        for r in rows {
            chosen[u] = r;
            self.walk(depth + 1, chosen, f)?;
        }
        ControlFlow::Continue(())
    }

    pub fn for_each<F: FnMut(JoinResult)>(&self, mut f: F) {
        let _ = self.try_for_each::<(), _>(|r| {
            f(r);
            ControlFlow::Continue(())
        });
    }

    /// First result in enumeration order.
    pub fn first(&self) -> Option<JoinResult> {
        match self.try_for_each(ControlFlow::Break) {
            ControlFlow::Break(r) => Some(r),
            ControlFlow::Continue(()) => None,
        }
    }

    pub fn collect(&self) -> Vec<JoinResult> {
        let mut v = Vec::new();
        self.for_each(|r| v.push(r));
        v
    }
}

/// Exact size of the join result.
pub fn yannakakis_count(q: &Query) -> u128 {
    q.counted(|_, _| true).total
}

/// The full join result, refused when it has more than `cap` results.
pub fn yannakakis_materialize(q: &Query, cap: usize) -> Result<Vec<JoinResult>> {
    let c = q.counted(|_, _| true);
    if c.total > cap as u128 {
        return Err(Error::CapExceeded(format!("join has {} results, cap is {cap}", c.total)));
    }
    Ok(c.collect())
}

pub fn count_rect(q: &Query, rect: &Rect) -> u128 {
    q.counted_rect(rect).total
}

/// `s` uniform draws with replacement from the results inside `rect`.
pub fn sample_rect<R: Rng + ?Sized>(q: &Query, rect: &Rect, s: usize, rng: &mut R) -> Result<Vec<JoinResult>> {
    q.counted_rect(rect).sample(rng, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relational::schema::Relation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rel(name: &str, attrs: Vec<usize>, rows: Vec<Vec<f64>>) -> Relation {
        Relation { name: name.into(), attrs, rows }
    }

    fn names(d: usize) -> Vec<String> {
        (0..d).map(|i| format!("A{i}")).collect()
    }

    #[test]
    fn path_schema_is_a_chain() {
        let schema = vec![vec![0, 1], vec![1, 2], vec![2, 3]];
        let t = JoinTree::build(&schema).unwrap();
        assert!(t.is_valid(&schema));
        let edges = t.parent.iter().filter(|p| p.is_some()).count();
        assert_eq!(edges, 2);
        assert!(t.children.iter().all(|c| c.len() <= 1));
    }

    #[test]
    fn triangle_is_cyclic() {
        assert!(matches!(JoinTree::build(&[vec![0, 1], vec![1, 2], vec![0, 2]]), Err(Error::NotAcyclic)));
    }

    #[test]
    fn star_schema() {
        let schema = vec![vec![0, 1, 2], vec![0, 3], vec![1, 4], vec![2, 5]];
        let t = JoinTree::build(&schema).unwrap();
        assert!(t.is_valid(&schema));
        for c in 0..4 {
            if let Some(p) = t.parent[c] {
                assert!(p == 0 || c == 0);
            }
        }
    }

    #[test]
    fn small_join_counts() {
        let db = Database::new(
            names(2),
            vec![rel("R1", vec![0], vec![vec![1.0]]), rel("R2", vec![0, 1], vec![vec![1.0, 2.0], vec![1.0, 3.0]])],
        )
        .unwrap();
        let q = Query::new(&db).unwrap();
        assert_eq!(yannakakis_count(&q), 2);
        let all = yannakakis_materialize(&q, 10).unwrap();
        assert_eq!(all.len(), 2);
        assert!(matches!(yannakakis_materialize(&q, 1), Err(Error::CapExceeded(_))));
        assert_eq!(count_rect(&q, &Rect::full(2)), 2);
        let none = Rect::from_f64(&[5.0, 5.0], &[6.0, 6.0]);
        assert_eq!(count_rect(&q, &none), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(sample_rect(&q, &none, 3, &mut rng), Err(Error::Empty)));
        assert!(q.contains(&[1.0, 3.0]));
        assert!(!q.contains(&[1.0, 4.0]));
    }

    #[test]
    fn empty_relation_gives_zero() {
        let db = Database::new(names(2), vec![rel("R1", vec![0], vec![]), rel("R2", vec![0, 1], vec![vec![1.0, 2.0]])]).unwrap();
        assert_eq!(yannakakis_count(&Query::new(&db).unwrap()), 0);
    }

    #[test]
    fn reducer_drops_dangling_rows() {
        let db = Database::new(
            names(3),
            vec![
                rel("R1", vec![0, 1], vec![vec![1.0, 1.0], vec![2.0, 9.0]]),
                rel("R2", vec![1, 2], vec![vec![1.0, 5.0], vec![7.0, 5.0]]),
            ],
        )
        .unwrap();
        let q = Query::new(&db).unwrap();
        assert_eq!(q.semijoin_reduce(), vec![vec![true, false], vec![true, false]]);
    }

    #[test]
    fn dot_lists_edges() {
        let db = Database::new(names(2), vec![rel("R", vec![0], vec![]), rel("S", vec![0, 1], vec![])]).unwrap();
        let q = Query::new(&db).unwrap();
        let dot = q.tree().to_dot(&db);
        assert!(dot.contains("--"));
        assert!(dot.contains("label=\"A0\""));
    }
}
