//! Offline batch algorithms driven by disjoint-set union: skipping points,
//! subtree extreme points and extreme points reaching nested tree segments.
//!
//! Every solver works in the numbering of the tree it is given.

use crate::dsu::Dsu;
use crate::graph::{DfsTree, Vertex, NIL};

/// Which extreme to report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// The minimum qualifying vertex.
    Left,
    /// The maximum qualifying vertex.
    Right,
}

/// Errors for malformed batches.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BatchError {
    #[error("{d} is not a descendant of {v}")]
    NotDescendant { v: Vertex, d: Vertex },
    #[error("queries {a} and {b} violate the nesting condition")]
    NotNested { a: usize, b: usize },
}

fn edge_order(t: &DfsTree, side: Side) -> Box<dyn Iterator<Item = Vertex>> {
    let n = t.n() as Vertex;
    match side {
        Side::Left => Box::new(1..=n),
        Side::Right => Box::new((1..=n).rev()),
    }
}

/// For every vertex `v`, the extreme descendant `x` with a back-edge `(x, y)`
/// such that `y < p(v)` and `y != z[v]`. `z[v] == NIL` skips nothing.
pub fn skip_points(t: &DfsTree, z: &[Vertex], side: Side) -> Vec<Vertex> {
    skip_points_counted(t, z, side).0
}

/// [`skip_points`] plus the number of DSU operations performed.
pub fn skip_points_counted(t: &DfsTree, z: &[Vertex], side: Side) -> (Vec<Vertex>, u64) {
    let n = t.n();
    let mut out = vec![NIL; n + 1];
    let mut marked = vec![false; n + 1];
    let mut dsu = Dsu::new(n + 1);
    for x in edge_order(t, side) {
        for &y in t.ups(x) {
            let mut v = dsu.rep(x);
            while v > y && t.parent(v) != y {
                if z[v as usize] != y {
                    out[v as usize] = x;
                    let p = t.parent(v);
                    let next = dsu.rep(p);
                    dsu.unite(v, p);
                    dsu.set_rep(v, next);
                    v = next;
                } else if marked[v as usize] {
                    break;
                } else {
                    marked[v as usize] = true;
                    v = dsu.rep(t.parent(v));
                }
            }
        }
    }
    let ops = dsu.op_count();
    (out, ops)
}

/// For each query `(v, d)` with `d` in `T(v)`: the extreme `x` in `T(d)` with
/// `l1(x) < p(v)`, i.e. the extreme descendant of `d` providing an edge of `B_p(v)`.
pub fn subtree_extremes(t: &DfsTree, l1: &[Vertex], queries: &[(Vertex, Vertex)], side: Side) -> Result<Vec<Vertex>, BatchError> {
    Ok(subtree_extremes_counted(t, l1, queries, side)?.0)
}

/// [`subtree_extremes`] plus the number of DSU operations performed.
pub fn subtree_extremes_counted(
    t: &DfsTree,
    l1: &[Vertex],
    queries: &[(Vertex, Vertex)],
    side: Side,
) -> Result<(Vec<Vertex>, u64), BatchError> {
    let n = t.n();
    for &(v, d) in queries {
        if !t.is_ancestor(v, d) {
            return Err(BatchError::NotDescendant { v, d });
        }
    }
    // Positions 0 and n + 1 are sentinels that are never killed.
    let mut dsu = Dsu::new(n + 2);
    let step = |x: Vertex| match side {
        Side::Left => x + 1,
        Side::Right => x - 1,
    };
    // Vertices by decreasing l1, absent l1 first.
    let key = |x: Vertex| if l1[x as usize] == NIL { u32::MAX } else { l1[x as usize] };
    let mut by_l1: Vec<Vertex> = (1..=n as Vertex).collect();
    by_l1.sort_unstable_by_key(|&x| std::cmp::Reverse(key(x)));
    let mut order: Vec<usize> = (0..queries.len()).collect();
    order.sort_unstable_by_key(|&i| std::cmp::Reverse(t.parent(queries[i].0)));
    let mut out = vec![NIL; queries.len()];
    let mut killed = 0;
    for i in order {
        let (v, d) = queries[i];
        let threshold = t.parent(v);
        while killed < by_l1.len() && key(by_l1[killed]) >= threshold {
            let x = by_l1[killed];
            dsu.unite(x, step(x));
            killed += 1;
        }
        let end = d + t.nd(d) - 1;
        let x = match side {
            Side::Left => dsu.rep(d),
            Side::Right => dsu.rep(end),
        };
        if x >= d && x <= end {
            out[i] = x;
        }
    }
    let ops = dsu.op_count();
    Ok((out, ops))
}

/// A query `(z, u, v)`: extreme descendants of `z` with a back-edge landing on
/// the tree path from `u` up to `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SegmentQuery {
    pub z: Vertex,
    pub u: Vertex,
    pub v: Vertex,
}

impl SegmentQuery {
    pub fn new(z: Vertex, u: Vertex, v: Vertex) -> Self {
        SegmentQuery { z, u, v }
    }

    /// Whether `y` lies on the path from `u` up to `v`.
    #[inline]
    pub fn covers(&self, t: &DfsTree, y: Vertex) -> bool {
        t.is_ancestor(y, self.u) && t.is_ancestor(self.v, y)
    }

    fn size(&self, t: &DfsTree) -> u32 {
        t.depth(self.u) - t.depth(self.v) + 1
    }
}

/// Sentinel for "no query".
pub const NO_QUERY: u32 = u32::MAX;

/// The forest over a nested batch of segment queries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryForest {
    /// Parent query of each query, or [`NO_QUERY`] for a root.
    pub parent: Vec<u32>,
    /// Smallest query whose segment contains each vertex, or [`NO_QUERY`].
    pub of_vertex: Vec<u32>,
}

impl QueryForest {
    pub fn is_root(&self, q: usize) -> bool {
        self.parent[q] == NO_QUERY
    }
}

/// Build the forest of a nested batch in linear time.
pub fn build_query_forest(t: &DfsTree, queries: &[SegmentQuery]) -> QueryForest {
    let n = t.n();
    let max = queries.iter().map(|q| q.size(t)).max().unwrap_or(0) as usize;
    let mut bucket_off = vec![0usize; max + 2];
    for q in queries {
        bucket_off[q.size(t) as usize + 1] += 1;
    }
    for i in 1..bucket_off.len() {
        bucket_off[i] += bucket_off[i - 1];
    }
    let mut sorted = vec![0usize; queries.len()];
    for (i, q) in queries.iter().enumerate() {
        let s = q.size(t) as usize;
        sorted[bucket_off[s]] = i;
        bucket_off[s] += 1;
    }
    let mut of_vertex = vec![NO_QUERY; n + 1];
    let mut latest = vec![NO_QUERY; n + 1];
    let mut parent = vec![NO_QUERY; queries.len()];
    for &qi in &sorted {
        let q = queries[qi];
        let stop = t.parent(q.v);
        let mut w = q.u;
        while w != stop {
            if of_vertex[w as usize] == NO_QUERY {
                of_vertex[w as usize] = qi as u32;
                latest[w as usize] = qi as u32;
                w = t.parent(w);
            } else {
                let prev = latest[w as usize] as usize;
                if t.is_ancestor(queries[prev].z, q.z) {
                    parent[prev] = qi as u32;
                }
                latest[w as usize] = qi as u32;
                w = t.parent(queries[prev].v);
            }
        }
    }
    QueryForest { parent, of_vertex }
}

/// Check the nesting condition by brute force. Quadratic; meant for tests and
/// debug builds on small trees.
pub fn validate_nested(t: &DfsTree, queries: &[SegmentQuery]) -> Result<(), BatchError> {
    let contains = |a: &SegmentQuery, b: &SegmentQuery| a.covers(t, b.u) && a.covers(t, b.v);
    let edges: Vec<(Vertex, Vertex)> = t.back_edges().collect();
    for (i, a) in queries.iter().enumerate() {
        for (j, b) in queries.iter().enumerate() {
            if i == j {
                continue;
            }
            let meet = a.covers(t, b.u) || a.covers(t, b.v) || b.covers(t, a.u) || b.covers(t, a.v);
            if meet && !contains(a, b) && !contains(b, a) {
                return Err(BatchError::NotNested { a: i, b: j });
            }
            // Equal segments are treated as nested in index order.
            let strictly_inside = contains(b, a) && (!contains(a, b) || i < j);
            if !strictly_inside || t.is_ancestor(a.z, b.z) {
                continue;
            }
            for k in queries.iter().filter(|k| contains(k, b)) {
                if edges.iter().any(|&(x, y)| t.is_ancestor(k.z, x) && a.covers(t, y)) {
                    return Err(BatchError::NotNested { a: i, b: j });
                }
            }
        }
    }
    Ok(())
}

/// Answer a nested batch. Returns `(L, R)` per query, [`NIL`] where no edge qualifies.
pub fn segment_points(t: &DfsTree, queries: &[SegmentQuery]) -> Result<Vec<(Vertex, Vertex)>, BatchError> {
    Ok(segment_points_counted(t, queries)?.0)
}

/// [`segment_points`] plus the number of DSU operations performed.
pub fn segment_points_counted(t: &DfsTree, queries: &[SegmentQuery]) -> Result<(Vec<(Vertex, Vertex)>, u64), BatchError> {
    for q in queries {
        if !t.is_ancestor(q.u, q.z) {
            return Err(BatchError::NotDescendant { v: q.u, d: q.z });
        }
        if !t.is_ancestor(q.v, q.u) {
            return Err(BatchError::NotDescendant { v: q.v, d: q.u });
        }
    }
    if cfg!(debug_assertions) && queries.len() <= 64 && t.n() <= 256 {
        validate_nested(t, queries)?;
    }
    let forest = build_query_forest(t, queries);
    let (left, ops_l) = answer(t, queries, &forest, Side::Left);
    let (right, ops_r) = answer(t, queries, &forest, Side::Right);
    Ok((left.into_iter().zip(right).collect(), ops_l + ops_r))
}

fn answer(t: &DfsTree, queries: &[SegmentQuery], forest: &QueryForest, side: Side) -> (Vec<Vertex>, u64) {
    let none = queries.len() as u32;
    let mut dsu = Dsu::new(queries.len() + 1);
    let mut out = vec![NIL; queries.len()];
    for x in edge_order(t, side) {
        for &y in t.ups(x) {
            let start = forest.of_vertex[y as usize];
            if start == NO_QUERY {
                continue;
            }
            let mut q = dsu.rep(start);
            while q != none && t.is_ancestor(queries[q as usize].z, x) {
                out[q as usize] = x;
                let p = match forest.parent[q as usize] {
                    NO_QUERY => none,
                    p => p,
                };
                let next = dsu.rep(p);
                dsu.unite(q, p);
                dsu.set_rep(q, next);
                q = next;
            }
        }
    }
    let ops = dsu.op_count();
    (out, ops)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Tree edges (1,2),(2,3),(3,4),(3,5); back-edges (4,1),(5,1),(5,2).
    fn graph_a() -> DfsTree {
        let children = vec![vec![1], vec![2], vec![3, 4], vec![], vec![]];
        DfsTree::from_rooted(0, &children, &[(3, 0), (4, 0), (4, 1)]).0
    }

    fn l1(t: &DfsTree) -> Vec<Vertex> {
        (0..=t.n() as Vertex).map(|v| if v == NIL { NIL } else { t.ups(v).first().copied().unwrap_or(NIL) }).collect()
    }

    #[test]
    fn subtree_extremes_on_graph_a() {
        let t = graph_a();
        let l = l1(&t);
        let q = [(3, 5), (3, 3), (5, 5), (2, 2)];
        assert_eq!(subtree_extremes(&t, &l, &q, Side::Left).unwrap(), vec![5, 4, 5, NIL]);
        assert_eq!(subtree_extremes(&t, &l, &q, Side::Right).unwrap(), vec![5, 5, 5, NIL]);
        assert_eq!(subtree_extremes(&t, &l, &[(4, 5)], Side::Left), Err(BatchError::NotDescendant { v: 4, d: 5 }));
    }

    #[test]
    fn skip_points_on_graph_a() {
        let t = graph_a();
        let mut z = vec![NIL; 6];
        z[5] = 1;
        z[4] = 1;
        let left = skip_points(&t, &z, Side::Left);
        assert_eq!(left[5], 5);
        assert_eq!(left[4], NIL);
        let none = vec![NIL; 6];
        assert_eq!(skip_points(&t, &none, Side::Left)[3], 4);
        assert_eq!(skip_points(&t, &none, Side::Right)[3], 5);
    }

    #[test]
    fn segment_points_on_graph_a() {
        let t = graph_a();
        let one = |q: SegmentQuery| segment_points(&t, &[q]).unwrap()[0];
        assert_eq!(one(SegmentQuery::new(3, 2, 1)), (4, 5));
        assert_eq!(one(SegmentQuery::new(5, 2, 2)), (5, 5));
        assert_eq!(one(SegmentQuery::new(4, 3, 3)), (NIL, NIL));
        let bad = [SegmentQuery::new(3, 2, 1), SegmentQuery::new(5, 2, 2)];
        assert!(matches!(segment_points(&t, &bad), Err(BatchError::NotNested { .. })));
    }

    #[test]
    fn query_forest_shapes() {
        // Path 1-2-3-4-5.
        let children = vec![vec![1], vec![2], vec![3], vec![4], vec![]];
        let t = DfsTree::from_rooted(0, &children, &[]).0;
        let disjoint = [SegmentQuery::new(5, 5, 4), SegmentQuery::new(5, 2, 1)];
        let f = build_query_forest(&t, &disjoint);
        assert!(f.is_root(0) && f.is_root(1));
        // Inner segment [3,3] inside [4,1]; inner z=3 is an ancestor of outer z=4.
        let nested = [SegmentQuery::new(3, 3, 3), SegmentQuery::new(4, 4, 1)];
        let f = build_query_forest(&t, &nested);
        assert_eq!(f.parent, vec![1, NO_QUERY]);
        assert_eq!(f.of_vertex[3], 0);
        assert_eq!(f.of_vertex[2], 1);
        let cut = [SegmentQuery::new(5, 3, 3), SegmentQuery::new(4, 4, 1)];
        let f = build_query_forest(&t, &cut);
        assert!(f.is_root(0) && f.is_root(1));
    }
}
