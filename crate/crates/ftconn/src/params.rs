//! Per-vertex DFS parameters over the back-edges that leap over a vertex's parent.
//!
//! For a vertex `v`, `B_p(v)` is the set of back-edges `(x, y)` with `x` in
//! `T(v)` and `y < p(v)`. All tables are indexed by vertex number in the tree
//! they were computed on and use [`NIL`] for absent values.

use crate::batch::{skip_points, Side};
use crate::dsu::Dsu;
use crate::graph::{DfsTree, Vertex, View, NIL};
use crate::tree::NcaIndex;

/// Scalar parameters of every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarParams {
    /// Lowest lower endpoint of back-edges stemming from the vertex itself.
    pub l1: Vec<Vertex>,
    /// Second-lowest such endpoint.
    pub l2: Vec<Vertex>,
    /// Lowest three distinct lower endpoints over `B_p`.
    pub low1: Vec<Vertex>,
    pub low2: Vec<Vertex>,
    pub low3: Vec<Vertex>,
    /// Highest two distinct lower endpoints over `B_p`.
    pub high1: Vec<Vertex>,
    pub high2: Vec<Vertex>,
    /// `|B_p|`.
    pub bp: Vec<u32>,
    /// Sum of lower endpoints over `B_p`.
    pub sum_y: Vec<u64>,
    /// Number of edges in `B_p` landing on `low1`.
    pub num_low: Vec<u32>,
    /// Number of edges in `B_p` landing on `high1`.
    pub num_high: Vec<u32>,
}

/// Keep the three smallest distinct values seen, ascending, NIL-padded.
#[inline]
fn push_low(best: &mut [Vertex; 3], y: Vertex) {
    let mut y = y;
    for slot in best.iter_mut() {
        if *slot == y {
            return;
        }
        if *slot == NIL || y < *slot {
            std::mem::swap(slot, &mut y);
            if y == NIL {
                return;
            }
        }
    }
}

impl ScalarParams {
    pub fn compute(t: &DfsTree) -> ScalarParams {
        let n = t.n();
        let mut l1 = vec![NIL; n + 1];
        let mut l2 = vec![NIL; n + 1];
        for v in 1..=n as Vertex {
            let ups = t.ups(v);
            l1[v as usize] = ups.first().copied().unwrap_or(NIL);
            l2[v as usize] = ups.get(1).copied().unwrap_or(NIL);
        }

        // Edges from T(c) that land on p(c), found through the current root path.
        let max_depth = (1..=n as Vertex).map(|v| t.depth(v)).max().unwrap_or(0) as usize;
        let mut path = vec![NIL; max_depth + 2];
        let mut land = vec![0u32; n + 1];
        for v in 1..=n as Vertex {
            path[t.depth(v) as usize] = v;
            for &y in t.ups(v) {
                land[path[t.depth(y) as usize + 1] as usize] += 1;
            }
        }

        // Edges from T(v) landing strictly above v, then drop those landing on p(v).
        let mut cnt = vec![0i64; n + 1];
        let mut sum = vec![0i64; n + 1];
        let mut bp = vec![0u32; n + 1];
        let mut sum_y = vec![0u64; n + 1];
        for v in (1..=n as Vertex).rev() {
            let vi = v as usize;
            cnt[vi] += t.ups(v).len() as i64 - t.downs(v).len() as i64;
            sum[vi] += t.ups(v).iter().map(|&y| y as i64).sum::<i64>() - t.downs(v).len() as i64 * v as i64;
            let p = t.parent(v);
            bp[vi] = (cnt[vi] - land[vi] as i64) as u32;
            sum_y[vi] = (sum[vi] - land[vi] as i64 * p as i64) as u64;
            if p != NIL {
                cnt[p as usize] += cnt[vi];
                sum[p as usize] += sum[vi];
            }
        }

        let mut low1 = vec![NIL; n + 1];
        let mut low2 = vec![NIL; n + 1];
        let mut low3 = vec![NIL; n + 1];
        let mut num_low = vec![0u32; n + 1];
        for v in (1..=n as Vertex).rev() {
            let p = t.parent(v);
            let mut best = [NIL; 3];
            for &y in t.ups(v).iter().take(3) {
                if y < p {
                    push_low(&mut best, y);
                }
            }
            for &c in t.children(v) {
                for y in [low1[c as usize], low2[c as usize], low3[c as usize]] {
                    if y != NIL && y < p {
                        push_low(&mut best, y);
                    }
                }
            }
            let vi = v as usize;
            [low1[vi], low2[vi], low3[vi]] = best;
            if best[0] != NIL {
                let own = u32::from(t.ups(v).first() == Some(&best[0]));
                let kids: u32 = t.children(v).iter().filter(|&&c| low1[c as usize] == best[0]).map(|&c| num_low[c as usize]).sum();
                num_low[vi] = own + kids;
            }
        }

        let (high1, high2) = high_linear(t);
        let num_high = num_high(t, &high1);
        ScalarParams { l1, l2, low1, low2, low3, high1, high2, bp, sum_y, num_low, num_high }
    }

    /// Translate into another numbering of the same tree.
    pub fn translated(&self, view: &View) -> ScalarParams {
        let verts = |a: &[Vertex]| view.import(a);
        let plain = |a: &[u32]| {
            let mut out = vec![0; a.len()];
            for (bv, &x) in a.iter().enumerate().skip(1) {
                out[view.v(bv as Vertex) as usize] = x;
            }
            out
        };
        let mut sum_y = vec![0; self.sum_y.len()];
        for (bv, &x) in self.sum_y.iter().enumerate().skip(1) {
            sum_y[view.v(bv as Vertex) as usize] = x;
        }
        ScalarParams {
            l1: verts(&self.l1),
            l2: verts(&self.l2),
            low1: verts(&self.low1),
            low2: verts(&self.low2),
            low3: verts(&self.low3),
            high1: verts(&self.high1),
            high2: verts(&self.high2),
            bp: plain(&self.bp),
            sum_y,
            num_low: plain(&self.num_low),
            num_high: plain(&self.num_high),
        }
    }

    /// Machine words held.
    pub fn words(&self) -> usize {
        11 * self.l1.len()
    }
}

/// Highest two distinct lower endpoints over `B_p`, in linear time with a DSU
/// that jumps over vertices whose two points are already known.
pub fn high_linear(t: &DfsTree) -> (Vec<Vertex>, Vec<Vertex>) {
    high_linear_counted(t).0
}

/// [`high_linear`] plus the number of DSU operations performed.
pub fn high_linear_counted(t: &DfsTree) -> ((Vec<Vertex>, Vec<Vertex>), u64) {
    let n = t.n();
    let mut high1 = vec![NIL; n + 1];
    let mut high2 = vec![NIL; n + 1];
    let mut dsu = Dsu::new(n + 1);
    for y in (1..=n as Vertex).rev() {
        for &x in t.downs(y) {
            let mut z = dsu.rep(x);
            while z > y && t.parent(z) != y {
                let zi = z as usize;
                if high1[zi] == NIL {
                    high1[zi] = y;
                    z = dsu.rep(t.parent(z));
                    continue;
                }
                if high1[zi] == y {
                    break;
                }
                high2[zi] = y;
                let p = t.parent(z);
                let next = dsu.rep(p);
                dsu.unite(z, p);
                dsu.set_rep(z, next);
                z = next;
            }
        }
    }
    let ops = dsu.op_count();
    ((high1, high2), ops)
}

/// Quadratic reference for [`high_linear`]: walk every edge up its tree path.
pub fn high_naive(t: &DfsTree) -> (Vec<Vertex>, Vec<Vertex>) {
    let n = t.n();
    let mut high1 = vec![NIL; n + 1];
    let mut high2 = vec![NIL; n + 1];
    for y in (1..=n as Vertex).rev() {
        for &x in t.downs(y) {
            let mut z = x;
            while t.parent(z) != y {
                let zi = z as usize;
                if high1[zi] == NIL {
                    high1[zi] = y;
                } else if high1[zi] != y && high2[zi] == NIL {
                    high2[zi] = y;
                }
                z = t.parent(z);
            }
        }
    }
    (high1, high2)
}

/// Number of edges in `B_p(v)` landing on `high1(v)`, via the forests of
/// vertices sharing a `high1` value.
///
/// For each `z`, the members of the group `high1 = z` and the higher
/// endpoints of edges into `z` are merged in increasing order. A stack of
/// open member intervals yields both the forest parent of each member and
/// the deepest member above each edge endpoint.
pub fn num_high(t: &DfsTree, high1: &[Vertex]) -> Vec<u32> {
    let n = t.n();
    let mut off = vec![0usize; n + 2];
    for v in 1..=n {
        if high1[v] != NIL {
            off[high1[v] as usize + 1] += 1;
        }
    }
    for i in 1..off.len() {
        off[i] += off[i - 1];
    }
    let mut fill = off.clone();
    let mut group = vec![NIL; off[n + 1]];
    for v in 1..=n {
        let h = high1[v] as usize;
        if h != 0 {
            group[fill[h]] = v as Vertex;
            fill[h] += 1;
        }
    }
    let mut hparent = vec![NIL; n + 1];
    let mut num = vec![0u32; n + 1];
    let mut stack: Vec<Vertex> = Vec::new();
    for z in 1..=n {
        let members = &group[off[z]..off[z + 1]];
        if members.is_empty() {
            continue;
        }
        stack.clear();
        let edges = t.downs(z as Vertex);
        let (mut i, mut j) = (0, 0);
        while i < members.len() || j < edges.len() {
            let take_member = j == edges.len() || (i < members.len() && members[i] <= edges[j]);
            let pos = if take_member { members[i] } else { edges[j] };
            while let Some(&top) = stack.last() {
                if t.is_ancestor(top, pos) {
                    break;
                }
                stack.pop();
            }
            let top = stack.last().copied().unwrap_or(NIL);
            if take_member {
                hparent[pos as usize] = top;
                stack.push(pos);
                i += 1;
            } else {
                if top != NIL {
                    num[top as usize] += 1;
                }
                j += 1;
            }
        }
        for &c in members.iter().rev() {
            let p = hparent[c as usize];
            if p != NIL {
                num[p as usize] += num[c as usize];
            }
        }
    }
    num
}

/// Leftmost and rightmost points of every vertex in one numbering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extremes {
    pub lp: Vec<Vertex>,
    pub rp: Vec<Vertex>,
}

impl Extremes {
    pub fn compute(t: &DfsTree) -> Extremes {
        let none = vec![NIL; t.n() + 1];
        Extremes { lp: skip_points(t, &none, Side::Left), rp: skip_points(t, &none, Side::Right) }
    }
}

/// Maximum points: the nearest common ancestor of `Lp` and `Rp`.
pub fn max_points(t: &DfsTree, nca: &NcaIndex, ext: &Extremes) -> Vec<Vertex> {
    (0..=t.n())
        .map(|v| match (ext.lp[v], ext.rp[v]) {
            (NIL, _) | (_, NIL) => NIL,
            (a, b) => nca.query(t, a, b),
        })
        .collect()
}

/// For each vertex, the greatest lower vertex with the same maximum point.
/// Vertices sharing a maximum point form an ancestor chain, so this is the
/// nearest proper ancestor in that chain.
pub fn next_mp(mp: &[Vertex]) -> Vec<Vertex> {
    let n = mp.len() - 1;
    let mut last = vec![NIL; n + 1];
    let mut next = vec![NIL; n + 1];
    for v in 1..=n {
        let z = mp[v] as usize;
        if z != 0 {
            next[v] = last[z];
            last[z] = v as Vertex;
        }
    }
    next
}
