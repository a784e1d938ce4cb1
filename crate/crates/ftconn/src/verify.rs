//! Ground-truth oracles, graph generators and the differential driver.

use std::collections::{HashMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::graph::{DfsTree, Graph, Vertex, VertexKind, View, NIL};
use crate::oracle::{Case, ComponentRef, Mutation, Oracle};
use crate::params::{max_points, next_mp, Extremes, ScalarParams};
use crate::tables::{SegmentFamily, Variant, HD, LI};
use crate::tree::NcaIndex;

/// Component label of every vertex of `g - failed` (0 for failed vertices).
pub fn brute_components(g: &Graph, failed: &[Vertex]) -> (Vec<u32>, u32) {
    let n = g.n();
    let mut label = vec![0u32; n + 1];
    let mut dead = vec![false; n + 1];
    for &f in failed {
        dead[f as usize] = true;
    }
    let mut count = 0;
    let mut queue = VecDeque::new();
    for s in 1..=n {
        if dead[s] || label[s] != 0 {
            continue;
        }
        count += 1;
        label[s] = count;
        queue.push_back(s as Vertex);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if !dead[w as usize] && label[w as usize] == 0 {
                    label[w as usize] = count;
                    queue.push_back(w);
                }
            }
        }
    }
    (label, count)
}

/// Whether `x` and `y` are connected in `g - failed`, by BFS.
pub fn brute_connected(g: &Graph, failed: &[Vertex], x: Vertex, y: Vertex) -> bool {
    let (label, _) = brute_components(g, failed);
    label[x as usize] != 0 && label[x as usize] == label[y as usize]
}

/// Number of connected components of `g - failed`, by BFS.
pub fn brute_count(g: &Graph, failed: &[Vertex]) -> u32 {
    brute_components(g, failed).1
}

/// DFS tree of an untransformed graph, started at vertex 1 with neighbors in input order.
/// Returns the tree and the DFS number of each original vertex.
pub fn raw_dfs(g: &Graph) -> (DfsTree, Vec<Vertex>) {
    let adj: Vec<Vec<usize>> = (1..=g.n()).map(|v| g.neighbors(v as Vertex).iter().map(|&w| w as usize - 1).collect()).collect();
    let (t, num) = DfsTree::search(&adj, 0);
    let mut out = vec![NIL; g.n() + 1];
    for (label, &v) in num.iter().enumerate() {
        out[label + 1] = v;
    }
    (t, out)
}

/// Back-edges of `B_p(v)`: `(x, y)` with `x` in `T(v)` and `y < p(v)`.
pub fn leaping(t: &DfsTree, v: Vertex) -> Vec<(Vertex, Vertex)> {
    let p = t.parent(v);
    (v..v + t.nd(v)).flat_map(|x| t.ups(x).iter().filter(move |&&y| y < p).map(move |&y| (x, y))).collect()
}

/// Parameters recomputed from their definitions by materializing `B_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteParams {
    pub l1: Vec<Vertex>,
    pub l2: Vec<Vertex>,
    pub low: Vec<[Vertex; 3]>,
    pub high: Vec<[Vertex; 2]>,
    pub bp: Vec<u32>,
    pub sum_y: Vec<u64>,
    pub num_low: Vec<u32>,
    pub num_high: Vec<u32>,
    pub lp: Vec<Vertex>,
    pub rp: Vec<Vertex>,
    pub mp: Vec<Vertex>,
    pub next_mp: Vec<Vertex>,
}

/// Naive nearest common ancestor by walking up.
pub fn naive_nca(t: &DfsTree, mut a: Vertex, mut b: Vertex) -> Vertex {
    while a != b {
        if t.depth(a) >= t.depth(b) {
            a = t.parent(a);
        } else {
            b = t.parent(b);
        }
    }
    a
}

/// Recompute every scalar parameter and extreme point by definition.
pub fn brute_params(t: &DfsTree) -> BruteParams {
    let n = t.n();
    let mut out = BruteParams {
        l1: vec![NIL; n + 1],
        l2: vec![NIL; n + 1],
        low: vec![[NIL; 3]; n + 1],
        high: vec![[NIL; 2]; n + 1],
        bp: vec![0; n + 1],
        sum_y: vec![0; n + 1],
        num_low: vec![0; n + 1],
        num_high: vec![0; n + 1],
        lp: vec![NIL; n + 1],
        rp: vec![NIL; n + 1],
        mp: vec![NIL; n + 1],
        next_mp: vec![NIL; n + 1],
    };
    for v in 1..=n as Vertex {
        let vi = v as usize;
        let mut own: Vec<Vertex> = t.ups(v).to_vec();
        own.sort_unstable();
        out.l1[vi] = own.first().copied().unwrap_or(NIL);
        out.l2[vi] = own.get(1).copied().unwrap_or(NIL);
        let b = leaping(t, v);
        if b.is_empty() {
            continue;
        }
        let mut ys: Vec<Vertex> = b.iter().map(|e| e.1).collect();
        ys.sort_unstable();
        ys.dedup();
        for i in 0..3 {
            out.low[vi][i] = ys.get(i).copied().unwrap_or(NIL);
        }
        for i in 0..2 {
            out.high[vi][i] = if i < ys.len() { ys[ys.len() - 1 - i] } else { NIL };
        }
        out.bp[vi] = b.len() as u32;
        out.sum_y[vi] = b.iter().map(|e| e.1 as u64).sum();
        out.num_low[vi] = b.iter().filter(|e| e.1 == ys[0]).count() as u32;
        out.num_high[vi] = b.iter().filter(|e| e.1 == *ys.last().unwrap()).count() as u32;
        out.lp[vi] = b.iter().map(|e| e.0).min().unwrap();
        out.rp[vi] = b.iter().map(|e| e.0).max().unwrap();
        out.mp[vi] = b.iter().map(|e| e.0).reduce(|a, x| naive_nca(t, a, x)).unwrap();
    }
    for v in 1..=n {
        if out.mp[v] != NIL {
            out.next_mp[v] = (1..v).rev().find(|&u| out.mp[u] == out.mp[v]).map_or(NIL, |u| u as Vertex);
        }
    }
    out
}

/// Brute-force `L(z, u, v)` and `R(z, u, v)`.
pub fn brute_segment(t: &DfsTree, z: Vertex, u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    let on = |y: Vertex| t.is_ancestor(y, u) && t.is_ancestor(v, y);
    let xs: Vec<Vertex> = (z..z + t.nd(z)).filter(|&x| t.ups(x).iter().any(|&y| on(y))).collect();
    (xs.first().copied().unwrap_or(NIL), xs.last().copied().unwrap_or(NIL))
}

/// Brute-force skipping points of `v`: extreme `x` in `T(v)` with an edge `(x, y)`,
/// `y < p(v)`, `y != z`.
pub fn brute_skip(t: &DfsTree, v: Vertex, z: Vertex) -> (Vertex, Vertex) {
    let xs: Vec<Vertex> = leaping(t, v).into_iter().filter(|e| e.1 != z).map(|e| e.0).collect();
    (xs.iter().copied().min().unwrap_or(NIL), xs.iter().copied().max().unwrap_or(NIL))
}

/// Brute-force subtree extremes: extreme `x` in `T(d)` providing an edge of `B_p(v)`.
pub fn brute_subtree_extreme(t: &DfsTree, v: Vertex, d: Vertex) -> (Vertex, Vertex) {
    let xs: Vec<Vertex> = leaping(t, v).into_iter().map(|e| e.0).filter(|&x| t.is_ancestor(d, x)).collect();
    (xs.iter().copied().min().unwrap_or(NIL), xs.iter().copied().max().unwrap_or(NIL))
}

/// Extreme vertices of `xs` in the order of `view`, as base numbers.
fn view_extremes(view: &View, xs: impl IntoIterator<Item = Vertex>) -> (Vertex, Vertex) {
    let mut lo = NIL;
    let mut hi = NIL;
    for x in xs {
        if lo == NIL || view.v(x) < view.v(lo) {
            lo = x;
        }
        if hi == NIL || view.v(x) > view.v(hi) {
            hi = x;
        }
    }
    (lo, hi)
}

/// Sources `x` in `T(z)` of back-edges landing on the path from `u` up to `v`.
fn segment_sources(t: &DfsTree, z: Vertex, u: Vertex, v: Vertex) -> Vec<Vertex> {
    (z..z + t.nd(z)).filter(|&x| t.ups(x).iter().any(|&y| t.is_ancestor(y, u) && t.is_ancestor(v, y))).collect()
}

/// Sources in `T(d)` of edges in `B_p(v)`.
fn subtree_sources(t: &DfsTree, v: Vertex, d: Vertex) -> Vec<Vertex> {
    leaping(t, v).into_iter().map(|e| e.0).filter(|&x| t.is_ancestor(d, x)).collect()
}

#[derive(Default)]
struct Tally {
    checked: u64,
    errors: Vec<String>,
}

impl Tally {
    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, what: &str, v: Vertex, got: T, want: T) {
        self.checked += 1;
        if got != want && self.errors.len() < 10 {
            self.errors.push(format!("{what}[{v}]: got {got:?}, want {want:?}"));
        }
    }
}

struct TableAudit<'a> {
    views: [&'a View; 2],
    b: BruteParams,
}

impl TableAudit<'_> {
    fn low1(&self, x: Vertex) -> Vertex {
        self.b.low[x as usize][0]
    }

    fn high1(&self, x: Vertex) -> Vertex {
        self.b.high[x as usize][0]
    }

    /// Children of `w` in the order of `view`.
    fn children(&self, view: usize, w: Vertex) -> Vec<Vertex> {
        let v = self.views[view];
        v.tree.children(v.v(w)).iter().map(|&c| v.b(c)).collect()
    }
}

/// Smallest, second-smallest distinct and smallest `low2` over `kids`.
fn brute_low_triple(a: &TableAudit, kids: &[Vertex]) -> [Vertex; 3] {
    let mut lows: Vec<Vertex> = kids.iter().map(|&e| a.low1(e)).filter(|&y| y != NIL).collect();
    lows.sort_unstable();
    lows.dedup();
    let low2 = kids.iter().map(|&e| a.b.low[e as usize][1]).filter(|&y| y != NIL).min().unwrap_or(NIL);
    [lows.first().copied().unwrap_or(NIL), lows.get(1).copied().unwrap_or(NIL), low2]
}

/// Largest, second-largest distinct `high1` and largest `high2` over `kids`.
fn brute_high_triple(a: &TableAudit, kids: &[Vertex]) -> [Vertex; 3] {
    let mut highs: Vec<Vertex> = kids.iter().map(|&e| a.high1(e)).filter(|&y| y != NIL).collect();
    highs.sort_unstable_by(|x, y| y.cmp(x));
    highs.dedup();
    let high2 = kids.iter().map(|&e| a.b.high[e as usize][1]).max().unwrap_or(NIL);
    [highs.first().copied().unwrap_or(NIL), highs.get(1).copied().unwrap_or(NIL), high2]
}

/// Recompute the scalar parameters, extreme points and maximum points of
/// `t` from their definitions and compare. Returns the number of entries checked.
pub fn audit_params(t: &DfsTree) -> Result<u64, Vec<String>> {
    let p = ScalarParams::compute(t);
    let ext = Extremes::compute(t);
    let mp = max_points(t, &NcaIndex::new(t), &ext);
    let next = next_mp(&mp);
    let b = brute_params(t);
    let mut tally = Tally::default();
    for v in 1..=t.n() {
        let x = v as Vertex;
        tally.eq("l", x, (p.l1[v], p.l2[v]), (b.l1[v], b.l2[v]));
        tally.eq("low", x, [p.low1[v], p.low2[v], p.low3[v]], b.low[v]);
        tally.eq("high", x, [p.high1[v], p.high2[v]], b.high[v]);
        tally.eq("bp", x, (p.bp[v], p.sum_y[v]), (b.bp[v], b.sum_y[v]));
        tally.eq("num", x, (p.num_low[v], p.num_high[v]), (b.num_low[v], b.num_high[v]));
        tally.eq("extremes", x, (ext.lp[v], ext.rp[v]), (b.lp[v], b.rp[v]));
        tally.eq("mp", x, (mp[v], next[v]), (b.mp[v], b.next_mp[v]));
    }
    if tally.errors.is_empty() {
        Ok(tally.checked)
    } else {
        Err(tally.errors)
    }
}

/// Recompute every case-table entry from its definition and compare.
/// Returns the number of entries checked.
pub fn audit_tables(o: &Oracle) -> Result<u64, Vec<String>> {
    let t = o.tree();
    let views = [&o.views().low_inc, &o.views().high_dec];
    let a = TableAudit { views, b: brute_params(t) };
    let mut tally = Tally::default();
    let tb = o.tables();
    let n = t.n() as Vertex;
    for v in 1..=n {
        let b = leaping(t, v);
        tally.eq("mp", v, o.max_point(v), a.b.mp[v as usize]);
        for i in [LI, HD] {
            let want = view_extremes(views[i], b.iter().map(|e| e.0));
            tally.eq("ext", v, tb.ext[i].get(v), want);
        }
        for var in [Variant::Lp, Variant::Rp] {
            let x = if var == Variant::Lp { tb.ext[HD].left[v as usize] } else { tb.ext[HD].right[v as usize] };
            let z = if x == NIL { NIL } else { a.b.l1[x as usize] };
            let want = view_extremes(views[HD], b.iter().filter(|e| e.1 != z).map(|e| e.0));
            tally.eq("skip", v, tb.skip[var as usize].get(v), want);
        }
    }
    for w in 1..=n {
        let kids = a.children(LI, w);
        let mut first = [NIL; 3];
        for (s, &c) in first.iter_mut().zip(&kids) {
            *s = c;
        }
        tally.eq("first3", w, tb.first3[w as usize], first);
        let key = |c: Vertex| if a.low1(c) == NIL { Vertex::MAX } else { a.low1(c) };
        let sorted = kids.windows(2).all(|p| key(p[0]) <= key(p[1]));
        tally.eq("low-order", w, sorted, true);
        let min = kids.iter().map(|&c| key(c)).min();
        let lowest: Vec<Vertex> = kids.iter().copied().filter(|&c| Some(key(c)) == min && key(c) != Vertex::MAX).collect();
        let want = if lowest.len() == 1 { lowest[0] } else { NIL };
        tally.eq("lowest-child", w, tb.lowest_child[w as usize], want);
        let hkey = |c: Vertex| if a.high1(c) == NIL { 0 } else { a.high1(c) as u64 + 1 };
        let hk = a.children(HD, w);
        let sorted = hk.windows(2).all(|p| hkey(p[0]) >= hkey(p[1]));
        tally.eq("high-order", w, sorted, true);
        // Sorted children: tree-split ones by the low triple, then back-split ones.
        let all = tb.sorted.all(w);
        let splits = tb.sorted.splits(w);
        let mut want: Vec<Vertex> = t.children(w).to_vec();
        let is_back = |c: Vertex| matches!(o.kind(c), VertexKind::AuxBackSplit { .. });
        let lkey = |c: Vertex| a.b.low[c as usize].map(|y| if y == NIL { Vertex::MAX } else { y });
        want.sort_by_key(|&c| (is_back(c), lkey(c), c));
        let mut got = all.to_vec();
        got.sort_by_key(|&c| (is_back(c), lkey(c), c));
        tally.eq("sorted-set", w, got, want.clone());
        let ordered = all.windows(2).all(|p| (is_back(p[0]), lkey(p[0])) <= (is_back(p[1]), lkey(p[1])));
        tally.eq("sorted-order", w, ordered, true);
        tally.eq("sorted-splits", w, splits.len(), want.iter().filter(|&&c| !is_back(c)).count());
    }
    for c in 1..=n {
        let ci = c as usize;
        let w = a.b.mp[ci];
        let pc = t.parent(c);
        let lt = |y: Vertex, x: Vertex| y != NIL && y < x;
        // First two low-increasing children of Mp(c) below p(c).
        let (mut pair, mut points) = ([NIL; 2], [(NIL, NIL); 2]);
        if w != NIL {
            let kids: Vec<Vertex> = a.children(LI, w).into_iter().filter(|&e| lt(a.low1(e), pc)).collect();
            if kids.len() >= 2 {
                pair = [kids[0], kids[1]];
                for i in 0..2 {
                    points[i] = view_extremes(views[HD], subtree_sources(t, c, kids[i]));
                }
            }
        }
        tally.eq("pair", c, [tb.pair[0][ci], tb.pair[1][ci]], pair);
        tally.eq("pair-points", c, [tb.pair_points[0].get(c), tb.pair_points[1].get(c)], points);
        // Anchored families.
        let pp = t.parent(pc);
        let family = |anchor: Vertex, extra: &dyn Fn(Vertex) -> bool| -> Option<(Vertex, Vertex)> {
            if anchor == NIL || pp == NIL || !(anchor < pp) {
                return None;
            }
            let cd = t.child_toward(anchor, c);
            if !t.is_ancestor(c, a.b.mp[cd as usize]) || !extra(cd) {
                return None;
            }
            Some((pp, cd))
        };
        let check_family = |tally: &mut Tally, what: &str, fam: &SegmentFamily, want: Option<(Vertex, Vertex)>, anchor: Vertex| match want {
            None => tally.eq(what, c, fam.anchor[ci], NIL),
            Some((u, top)) => {
                tally.eq(what, c, fam.anchor[ci], anchor);
                for i in [LI, HD] {
                    let xs = segment_sources(t, c, u, top);
                    tally.eq(what, c, fam.points[i].get(c), view_extremes(views[i], xs));
                }
            }
        };
        for def in [LI, HD] {
            for var in [Variant::Lp, Variant::Rp] {
                let x = if var == Variant::Lp { tb.ext[def].left[ci] } else { tb.ext[def].right[ci] };
                let anchor = if x == NIL { NIL } else { a.b.l1[x as usize] };
                let want = family(anchor, &|_| true);
                check_family(&mut tally, "anchored", &tb.anchored[def][var as usize], want, anchor);
            }
        }
        let (anchor, want) = if w == NIL {
            (NIL, None)
        } else {
            let kids = a.children(LI, w);
            let c1 = kids.first().copied().unwrap_or(NIL);
            let c2 = kids.get(1).copied().unwrap_or(NIL);
            if c2 != NIL && a.low1(c1) != NIL && a.low1(c2) != a.low1(c1) {
                let anchor = a.low1(c2);
                (anchor, family(anchor, &|cd| t.is_ancestor(c1, a.b.mp[cd as usize])))
            } else {
                (NIL, None)
            }
        };
        check_family(&mut tally, "second-child", &tb.second_child, want, anchor);
        if w == NIL || w == c {
            continue;
        }
        // Children of Mp(c) whose high1 lies in T(c): the high prefix.
        let kids = t.children(w).to_vec();
        let prefix: Vec<Vertex> = kids.iter().copied().filter(|&e| t.is_ancestor(c, a.high1(e))).collect();
        tally.eq("low-prefix", c, tb.low_prefix.get(c), brute_low_triple(&a, &prefix));
        let c1 = tb.lowest_child[w as usize];
        let excl: Vec<Vertex> = prefix.iter().copied().filter(|&e| e != c1).collect();
        tally.eq("low-prefix-excl", c, tb.low_prefix_excl.get(c), brute_low_triple(&a, &excl));
        let (b1, b2) = (tb.low_best[0][ci], tb.low_best[1][ci]);
        let mut lows: Vec<Vertex> = prefix.iter().map(|&e| a.low1(e)).filter(|&y| y != NIL).collect();
        lows.sort_unstable();
        let got = [b1, b2].map(|e| if e == NIL { NIL } else { a.low1(e) });
        let want = [lows.first().copied().unwrap_or(NIL), lows.get(1).copied().unwrap_or(NIL)];
        tally.eq("low-best", c, got, want);
        tally.eq("low-best-distinct", c, b1 == NIL || b1 != b2, true);
        tally.eq("low-best-prefix", c, [b1, b2].iter().all(|&e| e == NIL || prefix.contains(&e)), true);
        let below: Vec<Vertex> = kids.iter().copied().filter(|&e| lt(a.low1(e), pc)).collect();
        tally.eq("high-mp", c, tb.high_mp.get(c), brute_high_triple(&a, &below));
        // Unique child of Mp(c) with high1 in T(c) and low1 below p(c).
        let single: Vec<Vertex> = prefix.iter().copied().filter(|&e| lt(a.low1(e), pc)).collect();
        let dh = if single.len() == 1 { single[0] } else { NIL };
        tally.eq("single", c, tb.single.child[ci], dh);
        if dh != NIL {
            for i in [LI, HD] {
                let seg = segment_sources(t, dh, t.parent(w), c);
                tally.eq("single-segment", c, tb.single.segment[i].get(c), view_extremes(views[i], seg));
                let sub = subtree_sources(t, c, dh);
                tally.eq("single-subtree", c, tb.single.subtree[i].get(c), view_extremes(views[i], sub));
            }
            let (l, r) = view_extremes(views[HD], subtree_sources(t, c, dh));
            let meet = naive_nca(t, l, r);
            tally.eq("single-meet", c, tb.single.meet[ci], meet);
            let kids: Vec<Vertex> = t.children(meet).iter().copied().filter(|&e| lt(a.low1(e), pc)).collect();
            tally.eq("high-meet", c, tb.high_meet.get(c), brute_high_triple(&a, &kids));
        }
        // Sums over the children of Mp(c), keyed by c as the lower vertex.
        let d = c;
        let pd = pc;
        let sums = |e_set: &[Vertex]| {
            let low: Vec<Vertex> =
                e_set.iter().copied().filter(|&e| a.high1(e) == NIL || a.high1(e) < d && !t.is_ancestor(d, a.high1(e))).collect();
            let bp: u64 = low.iter().map(|&e| a.b.bp[e as usize] as u64).sum();
            let sy: u64 = low.iter().map(|&e| a.b.sum_y[e as usize]).sum();
            let at: u64 = e_set.iter().filter(|&&e| a.high1(e) == pd).map(|&e| a.b.num_high[e as usize] as u64).sum();
            (bp, sy, at)
        };
        let (bp, sy, at) = sums(&kids);
        let span: u64 = kids
            .iter()
            .filter(|&&e| e != c1 && t.is_ancestor(d, a.high1(e)) && lt(a.low1(e), pd))
            .map(|&e| a.b.num_low[e as usize] as u64)
            .sum();
        let s = &tb.sums_mp;
        tally.eq("sums-mp", d, (s.bp_low[ci], s.sum_low[ci], s.at_parent[ci], s.spanning[ci]), (bp, sy, at, span));
    }
    // Second low-increasing child and its sums.
    for d in 1..=n {
        let di = d as usize;
        let w = a.b.mp[di];
        let pd = t.parent(d);
        let c2 = if w == NIL { NIL } else { a.children(LI, w).get(1).copied().unwrap_or(NIL) };
        let want = if c2 != NIL && a.low1(c2) != NIL && a.low1(c2) < pd { c2 } else { NIL };
        tally.eq("second", d, tb.second[di], want);
        if want == NIL {
            continue;
        }
        let pts = view_extremes(views[HD], subtree_sources(t, d, c2));
        tally.eq("second-points", d, tb.second_points.get(d), pts);
        let meet = naive_nca(t, pts.0, pts.1);
        let kids = t.children(meet);
        let low: Vec<Vertex> = kids.iter().copied().filter(|&e| a.high1(e) == NIL || a.high1(e) <= pd).collect();
        let bp: u64 = low.iter().map(|&e| a.b.bp[e as usize] as u64).sum();
        let sy: u64 = low.iter().map(|&e| a.b.sum_y[e as usize]).sum();
        let at: u64 = kids.iter().filter(|&&e| a.high1(e) == pd).map(|&e| a.b.num_high[e as usize] as u64).sum();
        let s = &tb.sums_second;
        tally.eq("sums-second", d, (s.bp_low[di], s.sum_low[di], s.at_parent[di]), (bp, sy, at));
    }
    // Chain answers for every valid pair.
    for d in 1..=n {
        let w = a.b.mp[d as usize];
        if w == NIL {
            continue;
        }
        let pd = t.parent(d);
        let mut c = a.b.next_mp[d as usize];
        while c != NIL {
            if c < pd {
                let xs = segment_sources(t, d, t.parent(pd), c);
                for i in [LI, HD] {
                    let got = tb.chain[i].query(views[i], c, d, false);
                    tally.eq("chain", d, got, view_extremes(views[i], xs.iter().copied()));
                }
            }
            c = a.b.next_mp[c as usize];
        }
    }
    if tally.errors.is_empty() {
        Ok(tally.checked)
    } else {
        Err(tally.errors)
    }
}

/// Graph families produced by the generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Uniform random connected graph: a random tree plus random extra edges.
    Random,
    /// A cycle with a few chords.
    CycleChords,
    /// A random tree plus a random matching.
    TreeMatching,
    /// A complete graph.
    Clique,
    /// Long paths sharing endpoints, joined by sparse rungs.
    Theta,
    /// Triangles or paths sharing a common spine edge.
    Book,
    /// Nested cycles along a long path, for deep failure triples.
    NestedCuts,
    /// A path that the DFS follows, with pendant vertices carrying back-edges
    /// to random path ancestors.
    Spine,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Random,
        Family::CycleChords,
        Family::TreeMatching,
        Family::Clique,
        Family::Theta,
        Family::Book,
        Family::NestedCuts,
        Family::Spine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Random => "random",
            Family::CycleChords => "cycle-chords",
            Family::TreeMatching => "tree-matching",
            Family::Clique => "clique",
            Family::Theta => "theta",
            Family::Book => "book",
            Family::NestedCuts => "nested-cuts",
            Family::Spine => "spine",
        }
    }

    pub fn parse(name: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == name)
    }
}

fn finish(n: usize, mut edges: Vec<(Vertex, Vertex)>, rng: &mut ChaCha8Rng) -> Graph {
    // Shuffle edge order and relabel so DFS trees vary with the seed.
    let mut perm: Vec<Vertex> = (1..=n as Vertex).collect();
    perm.shuffle(rng);
    for e in edges.iter_mut() {
        *e = (perm[e.0 as usize - 1], perm[e.1 as usize - 1]);
        if rng.gen_bool(0.5) {
            *e = (e.1, e.0);
        }
    }
    edges.shuffle(rng);
    Graph::new(n, edges).expect("generators produce connected graphs")
}

fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> Vec<(Vertex, Vertex)> {
    (2..=n as Vertex).map(|v| (rng.gen_range(1..v), v)).collect()
}

/// Path edges come first so the DFS from vertex 1 walks the whole spine
/// before visiting pendants; labels are not shuffled.
fn spine(n: usize, rng: &mut ChaCha8Rng) -> Graph {
    let k = (n / 2).max(2) as Vertex;
    let nv = n.max(k as usize + 1) as Vertex;
    let mut e: Vec<_> = (1..k).map(|i| (i, i + 1)).collect();
    let mut pendants = Vec::new();
    // Pendants cluster on a few hubs so that sibling subtrees are common.
    let hubs: Vec<Vertex> = (0..3).map(|_| rng.gen_range(2..=k)).collect();
    for p in k + 1..=nv {
        let at = if !pendants.is_empty() && rng.gen_bool(0.2) {
            *pendants.choose(rng).unwrap()
        } else if rng.gen_bool(0.75) {
            *hubs.choose(rng).unwrap()
        } else {
            rng.gen_range(2..=k)
        };
        e.push((at, p));
        let top = if at <= k { at } else { k };
        for _ in 0..rng.gen_range(1..=2) {
            let y = rng.gen_range(1..top.max(2));
            if y != at {
                e.push((p, y));
            }
        }
        pendants.push(p);
    }
    for _ in 0..rng.gen_range(0..=k as usize / 2) {
        let a = rng.gen_range(1..=k);
        let b = rng.gen_range(1..=k);
        if a.abs_diff(b) > 1 {
            e.push((a.max(b), a.min(b)));
        }
    }
    Graph::new(nv as usize, e).expect("spine graphs are connected")
}

/// A graph from the families with deep nested cut structure, sized for
/// exhaustive checking.
pub fn gen_adversarial(seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(8..=16);
    let family = [Family::Spine, Family::Spine, Family::NestedCuts, Family::Theta, Family::Book, Family::CycleChords][rng.gen_range(0..6)];
    generate(family, n, rng.gen())
}

/// Generate one graph of the given family with about `n` vertices.
pub fn generate(family: Family, n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (family as u64) << 56);
    let n = n.max(2);
    let nv = n as Vertex;
    let edges = match family {
        Family::Random => {
            let mut e = random_tree(n, &mut rng);
            let extra = rng.gen_range(0..=2 * n);
            for _ in 0..extra {
                e.push((rng.gen_range(1..=nv), rng.gen_range(1..=nv)));
            }
            e
        }
        Family::CycleChords => {
            let mut e: Vec<_> = (1..=nv).map(|i| (i, i % nv + 1)).collect();
            let k = rng.gen_range(0..=3.max(n / 5));
            for _ in 0..k {
                e.push((rng.gen_range(1..=nv), rng.gen_range(1..=nv)));
            }
            e
        }
        Family::TreeMatching => {
            let mut e = random_tree(n, &mut rng);
            let mut vs: Vec<Vertex> = (1..=nv).collect();
            vs.shuffle(&mut rng);
            let pairs = rng.gen_range(0..=n / 2);
            for i in 0..pairs {
                e.push((vs[2 * i], vs[2 * i + 1]));
            }
            e
        }
        Family::Clique => {
            let k = n.min(12) as Vertex;
            let mut e = Vec::new();
            for a in 1..=k {
                for b in a + 1..=k {
                    e.push((a, b));
                }
            }
            for v in k + 1..=nv {
                e.push((rng.gen_range(1..v), v));
            }
            e
        }
        Family::Theta => {
            // Several internally disjoint paths between vertices 1 and 2.
            let paths = rng.gen_range(2..=4);
            let mut e = Vec::new();
            let mut next = 3;
            let mut rungs = Vec::new();
            for i in 0..paths {
                let remaining = nv.saturating_sub(next - 1);
                let len = if i + 1 == paths { remaining } else { remaining / (paths - i) as u32 };
                let mut prev = 1;
                let mut inner = Vec::new();
                for _ in 0..len {
                    e.push((prev, next));
                    inner.push(next);
                    prev = next;
                    next += 1;
                }
                e.push((prev, 2));
                rungs.push(inner);
            }
            let k = rng.gen_range(0..=3);
            for _ in 0..k {
                let a = rungs.choose(&mut rng).unwrap();
                let b = rungs.choose(&mut rng).unwrap();
                if let (Some(&x), Some(&y)) = (a.choose(&mut rng), b.choose(&mut rng)) {
                    e.push((x, y));
                }
            }
            let n_used = next - 1;
            return finish(n_used.max(2) as usize, e, &mut rng);
        }
        Family::Book => {
            // Pages are paths of random length between the spine vertices 1 and 2.
            let mut e = vec![(1, 2)];
            let mut next = 3;
            while next <= nv {
                let len = rng.gen_range(1..=3).min(nv - next + 1);
                let mut prev = 1;
                for _ in 0..len {
                    e.push((prev, next));
                    prev = next;
                    next += 1;
                }
                e.push((prev, 2));
            }
            e
        }
        Family::NestedCuts => {
            // A long path with back-edges forming nested and crossing cycles.
            let mut e: Vec<_> = (1..nv).map(|i| (i, i + 1)).collect();
            let k = rng.gen_range(1..=4.max(n / 4));
            for _ in 0..k {
                let a = rng.gen_range(1..=nv);
                let span = rng.gen_range(2..=6.max(n as u32 / 3));
                let b = (a + span).min(nv);
                e.push((a, b));
            }
            // Occasional pendant branches hanging off the path.
            let extra = rng.gen_range(0..=n / 6);
            let mut all = e;
            let mut m = nv;
            for _ in 0..extra {
                m += 1;
                let at = rng.gen_range(1..m);
                all.push((at, m));
                if rng.gen_bool(0.6) {
                    all.push((m, rng.gen_range(1..m)));
                }
            }
            return finish(m as usize, all, &mut rng);
        }
        Family::Spine => return spine(n, &mut rng),
    };
    finish(n, edges, &mut rng)
}

/// A random connected graph with exactly `n` vertices and `m` distinct edges:
/// a random tree plus uniformly random extra edges.
pub fn random_sparse(n: usize, m: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nv = n.max(2) as Vertex;
    let max_m = (nv as usize) * (nv as usize - 1) / 2;
    let m = m.clamp(nv as usize - 1, max_m);
    let mut edges = random_tree(nv as usize, &mut rng);
    let mut seen: HashSet<(Vertex, Vertex)> = edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    while edges.len() < m {
        let (a, b) = (rng.gen_range(1..=nv), rng.gen_range(1..=nv));
        if a != b && seen.insert((a.min(b), a.max(b))) {
            edges.push((a, b));
        }
    }
    finish(nv as usize, edges, &mut rng)
}

/// One disagreement between the oracle and breadth-first search.
#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    /// The graph in edge-list text form.
    pub graph: String,
    pub failed: Vec<Vertex>,
    /// `None` for a component count mismatch.
    pub pair: Option<(Vertex, Vertex)>,
    pub expected: u32,
    pub got: u32,
    /// Case labels visited by the oracle.
    pub cases: Vec<Case>,
}

/// Compare every answer for one failure set. Returns the visited case mask.
pub fn check_failure_set(o: &Oracle, g: &Graph, failed: &[Vertex]) -> Result<u64, Box<Mismatch>> {
    let ctx = o.resolve(failed).expect("valid failure set");
    let (label, count) = brute_components(g, failed);
    let mismatch = |pair, expected, got| {
        Box::new(Mismatch { graph: g.to_text(), failed: failed.to_vec(), pair, expected, got, cases: Case::decode(ctx.cases()) })
    };
    let got = ctx.count();
    if got != count {
        return Err(mismatch(None, count, got));
    }
    // Two partitions agree iff the label maps are consistent both ways.
    let mut first_of_label: HashMap<u32, Vertex> = HashMap::new();
    let mut first_of_ref: HashMap<ComponentRef, Vertex> = HashMap::new();
    for x in 1..=g.n() as Vertex {
        if label[x as usize] == 0 {
            continue;
        }
        let r = ctx.locate(x).expect("surviving vertex");
        let a = *first_of_label.entry(label[x as usize]).or_insert(x);
        let b = *first_of_ref.entry(r).or_insert(x);
        if a != x {
            let same = ctx.connected(a, x).expect("surviving vertex");
            if !same {
                return Err(mismatch(Some((a, x)), 1, 0));
            }
        }
        if b != x && label[b as usize] != label[x as usize] {
            return Err(mismatch(Some((b, x)), 0, 1));
        }
    }
    Ok(ctx.cases())
}

/// Every failure set of one to three vertices.
pub fn all_failure_sets(n: usize) -> Vec<Vec<Vertex>> {
    let n = n as Vertex;
    let mut out = Vec::new();
    for a in 1..=n {
        out.push(vec![a]);
        for b in a + 1..=n {
            out.push(vec![a, b]);
            for c in b + 1..=n {
                out.push(vec![a, b, c]);
            }
        }
    }
    out
}

/// Random failure sets, biased toward vertices on one root path so that
/// deep cases are reached.
pub fn sample_failure_sets(g: &Graph, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Vertex>> {
    let n = g.n() as Vertex;
    let (t, num) = raw_dfs(g);
    let mut orig = vec![NIL; t.n() + 1];
    for v in 1..=n {
        orig[num[v as usize] as usize] = v;
    }
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let k = rng.gen_range(1..=3.min(n as usize));
        let mut f: Vec<Vertex> = if rng.gen_bool(0.5) {
            // Vertices on the root path of a random vertex.
            let mut path = Vec::new();
            let mut v = num[rng.gen_range(1..=n) as usize];
            while v != NIL {
                path.push(orig[v as usize]);
                v = t.parent(v);
            }
            path.choose_multiple(rng, k).copied().collect()
        } else {
            (1..=n).collect::<Vec<_>>().choose_multiple(rng, k).copied().collect()
        };
        f.sort_unstable();
        f.dedup();
        out.push(f);
    }
    out
}

/// Settings for [`run_differential`].
#[derive(Clone, Debug)]
pub struct DiffConfig {
    /// Graphs with at most this many vertices are checked on every failure set.
    pub exhaustive_up_to: usize,
    /// Failure sets per larger graph.
    pub samples: usize,
    /// Stop after this many mismatches.
    pub max_mismatches: usize,
}

impl Default for DiffConfig {
    fn default() -> Self {
        DiffConfig { exhaustive_up_to: 16, samples: 400, max_mismatches: 5 }
    }
}

/// Aggregated outcome of a differential run.
#[derive(Clone, Debug, Default, Serialize)]
pub struct DiffReport {
    pub graphs: usize,
    pub failure_sets: u64,
    pub mismatch_count: u64,
    pub mismatches: Vec<Mismatch>,
    /// Hits per case label.
    pub cases: Vec<(Case, u64)>,
}

impl DiffReport {
    pub fn passed(&self) -> bool {
        self.mismatch_count == 0
    }

    fn record(&mut self, mask: u64) {
        if self.cases.is_empty() {
            self.cases = Case::ALL.iter().map(|&c| (c, 0)).collect();
        }
        for (c, hits) in self.cases.iter_mut() {
            if mask & c.bit() != 0 {
                *hits += 1;
            }
        }
    }

    /// Case labels never visited.
    pub fn missing_cases(&self) -> Vec<Case> {
        Case::ALL.into_iter().filter(|&c| c != Case::Fallback && !self.cases.iter().any(|&(d, h)| d == c && h > 0)).collect()
    }

    /// Fold another report into this one.
    pub fn merge(&mut self, other: DiffReport) {
        self.graphs += other.graphs;
        self.failure_sets += other.failure_sets;
        self.mismatch_count += other.mismatch_count;
        self.mismatches.extend(other.mismatches);
        if self.cases.is_empty() {
            self.cases = other.cases;
        } else {
            for ((_, a), (_, b)) in self.cases.iter_mut().zip(other.cases) {
                *a += b;
            }
        }
    }

    pub fn case_hits(&self, c: Case) -> u64 {
        self.cases.iter().find(|&&(d, _)| d == c).map_or(0, |&(_, h)| h)
    }
}

/// Check one graph against breadth-first search, adding to `report`.
pub fn run_differential(g: &Graph, o: &Oracle, cfg: &DiffConfig, rng: &mut ChaCha8Rng, report: &mut DiffReport) {
    report.graphs += 1;
    let sets = if g.n() <= cfg.exhaustive_up_to { all_failure_sets(g.n()) } else { sample_failure_sets(g, cfg.samples, rng) };
    for f in sets {
        report.failure_sets += 1;
        match check_failure_set(o, g, &f) {
            Ok(mask) => report.record(mask),
            Err(m) => {
                report.mismatch_count += 1;
                if report.mismatches.len() < cfg.max_mismatches {
                    report.mismatches.push(*m);
                }
            }
        }
    }
}

/// The default corpus: every family at each size, plus adversarial graphs.
pub fn corpus(sizes: &[usize], seeds: u64, adversarial: u64) -> Vec<Graph> {
    let mut out = Vec::new();
    for &n in sizes {
        for family in Family::ALL {
            for seed in 0..seeds {
                out.push(generate(family, n, seed));
            }
        }
    }
    out.extend((0..adversarial).map(gen_adversarial));
    out
}

/// Differential run over a corpus, optionally with a mutation installed.
pub fn run_corpus(graphs: &[Graph], cfg: &DiffConfig, mutation: Option<Mutation>) -> DiffReport {
    let mut report = DiffReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for g in graphs {
        let mut o = Oracle::new(g);
        o.set_mutation(mutation);
        run_differential(g, &o, cfg, &mut rng, &mut report);
        if report.mismatch_count as usize >= cfg.max_mismatches {
            break;
        }
    }
    report
}

fn fails(g: &Graph, failed: &[Vertex], mutation: Option<Mutation>) -> bool {
    let mut o = Oracle::new(g);
    o.set_mutation(mutation);
    check_failure_set(&o, g, failed).is_err()
}

/// Greedily delete edges and vertices while the failure set still exposes a
/// mismatch. Vertices are relabelled to stay contiguous.
pub fn shrink(g: &Graph, failed: &[Vertex], mutation: Option<Mutation>) -> (Graph, Vec<Vertex>) {
    let mut g = g.clone();
    let mut failed = failed.to_vec();
    loop {
        let mut progress = false;
        let edges = g.edges().to_vec();
        for i in 0..edges.len() {
            let rest: Vec<_> = edges.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &e)| e).collect();
            if let Ok(h) = Graph::new(g.n(), rest) {
                if fails(&h, &failed, mutation) {
                    g = h;
                    progress = true;
                    break;
                }
            }
        }
        if progress {
            continue;
        }
        for v in (1..=g.n() as Vertex).rev() {
            if failed.contains(&v) || g.n() <= 2 {
                continue;
            }
            let relabel = |x: Vertex| if x > v { x - 1 } else { x };
            let rest = g.edges().iter().filter(|e| e.0 != v && e.1 != v).map(|e| (relabel(e.0), relabel(e.1)));
            if let Ok(h) = Graph::new(g.n() - 1, rest) {
                let f: Vec<Vertex> = failed.iter().map(|&x| relabel(x)).collect();
                if fails(&h, &f, mutation) {
                    g = h;
                    failed = f;
                    progress = true;
                    break;
                }
            }
        }
        if !progress {
            return (g, failed);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: u32) -> Graph {
        Graph::new(n as usize, (1..=n).map(|i| (i, i % n + 1))).unwrap()
    }

    #[test]
    fn brute_on_cycles() {
        let c6 = cycle(6);
        assert!(brute_connected(&c6, &[2, 5], 3, 4));
        assert!(!brute_connected(&c6, &[2, 5], 1, 3));
        assert!(brute_connected(&c6, &[2, 5], 1, 6));
        assert_eq!(brute_count(&c6, &[2, 4, 6]), 3);
        assert_eq!(brute_count(&c6, &[]), 1);
    }

    #[test]
    fn generators_are_deterministic_and_connected() {
        for f in Family::ALL {
            for seed in 0..20 {
                let a = generate(f, 20, seed);
                assert_eq!(a, generate(f, 20, seed));
                assert!(a.is_connected());
            }
        }
    }
}
