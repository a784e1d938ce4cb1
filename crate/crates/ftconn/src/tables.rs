//! Per-vertex tables consulted by the query cases.
//!
//! Every table is indexed by base vertex number and stores base vertex
//! numbers, [`NIL`] when absent. Tables that depend on a child order are kept
//! once per view and computed in that view's numbering before translation.

use crate::batch::{segment_points, skip_points, subtree_extremes, SegmentQuery, Side};
use crate::graph::{DfsTree, Vertex, VertexKind, View, NIL};
use crate::params::{next_mp, Extremes, ScalarParams};
use crate::tree::{NcaIndex, RmqIndex};

/// Index of the low-increasing view in per-view arrays.
pub const LI: usize = 0;
/// Index of the high-decreasing view in per-view arrays.
pub const HD: usize = 1;

/// Which extreme point of a vertex a table entry is derived from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Lp = 0,
    Rp = 1,
}

#[inline]
fn lt(y: Vertex, x: Vertex) -> bool {
    y != NIL && y < x
}

/// Leftmost and rightmost answers per key vertex.
#[derive(Clone, Debug, Default)]
pub struct PointPair {
    pub left: Vec<Vertex>,
    pub right: Vec<Vertex>,
}

impl PointPair {
    fn new(n: usize) -> Self {
        PointPair { left: vec![NIL; n + 1], right: vec![NIL; n + 1] }
    }

    #[inline]
    pub fn get(&self, v: Vertex) -> (Vertex, Vertex) {
        (self.left[v as usize], self.right[v as usize])
    }

    fn words(&self) -> usize {
        self.left.len() + self.right.len()
    }
}

/// Extreme points of `T(d)` reaching the path `T[p(p(d)), c_d]`, for the
/// vertices `d` whose anchor `v_d` is set.
#[derive(Clone, Debug)]
pub struct SegmentFamily {
    /// The lower endpoint `v_d` that defines membership, or NIL.
    pub anchor: Vec<Vertex>,
    /// Answers per view.
    pub points: [PointPair; 2],
}

impl SegmentFamily {
    fn words(&self) -> usize {
        self.anchor.len() + self.points.iter().map(PointPair::words).sum::<usize>()
    }
}

/// For `c` whose maximum point lies strictly below it and has exactly one
/// child `d̂` with `high1(d̂)` in `T(c)` and `low1(d̂) < p(c)`.
#[derive(Clone, Debug)]
pub struct SingleChildFamily {
    /// `d̂`, or NIL when `c` is not covered.
    pub child: Vec<Vertex>,
    /// Extreme points of `T(d̂)` reaching `T[p(Mp(c)), c]`, per view.
    pub segment: [PointPair; 2],
    /// Extreme points of `T(d̂)` with an edge in `B_p(c)`, per view.
    pub subtree: [PointPair; 2],
    /// Nearest common ancestor of the two subtree points.
    pub meet: Vec<Vertex>,
}

/// Lowest lower endpoints over a prefix of the children of `Mp(x)`.
#[derive(Clone, Debug)]
pub struct LowTriple {
    /// Lowest `low1`.
    pub first: Vec<Vertex>,
    /// Second-lowest distinct `low1`.
    pub second: Vec<Vertex>,
    /// Lowest `low2`.
    pub third: Vec<Vertex>,
}

impl LowTriple {
    fn new(n: usize) -> Self {
        LowTriple { first: vec![NIL; n + 1], second: vec![NIL; n + 1], third: vec![NIL; n + 1] }
    }

    #[inline]
    pub fn get(&self, x: Vertex) -> [Vertex; 3] {
        let i = x as usize;
        [self.first[i], self.second[i], self.third[i]]
    }
}

/// Highest `high1`, second-highest distinct `high1` and highest `high2` over
/// the children of a vertex whose `low1` lies above a threshold.
pub type HighTriple = LowTriple;

/// Sums over the children of `Mp(d)`.
#[derive(Clone, Debug)]
pub struct ChildSums {
    /// Sum of `bp` over children with `high1 <= p(d)`.
    pub bp_low: Vec<u64>,
    /// Sum of `sum_y` over the same children.
    pub sum_low: Vec<u64>,
    /// Sum of `num_high` over children with `high1 == p(d)`.
    pub at_parent: Vec<u64>,
    /// Sum of `num_low` over children other than the unique lowest one, with
    /// `high1 >= d` and `low1 < p(d)`.
    pub spanning: Vec<u64>,
}

impl ChildSums {
    fn new(n: usize) -> Self {
        ChildSums { bp_low: vec![0; n + 1], sum_low: vec![0; n + 1], at_parent: vec![0; n + 1], spanning: vec![0; n + 1] }
    }
}

/// Extreme points of `T(d)` with an edge to `T[p(p(d)), c]`, for `c` above
/// `p(d)` in the chain of vertices sharing `Mp(d)`. One per view.
#[derive(Clone, Debug)]
pub struct ChainOracle {
    /// Position of each view vertex in the concatenated chains.
    pos: Vec<u32>,
    /// Next chain vertex above, in view numbering.
    next: Vec<Vertex>,
    /// Answers of `(d, p(p(d)), next(d))` in view numbering.
    first: PointPair,
    lo: Vec<u32>,
    hi: Vec<u32>,
    rmq_lo: RmqIndex,
    rmq_hi: RmqIndex,
}

impl ChainOracle {
    fn build(view: &View, mp_base: &[Vertex]) -> ChainOracle {
        let t = &view.tree;
        let n = t.n();
        let mp = view.import(mp_base);
        let next = next_mp(&mp);
        // Chains listed from the deepest vertex up, concatenated by Mp.
        let mut size = vec![0u32; n + 2];
        for v in 1..=n {
            if mp[v] != NIL {
                size[mp[v] as usize + 1] += 1;
            }
        }
        for i in 1..size.len() {
            size[i] += size[i - 1];
        }
        let total = size[n + 1] as usize;
        let mut pos = vec![u32::MAX; n + 1];
        for v in (1..=n).rev() {
            if mp[v] != NIL {
                pos[v] = size[mp[v] as usize];
                size[mp[v] as usize] += 1;
            }
        }
        let mut queries = Vec::new();
        let mut owners = Vec::new();
        for d in 1..=n as Vertex {
            let nx = next[d as usize];
            if nx != NIL && nx < t.parent(d) {
                queries.push(SegmentQuery::new(d, t.parent(t.parent(d)), nx));
                owners.push(d);
            }
        }
        let answers = segment_points(t, &queries).expect("chain queries are nested");
        let mut first = PointPair::new(n);
        for (&d, &(l, r)) in owners.iter().zip(&answers) {
            first.left[d as usize] = l;
            first.right[d as usize] = r;
        }
        let mut lo = vec![u32::MAX; total];
        let mut hi = vec![0u32; total];
        for d in 1..=n as Vertex {
            let di = d as usize;
            if next[di] == NIL {
                continue;
            }
            let w = mp[di];
            let downs = t.downs(t.parent(d));
            let s = downs.partition_point(|&x| x < w);
            let e = downs.partition_point(|&x| x < w + t.nd(w));
            let (mut a, mut b) = if s < e { (downs[s], downs[e - 1]) } else { (u32::MAX, 0) };
            if first.left[di] != NIL {
                a = a.min(first.left[di]);
                b = b.max(first.right[di]);
            }
            lo[pos[di] as usize] = a;
            hi[pos[di] as usize] = b;
        }
        let rmq_lo = RmqIndex::min(&lo);
        let rmq_hi = RmqIndex::max(&hi);
        ChainOracle { pos, next, first, lo, hi, rmq_lo, rmq_hi }
    }

    /// Leftmost and rightmost `x` in `T(d)` with an edge to `T[p(p(d)), c]`,
    /// for base vertices `c` and `d` sharing their maximum point with `c < p(d)`.
    /// `skip_first` drops the edges landing on `T[p(p(d)), next(d)]`.
    pub fn query(&self, view: &View, c: Vertex, d: Vertex, skip_first: bool) -> (Vertex, Vertex) {
        let (c, d) = (view.v(c), view.v(d));
        let di = d as usize;
        if self.next[di] == c {
            return (view.b(self.first.left[di]), view.b(self.first.right[di]));
        }
        let (mut a, mut b) = (u32::MAX, 0);
        if !skip_first && self.first.left[di] != NIL {
            a = self.first.left[di];
            b = self.first.right[di];
        }
        let (i, j) = (self.pos[di] as usize + 1, self.pos[c as usize] as usize - 1);
        debug_assert!(i <= j);
        a = a.min(self.lo[self.rmq_lo.query(i, j)]);
        b = b.max(self.hi[self.rmq_hi.query(i, j)]);
        if a == u32::MAX {
            (NIL, NIL)
        } else {
            (view.b(a), view.b(b))
        }
    }

    fn words(&self) -> usize {
        self.pos.len() + self.next.len() + self.first.words() + self.lo.len() + self.hi.len() + self.rmq_lo.words() + self.rmq_hi.words()
    }
}

/// Tree-split children of every vertex sorted by `(low1, low2, low3)` with
/// absent values last, followed by its back-split children.
#[derive(Clone, Debug)]
pub struct SortedChildren {
    off: Vec<u32>,
    split: Vec<u32>,
    list: Vec<Vertex>,
}

impl SortedChildren {
    /// The tree-split children of `f` in sorted order.
    #[inline]
    pub fn splits(&self, f: Vertex) -> &[Vertex] {
        let s = self.off[f as usize] as usize;
        &self.list[s..s + self.split[f as usize] as usize]
    }

    /// All children of `f`, tree-split ones first.
    pub fn all(&self, f: Vertex) -> &[Vertex] {
        &self.list[self.off[f as usize] as usize..self.off[f as usize + 1] as usize]
    }
}

/// All tables used by the query cases.
#[derive(Clone, Debug)]
pub struct CaseTables {
    /// Leftmost and rightmost points per view.
    pub ext: [PointPair; 2],
    /// Skipping points on the high-decreasing view, by variant: extreme
    /// points of `B_p(v)` ignoring edges that land on `l1(Lp(v))` or `l1(Rp(v))`.
    pub skip: [PointPair; 2],
    /// The first three low-increasing children of every vertex.
    pub first3: Vec<[Vertex; 3]>,
    /// The unique child with the lowest `low1`, if any.
    pub lowest_child: Vec<Vertex>,
    /// For `c` whose maximum point has at least two children with `low1 < p(c)`:
    /// the first two such children on the low-increasing view.
    pub pair: [Vec<Vertex>; 2],
    /// Extreme points of `T(pair[i])` with an edge in `B_p(c)`, high-decreasing view.
    pub pair_points: [PointPair; 2],
    /// Families keyed by `[defining view][variant]`.
    pub anchored: [[SegmentFamily; 2]; 2],
    /// Family anchored at the second-lowest child of `Mp(d)`.
    pub second_child: SegmentFamily,
    pub single: SingleChildFamily,
    /// Chain answers per view.
    pub chain: [ChainOracle; 2],
    /// Over children `e` of `Mp(x)` with `high1(e) >= x`.
    pub low_prefix: LowTriple,
    /// The two children attaining the lowest `low1` values in that prefix.
    pub low_best: [Vec<Vertex>; 2],
    /// As `low_prefix` without the unique lowest child of `Mp(x)`.
    pub low_prefix_excl: LowTriple,
    /// Over children `e` of `Mp(c)` with `low1(e) < p(c)`.
    pub high_mp: HighTriple,
    /// Over children `e` of `single.meet[c]` with `low1(e) < p(c)`.
    pub high_meet: HighTriple,
    /// Sums over the children of `Mp(d)`.
    pub sums_mp: ChildSums,
    /// Second low-increasing child `c''` of `Mp(d)` if `low1(c'') < p(d)`.
    pub second: Vec<Vertex>,
    /// Extreme points of `T(c'')` with an edge in `B_p(d)`, high-decreasing view.
    pub second_points: PointPair,
    /// Sums over the children of `nca(second_points)`.
    pub sums_second: ChildSums,
    pub sorted: SortedChildren,
}

/// Inputs shared by the table builders.
pub struct TableInput<'a> {
    pub base: &'a DfsTree,
    pub params: &'a ScalarParams,
    pub kind: &'a [VertexKind],
    pub views: [&'a View; 2],
    pub mp: &'a [Vertex],
    pub nca: &'a NcaIndex,
}

struct ViewData<'a> {
    view: &'a View,
    t: &'a DfsTree,
    p: ScalarParams,
}

impl CaseTables {
    pub fn build(inp: &TableInput) -> CaseTables {
        let n = inp.base.n();
        let vd: [ViewData; 2] = inp.views.map(|view| ViewData { view, t: &view.tree, p: inp.params.translated(view) });
        let ext_view: [Extremes; 2] = [Extremes::compute(vd[LI].t), Extremes::compute(vd[HD].t)];
        let ext: [PointPair; 2] =
            [0, 1].map(|i| PointPair { left: vd[i].view.export(&ext_view[i].lp), right: vd[i].view.export(&ext_view[i].rp) });

        let skip = build_skip(&vd[HD], &ext_view[HD]);
        let (first3, lowest_child) = build_first3(inp, &vd[LI]);
        let (pair, pair_points) = build_pair(inp, &vd[HD], &first3);
        let anchored = [LI, HD].map(|def| {
            [Variant::Lp, Variant::Rp].map(|var| {
                let x = if var == Variant::Lp { &ext[def].left } else { &ext[def].right };
                let anchor: Vec<Vertex> = (0..=n).map(|d| if d == 0 || x[d] == NIL { NIL } else { inp.params.l1[x[d] as usize] }).collect();
                anchored_family(inp, &vd, anchor, |_, _| true)
            })
        });
        let second_anchor: Vec<Vertex> = (0..=n)
            .map(|d| {
                let w = inp.mp[d];
                if d == 0 || w == NIL {
                    return NIL;
                }
                let [c1, c2, _] = first3[w as usize];
                if c2 == NIL || lowest_child[w as usize] != c1 {
                    return NIL;
                }
                inp.params.low1[c2 as usize]
            })
            .collect();
        let second_child = anchored_family(inp, &vd, second_anchor, |d, cd| {
            let c1 = first3[inp.mp[d as usize] as usize][0];
            inp.base.is_ancestor(c1, inp.mp[cd as usize])
        });
        let prefix = build_low_prefix(inp, &vd, &lowest_child);
        let single = build_single(inp, &vd, &prefix.best);
        let chain = [ChainOracle::build(vd[LI].view, inp.mp), ChainOracle::build(vd[HD].view, inp.mp)];
        let high_mp = build_high(inp, &vd[LI], |c| inp.mp[c as usize]);
        let high_meet = build_high(inp, &vd[LI], |c| single.meet[c as usize]);
        let (second, second_points, sums_second) = build_second(inp, &vd[HD], &first3);
        let sorted = build_sorted(inp);
        CaseTables {
            ext,
            skip,
            first3,
            lowest_child,
            pair,
            pair_points,
            anchored,
            second_child,
            single,
            chain,
            low_prefix: prefix.all,
            low_best: prefix.best,
            low_prefix_excl: prefix.excl,
            high_mp,
            high_meet,
            sums_mp: prefix.sums,
            second,
            second_points,
            sums_second,
            sorted,
        }
    }

    /// Machine words held, counting 64-bit sums as two words.
    pub fn words(&self) -> usize {
        let n = self.first3.len();
        let pairs = self.ext.iter().chain(&self.skip).chain(&self.pair_points).map(PointPair::words).sum::<usize>();
        let families = self.anchored.iter().flatten().map(SegmentFamily::words).sum::<usize>() + self.second_child.words();
        let single = 2 * n + self.single.segment.iter().chain(&self.single.subtree).map(PointPair::words).sum::<usize>();
        let triples = 5 * 3 * n + 2 * n;
        let sums = 2 * 8 * n + n + self.second_points.words();
        let chain = self.chain.iter().map(ChainOracle::words).sum::<usize>();
        let sorted = self.sorted.off.len() + self.sorted.split.len() + self.sorted.list.len();
        pairs + families + single + triples + sums + chain + sorted + 4 * n + 2 * n
    }
}

fn build_skip(hd: &ViewData, ext: &Extremes) -> [PointPair; 2] {
    let n = hd.t.n();
    [&ext.lp, &ext.rp].map(|x| {
        let z: Vec<Vertex> = (0..=n).map(|v| if x[v] == NIL { NIL } else { hd.p.l1[x[v] as usize] }).collect();
        PointPair { left: hd.view.export(&skip_points(hd.t, &z, Side::Left)), right: hd.view.export(&skip_points(hd.t, &z, Side::Right)) }
    })
}

fn build_first3(inp: &TableInput, li: &ViewData) -> (Vec<[Vertex; 3]>, Vec<Vertex>) {
    let n = inp.base.n();
    let mut first3 = vec![[NIL; 3]; n + 1];
    let mut lowest = vec![NIL; n + 1];
    for w in 1..=n as Vertex {
        let ch = li.t.children(li.view.v(w));
        for (slot, &c) in first3[w as usize].iter_mut().zip(ch) {
            *slot = li.view.b(c);
        }
        let [a, b, _] = first3[w as usize];
        let low = |x: Vertex| inp.params.low1[x as usize];
        if a != NIL && low(a) != NIL && (b == NIL || low(b) != low(a)) {
            lowest[w as usize] = a;
        }
    }
    (first3, lowest)
}

fn build_pair(inp: &TableInput, hd: &ViewData, first3: &[[Vertex; 3]]) -> ([Vec<Vertex>; 2], [PointPair; 2]) {
    let n = inp.base.n();
    let t = inp.base;
    let low = &inp.params.low1;
    let mut pair = [vec![NIL; n + 1], vec![NIL; n + 1]];
    let mut queries = Vec::new();
    let mut keys = Vec::new();
    for c in 1..=n as Vertex {
        let w = inp.mp[c as usize];
        if w == NIL {
            continue;
        }
        let [a, b, _] = first3[w as usize];
        let pc = t.parent(c);
        if b != NIL && lt(low[a as usize], pc) && lt(low[b as usize], pc) {
            pair[0][c as usize] = a;
            pair[1][c as usize] = b;
            for (i, d) in [a, b].into_iter().enumerate() {
                queries.push((hd.view.v(c), hd.view.v(d)));
                keys.push((i, c));
            }
        }
    }
    let mut points = [PointPair::new(n), PointPair::new(n)];
    for side in [Side::Left, Side::Right] {
        let out = subtree_extremes(hd.t, &hd.p.l1, &queries, side).expect("pair queries are descendants");
        for (&(i, c), &x) in keys.iter().zip(&out) {
            let slot = if side == Side::Left { &mut points[i].left } else { &mut points[i].right };
            slot[c as usize] = hd.view.b(x);
        }
    }
    (pair, points)
}

/// Queries `(d, p(p(d)), c_d)` for every `d` whose anchor `v_d` is a proper
/// ancestor of `p(p(d))` and whose `c_d` (the child of `v_d` toward `d`)
/// passes `member`. Answered on both views.
fn anchored_family(
    inp: &TableInput,
    vd: &[ViewData; 2],
    mut anchor: Vec<Vertex>,
    member: impl Fn(Vertex, Vertex) -> bool,
) -> SegmentFamily {
    let t = inp.base;
    let n = t.n();
    let mut queries = Vec::new();
    let mut owners = Vec::new();
    for d in 1..=n as Vertex {
        let a = anchor[d as usize];
        let pp = t.parent(t.parent(d));
        let ok = a != NIL && pp != NIL && a < pp && {
            let cd = t.child_toward(a, d);
            t.is_ancestor(d, inp.mp[cd as usize]) && member(d, cd)
        };
        if ok {
            owners.push(d);
            queries.push((d, pp, t.child_toward(a, d)));
        } else {
            anchor[d as usize] = NIL;
        }
    }
    let points = [LI, HD].map(|i| segment_batch(&vd[i], &queries, &owners, n));
    SegmentFamily { anchor, points }
}

fn segment_batch(v: &ViewData, queries: &[(Vertex, Vertex, Vertex)], owners: &[Vertex], n: usize) -> PointPair {
    let qs: Vec<SegmentQuery> = queries.iter().map(|&(z, u, w)| SegmentQuery::new(v.view.v(z), v.view.v(u), v.view.v(w))).collect();
    let answers = segment_points(v.t, &qs).expect("family queries are nested");
    let mut out = PointPair::new(n);
    for (&d, &(l, r)) in owners.iter().zip(&answers) {
        out.left[d as usize] = v.view.b(l);
        out.right[d as usize] = v.view.b(r);
    }
    out
}

fn subtree_batch(v: &ViewData, queries: &[(Vertex, Vertex)], owners: &[Vertex], n: usize) -> PointPair {
    let qs: Vec<(Vertex, Vertex)> = queries.iter().map(|&(a, b)| (v.view.v(a), v.view.v(b))).collect();
    let mut out = PointPair::new(n);
    for side in [Side::Left, Side::Right] {
        let ans = subtree_extremes(v.t, &v.p.l1, &qs, side).expect("subtree queries are descendants");
        let slot = if side == Side::Left { &mut out.left } else { &mut out.right };
        for (&d, &x) in owners.iter().zip(&ans) {
            slot[d as usize] = v.view.b(x);
        }
    }
    out
}

struct LowPrefix {
    all: LowTriple,
    excl: LowTriple,
    best: [Vec<Vertex>; 2],
    sums: ChildSums,
}

#[derive(Clone, Copy)]
struct LowAcc {
    low: [Vertex; 2],
    low2: Vertex,
    best: [Vertex; 2],
    low_x: [Vertex; 2],
    low2_x: Vertex,
}

impl LowAcc {
    const EMPTY: LowAcc = LowAcc { low: [NIL; 2], low2: NIL, best: [NIL; 2], low_x: [NIL; 2], low2_x: NIL };
}

/// Keep the two smallest distinct values.
#[inline]
fn push2(slot: &mut [Vertex; 2], y: Vertex) {
    if y == NIL || slot.contains(&y) {
        return;
    }
    if slot[0] == NIL || y < slot[0] {
        *slot = [y, slot[0]];
    } else if slot[1] == NIL || y < slot[1] {
        slot[1] = y;
    }
}

#[inline]
fn min_nil(a: Vertex, b: Vertex) -> Vertex {
    match (a, b) {
        (NIL, x) | (x, NIL) => x,
        _ => a.min(b),
    }
}

/// Scan the children of each `w` on the high-decreasing view while walking the
/// chain of vertices `x` with `Mp(x) = w` from the deepest up. The prefix with
/// `high1 >= x` only grows.
fn build_low_prefix(inp: &TableInput, vd: &[ViewData; 2], lowest: &[Vertex]) -> LowPrefix {
    let n = inp.base.n();
    let (hd, li) = (&vd[HD], &vd[LI]);
    let (ph, pl) = (&hd.p, &li.p);
    let mp = hd.view.import(inp.mp);
    let mut acc = vec![LowAcc::EMPTY; n + 1];
    let mut ptr = vec![0u32; n + 1];
    let mut ptr_li = vec![u32::MAX; n + 1];
    let mut pre_bp = vec![0u64; n + 1];
    let mut pre_sum = vec![0u64; n + 1];
    let mut pre_low = vec![0u64; n + 1];
    let mut suf_low = vec![0u64; n + 1];
    let mut tot_bp = vec![0u64; n + 1];
    let mut tot_sum = vec![0u64; n + 1];
    for w in 1..=n as Vertex {
        for &e in hd.t.children(w) {
            tot_bp[w as usize] += ph.bp[e as usize] as u64;
            tot_sum[w as usize] += ph.sum_y[e as usize];
        }
    }
    let mut out =
        LowPrefix { all: LowTriple::new(n), excl: LowTriple::new(n), best: [vec![NIL; n + 1], vec![NIL; n + 1]], sums: ChildSums::new(n) };
    let hb = |x: Vertex| hd.view.b(x);
    for x in (1..=n as Vertex).rev() {
        let w = mp[x as usize];
        if w == NIL || w == x {
            continue;
        }
        let wi = w as usize;
        let wb = hb(w) as usize;
        let c1 = lowest[wb];
        let ch = hd.t.children(w);
        let a = &mut acc[wi];
        while (ptr[wi] as usize) < ch.len() {
            let e = ch[ptr[wi] as usize];
            let h = ph.high1[e as usize];
            if !(h != NIL && h >= x) {
                break;
            }
            let ei = e as usize;
            let l = ph.low1[ei];
            if l != NIL {
                if a.best[0] == NIL || l < ph.low1[a.best[0] as usize] {
                    a.best = [e, a.best[0]];
                } else if a.best[1] == NIL || l < ph.low1[a.best[1] as usize] {
                    a.best[1] = e;
                }
            }
            push2(&mut a.low, l);
            a.low2 = min_nil(a.low2, ph.low2[ei]);
            pre_bp[wi] += ph.bp[ei] as u64;
            pre_sum[wi] += ph.sum_y[ei];
            if hb(e) != c1 {
                push2(&mut a.low_x, l);
                a.low2_x = min_nil(a.low2_x, ph.low2[ei]);
                pre_low[wi] += ph.num_low[ei] as u64;
            }
            ptr[wi] += 1;
        }
        let p = hd.t.parent(x);
        let mut at_parent = 0u64;
        let mut flat = 0u64;
        for &e in &ch[ptr[wi] as usize..] {
            if ph.high1[e as usize] != p {
                break;
            }
            at_parent += ph.num_high[e as usize] as u64;
            if ph.low1[e as usize] == p && hb(e) != c1 {
                flat += ph.num_low[e as usize] as u64;
            }
        }
        // Children with low1 >= p(x) form a suffix of the low-increasing order.
        let wl = li.view.v(hb(w));
        let pl_x = li.view.v(hb(p));
        let chl = li.t.children(wl);
        if ptr_li[wi] == u32::MAX {
            ptr_li[wi] = chl.len() as u32;
        }
        while ptr_li[wi] > 0 {
            let e = chl[ptr_li[wi] as usize - 1];
            let l = pl.low1[e as usize];
            if l != NIL && l < pl_x {
                break;
            }
            if li.view.b(e) != c1 {
                suf_low[wi] += pl.num_low[e as usize] as u64;
            }
            ptr_li[wi] -= 1;
        }
        let xb = hb(x) as usize;
        let a = acc[wi];
        out.all.first[xb] = hb(a.low[0]);
        out.all.second[xb] = hb(a.low[1]);
        out.all.third[xb] = hb(a.low2);
        out.excl.first[xb] = hb(a.low_x[0]);
        out.excl.second[xb] = hb(a.low_x[1]);
        out.excl.third[xb] = hb(a.low2_x);
        out.best[0][xb] = hb(a.best[0]);
        out.best[1][xb] = hb(a.best[1]);
        out.sums.bp_low[xb] = tot_bp[wi] - pre_bp[wi];
        out.sums.sum_low[xb] = tot_sum[wi] - pre_sum[wi];
        out.sums.at_parent[xb] = at_parent;
        out.sums.spanning[xb] = pre_low[wi] + flat - suf_low[wi];
    }
    out
}

fn build_single(inp: &TableInput, vd: &[ViewData; 2], best: &[Vec<Vertex>; 2]) -> SingleChildFamily {
    let t = inp.base;
    let n = t.n();
    let low = &inp.params.low1;
    let mut child = vec![NIL; n + 1];
    let mut seg = Vec::new();
    let mut sub = Vec::new();
    let mut owners = Vec::new();
    for c in 1..=n as Vertex {
        let w = inp.mp[c as usize];
        if w == NIL || w == c {
            continue;
        }
        let pc = t.parent(c);
        let (b1, b2) = (best[0][c as usize], best[1][c as usize]);
        if b1 != NIL && lt(low[b1 as usize], pc) && !(b2 != NIL && lt(low[b2 as usize], pc)) {
            child[c as usize] = b1;
            owners.push(c);
            seg.push((b1, t.parent(w), c));
            sub.push((c, b1));
        }
    }
    let segment = [LI, HD].map(|i| segment_batch(&vd[i], &seg, &owners, n));
    let subtree = [LI, HD].map(|i| subtree_batch(&vd[i], &sub, &owners, n));
    let mut meet = vec![NIL; n + 1];
    for &c in &owners {
        let (l, r) = subtree[HD].get(c);
        meet[c as usize] = inp.nca.query(t, l, r);
    }
    SingleChildFamily { child, segment, subtree, meet }
}

#[derive(Clone, Copy)]
struct HighAcc {
    high: [Vertex; 2],
    high2: Vertex,
}

/// For every `c` with `key(c) = w` set, scan the children of `w` on the
/// low-increasing view with `low1 < p(c)`. Keys sharing `w` are ancestors of
/// `w`, so visiting `c` in increasing order only grows the prefix.
fn build_high(inp: &TableInput, li: &ViewData, key: impl Fn(Vertex) -> Vertex) -> HighTriple {
    let n = inp.base.n();
    let p = &li.p;
    let mut acc = vec![HighAcc { high: [NIL; 2], high2: NIL }; n + 1];
    let mut ptr = vec![0u32; n + 1];
    let mut out = HighTriple::new(n);
    for c in 1..=n as Vertex {
        let cb = li.view.b(c);
        let wb = key(cb);
        if wb == NIL {
            continue;
        }
        let w = li.view.v(wb) as usize;
        let pc = li.t.parent(c);
        let ch = li.t.children(w as Vertex);
        let a = &mut acc[w];
        while (ptr[w] as usize) < ch.len() {
            let e = ch[ptr[w] as usize] as usize;
            if !lt(p.low1[e], pc) {
                break;
            }
            let h = p.high1[e];
            if h != NIL && !a.high.contains(&h) {
                if a.high[0] == NIL || h > a.high[0] {
                    a.high = [h, a.high[0]];
                } else if a.high[1] == NIL || h > a.high[1] {
                    a.high[1] = h;
                }
            }
            if p.high2[e] != NIL && (a.high2 == NIL || p.high2[e] > a.high2) {
                a.high2 = p.high2[e];
            }
            ptr[w] += 1;
        }
        let i = cb as usize;
        out.first[i] = li.view.b(a.high[0]);
        out.second[i] = li.view.b(a.high[1]);
        out.third[i] = li.view.b(a.high2);
    }
    out
}

fn build_second(inp: &TableInput, hd: &ViewData, first3: &[[Vertex; 3]]) -> (Vec<Vertex>, PointPair, ChildSums) {
    let t = inp.base;
    let n = t.n();
    let low = &inp.params.low1;
    let mut second = vec![NIL; n + 1];
    let mut queries = Vec::new();
    let mut owners = Vec::new();
    for d in 1..=n as Vertex {
        let w = inp.mp[d as usize];
        if w == NIL {
            continue;
        }
        let c2 = first3[w as usize][1];
        if c2 != NIL && lt(low[c2 as usize], t.parent(d)) {
            second[d as usize] = c2;
            queries.push((d, c2));
            owners.push(d);
        }
    }
    let points = subtree_batch(hd, &queries, &owners, n);
    let mut meet = vec![NIL; n + 1];
    for &d in &owners {
        let (l, r) = points.get(d);
        meet[d as usize] = inp.nca.query(t, l, r);
    }
    // Children of the meeting vertex with high1 <= p(d) form a suffix of the
    // high-decreasing order; keys sharing a meeting vertex are its ancestors.
    let ph = &hd.p;
    let mut sums = ChildSums::new(n);
    let mut ptr = vec![u32::MAX; n + 1];
    let mut bp = vec![0u64; n + 1];
    let mut sy = vec![0u64; n + 1];
    for d in 1..=n as Vertex {
        let db = hd.view.b(d);
        let mb = meet[db as usize];
        if mb == NIL {
            continue;
        }
        let w = hd.view.v(mb);
        let wi = w as usize;
        let ch = hd.t.children(w);
        if ptr[wi] == u32::MAX {
            ptr[wi] = ch.len() as u32;
        }
        let pd = hd.t.parent(d);
        while ptr[wi] > 0 {
            let e = ch[ptr[wi] as usize - 1] as usize;
            if ph.high1[e] != NIL && ph.high1[e] > pd {
                break;
            }
            bp[wi] += ph.bp[e] as u64;
            sy[wi] += ph.sum_y[e];
            ptr[wi] -= 1;
        }
        let mut at_parent = 0;
        for &e in &ch[ptr[wi] as usize..] {
            if ph.high1[e as usize] != pd {
                break;
            }
            at_parent += ph.num_high[e as usize] as u64;
        }
        sums.bp_low[db as usize] = bp[wi];
        sums.sum_low[db as usize] = sy[wi];
        sums.at_parent[db as usize] = at_parent;
    }
    (second, points, sums)
}

/// Stable counting-sort passes on `(parent, back-split, low1, low2, low3)`.
fn build_sorted(inp: &TableInput) -> SortedChildren {
    let t = inp.base;
    let n = t.n();
    let p = inp.params;
    let key = |y: Vertex| if y == NIL { n + 1 } else { y as usize };
    let back = |v: Vertex| usize::from(matches!(inp.kind[v as usize], VertexKind::AuxBackSplit { .. }));
    let mut order: Vec<Vertex> = (2..=n as Vertex).collect();
    let passes: [&dyn Fn(Vertex) -> usize; 5] =
        [&|v| key(p.low3[v as usize]), &|v| key(p.low2[v as usize]), &|v| key(p.low1[v as usize]), &|v| back(v), &|v| t.parent(v) as usize];
    for f in passes {
        let mut cnt = vec![0usize; n + 3];
        for &v in &order {
            cnt[f(v) + 1] += 1;
        }
        for i in 1..cnt.len() {
            cnt[i] += cnt[i - 1];
        }
        let mut next = vec![NIL; order.len()];
        for &v in &order {
            let k = f(v);
            next[cnt[k]] = v;
            cnt[k] += 1;
        }
        order = next;
    }
    let mut off = vec![0u32; n + 2];
    let mut split = vec![0u32; n + 1];
    for &v in &order {
        off[t.parent(v) as usize + 1] += 1;
        if back(v) == 0 {
            split[t.parent(v) as usize] += 1;
        }
    }
    for i in 1..off.len() {
        off[i] += off[i - 1];
    }
    SortedChildren { off, split, list: order }
}

#[cfg(test)]
mod tests {
    use crate::graph::Graph;
    use crate::oracle::Oracle;
    use crate::verify::{audit_tables, generate, Family};

    #[test]
    fn small_graphs_pass_audit() {
        let cycle = Graph::new(7, (1..=7).map(|i| (i, i % 7 + 1)).chain([(5, 1)])).unwrap();
        let clique = Graph::new(5, (1..=5).flat_map(|a| (a + 1..=5).map(move |b| (a, b)))).unwrap();
        for g in [cycle, clique, generate(Family::Spine, 12, 3), generate(Family::Theta, 12, 4)] {
            let checked = audit_tables(&Oracle::new(&g)).unwrap_or_else(|e| panic!("{e:?}"));
            assert!(checked > 0);
        }
    }

    #[test]
    fn sorted_children_put_tree_splits_first() {
        let o = Oracle::new(&generate(Family::Random, 14, 9));
        let t = o.tree();
        for f in 1..=t.n() as u32 {
            let all = o.tables().sorted.all(f);
            let splits = o.tables().sorted.splits(f);
            assert_eq!(all.len(), t.children(f).len());
            assert!(all.starts_with(splits));
        }
    }
}
