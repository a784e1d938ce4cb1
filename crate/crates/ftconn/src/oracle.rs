//! The query engine: preprocessing, failure resolution and the case analysis
//! that links the components of the DFS tree after up to three vertex failures.
//!
//! Removing failed vertices cuts the DFS tree into internal components, which
//! contain a failed vertex in their subtree, and hanging subtrees, which do
//! not. Hanging subtrees attach to a surviving ancestor through their lowest
//! back-edge endpoints. The case analysis decides which internal components
//! are joined through hanging subtrees or direct back-edges.

use serde::Serialize;

use crate::graph::{build_views, run_dfs, split_transform, DfsForestViews, DfsTree, Graph, Vertex, VertexKind, NIL};
use crate::params::{max_points, Extremes, ScalarParams};
use crate::tables::{CaseTables, TableInput, Variant, HD, LI};
use crate::tree::NcaIndex;

/// Errors for malformed queries.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("at most three failed vertices are supported, got {0}")]
    TooManyFailures(usize),
    #[error("the failure set is empty")]
    NoFailures,
    #[error("vertex {0} is out of range")]
    OutOfRange(Vertex),
    #[error("vertex {0} is listed twice")]
    Duplicate(Vertex),
    #[error("vertex {0} has failed")]
    Failed(Vertex),
}

/// A deliberately wrong predicate, used to check that the tests notice it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// Ignore the `high1` test of the child below `v` when linking a hanging path.
    NoChildHigh,
    /// Ignore the third low child when `v` and `w` share the child of `u`.
    NoThirdChild,
    /// Drop the second child from the test for `Mp(c) = v`.
    NoSecondBest,
    /// Ignore direct edges from an extreme point into `B` when `A` is isolated.
    NoDirectEdge,
    /// Ignore the lowest `low2` of the high prefix.
    NoLowTwo,
    /// Use a non-strict comparison in the counting arguments.
    NonStrictCount,
    /// Ignore the second `high1` over children of the meeting vertex.
    NoSecondHigh,
    /// Ignore the first segment answer of the chain oracle.
    ChainNoFirst,
    /// Do not subtract children that lead toward failed descendants.
    NoSubtract,
    /// Attach hanging subtrees through `low1` even when it has failed.
    FirstLowOnly,
    /// Read the skipping points of the wrong variant.
    SwappedSkip,
    /// Ignore `high2` when `high1` equals `v`.
    NoHighTwo,
}

impl Mutation {
    pub const ALL: [Mutation; 12] = [
        Mutation::NoChildHigh,
        Mutation::NoThirdChild,
        Mutation::NoSecondBest,
        Mutation::NoDirectEdge,
        Mutation::NoLowTwo,
        Mutation::NonStrictCount,
        Mutation::NoSecondHigh,
        Mutation::ChainNoFirst,
        Mutation::NoSubtract,
        Mutation::FirstLowOnly,
        Mutation::SwappedSkip,
        Mutation::NoHighTwo,
    ];
}

/// Labels of the branches taken by the case analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[repr(u8)]
pub enum Case {
    Single,
    Unrelated,
    Nested,
    TripleFlat,
    TripleOnePair,
    TripleForked,
    TripleSameChild,
    TripleSameChildSplit,
    MpcNone,
    MpcNoneMpdNone,
    MpcNoneMpdBelow,
    MpcNoneMpdW,
    MpcNoneMpdC,
    MpcB,
    MpcBMpdNone,
    MpcBMpdBelow,
    MpcBMpdW,
    MpcBMpdC,
    MpcSibling,
    MpcV,
    MpcVJoined,
    MpcVNoEdges,
    MpcVHighB,
    MpcVSpan,
    MpcVSpanSame,
    MpcVSpanSplit,
    MpcVSpanApart,
    MpcVAtU,
    MpcVLowA,
    MpcBelow,
    MpcBelowMpdBelow,
    MpcBelowMpdW,
    MpcBelowCount,
    MpcBelowMpdC,
    MpcW,
    MpcWMpdW,
    MpcWMpdC,
    MpcC,
    MpcCSame,
    MpcCRpAtU,
    MpcCRpInC,
    MpcCSecondAtU,
    MpcCSecondAside,
    MpcCCount,
    Fallback,
}

impl Case {
    pub const ALL: [Case; 45] = [
        Case::Single,
        Case::Unrelated,
        Case::Nested,
        Case::TripleFlat,
        Case::TripleOnePair,
        Case::TripleForked,
        Case::TripleSameChild,
        Case::TripleSameChildSplit,
        Case::MpcNone,
        Case::MpcNoneMpdNone,
        Case::MpcNoneMpdBelow,
        Case::MpcNoneMpdW,
        Case::MpcNoneMpdC,
        Case::MpcB,
        Case::MpcBMpdNone,
        Case::MpcBMpdBelow,
        Case::MpcBMpdW,
        Case::MpcBMpdC,
        Case::MpcSibling,
        Case::MpcV,
        Case::MpcVJoined,
        Case::MpcVNoEdges,
        Case::MpcVHighB,
        Case::MpcVSpan,
        Case::MpcVSpanSame,
        Case::MpcVSpanSplit,
        Case::MpcVSpanApart,
        Case::MpcVAtU,
        Case::MpcVLowA,
        Case::MpcBelow,
        Case::MpcBelowMpdBelow,
        Case::MpcBelowMpdW,
        Case::MpcBelowCount,
        Case::MpcBelowMpdC,
        Case::MpcW,
        Case::MpcWMpdW,
        Case::MpcWMpdC,
        Case::MpcC,
        Case::MpcCSame,
        Case::MpcCRpAtU,
        Case::MpcCRpInC,
        Case::MpcCSecondAtU,
        Case::MpcCSecondAside,
        Case::MpcCCount,
        Case::Fallback,
    ];

    #[inline]
    pub fn bit(self) -> u64 {
        1 << self as u8
    }

    /// Labels present in a bitmask.
    pub fn decode(mask: u64) -> Vec<Case> {
        Case::ALL.into_iter().filter(|c| mask & c.bit() != 0).collect()
    }
}

/// Where a surviving vertex lives after the failures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ComponentRef {
    /// One of the internal components, by representative index.
    Internal(u8),
    /// A hanging subtree with no surviving attachment, by its root.
    Isolated(Vertex),
}

/// The oracle built from a connected graph.
#[derive(Clone, Debug)]
pub struct Oracle {
    n: usize,
    real_num: Vec<Vertex>,
    kind: Vec<VertexKind>,
    views: DfsForestViews,
    params: ScalarParams,
    mp: Vec<Vertex>,
    tables: CaseTables,
    mutation: Option<Mutation>,
}

/// Preprocessing statistics.
#[derive(Clone, Debug, Serialize)]
pub struct OracleStats {
    pub vertices: usize,
    pub transformed_vertices: usize,
    pub back_edges: usize,
    pub words: usize,
}

impl Oracle {
    /// Preprocess a connected graph.
    pub fn new(g: &Graph) -> Oracle {
        let tg = split_transform(g);
        let st = run_dfs(&tg);
        let params = ScalarParams::compute(&st.tree);
        let views = build_views(st.tree, &params.low1, &params.high1);
        let base = &views.base;
        let nca = NcaIndex::new(base);
        let mp = max_points(base, &nca, &Extremes::compute(base));
        let tables = CaseTables::build(&TableInput {
            base,
            params: &params,
            kind: &st.kind,
            views: [&views.low_inc, &views.high_dec],
            mp: &mp,
            nca: &nca,
        });
        Oracle { n: g.n(), real_num: st.real_num, kind: st.kind, views, params, mp, tables, mutation: None }
    }

    /// Install a deliberately wrong predicate, or remove it.
    pub fn set_mutation(&mut self, m: Option<Mutation>) {
        self.mutation = m;
    }

    pub fn stats(&self) -> OracleStats {
        OracleStats {
            vertices: self.n,
            transformed_vertices: self.views.base.n(),
            back_edges: self.views.base.back_edge_count(),
            words: self.words(),
        }
    }

    /// Machine words held by the preprocessed structure.
    pub fn words(&self) -> usize {
        let trees = self.views.base.words() + self.views.low_inc.tree.words() + self.views.high_dec.tree.words();
        let maps = 4 * (self.views.base.n() + 1);
        trees + maps + self.params.words() + self.mp.len() + self.real_num.len() + self.kind.len() + self.tables.words()
    }

    /// Number of vertices of the input graph.
    pub fn n(&self) -> usize {
        self.n
    }

    /// The DFS tree of the transformed graph.
    pub fn tree(&self) -> &DfsTree {
        &self.views.base
    }

    /// The base tree and its two sorted views.
    pub fn views(&self) -> &DfsForestViews {
        &self.views
    }

    pub fn params(&self) -> &ScalarParams {
        &self.params
    }

    pub fn tables(&self) -> &CaseTables {
        &self.tables
    }

    pub fn max_point(&self, v: Vertex) -> Vertex {
        self.mp[v as usize]
    }

    pub fn kind(&self, v: Vertex) -> VertexKind {
        self.kind[v as usize]
    }

    /// Tree number of an input vertex.
    pub fn number(&self, v: Vertex) -> Vertex {
        self.real_num[v as usize]
    }

    fn check(&self, v: Vertex) -> Result<(), OracleError> {
        if v == NIL || v as usize > self.n {
            Err(OracleError::OutOfRange(v))
        } else {
            Ok(())
        }
    }

    /// Prepare the answers for one failure set of one to three input vertices.
    pub fn resolve(&self, failed: &[Vertex]) -> Result<FailureContext<'_>, OracleError> {
        if failed.is_empty() {
            return Err(OracleError::NoFailures);
        }
        if failed.len() > 3 {
            return Err(OracleError::TooManyFailures(failed.len()));
        }
        let mut f = [NIL; 3];
        for (i, &v) in failed.iter().enumerate() {
            self.check(v)?;
            if failed[..i].contains(&v) {
                return Err(OracleError::Duplicate(v));
            }
            f[i] = self.real_num[v as usize];
        }
        let k = failed.len();
        f[..k].sort_unstable();
        let mut ctx = FailureContext { o: self, failed: f, k, roots: [NIL; 3], nroots: 0, link: [0, 1, 2], cases: 0 };
        ctx.link_components();
        Ok(ctx)
    }

    /// Whether `x` and `y` are connected after `failed` fail.
    pub fn connected(&self, failed: &[Vertex], x: Vertex, y: Vertex) -> Result<bool, OracleError> {
        self.resolve(failed)?.connected(x, y)
    }

    /// Number of connected components after `failed` fail.
    pub fn count_components(&self, failed: &[Vertex]) -> Result<u32, OracleError> {
        Ok(self.resolve(failed)?.count())
    }

    /// Whether removing `failed` disconnects the remaining vertices.
    pub fn is_cut(&self, failed: &[Vertex]) -> Result<bool, OracleError> {
        Ok(self.count_components(failed)? > 1)
    }
}

/// The answers for one failure set.
#[derive(Clone, Debug)]
pub struct FailureContext<'a> {
    o: &'a Oracle,
    /// Failed tree numbers, ascending.
    failed: [Vertex; 3],
    k: usize,
    /// Internal component roots: the tree root first, then children of failed
    /// vertices toward deeper failed vertices.
    roots: [Vertex; 3],
    nroots: usize,
    link: [u8; 3],
    cases: u64,
}

const AB: u8 = 1;
const AC: u8 = 2;
const BC: u8 = 4;

impl<'a> FailureContext<'a> {
    /// Bitmask of the [`Case`] labels visited while linking.
    pub fn cases(&self) -> u64 {
        self.cases
    }

    /// Failed tree numbers, ascending.
    pub fn failed(&self) -> &[Vertex] {
        &self.failed[..self.k]
    }

    #[inline]
    fn t(&self) -> &'a DfsTree {
        &self.o.views.base
    }

    #[inline]
    fn mutated(&self, m: Mutation) -> bool {
        self.o.mutation == Some(m)
    }

    #[inline]
    fn mark(&mut self, c: Case) {
        self.cases |= c.bit();
    }

    fn is_failed(&self, v: Vertex) -> bool {
        self.failed().contains(&v)
    }

    fn find(&self, i: usize) -> usize {
        let mut i = i;
        while self.link[i] as usize != i {
            i = self.link[i] as usize;
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.link[ra.max(rb)] = ra.min(rb) as u8;
        }
    }

    fn add_root(&mut self, r: Vertex) {
        if !self.roots[..self.nroots].contains(&r) {
            self.roots[self.nroots] = r;
            self.nroots += 1;
        }
    }

    fn root_index(&self, r: Vertex) -> Option<usize> {
        self.roots[..self.nroots].iter().position(|&x| x == r)
    }

    fn link_components(&mut self) {
        let t = self.t();
        self.add_root(1);
        let f = self.failed;
        let k = self.k;
        for i in 0..k {
            for j in i + 1..k {
                if t.is_ancestor(f[i], f[j]) {
                    self.add_root(t.child_toward(f[i], f[j]));
                }
            }
        }
        let anc = |a: usize, b: usize| t.is_ancestor(f[a], f[b]);
        match k {
            1 => self.mark(Case::Single),
            2 if !anc(0, 1) => self.mark(Case::Unrelated),
            2 => {
                self.mark(Case::Nested);
                let c = self.roots[1];
                if self.hanging_link(c, f[1]) {
                    self.union(0, 1);
                }
            }
            _ => {
                let (a01, a02, a12) = (anc(0, 1), anc(0, 2), anc(1, 2));
                match (a01, a02, a12) {
                    (false, false, false) => self.mark(Case::TripleFlat),
                    (true, true, true) => {
                        let links = self.chain(f[0], f[1], f[2]);
                        for (bit, a, b) in [(AB, 0, 1), (AC, 0, 2), (BC, 1, 2)] {
                            if links & bit != 0 {
                                self.union(a, b);
                            }
                        }
                    }
                    (true, true, false) => {
                        let (c, c2) = (t.child_toward(f[0], f[1]), t.child_toward(f[0], f[2]));
                        if c != c2 {
                            self.mark(Case::TripleForked);
                            if self.hanging_link(c, f[1]) {
                                self.union(0, 1);
                            }
                            if self.hanging_link(c2, f[2]) {
                                self.union(0, 2);
                            }
                        } else if self.same_child(c, f[0], f[1], f[2]) {
                            self.union(0, 1);
                        }
                    }
                    _ => {
                        self.mark(Case::TripleOnePair);
                        let (u, v) = if a01 {
                            (f[0], f[1])
                        } else if a02 {
                            (f[0], f[2])
                        } else {
                            (f[1], f[2])
                        };
                        let c = t.child_toward(u, v);
                        if self.hanging_link(c, v) {
                            self.union(0, 1);
                        }
                    }
                }
            }
        }
    }

    // ----- parameter shorthands -----

    #[inline]
    fn h1(&self, x: Vertex) -> Vertex {
        self.o.params.high1[x as usize]
    }
    #[inline]
    fn h2(&self, x: Vertex) -> Vertex {
        self.o.params.high2[x as usize]
    }
    #[inline]
    fn lo1(&self, x: Vertex) -> Vertex {
        self.o.params.low1[x as usize]
    }
    #[inline]
    fn l1(&self, x: Vertex) -> Vertex {
        self.o.params.l1[x as usize]
    }
    #[inline]
    fn l2(&self, x: Vertex) -> Vertex {
        self.o.params.l2[x as usize]
    }
    #[inline]
    fn mp(&self, x: Vertex) -> Vertex {
        self.o.mp[x as usize]
    }

    /// The child of `a` toward `x`, or NIL if `x` is not a proper descendant.
    fn toward(&mut self, a: Vertex, x: Vertex) -> Vertex {
        let t = self.t();
        if a != x && t.is_ancestor(a, x) {
            t.child_toward(a, x)
        } else {
            self.mark(Case::Fallback);
            NIL
        }
    }

    /// Whether `T(c) - T(v)` is joined to the part above `c`, for a failed
    /// proper ancestor `p(c)` of the failed vertex `v`.
    fn hanging_link(&mut self, c: Vertex, v: Vertex) -> bool {
        let t = self.t();
        let in_b = |x: Vertex| t.is_ancestor(c, x) && !t.is_ancestor(v, x);
        let (lp, rp) = self.o.tables.ext[HD].get(c);
        if lp == NIL {
            return false;
        }
        if in_b(lp) || in_b(rp) {
            return true;
        }
        if self.mutated(Mutation::NoChildHigh) {
            return false;
        }
        let d = self.toward(v, lp);
        d != NIL && in_b(self.h1(d))
    }

    /// `u` is the common parent side of `v` and `w` below the same child `c`.
    fn same_child(&mut self, c: Vertex, u: Vertex, v: Vertex, w: Vertex) -> bool {
        self.mark(Case::TripleSameChild);
        let t = self.t();
        let in_b = |x: Vertex| t.is_ancestor(c, x) && !t.is_ancestor(v, x) && !t.is_ancestor(w, x);
        let (lp, rp) = self.o.tables.ext[HD].get(c);
        if lp == NIL {
            return false;
        }
        if in_b(lp) || in_b(rp) {
            return true;
        }
        for z in [v, w] {
            if t.is_ancestor(z, lp) && t.is_ancestor(z, rp) {
                let d = self.toward(z, lp);
                return d != NIL && in_b(self.h1(d));
            }
        }
        self.mark(Case::TripleSameChildSplit);
        let m = self.mp(c);
        let third = self.o.tables.first3[m as usize][2];
        if !self.mutated(Mutation::NoThirdChild) && third != NIL && self.lo1(third) != NIL && self.lo1(third) < u {
            return true;
        }
        let tb = &self.o.tables;
        let d0 = tb.pair[0][c as usize];
        if d0 == NIL {
            self.mark(Case::Fallback);
            return false;
        }
        let p0 = tb.pair_points[0].get(c);
        let p1 = tb.pair_points[1].get(c);
        if [p0.0, p0.1, p1.0, p1.1].into_iter().any(in_b) {
            return true;
        }
        let (lv, lw) = if t.is_ancestor(d0, v) { (p0.0, p1.0) } else { (p1.0, p0.0) };
        let f1 = self.toward(v, lv);
        let f2 = self.toward(w, lw);
        (f1 != NIL && in_b(self.h1(f1))) || (f2 != NIL && in_b(self.h1(f2)))
    }

    /// Links among `A` (above `u`), `B = T(c) - T(v)` and `C = T(d) - T(w)`
    /// for failed `u`, `v`, `w` on one root path.
    fn chain(&mut self, u: Vertex, v: Vertex, w: Vertex) -> u8 {
        let t = self.t();
        let q = Chain { t, u, v, w, c: t.child_toward(u, v), d: t.child_toward(v, w) };
        let mpc = self.mp(q.c);
        if mpc == NIL {
            self.mark(Case::MpcNone);
            return if self.b_to_c(&q) { BC } else { 0 };
        }
        if q.in_b(mpc) {
            self.mark(Case::MpcB);
            return AB | if self.c_to_ab(&q) { AC } else { 0 };
        }
        if mpc == v {
            return self.mpc_is_v(&q);
        }
        if !t.is_ancestor(q.d, mpc) {
            // Every edge of B_p(c) comes from a hanging subtree of v other than T(d).
            self.mark(Case::MpcSibling);
            let s = self.toward(v, mpc);
            let ab = s != NIL && q.in_b(self.h1(s));
            let bc = self.b_to_c(&q);
            return if ab { AB } else { 0 } | if bc { BC } else { 0 };
        }
        if q.in_c(mpc) {
            return self.mpc_in_c(&q);
        }
        if mpc == w {
            return self.mpc_is_w(&q);
        }
        self.mpc_below(&q, mpc)
    }

    /// Whether `C` reaches `B` when no edge from `T(d)` lands in `A`.
    fn b_to_c(&mut self, q: &Chain) -> bool {
        let md = self.mp(q.d);
        if md == NIL {
            self.mark(Case::MpcNoneMpdNone);
            return false;
        }
        if md != q.w && q.t.is_ancestor(q.w, md) {
            self.mark(Case::MpcNoneMpdBelow);
            let d2 = self.toward(q.w, md);
            return q.in_c(self.h1(d2)) && (q.in_b(self.lo1(d2)) || q.in_b(self.o.params.low2[d2 as usize]));
        }
        if md == q.w {
            self.mark(Case::MpcNoneMpdW);
            return self.low_prefix(q.d).into_iter().any(|y| q.in_b(y));
        }
        self.mark(Case::MpcNoneMpdC);
        let (x, var) = self.extreme_in_c(q);
        if !self.mutated(Mutation::NoDirectEdge) && q.in_b(self.l1(x)) {
            return true;
        }
        self.skip_reaches_c(q, var)
    }

    /// Whether `C` reaches `A ∪ B`, already joined, when `Mp(c)` lies in `B`
    /// or the test for `Mp(c) = v` found them joined.
    fn c_to_ab(&mut self, q: &Chain) -> bool {
        let in_ab = |y: Vertex| y != NIL && y != q.u && !q.t.is_ancestor(q.v, y);
        let md = self.mp(q.d);
        if md == NIL {
            self.mark(Case::MpcBMpdNone);
            return false;
        }
        if md != q.w && q.t.is_ancestor(q.w, md) {
            self.mark(Case::MpcBMpdBelow);
            let d2 = self.toward(q.w, md);
            return q.in_c(self.h1(d2)) && (q.in_b(self.h1(q.d)) || q.in_a(self.lo1(d2)));
        }
        if md == q.w {
            self.mark(Case::MpcBMpdW);
            return self.low_prefix(q.d).into_iter().any(in_ab);
        }
        self.mark(Case::MpcBMpdC);
        let (x, var) = self.extreme_in_c(q);
        let y = self.l1(x);
        if in_ab(y) || (y == q.u && q.in_b(self.l2(x))) {
            return true;
        }
        self.skip_reaches_c(q, var)
    }

    /// Whether `C` reaches `A` when `B` is isolated and every edge of `B_p(d)`
    /// lands on `u` or above.
    fn c_to_a(&mut self, q: &Chain) -> bool {
        let md = self.mp(q.d);
        if md == NIL {
            return false;
        }
        if md != q.w && q.t.is_ancestor(q.w, md) {
            let d2 = self.toward(q.w, md);
            return q.in_c(self.h1(d2)) && q.in_a(self.lo1(d2));
        }
        if md == q.w {
            return q.in_a(self.low_prefix(q.d)[0]);
        }
        let (x, var) = self.extreme_in_c(q);
        if q.in_a(self.l1(x)) {
            return true;
        }
        self.skip_reaches_c(q, var)
    }

    fn low_prefix(&self, d: Vertex) -> [Vertex; 3] {
        let mut l = self.o.tables.low_prefix.get(d);
        if self.mutated(Mutation::NoLowTwo) {
            l[2] = NIL;
        }
        l
    }

    /// An extreme point of `d` on the high-decreasing view that lies in `C`.
    fn extreme_in_c(&mut self, q: &Chain) -> (Vertex, Variant) {
        let (lp, rp) = self.o.tables.ext[HD].get(q.d);
        if q.in_c(lp) {
            (lp, Variant::Lp)
        } else {
            if !q.in_c(rp) {
                self.mark(Case::Fallback);
            }
            (rp, Variant::Rp)
        }
    }

    /// With `x` the chosen extreme point in `C` and `l1(x)` not useful: do the
    /// remaining edges of `B_p(d)` reach `C`?
    fn skip_reaches_c(&mut self, q: &Chain, var: Variant) -> bool {
        let mut var = var as usize;
        if self.mutated(Mutation::SwappedSkip) {
            var = 1 - var;
        }
        let (l, r) = self.o.tables.skip[var].get(q.d);
        self.points_reach_c(q, l, r)
    }

    /// Given the extreme points of a set of edges from `T(d)`, all landing in
    /// one part: is some such edge from `C`?
    fn points_reach_c(&mut self, q: &Chain, l: Vertex, r: Vertex) -> bool {
        if l == NIL {
            return false;
        }
        if q.in_c(l) || q.in_c(r) {
            return true;
        }
        let d2 = self.toward(q.w, l);
        d2 != NIL && q.in_c(self.h1(d2))
    }

    /// Whether the child of `w` holding `x` has a back-edge into `A`.
    fn low_child_in_a(&mut self, q: &Chain, x: Vertex) -> bool {
        if x == NIL {
            return false;
        }
        let d2 = self.toward(q.w, x);
        d2 != NIL && q.in_a(self.lo1(d2))
    }

    /// High points of a hanging subtree of `w`, read as a link from `A`.
    fn high_side(&self, q: &Chain, d2: Vertex) -> u8 {
        let (h, h2) = (self.h1(d2), self.h2(d2));
        let second = !self.mutated(Mutation::NoHighTwo) && h == q.v && q.in_b(h2);
        if q.in_c(h) {
            AC
        } else if q.in_b(h) || second {
            AB
        } else {
            0
        }
    }

    fn mpc_is_v(&mut self, q: &Chain) -> u8 {
        self.mark(Case::MpcV);
        let tb = &self.o.tables;
        let (d1, d2) = (tb.low_best[0][q.c as usize], tb.low_best[1][q.c as usize]);
        let mut star = d1 != NIL && d1 != q.d && q.in_a(self.lo1(d1));
        if !self.mutated(Mutation::NoSecondBest) {
            star |= d2 != NIL && q.in_a(self.lo1(d2));
        }
        if star {
            self.mark(Case::MpcVJoined);
            return AB | if self.c_to_ab(q) { AC } else { 0 };
        }
        let (h, l) = (self.h1(q.d), self.lo1(q.d));
        if self.mp(q.d) == NIL {
            self.mark(Case::MpcVNoEdges);
            return 0;
        }
        if q.in_b(h) && !q.in_a(l) {
            self.mark(Case::MpcVHighB);
            return if self.b_to_c(q) { BC } else { 0 };
        }
        if q.in_b(h) {
            return self.mpc_is_v_span(q);
        }
        if h == q.u && l == q.u {
            self.mark(Case::MpcVAtU);
            return 0;
        }
        self.mark(Case::MpcVLowA);
        if self.c_to_a(q) {
            AC
        } else {
            0
        }
    }

    /// `Mp(c) = v` and `B_p(d)` has edges into both `A` and `B`.
    fn mpc_is_v_span(&mut self, q: &Chain) -> u8 {
        self.mark(Case::MpcVSpan);
        let c = q.c;
        let tb = &self.o.tables;
        if tb.single.child[c as usize] != q.d {
            self.mark(Case::Fallback);
            return 0;
        }
        let (sl, sr) = tb.single.segment[HD].get(c);
        let bc = self.points_reach_c(q, sl, sr);
        let mut links = if bc { BC } else { 0 };
        let tb = &self.o.tables;
        if bc {
            let (l, r) = tb.single.subtree[LI].get(c);
            if q.in_c(l) || q.in_c(r) {
                return links | AC;
            }
            let (dl, dr) = (self.toward(q.w, l), self.toward(q.w, r));
            if dl == dr {
                self.mark(Case::MpcVSpanSame);
                if dl != NIL {
                    links |= self.high_side(q, dl);
                }
            } else {
                self.mark(Case::MpcVSpanSplit);
                let mut hs = tb.high_meet.get(c);
                if self.mutated(Mutation::NoSecondHigh) {
                    hs[1] = NIL;
                }
                if hs.into_iter().any(|y| y != q.v && (q.in_b(y) || q.in_c(y))) {
                    links |= AB;
                }
            }
            return links;
        }
        self.mark(Case::MpcVSpanApart);
        let (l, r) = tb.single.subtree[HD].get(c);
        let ac = if q.in_c(l) || q.in_c(r) {
            true
        } else {
            let (dl, dr) = (self.toward(q.w, l), self.toward(q.w, r));
            if dl == dr {
                dl != NIL && q.in_c(self.h1(dl))
            } else {
                q.in_c(tb.high_meet.get(c)[0])
            }
        };
        if ac {
            links |= AC;
        }
        let (ll, _) = self.o.tables.single.segment[LI].get(c);
        if self.low_child_in_a(q, ll) {
            links |= AB;
        }
        links
    }

    /// `Mp(c)` lies strictly below `w`.
    fn mpc_below(&mut self, q: &Chain, mpc: Vertex) -> u8 {
        self.mark(Case::MpcBelow);
        let d2 = self.toward(q.w, mpc);
        let md = self.mp(q.d);
        if q.t.is_ancestor(d2, md) {
            self.mark(Case::MpcBelowMpdBelow);
            let mut links = 0;
            if q.in_c(self.h1(d2)) {
                links |= AC;
            }
            if q.in_b(self.h1(q.d)) {
                links |= AB;
            }
            return links;
        }
        if md == q.w {
            self.mark(Case::MpcBelowMpdW);
            let side = self.high_side(q, d2);
            if side != AC {
                let bc = self.low_prefix(q.d).into_iter().any(|y| q.in_b(y));
                return side | if bc { BC } else { 0 };
            }
            let mut excl = self.o.tables.low_prefix_excl.get(q.d);
            if self.mutated(Mutation::NoLowTwo) {
                excl[2] = NIL;
            }
            if excl.into_iter().any(|y| q.in_b(y)) {
                return AC | BC;
            }
            self.mark(Case::MpcBelowCount);
            let s = &self.o.tables.sums_mp;
            let i = q.d as usize;
            let (item2, item3) = (s.at_parent[i] as i128, s.spanning[i] as i128);
            let cnt = s.bp_low[i] as i128 - item2 + item3;
            let sum = s.sum_low[i] as i128 - item2 * q.v as i128 + item3 * q.u as i128;
            return AC | if self.counting(q, cnt, sum) { BC } else { 0 };
        }
        self.mark(Case::MpcBelowMpdC);
        let mut links = self.high_side(q, d2);
        if self.mpd_in_c_bc(q) {
            links |= BC;
        }
        links
    }

    /// The edges of `B_p(d) - B_p(c)` not yet accounted for by `cnt` and
    /// `sum`: do some of them land in `B`?
    fn counting(&self, q: &Chain, cnt: i128, sum: i128) -> bool {
        let p = &self.o.params;
        let (d, c) = (q.d as usize, q.c as usize);
        let n2 = p.bp[d] as i128 - p.bp[c] as i128 - cnt;
        let s2 = p.sum_y[d] as i128 - p.sum_y[c] as i128 - sum;
        if self.mutated(Mutation::NonStrictCount) {
            s2 >= n2 * q.u as i128 && n2 > 0
        } else {
            s2 > n2 * q.u as i128
        }
    }

    /// `Mp(d)` lies in `C` and `Mp(c)` in `T(d)`: does `C` reach `B`?
    fn mpd_in_c_bc(&mut self, q: &Chain) -> bool {
        let (x, var) = self.extreme_in_c(q);
        if q.in_b(self.l1(x)) {
            return true;
        }
        let fam = &self.o.tables.anchored[HD][var as usize];
        if fam.anchor[q.d as usize] != q.u {
            self.mark(Case::Fallback);
            return false;
        }
        let (l, r) = fam.points[HD].get(q.d);
        self.points_reach_c(q, l, r)
    }

    fn mpc_is_w(&mut self, q: &Chain) -> u8 {
        self.mark(Case::MpcW);
        let hs = self.o.tables.high_mp.get(q.c);
        let md = self.mp(q.d);
        let bc;
        let fallback_low;
        if md == q.w {
            self.mark(Case::MpcWMpdW);
            let (l, _) = self.chain_points(HD, q.c, q.d);
            bc = {
                let d2 = if l == NIL { NIL } else { self.toward(q.w, l) };
                d2 != NIL && q.in_c(self.h1(d2))
            };
            fallback_low = self.chain_points(LI, q.c, q.d).0;
        } else {
            self.mark(Case::MpcWMpdC);
            bc = self.mpd_in_c_bc(q);
            let (_, var) = self.extreme_in_c(q);
            let fam = &self.o.tables.anchored[HD][var as usize];
            fallback_low = if fam.anchor[q.d as usize] == q.u { fam.points[LI].get(q.d).0 } else { NIL };
        }
        let mut links = if bc { BC } else { 0 };
        if q.in_c(hs[0]) {
            links |= AC;
            if !bc && self.low_child_in_a(q, fallback_low) {
                links |= AB;
            }
        } else if hs.into_iter().any(|y| q.in_b(y)) {
            links |= AB;
        }
        links
    }

    fn chain_points(&self, view: usize, c: Vertex, d: Vertex) -> (Vertex, Vertex) {
        let v = if view == HD { &self.o.views.high_dec } else { &self.o.views.low_inc };
        self.o.tables.chain[view].query(v, c, d, self.mutated(Mutation::ChainNoFirst))
    }

    /// Resolve `B` from the extreme points of the edges from `T(d)` landing on
    /// `T[u', v)` side: high-decreasing points first, then the low-increasing
    /// leftmost point for a link to `A`.
    fn resolve_b(&mut self, q: &Chain, hd: (Vertex, Vertex), li_left: Vertex) -> u8 {
        if hd.0 == NIL {
            return 0;
        }
        if self.points_reach_c(q, hd.0, hd.1) {
            return BC;
        }
        if self.low_child_in_a(q, li_left) {
            AB
        } else {
            0
        }
    }

    fn mpc_in_c(&mut self, q: &Chain) -> u8 {
        self.mark(Case::MpcC);
        let mpc = self.mp(q.c);
        let md = self.mp(q.d);
        if md == mpc {
            self.mark(Case::MpcCSame);
            let hd = self.chain_points(HD, q.c, q.d);
            let li = self.chain_points(LI, q.c, q.d).0;
            return AC | self.resolve_b(q, hd, li);
        }
        let r = self.o.tables.ext[LI].right[q.d as usize];
        if self.l1(r) == q.u {
            self.mark(Case::MpcCRpAtU);
            let fam = &self.o.tables.anchored[LI][Variant::Rp as usize];
            if fam.anchor[q.d as usize] != q.u {
                self.mark(Case::Fallback);
                return AC;
            }
            let (hd, li) = (fam.points[HD].get(q.d), fam.points[LI].get(q.d).0);
            return AC | self.resolve_b(q, hd, li);
        }
        if !q.t.is_ancestor(q.w, r) {
            self.mark(Case::MpcCRpInC);
            return AC | BC;
        }
        let c2 = self.o.tables.first3[md as usize][1];
        if c2 != NIL && self.lo1(c2) == q.u {
            self.mark(Case::MpcCSecondAtU);
            let fam = &self.o.tables.second_child;
            if fam.anchor[q.d as usize] != q.u {
                self.mark(Case::Fallback);
                return AC;
            }
            let (hd, li) = (fam.points[HD].get(q.d), fam.points[LI].get(q.d).0);
            return AC | self.resolve_b(q, hd, li);
        }
        if c2 == NIL || !q.t.is_ancestor(c2, q.w) {
            self.mark(Case::MpcCSecondAside);
            return AC | BC;
        }
        let tb = &self.o.tables;
        if tb.second[q.d as usize] != c2 {
            self.mark(Case::Fallback);
            return AC;
        }
        let (l, r) = tb.second_points.get(q.d);
        if self.points_reach_c(q, l, r) {
            return AC | BC;
        }
        self.mark(Case::MpcCCount);
        let p = &self.o.params;
        let (dl, dr) = (self.toward(q.w, l), self.toward(q.w, r));
        let (cnt, sum) = if dl == dr {
            let e = dl as usize;
            if self.h1(dl) != q.v {
                (p.bp[e] as i128, p.sum_y[e] as i128)
            } else {
                let nh = p.num_high[e] as i128;
                (p.bp[e] as i128 - nh, p.sum_y[e] as i128 - nh * q.v as i128)
            }
        } else {
            let s = &self.o.tables.sums_second;
            let i = q.d as usize;
            let nh = s.at_parent[i] as i128;
            (s.bp_low[i] as i128 - nh, s.sum_low[i] as i128 - nh * q.v as i128)
        };
        AC | if self.counting(q, cnt, sum) { BC } else { 0 }
    }

    // ----- component lookup -----

    /// The component of a surviving input vertex.
    pub fn locate(&self, x: Vertex) -> Result<ComponentRef, OracleError> {
        self.o.check(x)?;
        let b = self.o.real_num[x as usize];
        if self.is_failed(b) {
            return Err(OracleError::Failed(x));
        }
        Ok(self.locate_num(b))
    }

    fn locate_num(&self, x: Vertex) -> ComponentRef {
        let t = self.t();
        let mut x = x;
        loop {
            let f = self.failed().iter().copied().filter(|&f| t.is_ancestor(f, x)).max_by_key(|&f| t.depth(f));
            let Some(f) = f else {
                return ComponentRef::Internal(self.find(0) as u8);
            };
            if f == x {
                // Only reachable under a mutation that walks onto a failed vertex.
                return ComponentRef::Isolated(x);
            }
            let c = t.child_toward(f, x);
            if let Some(i) = self.root_index(c) {
                return ComponentRef::Internal(self.find(i) as u8);
            }
            let p = &self.o.params;
            let lows = [p.low1[c as usize], p.low2[c as usize], p.low3[c as usize]];
            let next = if self.mutated(Mutation::FirstLowOnly) {
                Some(lows[0]).filter(|&y| y != NIL)
            } else {
                lows.into_iter().find(|&y| y != NIL && !self.is_failed(y))
            };
            match next {
                Some(y) => x = y,
                None => return ComponentRef::Isolated(c),
            }
        }
    }

    /// Whether the surviving input vertices `x` and `y` are connected.
    pub fn connected(&self, x: Vertex, y: Vertex) -> Result<bool, OracleError> {
        Ok(self.locate(x)? == self.locate(y)?)
    }

    /// Number of connected components of the surviving input vertices.
    pub fn count(&self) -> u32 {
        let t = self.t();
        let o = self.o;
        let mut sets = 0;
        for i in 0..self.nroots {
            if self.find(i) == i {
                sets += 1;
            }
        }
        // Internal roots with no surviving input vertex.
        for &r in &self.roots[..self.nroots] {
            let only = t.children(r);
            if only.len() == 1 && !o.kind[r as usize].is_real() && self.is_failed(only[0]) {
                sets -= 1;
            }
        }
        let mut isolated = 0u32;
        let failed = self.failed();
        for &f in failed {
            let above: Vec<Vertex> = failed.iter().copied().filter(|&g| g != f && t.is_ancestor(g, f)).collect();
            let splits = o.tables.sorted.splits(f);
            let key = |c: Vertex| {
                let p = &o.params;
                [p.low1[c as usize], p.low2[c as usize], p.low3[c as usize]].map(|y| if y == NIL { Vertex::MAX } else { y })
            };
            let subsets: &[&[usize]] = match above.len() {
                0 => &[&[]],
                1 => &[&[], &[0]],
                _ => &[&[], &[0], &[1], &[0, 1]],
            };
            let matches = |pattern: [Vertex; 3]| {
                let lo = splits.partition_point(|&c| key(c) < pattern);
                let hi = splits.partition_point(|&c| key(c) <= pattern);
                (hi - lo) as u32
            };
            let pattern_of = |s: &[usize]| {
                let mut p = [Vertex::MAX; 3];
                for (slot, &i) in p.iter_mut().zip(s) {
                    *slot = above[i];
                }
                p
            };
            for s in subsets {
                isolated += matches(pattern_of(s));
            }
            if self.mutated(Mutation::NoSubtract) {
                continue;
            }
            let mut seen = [NIL; 2];
            for &g in failed {
                if g == f || !t.is_ancestor(f, g) {
                    continue;
                }
                let c = t.child_toward(f, g);
                if seen.contains(&c) {
                    continue;
                }
                seen[usize::from(seen[0] != NIL)] = c;
                let k = key(c);
                if k.iter().all(|&y| y == Vertex::MAX || above.contains(&y)) {
                    isolated -= 1;
                }
            }
        }
        sets + isolated
    }
}

/// The three failed vertices of one root path and the roots of their components.
struct Chain<'t> {
    t: &'t DfsTree,
    u: Vertex,
    v: Vertex,
    w: Vertex,
    c: Vertex,
    d: Vertex,
}

impl Chain<'_> {
    #[inline]
    fn in_a(&self, x: Vertex) -> bool {
        x != NIL && !self.t.is_ancestor(self.u, x)
    }
    #[inline]
    fn in_b(&self, x: Vertex) -> bool {
        self.t.is_ancestor(self.c, x) && !self.t.is_ancestor(self.v, x)
    }
    #[inline]
    fn in_c(&self, x: Vertex) -> bool {
        self.t.is_ancestor(self.d, x) && !self.t.is_ancestor(self.w, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: u32) -> Graph {
        Graph::new(n as usize, (1..=n).map(|i| (i, i % n + 1))).unwrap()
    }

    fn clique(n: u32) -> Graph {
        Graph::new(n as usize, (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b)))).unwrap()
    }

    #[test]
    fn cycle_two_failures() {
        let o = Oracle::new(&cycle(6));
        assert_eq!(o.count_components(&[2, 5]), Ok(2));
        assert_eq!(o.connected(&[2, 5], 3, 4), Ok(true));
        assert_eq!(o.connected(&[2, 5], 1, 3), Ok(false));
        assert_eq!(o.connected(&[2, 5], 1, 6), Ok(true));
    }

    #[test]
    fn cycle_three_failures() {
        let o = Oracle::new(&cycle(6));
        assert_eq!(o.count_components(&[2, 4, 6]), Ok(3));
        assert_eq!(o.count_components(&[1, 2, 3]), Ok(1));
        assert_eq!(o.count_components(&[1, 3, 5]), Ok(3));
    }

    #[test]
    fn clique_never_splits() {
        let o = Oracle::new(&clique(4));
        assert_eq!(o.count_components(&[2, 3, 4]), Ok(1));
        let o = Oracle::new(&clique(6));
        for f in [[1, 2, 3], [4, 5, 6], [1, 3, 6]] {
            assert_eq!(o.is_cut(&f), Ok(false));
        }
    }

    #[test]
    fn path_and_star() {
        let path = Graph::new(5, (1..5).map(|i| (i, i + 1))).unwrap();
        let o = Oracle::new(&path);
        assert_eq!(o.count_components(&[3]), Ok(2));
        assert_eq!(o.count_components(&[1]), Ok(1));
        assert_eq!(o.count_components(&[2, 4]), Ok(3));
        assert_eq!(o.connected(&[3], 4, 5), Ok(true));
        let star = Graph::new(5, (2..=5).map(|i| (1, i))).unwrap();
        let o = Oracle::new(&star);
        assert_eq!(o.count_components(&[1]), Ok(4));
        assert_eq!(o.count_components(&[1, 2, 3]), Ok(2));
        assert_eq!(o.is_cut(&[2, 3, 4]), Ok(false));
    }

    #[test]
    fn chord_joins_arcs() {
        let g = Graph::new(7, (1..=7).map(|i| (i, i % 7 + 1)).chain([(5, 1)])).unwrap();
        let o = Oracle::new(&g);
        assert_eq!(o.count_components(&[3, 6]), Ok(1));
        assert_eq!(o.connected(&[3, 6], 4, 7), Ok(true));
        assert_eq!(o.connected(&[1, 5], 2, 7), Ok(false));
        assert_eq!(o.count_components(&[1, 5]), Ok(2));
    }

    #[test]
    fn rejects_bad_failure_sets() {
        let o = Oracle::new(&cycle(6));
        assert_eq!(o.count_components(&[]), Err(OracleError::NoFailures));
        assert_eq!(o.count_components(&[1, 2, 3, 4]), Err(OracleError::TooManyFailures(4)));
        assert_eq!(o.count_components(&[2, 2]), Err(OracleError::Duplicate(2)));
        assert_eq!(o.count_components(&[7]), Err(OracleError::OutOfRange(7)));
        assert_eq!(o.count_components(&[0]), Err(OracleError::OutOfRange(0)));
        assert_eq!(o.connected(&[2], 2, 3), Err(OracleError::Failed(2)));
    }

    #[test]
    fn failure_order_is_irrelevant() {
        let o = Oracle::new(&cycle(7));
        let a = o.resolve(&[6, 2, 4]).unwrap();
        let b = o.resolve(&[2, 4, 6]).unwrap();
        assert_eq!(a.count(), b.count());
        for x in [1, 3, 5, 7] {
            assert_eq!(a.locate(x), b.locate(x));
        }
    }

    #[test]
    fn case_masks_round_trip() {
        for c in Case::ALL {
            assert_eq!(Case::decode(c.bit()), vec![c]);
        }
    }
}
