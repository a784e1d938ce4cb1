//! Level-ancestor, nearest-common-ancestor and range-minimum structures.

use crate::graph::{DfsTree, Vertex, NIL};

const BLOCK: usize = 32;

/// Range-minimum (or range-maximum) over a fixed `u32` array.
///
/// Blocks of 32 entries are scanned directly; whole blocks are covered by a
/// sparse table of block winners. Ties break to the smallest index.
#[derive(Clone, Debug)]
pub struct RmqIndex {
    keys: Vec<u32>,
    table: Vec<Vec<u32>>,
}

impl RmqIndex {
    /// Minimum queries over `values`.
    pub fn min(values: &[u32]) -> Self {
        RmqIndex::from_keys(values.to_vec())
    }

    /// Maximum queries over `values`.
    pub fn max(values: &[u32]) -> Self {
        RmqIndex::from_keys(values.iter().map(|&v| !v).collect())
    }

    fn from_keys(keys: Vec<u32>) -> Self {
        let blocks = keys.len().div_ceil(BLOCK);
        let mut level: Vec<u32> = (0..blocks)
            .map(|b| {
                let s = b * BLOCK;
                let e = (s + BLOCK).min(keys.len());
                scan(&keys, s, e - 1) as u32
            })
            .collect();
        let mut table = Vec::new();
        let mut width = 1;
        while 2 * width <= blocks {
            let next: Vec<u32> = (0..blocks + 1 - 2 * width).map(|i| better(&keys, level[i], level[i + width])).collect();
            table.push(std::mem::replace(&mut level, next));
            width *= 2;
        }
        table.push(level);
        RmqIndex { keys, table }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Index of the extreme value in `i..=j`.
    pub fn query(&self, i: usize, j: usize) -> usize {
        assert!(i <= j && j < self.keys.len(), "bad range {i}..={j}");
        let (bi, bj) = (i / BLOCK, j / BLOCK);
        if bi == bj || bi + 1 == bj {
            return scan(&self.keys, i, j);
        }
        let mut best = scan(&self.keys, i, bi * BLOCK + BLOCK - 1) as u32;
        let (lo, hi) = (bi + 1, bj - 1);
        let k = (usize::BITS - 1 - (hi - lo + 1).leading_zeros()) as usize;
        let row = &self.table[k];
        best = better(&self.keys, best, row[lo]);
        best = better(&self.keys, best, row[hi + 1 - (1 << k)]);
        best = better(&self.keys, best, scan(&self.keys, bj * BLOCK, j) as u32);
        best as usize
    }

    /// Machine words held.
    pub fn words(&self) -> usize {
        self.keys.len() + self.table.iter().map(Vec::len).sum::<usize>()
    }
}

#[inline]
fn better(keys: &[u32], a: u32, b: u32) -> u32 {
    let (ka, kb) = (keys[a as usize], keys[b as usize]);
    if kb < ka || (kb == ka && b < a) {
        b
    } else {
        a
    }
}

#[inline]
fn scan(keys: &[u32], i: usize, j: usize) -> usize {
    let mut best = i;
    for t in i + 1..=j {
        if keys[t] < keys[best] {
            best = t;
        }
    }
    best
}

/// Level ancestors by binary search in per-depth vertex lists.
#[derive(Clone, Debug)]
pub struct LevelAncestorIndex {
    off: Vec<u32>,
    verts: Vec<Vertex>,
}

impl LevelAncestorIndex {
    pub fn new(t: &DfsTree) -> Self {
        let n = t.n();
        let max_depth = (1..=n as Vertex).map(|v| t.depth(v)).max().unwrap_or(0) as usize;
        let mut off = vec![0u32; max_depth + 2];
        for v in 1..=n as Vertex {
            off[t.depth(v) as usize + 1] += 1;
        }
        for i in 1..off.len() {
            off[i] += off[i - 1];
        }
        let mut fill = off.clone();
        let mut verts = vec![NIL; n];
        for v in 1..=n as Vertex {
            let d = t.depth(v) as usize;
            verts[fill[d] as usize] = v;
            fill[d] += 1;
        }
        LevelAncestorIndex { off, verts }
    }

    /// The ancestor of `v` at depth `d`, for `d <= depth(v)`.
    #[inline]
    pub fn query(&self, v: Vertex, d: u32) -> Vertex {
        let (s, e) = (self.off[d as usize] as usize, self.off[d as usize + 1] as usize);
        let row = &self.verts[s..e];
        row[row.partition_point(|&x| x <= v) - 1]
    }

    pub fn words(&self) -> usize {
        self.off.len() + self.verts.len()
    }
}

/// Nearest common ancestors from a depth RMQ over the preorder.
#[derive(Clone, Debug)]
pub struct NcaIndex {
    rmq: RmqIndex,
}

impl NcaIndex {
    pub fn new(t: &DfsTree) -> Self {
        let depths: Vec<u32> = (0..=t.n() as Vertex).map(|v| if v == NIL { u32::MAX } else { t.depth(v) }).collect();
        NcaIndex { rmq: RmqIndex::min(&depths) }
    }

    /// Nearest common ancestor of `a` and `b`.
    #[inline]
    pub fn query(&self, t: &DfsTree, a: Vertex, b: Vertex) -> Vertex {
        let (a, b) = (a.min(b), a.max(b));
        if t.is_ancestor(a, b) {
            return a;
        }
        t.parent(self.rmq.query(a as usize + 1, b as usize) as Vertex)
    }

    pub fn words(&self) -> usize {
        self.rmq.words()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> DfsTree {
        let mut children = vec![Vec::new(); n];
        for v in 1..n {
            children[rng.gen_range(0..v)].push(v);
        }
        DfsTree::from_rooted(0, &children, &[]).0
    }

    fn naive_la(t: &DfsTree, mut v: Vertex, d: u32) -> Vertex {
        while t.depth(v) > d {
            v = t.parent(v);
        }
        v
    }

    fn naive_nca(t: &DfsTree, mut a: Vertex, mut b: Vertex) -> Vertex {
        while a != b {
            if t.depth(a) >= t.depth(b) {
                a = t.parent(a);
            } else {
                b = t.parent(b);
            }
        }
        a
    }

    fn path(n: usize) -> DfsTree {
        let children: Vec<Vec<usize>> = (0..n).map(|i| if i + 1 < n { vec![i + 1] } else { vec![] }).collect();
        DfsTree::from_rooted(0, &children, &[]).0
    }

    #[test]
    fn small_cases() {
        let t = path(4);
        let nca = NcaIndex::new(&t);
        assert_eq!(nca.query(&t, 3, 4), 3);
        assert_eq!(nca.query(&t, 2, 2), 2);
        let la = LevelAncestorIndex::new(&t);
        assert_eq!(la.query(4, 1), 2);
        assert_eq!(t.child_toward(1, 4), 2);
        assert_eq!(t.child_toward(3, 4), 4);
    }

    #[test]
    fn trees_match_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rng.gen_range(1..500);
            let t = random_tree(&mut rng, n);
            let la = LevelAncestorIndex::new(&t);
            let nca = NcaIndex::new(&t);
            for _ in 0..300 {
                let a = rng.gen_range(1..=n as Vertex);
                let b = rng.gen_range(1..=n as Vertex);
                assert_eq!(nca.query(&t, a, b), naive_nca(&t, a, b));
                let d = rng.gen_range(0..=t.depth(a));
                assert_eq!(la.query(a, d), naive_la(&t, a, d));
                if a != b && t.is_ancestor(a, b) {
                    assert_eq!(t.child_toward(a, b), naive_la(&t, b, t.depth(a) + 1));
                }
            }
        }
    }

    #[test]
    fn rmq_matches_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let n = rng.gen_range(1..500);
            let vals: Vec<u32> = (0..n).map(|_| rng.gen_range(0..20)).collect();
            let (mn, mx) = (RmqIndex::min(&vals), RmqIndex::max(&vals));
            for _ in 0..300 {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(i..n);
                let lo = (i..=j).min_by_key(|&k| (vals[k], k)).unwrap();
                let hi = (i..=j).min_by_key(|&k| (!vals[k], k)).unwrap();
                assert_eq!(mn.query(i, j), lo);
                assert_eq!(mx.query(i, j), hi);
            }
        }
    }
}
