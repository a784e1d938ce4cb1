//! Disjoint-set union with a representative payload on each set root.
//!
//! The offline tree algorithms keep sets that are connected subtrees and need
//! `find` to report the topmost vertex of the subtree, which is not the
//! union-by-rank root in general. Each root therefore carries a representative
//! that callers overwrite after every `unite`.

/// Union by rank with path compression over `0..n`.
#[derive(Clone, Debug)]
pub struct Dsu {
    parent: Vec<u32>,
    rank: Vec<u8>,
    rep: Vec<u32>,
    ops: u64,
}

impl Dsu {
    /// Singletons `{i}` with representative `i`.
    pub fn new(n: usize) -> Self {
        Dsu { parent: (0..n as u32).collect(), rank: vec![0; n], rep: (0..n as u32).collect(), ops: 0 }
    }

    /// Root of the set containing `x`.
    pub fn find(&mut self, x: u32) -> u32 {
        self.ops += 1;
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    /// Representative of the set containing `x`.
    pub fn rep(&mut self, x: u32) -> u32 {
        let r = self.find(x);
        self.rep[r as usize]
    }

    /// Overwrite the representative of the set containing `x`.
    pub fn set_rep(&mut self, x: u32, value: u32) {
        let r = self.find(x);
        self.rep[r as usize] = value;
    }

    /// Merge the sets of `a` and `b`; the merged set keeps the representative of `b`.
    pub fn unite(&mut self, a: u32, b: u32) -> u32 {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return ra;
        }
        let keep = self.rep[rb as usize];
        let root = match self.rank[ra as usize].cmp(&self.rank[rb as usize]) {
            std::cmp::Ordering::Less => {
                self.parent[ra as usize] = rb;
                rb
            }
            std::cmp::Ordering::Greater => {
                self.parent[rb as usize] = ra;
                ra
            }
            std::cmp::Ordering::Equal => {
                self.parent[rb as usize] = ra;
                self.rank[ra as usize] += 1;
                ra
            }
        };
        self.rep[root as usize] = keep;
        root
    }

    /// Number of `find` calls so far, including those made by `unite` and `rep`.
    pub fn op_count(&self) -> u64 {
        self.ops
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unite_keeps_second_representative() {
        let mut d = Dsu::new(5);
        d.unite(1, 2);
        assert_eq!(d.rep(1), 2);
        d.set_rep(2, 4);
        assert_eq!(d.rep(1), 4);
        d.unite(3, 1);
        assert_eq!(d.rep(3), 4);
        assert_eq!(d.find(1), d.find(3));
        assert_ne!(d.find(0), d.find(1));
    }

    #[test]
    fn matches_naive_partition() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 60;
        let mut d = Dsu::new(n);
        let mut label: Vec<usize> = (0..n).collect();
        for _ in 0..200 {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            d.unite(a as u32, b as u32);
            let (la, lb) = (label[a], label[b]);
            for l in label.iter_mut() {
                if *l == la {
                    *l = lb;
                }
            }
            for x in 0..n {
                for y in 0..n {
                    assert_eq!(label[x] == label[y], d.find(x as u32) == d.find(y as u32));
                }
            }
        }
    }
}
