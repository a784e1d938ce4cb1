//! Properties of the query engine on random graphs.

use ftconn::verify::{brute_components, generate, Family};
use ftconn::{Graph, Oracle, Vertex};
use proptest::prelude::*;

fn graph() -> impl Strategy<Value = Graph> {
    (0..Family::ALL.len(), 3usize..14, any::<u64>()).prop_map(|(f, n, seed)| generate(Family::ALL[f], n, seed))
}

fn failure_set(n: usize) -> impl Strategy<Value = Vec<Vertex>> {
    proptest::sample::subsequence((1..=n as Vertex).collect::<Vec<_>>(), 1..=3.min(n - 1))
}

fn with_failures() -> impl Strategy<Value = (Graph, Vec<Vertex>)> {
    graph().prop_flat_map(|g| {
        let n = g.n();
        (Just(g), failure_set(n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn agrees_with_bfs((g, f) in with_failures()) {
        let o = Oracle::new(&g);
        let (label, count) = brute_components(&g, &f);
        let ctx = o.resolve(&f).unwrap();
        prop_assert_eq!(ctx.count(), count);
        prop_assert_eq!(o.is_cut(&f).unwrap(), count > 1);
        for x in 1..=g.n() as Vertex {
            for y in x + 1..=g.n() as Vertex {
                if label[x as usize] != 0 && label[y as usize] != 0 {
                    prop_assert_eq!(ctx.connected(x, y).unwrap(), label[x as usize] == label[y as usize]);
                }
            }
        }
    }

    #[test]
    fn queries_are_stateless((g, f) in with_failures(), other in proptest::collection::vec(1u32..=3, 1..4)) {
        let o = Oracle::new(&g);
        let survivors: Vec<Vertex> = (1..=g.n() as Vertex).filter(|v| !f.contains(v)).collect();
        let answer = |o: &Oracle| {
            let ctx = o.resolve(&f).unwrap();
            let pairs: Vec<bool> = survivors.windows(2).map(|w| ctx.connected(w[0], w[1]).unwrap()).collect();
            (ctx.count(), pairs)
        };
        let first = answer(&o);
        // Interleave other failure sets between identical queries.
        let mut alt: Vec<Vertex> = other.into_iter().filter(|&v| (v as usize) <= g.n()).collect();
        alt.sort_unstable();
        alt.dedup();
        if !alt.is_empty() {
            let _ = o.count_components(&alt).unwrap();
        }
        prop_assert_eq!(answer(&o), first.clone());
        let copy = o.clone();
        prop_assert_eq!(answer(&copy), first);
    }

    #[test]
    fn three_low_points_survive_two_failures(g in graph()) {
        let o = Oracle::new(&g);
        let t = o.tree();
        let p = o.params();
        for c in 2..=t.n() as Vertex {
            let lows = [p.low1[c as usize], p.low2[c as usize], p.low3[c as usize]];
            if lows[2] == 0 {
                continue;
            }
            prop_assert!(lows[0] < lows[1] && lows[1] < lows[2]);
            let pc = t.parent(c);
            let ancestors: Vec<Vertex> = (1..pc).filter(|&a| t.is_ancestor(a, pc)).collect();
            for (i, &a) in ancestors.iter().enumerate() {
                for &b in &ancestors[i..] {
                    prop_assert!(lows.iter().any(|&y| y != a && y != b && t.is_ancestor(y, pc)));
                }
            }
        }
    }
}
