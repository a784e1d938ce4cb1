//! Scalar parameters, extreme points and batch solvers against brute force.

use ftconn::batch::{segment_points, skip_points, subtree_extremes, SegmentQuery, Side};
use ftconn::graph::{run_dfs, split_transform, DfsTree, Vertex, NIL};
use ftconn::params::{high_naive, max_points, next_mp, Extremes, ScalarParams};
use ftconn::tree::NcaIndex;
use ftconn::verify::{brute_params, brute_segment, brute_skip, brute_subtree_extreme, generate, raw_dfs, Family};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn trees(family: Family, n: usize, seed: u64) -> Vec<DfsTree> {
    let g = generate(family, n, seed);
    let (raw, _) = raw_dfs(&g);
    let split = run_dfs(&split_transform(&g)).tree;
    vec![raw, split]
}

fn check_params(t: &DfsTree) {
    let p = ScalarParams::compute(t);
    let b = brute_params(t);
    let n = t.n();
    for v in 1..=n {
        assert_eq!((p.l1[v], p.l2[v]), (b.l1[v], b.l2[v]), "l at {v}");
        assert_eq!([p.low1[v], p.low2[v], p.low3[v]], b.low[v], "low at {v}");
        assert_eq!([p.high1[v], p.high2[v]], b.high[v], "high at {v}");
        assert_eq!((p.bp[v], p.sum_y[v]), (b.bp[v], b.sum_y[v]), "bp at {v}");
        assert_eq!((p.num_low[v], p.num_high[v]), (b.num_low[v], b.num_high[v]), "num at {v}");
    }
    let (h1, h2) = high_naive(t);
    assert_eq!((h1, h2), (p.high1.clone(), p.high2.clone()));
    let ext = Extremes::compute(t);
    let mp = max_points(t, &NcaIndex::new(t), &ext);
    assert_eq!(ext.lp, b.lp);
    assert_eq!(ext.rp, b.rp);
    assert_eq!(mp, b.mp);
    assert_eq!(next_mp(&mp), b.next_mp);
}

#[test]
fn params_match_definitions() {
    for (i, f) in Family::ALL.into_iter().cycle().take(140).enumerate() {
        let n = 4 + i % 11;
        for t in trees(f, n, i as u64) {
            check_params(&t);
        }
    }
}

#[test]
fn batch_solvers_match_scans() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let mut total = 0;
    for (i, f) in Family::ALL.into_iter().cycle().take(140).enumerate() {
        for t in trees(f, 4 + i % 11, 1000 + i as u64) {
            let n = t.n() as Vertex;
            let p = ScalarParams::compute(&t);
            let z: Vec<Vertex> = (0..=n).map(|v| if v > 0 && rng.gen_bool(0.7) { rng.gen_range(0..=n) } else { NIL }).collect();
            let left = skip_points(&t, &z, Side::Left);
            let right = skip_points(&t, &z, Side::Right);
            for v in 1..=n {
                let zv = if z[v as usize] == NIL { NIL } else { z[v as usize] };
                assert_eq!((left[v as usize], right[v as usize]), brute_skip(&t, v, zv));
                total += 2;
            }
            let qs: Vec<(Vertex, Vertex)> = (0..3 * n)
                .map(|_| {
                    let d = rng.gen_range(1..=n);
                    let mut v = d;
                    while v != 1 && rng.gen_bool(0.5) {
                        v = t.parent(v);
                    }
                    (v, d)
                })
                .collect();
            let l = subtree_extremes(&t, &p.l1, &qs, Side::Left).unwrap();
            let r = subtree_extremes(&t, &p.l1, &qs, Side::Right).unwrap();
            for (k, &(v, d)) in qs.iter().enumerate() {
                assert_eq!((l[k], r[k]), brute_subtree_extreme(&t, v, d));
                total += 2;
            }
            // Single segment queries are trivially nested.
            for _ in 0..n {
                let z = rng.gen_range(1..=n);
                let mut u = z;
                while u != 1 && rng.gen_bool(0.5) {
                    u = t.parent(u);
                }
                let mut v = u;
                while v != 1 && rng.gen_bool(0.5) {
                    v = t.parent(v);
                }
                let got = segment_points(&t, &[SegmentQuery::new(z, u, v)]).unwrap()[0];
                assert_eq!(got, brute_segment(&t, z, u, v));
                total += 2;
            }
        }
    }
    assert!(total >= 10_000, "only {total} queries");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn params_invariants(seed in 0u64..1_000_000, n in 4usize..40, fi in 0usize..7) {
        for t in trees(Family::ALL[fi], n, seed) {
            let p = ScalarParams::compute(&t);
            for v in 1..=t.n() {
                let defined = p.bp[v] > 0;
                prop_assert_eq!(defined, p.low1[v] != NIL);
                prop_assert_eq!(defined, p.high1[v] != NIL);
                if p.low2[v] != NIL { prop_assert!(p.low1[v] < p.low2[v]); }
                if p.low3[v] != NIL { prop_assert!(p.low2[v] < p.low3[v]); }
                if p.high2[v] != NIL { prop_assert!(p.high1[v] > p.high2[v]); }
                if defined {
                    prop_assert!(p.low1[v] <= p.high1[v]);
                    prop_assert!(p.num_low[v] >= 1 && p.num_high[v] >= 1);
                    if p.low1[v] == p.high1[v] {
                        prop_assert!(p.num_low[v] == p.bp[v] && p.num_high[v] == p.bp[v]);
                    } else {
                        prop_assert!(p.num_low[v] + p.num_high[v] <= p.bp[v]);
                    }
                    prop_assert!(p.sum_y[v] >= p.bp[v] as u64 * p.low1[v] as u64);
                }
            }
        }
    }
}
