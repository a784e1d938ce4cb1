//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::Instant;

use ftconn::batch::{segment_points, skip_points, subtree_extremes, validate_nested, SegmentQuery, Side};
use ftconn::graph::{run_dfs, split_transform, DfsTree, Vertex, NIL};
use ftconn::params::ScalarParams;
use ftconn::verify::{
    all_failure_sets, audit_params, audit_tables, brute_components, brute_segment, brute_skip, brute_subtree_extreme, corpus,
    gen_adversarial, generate, random_sparse, raw_dfs, run_corpus, sample_failure_sets, DiffConfig, Family,
};
use ftconn::{Case, Graph, Mutation, Oracle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Corpus sizes.
const SMALL_SIZES: [usize; 7] = [4, 6, 8, 10, 12, 14, 16];
const SMALL_SEEDS: u64 = 5;
const ADVERSARIAL: u64 = 3000;
const LARGE_SIZES: [usize; 4] = [250, 500, 1000, 2000];
const LARGE_SEEDS: u64 = 2;
const MAX_LARGE_N: usize = 2000;
const LARGE_SAMPLES: usize = 500;
const MIN_SMALL_GRAPHS: usize = 200;
const MIN_LARGE_GRAPHS: usize = 50;
const MIN_AUDIT_GRAPHS: usize = 100;
const MIN_BATCH_QUERIES: u64 = 10_000;
const MIN_MUTATIONS: usize = 10;

// Scaling tolerances.
const SCALE_SIZES: [usize; 3] = [100_000, 200_000, 400_000];
const SCALE_BASE: usize = 1_000;
const EDGES_PER_VERTEX: usize = 3;
const MAX_BUILD_GROWTH: f64 = 2.8;
const MAX_LATENCY_RATIO: f64 = 3.0;
const WORDS_SPREAD: f64 = 0.20;
const BUILD_RUNS: usize = 3;
const LATENCY_BATCHES: usize = 301;
const LATENCY_BATCH: usize = 200;

struct Line {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

impl Line {
    fn print(&self) {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {}. {}: {}", self.id, self.name, self.detail);
    }
}

#[derive(Default)]
struct Agreement {
    graphs: usize,
    sets: u64,
    pairs: u64,
    connected: u64,
    counts: u64,
    cuts: u64,
}

impl Agreement {
    /// Compare connectivity of every surviving pair, the component count and
    /// the cut answer for one failure set.
    fn check(&mut self, o: &Oracle, g: &Graph, f: &[Vertex]) {
        let ctx = o.resolve(f).expect("valid failure set");
        let (label, count) = brute_components(g, f);
        self.sets += 1;
        let alive: Vec<(Vertex, u32, ftconn::ComponentRef)> = (1..=g.n() as Vertex)
            .filter(|&x| label[x as usize] != 0)
            .map(|x| (x, label[x as usize], ctx.locate(x).expect("surviving vertex")))
            .collect();
        if g.n() <= 16 {
            for (i, a) in alive.iter().enumerate() {
                for b in &alive[i + 1..] {
                    self.pairs += 1;
                    if (a.1 == b.1) != (a.2 == b.2) {
                        self.connected += 1;
                    }
                }
            }
        } else {
            // Partitions agree iff each label class maps to one answer class and back.
            let mut by_label = std::collections::HashMap::new();
            let mut by_ref = std::collections::HashMap::new();
            for &(_, l, r) in &alive {
                self.pairs += 1;
                let a = *by_label.entry(l).or_insert(r);
                let b = *by_ref.entry(r).or_insert(l);
                if a != r || b != l {
                    self.connected += 1;
                }
            }
        }
        if ctx.count() != count {
            self.counts += 1;
        }
        if o.is_cut(f).expect("valid failure set") != (count > 1) {
            self.cuts += 1;
        }
    }
}

fn differential(small: &[Graph], large: &[Graph]) -> (Agreement, Agreement) {
    let mut s = Agreement::default();
    for g in small {
        let o = Oracle::new(g);
        s.graphs += 1;
        for f in all_failure_sets(g.n()) {
            s.check(&o, g, &f);
        }
    }
    let mut l = Agreement::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a);
    for g in large {
        let o = Oracle::new(g);
        l.graphs += 1;
        for f in sample_failure_sets(g, LARGE_SAMPLES, &mut rng) {
            l.check(&o, g, &f);
        }
    }
    (s, l)
}

fn criterion_audit() -> Line {
    let graphs = corpus(&[4, 6, 8, 10, 12, 14], 3, 0);
    let (mut checked, mut bad) = (0u64, Vec::new());
    for g in &graphs {
        let o = Oracle::new(g);
        let (raw, _) = raw_dfs(g);
        for r in [audit_params(o.tree()), audit_params(&raw), audit_tables(&o)] {
            match r {
                Ok(k) => checked += k,
                Err(e) => bad.extend(e),
            }
        }
    }
    Line {
        id: 3,
        name: "parameter and table oracles",
        pass: graphs.len() >= MIN_AUDIT_GRAPHS && bad.is_empty(),
        detail: format!("{} graphs, {checked} entries, {} mismatches {:?}", graphs.len(), bad.len(), bad.first()),
    }
}

fn trees(g: &Graph) -> [DfsTree; 2] {
    [raw_dfs(g).0, run_dfs(&split_transform(g)).tree]
}

fn climb(t: &DfsTree, mut v: Vertex, rng: &mut ChaCha8Rng) -> Vertex {
    while v != 1 && rng.gen_bool(0.5) {
        v = t.parent(v);
    }
    v
}

/// A random nested batch: candidates are kept while the batch stays nested.
fn nested_batch(t: &DfsTree, rng: &mut ChaCha8Rng, tries: usize) -> Vec<SegmentQuery> {
    let n = t.n() as Vertex;
    let mut batch: Vec<SegmentQuery> = Vec::new();
    for _ in 0..tries {
        let z = rng.gen_range(1..=n);
        let u = climb(t, z, rng);
        let v = climb(t, u, rng);
        batch.push(SegmentQuery::new(z, u, v));
        if validate_nested(t, &batch).is_err() {
            batch.pop();
        }
    }
    batch
}

fn criterion_batches() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut queries, mut bad) = (0u64, 0u64);
    for g in corpus(&[6, 10, 14], 4, 0) {
        for t in trees(&g) {
            let n = t.n() as Vertex;
            let z: Vec<Vertex> = (0..=n).map(|v| if v > 0 && rng.gen_bool(0.7) { rng.gen_range(0..=n) } else { NIL }).collect();
            let (l, r) = (skip_points(&t, &z, Side::Left), skip_points(&t, &z, Side::Right));
            for v in 1..=n {
                queries += 1;
                bad += u64::from((l[v as usize], r[v as usize]) != brute_skip(&t, v, z[v as usize]));
            }
            let l1 = ScalarParams::compute(&t).l1;
            let qs: Vec<(Vertex, Vertex)> = (0..2 * n)
                .map(|_| {
                    let d = rng.gen_range(1..=n);
                    (climb(&t, d, &mut rng), d)
                })
                .collect();
            let l = subtree_extremes(&t, &l1, &qs, Side::Left).expect("valid batch");
            let r = subtree_extremes(&t, &l1, &qs, Side::Right).expect("valid batch");
            for (k, &(v, d)) in qs.iter().enumerate() {
                queries += 1;
                bad += u64::from((l[k], r[k]) != brute_subtree_extreme(&t, v, d));
            }
            let batch = nested_batch(&t, &mut rng, 2 * n as usize);
            let got = segment_points(&t, &batch).expect("nested batch");
            for (q, &ans) in batch.iter().zip(&got) {
                queries += 1;
                bad += u64::from(ans != brute_segment(&t, q.z, q.u, q.v));
            }
        }
    }
    Line {
        id: 4,
        name: "batch solvers",
        pass: queries >= MIN_BATCH_QUERIES && bad == 0,
        detail: format!("{queries} queries, {bad} mismatches"),
    }
}

fn criterion_coverage() -> Line {
    let graphs: Vec<Graph> = (0..ADVERSARIAL).map(gen_adversarial).collect();
    let cfg = DiffConfig { exhaustive_up_to: 16, samples: 0, max_mismatches: 1 };
    let r = run_corpus(&graphs, &cfg, None);
    let missing = r.missing_cases();
    let rarest = Case::ALL.into_iter().filter(|&c| c != Case::Fallback).min_by_key(|&c| r.case_hits(c)).expect("cases");
    Line {
        id: 5,
        name: "case coverage",
        pass: missing.is_empty() && r.passed() && r.case_hits(Case::MpcBelowCount) > 0 && r.case_hits(Case::MpcCCount) > 0,
        detail: format!(
            "{} labels over {} adversarial graphs, missing {missing:?}, rarest {rarest:?}={}, counting {}+{}",
            Case::ALL.len() - 1,
            r.graphs,
            r.case_hits(rarest),
            r.case_hits(Case::MpcBelowCount),
            r.case_hits(Case::MpcCCount)
        ),
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

/// Median build time in seconds.
fn build_time(g: &Graph) -> f64 {
    median(
        (0..BUILD_RUNS)
            .map(|_| {
                let start = Instant::now();
                let o = Oracle::new(g);
                let s = start.elapsed().as_secs_f64();
                std::hint::black_box(o.words());
                s
            })
            .collect(),
    )
}

/// Median latency in nanoseconds of resolving a failure set and answering one pair.
fn query_latency(g: &Graph, o: &Oracle, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets = sample_failure_sets(g, LATENCY_BATCH, &mut rng);
    let n = g.n() as Vertex;
    let queries: Vec<(Vec<Vertex>, Vertex, Vertex)> = sets
        .into_iter()
        .map(|f| {
            let mut pick = || loop {
                let x = rng.gen_range(1..=n);
                if !f.contains(&x) {
                    return x;
                }
            };
            let (x, y) = (pick(), pick());
            (f, x, y)
        })
        .collect();
    let samples = (0..LATENCY_BATCHES)
        .map(|_| {
            let start = Instant::now();
            for (f, x, y) in &queries {
                std::hint::black_box(o.connected(f, *x, *y).expect("valid query"));
            }
            start.elapsed().as_nanos() as f64 / queries.len() as f64
        })
        .collect();
    median(samples)
}

fn criterion_scaling() -> Line {
    let base = random_sparse(SCALE_BASE, EDGES_PER_VERTEX * SCALE_BASE, 60);
    let base_latency = query_latency(&base, &Oracle::new(&base), 61);
    let (mut times, mut words, mut latency) = (Vec::new(), Vec::new(), 0.0);
    for (i, &n) in SCALE_SIZES.iter().enumerate() {
        let g = random_sparse(n, EDGES_PER_VERTEX * n, 70 + i as u64);
        times.push(build_time(&g));
        let o = Oracle::new(&g);
        words.push(o.words() as f64 / n as f64);
        if i + 1 == SCALE_SIZES.len() {
            latency = query_latency(&g, &o, 62);
        }
    }
    let growth: Vec<f64> = times.windows(2).map(|w| w[1] / w[0]).collect();
    let ratio = latency / base_latency;
    let mean = words.iter().sum::<f64>() / words.len() as f64;
    let spread = words.iter().map(|w| (w / mean - 1.0).abs()).fold(0.0, f64::max);
    let pass = growth.iter().all(|&x| x <= MAX_BUILD_GROWTH) && ratio <= MAX_LATENCY_RATIO && spread <= WORDS_SPREAD;
    Line {
        id: 6,
        name: "scaling",
        pass,
        detail: format!(
            "build {:?} s, growth {:?} (max {MAX_BUILD_GROWTH}), latency {:.0} ns vs {:.0} ns = {:.2}x (max {MAX_LATENCY_RATIO}x), words/n {:?} spread {:.1}% (max {:.0}%)",
            times.iter().map(|t| (t * 1000.0).round() / 1000.0).collect::<Vec<_>>(),
            growth.iter().map(|g| (g * 100.0).round() / 100.0).collect::<Vec<_>>(),
            latency,
            base_latency,
            ratio,
            words.iter().map(|w| w.round()).collect::<Vec<_>>(),
            spread * 100.0,
            WORDS_SPREAD * 100.0
        ),
    }
}

fn criterion_mutations(graphs: &[Graph]) -> Line {
    let cfg = DiffConfig { exhaustive_up_to: 16, samples: LARGE_SAMPLES, max_mismatches: 1 };
    let survivors: Vec<Mutation> = Mutation::ALL.into_iter().filter(|&m| run_corpus(graphs, &cfg, Some(m)).passed()).collect();
    let caught = Mutation::ALL.len() - survivors.len();
    Line {
        id: 7,
        name: "mutation sensitivity",
        pass: caught >= MIN_MUTATIONS && survivors.is_empty(),
        detail: format!("{caught} of {} mutations caught, survivors {survivors:?}", Mutation::ALL.len()),
    }
}

fn main() {
    let start = Instant::now();
    let mut small = corpus(&SMALL_SIZES, SMALL_SEEDS, 0);
    small.retain(|g| g.n() >= 4 && g.n() <= 16);
    let small_graphs = small.len();
    small.extend((0..ADVERSARIAL).map(gen_adversarial));
    let large = {
        let mut v = Vec::new();
        for &n in &LARGE_SIZES {
            for f in Family::ALL {
                for seed in 0..LARGE_SEEDS {
                    let g = generate(f, n.min(MAX_LARGE_N * 6 / 7), 500 + seed);
                    if g.n() <= MAX_LARGE_N {
                        v.push(g);
                    }
                }
            }
        }
        v
    };

    let (s, l) = differential(&small, &large);
    let lines = vec![
        Line {
            id: 1,
            name: "differential correctness",
            pass: small_graphs >= MIN_SMALL_GRAPHS && l.graphs >= MIN_LARGE_GRAPHS && s.connected + l.connected == 0,
            detail: format!(
                "exhaustive: {} graphs ({small_graphs} generated, {} adversarial), {} failure sets, {} pairs, {} mismatches; \
                 sampled: {} graphs up to n={}, {} failure sets, {} vertices located, {} mismatches",
                s.graphs,
                ADVERSARIAL,
                s.sets,
                s.pairs,
                s.connected,
                l.graphs,
                large.iter().map(Graph::n).max().unwrap_or(0),
                l.sets,
                l.pairs,
                l.connected
            ),
        },
        Line {
            id: 2,
            name: "component counting",
            pass: s.counts + s.cuts + l.counts + l.cuts == 0,
            detail: format!("{} failure sets, {} count and {} cut mismatches", s.sets + l.sets, s.counts + l.counts, s.cuts + l.cuts),
        },
    ];
    for line in &lines {
        line.print();
    }
    let mut all = lines;
    for f in [criterion_audit, criterion_batches, criterion_coverage] {
        let line = f();
        line.print();
        all.push(line);
    }
    let line = criterion_scaling();
    line.print();
    all.push(line);
    let line = criterion_mutations(&[small, large].concat());
    line.print();
    all.push(line);
    let failed: Vec<u32> = all.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    println!(
        "acceptance: {} of {} criteria pass in {:.1} s, failing {failed:?}",
        all.len() - failed.len(),
        all.len(),
        start.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
