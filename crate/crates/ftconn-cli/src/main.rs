//! `ftconn`: build the connectivity oracle for a graph file and answer
//! queries, or run the differential check and benchmarks.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand};
use ftconn::verify::{corpus, gen_adversarial, generate, random_sparse, run_corpus, sample_failure_sets, DiffConfig, DiffReport, Family};
use ftconn::{Graph, GraphError, Oracle, OracleError, Vertex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Parser)]
#[command(name = "ftconn", version, about = "Connectivity queries under up to three vertex failures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Preprocess a graph and report the size of the structure.
    Build {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        json: bool,
    },
    /// Are two vertices connected after the failures?
    #[command(group(ArgGroup::new("pairs").required(true).multiple(true).args(["s", "q"])))]
    Query {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        failed: FailArg,
        /// First vertex of a single query.
        #[arg(short, requires = "t")]
        s: Option<Vertex>,
        /// Second vertex of a single query.
        #[arg(short, requires = "s")]
        t: Option<Vertex>,
        /// A query pair `s,t`; may be repeated.
        #[arg(short, value_parser = parse_pair)]
        q: Vec<(Vertex, Vertex)>,
        #[arg(long)]
        json: bool,
    },
    /// Number of connected components after the failures.
    Count {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        failed: FailArg,
        #[arg(long)]
        json: bool,
    },
    /// Do the failures disconnect the graph?
    Cut {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        failed: FailArg,
        #[arg(long)]
        json: bool,
    },
    /// Compare the oracle with breadth-first search.
    Verify {
        /// Check this graph instead of a generated corpus.
        #[arg(short, value_name = "FILE", conflicts_with = "corpus")]
        g: Option<PathBuf>,
        /// `default`, `small`, `large`, `adversarial` or a family name.
        #[arg(long, default_value = "default")]
        corpus: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        threads: u16,
        #[arg(long)]
        json: bool,
    },
    /// Time preprocessing and queries.
    Bench {
        /// Benchmark this graph instead of a random one.
        #[arg(short, value_name = "FILE", conflicts_with = "n")]
        g: Option<PathBuf>,
        /// Vertices of the random graph, which has three edges per vertex.
        #[arg(short, long, default_value_t = 100_000)]
        n: usize,
        /// Number of timed queries.
        #[arg(long, default_value_t = 10_000)]
        queries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct GraphArg {
    /// Graph file: a header `n m`, then one `u v` edge per line.
    #[arg(short, value_name = "FILE")]
    g: PathBuf,
}

#[derive(Args)]
struct FailArg {
    /// Failed vertices, comma separated.
    #[arg(short, value_name = "CSV", value_parser = parse_failures)]
    f: Failures,
}

#[derive(Clone)]
struct Failures(Vec<Vertex>);

fn parse_failures(s: &str) -> Result<Failures, String> {
    let f =
        s.split(',').map(|x| x.trim().parse::<Vertex>().map_err(|e| format!("bad vertex `{x}`: {e}"))).collect::<Result<Vec<_>, _>>()?;
    if f.len() > 3 {
        return Err("at most 3 failures".into());
    }
    Ok(Failures(f))
}

fn parse_pair(s: &str) -> Result<(Vertex, Vertex), String> {
    let (a, b) = s.split_once(',').ok_or("expected `s,t`")?;
    let v = |x: &str| x.trim().parse::<Vertex>().map_err(|e| format!("bad vertex `{x}`: {e}"));
    Ok((v(a)?, v(b)?))
}

/// Failures reported with exit status 1.
#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Graph { path: PathBuf, source: GraphError },
    #[error(transparent)]
    Query(#[from] OracleError),
    #[error("{0} mismatches against breadth-first search")]
    Mismatch(u64),
    #[error("unknown corpus `{0}`")]
    Corpus(String),
}

fn load(path: &Path) -> Result<Graph, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    Graph::parse(&text).map_err(|source| CliError::Graph { path: path.into(), source })
}

fn build(graph: &GraphArg) -> Result<Oracle, CliError> {
    Ok(Oracle::new(&load(&graph.g)?))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Build { graph, json } => {
            let g = load(&graph.g)?;
            let start = Instant::now();
            let o = Oracle::new(&g);
            let ms = start.elapsed().as_secs_f64() * 1e3;
            let s = o.stats();
            if json {
                println!("{}", json!({ "stats": s, "build_ms": ms }));
            } else {
                println!(
                    "vertices {}\nedges {}\ntransformed vertices {}\nback edges {}\nwords {}\nbuild ms {ms:.2}",
                    s.vertices,
                    g.m(),
                    s.transformed_vertices,
                    s.back_edges,
                    s.words
                );
            }
        }
        Command::Query { graph, failed, s, t, q, json } => {
            let o = build(&graph)?;
            let ctx = o.resolve(&failed.f.0)?;
            let pairs = s.zip(t).into_iter().chain(q);
            for (x, y) in pairs {
                let c = ctx.connected(x, y)?;
                if json {
                    println!("{}", json!({ "connected": c }));
                } else {
                    println!("{}", if c { "connected" } else { "disconnected" });
                }
            }
        }
        Command::Count { graph, failed, json } => {
            let c = build(&graph)?.count_components(&failed.f.0)?;
            if json {
                println!("{}", json!({ "components": c }));
            } else {
                println!("{c}");
            }
        }
        Command::Cut { graph, failed, json } => {
            let c = build(&graph)?.is_cut(&failed.f.0)?;
            if json {
                println!("{}", json!({ "cut": c }));
            } else {
                println!("{}", if c { "cut" } else { "not a cut" });
            }
        }
        Command::Verify { g, corpus, seed, threads, json } => {
            let graphs = match g {
                Some(path) => vec![load(&path)?],
                None => named_corpus(&corpus, seed)?,
            };
            let report = verify(&graphs, threads as usize);
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print_report(&report);
            }
            if !report.passed() {
                return Err(CliError::Mismatch(report.mismatch_count));
            }
        }
        Command::Bench { g, n, queries, seed, json } => {
            let g = match g {
                Some(path) => load(&path)?,
                None => random_sparse(n, 3 * n, seed),
            };
            bench(&g, queries, seed, json);
        }
    }
    Ok(())
}

fn named_corpus(name: &str, seed: u64) -> Result<Vec<Graph>, CliError> {
    let small = |seeds| corpus(&[4, 6, 8, 10, 12, 14, 16], seeds, 0);
    let large = || {
        let mut out = Vec::new();
        for n in [250, 500, 1000, 1700] {
            for f in Family::ALL {
                out.push(generate(f, n, seed));
            }
        }
        out
    };
    let adversarial = |k: u64| (seed * k..seed * k + k).map(gen_adversarial).collect::<Vec<_>>();
    Ok(match name {
        "default" => [small(5), adversarial(500), large()].concat(),
        "small" => small(5),
        "large" => large(),
        "adversarial" => adversarial(3000),
        other => {
            let f = Family::parse(other).ok_or_else(|| CliError::Corpus(other.into()))?;
            (0..50).map(|i| generate(f, 4 + (i as usize % 13), seed * 50 + i)).collect()
        }
    })
}

fn verify(graphs: &[Graph], threads: usize) -> DiffReport {
    let cfg = DiffConfig::default();
    let chunk = graphs.len().div_ceil(threads.max(1)).max(1);
    let mut report = DiffReport::default();
    std::thread::scope(|s| {
        let handles: Vec<_> = graphs.chunks(chunk).map(|part| s.spawn(|| run_corpus(part, &cfg, None))).collect();
        for h in handles {
            report.merge(h.join().expect("worker panicked"));
        }
    });
    report
}

fn print_report(r: &DiffReport) {
    println!("graphs {}\nfailure sets {}\nmismatches {}", r.graphs, r.failure_sets, r.mismatch_count);
    let missing = r.missing_cases();
    if !missing.is_empty() {
        println!("cases not reached {missing:?}");
    }
    for m in &r.mismatches {
        println!(
            "mismatch: failed {:?} pair {:?} expected {} got {} cases {:?}\n{}",
            m.failed, m.pair, m.expected, m.got, m.cases, m.graph
        );
    }
}

fn bench(g: &Graph, queries: usize, seed: u64, json: bool) {
    let start = Instant::now();
    let o = Oracle::new(g);
    let build_ms = start.elapsed().as_secs_f64() * 1e3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.n() as Vertex;
    let sets = sample_failure_sets(g, queries, &mut rng);
    let mut times: Vec<u64> = Vec::with_capacity(queries);
    for f in &sets {
        let mut pick = || loop {
            let x = rng.gen_range(1..=n);
            if !f.contains(&x) {
                break x;
            }
        };
        let (x, y) = (pick(), pick());
        let start = Instant::now();
        std::hint::black_box(o.connected(f, x, y).expect("valid query"));
        times.push(start.elapsed().as_nanos() as u64);
    }
    times.sort_unstable();
    let at = |q: f64| times.get(((times.len() as f64 * q) as usize).min(times.len().saturating_sub(1))).copied().unwrap_or(0);
    let (median, p99) = (at(0.5), at(0.99));
    let words = o.words();
    if json {
        println!(
            "{}",
            json!({ "vertices": g.n(), "edges": g.m(), "build_ms": build_ms, "median_ns": median, "p99_ns": p99, "words": words })
        );
    } else {
        println!(
            "vertices {}\nedges {}\nbuild ms {build_ms:.2}\nquery median ns {median}\nquery p99 ns {p99}\nwords {words}\nwords per vertex {:.1}",
            g.n(),
            g.m(),
            words as f64 / g.n() as f64
        );
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
