use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use condec::contraction::{treewidth_bound_report, ReportOptions, ReportRow};
use condec::generate::{generate, GraphKind};
use condec::io::{face_table, read_graph_file, write_graph, GraphFile};
use condec::layering::decompose_layers;
use condec::solvers::{baker_solve, brute_force, dp_solve, BakerOptions, Instance, ProblemKind};
use condec::treedec::{heuristic_decompose, to_nice, TreeDecomposition};
use condec::verify::{run_verify, VerifyConfig};
use condec::{Error, Result};

/// Layered contraction decompositions and OCT / edge bipartization solvers
/// for planar graphs. JSON goes to stdout, tables to stderr.
#[derive(Parser)]
#[command(name = "condec", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Grid,
    Cycle,
    RandomPlanar,
    GridWithChords,
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Baker,
    Dp,
    Brute,
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    Oct,
    Eb,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a generated graph (with its rotation system) in the text format.
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 5)]
        rows: usize,
        #[arg(long, default_value_t = 5)]
        cols: usize,
        /// Vertex count for cycle and random-planar.
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Edge drop probability for random-planar.
        #[arg(long, default_value_t = 0.0)]
        drop: f64,
        #[arg(long, default_value_t = 0)]
        chords: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Faces of the embedding of the graph without its apices.
    Faces { graph: PathBuf },
    /// Vertex-face layers, bad layers, residues and the sets Z_i.
    Layers {
        graph: PathBuf,
        #[arg(long)]
        p: usize,
    },
    /// Quotients G/(Z_i \ Z') with sampled Z' of one size.
    Decompose {
        graph: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 0)]
        zprime_size: usize,
        #[arg(long, default_value_t = 1)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Quotient widths for several p and all |Z'| up to a cap.
    TreewidthReport {
        graph: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 3, 4])]
        p: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        max_zprime: usize,
        #[arg(long, default_value_t = 2)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cap C on width / (p + |Z'| + 1).
        #[arg(long, default_value_t = 12.0)]
        c: f64,
    },
    /// Heuristic tree decomposition, or validation of a given one.
    Td {
        graph: PathBuf,
        /// Validate this PACE-style decomposition instead of building one.
        #[arg(long)]
        check: Option<PathBuf>,
        /// Also write the decomposition in the PACE-style layout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Odd cycle transversal or edge bipartization with budget k.
    Solve {
        graph: PathBuf,
        #[arg(long, value_enum)]
        problem: Problem,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Engine::Baker)]
        engine: Engine,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Overrides p = floor(sqrt(k)) for the Baker engine.
        #[arg(long)]
        p: Option<usize>,
    },
    /// Run the invariant suites over a corpus; exits 1 when a cap fails.
    Verify {
        /// JSON corpus config; the built-in corpus when omitted.
        config: Option<PathBuf>,
        #[arg(long)]
        a: Option<usize>,
        #[arg(long)]
        b: Option<usize>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn emit<T: Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}")?;
    Ok(())
}

fn print_rows(rows: &[ReportRow]) {
    eprintln!(
        "{:>3} {:>6} {:>8} {:>8} {:>6} {:>7}",
        "i", "|Z'|", "n", "m", "width", "ratio"
    );
    for r in rows {
        eprintln!(
            "{:>3} {:>6} {:>8} {:>8} {:>6} {:>7.3}",
            r.i,
            r.zprime.len(),
            r.quotient_n,
            r.quotient_m,
            r.width,
            r.ratio
        );
    }
}

fn run(cmd: Cmd) -> Result<ExitCode> {
    match cmd {
        Cmd::Generate {
            kind,
            rows,
            cols,
            n,
            drop,
            chords,
            seed,
            out,
        } => {
            let kind = match kind {
                Kind::Grid => GraphKind::Grid { rows, cols },
                Kind::Cycle => GraphKind::Cycle { n },
                Kind::RandomPlanar => GraphKind::RandomPlanar { n, drop },
                Kind::GridWithChords => GraphKind::GridWithChords { rows, cols, chords },
            };
            let g = generate(kind, seed)?;
            let text = write_graph(&GraphFile {
                graph: g.graph,
                rotation: Some(g.rotation),
                marked: Default::default(),
            })?;
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
        }
        Cmd::Faces { graph } => {
            let pg = read_graph_file(&graph)?.plane_graph()?;
            emit(&face_table(&pg))?;
        }
        Cmd::Layers { graph, p } => {
            let gf = read_graph_file(&graph)?;
            let pg = gf.plane_graph()?;
            let (l, plan, sets) = decompose_layers(&pg, p)?;
            for (i, layer) in l.layers.iter().enumerate() {
                eprintln!("L_{:<3} {:>6} vertices", i + 1, layer.len());
            }
            emit(&json!({
                "m": l.m,
                "layers": l.layers,
                "bad_layers": l.bad_layers,
                "p": plan.p,
                "p_prime": plan.p_prime,
                "residues": plan.good_residues,
                "Z": sets.z,
            }))?;
        }
        Cmd::Decompose {
            graph,
            p,
            zprime_size,
            samples,
            seed,
        } => {
            let gf = read_graph_file(&graph)?;
            let pg = gf.plane_graph()?;
            let (_, plan, sets) = decompose_layers(&pg, p)?;
            let opts = ReportOptions {
                max_zprime: zprime_size,
                samples_per_size: samples,
                seed,
            };
            let rows: Vec<ReportRow> = treewidth_bound_report(&pg.graph, &sets, &plan, opts)?
                .into_iter()
                .filter(|r| r.zprime.len() == zprime_size)
                .collect();
            print_rows(&rows);
            emit(&rows)?;
        }
        Cmd::TreewidthReport {
            graph,
            p,
            max_zprime,
            samples,
            seed,
            c,
        } => {
            let gf = read_graph_file(&graph)?;
            let pg = gf.plane_graph()?;
            let mut reports = Vec::new();
            let mut worst: f64 = 0.0;
            for p in p {
                let (_, plan, sets) = decompose_layers(&pg, p)?;
                let opts = ReportOptions {
                    max_zprime,
                    samples_per_size: samples,
                    seed,
                };
                let rows = treewidth_bound_report(&pg.graph, &sets, &plan, opts)?;
                eprintln!("p = {p}");
                print_rows(&rows);
                let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
                worst = worst.max(max_ratio);
                reports.push(json!({ "p": p, "max_ratio": max_ratio, "rows": rows }));
            }
            let ok = worst <= c;
            emit(&json!({ "c": c, "max_ratio": worst, "ok": ok, "reports": reports }))?;
            if !ok {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Td { graph, check, out } => {
            let g = read_graph_file(&graph)?.graph;
            let td = match &check {
                Some(path) => TreeDecomposition::from_pace(&std::fs::read_to_string(path)?)?,
                None => heuristic_decompose(&g),
            };
            let validation = td.validate(&g);
            if let Some(path) = out {
                std::fs::write(path, td.to_pace(g.n()))?;
            }
            let violations: Vec<String> = validation
                .violations
                .iter()
                .map(|v| format!("{v:?}"))
                .collect();
            emit(&json!({
                "nodes": td.num_nodes(),
                "width": td.width(),
                "valid": validation.valid,
                "violations": violations,
            }))?;
            if !validation.valid {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Solve {
            graph,
            problem,
            k,
            engine,
            threads,
            p,
        } => {
            let gf = read_graph_file(&graph)?;
            let problem = match problem {
                Problem::Oct => ProblemKind::Oct,
                Problem::Eb => ProblemKind::Eb,
            };
            let inst = Instance::new(gf.graph.clone(), problem, k);
            let start = Instant::now();
            let (solution, stats) = match engine {
                Engine::Baker => {
                    let pg = if gf.rotation.is_some() || !gf.marked.is_empty() {
                        Some(gf.plane_graph()?)
                    } else {
                        None
                    };
                    let opts = BakerOptions {
                        threads,
                        p,
                        validate: false,
                    };
                    let out = baker_solve(&inst, pg.as_ref(), opts)?;
                    let stats = json!({
                        "p": out.stats.p,
                        "apex_branches": out.stats.apex_branches,
                        "pairs_tried": out.stats.pairs_tried,
                        "pairs_skipped": out.stats.pairs_skipped,
                        "max_width": out.stats.max_width,
                    });
                    (out.solution, stats)
                }
                Engine::Dp => {
                    let ntd = to_nice(&heuristic_decompose(&inst.graph))?;
                    let width = ntd.width();
                    (
                        dp_solve(&inst, &ntd)?,
                        json!({ "pairs_tried": 0, "max_width": width }),
                    )
                }
                Engine::Brute => (
                    brute_force(&inst),
                    json!({ "pairs_tried": 0, "max_width": 0 }),
                ),
            };
            let mut stats = stats;
            stats["wall_ms"] = json!(start.elapsed().as_millis() as u64);
            match &solution {
                Some(s) => eprintln!("feasible, size {}", s.size),
                None => eprintln!("no solution of size at most {k}"),
            }
            emit(&json!({
                "feasible": solution.is_some(),
                "size": solution.as_ref().map(|s| s.size),
                "deleted": solution.as_ref().map(|s| json!(s.deleted)).unwrap_or(json!([])),
                "stats": stats,
            }))?;
        }
        Cmd::Verify {
            config,
            a,
            b,
            c,
            threads,
        } => {
            let mut cfg = match config {
                Some(path) => VerifyConfig::from_json(&std::fs::read_to_string(path)?)?,
                None => VerifyConfig::default_corpus(),
            };
            cfg.caps.a = a.unwrap_or(cfg.caps.a);
            cfg.caps.b = b.unwrap_or(cfg.caps.b);
            cfg.caps.c = c.unwrap_or(cfg.caps.c);
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.unwrap_or(0))
                .build()
                .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
            let report = pool.install(|| run_verify(&cfg));
            for item in &report.items {
                eprintln!(
                    "{:<44} n={:<5} width={:<3} deep={:<3} failures={}",
                    item.name,
                    item.n,
                    item.maxima.width,
                    item.maxima.deep_components,
                    item.failures.len()
                );
            }
            eprintln!(
                "oracle: {} instances, {} failures",
                report.oracle.instances,
                report.oracle.failures.len()
            );
            emit(&report)?;
            if !report.ok {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse().cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
