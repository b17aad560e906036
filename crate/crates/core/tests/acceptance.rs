//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any
//! criterion fails. Expected values come from oracles written in this file.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use condec::contraction::{
    annuli, build_support_tree, classify_faces, contract_decomposition, sample_requests,
    ReportOptions,
};
use condec::embedding::{build_vfi, Embedding, PlaneGraph};
use condec::generate::{generate, grid, Generated, GraphKind};
use condec::layering::decompose_layers;
use condec::solvers::{baker_solve, brute_force, BakerOptions, Instance, ProblemKind};
use condec::treedec::{heuristic_decompose, to_nice, TreeDecomposition};
use condec::verify::{run_verify, VerifyConfig};
use condec::{Graph, Vertex};

const C_CAP: f64 = 12.0;
const DEEP_A: usize = 4;
const DEEP_B: usize = 4;

type Outcome = Result<String, String>;

fn random_planar(n: usize, drop: f64, seed: u64) -> Generated {
    generate(GraphKind::RandomPlanar { n, drop }, seed).unwrap()
}

fn plane(g: &Generated, marked: &BTreeSet<usize>) -> PlaneGraph {
    PlaneGraph::from_rotation(&g.graph, g.rotation.clone(), marked).unwrap()
}

fn components(g: &Graph, keep: &BTreeSet<Vertex>) -> Vec<BTreeSet<Vertex>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &s in keep {
        if !seen.insert(s) {
            continue;
        }
        let mut comp = BTreeSet::from([s]);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &u in g.neighbors(v) {
                if keep.contains(&u) && seen.insert(u) {
                    comp.insert(u);
                    queue.push_back(u);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Layer of every vertex from a BFS over vertex-face incidences, started at
/// the outer face of each component: `l(v) = (d(v) + 1) / 2`.
fn oracle_layers(e: &Embedding) -> BTreeMap<Vertex, usize> {
    let mut faces_of: BTreeMap<Vertex, Vec<usize>> = BTreeMap::new();
    for (fi, f) in e.faces.iter().enumerate() {
        for &v in &f.boundary_vertices {
            faces_of.entry(v).or_default().push(fi);
        }
    }
    let mut fdist = vec![usize::MAX; e.faces.len()];
    let mut vdist: BTreeMap<Vertex, usize> = BTreeMap::new();
    fdist[e.outer] = 0;
    let mut queue = VecDeque::from([e.outer]);
    while let Some(fi) = queue.pop_front() {
        for &v in &e.faces[fi].boundary_vertices {
            if vdist.contains_key(&v) {
                continue;
            }
            vdist.insert(v, fdist[fi] + 1);
            for &g in &faces_of[&v] {
                if fdist[g] == usize::MAX {
                    fdist[g] = fdist[fi] + 2;
                    queue.push_back(g);
                }
            }
        }
    }
    vdist.into_iter().map(|(v, d)| (v, d.div_ceil(2))).collect()
}

fn report(no: usize, name: &str, start: Instant, outcome: &Outcome) {
    let secs = start.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) => println!("PASS  {no}. {name}: {detail} [{secs:.1}s]"),
        Err(detail) => println!("FAIL  {no}. {name}: {detail} [{secs:.1}s]"),
    }
}

/// Instance `idx` of the oracle corpus: n in 6..=18, k in 0..=3, a few with
/// one apex vertex.
fn oracle_instance(idx: u64, problem: ProblemKind) -> Instance {
    let n = 6 + (idx % 13) as usize;
    let k = (idx / 13 % 4) as usize;
    let drop = 0.1 + 0.1 * (idx % 4) as f64;
    let mut g = random_planar(n, drop, 1000 + idx).graph;
    if idx % 5 == 4 {
        let mut rng = ChaCha8Rng::seed_from_u64(idx);
        let a = n;
        g.add_vertex(a);
        for v in 0..n {
            if rng.gen_bool(0.4) {
                g.add_edge(a, v);
            }
        }
        g.set_apex_set(BTreeSet::from([a])).unwrap();
    }
    Instance::new(g, problem, k)
}

fn criterion_oracle_equivalence() -> Outcome {
    let mut runs = 0;
    let mut feasible = 0;
    for idx in 0..300u64 {
        for problem in [ProblemKind::Oct, ProblemKind::Eb] {
            let inst = oracle_instance(idx, problem);
            let want = brute_force(&inst);
            let got = baker_solve(&inst, None, BakerOptions::default())
                .map_err(|e| format!("instance {idx} {problem:?}: {e}"))?
                .solution;
            if got.as_ref().map(|s| s.size) != want.as_ref().map(|s| s.size) {
                return Err(format!(
                    "instance {idx} {problem:?}: baker {got:?}, brute force {want:?}"
                ));
            }
            if let Some(s) = &got {
                if !inst.is_solution(s) {
                    return Err(format!(
                        "instance {idx} {problem:?}: answer is not a solution"
                    ));
                }
            }
            runs += 1;
            feasible += usize::from(want.is_some());
        }
    }
    Ok(format!(
        "{runs} runs on 300 graphs agree with brute force ({feasible} feasible)"
    ))
}

fn criterion_layering() -> Outcome {
    let mut checked = 0;
    for idx in 0..500u64 {
        let n = 3 + (idx as usize * 37) % 198;
        let g = random_planar(n, 0.1 + 0.05 * (idx % 7) as f64, idx);
        // every fifth graph gets one marked face
        let marked: BTreeSet<usize> = if idx % 5 == 0 {
            BTreeSet::from([idx as usize % 3])
        } else {
            BTreeSet::new()
        };
        let pg = plane(&g, &marked);
        let p = 2 + (idx % 5) as usize;
        let (l, plan, sets) = decompose_layers(&pg, p).map_err(|e| format!("graph {idx}: {e}"))?;

        let mut want: BTreeMap<Vertex, usize> = BTreeMap::new();
        for e in &pg.components {
            want.extend(oracle_layers(e));
        }
        if want != l.ell {
            return Err(format!("graph {idx}: layers differ from the incidence BFS"));
        }
        let mut seen = BTreeSet::new();
        for (i, layer) in l.layers.iter().enumerate() {
            for v in layer {
                if !seen.insert(*v) || want[v] != i + 1 {
                    return Err(format!("graph {idx}: layers do not partition V"));
                }
            }
        }
        if seen != pg.graph.vertex_set() {
            return Err(format!("graph {idx}: layers miss vertices"));
        }
        if let Some((u, v)) = pg
            .graph
            .edges()
            .find(|(u, v)| want[u].abs_diff(want[v]) > 1)
        {
            return Err(format!("graph {idx}: edge ({u}, {v}) spans two layers"));
        }

        let bad: BTreeSet<usize> = pg
            .faces()
            .filter(|f| f.marked)
            .flat_map(|f| f.boundary_vertices.iter().map(|v| want[v]))
            .collect();
        let p_prime = p + 2 * marked.len();
        let class = |i: usize| (i - 1) % p_prime + 1;
        let bad_classes: BTreeSet<usize> = bad.iter().map(|&i| class(i)).collect();
        let residues: Vec<usize> = (1..=p_prime)
            .filter(|r| !bad_classes.contains(r))
            .take(p)
            .collect();
        if plan.good_residues != residues || plan.p_prime != p_prime {
            return Err(format!(
                "graph {idx}: residues {:?}, expected {residues:?}",
                plan.good_residues
            ));
        }
        let mut union = BTreeSet::new();
        for (k, r) in residues.iter().enumerate() {
            let z: BTreeSet<Vertex> = want
                .iter()
                .filter(|(_, &i)| class(i) == *r)
                .map(|(&v, _)| v)
                .collect();
            if sets.z[k] != z || !union.is_disjoint(&z) {
                return Err(format!(
                    "graph {idx}: Z_{} is not its congruence class",
                    k + 1
                ));
            }
            union.extend(z);
        }
        checked += 1;
    }
    Ok(format!("{checked} graphs, n <= 200"))
}

fn support_corpus() -> Vec<Generated> {
    let mut out: Vec<Generated> = (4..=7).map(|s| grid(s, s).unwrap()).collect();
    out.push(
        generate(
            GraphKind::GridWithChords {
                rows: 6,
                cols: 6,
                chords: 8,
            },
            3,
        )
        .unwrap(),
    );
    out.extend((0..120u64).map(|s| {
        random_planar(
            3 + (s as usize * 13) % 58,
            0.1 + 0.1 * (s % 5) as f64,
            7000 + s,
        )
    }));
    out
}

fn criterion_support_tree() -> Outcome {
    let mut trees = 0;
    let corpus = support_corpus();
    for (gi, g) in corpus.iter().enumerate() {
        let pg = plane(g, &BTreeSet::new());
        let graph = &pg.graph;
        for p in 2..=4 {
            let (l, plan, sets) = decompose_layers(&pg, p).map_err(|e| e.to_string())?;
            let requests = sample_requests(
                &sets,
                ReportOptions {
                    max_zprime: 3,
                    samples_per_size: 2,
                    seed: gi as u64,
                },
            );
            for req in requests {
                let t = build_support_tree(graph, &l, &plan, req.i).map_err(|e| e.to_string())?;
                let z = sets.get(req.i).map_err(|e| e.to_string())?;
                let contracted: BTreeSet<Vertex> = z.difference(&req.z_prime).copied().collect();
                let mut owner: BTreeMap<Vertex, usize> = BTreeMap::new();
                for (ti, node) in t.nodes.iter().enumerate() {
                    for &v in &node.vertices {
                        if owner.insert(v, ti).is_some() {
                            return Err(format!("graph {gi}: vertex {v} in two sets V_t"));
                        }
                    }
                }
                if owner.len() != graph.n() {
                    return Err(format!("graph {gi} p {p}: the V_t do not cover V"));
                }
                for c in components(graph, &contracted) {
                    let ts: BTreeSet<usize> = c.iter().map(|v| owner[v]).collect();
                    if ts.len() != 1 {
                        return Err(format!(
                            "graph {gi} p {p} i {}: a component spreads over {ts:?}",
                            req.i
                        ));
                    }
                }
                for (u, v) in graph.edges() {
                    let (a, b) = (owner[&u], owner[&v]);
                    if a != b && t.nodes[a].parent != Some(b) && t.nodes[b].parent != Some(a) {
                        return Err(format!(
                            "graph {gi} p {p}: edge ({u}, {v}) joins unrelated nodes"
                        ));
                    }
                }
                trees += 1;
            }
        }
    }
    Ok(format!(
        "{trees} support trees on {} graphs with n <= 60",
        corpus.len()
    ))
}

struct ScalingStats {
    runs: usize,
    max_ratio: f64,
    max_width: usize,
    decompositions: usize,
    nice_failures: Vec<String>,
}

fn check_decomposition(td: &TreeDecomposition, g: &Graph, what: &str, stats: &mut ScalingStats) {
    stats.decompositions += 1;
    if !td.validate(g).valid {
        stats
            .nice_failures
            .push(format!("{what}: invalid decomposition"));
        return;
    }
    match to_nice(td) {
        Ok(nice) => {
            let ok = nice.width() == td.width()
                && nice.check_nice().is_empty()
                && nice.as_tree_decomposition().validate(g).valid;
            if !ok {
                stats
                    .nice_failures
                    .push(format!("{what}: nice form breaks width or validity"));
            }
        }
        Err(e) => stats.nice_failures.push(format!("{what}: {e}")),
    }
}

fn criterion_scaling(stats: &mut ScalingStats) -> Outcome {
    let mut corpus: Vec<(String, Generated)> = [10, 15, 20, 25, 30]
        .iter()
        .map(|&s| (format!("grid {s}x{s}"), grid(s, s).unwrap()))
        .collect();
    for (k, n) in [200, 500, 1000, 2000].into_iter().enumerate() {
        corpus.push((
            format!("random-planar n={n}"),
            random_planar(n, 0.2, 500 + k as u64),
        ));
    }
    let mut worst = String::new();
    for (name, g) in &corpus {
        let pg = plane(g, &BTreeSet::new());
        check_decomposition(&heuristic_decompose(&pg.graph), &pg.graph, name, stats);
        for p in 2..=8 {
            let (_, _, sets) = decompose_layers(&pg, p).map_err(|e| e.to_string())?;
            let opts = ReportOptions {
                max_zprime: 6,
                samples_per_size: 1,
                seed: p as u64,
            };
            for req in sample_requests(&sets, opts) {
                let q =
                    contract_decomposition(&pg.graph, &sets, &req).map_err(|e| e.to_string())?;
                let td = heuristic_decompose(&q.graph);
                let zp = req.z_prime.len();
                check_decomposition(
                    &td,
                    &q.graph,
                    &format!("{name} p={p} i={} |Z'|={zp}", req.i),
                    stats,
                );
                let ratio = td.width() as f64 / (p + zp + 1) as f64;
                if ratio > stats.max_ratio {
                    stats.max_ratio = ratio;
                    worst = format!("{name} p={p} |Z'|={zp} width {}", td.width());
                }
                stats.max_width = stats.max_width.max(td.width());
                stats.runs += 1;
            }
        }
    }
    let detail = format!(
        "{} quotients, max width {}, max width/(p+|Z'|+1) = {:.3} at {worst} (cap {C_CAP})",
        stats.runs, stats.max_width, stats.max_ratio
    );
    if stats.max_ratio <= C_CAP {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_deep_faces() -> Outcome {
    let mut corpus: Vec<Generated> = [7, 10, 15].iter().map(|&s| grid(s, s).unwrap()).collect();
    corpus.push(
        generate(
            GraphKind::GridWithChords {
                rows: 10,
                cols: 10,
                chords: 20,
            },
            5,
        )
        .unwrap(),
    );
    corpus.extend((0..40u64).map(|s| {
        random_planar(
            20 + (s as usize * 17) % 181,
            0.15 + 0.05 * (s % 4) as f64,
            9000 + s,
        )
    }));
    let mut faces = 0;
    let mut max_seen = 0;
    let mut max_excess: i64 = i64::MIN;
    for (gi, g) in corpus.iter().enumerate() {
        let pg = plane(g, &BTreeSet::new());
        for p in 2..=4 {
            let (l, plan, sets) = decompose_layers(&pg, p).map_err(|e| e.to_string())?;
            let opts = ReportOptions {
                max_zprime: 6,
                samples_per_size: 2,
                seed: gi as u64,
            };
            for req in sample_requests(&sets, opts) {
                let z = sets.get(req.i).map_err(|e| e.to_string())?;
                let contracted: BTreeSet<Vertex> = z.difference(&req.z_prime).copied().collect();
                let comps = components(&pg.graph, &contracted);
                let zp = req.z_prime.len();
                for ann in annuli(&l, &plan, req.i).map_err(|e| e.to_string())? {
                    for e in &pg.components {
                        let fc = classify_faces(e, &l, z, &req.z_prime, ann);
                        for f in fc.faces.iter().filter(|f| f.deep) {
                            let meets =
                                comps.iter().filter(|c| !c.is_disjoint(&f.boundary)).count();
                            if meets != f.components.len() {
                                return Err(format!(
                                    "graph {gi}: face lists {} components, oracle {meets}",
                                    f.components.len()
                                ));
                            }
                            if meets > DEEP_A * zp + DEEP_B {
                                return Err(format!("graph {gi} p {p}: deep face meets {meets} components with |Z'| = {zp}"));
                            }
                            max_seen = max_seen.max(meets);
                            max_excess = max_excess.max(meets as i64 - (DEEP_A * zp) as i64);
                            faces += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "{faces} deep faces, max components {max_seen}, max components - {DEEP_A}|Z'| = {max_excess} (cap {DEEP_B})"
    ))
}

fn floyd_warshall_diameter(adj: &[Vec<usize>]) -> u64 {
    let n = adj.len();
    let inf = u64::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for x in 0..n {
        d[x][x] = 0;
        for &y in &adj[x] {
            d[x][y] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d.into_iter()
        .flatten()
        .filter(|&x| x < inf)
        .max()
        .unwrap_or(0)
}

fn criterion_zero_weight_diameter() -> Outcome {
    let mut compared = 0;
    for idx in 0..200u64 {
        let n = 1 + (idx % 20) as usize;
        let g = random_planar(n, 0.1 * (idx % 6) as f64, 3000 + idx);
        let pg = plane(&g, &BTreeSet::new());
        let (l, plan, sets) = decompose_layers(&pg, 2).map_err(|e| e.to_string())?;
        let mut cases = Vec::new();
        for e in &pg.components {
            let vfi = build_vfi(e);
            let zero: BTreeMap<usize, u64> = e.faces.iter().map(|f| (f.id, 0)).collect();
            cases.push((vfi, zero));
        }
        for i in 1..=plan.p {
            let z = sets.get(i).map_err(|e| e.to_string())?;
            for ann in annuli(&l, &plan, i).map_err(|e| e.to_string())? {
                for e in &pg.components {
                    let fc = classify_faces(e, &l, z, &BTreeSet::new(), ann);
                    let zero = fc.faces.iter().map(|f| (f.id, 0)).collect();
                    cases.push((fc.vfi(), zero));
                }
            }
        }
        for (vfi, zero) in cases {
            let nodes = vfi.nodes().to_vec();
            let pos: BTreeMap<_, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
            let adj: Vec<Vec<usize>> = nodes
                .iter()
                .map(|&a| vfi.neighbors(a).map(|b| pos[&b]).collect())
                .collect();
            let want = floyd_warshall_diameter(&adj);
            let weighted = vfi.diameter(Some(&zero));
            let plain = vfi.diameter(None);
            if weighted != want || plain != want {
                return Err(format!(
                    "graph {idx}: zero-weight {weighted}, unweighted {plain}, oracle {want}"
                ));
            }
            compared += 1;
        }
    }
    Ok(format!(
        "{compared} incidence graphs from 200 graphs with n <= 20"
    ))
}

fn criterion_decompositions(stats: &mut ScalingStats) -> Outcome {
    for (gi, g) in support_corpus().iter().enumerate() {
        check_decomposition(
            &heuristic_decompose(&g.graph),
            &g.graph,
            &format!("support corpus {gi}"),
            stats,
        );
    }
    // the solver's own decompositions, validated inside the pipeline
    for idx in 0..40u64 {
        let inst = oracle_instance(
            idx,
            if idx % 2 == 0 {
                ProblemKind::Oct
            } else {
                ProblemKind::Eb
            },
        );
        let opts = BakerOptions {
            validate: true,
            ..BakerOptions::default()
        };
        if let Err(e) = baker_solve(&inst, None, opts) {
            stats
                .nice_failures
                .push(format!("solver instance {idx}: {e}"));
        }
        stats.decompositions += 1;
    }
    if stats.nice_failures.is_empty() {
        Ok(format!(
            "{} decompositions valid, nice forms keep width and validity",
            stats.decompositions
        ))
    } else {
        Err(format!(
            "{} failures, first: {}",
            stats.nice_failures.len(),
            stats.nice_failures[0]
        ))
    }
}

fn criterion_determinism() -> Outcome {
    for idx in 0..60u64 {
        let problem = if idx % 2 == 0 {
            ProblemKind::Oct
        } else {
            ProblemKind::Eb
        };
        let inst = oracle_instance(idx * 7 + 3, problem);
        let run = |threads| {
            let mut out = baker_solve(
                &inst,
                None,
                BakerOptions {
                    threads,
                    ..BakerOptions::default()
                },
            )
            .unwrap();
            out.stats.wall_ms = 0;
            out
        };
        let (a, b, c) = (run(1), run(8), run(1));
        if a.solution != b.solution || a.solution != c.solution || a.stats != b.stats {
            return Err(format!("instance {idx}: thread count changed the answer"));
        }
    }

    let cfg = VerifyConfig {
        seed: 5,
        oracle: condec::verify::OracleConfig {
            instances: 12,
            ..Default::default()
        },
        ..VerifyConfig::default_corpus()
    };
    let in_pool = |threads| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        serde_json::to_string(&pool.install(|| run_verify(&cfg))).unwrap()
    };
    if in_pool(1) != in_pool(8) {
        return Err("verify reports differ between 1 and 8 threads".into());
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("g.txt");
    let bin = env!("CARGO_BIN_EXE_condec");
    let gen = |seed: &str| {
        Command::new(bin)
            .args([
                "generate",
                "--kind",
                "random-planar",
                "--n",
                "17",
                "--drop",
                "0.25",
                "--seed",
                seed,
            ])
            .output()
            .unwrap()
            .stdout
    };
    if gen("11") != gen("11") {
        return Err("generate is not deterministic".into());
    }
    std::fs::write(&path, gen("11")).map_err(|e| e.to_string())?;
    let solve = |threads: &str| {
        let out = Command::new(bin)
            .args([
                "solve",
                path.to_str().unwrap(),
                "--problem",
                "eb",
                "--k",
                "3",
                "--threads",
                threads,
            ])
            .output()
            .unwrap();
        let mut v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v["stats"].as_object_mut().unwrap().remove("wall_ms");
        v
    };
    let (one, eight) = (solve("1"), solve("8"));
    if one != eight || one != solve("1") {
        return Err(format!("CLI solve output differs: {one} vs {eight}"));
    }
    Ok("60 solver instances, verify reports and CLI runs identical across 1 and 8 threads".into())
}

fn main() -> ExitCode {
    let mut stats = ScalingStats {
        runs: 0,
        max_ratio: 0.0,
        max_width: 0,
        decompositions: 0,
        nice_failures: Vec::new(),
    };
    let mut failed = 0;
    let mut run = |no: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        report(no, name, start, &outcome);
        failed += usize::from(outcome.is_err());
    };
    run(
        1,
        "oracle equivalence (baker vs brute force, OCT and EB)",
        &mut criterion_oracle_equivalence,
    );
    run(2, "layering invariants", &mut criterion_layering);
    run(3, "support-tree properties", &mut criterion_support_tree);
    run(4, "quotient treewidth scaling", &mut || {
        criterion_scaling(&mut stats)
    });
    run(5, "deep-face component bound", &mut criterion_deep_faces);
    run(
        6,
        "zero-weight diameter equals unweighted diameter",
        &mut criterion_zero_weight_diameter,
    );
    run(7, "decomposition validity and nice form", &mut || {
        criterion_decompositions(&mut stats)
    });
    run(
        8,
        "determinism across seeds and thread counts",
        &mut criterion_determinism,
    );
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
