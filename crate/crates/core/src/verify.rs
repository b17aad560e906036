//! Corpus harness behind `condec verify`: runs the layering, support-tree,
//! deep-face, diameter, treewidth and oracle suites over a configured corpus
//! and checks the empirical caps.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contraction::{
    annuli, build_support_tree, classify_faces, contract_decomposition, sample_requests,
    weighted_diameter, ContractionRequest, ReportOptions,
};
use crate::embedding::PlaneGraph;
use crate::error::{Error, Result};
use crate::generate::{generate, GraphKind};
use crate::graph::Graph;
use crate::io::{read_graph_file, GraphFile};
use crate::layering::{decompose_layers, residue, LayerSets, Layering, ResiduePlan};
use crate::solvers::{baker_solve, brute_force, dp_solve, BakerOptions, Instance, ProblemKind};
use crate::treedec::{heuristic_decompose, to_nice, TreeDecomposition};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphSpec {
    Grid {
        rows: usize,
        cols: usize,
    },
    Cycle {
        n: usize,
    },
    RandomPlanar {
        n: usize,
        #[serde(default)]
        drop: f64,
        #[serde(default)]
        seed: u64,
    },
    GridWithChords {
        rows: usize,
        cols: usize,
        chords: usize,
        #[serde(default)]
        seed: u64,
    },
    File {
        path: PathBuf,
    },
}

impl GraphSpec {
    pub fn load(&self) -> Result<GraphFile> {
        let (kind, seed) = match *self {
            GraphSpec::Grid { rows, cols } => (GraphKind::Grid { rows, cols }, 0),
            GraphSpec::Cycle { n } => (GraphKind::Cycle { n }, 0),
            GraphSpec::RandomPlanar { n, drop, seed } => {
                (GraphKind::RandomPlanar { n, drop }, seed)
            }
            GraphSpec::GridWithChords {
                rows,
                cols,
                chords,
                seed,
            } => (GraphKind::GridWithChords { rows, cols, chords }, seed),
            GraphSpec::File { ref path } => return read_graph_file(path),
        };
        let g = generate(kind, seed)?;
        Ok(GraphFile {
            graph: g.graph,
            rotation: Some(g.rotation),
            marked: BTreeSet::new(),
        })
    }

    fn name(&self) -> String {
        match self {
            GraphSpec::Grid { rows, cols } => format!("grid {rows}x{cols}"),
            GraphSpec::Cycle { n } => format!("cycle {n}"),
            GraphSpec::RandomPlanar { n, drop, seed } => {
                format!("random-planar n={n} drop={drop} seed={seed}")
            }
            GraphSpec::GridWithChords {
                rows,
                cols,
                chords,
                seed,
            } => {
                format!("grid-with-chords {rows}x{cols} chords={chords} seed={seed}")
            }
            GraphSpec::File { path } => path.display().to_string(),
        }
    }
}

/// Empirical caps: deep faces meet at most `a|Z'| + b` contracted
/// components and quotient widths stay below `c (p + |Z'| + 1)`. The
/// weighted annulus diameter is held below `diameter (p' + |Z'| + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Caps {
    pub a: usize,
    pub b: usize,
    pub c: f64,
    pub diameter: f64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            a: 4,
            b: 4,
            c: 12.0,
            diameter: 8.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub instances: usize,
    pub max_n: usize,
    pub max_k: usize,
    pub drop: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            instances: 0,
            max_n: 12,
            max_k: 2,
            drop: 0.3,
        }
    }
}

/// A decomposition in the PACE-style text format, given inline or by path,
/// to be validated against a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TdFixture {
    pub graph: GraphSpec,
    #[serde(default)]
    pub td: Option<String>,
    #[serde(default)]
    pub td_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub seed: u64,
    pub graphs: Vec<GraphSpec>,
    pub p_values: Vec<usize>,
    pub max_zprime: usize,
    pub samples_per_size: usize,
    /// Support-tree properties are checked on graphs up to this size.
    pub support_max_n: usize,
    /// Zero-weight diameters are compared with plain BFS up to this size.
    pub diameter_max_n: usize,
    pub oracle: OracleConfig,
    pub td_fixtures: Vec<TdFixture>,
    pub caps: Caps,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            graphs: Vec::new(),
            p_values: vec![2, 3],
            max_zprime: 3,
            samples_per_size: 2,
            support_max_n: 60,
            diameter_max_n: 20,
            oracle: OracleConfig::default(),
            td_fixtures: Vec::new(),
            caps: Caps::default(),
        }
    }
}

impl VerifyConfig {
    /// The corpus used when `verify` gets no config file.
    pub fn default_corpus() -> Self {
        let mut graphs = vec![
            GraphSpec::Cycle { n: 4 },
            GraphSpec::Cycle { n: 9 },
            GraphSpec::Grid { rows: 5, cols: 5 },
            GraphSpec::Grid { rows: 7, cols: 7 },
            GraphSpec::Grid { rows: 10, cols: 10 },
            GraphSpec::GridWithChords {
                rows: 6,
                cols: 6,
                chords: 6,
                seed: 1,
            },
        ];
        for seed in 0..6 {
            graphs.push(GraphSpec::RandomPlanar {
                n: 20 + 8 * seed as usize,
                drop: 0.25,
                seed,
            });
        }
        graphs.push(GraphSpec::RandomPlanar {
            n: 200,
            drop: 0.2,
            seed: 7,
        });
        VerifyConfig {
            graphs,
            p_values: vec![2, 3, 4],
            oracle: OracleConfig {
                instances: 40,
                ..OracleConfig::default()
            },
            ..VerifyConfig::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("verify config: {e}")))
    }
}

/// Largest values seen across the corpus.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Maxima {
    pub deep_components: usize,
    /// Largest `components - a|Z'|` over deep faces; at most `b` when the
    /// cap holds.
    pub deep_excess: i64,
    pub width: usize,
    pub width_ratio: f64,
    pub weighted_diameter: u64,
    pub diameter_ratio: f64,
}

impl Maxima {
    fn merge(&mut self, o: &Maxima) {
        self.deep_components = self.deep_components.max(o.deep_components);
        self.deep_excess = self.deep_excess.max(o.deep_excess);
        self.width = self.width.max(o.width);
        self.width_ratio = self.width_ratio.max(o.width_ratio);
        self.weighted_diameter = self.weighted_diameter.max(o.weighted_diameter);
        self.diameter_ratio = self.diameter_ratio.max(o.diameter_ratio);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ItemReport {
    pub id: usize,
    pub name: String,
    pub n: usize,
    pub m: usize,
    /// Checks per suite.
    pub checks: BTreeMap<String, usize>,
    pub maxima: Maxima,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct OracleReport {
    pub instances: usize,
    pub feasible: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub seed: u64,
    pub caps: Option<Caps>,
    pub items: Vec<ItemReport>,
    pub maxima: Maxima,
    pub oracle: OracleReport,
    pub td_fixtures: Vec<Vec<String>>,
    pub failures: usize,
}

pub fn run_verify(cfg: &VerifyConfig) -> VerifyReport {
    let items: Vec<ItemReport> = cfg
        .graphs
        .par_iter()
        .enumerate()
        .map(|(id, spec)| {
            let mut item = ItemReport {
                id,
                name: spec.name(),
                ..ItemReport::default()
            };
            if let Err(e) = verify_graph(cfg, spec, &mut item) {
                item.failures.push(format!("error: {e}"));
            }
            item
        })
        .collect();
    let oracle = oracle_suite(cfg);
    let td_fixtures: Vec<Vec<String>> = cfg.td_fixtures.iter().map(check_fixture).collect();

    let mut maxima = Maxima::default();
    for it in &items {
        maxima.merge(&it.maxima);
    }
    let failures = items.iter().map(|i| i.failures.len()).sum::<usize>()
        + oracle.failures.len()
        + td_fixtures.iter().map(Vec::len).sum::<usize>();
    let empty = cfg.graphs.is_empty() && cfg.oracle.instances == 0 && cfg.td_fixtures.is_empty();
    VerifyReport {
        ok: failures == 0,
        seed: cfg.seed,
        caps: (!empty).then_some(cfg.caps),
        items,
        maxima,
        oracle,
        td_fixtures,
        failures,
    }
}

fn bump(item: &mut ItemReport, suite: &str) {
    *item.checks.entry(suite.to_string()).or_default() += 1;
}

fn verify_graph(cfg: &VerifyConfig, spec: &GraphSpec, item: &mut ItemReport) -> Result<()> {
    let gf = spec.load()?;
    let pg = gf.plane_graph()?;
    let g = &pg.graph;
    item.n = gf.graph.n();
    item.m = gf.graph.m();
    for &p in &cfg.p_values {
        let (l, plan, sets) = decompose_layers(&pg, p)?;
        check_layering(g, &l, &plan, &sets, item);
        bump(item, "layering");
        let opts = ReportOptions {
            max_zprime: cfg.max_zprime,
            samples_per_size: cfg.samples_per_size,
            seed: cfg.seed ^ p as u64,
        };
        let requests = sample_requests(&sets, opts);
        for req in &requests {
            let z = sets.get(req.i)?;
            let zp = req.z_prime.len();
            // with p' = 1 contracted components may span two layers, which
            // the support tree separates by construction
            if plan.p_prime < 2 {
                bump(item, "support_tree_skipped");
            } else if g.n() <= cfg.support_max_n {
                let tree = build_support_tree(g, &l, &plan, req.i)?;
                let contracted: BTreeSet<_> = z.difference(&req.z_prime).copied().collect();
                for e in tree.check(g, &contracted) {
                    item.failures
                        .push(format!("support tree p={p} i={} |Z'|={zp}: {e}", req.i));
                }
                bump(item, "support_tree");
            }
            deep_face_suite(cfg, &pg, &l, &plan, z, req, item)?;

            let q = contract_decomposition(g, &sets, req)?;
            let td = heuristic_decompose(&q.graph);
            check_td(
                &td,
                &q.graph,
                &format!("quotient p={p} i={} |Z'|={zp}", req.i),
                item,
            );
            let width = td.width();
            let ratio = width as f64 / (p + zp + 1) as f64;
            item.maxima.width = item.maxima.width.max(width);
            item.maxima.width_ratio = item.maxima.width_ratio.max(ratio);
            if ratio > cfg.caps.c {
                item.failures.push(format!(
                    "quotient width {width} exceeds {} * (p + |Z'| + 1) at p={p} i={} |Z'|={zp}",
                    cfg.caps.c, req.i
                ));
            }
            bump(item, "treewidth");
        }
    }
    if !gf.graph.apex_set().is_empty() {
        let td = heuristic_decompose(g).add_apices(gf.graph.apex_set());
        check_td(&td, &gf.graph, "apex-augmented", item);
    }
    Ok(())
}

fn check_layering(
    g: &Graph,
    l: &Layering,
    plan: &ResiduePlan,
    sets: &LayerSets,
    item: &mut ItemReport,
) {
    let mut seen = BTreeSet::new();
    for (idx, layer) in l.layers.iter().enumerate() {
        for &v in layer {
            if !seen.insert(v) {
                item.failures.push(format!("vertex {v} in two layers"));
            }
            if l.ell.get(&v) != Some(&(idx + 1)) {
                item.failures.push(format!(
                    "vertex {v} listed in L_{} but has layer {:?}",
                    idx + 1,
                    l.ell.get(&v)
                ));
            }
        }
    }
    if seen != g.vertex_set() {
        item.failures
            .push("layers do not cover the vertex set".into());
    }
    for (u, v) in g.edges() {
        let (a, b) = (l.ell[&u], l.ell[&v]);
        if a.abs_diff(b) > 1 {
            item.failures
                .push(format!("edge ({u}, {v}) spans layers {a} and {b}"));
        }
    }
    let mut union = BTreeSet::new();
    for (idx, z) in sets.z.iter().enumerate() {
        let r = plan.good_residues[idx];
        let expect: BTreeSet<_> = l
            .ell
            .iter()
            .filter(|&(_, &e)| residue(e, plan.p_prime) == r)
            .map(|(&v, _)| v)
            .collect();
        if *z != expect {
            item.failures
                .push(format!("Z_{} differs from its congruence class", idx + 1));
        }
        if !union.is_disjoint(z) {
            item.failures
                .push(format!("Z_{} overlaps an earlier set", idx + 1));
        }
        union.extend(z.iter().copied());
    }
}

fn deep_face_suite(
    cfg: &VerifyConfig,
    pg: &PlaneGraph,
    l: &Layering,
    plan: &ResiduePlan,
    z: &BTreeSet<usize>,
    req: &ContractionRequest,
    item: &mut ItemReport,
) -> Result<()> {
    let zp = req.z_prime.len();
    let cap = cfg.caps.a * zp + cfg.caps.b;
    for ann in annuli(l, plan, req.i)? {
        for e in &pg.components {
            let fc = classify_faces(e, l, z, &req.z_prime, ann);
            if fc.vertices.is_empty() {
                continue;
            }
            let deep = fc.max_deep_components();
            item.maxima.deep_components = item.maxima.deep_components.max(deep);
            item.maxima.deep_excess = item
                .maxima
                .deep_excess
                .max(deep as i64 - (cfg.caps.a * zp) as i64);
            if deep > cap {
                item.failures.push(format!(
                    "deep face meets {deep} components, cap {cap}, at i={} |Z'|={zp} annulus {}..={}",
                    req.i, ann.lo, ann.hi
                ));
            }
            bump(item, "deep_face");

            let diam = weighted_diameter(&fc);
            let ratio = diam as f64 / (plan.p_prime + zp + 1) as f64;
            item.maxima.weighted_diameter = item.maxima.weighted_diameter.max(diam);
            item.maxima.diameter_ratio = item.maxima.diameter_ratio.max(ratio);
            if ratio > cfg.caps.diameter {
                item.failures.push(format!(
                    "weighted diameter {diam} exceeds {} * (p' + |Z'| + 1) at i={} annulus {}..={}",
                    cfg.caps.diameter, req.i, ann.lo, ann.hi
                ));
            }
            if pg.graph.n() <= cfg.diameter_max_n {
                let vfi = fc.vfi();
                let zero: BTreeMap<_, _> = fc.faces.iter().map(|f| (f.id, 0)).collect();
                if vfi.diameter(Some(&zero)) != vfi.diameter(None) {
                    item.failures.push(format!(
                        "zero-weight diameter differs from unweighted at annulus {}..={}",
                        ann.lo, ann.hi
                    ));
                }
            }
            bump(item, "diameter");
        }
    }
    Ok(())
}

fn check_td(td: &TreeDecomposition, g: &Graph, what: &str, item: &mut ItemReport) {
    let v = td.validate(g);
    for viol in &v.violations {
        item.failures.push(format!("{what}: {viol:?}"));
    }
    match to_nice(td) {
        Ok(nice) => {
            if nice.width() != td.width() {
                item.failures.push(format!(
                    "{what}: nice form has width {} instead of {}",
                    nice.width(),
                    td.width()
                ));
            }
            for e in nice.check_nice() {
                item.failures.push(format!("{what}: nice form: {e}"));
            }
            if !nice.as_tree_decomposition().validate(g).valid {
                item.failures
                    .push(format!("{what}: nice form is not a decomposition"));
            }
        }
        Err(e) => item.failures.push(format!("{what}: {e}")),
    }
    bump(item, "decomposition");
}

fn oracle_suite(cfg: &VerifyConfig) -> OracleReport {
    let oc = &cfg.oracle;
    let results: Vec<(bool, Vec<String>)> = (0..oc.instances)
        .into_par_iter()
        .map(|idx| {
            let seed = cfg.seed.wrapping_mul(1_000_003).wrapping_add(idx as u64);
            let n = 3 + (idx % oc.max_n.saturating_sub(2).max(1));
            let k = idx / 2 % (oc.max_k + 1);
            let problem = if idx % 2 == 0 {
                ProblemKind::Oct
            } else {
                ProblemKind::Eb
            };
            let mut errs = Vec::new();
            let tag = format!("instance {idx} ({problem:?}, n={n}, k={k}, seed={seed})");
            let g = match generate(GraphKind::RandomPlanar { n, drop: oc.drop }, seed) {
                Ok(g) => g.graph,
                Err(e) => return (false, vec![format!("{tag}: {e}")]),
            };
            let inst = Instance::new(g, problem, k);
            let want = brute_force(&inst);
            match baker_solve(&inst, None, BakerOptions::default()) {
                Ok(out) => {
                    if out.solution.as_ref().map(|s| s.size) != want.as_ref().map(|s| s.size) {
                        errs.push(format!(
                            "{tag}: baker {:?} vs brute force {:?}",
                            out.solution, want
                        ));
                    }
                    if let Some(s) = &out.solution {
                        if !inst.is_solution(s) {
                            errs.push(format!("{tag}: baker answer is not a solution"));
                        }
                    }
                }
                Err(e) => errs.push(format!("{tag}: baker: {e}")),
            }
            let plain =
                to_nice(&heuristic_decompose(&inst.graph)).and_then(|ntd| dp_solve(&inst, &ntd));
            match plain {
                Ok(sol) if sol != want => {
                    errs.push(format!("{tag}: dp {sol:?} vs brute force {want:?}"))
                }
                Ok(_) => {}
                Err(e) => errs.push(format!("{tag}: dp: {e}")),
            }
            (want.is_some(), errs)
        })
        .collect();
    OracleReport {
        instances: oc.instances,
        feasible: results.iter().filter(|r| r.0).count(),
        failures: results.into_iter().flat_map(|r| r.1).collect(),
    }
}

fn check_fixture(fx: &TdFixture) -> Vec<String> {
    let run = || -> Result<Vec<String>> {
        let g = fx.graph.load()?.graph;
        let text = match (&fx.td, &fx.td_path) {
            (Some(t), _) => t.clone(),
            (None, Some(p)) => std::fs::read_to_string(p)?,
            (None, None) => return Err(Error::Input("fixture needs `td` or `td_path`".into())),
        };
        let td = TreeDecomposition::from_pace(&text)?;
        Ok(td
            .validate(&g)
            .violations
            .iter()
            .map(|v| format!("{}: {v:?}", fx.graph.name()))
            .collect())
    };
    run().unwrap_or_else(|e| vec![format!("{}: {e}", fx.graph.name())])
}
