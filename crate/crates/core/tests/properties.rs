use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use condec::contraction::{build_support_tree, contract_decomposition, ContractionRequest};
use condec::embedding::{build_vfi, PlaneGraph};
use condec::generate::{generate, GraphKind};
use condec::io::{parse_graph, write_graph, GraphFile};
use condec::layering::{decompose_layers, residue};
use condec::solvers::{
    baker_solve, brute_force, dp_solve_contracted, BakerOptions, Candidate, Deletion, Instance,
    ProblemKind,
};
use condec::treedec::{exact_treewidth_small, heuristic_decompose, to_nice, TreeDecomposition};
use condec::{Graph, Vertex};

fn planar(n: usize, drop: f64, seed: u64) -> (Graph, PlaneGraph) {
    let g = generate(GraphKind::RandomPlanar { n, drop }, seed).unwrap();
    let pg = PlaneGraph::from_rotation(&g.graph, g.rotation, &BTreeSet::new()).unwrap();
    (g.graph, pg)
}

fn subset(g: &Graph, mask: u64) -> BTreeSet<Vertex> {
    g.vertices()
        .filter(|&v| mask >> (v % 64) & 1 == 1)
        .collect()
}

fn arb_planar(max_n: usize) -> impl Strategy<Value = (usize, f64, u64)> {
    (1..=max_n, 0.0f64..0.7, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn contraction_partitions_and_keeps_adjacency((n, drop, seed) in arb_planar(40), mask in any::<u64>()) {
        let (g, _) = planar(n, drop, seed);
        let x = subset(&g, mask);
        let q = g.contract(&x).unwrap();
        let comps = g.components_within(&x);
        prop_assert_eq!(q.graph.n(), g.n() - x.len() + comps.len());
        let mut covered = BTreeSet::new();
        for (qv, pre) in &q.preimage {
            prop_assert_eq!(*qv, pre[0]);
            for v in pre {
                prop_assert!(covered.insert(*v));
                prop_assert_eq!(q.image[v], *qv);
            }
        }
        prop_assert_eq!(covered, g.vertex_set());
        for (u, v) in g.edges() {
            let (a, b) = (q.image[&u], q.image[&v]);
            prop_assert!(a == b || q.graph.has_edge(a, b));
        }
        for (a, b) in q.graph.edges() {
            let witness = q.preimage[&a].iter().any(|&u| q.preimage[&b].iter().any(|&v| g.has_edge(u, v)));
            prop_assert!(witness);
        }
    }

    #[test]
    fn euler_formula_per_component((n, drop, seed) in arb_planar(60)) {
        let (_, pg) = planar(n, drop, seed);
        for e in &pg.components {
            let (v, m, f) = (e.graph.n() as i64, e.graph.m() as i64, e.faces.len() as i64);
            prop_assert_eq!(v - m + f, 2);
            let vfi = build_vfi(e);
            prop_assert!(vfi.is_connected());
        }
    }

    #[test]
    fn vfi_distances_are_metric((n, drop, seed) in arb_planar(25), wseed in any::<u64>()) {
        let (_, pg) = planar(n, drop, seed);
        let e = &pg.components[0];
        let vfi = build_vfi(e);
        let weights: BTreeMap<usize, u64> = e.faces.iter().map(|f| (f.id, (wseed >> (f.id % 60)) & 3)).collect();
        let zero: BTreeMap<usize, u64> = e.faces.iter().map(|f| (f.id, 0)).collect();
        let nodes = vfi.nodes().to_vec();
        let dist: Vec<Vec<Option<u64>>> = nodes.iter().map(|&a| vfi.distances_from(a, Some(&weights)).unwrap()).collect();
        for (ai, &a) in nodes.iter().enumerate() {
            prop_assert_eq!(vfi.distances_from(a, Some(&zero)).unwrap(), vfi.distances_from(a, None).unwrap());
            for bi in 0..nodes.len() {
                for ci in 0..nodes.len() {
                    let (ab, bc, ac) = (dist[ai][bi].unwrap(), dist[bi][ci].unwrap(), dist[ai][ci].unwrap());
                    prop_assert!(ac <= ab + bc);
                }
            }
        }
        prop_assert_eq!(vfi.diameter(Some(&zero)), vfi.diameter(None));
    }

    #[test]
    fn layering_invariants((n, drop, seed) in arb_planar(120), p in 1usize..6) {
        let (g, pg) = planar(n, drop, seed);
        let (l, plan, sets) = decompose_layers(&pg, p).unwrap();
        let mut seen = BTreeSet::new();
        for (i, layer) in l.layers.iter().enumerate() {
            for &v in layer {
                prop_assert!(seen.insert(v));
                prop_assert_eq!(l.ell[&v], i + 1);
            }
        }
        prop_assert_eq!(&seen, &g.vertex_set());
        for (u, v) in g.edges() {
            prop_assert!(l.ell[&u].abs_diff(l.ell[&v]) <= 1);
        }
        // vertices sharing a face sit in at most two consecutive layers
        for f in pg.faces() {
            let ls: BTreeSet<usize> = f.boundary_vertices.iter().map(|v| l.ell[v]).collect();
            if let (Some(lo), Some(hi)) = (ls.first(), ls.last()) {
                prop_assert!(hi - lo <= 1);
            }
        }
        let mut union = BTreeSet::new();
        for (idx, z) in sets.z.iter().enumerate() {
            prop_assert!(union.is_disjoint(z));
            union.extend(z.iter().copied());
            let r = plan.good_residues[idx];
            for v in g.vertices() {
                prop_assert_eq!(z.contains(&v), residue(l.ell[&v], plan.p_prime) == r);
            }
        }
    }

    #[test]
    fn support_tree_properties((n, drop, seed) in arb_planar(60), p in 2usize..6, mask in any::<u64>()) {
        let (g, pg) = planar(n, drop, seed);
        let (l, plan, sets) = decompose_layers(&pg, p).unwrap();
        for i in 1..=plan.p {
            let z = sets.get(i).unwrap();
            let zp: BTreeSet<Vertex> = z.intersection(&subset(&g, mask)).copied().collect();
            let contracted: BTreeSet<Vertex> = z.difference(&zp).copied().collect();
            let tree = build_support_tree(&g, &l, &plan, i).unwrap();
            prop_assert_eq!(tree.check(&g, &contracted), Vec::<String>::new());
            prop_assert!(tree.nodes[0].parent.is_none());
            for node in &tree.nodes[1..] {
                prop_assert_eq!(tree.nodes[node.parent.unwrap()].level + 1, node.level);
            }
            let q = contract_decomposition(&g, &sets, &ContractionRequest { i, z_prime: zp.clone() }).unwrap();
            prop_assert_eq!(&q.contracted_set, &contracted);
            prop_assert_eq!(q.graph.n(), g.n() - contracted.len() + g.components_within(&contracted).len());
        }
    }

    #[test]
    fn decompositions_are_valid_and_nice((n, drop, seed) in arb_planar(50), mask in any::<u64>()) {
        let (g, _) = planar(n, drop, seed);
        let q = g.contract(&subset(&g, mask)).unwrap();
        for h in [&g, &q.graph] {
            let td = heuristic_decompose(h);
            prop_assert!(td.validate(h).valid);
            let nice = to_nice(&td).unwrap();
            prop_assert_eq!(nice.width(), td.width());
            prop_assert_eq!(nice.check_nice(), Vec::<String>::new());
            prop_assert!(nice.as_tree_decomposition().validate(h).valid);
            let back = TreeDecomposition::from_pace(&td.to_pace(h.n())).unwrap();
            prop_assert!(back.validate(h).valid);
            prop_assert_eq!(back.width(), td.width());
        }
    }

    #[test]
    fn heuristic_is_an_upper_bound((n, drop, seed) in arb_planar(12)) {
        let (g, _) = planar(n, drop, seed);
        let exact = exact_treewidth_small(&g, 12).unwrap();
        let heur = heuristic_decompose(&g).width();
        prop_assert!(heur >= exact);
    }

    #[test]
    fn contracted_dp_matches_restricted_brute_force(
        (n, drop, seed) in arb_planar(13),
        mask in any::<u64>(),
        k in 0usize..4,
        eb in any::<bool>(),
    ) {
        let (g, _) = planar(n, drop, seed);
        let x = subset(&g, mask);
        let problem = if eb { ProblemKind::Eb } else { ProblemKind::Oct };
        let q = g.contract(&x).unwrap();
        let ntd = to_nice(&heuristic_decompose(&q.graph)).unwrap();
        let inst = Instance::new(g.clone(), problem, k);
        let got = dp_solve_contracted(&inst, &q, &ntd).unwrap();
        let candidate = match problem {
            ProblemKind::Oct => Candidate::Vertices(g.vertex_set().difference(&x).copied().collect()),
            ProblemKind::Eb => Candidate::Edges(
                g.edges().filter(|(u, v)| !(x.contains(u) && x.contains(v) && q.image[u] == q.image[v])).collect(),
            ),
        };
        let restricted = Instance::with_candidate(g, problem, k, candidate).unwrap();
        let want = brute_force(&restricted);
        prop_assert_eq!(&got, &want);
        if let Some(s) = &got {
            prop_assert!(restricted.is_solution(s));
        }
    }

    #[test]
    fn baker_is_sound_monotone_and_covered((n, drop, seed) in arb_planar(12), eb in any::<bool>()) {
        let (g, _) = planar(n, drop, seed);
        let problem = if eb { ProblemKind::Eb } else { ProblemKind::Oct };
        let mut prev: Option<usize> = None;
        for k in 0..=3 {
            let inst = Instance::new(g.clone(), problem, k);
            let out = baker_solve(&inst, None, BakerOptions::default()).unwrap();
            if let Some(s) = &out.solution {
                prop_assert!(inst.is_solution(s));
            }
            if let Some(size) = prev {
                prop_assert_eq!(out.solution.as_ref().map(|s| s.size), Some(size));
            }
            prev = out.solution.as_ref().map(|s| s.size);
            prop_assert_eq!(&out.solution, &brute_force(&inst));

            // some Z_i meets the optimum in at most k/p vertices
            if let (Some(s), ProblemKind::Oct) = (&out.solution, problem) {
                let Deletion::Vertices(vs) = &s.deleted else { unreachable!() };
                let pg = PlaneGraph::embed(&g).unwrap();
                let (_, plan, sets) = decompose_layers(&pg, out.stats.p).unwrap();
                let hit = sets.z.iter().any(|z| vs.iter().filter(|v| z.contains(v)).count() <= k / plan.p);
                prop_assert!(hit);
            }
        }
    }

    #[test]
    fn graph_files_round_trip((n, drop, seed) in arb_planar(40)) {
        let g = generate(GraphKind::RandomPlanar { n, drop }, seed).unwrap();
        let again = generate(GraphKind::RandomPlanar { n, drop }, seed).unwrap();
        prop_assert_eq!(&g.graph, &again.graph);
        prop_assert_eq!(&g.rotation, &again.rotation);
        let gf = GraphFile { graph: g.graph, rotation: Some(g.rotation), marked: BTreeSet::new() };
        let parsed = parse_graph(&write_graph(&gf).unwrap()).unwrap();
        prop_assert_eq!(&parsed.graph, &gf.graph);
        // a graph without edges has no rotation lines
        prop_assert_eq!(parsed.rotation.unwrap_or_default(), gf.rotation.unwrap());
    }
}

// With p' = 1 every layer is contracted, so a contracted component may span
// two consecutive layers and therefore two support-tree nodes; only the
// partition and edge properties survive.
#[test]
fn single_residue_splits_components_across_levels() {
    let g = condec::generate::grid(3, 3).unwrap();
    let pg = PlaneGraph::from_rotation(&g.graph, g.rotation, &BTreeSet::new()).unwrap();
    let (l, plan, sets) = decompose_layers(&pg, 1).unwrap();
    assert_eq!((plan.p_prime, l.m), (1, 2));
    let tree = build_support_tree(&g.graph, &l, &plan, 1).unwrap();
    let errs = tree.check(&g.graph, sets.get(1).unwrap());
    assert_eq!(errs.len(), 1);
    assert!(errs[0].contains("spreads over"));
    assert!(tree.check(&g.graph, &BTreeSet::new()).is_empty());
}
