#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use povu::cycle_equiv::{bracket_sets, cycle_equivalence, ClassAssignment};
use povu::flubble::{build_flubble_tree, enumerate_flubbles, ChainMode, FlubbleForest};
use povu::gfa::GfaDocument;
use povu::graph::{rooted_components, BiedgedGraph, EdgeKind, RootedComponent};
use povu::hairpin::detect_hairpins;
use povu::oracle::{
    enumerate_simple_cycles, is_k_blackedge_disconnectable, reference_cycle_classes, reference_hairpin_stems,
    GeneratorSpec, SmallGraph,
};
use povu::SpanningTree;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CYCLE_CAP: usize = 500_000;

/// Small random graph parameters for a seed: up to 12 segments, with tips,
/// self-loops and parallel branches all switched on.
pub fn corpus_spec(seed: u64) -> GeneratorSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    GeneratorSpec {
        seed,
        n_segments: rng.gen_range(1..=12),
        link_density: rng.gen_range(0.0..=0.8),
        tips: true,
        self_loops: true,
        parallel_branches: true,
        nesting_depth: rng.gen_range(1..=2),
        connected: true,
    }
}

pub fn graph(doc: &GfaDocument) -> BiedgedGraph {
    BiedgedGraph::from_gfa(doc)
}

/// Edge partition of the non-bridge edges, by implementation class.
pub fn impl_partition(rc: &RootedComponent, ca: &ClassAssignment) -> BTreeSet<Vec<u32>> {
    let mut by_class: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for e in 0..rc.edge_count() as u32 {
        if !ca.is_bridge(e) {
            by_class.entry(ca.class_of(e)).or_default().push(e);
        }
    }
    by_class.into_values().collect()
}

pub fn non_dummy(rc: &RootedComponent, edges: impl IntoIterator<Item = u32>) -> BTreeSet<u32> {
    edges.into_iter().filter(|&e| !rc.edge(e).kind.is_dummy()).collect()
}

/// Compares implementation classes against enumerated simple cycles.
pub fn check_classes(rc: &RootedComponent) -> Result<(), String> {
    let t = SpanningTree::build(rc);
    let ca = cycle_equivalence(&t).map_err(|e| e.to_string())?;
    let reference = reference_cycle_classes(&SmallGraph::from(rc), CYCLE_CAP).map_err(|e| e.to_string())?;
    let expected: BTreeSet<Vec<u32>> = reference.classes.iter().cloned().collect();
    let got = impl_partition(rc, &ca);
    if got != expected {
        return Err(format!("classes differ: got {got:?}, expected {expected:?}"));
    }
    let bridges = non_dummy(rc, (0..rc.edge_count() as u32).filter(|&e| ca.is_bridge(e)));
    let acyclic = non_dummy(rc, reference.acyclic.iter().copied());
    if bridges != acyclic {
        return Err(format!("bridges {bridges:?} vs acyclic {acyclic:?}"));
    }
    Ok(())
}

/// Groups non-bridge tree edges by bracket set and by class; both must agree.
pub fn check_bracket_sets(rc: &RootedComponent) -> Result<(), String> {
    let t = SpanningTree::build(rc);
    let ca = cycle_equivalence(&t).map_err(|e| e.to_string())?;
    let sets = bracket_sets(&t).map_err(|e| e.to_string())?;
    let mut by_set: BTreeMap<BTreeSet<u32>, Vec<u32>> = BTreeMap::new();
    let mut by_class: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for e in t.tree_edges() {
        if ca.is_bridge(e) {
            if !sets[&e].is_empty() {
                return Err(format!("bridge {e} has brackets {:?}", sets[&e]));
            }
            continue;
        }
        by_set.entry(sets[&e].clone()).or_default().push(e);
        by_class.entry(ca.class_of(e)).or_default().push(e);
    }
    let a: BTreeSet<Vec<u32>> = by_set.into_values().map(sorted).collect();
    let b: BTreeSet<Vec<u32>> = by_class.into_values().map(sorted).collect();
    if a != b {
        return Err(format!("bracket grouping {a:?} vs class grouping {b:?}"));
    }
    Ok(())
}

fn sorted(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    v
}

pub fn forest_of(rc: &RootedComponent, mode: ChainMode) -> Result<FlubbleForest, String> {
    let t = SpanningTree::build(rc);
    let ca = cycle_equivalence(&t).map_err(|e| e.to_string())?;
    build_flubble_tree(enumerate_flubbles(&t, &ca, mode), &t).map_err(|e| e.to_string())
}

/// Every flubble boundary pair must cut the graph as a minimal pair.
pub fn check_boundaries(rc: &RootedComponent) -> Result<usize, String> {
    let forest = forest_of(rc, ChainMode::ConsecutivePairs)?;
    let sg = SmallGraph::from(rc);
    for f in &forest.flubbles {
        if !is_k_blackedge_disconnectable(&sg, &[f.entry_edge, f.exit_edge], 2) {
            return Err(format!("flubble {:?}-{:?} is not 2-blackedge-disconnectable", f.entry, f.exit));
        }
    }
    Ok(forest.len())
}

/// Compares the black stem edges of detected hairpins with the brute-force
/// set of black bridges that detach a cycle from the root.
pub fn check_hairpins(rc: &RootedComponent) -> Result<usize, String> {
    let t = SpanningTree::build(rc);
    let ca = cycle_equivalence(&t).map_err(|e| e.to_string())?;
    let hairpins = detect_hairpins(&t, &ca);
    let got: BTreeSet<u32> = hairpins
        .iter()
        .flat_map(|h| h.stem_edges.iter().copied())
        .filter(|&e| matches!(rc.edge(e).kind, EdgeKind::Black(_)))
        .collect();
    let sg = SmallGraph::from(rc);
    let cycles = enumerate_simple_cycles(&sg, CYCLE_CAP).map_err(|e| e.to_string())?;
    let expected = reference_hairpin_stems(&sg, rc.root(), &cycles);
    if got != expected {
        return Err(format!("hairpin stems {got:?} vs reference {expected:?}"));
    }
    Ok(hairpins.len())
}

pub fn components(doc: &GfaDocument) -> (BiedgedGraph, Vec<RootedComponent>) {
    let g = graph(doc);
    let rcs = rooted_components(&g);
    (g, rcs)
}
