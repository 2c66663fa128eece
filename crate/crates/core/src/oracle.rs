//! Brute-force reference computations and seeded graph generators.
//!
//! Everything here is exponential or quadratic and meant for small graphs in
//! tests. Nothing in this module depends on the spanning tree or the
//! bracket machinery it is used to check.

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::flubble::FlubbleForest;
use crate::gfa::{GfaDocument, GfaLink, GfaSegment, Orientation};
use crate::graph::{BiedgedGraph, RootedComponent};

pub const MAX_CYCLE_EDGES: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph has {0} edges; cycle enumeration supports at most {MAX_CYCLE_EDGES}")]
    InputTooLarge(usize),
    #[error("more than {0} simple cycles")]
    CapExceeded(usize),
}

/// Plain undirected multigraph; edge ids are positions in `edges`.
#[derive(Debug, Clone)]
pub struct SmallGraph {
    pub n_vertices: usize,
    pub edges: Vec<(u32, u32)>,
    pub black: Vec<bool>,
}

impl From<&RootedComponent> for SmallGraph {
    fn from(rc: &RootedComponent) -> Self {
        SmallGraph {
            n_vertices: rc.vertex_count(),
            edges: rc.edges().iter().map(|e| (e.a, e.b)).collect(),
            black: rc.edges().iter().map(|e| e.kind.is_black()).collect(),
        }
    }
}

/// Black edges first (edge `i` is segment `i`), then grey edges.
impl From<&BiedgedGraph> for SmallGraph {
    fn from(g: &BiedgedGraph) -> Self {
        let n = g.segment_count();
        let mut edges: Vec<(u32, u32)> = (0..n as u32).map(|i| (2 * i, 2 * i + 1)).collect();
        edges.extend(g.grey_pairs().iter().copied());
        let mut black = vec![true; n];
        black.resize(edges.len(), false);
        SmallGraph {
            n_vertices: 2 * n,
            edges,
            black,
        }
    }
}

impl SmallGraph {
    fn adjacency(&self) -> Vec<Vec<(u32, u32)>> {
        let mut adj = vec![Vec::new(); self.n_vertices];
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            adj[a as usize].push((i as u32, b));
            if a != b {
                adj[b as usize].push((i as u32, a));
            }
        }
        adj
    }

    /// Component label per vertex, ignoring the edges in `removed`.
    fn components_without(&self, removed: u64) -> Vec<u32> {
        let adj = self.adjacency();
        let mut label = vec![u32::MAX; self.n_vertices];
        let mut next = 0;
        for s in 0..self.n_vertices {
            if label[s] != u32::MAX {
                continue;
            }
            label[s] = next;
            let mut stack = vec![s as u32];
            while let Some(v) = stack.pop() {
                for &(e, w) in &adj[v as usize] {
                    if removed & (1u64 << e) != 0 || label[w as usize] != u32::MAX {
                        continue;
                    }
                    label[w as usize] = next;
                    stack.push(w);
                }
            }
            next += 1;
        }
        label
    }

    pub fn cycle_vertices(&self, cycle: u64) -> BTreeSet<u32> {
        let mut vs = BTreeSet::new();
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if cycle & (1u64 << i) != 0 {
                vs.insert(a);
                vs.insert(b);
            }
        }
        vs
    }
}

/// Simple cycles as edge bitmasks. Grey self-loops are one-edge cycles and a
/// pair of parallel edges is a two-edge cycle.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CycleSet {
    pub cycles: Vec<u64>,
}

impl CycleSet {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn containing(&self, edge: u32) -> impl Iterator<Item = u64> + '_ {
        self.cycles.iter().copied().filter(move |c| c & (1u64 << edge) != 0)
    }
}

/// Exhaustive backtracking: each cycle is grown from its smallest vertex over
/// larger vertices only, and deduplicated by edge set.
pub fn enumerate_simple_cycles(g: &SmallGraph, cap: usize) -> Result<CycleSet, OracleError> {
    if g.edges.len() > MAX_CYCLE_EDGES {
        return Err(OracleError::InputTooLarge(g.edges.len()));
    }
    let adj = g.adjacency();
    let mut seen: HashSet<u64> = HashSet::new();
    let mut cycles = Vec::new();

    for (i, &(a, b)) in g.edges.iter().enumerate() {
        if a == b && seen.insert(1u64 << i) {
            cycles.push(1u64 << i);
        }
    }

    struct Search<'a> {
        adj: &'a [Vec<(u32, u32)>],
        start: u32,
        on_path: Vec<bool>,
        seen: &'a mut HashSet<u64>,
        cycles: &'a mut Vec<u64>,
        cap: usize,
    }

    impl Search<'_> {
        fn extend(&mut self, v: u32, mask: u64) -> Result<(), OracleError> {
            for &(e, w) in &self.adj[v as usize] {
                let bit = 1u64 << e;
                if mask & bit != 0 || w == v {
                    continue;
                }
                if w == self.start {
                    if self.seen.insert(mask | bit) {
                        self.cycles.push(mask | bit);
                        if self.cycles.len() > self.cap {
                            return Err(OracleError::CapExceeded(self.cap));
                        }
                    }
                } else if w > self.start && !self.on_path[w as usize] {
                    self.on_path[w as usize] = true;
                    self.extend(w, mask | bit)?;
                    self.on_path[w as usize] = false;
                }
            }
            Ok(())
        }
    }

    for s in 0..g.n_vertices as u32 {
        let mut search = Search {
            adj: &adj,
            start: s,
            on_path: vec![false; g.n_vertices],
            seen: &mut seen,
            cycles: &mut cycles,
            cap,
        };
        search.on_path[s as usize] = true;
        search.extend(s, 0)?;
    }
    if cycles.len() > cap {
        return Err(OracleError::CapExceeded(cap));
    }
    Ok(CycleSet { cycles })
}

/// Edge partition under the exact cycle-equivalence relation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReferencePartition {
    /// Classes of edges lying on at least one simple cycle, each sorted,
    /// ordered by smallest member.
    pub classes: Vec<Vec<u32>>,
    /// Edges lying on no cycle at all.
    pub acyclic: Vec<u32>,
}

/// Two edges are equivalent iff exactly the same simple cycles contain them.
pub fn reference_cycle_classes(g: &SmallGraph, cap: usize) -> Result<ReferencePartition, OracleError> {
    let cycles = enumerate_simple_cycles(g, cap)?;
    let words = cycles.len().div_ceil(64);
    let mut groups: HashMap<Vec<u64>, Vec<u32>> = HashMap::new();
    let mut acyclic = Vec::new();
    for e in 0..g.edges.len() {
        let mut sig = vec![0u64; words];
        let mut any = false;
        for (k, &c) in cycles.cycles.iter().enumerate() {
            if c & (1u64 << e) != 0 {
                sig[k / 64] |= 1u64 << (k % 64);
                any = true;
            }
        }
        if any {
            groups.entry(sig).or_default().push(e as u32);
        } else {
            acyclic.push(e as u32);
        }
    }
    let mut classes: Vec<Vec<u32>> = groups.into_values().collect();
    classes.sort();
    Ok(ReferencePartition { classes, acyclic })
}

/// True iff deleting the given black edges splits off some part `P` of the
/// graph such that no proper subset of them already separates `P`.
pub fn is_k_blackedge_disconnectable(g: &SmallGraph, edges: &[u32], k: usize) -> bool {
    assert_eq!(edges.len(), k, "edge set must have exactly k edges");
    assert!(g.edges.len() <= MAX_CYCLE_EDGES);
    if edges.iter().any(|&e| !g.black[e as usize]) {
        return false;
    }
    let full: u64 = edges.iter().fold(0, |m, &e| m | (1u64 << e));
    let label = g.components_without(full);
    let parts: BTreeSet<u32> = label.iter().copied().collect();
    if parts.len() < 2 {
        return false;
    }
    'part: for p in parts {
        for subset in 0..(1u32 << k) - 1 {
            let removed = edges
                .iter()
                .enumerate()
                .filter(|(i, _)| subset & (1 << i) != 0)
                .fold(0u64, |m, (_, &e)| m | (1u64 << e));
            let sub = g.components_without(removed);
            // P stays attached to the rest iff some P vertex shares a
            // component with a vertex outside P.
            let inside: HashSet<u32> = (0..g.n_vertices)
                .filter(|&v| label[v] == p)
                .map(|v| sub[v])
                .collect();
            let attached = (0..g.n_vertices).any(|v| label[v] != p && inside.contains(&sub[v]));
            if !attached {
                continue 'part;
            }
        }
        return true;
    }
    false
}

/// Black edges whose removal detaches, from the root, a part containing a
/// simple cycle.
pub fn reference_hairpin_stems(
    g: &SmallGraph,
    root: u32,
    cycles: &CycleSet,
) -> BTreeSet<u32> {
    let mut stems = BTreeSet::new();
    for e in 0..g.edges.len() as u32 {
        if !g.black[e as usize] {
            continue;
        }
        let label = g.components_without(1u64 << e);
        let root_label = label[root as usize];
        // A cycle avoiding e lies wholly on one side, so one vertex decides.
        let detached_cycle = cycles.cycles.iter().any(|&c| {
            c & (1u64 << e) == 0 && label[g.edges[c.trailing_zeros() as usize].0 as usize] != root_label
        });
        if detached_cycle {
            stems.insert(e);
        }
    }
    stems
}

/// Unordered boundary names, with the parent's, for order-free comparison.
pub type FlubbleSignature = BTreeSet<((String, String), Option<(String, String)>)>;

fn unordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

pub fn forest_signature(g: &BiedgedGraph, forests: &[FlubbleForest]) -> FlubbleSignature {
    let mut sig = BTreeSet::new();
    for f in forests {
        for fl in &f.flubbles {
            let parent = fl.parent.map(|p| {
                let q = &f.flubbles[p];
                unordered(g.name(q.entry), g.name(q.exit))
            });
            sig.insert((unordered(g.name(fl.entry), g.name(fl.exit)), parent));
        }
    }
    sig
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedFlubble {
    pub boundaries: (String, String),
    pub parent: Option<(String, String)>,
}

pub fn expected_signature(expected: &[ExpectedFlubble]) -> FlubbleSignature {
    expected
        .iter()
        .map(|f| {
            (
                unordered(&f.boundaries.0, &f.boundaries.1),
                f.parent.as_ref().map(|p| unordered(&p.0, &p.1)),
            )
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub seed: u64,
    pub n_segments: usize,
    /// Extra random links per segment, beyond the connecting ones.
    pub link_density: f64,
    pub tips: bool,
    pub self_loops: bool,
    pub parallel_branches: bool,
    pub nesting_depth: usize,
    pub connected: bool,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            seed: 0,
            n_segments: 8,
            link_density: 0.5,
            tips: true,
            self_loops: false,
            parallel_branches: false,
            nesting_depth: 0,
            connected: true,
        }
    }
}

struct DocBuilder {
    rng: ChaCha8Rng,
    segments: Vec<GfaSegment>,
    links: Vec<GfaLink>,
    seen: HashSet<(String, Orientation, String, Orientation)>,
}

impl DocBuilder {
    fn new(seed: u64) -> Self {
        DocBuilder {
            rng: ChaCha8Rng::seed_from_u64(seed),
            segments: Vec::new(),
            links: Vec::new(),
            seen: HashSet::new(),
        }
    }

    fn segment(&mut self, name: String) -> String {
        let len = self.rng.gen_range(1..=4);
        let sequence = (0..len).map(|_| *b"ACGT".choose(&mut self.rng).unwrap() as char).collect();
        self.segments.push(GfaSegment {
            name: name.clone(),
            sequence,
        });
        name
    }

    fn orient(&mut self) -> Orientation {
        if self.rng.gen_bool(0.5) {
            Orientation::Forward
        } else {
            Orientation::Reverse
        }
    }

    fn link(&mut self, a: &str, x: Orientation, b: &str, y: Orientation) -> bool {
        let l = GfaLink::new(a, x, b, y).canonical();
        let key = (l.from_name.clone(), l.from_orient, l.to_name.clone(), l.to_orient);
        if self.seen.insert(key) {
            self.links.push(l);
            true
        } else {
            false
        }
    }

    fn finish(self) -> GfaDocument {
        GfaDocument {
            segments: self.segments,
            links: self.links,
            ..GfaDocument::default()
        }
    }
}

/// Seeded random GFA document honoring the feature toggles.
pub fn random_biedged_graph(spec: &GeneratorSpec) -> GfaDocument {
    let mut b = DocBuilder::new(spec.seed);
    let n = spec.n_segments;
    let names: Vec<String> = (0..n).map(|i| b.segment(format!("s{i}"))).collect();
    if n == 0 {
        return b.finish();
    }

    if spec.connected {
        for i in 1..n {
            let j = b.rng.gen_range(0..i);
            let (x, y) = (b.orient(), b.orient());
            b.link(&names[j], x, &names[i], y);
        }
    }
    if spec.parallel_branches && n >= 3 {
        // Route some existing links a second way through another segment,
        // repeatedly, so branches can nest.
        for _ in 0..spec.nesting_depth.max(1) {
            let rounds = (n / 4).max(1);
            for _ in 0..rounds {
                let pick = b.rng.gen_range(0..b.links.len().max(1));
                let Some(l) = b.links.get(pick).cloned() else { break };
                let candidates: Vec<&String> =
                    names.iter().filter(|s| **s != l.from_name && **s != l.to_name).collect();
                let Some(&via) = candidates.choose(&mut b.rng) else { break };
                let via = via.clone();
                let o = b.orient();
                b.link(&l.from_name, l.from_orient, &via, o);
                b.link(&via, o, &l.to_name, l.to_orient);
            }
        }
    }
    let extra = (spec.link_density * n as f64).round() as usize;
    for _ in 0..extra {
        let i = b.rng.gen_range(0..n);
        let mut j = b.rng.gen_range(0..n);
        if i == j && !spec.self_loops {
            if n == 1 {
                continue;
            }
            j = (i + 1 + b.rng.gen_range(0..n - 1)) % n;
        }
        let (x, y) = (b.orient(), b.orient());
        b.link(&names[i], x, &names[j], y);
    }
    if spec.self_loops {
        for name in &names {
            if b.rng.gen_bool(0.15) {
                let (x, y) = (b.orient(), b.orient());
                b.link(name, x, name, y);
            }
        }
    }
    if !spec.tips {
        close_tips(&mut b, &names, spec.self_loops);
    }
    b.finish()
}

// Adds links until every segment side has a grey edge.
fn close_tips(b: &mut DocBuilder, names: &[String], self_loops: bool) {
    let n = names.len();
    let mut used: HashSet<(usize, bool)> = HashSet::new();
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mark = |used: &mut HashSet<(usize, bool)>, l: &GfaLink| {
        // outgoing side of from: End for '+'; incoming side of to: Start for '+'
        used.insert((index[l.from_name.as_str()], l.from_orient == Orientation::Forward));
        used.insert((index[l.to_name.as_str()], l.to_orient == Orientation::Reverse));
    };
    for l in &b.links {
        mark(&mut used, l);
    }
    for i in 0..n {
        for is_end in [false, true] {
            if used.contains(&(i, is_end)) {
                continue;
            }
            if n == 1 && !self_loops {
                // a lone segment can only be closed onto itself
                b.link(&names[0], Orientation::Forward, &names[0], Orientation::Forward);
                used.insert((0, true));
                used.insert((0, false));
                continue;
            }
            let mut j = b.rng.gen_range(0..n);
            if j == i && !self_loops && n > 1 {
                j = (i + 1) % n;
            }
            let from_orient = if is_end { Orientation::Forward } else { Orientation::Reverse };
            let y = b.orient();
            let l = GfaLink::new(&names[i], from_orient, &names[j], y);
            b.link(&names[i], from_orient, &names[j], y);
            mark(&mut used, &l);
        }
    }
}

/// Nested series-parallel bubbles with the flubble tree known by construction.
///
/// The top level is a chain of `chain_width` bubbles sharing boundaries. Each
/// bubble has two or three branches; below `depth`, at least one branch is
/// itself a chain of 1..=`chain_width` bubbles.
pub fn nested_bubble_generator(depth: usize, chain_width: usize, seed: u64) -> (GfaDocument, Vec<ExpectedFlubble>) {
    assert!(depth >= 1 && chain_width >= 1);
    let mut b = DocBuilder::new(seed);
    let mut expected = Vec::new();
    let mut counter = 0usize;
    series(&mut b, &mut expected, &mut counter, 1, depth, chain_width, chain_width, None);
    (b.finish(), expected)
}

#[allow(clippy::too_many_arguments)]
fn series(
    b: &mut DocBuilder,
    expected: &mut Vec<ExpectedFlubble>,
    counter: &mut usize,
    level: usize,
    depth: usize,
    width: usize,
    max_width: usize,
    parent: Option<(String, String)>,
) -> (String, String) {
    let fresh = |b: &mut DocBuilder, counter: &mut usize| {
        *counter += 1;
        b.segment(format!("n{}", *counter))
    };
    let first = fresh(b, counter);
    let mut prev = first.clone();
    for _ in 0..width {
        let next = fresh(b, counter);
        let here = (prev.clone(), next.clone());
        expected.push(ExpectedFlubble {
            boundaries: here.clone(),
            parent: parent.clone(),
        });
        let k = b.rng.gen_range(2..=3);
        let forced = (level < depth).then(|| b.rng.gen_range(0..k));
        for j in 0..k {
            let nest = level < depth && (forced == Some(j) || b.rng.gen_bool(0.3));
            if nest {
                let w = b.rng.gen_range(1..=max_width);
                let (f, l) = series(b, expected, counter, level + 1, depth, w, max_width, Some(here.clone()));
                b.link(&prev, Orientation::Forward, &f, Orientation::Forward);
                b.link(&l, Orientation::Forward, &next, Orientation::Forward);
            } else {
                let x = fresh(b, counter);
                let o = b.orient();
                b.link(&prev, Orientation::Forward, &x, o);
                b.link(&x, o, &next, Orientation::Forward);
            }
        }
        prev = next;
    }
    (first, prev)
}

/// A chain of `n_bubbles` two-branch bubbles: `3 * n_bubbles + 1` segments.
pub fn bubble_chain(n_bubbles: usize) -> GfaDocument {
    let mut doc = GfaDocument::default();
    let seg = |doc: &mut GfaDocument, name: String, seq: &str| {
        doc.segments.push(GfaSegment {
            name: name.clone(),
            sequence: seq.to_string(),
        });
        name
    };
    let fwd = Orientation::Forward;
    let mut prev = seg(&mut doc, "b0".into(), "ACGT");
    for i in 1..=n_bubbles {
        let x = seg(&mut doc, format!("x{i}"), "A");
        let y = seg(&mut doc, format!("y{i}"), "G");
        let next = seg(&mut doc, format!("b{i}"), "ACGT");
        for mid in [&x, &y] {
            doc.links.push(GfaLink::new(&prev, fwd, mid, fwd));
            doc.links.push(GfaLink::new(mid, fwd, &next, fwd));
        }
        prev = next;
    }
    doc
}

/// Shapes of loops closing a hairpin stem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopKind {
    /// Grey edge from a segment's end back onto the same end.
    SelfLoop,
    /// An extra segment whose end is joined to its own start.
    Parallel,
    /// A ring of two or three segments.
    Ring,
}

/// A nested bubble graph decorated with stem-and-loop structures and,
/// optionally, dangling tip branches. Returns the document and the names of
/// the first stem segment of each attached stem.
pub fn loop_stem_graph(seed: u64, n_stems: usize, n_dangling: usize) -> (GfaDocument, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let (doc, expected) = nested_bubble_generator(rng.gen_range(1..=2), 1, seed);
    let mut b = DocBuilder::new(seed.wrapping_add(1));
    b.segments = doc.segments;
    for l in doc.links {
        b.link(&l.from_name, l.from_orient, &l.to_name, l.to_orient);
    }
    // Keep both outer tips: a stem on an end segment would turn the whole
    // bubble graph into one more stem.
    let first = &expected[0].boundaries.0;
    let last = &expected.iter().rev().find(|f| f.parent.is_none()).unwrap().boundaries.1;
    let anchors: Vec<String> = b
        .segments
        .iter()
        .map(|s| s.name.clone())
        .filter(|n| n != first && n != last)
        .collect();
    let mut outers = Vec::new();
    for k in 0..n_stems {
        let anchor = anchors.choose(&mut rng).unwrap().clone();
        let stem_len = rng.gen_range(1..=3);
        let mut prev = (anchor, b.orient());
        let mut first = None;
        for i in 0..stem_len {
            let name = b.segment(format!("h{k}_{i}"));
            first.get_or_insert_with(|| name.clone());
            let o = b.orient();
            b.link(&prev.0, prev.1, &name, o);
            prev = (name, o);
        }
        let (last, o) = prev;
        match [LoopKind::SelfLoop, LoopKind::Parallel, LoopKind::Ring].choose(&mut rng).unwrap() {
            LoopKind::SelfLoop => {
                b.link(&last, o, &last, o.flip());
            }
            LoopKind::Parallel => {
                let name = b.segment(format!("p{k}"));
                let po = b.orient();
                b.link(&last, o, &name, po);
                b.link(&name, po, &name, po);
            }
            LoopKind::Ring => {
                let ring_len = rng.gen_range(2..=3);
                let mut cur = (last.clone(), o);
                for i in 0..ring_len {
                    let name = b.segment(format!("r{k}_{i}"));
                    let ro = b.orient();
                    b.link(&cur.0, cur.1, &name, ro);
                    cur = (name, ro);
                }
                // close the ring back onto the stem's last segment
                b.link(&cur.0, cur.1, &last, o.flip());
            }
        }
        outers.push(first.unwrap());
    }
    for k in 0..n_dangling {
        let anchor = anchors.choose(&mut rng).unwrap().clone();
        let name = b.segment(format!("tip{k}"));
        let (x, y) = (b.orient(), b.orient());
        b.link(&anchor, x, &name, y);
    }
    (b.finish(), outers)
}
