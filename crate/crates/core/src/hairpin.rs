//! Hairpin inversions: a stem of bridge edges leading into a subgraph that
//! contains a cycle. Walking into such a structure forces a return along the
//! stem in the opposite direction.

use crate::cycle_equiv::ClassAssignment;
use crate::graph::{EdgeKind, SegmentId, VertexRef};
use crate::spanning::SpanningTree;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hairpin {
    /// Stem black edge nearest the rest of the graph.
    pub outer: SegmentId,
    /// Stem black edge nearest the loop.
    pub inner: SegmentId,
    /// Local ids of the stem's bridge edges, top to bottom.
    pub stem_edges: Vec<u32>,
    /// Vertex at the bottom of the stem, where the looped subtree begins.
    pub loop_root: VertexRef,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HairpinScan {
    pub hairpins: Vec<Hairpin>,
    /// Bridge chains whose subtree holds no cycle.
    pub suppressed_tips: usize,
    /// Bridge chains made only of dummy or grey edges.
    pub suppressed_blackless: usize,
}

/// `cyclic[v]` is true iff some back-edge has both endpoints in the subtree of `v`.
pub fn mark_cyclic_subtrees(t: &SpanningTree<'_>) -> Vec<bool> {
    let mut cyclic = vec![false; t.vertex_count()];
    for b in t.back_edges() {
        cyclic[b.ancestor as usize] = true;
    }
    for &v in t.order().iter().rev() {
        if cyclic[v as usize] {
            if let Some(p) = t.parent(v) {
                cyclic[p as usize] = true;
            }
        }
    }
    cyclic
}

pub fn detect_hairpins(t: &SpanningTree<'_>, ca: &ClassAssignment) -> Vec<Hairpin> {
    scan_hairpins(t, ca).hairpins
}

/// Splits the bridge tree edges into maximal descending chains and keeps
/// the chains that hang a cyclic subtree and contain at least one black edge.
pub fn scan_hairpins(t: &SpanningTree<'_>, ca: &ClassAssignment) -> HairpinScan {
    let g = t.graph();
    let cyclic = mark_cyclic_subtrees(t);
    let n = t.vertex_count();

    let mut self_loop = vec![false; n];
    for b in t.back_edges() {
        if b.is_self_loop() {
            self_loop[b.descendant as usize] = true;
        }
    }
    let mut n_children = vec![0u32; n];
    for &v in t.order() {
        if let Some(p) = t.parent(v) {
            n_children[p as usize] += 1;
        }
    }
    // A chain runs on through v only when v is a plain pass-through vertex.
    let passes_through = |v: u32| n_children[v as usize] == 1 && !self_loop[v as usize];

    let mut scan = HairpinScan::default();
    for &v in t.order() {
        let Some(e) = t.parent_edge(v) else { continue };
        if !ca.is_bridge(e) {
            continue;
        }
        let p = t.upper(e);
        let continues = t
            .parent_edge(p)
            .is_some_and(|pe| ca.is_bridge(pe) && passes_through(p));
        if continues {
            continue;
        }

        let mut stem = vec![e];
        let mut bottom = v;
        while passes_through(bottom) {
            let (ce, c) = t.children(bottom).next().expect("one child");
            if !ca.is_bridge(ce) {
                break;
            }
            stem.push(ce);
            bottom = c;
        }

        let blacks: Vec<SegmentId> = stem
            .iter()
            .filter_map(|&s| match g.edge(s).kind {
                EdgeKind::Black(seg) => Some(seg),
                _ => None,
            })
            .collect();
        if blacks.is_empty() {
            scan.suppressed_blackless += 1;
            continue;
        }
        if !cyclic[bottom as usize] {
            scan.suppressed_tips += 1;
            continue;
        }
        let outer = blacks[0];
        let inner = if blacks.len() >= 2 {
            blacks[blacks.len() - 1]
        } else {
            first_black_below(t, bottom).unwrap_or(outer)
        };
        scan.hairpins.push(Hairpin {
            outer,
            inner,
            stem_edges: stem,
            loop_root: g.vertex_ref(bottom),
        });
    }
    scan
}

// Follows first children down from v until a black tree edge appears.
fn first_black_below(t: &SpanningTree<'_>, mut v: u32) -> Option<SegmentId> {
    loop {
        let (e, c) = t.children(v).next()?;
        if let EdgeKind::Black(s) = t.graph().edge(e).kind {
            return Some(s);
        }
        v = c;
    }
}

/// One `HAIRPIN <outer> <inner>` line per hairpin, ordered by outer name.
pub fn hairpin_report(hairpins: &[Hairpin], names: &[String]) -> Vec<String> {
    let mut rows: Vec<(&str, &str)> = hairpins
        .iter()
        .map(|h| (names[h.outer.index()].as_str(), names[h.inner.index()].as_str()))
        .collect();
    rows.sort();
    rows.into_iter()
        .map(|(o, i)| format!("HAIRPIN {o} {i}"))
        .collect()
}
