//! Flubbles and the flubble tree.
//!
//! A flubble is bounded by two black tree edges of the same cycle-equivalence
//! class. Same-class black tree edges always lie on one root-to-leaf path, so
//! ordering them by depth turns a class into a chain `e0, e1, ..., ek`; by
//! default each consecutive pair is one flubble, which makes chained bubbles
//! siblings in the tree.

use thiserror::Error;

use crate::cycle_equiv::ClassAssignment;
use crate::graph::{BiedgedGraph, EdgeKind, SegmentId};
use crate::spanning::{SpanningTree, NONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChainMode {
    /// One flubble per consecutive pair of same-class boundaries.
    #[default]
    ConsecutivePairs,
    /// One flubble per class, spanning its first and last boundary.
    PerClass,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FlubbleError {
    #[error("flubble regions {0:?} and {1:?} partially overlap")]
    OverlapViolation((u32, u32), (u32, u32)),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flubble {
    pub id: usize,
    pub entry: SegmentId,
    pub exit: SegmentId,
    pub class_id: u32,
    /// Half-open interval of the region between the boundaries, in the
    /// region-ordered pre-order numbering of the spanning tree.
    pub interval: (u32, u32),
    pub parent: Option<usize>,
    /// Local edge ids of the boundaries.
    pub entry_edge: u32,
    pub exit_edge: u32,
}

/// The flubble tree of one component. Flubbles are stored in pre-order of
/// their regions, so a parent always precedes its children.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FlubbleForest {
    pub component: usize,
    pub flubbles: Vec<Flubble>,
}

impl FlubbleForest {
    pub fn len(&self) -> usize {
        self.flubbles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flubbles.is_empty()
    }

    pub fn roots(&self) -> impl Iterator<Item = &Flubble> {
        self.flubbles.iter().filter(|f| f.parent.is_none())
    }

    pub fn children(&self, id: usize) -> impl Iterator<Item = &Flubble> {
        self.flubbles.iter().filter(move |f| f.parent == Some(id))
    }
}

/// Lists flubbles from the black, non-bridge tree edges of each class.
pub fn enumerate_flubbles(t: &SpanningTree<'_>, ca: &ClassAssignment, mode: ChainMode) -> Vec<Flubble> {
    let g = t.graph();
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); ca.n_classes() as usize];
    // Discovery order visits each class's edges from shallow to deep.
    for &v in t.order() {
        let Some(e) = t.parent_edge(v) else { continue };
        if matches!(g.edge(e).kind, EdgeKind::Black(_)) && !ca.is_bridge(e) {
            buckets[ca.class_of(e) as usize].push(e);
        }
    }

    let segment = |e: u32| match g.edge(e).kind {
        EdgeKind::Black(s) => s,
        _ => unreachable!("only black edges are bucketed"),
    };
    let make = |class_id: u32, entry_edge: u32, exit_edge: u32| Flubble {
        id: 0,
        entry: segment(entry_edge),
        exit: segment(exit_edge),
        class_id,
        interval: (NONE, NONE),
        parent: None,
        entry_edge,
        exit_edge,
    };

    let mut out = Vec::new();
    for (class, edges) in buckets.iter().enumerate() {
        if edges.len() < 2 {
            continue;
        }
        match mode {
            ChainMode::ConsecutivePairs => {
                out.extend(edges.windows(2).map(|w| make(class as u32, w[0], w[1])));
            }
            ChainMode::PerClass => out.push(make(class as u32, edges[0], edges[edges.len() - 1])),
        }
    }
    for (i, f) in out.iter_mut().enumerate() {
        f.id = i;
    }
    out
}

/// Nests flubbles by region containment.
///
/// The spanning tree is re-walked so that, at every vertex on the path between
/// a flubble's boundaries, the child leading to the exit is visited last. In
/// that numbering each flubble's region is the contiguous interval
/// `[num(entry lower end), num(exit lower end))`, and the usual stack sweep
/// over intervals sorted by (start ascending, end descending) yields parents.
pub fn build_flubble_tree(
    mut flubbles: Vec<Flubble>,
    t: &SpanningTree<'_>,
) -> Result<FlubbleForest, FlubbleError> {
    let component = t.graph().id;
    if flubbles.is_empty() {
        return Ok(FlubbleForest {
            component,
            flubbles,
        });
    }
    let m = t.graph().edge_count();
    let mut opens = vec![NONE; m];
    let mut closes = vec![NONE; m];
    for (i, f) in flubbles.iter().enumerate() {
        opens[f.entry_edge as usize] = i as u32;
        closes[f.exit_edge as usize] = i as u32;
    }
    let mut enclosing = vec![NONE; flubbles.len()];
    let mut open_order = Vec::with_capacity(flubbles.len());

    // (vertex, innermost open flubble, pending children in visit order)
    let mut counter = 0u32;
    let mut stack: Vec<(u32, Vec<(u32, u32)>)> = Vec::new();
    let mut inner_at = vec![NONE; t.vertex_count()];
    let root = t.root();
    counter += 1;
    stack.push((root, ordered_children(t, root, NONE, &flubbles)));

    while let Some((_, pending)) = stack.last_mut() {
        let Some((e, c)) = pending.pop() else {
            stack.pop();
            continue;
        };
        let v = t.upper(e);
        let mut inner = inner_at[v as usize];
        let num = counter;
        counter += 1;
        let closing = closes[e as usize];
        if closing != NONE {
            if closing != inner {
                let f = &flubbles[closing as usize];
                return Err(FlubbleError::OverlapViolation(f.interval, (num, num)));
            }
            flubbles[closing as usize].interval.1 = num;
            inner = enclosing[closing as usize];
        }
        let opening = opens[e as usize];
        if opening != NONE {
            flubbles[opening as usize].interval.0 = num;
            enclosing[opening as usize] = inner;
            open_order.push(opening);
            inner = opening;
        }
        inner_at[c as usize] = inner;
        let kids = ordered_children(t, c, inner, &flubbles);
        stack.push((c, kids));
    }

    // Opening order is ascending start; equal starts cannot occur.
    let mut order: Vec<usize> = open_order.iter().map(|&i| i as usize).collect();
    order.sort_by_key(|&i| (flubbles[i].interval.0, std::cmp::Reverse(flubbles[i].interval.1)));
    let mut new_id = vec![0usize; flubbles.len()];
    for (k, &i) in order.iter().enumerate() {
        new_id[i] = k;
    }

    let mut open: Vec<usize> = Vec::new();
    let mut parents = vec![None; flubbles.len()];
    for &i in &order {
        let (start, end) = flubbles[i].interval;
        while let Some(&top) = open.last() {
            if flubbles[top].interval.1 <= start {
                open.pop();
            } else {
                break;
            }
        }
        if let Some(&top) = open.last() {
            let outer = flubbles[top].interval;
            if !(outer.0 < start && end <= outer.1) {
                return Err(FlubbleError::OverlapViolation(outer, (start, end)));
            }
            parents[i] = Some(new_id[top]);
        }
        debug_assert_eq!(parents[i], (enclosing[i] != NONE).then(|| new_id[enclosing[i] as usize]));
        open.push(i);
    }

    let mut out: Vec<Flubble> = order
        .iter()
        .map(|&i| {
            let mut f = flubbles[i].clone();
            f.id = new_id[i];
            f.parent = parents[i];
            f
        })
        .collect();
    out.sort_by_key(|f| f.id);
    Ok(FlubbleForest {
        component,
        flubbles: out,
    })
}

// Children of v to visit, as a stack (last element popped first). The child
// leading to the exit of the innermost open flubble is visited last.
fn ordered_children(t: &SpanningTree<'_>, v: u32, inner: u32, flubbles: &[Flubble]) -> Vec<(u32, u32)> {
    let mut kids: Vec<(u32, u32)> = t.children(v).collect();
    if inner != NONE {
        let exit_lower = t.lower(flubbles[inner as usize].exit_edge);
        if let Some(pos) = kids.iter().position(|&(_, c)| t.is_ancestor(c, exit_lower)) {
            let k = kids.remove(pos);
            kids.push(k);
        }
    }
    kids.reverse();
    kids
}

/// Checks that the number of flubbles does not exceed the number of edges.
pub fn flubble_count_bound_check(g: &BiedgedGraph, forests: &[FlubbleForest]) -> bool {
    let total: usize = forests.iter().map(|f| f.len()).sum();
    total <= g.edge_count()
}
