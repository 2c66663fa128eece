//! Biedged variation graphs.
//!
//! Every segment contributes two vertices (its `Start` and `End` sides) joined
//! by a black edge. Links become grey edges between sides. Analysis runs per
//! connected component on a [`RootedComponent`], a locally indexed copy that
//! may carry a synthetic dummy root wired to the component's tips.

mod compact;

pub use compact::compact;

use std::fmt;

use crate::gfa::{GfaDocument, Orientation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SegmentId(pub u32);

impl SegmentId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for SegmentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Start,
    End,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Start => Side::End,
            Side::End => Side::Start,
        }
    }

    /// Side through which a walk leaves a segment read in `orient`.
    pub fn outgoing(orient: Orientation) -> Side {
        match orient {
            Orientation::Forward => Side::End,
            Orientation::Reverse => Side::Start,
        }
    }

    /// Side through which a walk enters a segment read in `orient`.
    pub fn incoming(orient: Orientation) -> Side {
        Side::outgoing(orient).opposite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexRef {
    Side { segment: SegmentId, side: Side },
    DummyRoot,
}

impl VertexRef {
    pub fn side(segment: SegmentId, side: Side) -> Self {
        VertexRef::Side { segment, side }
    }

    pub fn segment(&self) -> Option<SegmentId> {
        match self {
            VertexRef::Side { segment, .. } => Some(*segment),
            VertexRef::DummyRoot => None,
        }
    }
}

/// Dense vertex index of a segment side: `2 * segment + side`.
#[inline]
pub(crate) fn side_index(segment: SegmentId, side: Side) -> u32 {
    segment.0 * 2 + (side == Side::End) as u32
}

#[inline]
pub(crate) fn side_of_index(v: u32) -> (SegmentId, Side) {
    (SegmentId(v / 2), if v.is_multiple_of(2) { Side::Start } else { Side::End })
}

/// The whole input graph. Grey edges are stored once, as unordered pairs of
/// side indices with the smaller index first.
#[derive(Debug, Clone)]
pub struct BiedgedGraph {
    names: Vec<String>,
    labels: Vec<Option<String>>,
    grey: Vec<(u32, u32)>,
    grey_offsets: Vec<u32>,
    grey_incidence: Vec<u32>,
    /// For compacted graphs: the original segments merged into each segment.
    provenance: Option<Vec<Vec<(String, Orientation)>>>,
}

impl BiedgedGraph {
    /// Builds a graph from names, optional labels and grey edges. Duplicate
    /// grey edges are dropped.
    pub fn new(names: Vec<String>, labels: Vec<Option<String>>, grey: Vec<(VertexRef, VertexRef)>) -> Self {
        assert_eq!(names.len(), labels.len());
        let mut pairs: Vec<(u32, u32)> = grey
            .into_iter()
            .map(|(a, b)| {
                let a = vertex_index(a);
                let b = vertex_index(b);
                (a.min(b), a.max(b))
            })
            .collect();
        let mut seen = std::collections::HashSet::with_capacity(pairs.len());
        pairs.retain(|p| seen.insert(*p));
        Self::from_pairs(names, labels, pairs, None)
    }

    fn from_pairs(
        names: Vec<String>,
        labels: Vec<Option<String>>,
        grey: Vec<(u32, u32)>,
        provenance: Option<Vec<Vec<(String, Orientation)>>>,
    ) -> Self {
        let n_vertices = names.len() * 2;
        let mut degree = vec![0u32; n_vertices + 1];
        for &(a, b) in &grey {
            degree[a as usize] += 1;
            if a != b {
                degree[b as usize] += 1;
            }
        }
        let mut offsets = vec![0u32; n_vertices + 1];
        for v in 0..n_vertices {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut fill = offsets.clone();
        let mut incidence = vec![0u32; offsets[n_vertices] as usize];
        for (e, &(a, b)) in grey.iter().enumerate() {
            incidence[fill[a as usize] as usize] = e as u32;
            fill[a as usize] += 1;
            if a != b {
                incidence[fill[b as usize] as usize] = e as u32;
                fill[b as usize] += 1;
            }
        }
        BiedgedGraph {
            names,
            labels,
            grey,
            grey_offsets: offsets,
            grey_incidence: incidence,
            provenance,
        }
    }

    /// One black edge per segment; each link `(a, x, b, y)` becomes a grey
    /// edge between the outgoing side of `a` read as `x` and the incoming side
    /// of `b` read as `y`.
    pub fn from_gfa(doc: &GfaDocument) -> Self {
        let mut index = std::collections::HashMap::with_capacity(doc.segments.len());
        let mut names = Vec::with_capacity(doc.segments.len());
        let mut labels = Vec::with_capacity(doc.segments.len());
        for (i, s) in doc.segments.iter().enumerate() {
            index.insert(s.name.as_str(), SegmentId(i as u32));
            names.push(s.name.clone());
            labels.push(if s.sequence == "*" { None } else { Some(s.sequence.clone()) });
        }
        let grey = doc
            .links
            .iter()
            .map(|l| {
                let a = index[l.from_name.as_str()];
                let b = index[l.to_name.as_str()];
                (
                    VertexRef::side(a, Side::outgoing(l.from_orient)),
                    VertexRef::side(b, Side::incoming(l.to_orient)),
                )
            })
            .collect();
        Self::new(names, labels, grey)
    }

    pub fn segment_count(&self) -> usize {
        self.names.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len() * 2
    }

    pub fn black_edge_count(&self) -> usize {
        self.names.len()
    }

    pub fn grey_edge_count(&self) -> usize {
        self.grey.len()
    }

    pub fn edge_count(&self) -> usize {
        self.black_edge_count() + self.grey_edge_count()
    }

    pub fn name(&self, s: SegmentId) -> &str {
        &self.names[s.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn label(&self, s: SegmentId) -> Option<&str> {
        self.labels[s.index()].as_deref()
    }

    pub fn segment_by_name(&self, name: &str) -> Option<SegmentId> {
        self.names.iter().position(|n| n == name).map(|i| SegmentId(i as u32))
    }

    /// Original oriented segments merged into `s` by [`compact`]; `None` for
    /// graphs that were never compacted.
    pub fn provenance(&self, s: SegmentId) -> Option<&[(String, Orientation)]> {
        self.provenance.as_ref().map(|p| p[s.index()].as_slice())
    }

    pub fn grey_edge(&self, e: usize) -> (VertexRef, VertexRef) {
        let (a, b) = self.grey[e];
        (vertex_ref(a), vertex_ref(b))
    }

    pub fn grey_edges(&self) -> impl Iterator<Item = (VertexRef, VertexRef)> + '_ {
        (0..self.grey.len()).map(|e| self.grey_edge(e))
    }

    pub(crate) fn grey_pairs(&self) -> &[(u32, u32)] {
        &self.grey
    }

    /// Grey edge ids incident to a side (a self-loop is listed once).
    pub fn grey_incident(&self, segment: SegmentId, side: Side) -> &[u32] {
        self.grey_incident_idx(side_index(segment, side))
    }

    pub(crate) fn grey_incident_idx(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.grey_incidence[self.grey_offsets[v] as usize..self.grey_offsets[v + 1] as usize]
    }

    pub fn grey_degree(&self, segment: SegmentId, side: Side) -> usize {
        self.grey_incident(segment, side).len()
    }

    /// Partition into connected components, ordered by smallest segment id.
    pub fn connected_components(&self) -> Vec<Component> {
        let n = self.segment_count();
        let mut comp_of = vec![u32::MAX; n];
        let mut components: Vec<Component> = Vec::new();
        let mut queue = Vec::new();
        for start in 0..n {
            if comp_of[start] != u32::MAX {
                continue;
            }
            let cid = components.len() as u32;
            comp_of[start] = cid;
            queue.push(start as u32);
            let mut segments = Vec::new();
            while let Some(s) = queue.pop() {
                segments.push(SegmentId(s));
                for side in [Side::Start, Side::End] {
                    let v = side_index(SegmentId(s), side);
                    for &e in self.grey_incident_idx(v) {
                        let (a, b) = self.grey[e as usize];
                        let w = if a == v { b } else { a };
                        let t = (w / 2) as usize;
                        if comp_of[t] == u32::MAX {
                            comp_of[t] = cid;
                            queue.push(t as u32);
                        }
                    }
                }
            }
            segments.sort_unstable();
            components.push(Component {
                id: cid as usize,
                segments,
                grey_edges: Vec::new(),
                tips: Vec::new(),
            });
        }
        for (e, &(a, _)) in self.grey.iter().enumerate() {
            components[comp_of[(a / 2) as usize] as usize].grey_edges.push(e);
        }
        for c in &mut components {
            c.tips = find_tips(self, c);
        }
        components
    }
}

fn vertex_index(v: VertexRef) -> u32 {
    match v {
        VertexRef::Side { segment, side } => side_index(segment, side),
        VertexRef::DummyRoot => panic!("the dummy root is not part of a BiedgedGraph"),
    }
}

fn vertex_ref(v: u32) -> VertexRef {
    let (segment, side) = side_of_index(v);
    VertexRef::Side { segment, side }
}

/// A connected component of a [`BiedgedGraph`], before rooting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub id: usize,
    /// Sorted ascending.
    pub segments: Vec<SegmentId>,
    /// Global grey edge ids, ascending.
    pub grey_edges: Vec<usize>,
    pub tips: Vec<VertexRef>,
}

impl Component {
    pub fn vertex_count(&self) -> usize {
        self.segments.len() * 2
    }

    pub fn edge_count(&self) -> usize {
        self.segments.len() + self.grey_edges.len()
    }
}

/// Sides of the component with no incident grey edge.
pub fn find_tips(g: &BiedgedGraph, c: &Component) -> Vec<VertexRef> {
    let mut tips = Vec::new();
    for &s in &c.segments {
        for side in [Side::Start, Side::End] {
            if g.grey_degree(s, side) == 0 {
                tips.push(VertexRef::side(s, side));
            }
        }
    }
    tips
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Black(SegmentId),
    /// Global grey edge id in the parent [`BiedgedGraph`].
    Grey(usize),
    /// Synthetic grey edge from the dummy root to a tip.
    Dummy,
}

impl EdgeKind {
    pub fn is_black(self) -> bool {
        matches!(self, EdgeKind::Black(_))
    }

    pub fn is_dummy(self) -> bool {
        matches!(self, EdgeKind::Dummy)
    }

    fn color_rank(self) -> u8 {
        match self {
            EdgeKind::Black(_) => 0,
            EdgeKind::Grey(_) => 1,
            EdgeKind::Dummy => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalEdge {
    pub a: u32,
    pub b: u32,
    pub kind: EdgeKind,
}

impl LocalEdge {
    pub fn other(&self, v: u32) -> u32 {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }

    pub fn is_self_loop(&self) -> bool {
        self.a == self.b
    }
}

/// A component with local vertex and edge ids and a designated DFS root.
///
/// Local vertex `2i` / `2i + 1` is the start / end side of the component's
/// `i`-th segment; the dummy root, when present, is the last vertex. Edges are
/// numbered black first (in segment order), then grey, then dummy.
#[derive(Debug, Clone)]
pub struct RootedComponent {
    pub id: usize,
    segments: Vec<SegmentId>,
    has_dummy: bool,
    edges: Vec<LocalEdge>,
    offsets: Vec<u32>,
    incidence: Vec<u32>,
    root: u32,
    tips: Vec<VertexRef>,
}

/// Adds a dummy root joined to every tip by a dummy grey edge. Components
/// without tips are rooted at the start side of their smallest segment.
pub fn attach_dummy_root(g: &BiedgedGraph, c: &Component) -> RootedComponent {
    let k = c.segments.len();
    let has_dummy = !c.tips.is_empty();
    let n_vertices = 2 * k + has_dummy as usize;
    let local = |v: u32| -> u32 {
        let (s, side) = side_of_index(v);
        let i = c
            .segments
            .binary_search(&s)
            .expect("grey edge endpoint outside its component") as u32;
        2 * i + (side == Side::End) as u32
    };

    let mut edges = Vec::with_capacity(k + c.grey_edges.len() + c.tips.len());
    for (i, &s) in c.segments.iter().enumerate() {
        edges.push(LocalEdge {
            a: 2 * i as u32,
            b: 2 * i as u32 + 1,
            kind: EdgeKind::Black(s),
        });
    }
    for &e in &c.grey_edges {
        let (a, b) = g.grey_pairs()[e];
        edges.push(LocalEdge {
            a: local(a),
            b: local(b),
            kind: EdgeKind::Grey(e),
        });
    }
    let dummy = (2 * k) as u32;
    for t in &c.tips {
        let VertexRef::Side { segment, side } = *t else {
            unreachable!("tips are segment sides")
        };
        edges.push(LocalEdge {
            a: dummy,
            b: local(side_index(segment, side)),
            kind: EdgeKind::Dummy,
        });
    }

    let root = if has_dummy { dummy } else { 0 };
    RootedComponent::build(c.id, c.segments.clone(), has_dummy, edges, n_vertices, root, c.tips.clone())
}

impl RootedComponent {
    fn build(
        id: usize,
        segments: Vec<SegmentId>,
        has_dummy: bool,
        edges: Vec<LocalEdge>,
        n_vertices: usize,
        root: u32,
        tips: Vec<VertexRef>,
    ) -> Self {
        let mut offsets = vec![0u32; n_vertices + 1];
        for e in &edges {
            offsets[e.a as usize + 1] += 1;
            if !e.is_self_loop() {
                offsets[e.b as usize + 1] += 1;
            }
        }
        for v in 0..n_vertices {
            offsets[v + 1] += offsets[v];
        }
        let mut fill = offsets.clone();
        let mut incidence = vec![0u32; offsets[n_vertices] as usize];
        for (i, e) in edges.iter().enumerate() {
            incidence[fill[e.a as usize] as usize] = i as u32;
            fill[e.a as usize] += 1;
            if !e.is_self_loop() {
                incidence[fill[e.b as usize] as usize] = i as u32;
                fill[e.b as usize] += 1;
            }
        }
        let mut rc = RootedComponent {
            id,
            segments,
            has_dummy,
            edges,
            offsets,
            incidence,
            root,
            tips,
        };
        rc.sort_incidence();
        rc
    }

    // Black before grey before dummy, then by neighbor segment and side.
    fn sort_incidence(&mut self) {
        for v in 0..self.vertex_count() {
            let (lo, hi) = (self.offsets[v] as usize, self.offsets[v + 1] as usize);
            let mut list = std::mem::take(&mut self.incidence);
            list[lo..hi].sort_by_key(|&e| {
                let edge = self.edges[e as usize];
                let w = edge.other(v as u32);
                let (seg, side) = match self.vertex_ref(w) {
                    VertexRef::Side { segment, side } => (segment.0, side as u8),
                    VertexRef::DummyRoot => (u32::MAX, u8::MAX),
                };
                (edge.kind.color_rank(), seg, side, e)
            });
            self.incidence = list;
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn real_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| !e.kind.is_dummy()).count()
    }

    pub fn segments(&self) -> &[SegmentId] {
        &self.segments
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn has_dummy_root(&self) -> bool {
        self.has_dummy
    }

    pub fn tips(&self) -> &[VertexRef] {
        &self.tips
    }

    pub fn edge(&self, e: u32) -> &LocalEdge {
        &self.edges[e as usize]
    }

    pub fn edges(&self) -> &[LocalEdge] {
        &self.edges
    }

    /// Incident edge ids of a local vertex in DFS neighbor order.
    pub fn incident(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.incidence[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn vertex_ref(&self, v: u32) -> VertexRef {
        if self.has_dummy && v as usize == 2 * self.segments.len() {
            VertexRef::DummyRoot
        } else {
            VertexRef::side(
                self.segments[(v / 2) as usize],
                if v.is_multiple_of(2) { Side::Start } else { Side::End },
            )
        }
    }

    pub fn local_vertex(&self, v: VertexRef) -> Option<u32> {
        match v {
            VertexRef::DummyRoot => self.has_dummy.then_some(2 * self.segments.len() as u32),
            VertexRef::Side { segment, side } => {
                let i = self.segments.binary_search(&segment).ok()? as u32;
                Some(2 * i + (side == Side::End) as u32)
            }
        }
    }

    /// Local id of the black edge of `segment`.
    pub fn black_edge(&self, segment: SegmentId) -> Option<u32> {
        self.segments.binary_search(&segment).ok().map(|i| i as u32)
    }

    /// Number of grey (including dummy) edges at a vertex; a self-loop counts once.
    pub fn grey_degree(&self, v: u32) -> usize {
        self.incident(v)
            .iter()
            .filter(|&&e| !self.edges[e as usize].kind.is_black())
            .count()
    }
}

/// Splits a graph into components and roots each one.
pub fn rooted_components(g: &BiedgedGraph) -> Vec<RootedComponent> {
    g.connected_components()
        .iter()
        .map(|c| attach_dummy_root(g, c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfa::parse_gfa_str;

    fn graph(text: &str) -> BiedgedGraph {
        BiedgedGraph::from_gfa(&parse_gfa_str(text).unwrap())
    }

    fn sid(g: &BiedgedGraph, name: &str) -> SegmentId {
        g.segment_by_name(name).unwrap()
    }

    #[test]
    fn forward_link_joins_end_to_start() {
        let g = graph("S\ta\tA\nS\tb\tC\nL\ta\t+\tb\t+\t0M\n");
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.black_edge_count(), 2);
        assert_eq!(g.grey_edge_count(), 1);
        let (u, v) = g.grey_edge(0);
        assert_eq!(u, VertexRef::side(sid(&g, "a"), Side::End));
        assert_eq!(v, VertexRef::side(sid(&g, "b"), Side::Start));
    }

    #[test]
    fn inverting_link_to_self_is_a_self_loop() {
        let g = graph("S\ta\tA\nL\ta\t+\ta\t-\t0M\n");
        let (u, v) = g.grey_edge(0);
        assert_eq!(u, v);
        assert_eq!(u, VertexRef::side(SegmentId(0), Side::End));
        assert_eq!(g.grey_degree(SegmentId(0), Side::End), 1);
    }

    #[test]
    fn reverse_orientations() {
        let g = graph("S\ta\tA\nS\tb\tC\nL\ta\t-\tb\t-\t0M\n");
        let (u, v) = g.grey_edge(0);
        assert_eq!(u, VertexRef::side(SegmentId(0), Side::Start));
        assert_eq!(v, VertexRef::side(SegmentId(1), Side::End));
    }

    #[test]
    fn disjoint_segments_form_two_components() {
        let g = graph("S\ta\tA\nS\tb\tC\n");
        let cs = g.connected_components();
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0].segments, vec![SegmentId(0)]);
        assert_eq!(
            find_tips(&g, &cs[0]),
            vec![VertexRef::side(SegmentId(0), Side::Start), VertexRef::side(SegmentId(0), Side::End)]
        );
    }

    #[test]
    fn empty_graph_has_no_components() {
        let g = graph("");
        assert!(g.connected_components().is_empty());
    }

    #[test]
    fn bubble_tips() {
        let g = graph("S\ts\tA\nS\ta\tC\nS\tb\tG\nS\tt\tT\nL\ts\t+\ta\t+\t0M\nL\ts\t+\tb\t+\t0M\nL\ta\t+\tt\t+\t0M\nL\tb\t+\tt\t+\t0M\n");
        let cs = g.connected_components();
        assert_eq!(cs.len(), 1);
        assert_eq!(
            cs[0].tips,
            vec![VertexRef::side(sid(&g, "s"), Side::Start), VertexRef::side(sid(&g, "t"), Side::End)]
        );
    }

    #[test]
    fn chain_tips_and_circular_component() {
        let g = graph("S\ta\tA\nS\tb\tC\nL\ta\t+\tb\t+\t0M\n");
        let c = &g.connected_components()[0];
        assert_eq!(
            c.tips,
            vec![VertexRef::side(SegmentId(0), Side::Start), VertexRef::side(SegmentId(1), Side::End)]
        );
        let g = graph("S\ta\tA\nS\tb\tC\nL\ta\t+\tb\t+\t0M\nL\tb\t+\ta\t+\t0M\n");
        assert!(g.connected_components()[0].tips.is_empty());
    }

    #[test]
    fn dummy_root_attaches_to_every_tip() {
        let g = graph("S\ta\tA\nS\tb\tC\nL\ta\t+\tb\t+\t0M\n");
        let c = &g.connected_components()[0];
        let rc = attach_dummy_root(&g, c);
        assert_eq!(rc.vertex_count(), c.vertex_count() + 1);
        assert_eq!(rc.edge_count(), c.edge_count() + 2);
        assert_eq!(rc.vertex_ref(rc.root()), VertexRef::DummyRoot);
        // no side is greyless once the dummy edges are in place
        for v in 0..rc.vertex_count() as u32 {
            if rc.vertex_ref(v) != VertexRef::DummyRoot {
                assert!(rc.grey_degree(v) >= 1);
            }
        }
    }

    #[test]
    fn single_tip_gets_one_dummy_edge() {
        let g = graph("S\ta\tA\nS\tb\tC\nL\ta\t+\tb\t+\t0M\nL\tb\t+\tb\t+\t0M\n");
        let rc = &rooted_components(&g)[0];
        assert_eq!(rc.tips().len(), 1);
        assert_eq!(rc.edges().iter().filter(|e| e.kind.is_dummy()).count(), 1);
    }

    #[test]
    fn tipless_component_roots_at_smallest_start() {
        let g = graph("S\ta\tA\nS\tb\tC\nL\ta\t+\tb\t+\t0M\nL\tb\t+\ta\t+\t0M\n");
        let rc = &rooted_components(&g)[0];
        assert!(!rc.has_dummy_root());
        assert_eq!(rc.vertex_count(), 4);
        assert_eq!(rc.vertex_ref(rc.root()), VertexRef::side(SegmentId(0), Side::Start));
    }

    #[test]
    fn incidence_order_is_black_first() {
        let g = graph("S\ta\tA\nS\tb\tC\nS\tc\tG\nL\ta\t+\tc\t+\t0M\nL\ta\t+\tb\t+\t0M\n");
        let rc = &rooted_components(&g)[0];
        let a_end = rc.local_vertex(VertexRef::side(SegmentId(0), Side::End)).unwrap();
        let kinds: Vec<_> = rc.incident(a_end).iter().map(|&e| rc.edge(e).kind).collect();
        assert!(kinds[0].is_black());
        // b (id 1) precedes c (id 2)
        let n1 = rc.vertex_ref(rc.edge(rc.incident(a_end)[1]).other(a_end));
        assert_eq!(n1.segment(), Some(SegmentId(1)));
    }
}
