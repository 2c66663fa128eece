//! Depth-first spanning tree of a rooted component, augmented with its
//! back-edges.

use crate::graph::{RootedComponent, VertexRef};

pub(crate) const NONE: u32 = u32::MAX;

/// A non-tree edge oriented from the deeper endpoint to its ancestor.
/// Self-loops have `descendant == ancestor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BackEdge {
    pub edge: u32,
    pub descendant: u32,
    pub ancestor: u32,
}

impl BackEdge {
    pub fn is_self_loop(&self) -> bool {
        self.descendant == self.ancestor
    }
}

#[derive(Debug, Clone)]
pub struct SpanningTree<'g> {
    graph: &'g RootedComponent,
    dfsnum: Vec<u32>,
    order: Vec<u32>,
    /// Largest dfsnum inside each vertex's subtree.
    last: Vec<u32>,
    parent_edge: Vec<u32>,
    is_tree: Vec<bool>,
    back_edges: Vec<BackEdge>,
}

impl<'g> SpanningTree<'g> {
    /// Iterative pre-order DFS from the component root. Neighbors are taken in
    /// the component's incidence order, so the tree is fully deterministic.
    pub fn build(graph: &'g RootedComponent) -> Self {
        let n = graph.vertex_count();
        let m = graph.edge_count();
        let mut dfsnum = vec![NONE; n];
        let mut order = Vec::with_capacity(n);
        let mut last = vec![NONE; n];
        let mut parent_edge = vec![NONE; n];
        let mut is_tree = vec![false; m];
        let mut classified = vec![false; m];
        let mut back_edges = Vec::with_capacity(m.saturating_sub(n) + 1);

        if n > 0 {
            let root = graph.root();
            dfsnum[root as usize] = 0;
            order.push(root);
            let mut stack: Vec<(u32, usize)> = vec![(root, 0)];
            while let Some(top) = stack.last_mut() {
                let v = top.0;
                let incident = graph.incident(v);
                if top.1 == incident.len() {
                    last[v as usize] = order.len() as u32 - 1;
                    stack.pop();
                    continue;
                }
                let e = incident[top.1];
                top.1 += 1;
                if classified[e as usize] {
                    continue;
                }
                classified[e as usize] = true;
                let w = graph.edge(e).other(v);
                if dfsnum[w as usize] == NONE {
                    is_tree[e as usize] = true;
                    parent_edge[w as usize] = e;
                    dfsnum[w as usize] = order.len() as u32;
                    order.push(w);
                    stack.push((w, 0));
                } else {
                    // w is on the stack: an ancestor of v, or v itself.
                    back_edges.push(BackEdge {
                        edge: e,
                        descendant: v,
                        ancestor: w,
                    });
                }
            }
        }
        debug_assert_eq!(order.len(), n, "component is not connected");

        SpanningTree {
            graph,
            dfsnum,
            order,
            last,
            parent_edge,
            is_tree,
            back_edges,
        }
    }

    pub fn graph(&self) -> &'g RootedComponent {
        self.graph
    }

    pub fn root(&self) -> u32 {
        self.graph.root()
    }

    pub fn vertex_count(&self) -> usize {
        self.order.len()
    }

    pub fn dfsnum(&self, v: u32) -> u32 {
        self.dfsnum[v as usize]
    }

    /// Vertices in discovery order.
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn enter(&self, v: u32) -> u32 {
        self.dfsnum[v as usize]
    }

    pub fn exit(&self, v: u32) -> u32 {
        self.last[v as usize]
    }

    pub fn parent_edge(&self, v: u32) -> Option<u32> {
        let e = self.parent_edge[v as usize];
        (e != NONE).then_some(e)
    }

    pub fn parent(&self, v: u32) -> Option<u32> {
        self.parent_edge(v).map(|e| self.graph.edge(e).other(v))
    }

    pub fn is_tree_edge(&self, e: u32) -> bool {
        self.is_tree[e as usize]
    }

    pub fn back_edges(&self) -> &[BackEdge] {
        &self.back_edges
    }

    pub fn tree_edges(&self) -> impl Iterator<Item = u32> + '_ {
        self.order.iter().filter_map(|&v| self.parent_edge(v))
    }

    /// Deeper endpoint of a tree edge.
    pub fn lower(&self, tree_edge: u32) -> u32 {
        let e = self.graph.edge(tree_edge);
        if self.dfsnum[e.a as usize] > self.dfsnum[e.b as usize] {
            e.a
        } else {
            e.b
        }
    }

    /// Shallower endpoint of a tree edge.
    pub fn upper(&self, tree_edge: u32) -> u32 {
        self.graph.edge(tree_edge).other(self.lower(tree_edge))
    }

    /// Children of `v` in discovery order, paired with the connecting tree edge.
    pub fn children(&self, v: u32) -> impl Iterator<Item = (u32, u32)> + '_ {
        let parent = self.parent_edge[v as usize];
        self.graph.incident(v).iter().filter_map(move |&e| {
            if e == parent || !self.is_tree[e as usize] {
                return None;
            }
            Some((e, self.graph.edge(e).other(v)))
        })
    }

    /// `u` lies on the root path of `v` (reflexive).
    pub fn is_ancestor(&self, u: u32, v: u32) -> bool {
        self.enter(u) <= self.enter(v) && self.exit(v) <= self.exit(u)
    }

    pub fn is_ancestor_ref(&self, u: VertexRef, v: VertexRef) -> bool {
        match (self.graph.local_vertex(u), self.graph.local_vertex(v)) {
            (Some(u), Some(v)) => self.is_ancestor(u, v),
            _ => false,
        }
    }

    /// Checks the structural invariants of the tree.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.graph.vertex_count();
        if self.order.len() != n {
            return Err(format!("tree spans {} of {} vertices", self.order.len(), n));
        }
        let tree_count = self.is_tree.iter().filter(|&&t| t).count();
        if tree_count + 1 != n.max(1) {
            return Err(format!("{tree_count} tree edges for {n} vertices"));
        }
        if tree_count + self.back_edges.len() != self.graph.edge_count() {
            return Err("some edge is neither tree nor back edge".into());
        }
        for b in &self.back_edges {
            if !self.is_ancestor(b.ancestor, b.descendant) {
                return Err(format!("back edge {} does not join an ancestor", b.edge));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfa::parse_gfa_str;
    use crate::graph::{rooted_components, BiedgedGraph};

    fn rooted(text: &str) -> RootedComponent {
        let g = BiedgedGraph::from_gfa(&parse_gfa_str(text).unwrap());
        rooted_components(&g).remove(0)
    }

    fn path(k: usize) -> String {
        let mut s = String::new();
        for i in 0..k {
            s.push_str(&format!("S\tn{i}\tA\n"));
        }
        for i in 1..k {
            s.push_str(&format!("L\tn{}\t+\tn{}\t+\t0M\n", i - 1, i));
        }
        s
    }

    #[test]
    fn path_has_no_real_back_edges() {
        // A linear chain rooted at a dummy vertex closes a single cycle via the
        // two tip edges; every other edge is a tree edge.
        let rc = rooted(&path(5));
        let t = SpanningTree::build(&rc);
        t.validate().unwrap();
        assert_eq!(t.tree_edges().count(), rc.vertex_count() - 1);
        assert_eq!(t.back_edges().len(), 1);
        assert!(rc.edge(t.back_edges()[0].edge).kind.is_dummy());
    }

    #[test]
    fn cycle_has_one_back_edge_to_root() {
        let mut text = path(4);
        text.push_str("L\tn3\t+\tn0\t+\t0M\n");
        let rc = rooted(&text);
        assert!(!rc.has_dummy_root());
        let t = SpanningTree::build(&rc);
        t.validate().unwrap();
        assert_eq!(t.tree_edges().count(), 7);
        assert_eq!(t.back_edges().len(), 1);
        let b = t.back_edges()[0];
        assert_eq!(b.ancestor, rc.root());
        assert_eq!(t.dfsnum(b.descendant), 7);
    }

    #[test]
    fn bubble_has_one_real_back_edge() {
        let rc = rooted("S\ts\tA\nS\ta\tC\nS\tb\tG\nS\tt\tT\nL\ts\t+\ta\t+\t0M\nL\ts\t+\tb\t+\t0M\nL\ta\t+\tt\t+\t0M\nL\tb\t+\tt\t+\t0M\n");
        let t = SpanningTree::build(&rc);
        t.validate().unwrap();
        let real: Vec<_> = t
            .back_edges()
            .iter()
            .filter(|b| !rc.edge(b.edge).kind.is_dummy())
            .collect();
        assert_eq!(real.len(), 1);
        assert_eq!(t.back_edges().len(), 2);
    }

    #[test]
    fn self_loop_is_back_edge_to_itself() {
        let rc = rooted("S\ta\tA\nL\ta\t+\ta\t-\t0M\n");
        let t = SpanningTree::build(&rc);
        t.validate().unwrap();
        assert_eq!(t.back_edges().len(), 1);
        assert!(t.back_edges()[0].is_self_loop());
    }

    #[test]
    fn ancestor_queries() {
        let rc = rooted("S\ts\tA\nS\ta\tC\nS\tb\tG\nL\ts\t+\ta\t+\t0M\nL\ts\t+\tb\t+\t0M\n");
        let t = SpanningTree::build(&rc);
        for v in 0..rc.vertex_count() as u32 {
            assert!(t.is_ancestor(t.root(), v));
            assert!(t.is_ancestor(v, v));
        }
        // s_end has two tree children (towards a and b): siblings
        let s_end = t.order()[2];
        let kids: Vec<_> = t.children(s_end).map(|(_, c)| c).collect();
        assert_eq!(kids.len(), 2);
        assert!(!t.is_ancestor(kids[0], kids[1]));
        assert!(!t.is_ancestor(kids[1], kids[0]));
    }

    #[test]
    fn dfsnum_is_a_bijection() {
        let rc = rooted("S\ts\tA\nS\ta\tC\nS\tb\tG\nS\tt\tT\nL\ts\t+\ta\t+\t0M\nL\ts\t+\tb\t-\t0M\nL\ta\t+\tt\t+\t0M\nL\tb\t-\tt\t+\t0M\nL\tt\t+\tt\t-\t0M\n");
        let t = SpanningTree::build(&rc);
        let mut nums: Vec<_> = (0..rc.vertex_count() as u32).map(|v| t.dfsnum(v)).collect();
        nums.sort();
        assert_eq!(nums, (0..rc.vertex_count() as u32).collect::<Vec<_>>());
    }
}
