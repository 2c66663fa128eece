//! Cycle-equivalence classes of the edges of a DFS-augmented spanning tree.
//!
//! Two tree edges are cycle equivalent exactly when they are spanned by the
//! same set of back-edges ("brackets"). Bracket sets are never materialized;
//! instead each vertex keeps a linked list of open brackets and a tree edge is
//! identified by the pair (topmost bracket, list size). Capping brackets keep
//! that pair unambiguous when two subtrees both reach above a vertex.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::spanning::{SpanningTree, NONE};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CycleEquivError {
    #[error("malformed spanning tree: {0}")]
    MalformedTree(String),
    #[error("input too large for the reference computation: {edges} edges (limit {limit})")]
    InputTooLarge { edges: usize, limit: usize },
}

#[derive(Debug, Clone, Copy)]
struct BracketNode {
    prev: u32,
    next: u32,
    /// Back-edge id, or NONE for a capping bracket.
    edge: u32,
    recent_size: u32,
    recent_class: u32,
}

/// Doubly linked bracket list living in a shared arena. `top` is the most
/// recently pushed bracket.
#[derive(Debug, Clone, Copy)]
struct BracketList {
    top: u32,
    bottom: u32,
    size: u32,
}

impl BracketList {
    const EMPTY: BracketList = BracketList {
        top: NONE,
        bottom: NONE,
        size: 0,
    };
}

#[derive(Debug, Default)]
struct BracketArena {
    nodes: Vec<BracketNode>,
}

impl BracketArena {
    fn create(&mut self, edge: u32) -> u32 {
        self.nodes.push(BracketNode {
            prev: NONE,
            next: NONE,
            edge,
            recent_size: NONE,
            recent_class: NONE,
        });
        self.nodes.len() as u32 - 1
    }

    fn push(&mut self, list: &mut BracketList, b: u32) {
        self.nodes[b as usize].prev = NONE;
        self.nodes[b as usize].next = list.top;
        if list.top != NONE {
            self.nodes[list.top as usize].prev = b;
        } else {
            list.bottom = b;
        }
        list.top = b;
        list.size += 1;
    }

    fn delete(&mut self, list: &mut BracketList, b: u32) {
        let BracketNode { prev, next, .. } = self.nodes[b as usize];
        if prev != NONE {
            self.nodes[prev as usize].next = next;
        } else {
            list.top = next;
        }
        if next != NONE {
            self.nodes[next as usize].prev = prev;
        } else {
            list.bottom = prev;
        }
        self.nodes[b as usize].prev = NONE;
        self.nodes[b as usize].next = NONE;
        list.size -= 1;
    }

    /// Appends `lower` beneath `list`; `lower` must not be used afterwards.
    fn concat(&mut self, list: &mut BracketList, lower: BracketList) {
        if lower.size == 0 {
            return;
        }
        if list.size == 0 {
            *list = lower;
            return;
        }
        self.nodes[list.bottom as usize].next = lower.top;
        self.nodes[lower.top as usize].prev = list.bottom;
        list.bottom = lower.bottom;
        list.size += lower.size;
    }
}

/// Class id per edge of the component, plus bridge flags on tree edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassAssignment {
    class: Vec<u32>,
    bridge: Vec<bool>,
    n_classes: u32,
    capping_brackets: usize,
    pushes: usize,
}

impl ClassAssignment {
    pub fn class_of(&self, edge: u32) -> u32 {
        self.class[edge as usize]
    }

    pub fn is_bridge(&self, edge: u32) -> bool {
        self.bridge[edge as usize]
    }

    pub fn n_classes(&self) -> u32 {
        self.n_classes
    }

    pub fn classes(&self) -> &[u32] {
        &self.class
    }

    pub fn capping_brackets(&self) -> usize {
        self.capping_brackets
    }

    /// Total bracket pushes, real and capping.
    pub fn bracket_pushes(&self) -> usize {
        self.pushes
    }
}

/// Assigns cycle-equivalence classes to every edge of the tree's component in
/// one reverse-DFS pass.
///
/// Bridges (tree edges with no bracket) and self-loops each get a fresh
/// singleton class. Class ids are minted in processing order.
pub fn cycle_equivalence(t: &SpanningTree<'_>) -> Result<ClassAssignment, CycleEquivError> {
    t.validate().map_err(CycleEquivError::MalformedTree)?;
    let g = t.graph();
    let n = g.vertex_count();
    let m = g.edge_count();

    let mut class = vec![NONE; m];
    let mut bridge = vec![false; m];
    let mut next_class = 0u32;
    let mut mint = || {
        next_class += 1;
        next_class - 1
    };

    let mut hi = vec![NONE; n];
    let mut blist = vec![BracketList::EMPTY; n];
    let mut arena = BracketArena::default();
    arena.nodes.reserve(t.back_edges().len());
    let mut bracket_of = vec![NONE; m];
    let mut capping_at: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut capping_brackets = 0usize;
    let mut pushes = 0usize;

    for &v in t.order().iter().rev() {
        let vnum = t.dfsnum(v);

        // hi0: highest ancestor reached by a back-edge leaving v.
        let mut hi0 = NONE;
        for &e in g.incident(v) {
            if t.is_tree_edge(e) {
                continue;
            }
            let w = g.edge(e).other(v);
            if w == v {
                if class[e as usize] == NONE {
                    class[e as usize] = mint();
                }
            } else if t.dfsnum(w) < vnum {
                hi0 = hi0.min(t.dfsnum(w));
            }
        }

        let mut hi1 = NONE;
        let mut hichild = NONE;
        for (_, c) in t.children(v) {
            if hichild == NONE || hi[c as usize] < hi1 {
                hi1 = hi[c as usize];
                hichild = c;
            }
        }
        let mut hi2 = NONE;
        for (_, c) in t.children(v) {
            if c != hichild {
                hi2 = hi2.min(hi[c as usize]);
            }
        }
        hi[v as usize] = hi0.min(hi1);

        let mut list = BracketList::EMPTY;
        for (_, c) in t.children(v) {
            let child_list = std::mem::replace(&mut blist[c as usize], BracketList::EMPTY);
            arena.concat(&mut list, child_list);
        }
        for b in std::mem::take(&mut capping_at[v as usize]) {
            arena.delete(&mut list, b);
        }
        for &e in g.incident(v) {
            if t.is_tree_edge(e) {
                continue;
            }
            let w = g.edge(e).other(v);
            if w != v && t.dfsnum(w) > vnum {
                let b = bracket_of[e as usize];
                if b == NONE {
                    return Err(CycleEquivError::MalformedTree(format!(
                        "back edge {e} closed before it was opened"
                    )));
                }
                arena.delete(&mut list, b);
                if class[e as usize] == NONE {
                    class[e as usize] = mint();
                }
            }
        }
        for &e in g.incident(v) {
            if t.is_tree_edge(e) {
                continue;
            }
            let w = g.edge(e).other(v);
            if w != v && t.dfsnum(w) < vnum {
                let b = arena.create(e);
                bracket_of[e as usize] = b;
                arena.push(&mut list, b);
                pushes += 1;
            }
        }
        // Only brackets escaping above v need capping.
        if hi2 < hi0 && hi2 < vnum {
            let b = arena.create(NONE);
            arena.push(&mut list, b);
            capping_at[t.order()[hi2 as usize] as usize].push(b);
            capping_brackets += 1;
            pushes += 1;
        }

        if let Some(e) = t.parent_edge(v) {
            if list.size == 0 {
                bridge[e as usize] = true;
                class[e as usize] = mint();
            } else {
                let top = list.top as usize;
                if arena.nodes[top].recent_size != list.size {
                    arena.nodes[top].recent_size = list.size;
                    arena.nodes[top].recent_class = mint();
                }
                let c = arena.nodes[top].recent_class;
                class[e as usize] = c;
                if list.size == 1 && arena.nodes[top].edge != NONE {
                    class[arena.nodes[top].edge as usize] = c;
                }
            }
        }
        blist[v as usize] = list;
    }

    if let Some(e) = class.iter().position(|&c| c == NONE) {
        return Err(CycleEquivError::MalformedTree(format!("edge {e} left unclassified")));
    }
    Ok(ClassAssignment {
        class,
        bridge,
        n_classes: next_class,
        capping_brackets,
        pushes,
    })
}

/// Reference bracket sets: for every tree edge, the back-edges joining a
/// descendant of the edge to an ancestor of it. Quadratic; small inputs only.
pub fn bracket_sets(t: &SpanningTree<'_>) -> Result<HashMap<u32, BTreeSet<u32>>, CycleEquivError> {
    const LIMIT: usize = 200;
    let edges = t.graph().edge_count();
    if edges > LIMIT {
        return Err(CycleEquivError::InputTooLarge { edges, limit: LIMIT });
    }
    let mut sets = HashMap::new();
    for e in t.tree_edges() {
        let (upper, lower) = (t.upper(e), t.lower(e));
        let set = t
            .back_edges()
            .iter()
            .filter(|b| t.is_ancestor(b.ancestor, upper) && t.is_ancestor(lower, b.descendant))
            .map(|b| b.edge)
            .collect();
        sets.insert(e, set);
    }
    Ok(sets)
}
