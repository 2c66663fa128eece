//! Flubble trees and hairpin inversions in pangenome variation graphs.
//!
//! The pipeline reads a GFA file into a biedged graph, splits it into
//! connected components, roots each component (through a dummy vertex wired
//! to its tips), builds a DFS spanning tree, assigns cycle-equivalence classes
//! to all edges, and from those classes derives the flubbles, their nesting
//! tree and the hairpins. Every stage is linear in the size of the graph.

pub mod cycle_equiv;
pub mod deconstruct;
pub mod flubble;
pub mod gfa;
pub mod graph;
pub mod hairpin;
pub mod oracle;
pub mod spanning;

pub use cycle_equiv::{bracket_sets, cycle_equivalence, ClassAssignment, CycleEquivError};
pub use flubble::{build_flubble_tree, enumerate_flubbles, ChainMode, Flubble, FlubbleForest};
pub use gfa::{parse_gfa, write_gfa, GfaDocument, GfaError};
pub use graph::{BiedgedGraph, RootedComponent, SegmentId, Side, VertexRef};
pub use hairpin::{detect_hairpins, Hairpin};
pub use spanning::SpanningTree;
