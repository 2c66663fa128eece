use super::{side_index, side_of_index, BiedgedGraph, SegmentId, Side};
use crate::gfa::Orientation;

fn complement(b: u8) -> u8 {
    match b {
        b'A' => b'T',
        b'T' => b'A',
        b'C' => b'G',
        b'G' => b'C',
        b'a' => b't',
        b't' => b'a',
        b'c' => b'g',
        b'g' => b'c',
        other => other,
    }
}

pub(crate) fn reverse_complement(seq: &str) -> String {
    seq.bytes().rev().map(|b| complement(b) as char).collect()
}

/// Merges every maximal linear chain into a single segment.
///
/// A grey edge between two different segments that is the only grey edge at
/// both of its endpoints is absorbed; the merged label is the concatenation of
/// the chain read in a consistent direction, reverse-complementing segments
/// traversed backwards. A `*` label anywhere in the chain yields `*`.
/// Closed rings of such edges collapse to one segment carrying a single grey
/// edge from its end back to its start.
pub fn compact(g: &BiedgedGraph) -> BiedgedGraph {
    let n = g.segment_count();
    let grey = g.grey_pairs();

    // partner[v]: the side across v's grey edge, when that edge is mergeable.
    let mut partner = vec![u32::MAX; 2 * n];
    for &(a, b) in grey {
        if a / 2 != b / 2 && g.grey_incident_idx(a).len() == 1 && g.grey_incident_idx(b).len() == 1 {
            partner[a as usize] = b;
            partner[b as usize] = a;
        }
    }

    let mut visited = vec![false; n];
    let mut new_side = vec![u32::MAX; 2 * n];
    let mut consumed = vec![false; 2 * n];
    let mut names = Vec::new();
    let mut labels = Vec::new();
    let mut provenance = Vec::new();

    for s in 0..n as u32 {
        if visited[s as usize] {
            continue;
        }
        // Walk backwards from s (read forward) to the chain's first element.
        let (mut first, mut first_orient) = (s, Orientation::Forward);
        loop {
            let entry = side_index(SegmentId(first), Side::incoming(first_orient));
            let p = partner[entry as usize];
            if p == u32::MAX {
                break;
            }
            let (prev, exit_side) = side_of_index(p);
            let prev_orient = if exit_side == Side::End {
                Orientation::Forward
            } else {
                Orientation::Reverse
            };
            if prev.0 == s {
                // ring: start at s itself
                first = s;
                first_orient = Orientation::Forward;
                break;
            }
            first = prev.0;
            first_orient = prev_orient;
        }

        let new_id = names.len() as u32;
        let mut chain: Vec<(u32, Orientation)> = Vec::new();
        let (mut cur, mut orient) = (first, first_orient);
        loop {
            visited[cur as usize] = true;
            chain.push((cur, orient));
            let exit = side_index(SegmentId(cur), Side::outgoing(orient));
            let p = partner[exit as usize];
            if p == u32::MAX || (p / 2 == first && Side::incoming(first_orient) == side_of_index(p).1) {
                break;
            }
            let (next, entry_side) = side_of_index(p);
            consumed[exit as usize] = true;
            consumed[p as usize] = true;
            cur = next.0;
            orient = if entry_side == Side::Start {
                Orientation::Forward
            } else {
                Orientation::Reverse
            };
        }

        let (h, ho) = chain[0];
        let (t, to) = *chain.last().unwrap();
        new_side[side_index(SegmentId(h), Side::incoming(ho)) as usize] = 2 * new_id;
        new_side[side_index(SegmentId(t), Side::outgoing(to)) as usize] = 2 * new_id + 1;

        let mut label = Some(String::new());
        let mut prov = Vec::new();
        for &(seg, o) in &chain {
            let id = SegmentId(seg);
            label = match (label, g.label(id)) {
                (Some(mut acc), Some(l)) => {
                    match o {
                        Orientation::Forward => acc.push_str(l),
                        Orientation::Reverse => acc.push_str(&reverse_complement(l)),
                    }
                    Some(acc)
                }
                _ => None,
            };
            match g.provenance(id) {
                Some(inner) => match o {
                    Orientation::Forward => prov.extend(inner.iter().cloned()),
                    Orientation::Reverse => {
                        prov.extend(inner.iter().rev().map(|(nm, io)| (nm.clone(), io.flip())))
                    }
                },
                None => prov.push((g.name(id).to_string(), o)),
            }
        }
        names.push(g.name(SegmentId(h)).to_string());
        labels.push(label);
        provenance.push(prov);
    }

    let mut new_grey: Vec<(u32, u32)> = grey
        .iter()
        .filter(|&&(a, b)| !(consumed[a as usize] && consumed[b as usize] && partner[a as usize] == b))
        .map(|&(a, b)| {
            let (x, y) = (new_side[a as usize], new_side[b as usize]);
            debug_assert!(x != u32::MAX && y != u32::MAX);
            (x.min(y), x.max(y))
        })
        .collect();
    let mut seen = std::collections::HashSet::with_capacity(new_grey.len());
    new_grey.retain(|p| seen.insert(*p));

    BiedgedGraph::from_pairs(names, labels, new_grey, Some(provenance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfa::parse_gfa_str;

    fn graph(text: &str) -> BiedgedGraph {
        BiedgedGraph::from_gfa(&parse_gfa_str(text).unwrap())
    }

    #[test]
    fn forward_chain_concatenates() {
        let g = compact(&graph("S\ta\tAC\nS\tb\tGT\nL\ta\t+\tb\t+\t0M\n"));
        assert_eq!(g.segment_count(), 1);
        assert_eq!(g.label(SegmentId(0)), Some("ACGT"));
        assert_eq!(g.grey_edge_count(), 0);
    }

    #[test]
    fn inverted_link_reverse_complements() {
        let g = compact(&graph("S\ta\tAC\nS\tb\tGT\nL\ta\t+\tb\t-\t0M\n"));
        assert_eq!(g.segment_count(), 1);
        assert_eq!(g.label(SegmentId(0)), Some("ACAC"));
        assert_eq!(
            g.provenance(SegmentId(0)).unwrap(),
            &[("a".to_string(), Orientation::Forward), ("b".to_string(), Orientation::Reverse)]
        );
    }

    #[test]
    fn star_label_absorbs() {
        let g = compact(&graph("S\ta\tAC\nS\tb\t*\nL\ta\t+\tb\t+\t0M\n"));
        assert_eq!(g.label(SegmentId(0)), None);
    }

    #[test]
    fn bubble_is_unchanged() {
        let g = graph("S\ts\tA\nS\ta\tC\nS\tb\tG\nS\tt\tT\nL\ts\t+\ta\t+\t0M\nL\ts\t+\tb\t+\t0M\nL\ta\t+\tt\t+\t0M\nL\tb\t+\tt\t+\t0M\n");
        let c = compact(&g);
        assert_eq!(c.names(), g.names());
        assert_eq!(c.grey_pairs(), g.grey_pairs());
    }

    #[test]
    fn chain_inside_branch_collapses() {
        // s -> {a1 -> a2, b} -> t
        let g = graph("S\ts\tA\nS\ta1\tC\nS\ta2\tG\nS\tb\tG\nS\tt\tT\nL\ts\t+\ta1\t+\t0M\nL\ta1\t+\ta2\t+\t0M\nL\ts\t+\tb\t+\t0M\nL\ta2\t+\tt\t+\t0M\nL\tb\t+\tt\t+\t0M\n");
        let c = compact(&g);
        assert_eq!(c.segment_count(), 4);
        assert_eq!(c.grey_edge_count(), 4);
        assert_eq!(c.label(c.segment_by_name("a1").unwrap()), Some("CG"));
    }

    #[test]
    fn ring_collapses_to_one_looped_segment() {
        let g = compact(&graph("S\ta\tA\nS\tb\tC\nS\tc\tG\nL\ta\t+\tb\t+\t0M\nL\tb\t+\tc\t+\t0M\nL\tc\t+\ta\t+\t0M\n"));
        assert_eq!(g.segment_count(), 1);
        assert_eq!(g.label(SegmentId(0)), Some("ACG"));
        assert_eq!(g.grey_edge_count(), 1);
        assert_eq!(g.grey_pairs()[0], (0, 1));
    }

    #[test]
    fn chain_is_found_from_its_middle() {
        // segment ids: m=0 sits between x=1 and y=2
        let g = compact(&graph("S\tm\tC\nS\tx\tA\nS\ty\tG\nL\tx\t+\tm\t+\t0M\nL\tm\t+\ty\t+\t0M\n"));
        assert_eq!(g.segment_count(), 1);
        assert_eq!(g.label(SegmentId(0)), Some("ACG"));
        assert_eq!(g.name(SegmentId(0)), "x");
    }

    #[test]
    fn compaction_is_idempotent_here() {
        let g = graph("S\ta\tAC\nS\tb\tGT\nS\tc\tA\nS\td\tC\nL\ta\t+\tb\t-\t0M\nL\tb\t-\tc\t+\t0M\nL\tb\t-\td\t+\t0M\n");
        let once = compact(&g);
        let twice = compact(&once);
        assert_eq!(once.names(), twice.names());
        assert_eq!(once.grey_pairs(), twice.grey_pairs());
        assert_eq!(once.label(SegmentId(0)), twice.label(SegmentId(0)));
    }

    #[test]
    fn revcomp() {
        assert_eq!(reverse_complement("ACGTN"), "NACGT");
        assert_eq!(reverse_complement("GT"), "AC");
    }
}
