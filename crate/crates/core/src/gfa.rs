//! GFA v1 reading and writing.
//!
//! Only segment (`S`) and link (`L`) records carry structure. Headers, paths,
//! walks, containments and unknown record types are counted and skipped.
//! Links are stored in a canonical orientation so that a link and its
//! reverse-complement spelling (`L a + b -` vs `L b + a -`) collapse into one
//! grey edge.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{self, BufRead, Write};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GfaError {
    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("line {line}: duplicate segment '{name}'")]
    DuplicateSegment { line: usize, name: String },
    #[error("line {line}: link references unknown segment '{name}'")]
    DanglingLink { line: usize, name: String },
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
}

impl GfaError {
    /// 1-based line number of the offending record, if any.
    pub fn line(&self) -> Option<usize> {
        match self {
            GfaError::MalformedRecord { line, .. }
            | GfaError::DuplicateSegment { line, .. }
            | GfaError::DanglingLink { line, .. } => Some(*line),
            GfaError::Io(_) => None,
        }
    }
}

/// Strand sign of a link endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orientation {
    Forward,
    Reverse,
}

impl Orientation {
    pub fn flip(self) -> Self {
        match self {
            Orientation::Forward => Orientation::Reverse,
            Orientation::Reverse => Orientation::Forward,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Orientation::Forward => '+',
            Orientation::Reverse => '-',
        }
    }

    fn parse(field: &str) -> Option<Self> {
        match field {
            "+" => Some(Orientation::Forward),
            "-" => Some(Orientation::Reverse),
            _ => None,
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GfaSegment {
    pub name: String,
    /// Nucleotides, or `"*"` when the sequence is omitted.
    pub sequence: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GfaLink {
    pub from_name: String,
    pub from_orient: Orientation,
    pub to_name: String,
    pub to_orient: Orientation,
    pub overlap: String,
}

impl GfaLink {
    pub fn new(from: &str, from_orient: Orientation, to: &str, to_orient: Orientation) -> Self {
        GfaLink {
            from_name: from.to_string(),
            from_orient,
            to_name: to.to_string(),
            to_orient,
            overlap: "0M".to_string(),
        }
    }

    /// The same adjacency read from the other strand.
    pub fn reversed(&self) -> Self {
        GfaLink {
            from_name: self.to_name.clone(),
            from_orient: self.to_orient.flip(),
            to_name: self.from_name.clone(),
            to_orient: self.from_orient.flip(),
            overlap: self.overlap.clone(),
        }
    }

    fn key(&self) -> (&str, char, &str, char) {
        (
            &self.from_name,
            self.from_orient.as_char(),
            &self.to_name,
            self.to_orient.as_char(),
        )
    }

    /// Lexicographically smaller of the link and its reverse.
    pub fn canonical(self) -> Self {
        let rev = self.reversed();
        if rev.key() < self.key() {
            rev
        } else {
            self
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.key() <= self.reversed().key()
    }

    fn owned_key(&self) -> (String, char, String, char) {
        let (a, x, b, y) = self.key();
        (a.to_string(), x, b.to_string(), y)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GfaDocument {
    pub segments: Vec<GfaSegment>,
    pub links: Vec<GfaLink>,
    /// Record type -> number of lines skipped (`H`, `P`, `W`, `C`, ...).
    pub skipped_line_kinds: BTreeMap<String, usize>,
    pub duplicate_links: usize,
    /// Links whose overlap was neither `0M` nor `*`.
    pub nonblunt_overlaps: usize,
}

impl GfaDocument {
    /// Checks the document-level invariants: unique segment names and
    /// resolvable link endpoints.
    pub fn validate(&self) -> Result<(), GfaError> {
        let mut names = HashSet::with_capacity(self.segments.len());
        for (i, s) in self.segments.iter().enumerate() {
            if !names.insert(s.name.as_str()) {
                return Err(GfaError::DuplicateSegment {
                    line: i + 1,
                    name: s.name.clone(),
                });
            }
        }
        for (i, l) in self.links.iter().enumerate() {
            for name in [&l.from_name, &l.to_name] {
                if !names.contains(name.as_str()) {
                    return Err(GfaError::DanglingLink {
                        line: self.segments.len() + i + 1,
                        name: name.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

fn valid_sequence(seq: &str) -> bool {
    seq == "*"
        || (!seq.is_empty()
            && seq
                .bytes()
                .all(|b| matches!(b.to_ascii_uppercase(), b'A' | b'C' | b'G' | b'T' | b'N')))
}

fn malformed(line: usize, reason: impl Into<String>) -> GfaError {
    GfaError::MalformedRecord {
        line,
        reason: reason.into(),
    }
}

/// Parses a GFA v1 stream in a single pass.
pub fn parse_gfa<R: BufRead>(mut input: R) -> Result<GfaDocument, GfaError> {
    let mut doc = GfaDocument::default();
    let mut seen_segments: HashMap<String, usize> = HashMap::new();
    let mut seen_links: HashSet<(String, char, String, char)> = HashSet::new();
    let mut link_lines: Vec<usize> = Vec::new();

    let mut buf = String::new();
    let mut lineno = 0usize;
    loop {
        buf.clear();
        if input.read_line(&mut buf)? == 0 {
            break;
        }
        lineno += 1;
        let line = buf.trim_end_matches(['\n', '\r']);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let kind = fields.next().unwrap_or_default();
        match kind {
            "S" => {
                let (Some(name), Some(seq)) = (fields.next(), fields.next()) else {
                    return Err(malformed(lineno, "S record needs a name and a sequence"));
                };
                if name.is_empty() {
                    return Err(malformed(lineno, "empty segment name"));
                }
                if !valid_sequence(seq) {
                    return Err(malformed(lineno, format!("invalid sequence for segment '{name}'")));
                }
                if seen_segments.insert(name.to_string(), lineno).is_some() {
                    return Err(GfaError::DuplicateSegment {
                        line: lineno,
                        name: name.to_string(),
                    });
                }
                doc.segments.push(GfaSegment {
                    name: name.to_string(),
                    sequence: seq.to_string(),
                });
            }
            "L" => {
                let parts: Vec<&str> = fields.by_ref().take(5).collect();
                if parts.len() < 5 {
                    return Err(malformed(lineno, "L record needs 5 fields after the type"));
                }
                let from_orient = Orientation::parse(parts[1])
                    .ok_or_else(|| malformed(lineno, format!("bad orientation '{}'", parts[1])))?;
                let to_orient = Orientation::parse(parts[3])
                    .ok_or_else(|| malformed(lineno, format!("bad orientation '{}'", parts[3])))?;
                if parts[0].is_empty() || parts[2].is_empty() {
                    return Err(malformed(lineno, "empty segment name in link"));
                }
                let overlap = parts[4];
                if overlap != "0M" && overlap != "*" {
                    doc.nonblunt_overlaps += 1;
                }
                let link = GfaLink {
                    from_name: parts[0].to_string(),
                    from_orient,
                    to_name: parts[2].to_string(),
                    to_orient,
                    overlap: overlap.to_string(),
                }
                .canonical();
                if seen_links.insert(link.owned_key()) {
                    doc.links.push(link);
                    link_lines.push(lineno);
                } else {
                    doc.duplicate_links += 1;
                }
            }
            other => {
                *doc.skipped_line_kinds.entry(other.to_string()).or_insert(0) += 1;
            }
        }
    }

    // Links may precede their segments, so endpoints are resolved at the end.
    for (link, &line) in doc.links.iter().zip(&link_lines) {
        for name in [&link.from_name, &link.to_name] {
            if !seen_segments.contains_key(name.as_str()) {
                return Err(GfaError::DanglingLink {
                    line,
                    name: name.clone(),
                });
            }
        }
    }

    if doc.duplicate_links > 0 {
        log::warn!("{} duplicate link record(s) ignored", doc.duplicate_links);
    }
    if doc.nonblunt_overlaps > 0 {
        log::warn!(
            "{} link(s) with non-blunt overlaps; overlaps are ignored",
            doc.nonblunt_overlaps
        );
    }
    Ok(doc)
}

pub fn parse_gfa_str(text: &str) -> Result<GfaDocument, GfaError> {
    parse_gfa(text.as_bytes())
}

/// Writes a header, then all segments, then all links.
pub fn write_gfa<W: Write>(doc: &GfaDocument, mut out: W) -> io::Result<()> {
    writeln!(out, "H\tVN:Z:1.0")?;
    for s in &doc.segments {
        writeln!(out, "S\t{}\t{}", s.name, s.sequence)?;
    }
    for l in &doc.links {
        writeln!(
            out,
            "L\t{}\t{}\t{}\t{}\t{}",
            l.from_name, l.from_orient, l.to_name, l.to_orient, l.overlap
        )?;
    }
    out.flush()
}

pub fn write_gfa_string(doc: &GfaDocument) -> String {
    let mut buf = Vec::new();
    write_gfa(doc, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("GFA output is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document() {
        let doc = parse_gfa_str("S\ta\tACGT\nS\tb\tG\nL\ta\t+\tb\t+\t0M\n").unwrap();
        assert_eq!(doc.segments.len(), 2);
        assert_eq!(doc.links.len(), 1);
        assert_eq!(doc.links[0], GfaLink::new("a", Orientation::Forward, "b", Orientation::Forward));
    }

    #[test]
    fn dangling_link_reports_name_and_line() {
        let err = parse_gfa_str("S\ta\tACGT\nL\ta\t+\tz\t+\t0M").unwrap_err();
        match err {
            GfaError::DanglingLink { line, name } => {
                assert_eq!(line, 2);
                assert_eq!(name, "z");
            }
            e => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn links_may_precede_segments() {
        let doc = parse_gfa_str("L\ta\t+\tb\t-\t*\nS\ta\t*\nS\tb\t*\n").unwrap();
        assert_eq!(doc.links.len(), 1);
    }

    #[test]
    fn duplicate_links_are_counted() {
        let doc = parse_gfa_str("S\ta\tA\nS\tb\tC\nL\ta\t+\tb\t+\t0M\nL\ta\t+\tb\t+\t0M\n").unwrap();
        assert_eq!(doc.links.len(), 1);
        assert_eq!(doc.duplicate_links, 1);
    }

    #[test]
    fn reversed_spelling_is_a_duplicate() {
        // a+ -> b+ read from the other strand is b- -> a-.
        let doc = parse_gfa_str("S\ta\tA\nS\tb\tC\nL\tb\t-\ta\t-\t0M\nL\ta\t+\tb\t+\t0M\n").unwrap();
        assert_eq!(doc.links.len(), 1);
        assert_eq!(doc.duplicate_links, 1);
        assert_eq!(doc.links[0].from_name, "a");
        assert!(doc.links[0].is_canonical());
    }

    #[test]
    fn skipped_records_are_counted() {
        let text = "H\tVN:Z:1.0\n# comment\nS\ta\tA\nP\tp1\ta+\t*\nW\tx\t0\tchr\t0\t1\t>a\nC\ta\t+\ta\t+\t0\t0M\n";
        let doc = parse_gfa_str(text).unwrap();
        assert_eq!(doc.skipped_line_kinds.get("H"), Some(&1));
        assert_eq!(doc.skipped_line_kinds.get("P"), Some(&1));
        assert_eq!(doc.skipped_line_kinds.get("W"), Some(&1));
        assert_eq!(doc.skipped_line_kinds.get("C"), Some(&1));
        assert_eq!(doc.segments.len(), 1);
    }

    #[test]
    fn malformed_records() {
        let cases = [
            ("S\ta\n", 1),
            ("S\ta\tACGT\nL\ta\t+\ta\n", 2),
            ("S\ta\tACGT\nL\ta\tx\ta\t+\t0M\n", 2),
            ("S\ta\tAC-T\n", 1),
            ("S\ta\tA\nS\tb\tC\n\nL\ta\t+\tb\t?\t0M\n", 4),
        ];
        for (text, line) in cases {
            let err = parse_gfa_str(text).unwrap_err();
            assert!(matches!(err, GfaError::MalformedRecord { .. }), "{text:?} -> {err}");
            assert_eq!(err.line(), Some(line), "{text:?}");
        }
    }

    #[test]
    fn duplicate_segment() {
        let err = parse_gfa_str("S\ta\tA\nS\ta\tC\n").unwrap_err();
        assert!(matches!(err, GfaError::DuplicateSegment { line: 2, .. }));
    }

    #[test]
    fn overlaps_other_than_blunt_are_counted() {
        let doc = parse_gfa_str("S\ta\tA\nS\tb\tC\nL\ta\t+\tb\t+\t5M\n").unwrap();
        assert_eq!(doc.nonblunt_overlaps, 1);
        assert_eq!(doc.links.len(), 1);
    }

    #[test]
    fn tags_are_tolerated() {
        let doc = parse_gfa_str("S\ta\tACGT\tLN:i:4\nS\tb\t*\nL\ta\t+\tb\t-\t0M\tID:Z:x\n").unwrap();
        assert_eq!(doc.segments[0].sequence, "ACGT");
        assert_eq!(doc.links.len(), 1);
    }

    #[test]
    fn write_then_parse() {
        let doc = parse_gfa_str("S\ta\tACGT\nS\tb\tG\nL\ta\t+\tb\t+\t0M\n").unwrap();
        let text = write_gfa_string(&doc);
        assert_eq!(text, "H\tVN:Z:1.0\nS\ta\tACGT\nS\tb\tG\nL\ta\t+\tb\t+\t0M\n");
        let back = parse_gfa_str(&text).unwrap();
        assert_eq!(back.segments, doc.segments);
        assert_eq!(back.links, doc.links);
    }

    #[test]
    fn empty_document_writes_no_records() {
        let text = write_gfa_string(&GfaDocument::default());
        assert!(text.lines().all(|l| !l.starts_with('S') && !l.starts_with('L')));
    }
}
