//! The `deconstruct` workflow: GFA in, flubble forest and hairpin report out.

use std::collections::HashMap;
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::cycle_equiv::cycle_equivalence;
use crate::flubble::{build_flubble_tree, enumerate_flubbles, flubble_count_bound_check, ChainMode, FlubbleForest};
use crate::gfa::{parse_gfa, GfaError};
use crate::graph::{attach_dummy_root, compact, BiedgedGraph, Component};
use crate::hairpin::{hairpin_report, scan_hairpins, Hairpin};
use crate::spanning::SpanningTree;

pub const FLB_HEADER: &str = "# povu-flubble-forest v1";

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input_path: PathBuf,
    pub output_dir: PathBuf,
    pub emit_hairpins: bool,
    pub do_compact: bool,
    pub chain_mode: ChainMode,
    pub workers: usize,
    pub verbosity: u8,
}

impl RunConfig {
    pub fn new(input_path: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            input_path: input_path.into(),
            output_dir: output_dir.into(),
            emit_hairpins: true,
            do_compact: false,
            chain_mode: ChainMode::default(),
            workers: default_workers(),
            verbosity: 0,
        }
    }

    /// `<output_dir>/<stem>.flb`
    pub fn forest_path(&self) -> PathBuf {
        self.output_dir.join(format!("{}.flb", self.stem()))
    }

    /// `<output_dir>/<stem>.hairpins.txt`
    pub fn hairpin_path(&self) -> PathBuf {
        self.output_dir.join(format!("{}.hairpins.txt", self.stem()))
    }

    fn stem(&self) -> String {
        self.input_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".to_string())
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimings {
    pub parse_ms: f64,
    pub build_ms: f64,
    pub compact_ms: f64,
    pub analyze_ms: f64,
    pub write_ms: f64,
}

impl PhaseTimings {
    pub fn total_ms(&self) -> f64 {
        self.parse_ms + self.build_ms + self.compact_ms + self.analyze_ms + self.write_ms
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub components: usize,
    pub vertices: usize,
    pub edges: usize,
    pub tips: usize,
    pub flubbles: usize,
    pub hairpins: usize,
    pub timings: PhaseTimings,
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "components\t{}", self.components)?;
        writeln!(f, "vertices\t{}", self.vertices)?;
        writeln!(f, "edges\t{}", self.edges)?;
        writeln!(f, "tips\t{}", self.tips)?;
        writeln!(f, "flubbles\t{}", self.flubbles)?;
        writeln!(f, "hairpins\t{}", self.hairpins)?;
        let t = &self.timings;
        writeln!(f, "time_parse_ms\t{:.3}", t.parse_ms)?;
        writeln!(f, "time_build_ms\t{:.3}", t.build_ms)?;
        writeln!(f, "time_compact_ms\t{:.3}", t.compact_ms)?;
        writeln!(f, "time_analyze_ms\t{:.3}", t.analyze_ms)?;
        write!(f, "time_write_ms\t{:.3}", t.write_ms)
    }
}

#[derive(Debug, Error)]
pub enum DeconstructError {
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: GfaError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("internal error: {flubbles} flubbles exceed {edges} edges")]
    BoundViolation { flubbles: usize, edges: usize },
    #[error("internal error in component {component}: {reason}")]
    Internal { component: usize, reason: String },
}

impl DeconstructError {
    pub fn exit_code(&self) -> u8 {
        match self {
            DeconstructError::Parse { .. } => 1,
            DeconstructError::Io { .. } => 2,
            DeconstructError::BoundViolation { .. } | DeconstructError::Internal { .. } => 3,
        }
    }
}

/// Results for one connected component.
#[derive(Debug, Clone)]
pub struct ComponentResult {
    pub forest: FlubbleForest,
    pub hairpins: Vec<Hairpin>,
    pub tips: usize,
}

/// Results for a whole graph, in component id order.
#[derive(Debug, Clone, Default)]
pub struct Analysis {
    pub components: Vec<ComponentResult>,
}

impl Analysis {
    pub fn forests(&self) -> Vec<FlubbleForest> {
        self.components.iter().map(|c| c.forest.clone()).collect()
    }

    pub fn hairpins(&self) -> impl Iterator<Item = &Hairpin> {
        self.components.iter().flat_map(|c| c.hairpins.iter())
    }

    pub fn flubble_count(&self) -> usize {
        self.components.iter().map(|c| c.forest.len()).sum()
    }
}

pub fn analyze_component(g: &BiedgedGraph, c: &Component, mode: ChainMode) -> Result<ComponentResult, DeconstructError> {
    let rc = attach_dummy_root(g, c);
    let t = SpanningTree::build(&rc);
    let internal = |reason: String| DeconstructError::Internal {
        component: c.id,
        reason,
    };
    let ca = cycle_equivalence(&t).map_err(|e| internal(e.to_string()))?;
    let flubbles = enumerate_flubbles(&t, &ca, mode);
    let forest = build_flubble_tree(flubbles, &t).map_err(|e| internal(e.to_string()))?;
    let hairpins = scan_hairpins(&t, &ca).hairpins;
    Ok(ComponentResult {
        forest,
        hairpins,
        tips: rc.tips().len(),
    })
}

/// Analyzes every component on a pool of `workers` threads. The result order
/// is the component order, whatever the scheduling.
pub fn analyze(g: &BiedgedGraph, mode: ChainMode, workers: usize) -> Result<Analysis, DeconstructError> {
    let comps = g.connected_components();
    if workers <= 1 || comps.len() <= 1 {
        let components = comps
            .iter()
            .map(|c| analyze_component(g, c, mode))
            .collect::<Result<Vec<_>, _>>()?;
        return checked(g, Analysis { components });
    }
    let run = || {
        comps
            .par_iter()
            .map(|c| analyze_component(g, c, mode))
            .collect::<Result<Vec<_>, _>>()
    };
    let components = match rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build() {
        Ok(pool) => pool.install(run)?,
        Err(e) => {
            log::warn!("could not start a worker pool ({e}); running on the global pool");
            run()?
        }
    };
    checked(g, Analysis { components })
}

fn checked(g: &BiedgedGraph, analysis: Analysis) -> Result<Analysis, DeconstructError> {
    let forests: Vec<FlubbleForest> = analysis.forests();
    if !flubble_count_bound_check(g, &forests) {
        return Err(DeconstructError::BoundViolation {
            flubbles: analysis.flubble_count(),
            edges: g.edge_count(),
        });
    }
    Ok(analysis)
}

/// Writes the FLB text format. Class tags are numbered per component in
/// order of first appearance.
pub fn write_forest<W: Write>(forests: &[FlubbleForest], names: &[String], mut out: W) -> io::Result<()> {
    writeln!(out, "{FLB_HEADER}")?;
    for f in forests {
        writeln!(out, "C {} {}", f.component, f.len())?;
        let mut tags: HashMap<u32, usize> = HashMap::new();
        for fl in &f.flubbles {
            let next = tags.len();
            let tag = *tags.entry(fl.class_id).or_insert(next);
            let parent = fl.parent.map_or_else(|| ".".to_string(), |p| p.to_string());
            writeln!(
                out,
                "F {} {} {} {} c{}",
                fl.id,
                names[fl.entry.index()],
                names[fl.exit.index()],
                parent,
                tag
            )?;
        }
    }
    out.flush()
}

pub fn forest_string(forests: &[FlubbleForest], names: &[String]) -> String {
    let mut buf = Vec::new();
    write_forest(forests, names, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("names are UTF-8")
}

pub fn write_hairpins<W: Write>(hairpins: &[Hairpin], names: &[String], mut out: W) -> io::Result<()> {
    for line in hairpin_report(hairpins, names) {
        writeln!(out, "{line}")?;
    }
    out.flush()
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> DeconstructError + '_ {
    move |source| DeconstructError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, DeconstructError> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

/// Runs the full pipeline. Nothing is written unless the input parses.
pub fn deconstruct(cfg: &RunConfig) -> Result<RunSummary, DeconstructError> {
    let mut timings = PhaseTimings::default();

    let t0 = Instant::now();
    let file = File::open(&cfg.input_path).map_err(io_err(&cfg.input_path))?;
    let doc = parse_gfa(BufReader::new(file)).map_err(|e| match e {
        GfaError::Io(source) => DeconstructError::Io {
            path: cfg.input_path.clone(),
            source,
        },
        source => DeconstructError::Parse {
            path: cfg.input_path.clone(),
            source,
        },
    })?;
    timings.parse_ms = ms(t0);
    for (kind, n) in &doc.skipped_line_kinds {
        log::info!("skipped {n} '{kind}' records");
    }

    let t0 = Instant::now();
    let mut g = BiedgedGraph::from_gfa(&doc);
    drop(doc);
    timings.build_ms = ms(t0);

    if cfg.do_compact {
        let t0 = Instant::now();
        g = compact(&g);
        timings.compact_ms = ms(t0);
        log::info!("compacted to {} segments", g.segment_count());
    }

    let t0 = Instant::now();
    let analysis = analyze(&g, cfg.chain_mode, cfg.workers)?;
    timings.analyze_ms = ms(t0);

    let t0 = Instant::now();
    fs::create_dir_all(&cfg.output_dir).map_err(io_err(&cfg.output_dir))?;
    let forests = analysis.forests();
    let flb = cfg.forest_path();
    write_forest(&forests, g.names(), create(&flb)?).map_err(io_err(&flb))?;
    let hairpins: Vec<Hairpin> = analysis.hairpins().cloned().collect();
    if cfg.emit_hairpins {
        let hp = cfg.hairpin_path();
        write_hairpins(&hairpins, g.names(), create(&hp)?).map_err(io_err(&hp))?;
    }
    timings.write_ms = ms(t0);

    Ok(RunSummary {
        components: analysis.components.len(),
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        tips: analysis.components.iter().map(|c| c.tips).sum(),
        flubbles: analysis.flubble_count(),
        hairpins: hairpins.len(),
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfa::parse_gfa_str;

    const NESTED_BUBBLE: &str = "S\ts\tA\nS\ta\tC\nS\tb\tG\nS\tc\tA\nS\td\tT\nS\te\tC\nS\tt\tT\n\
L\ts\t+\ta\t+\t0M\nL\ts\t+\tb\t+\t0M\nL\ta\t+\tc\t+\t0M\nL\ta\t+\td\t+\t0M\n\
L\tc\t+\te\t+\t0M\nL\td\t+\te\t+\t0M\nL\te\t+\tt\t+\t0M\nL\tb\t+\tt\t+\t0M\n";

    fn run(text: &str, workers: usize) -> (BiedgedGraph, Analysis) {
        let g = BiedgedGraph::from_gfa(&parse_gfa_str(text).unwrap());
        let a = analyze(&g, ChainMode::ConsecutivePairs, workers).unwrap();
        (g, a)
    }

    #[test]
    fn nested_bubble_forest_text() {
        let (g, a) = run(NESTED_BUBBLE, 1);
        assert_eq!(
            forest_string(&a.forests(), g.names()),
            "# povu-flubble-forest v1\nC 0 2\nF 0 s t . c0\nF 1 a e 0 c1\n"
        );
    }

    #[test]
    fn empty_forest_is_header_only() {
        assert_eq!(forest_string(&[], &[]), "# povu-flubble-forest v1\n");
    }

    #[test]
    fn two_components_in_id_order() {
        // a two-segment path is closed into one cycle by the dummy root
        let text = "S\tx\tA\nS\ty\tC\nS\tp\tG\nL\tx\t+\ty\t+\t0M\n";
        let (g, a) = run(text, 2);
        assert_eq!(
            forest_string(&a.forests(), g.names()),
            "# povu-flubble-forest v1\nC 0 1\nF 0 x y . c0\nC 1 0\n"
        );
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut text = String::new();
        for k in 0..20 {
            for s in ["s", "a", "b", "c", "d", "e", "t"] {
                text.push_str(&format!("S\t{k}{s}\tA\n"));
            }
            for (x, y) in [("s", "a"), ("s", "b"), ("a", "c"), ("a", "d"), ("c", "e"), ("d", "e"), ("e", "t"), ("b", "t")] {
                text.push_str(&format!("L\t{k}{x}\t+\t{k}{y}\t+\t0M\n"));
            }
        }
        let (g1, a1) = run(&text, 1);
        let (g8, a8) = run(&text, 8);
        assert_eq!(a1.components.len(), 20);
        assert_eq!(forest_string(&a1.forests(), g1.names()), forest_string(&a8.forests(), g8.names()));
    }

    #[test]
    fn exit_codes() {
        let parse = DeconstructError::Parse {
            path: "x".into(),
            source: parse_gfa_str("S\ta\n").unwrap_err(),
        };
        assert_eq!(parse.exit_code(), 1);
        let io = DeconstructError::Io {
            path: "x".into(),
            source: io::Error::other("boom"),
        };
        assert_eq!(io.exit_code(), 2);
        assert_eq!(DeconstructError::BoundViolation { flubbles: 2, edges: 1 }.exit_code(), 3);
    }

    #[test]
    fn paths_use_input_stem() {
        let cfg = RunConfig::new("/data/graph.gfa", "/out");
        assert_eq!(cfg.forest_path(), PathBuf::from("/out/graph.flb"));
        assert_eq!(cfg.hairpin_path(), PathBuf::from("/out/graph.hairpins.txt"));
    }
}
