use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use povu::deconstruct::{default_workers, deconstruct, RunConfig};
use povu::gfa::write_gfa;
use povu::oracle::{bubble_chain, nested_bubble_generator, random_biedged_graph, GeneratorSpec};
use povu::ChainMode;

#[derive(Parser)]
#[command(name = "povu", version, about = "Flubble trees and hairpin inversions in variation graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChainModeArg {
    Consecutive,
    PerClass,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Random,
    Nested,
    Chain,
}

#[derive(Subcommand)]
enum Command {
    /// Report the flubble forest and hairpins of a GFA graph.
    Deconstruct {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        no_hairpins: bool,
        /// Merge linear chains of segments before analysis.
        #[arg(long)]
        compact: bool,
        #[arg(long, value_enum, default_value = "consecutive")]
        chain_mode: ChainModeArg,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        workers: Option<u32>,
        #[arg(short, long, action = clap::ArgAction::Count)]
        verbose: u8,
    },
    /// Write a synthetic GFA graph to standard output.
    #[command(hide = true)]
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Segments (random), bubbles (chain) or nesting depth (nested).
        #[arg(long, default_value_t = 10)]
        size: usize,
        /// Chain width for nested graphs.
        #[arg(long, default_value_t = 2)]
        width: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Deconstruct {
            input,
            output,
            no_hairpins,
            compact,
            chain_mode,
            workers,
            verbose,
        } => {
            let level = match verbose {
                0 => "warn",
                1 => "info",
                2 => "debug",
                _ => "trace",
            };
            env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
            let cfg = RunConfig {
                emit_hairpins: !no_hairpins,
                do_compact: compact,
                chain_mode: match chain_mode {
                    ChainModeArg::Consecutive => ChainMode::ConsecutivePairs,
                    ChainModeArg::PerClass => ChainMode::PerClass,
                },
                workers: workers.map_or_else(default_workers, |w| w as usize),
                verbosity: verbose,
                ..RunConfig::new(input, output)
            };
            match deconstruct(&cfg) {
                Ok(summary) => {
                    println!("{summary}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code())
                }
            }
        }
        Command::Gen { kind, seed, size, width } => {
            let doc = match kind {
                GenKind::Random => random_biedged_graph(&GeneratorSpec {
                    seed,
                    n_segments: size,
                    ..GeneratorSpec::default()
                }),
                GenKind::Nested => nested_bubble_generator(size.max(1), width.max(1), seed).0,
                GenKind::Chain => bubble_chain(size),
            };
            let stdout = std::io::stdout();
            if let Err(e) = write_gfa(&doc, std::io::BufWriter::new(stdout.lock())) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
    }
}
