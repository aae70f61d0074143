use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use ged_exactgen::graph::{random_graph, read_graph, write_graph};
use ged_exactgen::Family;
use gedgen_cli::bench::{self, BenchOptions, GridSpec};
use gedgen_cli::generate::{self, GenerateOptions, RunMode};
use gedgen_cli::{examples_report, parse_bytes, thread_pool, validity, write_csv, write_csv_file};

/// Generate graphs within a bounded edit distance using exact ReLU networks.
#[derive(Parser)]
#[command(name = "gedgen", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate graphs from a source graph and certify their distance.
    Generate {
        /// Source graph (JSON).
        graph: PathBuf,
        #[arg(long, default_value = "ge")]
        family: Family,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "network")]
        mode: RunMode,
        /// Only insert and delete edges (GE on the unlabeled graph).
        #[arg(long)]
        edge_only: bool,
        /// Accept outputs that no certificate covers.
        #[arg(long)]
        allow_uncertified: bool,
        /// Output directory for graphs and summary.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay the four worked examples and compare every published value.
    Examples,
    /// Time network construction and one generation over an (n, d) grid.
    Bench {
        /// Grid such as `n=100,200,400;d=10,20`.
        #[arg(long)]
        grid: GridSpec,
        #[arg(long, default_value = "ge")]
        family: Family,
        /// Alphabet size.
        #[arg(long, default_value_t = 10)]
        m: u32,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cells whose estimated peak memory exceeds this are marked MEMOUT.
        #[arg(long, default_value = "3G")]
        memory_budget: String,
        /// CSV output (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count valid outputs of edge-only generation.
    Validity {
        /// Source graph (JSON); labels are ignored.
        graph: PathBuf,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 500)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a uniformly random graph with a given edge count.
    RandomGraph {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        edges: usize,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn emit_csv<T: serde::Serialize>(out: Option<&PathBuf>, records: &[T]) -> Result<()> {
    match out {
        Some(p) => write_csv_file(p, records),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_csv(&mut lock, records)?;
            lock.flush()?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let pool = thread_pool()?;
    match cli.command {
        Command::Generate {
            graph,
            family,
            d,
            count,
            seed,
            mode,
            edge_only,
            allow_uncertified,
            out,
        } => {
            let g = read_graph(&graph).with_context(|| format!("reading {}", graph.display()))?;
            let opts = GenerateOptions {
                family,
                d,
                count,
                seed,
                mode,
                edge_only,
                allow_uncertified,
            };
            let summary = pool.install(|| generate::run(&g, &opts))?;
            generate::write(&out, &summary)?;
            let certified = summary.outputs.len()
                - summary
                    .outputs
                    .iter()
                    .filter(|o| {
                        matches!(
                            o.certification,
                            generate::Certification::BoundByConstruction
                        )
                    })
                    .count();
            println!(
                "{} graphs written to {} ({certified} certified)",
                summary.outputs.len(),
                out.display()
            );
        }
        Command::Examples => {
            let (text, ok) = examples_report()?;
            print!("{text}");
            return Ok(ok);
        }
        Command::Bench {
            grid,
            family,
            m,
            reps,
            seed,
            memory_budget,
            out,
        } => {
            let opts = BenchOptions {
                family,
                m,
                grid,
                reps,
                seed,
                memory_budget: parse_bytes(&memory_budget)?,
            };
            emit_csv(out.as_ref(), &bench::run(&opts))?;
        }
        Command::Validity {
            graph,
            d,
            count,
            seed,
            out,
        } => {
            let g = read_graph(&graph).with_context(|| format!("reading {}", graph.display()))?;
            let record = pool.install(|| validity::run(&g, d, count, seed))?;
            emit_csv(out.as_ref(), &[record])?;
        }
        Command::RandomGraph {
            n,
            edges,
            m,
            seed,
            out,
        } => {
            write_graph(&out, &random_graph(n, edges, m, seed)?)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
