//! `optisched`: solve task graphs, generate corpora, run benchmark
//! batches, and report metrics over the results.
//!
//! Exit codes: 0 on a solve, 2 when the solver times out, 1 for any
//! other failure (bad arguments, unreadable files, solver errors).

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::Context;
use clap::{Parser, Subcommand};
use optisched::graph::{generate, parse_tg, GraphStructure};
use optisched::search::Solver;

use optisched_cli::corpus::{generate_corpus, CorpusSpec};
use optisched_cli::profile::{performance_profile, speedup_at};
use optisched_cli::records::{read_records, write_records, Model, RunRecord};
use optisched_cli::runner::{corpus_files, run_batch, run_instance, BenchJob, BenchOptions, RunOutcome, SolveSpec};

#[derive(Parser)]
#[command(name = "optisched", version, about = "Optimal task-graph scheduling with communication delays")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one graph file and print the schedule
    Solve(SolveArgs),
    /// Write a single random graph file
    Generate(GenerateArgs),
    /// Write a whole corpus of graph files plus a manifest
    GenerateCorpus(GenerateCorpusArgs),
    /// Run a solver grid over a corpus, one child process per run
    Bench(BenchArgs),
    /// Summarize a results file
    #[command(subcommand)]
    Report(ReportCmd),
}

#[derive(clap::Args)]
struct SolveArgs {
    /// Graph file in .tg format
    #[arg(long)]
    graph: PathBuf,
    /// State-space model: ao or els
    #[arg(long)]
    model: Model,
    /// astar, dfbnb, pastar, pastar-dd, or pdfs
    #[arg(long)]
    algo: Solver,
    /// Worker threads (parallel algorithms only)
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Number of identical processors
    #[arg(long)]
    procs: usize,
    /// Wall-clock budget in seconds
    #[arg(long, default_value_t = 120.0)]
    timeout: f64,
    /// Work-stealing seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pops between refreshes of a worker's view of the incumbent
    #[arg(long, default_value_t = 100_000)]
    sync_threshold: u64,
    /// Also write the run record as a one-row CSV
    #[arg(long)]
    record_out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct GenerateArgs {
    #[arg(long)]
    structure: GraphStructure,
    #[arg(long)]
    tasks: usize,
    /// Communication-to-computation ratio
    #[arg(long)]
    ccr: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct GenerateCorpusArgs {
    /// Comma-separated structure names; default is all of them
    #[arg(long, value_delimiter = ',')]
    structures: Vec<GraphStructure>,
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    ccrs: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    seeds: Vec<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct BenchArgs {
    /// Directory of .tg files
    #[arg(long)]
    corpus: PathBuf,
    /// Results CSV to write
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [Model::Ao, Model::Els])]
    models: Vec<Model>,
    #[arg(long, value_delimiter = ',', default_values_t = [Solver::Astar, Solver::Dfbnb])]
    algos: Vec<Solver>,
    /// Thread counts for the parallel algorithms
    #[arg(long, value_delimiter = ',', default_values_t = [1usize])]
    threads: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [2usize])]
    procs: Vec<usize>,
    #[arg(long, default_value_t = 120.0)]
    timeout: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    sync_threshold: u64,
    /// Child processes to run at once
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum ReportCmd {
    /// Percent of runs solved within each time threshold, per series
    Profile(ProfileArgs),
    /// Speedup of a parallel algorithm over a sequential baseline
    Speedup(SpeedupArgs),
}

#[derive(clap::Args)]
struct ProfileArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Time thresholds in ms; default is every observed solve time
    #[arg(long, value_delimiter = ',')]
    grid: Vec<f64>,
}

#[derive(clap::Args)]
struct SpeedupArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Observation point x in ms
    #[arg(long)]
    at: f64,
    #[arg(long, default_value_t = Model::Ao)]
    model: Model,
    #[arg(long, default_value = "astar")]
    seq_algo: Solver,
    #[arg(long, default_value = "pastar")]
    par_algo: Solver,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successes; anything else is a usage
            // error, and 2 is reserved for timeouts.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.cmd {
        Cmd::Solve(args) => solve(args),
        Cmd::Generate(args) => {
            let g = generate(args.structure, args.tasks, args.ccr, args.seed)?;
            std::fs::write(&args.out, g.to_tg_string())
                .with_context(|| format!("writing {}", args.out.display()))?;
            println!("wrote {}", args.out.display());
            Ok(0)
        }
        Cmd::GenerateCorpus(args) => {
            let spec = CorpusSpec {
                structures: if args.structures.is_empty() {
                    GraphStructure::ALL.to_vec()
                } else {
                    args.structures
                },
                sizes: args.sizes,
                ccrs: args.ccrs,
                seeds: args.seeds,
            };
            let rows = generate_corpus(&spec, &args.out)?;
            let written = rows.iter().filter(|r| r.status == "ok").count();
            println!(
                "wrote {written} graphs to {} ({} combinations rejected)",
                args.out.display(),
                rows.len() - written
            );
            Ok(0)
        }
        Cmd::Bench(args) => bench(args),
        Cmd::Report(ReportCmd::Profile(args)) => report_profile(args),
        Cmd::Report(ReportCmd::Speedup(args)) => report_speedup(args),
    }
}

fn solve(args: SolveArgs) -> anyhow::Result<i32> {
    let text = std::fs::read_to_string(&args.graph)
        .with_context(|| format!("reading {}", args.graph.display()))?;
    let g = parse_tg(&text).with_context(|| format!("parsing {}", args.graph.display()))?;
    let instance = args
        .graph
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| args.graph.display().to_string());
    let spec = SolveSpec {
        model: args.model,
        algo: args.algo,
        threads: args.threads,
        num_procs: args.procs,
        timeout: Duration::from_secs_f64(args.timeout),
        steal_seed: args.seed,
        sync_threshold: args.sync_threshold,
    };
    let outcome = run_instance(&g, &instance, &spec)?;
    if let Some(path) = &args.record_out {
        write_records(path, std::slice::from_ref(outcome.record()))?;
    }
    match &outcome {
        RunOutcome::Solved { record, schedule } => {
            print!("{}", schedule.to_text(&g)?);
            eprintln!(
                "solved {} in {:.1} ms ({} states expanded)",
                instance, record.time_ms, record.states_expanded
            );
        }
        RunOutcome::TimedOut { record } => {
            eprintln!(
                "timed out on {} after {:.1} ms ({} states expanded)",
                instance, record.time_ms, record.states_expanded
            );
        }
    }
    Ok(outcome.exit_code())
}

fn bench(args: BenchArgs) -> anyhow::Result<i32> {
    let files = corpus_files(&args.corpus)?;
    let mut jobs = Vec::new();
    for file in &files {
        for &model in &args.models {
            for &algo in &args.algos {
                // Sequential algorithms run once, not once per thread
                // count.
                let thread_counts: &[usize] =
                    if algo.is_parallel() { &args.threads } else { &[1] };
                for &threads in thread_counts {
                    for &procs in &args.procs {
                        jobs.push(BenchJob {
                            graph_file: file.clone(),
                            model,
                            algo,
                            threads,
                            num_procs: procs,
                        });
                    }
                }
            }
        }
    }
    let opts = BenchOptions {
        timeout: Duration::from_secs_f64(args.timeout),
        steal_seed: args.seed,
        sync_threshold: args.sync_threshold,
        jobs: args.jobs,
    };
    eprintln!("running {} jobs over {} instances", jobs.len(), files.len());
    let records = run_batch(&jobs, &opts)?;
    write_records(&args.out, &records)?;
    let solved = records.iter().filter(|r| r.solved).count();
    println!("wrote {} records to {} ({solved} solved)", records.len(), args.out.display());
    Ok(0)
}

fn report_profile(args: ProfileArgs) -> anyhow::Result<i32> {
    let records = read_records(&args.input)?;
    let grid = if args.grid.is_empty() {
        // Sample the step function exactly at its breakpoints.
        let mut times: Vec<f64> =
            records.iter().filter(|r| r.solved).map(|r| r.time_ms).collect();
        anyhow::ensure!(!times.is_empty(), "no solved runs in {}", args.input.display());
        times.sort_by(f64::total_cmp);
        times.dedup();
        times
    } else {
        args.grid
    };
    let points = performance_profile(&records, &grid)?;
    let mut w = csv::Writer::from_path(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    for p in &points {
        w.serialize(p)?;
    }
    w.flush()?;
    println!("wrote {} profile points to {}", points.len(), args.out.display());
    Ok(0)
}

fn report_speedup(args: SpeedupArgs) -> anyhow::Result<i32> {
    anyhow::ensure!(!args.seq_algo.is_parallel(), "--seq-algo must be sequential");
    anyhow::ensure!(args.par_algo.is_parallel(), "--par-algo must be parallel");
    let records = read_records(&args.input)?;
    let seq: Vec<RunRecord> = records
        .iter()
        .filter(|r| r.model == args.model && r.algo == args.seq_algo.name())
        .cloned()
        .collect();
    let mut par: BTreeMap<usize, Vec<RunRecord>> = BTreeMap::new();
    for r in &records {
        if r.model == args.model && r.algo == args.par_algo.name() {
            par.entry(r.threads).or_default().push(r.clone());
        }
    }
    anyhow::ensure!(!par.is_empty(), "no {} runs in {}", args.par_algo, args.input.display());
    let by_threads = speedup_at(&seq, &par, args.at);
    let mut w = csv::Writer::from_path(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    w.write_record(["model", "seq_algo", "par_algo", "threads", "at_ms", "speedup"])?;
    for (threads, s) in &by_threads {
        w.write_record([
            args.model.name(),
            args.seq_algo.name(),
            args.par_algo.name(),
            &threads.to_string(),
            &args.at.to_string(),
            &s.to_string(),
        ])?;
    }
    w.flush()?;
    println!("wrote speedups for {} thread counts to {}", by_threads.len(), args.out.display());
    Ok(0)
}
