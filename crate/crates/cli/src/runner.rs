//! Instance execution: one in-process solve, and a batch driver that
//! isolates every run in a fresh child process.

use std::collections::VecDeque;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use anyhow::Context;
use optisched::ao::AoSpace;
use optisched::bounds::BoundContext;
use optisched::els::ElsSpace;
use optisched::graph::{SystemSpec, TaskGraph};
use optisched::parallel::{pastar, pdfs, ParallelConfig};
use optisched::schedule::Schedule;
use optisched::search::{astar, dfbnb, SearchError, SearchLimits, SearchResult, Solver, StateSpace};

use crate::records::{Model, RunRecord, SCHEMA_VERSION};

#[derive(Debug, Clone)]
pub struct SolveSpec {
    pub model: Model,
    pub algo: Solver,
    pub threads: usize,
    pub num_procs: usize,
    pub timeout: Duration,
    pub steal_seed: u64,
    pub sync_threshold: u64,
}

#[derive(Debug)]
pub enum RunOutcome {
    Solved { record: RunRecord, schedule: Schedule },
    TimedOut { record: RunRecord },
}

impl RunOutcome {
    pub fn record(&self) -> &RunRecord {
        match self {
            RunOutcome::Solved { record, .. } | RunOutcome::TimedOut { record } => record,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunOutcome::Solved { .. } => 0,
            RunOutcome::TimedOut { .. } => 2,
        }
    }
}

fn dispatch<S: StateSpace>(
    space: &S,
    spec: &SolveSpec,
    astar_dup: bool,
) -> Result<SearchResult, SearchError> {
    let limits = SearchLimits::with_timeout(spec.timeout);
    match spec.algo {
        Solver::Astar => astar(space, astar_dup, &limits),
        Solver::Dfbnb => dfbnb(space, &limits),
        Solver::Pastar | Solver::PastarDd | Solver::Pdfs => {
            let cfg = ParallelConfig {
                threads: spec.threads,
                sync_threshold: spec.sync_threshold,
                steal_seed: spec.steal_seed,
                limits,
            };
            match spec.algo {
                Solver::Pastar => pastar(space, false, &cfg),
                Solver::PastarDd => pastar(space, true, &cfg),
                _ => pdfs(space, &cfg),
            }
        }
    }
}

/// Solves one instance in this process. Timing covers the solver only,
/// not graph parsing. Sequential algorithms force threads to 1.
pub fn run_instance(g: &TaskGraph, instance: &str, spec: &SolveSpec) -> anyhow::Result<RunOutcome> {
    let threads = if spec.algo.is_parallel() { spec.threads.max(1) } else { 1 };
    let sys = SystemSpec::new(spec.num_procs);
    let ctx = BoundContext::compute(g, &sys);

    let outcome = match spec.model {
        // ELS duplicate detection is what keeps A* viable there; AO
        // needs none by construction.
        Model::Els => dispatch(&ElsSpace::new(g, &sys, &ctx), spec, true),
        Model::Ao => dispatch(&AoSpace::new(g, &sys, &ctx), spec, false),
    };

    let record = |solved: bool, makespan: Option<u64>, expanded: u64, time: Duration| {
        let time_ms = time.as_secs_f64() * 1000.0;
        RunRecord {
            schema_version: SCHEMA_VERSION,
            instance: instance.to_string(),
            model: spec.model,
            algo: spec.algo.name().to_string(),
            threads,
            num_procs: spec.num_procs,
            solved,
            time_ms,
            makespan,
            states_expanded: expanded,
            states_per_second: RunRecord::rate(expanded, time_ms),
        }
    };

    match outcome {
        Ok(r) => {
            anyhow::ensure!(
                matches!(r.schedule.is_valid(g, &sys), Ok(true)),
                "solver produced an invalid schedule"
            );
            Ok(RunOutcome::Solved {
                record: record(true, Some(r.makespan), r.stats.expanded, r.wall_time),
                schedule: r.schedule,
            })
        }
        Err(SearchError::TimedOut { stats, wall_time }) => Ok(RunOutcome::TimedOut {
            record: record(false, None, stats.expanded, wall_time),
        }),
        Err(e @ SearchError::MemoryExceeded { .. }) => Err(e.into()),
    }
}

/// One (instance, solver configuration) cell of a batch.
#[derive(Debug, Clone)]
pub struct BenchJob {
    pub graph_file: PathBuf,
    pub model: Model,
    pub algo: Solver,
    pub threads: usize,
    pub num_procs: usize,
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub timeout: Duration,
    pub steal_seed: u64,
    pub sync_threshold: u64,
    /// Child processes to run concurrently. The default of 1 keeps
    /// runs isolated in time as well as in address space.
    pub jobs: usize,
}

/// Runs every job in a fresh child process and collects the records
/// in job order. A child exiting 0 or 2 yields a record; anything else
/// aborts the batch.
pub fn run_batch(jobs: &[BenchJob], opts: &BenchOptions) -> anyhow::Result<Vec<RunRecord>> {
    let exe = std::env::current_exe().context("locating the solver binary")?;
    let scratch = tempfile::tempdir().context("creating scratch directory")?;

    let queue: Mutex<VecDeque<(usize, &BenchJob)>> =
        Mutex::new(jobs.iter().enumerate().collect());
    let results: Mutex<Vec<(usize, RunRecord)>> = Mutex::new(Vec::with_capacity(jobs.len()));
    let workers = opts.jobs.max(1).min(jobs.len().max(1));

    std::thread::scope(|scope| -> anyhow::Result<()> {
        let mut handles = Vec::new();
        for _ in 0..workers {
            handles.push(scope.spawn(|| -> anyhow::Result<()> {
                loop {
                    let job = { queue.lock().unwrap().pop_front() };
                    let Some((idx, job)) = job else { return Ok(()) };
                    let record_path = scratch.path().join(format!("record-{idx}.csv"));
                    let status = std::process::Command::new(&exe)
                        .arg("solve")
                        .arg("--graph")
                        .arg(&job.graph_file)
                        .args(["--model", job.model.name()])
                        .args(["--algo", job.algo.name()])
                        .args(["--threads", &job.threads.to_string()])
                        .args(["--procs", &job.num_procs.to_string()])
                        .args(["--timeout", &opts.timeout.as_secs_f64().to_string()])
                        .args(["--seed", &opts.steal_seed.to_string()])
                        .args(["--sync-threshold", &opts.sync_threshold.to_string()])
                        .arg("--record-out")
                        .arg(&record_path)
                        .stdout(std::process::Stdio::null())
                        .stderr(std::process::Stdio::null())
                        .status()
                        .context("spawning solver process")?;
                    match status.code() {
                        Some(0) | Some(2) => {}
                        other => anyhow::bail!(
                            "solver exited with {:?} on {}",
                            other,
                            job.graph_file.display()
                        ),
                    }
                    let rows = crate::records::read_records(&record_path)?;
                    anyhow::ensure!(rows.len() == 1, "expected exactly one record");
                    results.lock().unwrap().push((idx, rows.into_iter().next().unwrap()));
                }
            }));
        }
        for h in handles {
            h.join().expect("batch worker panicked")?;
        }
        Ok(())
    })?;

    let mut rows = results.into_inner().unwrap();
    rows.sort_by_key(|(idx, _)| *idx);
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

/// The `.tg` files under a corpus directory, sorted by name.
pub fn corpus_files(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "tg"))
        .collect();
    files.sort();
    anyhow::ensure!(!files.is_empty(), "no .tg files in {}", dir.display());
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    fn diamond() -> TaskGraph {
        optisched::graph::parse_tg(
            "T 0 2\nT 1 3\nT 2 3\nT 3 1\nE 0 1 1\nE 0 2 1\nE 1 3 2\nE 2 3 2\n",
        )
        .unwrap()
    }

    fn spec(model: Model, algo: &str, threads: usize) -> SolveSpec {
        SolveSpec {
            model,
            algo: Solver::from_str(algo).unwrap(),
            threads,
            num_procs: 2,
            timeout: Duration::from_secs(120),
            steal_seed: 0,
            sync_threshold: 100,
        }
    }

    #[test]
    fn solves_the_diamond_on_every_solver() {
        let g = diamond();
        for model in [Model::Ao, Model::Els] {
            for algo in ["astar", "dfbnb", "pastar", "pastar-dd", "pdfs"] {
                let out = run_instance(&g, "diamond", &spec(model, algo, 2)).unwrap();
                let r = out.record();
                assert!(r.solved, "{model} {algo}");
                assert_eq!(r.makespan, Some(8), "{model} {algo}");
                assert_eq!(out.exit_code(), 0);
            }
        }
    }

    #[test]
    fn sequential_algos_force_one_thread() {
        let g = diamond();
        let out = run_instance(&g, "diamond", &spec(Model::Ao, "astar", 8)).unwrap();
        assert_eq!(out.record().threads, 1);
        let out = run_instance(&g, "diamond", &spec(Model::Ao, "pdfs", 8)).unwrap();
        assert_eq!(out.record().threads, 8);
    }

    #[test]
    fn forced_timeout_reports_unsolved() {
        let g = optisched::graph::generate(
            optisched::graph::GraphStructure::Random,
            16,
            10.0,
            1,
        )
        .unwrap();
        let mut s = spec(Model::Els, "astar", 1);
        s.timeout = Duration::from_micros(1);
        let out = run_instance(&g, "big", &s).unwrap();
        assert!(!out.record().solved);
        assert_eq!(out.record().makespan, None);
        assert_eq!(out.exit_code(), 2);
    }
}
