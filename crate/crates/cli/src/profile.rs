//! Performance profiles and the count-based speedup metric.
//!
//! A profile answers "what fraction of the instance set had been
//! solved by time t" per solver series. Speedup compares series by
//! solve counts instead of per-instance times: if the sequential
//! series has solved k instances by time x, and the n-thread series
//! needed partime to reach its k-th solve, the speedup at x is
//! x / partime. This tolerates the two series solving different
//! instances at different moments.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::records::{Model, RunRecord};

/// One solver configuration, aggregated across instances.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SeriesKey {
    pub model: Model,
    pub algo: String,
    pub threads: usize,
}

impl SeriesKey {
    fn of(r: &RunRecord) -> SeriesKey {
        SeriesKey { model: r.model, algo: r.algo.clone(), threads: r.threads }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub model: Model,
    pub algo: String,
    pub threads: usize,
    pub time_ms: f64,
    pub percent_solved: f64,
}

/// Cumulative percentage of each series' instances solved by each
/// grid time.
pub fn performance_profile(
    records: &[RunRecord],
    grid_ms: &[f64],
) -> anyhow::Result<Vec<ProfilePoint>> {
    anyhow::ensure!(!records.is_empty(), "no records to profile");
    let mut series: BTreeMap<SeriesKey, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        series.entry(SeriesKey::of(r)).or_default().push(r);
    }

    let mut out = Vec::new();
    for (key, runs) in &series {
        for &t in grid_ms {
            let solved = runs.iter().filter(|r| r.solved && r.time_ms <= t).count();
            out.push(ProfilePoint {
                model: key.model,
                algo: key.algo.clone(),
                threads: key.threads,
                time_ms: t,
                percent_solved: 100.0 * solved as f64 / runs.len() as f64,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Speedup {
    Value(f64),
    /// The parallel series never accumulates as many solves as the
    /// sequential series had by x.
    NotReached,
    /// seqnum(x) = 0: nothing to compare against.
    NoSequentialSolves,
}

impl std::fmt::Display for Speedup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Speedup::Value(v) => write!(f, "{v:.3}"),
            Speedup::NotReached => f.write_str("not reached"),
            Speedup::NoSequentialSolves => f.write_str("no sequential solves"),
        }
    }
}

/// Solves accumulated by time x.
fn seqnum(records: &[RunRecord], x_ms: f64) -> usize {
    records.iter().filter(|r| r.solved && r.time_ms <= x_ms).count()
}

/// Smallest t at which the series reaches k solves: its k-th smallest
/// solve time. None when the series never gets there.
fn partime(records: &[RunRecord], k: usize) -> Option<f64> {
    debug_assert!(k >= 1);
    let mut times: Vec<f64> =
        records.iter().filter(|r| r.solved).map(|r| r.time_ms).collect();
    if times.len() < k {
        return None;
    }
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Some(times[k - 1])
}

/// speedup(n, x) = x / partime_n(seqnum(x)) for each thread count.
pub fn speedup_at(
    seq: &[RunRecord],
    par_by_threads: &BTreeMap<usize, Vec<RunRecord>>,
    x_ms: f64,
) -> BTreeMap<usize, Speedup> {
    let k = seqnum(seq, x_ms);
    par_by_threads
        .iter()
        .map(|(&threads, runs)| {
            let s = if k == 0 {
                Speedup::NoSequentialSolves
            } else {
                match partime(runs, k) {
                    Some(t) => Speedup::Value(x_ms / t),
                    None => Speedup::NotReached,
                }
            };
            (threads, s)
        })
        .collect()
}
