//! Seeded random task graph generators for benchmark corpora.
//!
//! Each call builds a graph of a named topology with `n` tasks, task
//! weights uniform in [1,10], and edge weights scaled so the graph's
//! communication-to-computation ratio lands within 10% of a target.
//! Identical (structure, n, target_ccr, seed) arguments always produce a
//! bit-identical graph: all randomness comes from one ChaCha8 stream
//! seeded by a fixed mix of structure, n, and seed, drawn in a fixed
//! order (topology first, then task weights, then raw edge weights).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GraphError, TaskGraph};
use crate::{TaskId, Time};

/// Benchmark graph topologies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphStructure {
    /// No edges at all.
    Independent,
    /// One root, every other task a direct child of it.
    Fork,
    /// One sink, every other task a direct parent of it.
    Join,
    /// A root fanning out to n-2 middle tasks that all join into a sink.
    ForkJoin,
    /// Every task except the root has exactly one parent.
    OutTree,
    /// Every task except the sink has exactly one child.
    InTree,
    /// A single chain.
    Pipeline,
    /// Erdős–Rényi over the upper triangle of a random task permutation,
    /// edge probability tuned toward 2 edges per task.
    Random,
    /// Recursive series/parallel composition; single source, single sink.
    SeriesParallel,
}

impl GraphStructure {
    pub const ALL: [GraphStructure; 9] = [
        GraphStructure::Independent,
        GraphStructure::Fork,
        GraphStructure::Join,
        GraphStructure::ForkJoin,
        GraphStructure::OutTree,
        GraphStructure::InTree,
        GraphStructure::Pipeline,
        GraphStructure::Random,
        GraphStructure::SeriesParallel,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GraphStructure::Independent => "independent",
            GraphStructure::Fork => "fork",
            GraphStructure::Join => "join",
            GraphStructure::ForkJoin => "fork-join",
            GraphStructure::OutTree => "out-tree",
            GraphStructure::InTree => "in-tree",
            GraphStructure::Pipeline => "pipeline",
            GraphStructure::Random => "random",
            GraphStructure::SeriesParallel => "series-parallel",
        }
    }

    /// Smallest task count the topology supports.
    pub fn min_tasks(&self) -> usize {
        match self {
            GraphStructure::Fork | GraphStructure::Join => 2,
            GraphStructure::ForkJoin => 3,
            _ => 1,
        }
    }
}

impl std::fmt::Display for GraphStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for GraphStructure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        GraphStructure::ALL
            .iter()
            .find(|st| st.name() == s)
            .copied()
            .ok_or_else(|| {
                let names: Vec<&str> = GraphStructure::ALL.iter().map(|st| st.name()).collect();
                format!("unknown structure `{s}` (expected one of: {})", names.join(", "))
            })
    }
}

/// Errors from [`generate`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenerateError {
    #[error("structure {structure} needs at least {min} tasks, got {n}")]
    TooFewTasks { structure: GraphStructure, n: usize, min: usize },
    #[error("structure {structure} produced no edges; a positive target ccr is unsatisfiable")]
    PositiveCcrWithoutEdges { structure: GraphStructure },
    #[error("target ccr {value} is not a finite non-negative number")]
    InvalidCcr { value: f64 },
}

/// Generates a seeded random task graph. See the module docs for the
/// determinism contract.
///
/// Weight scheme: task weights are uniform in [1,10]; raw edge weights
/// are uniform in [1,10] and then rescaled to integers summing to
/// round(target_ccr × total_work), apportioned proportionally (largest
/// remainder). When target_ccr × total_work < 5, every task weight is
/// first multiplied by a common factor to push it above 5 so that the
/// rounding error alone can never exceed the 10% ccr tolerance.
pub fn generate(
    structure: GraphStructure,
    n: usize,
    target_ccr: f64,
    seed: u64,
) -> Result<TaskGraph, GenerateError> {
    if !target_ccr.is_finite() || target_ccr < 0.0 {
        return Err(GenerateError::InvalidCcr { value: target_ccr });
    }
    let min = structure.min_tasks();
    if n < min {
        return Err(GenerateError::TooFewTasks { structure, n, min });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(structure, n, seed));
    let topology = build_topology(structure, n, &mut rng);

    let mut weights: Vec<Time> = (0..n).map(|_| rng.gen_range(1..=10)).collect();

    if topology.is_empty() {
        if target_ccr > 0.0 {
            return Err(GenerateError::PositiveCcrWithoutEdges { structure });
        }
        return Ok(must_build(weights, vec![]));
    }

    let edges = if target_ccr == 0.0 {
        topology.into_iter().map(|(s, d)| (s, d, 0)).collect()
    } else {
        let raw: Vec<Time> = (0..topology.len()).map(|_| rng.gen_range(1..=10)).collect();
        // round(t·W) differs from t·W by at most 0.5, so once t·W >= 5 the
        // achieved ccr is within 10% of the target.
        let total_work: Time = weights.iter().sum();
        let scaled_work = target_ccr * total_work as f64;
        if scaled_work < 5.0 {
            let factor = (5.0 / scaled_work).ceil() as Time;
            for w in &mut weights {
                *w *= factor;
            }
        }
        let total_work: Time = weights.iter().sum();
        let comm_budget = (target_ccr * total_work as f64).round() as Time;
        let comms = apportion(comm_budget, &raw);
        topology.into_iter().zip(comms).map(|((s, d), c)| (s, d, c)).collect()
    };

    Ok(must_build(weights, edges))
}

fn must_build(weights: Vec<Time>, edges: Vec<(TaskId, TaskId, Time)>) -> TaskGraph {
    match TaskGraph::new(weights, edges) {
        Ok(g) => g,
        // Topology builders only emit forward edges over valid ids.
        Err(e) => unreachable!("generated graph failed validation: {e}"),
    }
}

fn mix_seed(structure: GraphStructure, n: usize, seed: u64) -> u64 {
    let mut h = seed
        ^ (structure as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (n as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    // splitmix64 finalizer
    h ^= h >> 30;
    h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    h ^= h >> 27;
    h = h.wrapping_mul(0x94D0_49BB_1331_11EB);
    h ^= h >> 31;
    h
}

fn build_topology(
    structure: GraphStructure,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(TaskId, TaskId)> {
    match structure {
        GraphStructure::Independent => vec![],
        GraphStructure::Fork => (1..n).map(|i| (0, i)).collect(),
        GraphStructure::Join => (0..n - 1).map(|i| (i, n - 1)).collect(),
        GraphStructure::ForkJoin => {
            let mut edges = Vec::with_capacity(2 * (n - 2));
            for i in 1..n - 1 {
                edges.push((0, i));
            }
            for i in 1..n - 1 {
                edges.push((i, n - 1));
            }
            edges
        }
        GraphStructure::OutTree => (1..n).map(|i| (rng.gen_range(0..i), i)).collect(),
        GraphStructure::InTree => {
            (0..n.saturating_sub(1)).map(|i| (i, rng.gen_range(i + 1..n))).collect()
        }
        GraphStructure::Pipeline => (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
        GraphStructure::Random => {
            if n < 2 {
                return vec![];
            }
            // Random topological order, then independent coin flips on
            // every forward pair.
            let mut perm: Vec<TaskId> = (0..n).collect();
            for i in (1..n).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            let p = (4.0 / (n as f64 - 1.0)).min(1.0);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen_bool(p) {
                        edges.push((perm[i], perm[j]));
                    }
                }
            }
            if edges.is_empty() {
                edges.push((perm[0], perm[1]));
            }
            edges
        }
        GraphStructure::SeriesParallel => {
            let mut edges = Vec::new();
            series_parallel(0, n, rng, &mut edges);
            edges
        }
    }
}

/// Emits a series-parallel graph over ids [base, base+n) with source
/// base and sink base+n-1.
fn series_parallel(
    base: TaskId,
    n: usize,
    rng: &mut ChaCha8Rng,
    edges: &mut Vec<(TaskId, TaskId)>,
) {
    match n {
        0 | 1 => {}
        2 => edges.push((base, base + 1)),
        3 => {
            edges.push((base, base + 1));
            edges.push((base + 1, base + 2));
        }
        _ => {
            if rng.gen_bool(0.5) {
                // Series: G1 over the first n1 ids, G2 over the rest,
                // sink of G1 feeding source of G2.
                let n1 = rng.gen_range(1..n);
                series_parallel(base, n1, rng, edges);
                series_parallel(base + n1, n - n1, rng, edges);
                edges.push((base + n1 - 1, base + n1));
            } else {
                // Parallel: fresh source and sink around two branches.
                let inner = n - 2;
                let b1 = rng.gen_range(1..inner);
                let b2 = inner - b1;
                series_parallel(base + 1, b1, rng, edges);
                series_parallel(base + 1 + b1, b2, rng, edges);
                edges.push((base, base + 1));
                edges.push((base, base + 1 + b1));
                edges.push((base + b1, base + n - 1));
                edges.push((base + n - 1 - 1, base + n - 1));
            }
        }
    }
}

/// Splits `budget` into one integer per weight, proportional to the
/// weights (largest-remainder rounding), summing to `budget` exactly.
fn apportion(budget: Time, raw: &[Time]) -> Vec<Time> {
    let total: u128 = raw.iter().map(|&r| r as u128).sum();
    debug_assert!(total > 0);
    let mut shares: Vec<Time> = Vec::with_capacity(raw.len());
    let mut remainders: Vec<(u128, usize)> = Vec::with_capacity(raw.len());
    let mut assigned: Time = 0;
    for (i, &r) in raw.iter().enumerate() {
        let exact = budget as u128 * r as u128;
        let floor = (exact / total) as Time;
        shares.push(floor);
        assigned += floor;
        remainders.push((exact % total, i));
    }
    // Largest remainder first; ties by lower index for determinism.
    remainders.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut leftover = budget - assigned;
    for &(_, i) in &remainders {
        if leftover == 0 {
            break;
        }
        shares[i] += 1;
        leftover -= 1;
    }
    shares
}

// Lets generator internals assert validity without exposing TaskGraph
// internals; referenced by tests.
#[allow(dead_code)]
fn check(g: &TaskGraph) -> Result<(), GraphError> {
    g.topological_order().map(|_| ())
}
