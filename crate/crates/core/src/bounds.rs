//! Admissible makespan lower bounds for search states.
//!
//! Every state evaluation f here underestimates the best complete
//! schedule reachable from that state, which is what lets A* stop at the
//! first complete pop and branch-and-bound prune on the incumbent. Each
//! f is a max over independently admissible terms:
//!
//! * critical path — some chain of tasks must still run serially, with
//!   cross-processor edges adding their communication weight where the
//!   placement is already fixed and zero where it is still open;
//! * load — all remaining work plus already-committed idle time has to
//!   fit on num_procs processors;
//! * the current partial makespan, which extension never shrinks.
//!
//! All three are monotone along parent→child edges, and for a complete
//! state the max equals the true makespan exactly (the search loops rely
//! on both properties; the test suites assert them state by state).

use crate::ao::{AllocationState, AoState, OrderingState};
use crate::els::ElsState;
use crate::graph::{SystemSpec, TaskGraph};
use crate::{ProcId, TaskId, Time};

/// Precomputed ingredients shared by every f evaluation on one instance.
#[derive(Debug, Clone)]
pub struct BoundContext {
    /// Computation-only bottom level: bl(n) = w(n) + max over children
    /// of bl(child). Edge weights are ignored, which keeps the level a
    /// lower bound on any processor count.
    bottom_level: Vec<Time>,
    total_work: Time,
    num_procs: usize,
}

impl BoundContext {
    pub fn compute(g: &TaskGraph, sys: &SystemSpec) -> BoundContext {
        let mut bl = vec![0 as Time; g.num_tasks()];
        let order = g.topological_order().expect("validated graph");
        for &t in order.iter().rev() {
            let below = g.children(t).iter().map(|&(c, _)| bl[c]).max().unwrap_or(0);
            bl[t] = g.weight(t) + below;
        }
        BoundContext { bottom_level: bl, total_work: g.total_work(), num_procs: sys.num_procs() }
    }

    pub fn bottom_level(&self, task: TaskId) -> Time {
        self.bottom_level[task]
    }

    pub fn total_work(&self) -> Time {
        self.total_work
    }

    pub fn num_procs(&self) -> usize {
        self.num_procs
    }

    fn num_tasks(&self) -> usize {
        self.bottom_level.len()
    }
}

fn ceil_div(a: Time, b: u64) -> Time {
    (a + b - 1) / b
}

/// Lower bound for a list-scheduling state: max of
/// (a) critical path — start+bl over placed tasks, bare bl over
///     unplaced ones (they start at 0 at best);
/// (b) load — ceil((total work + committed idle) / procs), where gaps
///     already present in the partial schedule can never be filled
///     because tasks are appended at or after each processor's finish;
/// (c) the partial makespan itself.
pub fn f_els(state: &ElsState, ctx: &BoundContext) -> Time {
    let mut cp = state.scheduled_cp_bound();
    let scheduled = state.scheduled_mask();
    for t in 0..ctx.num_tasks() {
        if scheduled & (1 << t) == 0 {
            cp = cp.max(ctx.bottom_level[t]);
        }
    }
    let load = ceil_div(ctx.total_work + state.idle_time(), ctx.num_procs as u64);
    cp.max(load).max(state.partial_makespan())
}

/// Lower bound for an allocation-ordering state.
///
/// Allocation states take the max of the per-subset load (a subset runs
/// entirely on one processor), the allocated critical path (edge costs
/// zeroed inside a subset and wherever an endpoint is still
/// unallocated), and the global load bound. Ordering states replace the
/// critical path with one over the combined constraint graph, where the
/// already-fixed sequence positions add zero-cost chain edges.
pub fn f_ao(state: &AoState, g: &TaskGraph, ctx: &BoundContext) -> Time {
    match state {
        AoState::Allocation(a) => f_allocation(a, g, ctx),
        AoState::Ordering(o) => f_ordering(o, g, ctx),
    }
}

fn f_allocation(state: &AllocationState, g: &TaskGraph, ctx: &BoundContext) -> Time {
    let subset_load = state.subset_works().iter().copied().max().unwrap_or(0);
    let cp = allocated_critical_path(g, |t| state.subset_of(t));
    let load = ceil_div(ctx.total_work, ctx.num_procs as u64);
    subset_load.max(cp).max(load)
}

fn f_ordering(state: &OrderingState, g: &TaskGraph, ctx: &BoundContext) -> Time {
    let cp = combined_critical_path(g, state.proc_of(), state.sequences())
        .expect("ordering states keep the combined constraint graph acyclic");
    f_ordering_from_cp(state, ctx, cp)
}

/// Ordering bound when the combined critical path is already known
/// (expansion computes it anyway while filtering cyclic children).
pub(crate) fn f_ordering_from_cp(state: &OrderingState, ctx: &BoundContext, cp: Time) -> Time {
    let subset_load = state.subset_works().iter().copied().max().unwrap_or(0);
    let load = ceil_div(ctx.total_work, ctx.num_procs as u64);
    subset_load.max(cp).max(load)
}

/// Longest path over the precedence DAG where an edge costs its
/// communication weight only when both endpoints are allocated to
/// different subsets, and 0 otherwise (same subset, or placement still
/// open). `subset_of` returns None for unallocated tasks.
fn allocated_critical_path(g: &TaskGraph, subset_of: impl Fn(TaskId) -> Option<usize>) -> Time {
    let order = g.topological_order().expect("validated graph");
    let mut lp = vec![0 as Time; g.num_tasks()];
    let mut best = 0;
    for &t in order.iter().rev() {
        let mut below = 0;
        for &(c, comm) in g.children(t) {
            let cost = match (subset_of(t), subset_of(c)) {
                (Some(a), Some(b)) if a != b => comm,
                _ => 0,
            };
            below = below.max(cost + lp[c]);
        }
        lp[t] = g.weight(t) + below;
        best = best.max(lp[t]);
    }
    best
}

/// Longest path over the combined constraint graph: precedence edges
/// (cost = comm when the endpoints sit on different processors, else 0)
/// plus zero-cost chain edges between consecutive tasks of each fixed
/// sequence prefix. Returns None when the combination is cyclic, i.e.
/// the sequences contradict precedence across processors.
pub(crate) fn combined_critical_path(
    g: &TaskGraph,
    proc_of: &[ProcId],
    sequences: &[Vec<TaskId>],
) -> Option<Time> {
    let n = g.num_tasks();
    let mut chain_next: Vec<Option<TaskId>> = vec![None; n];
    let mut chain_indeg = vec![0usize; n];
    for seq in sequences {
        for pair in seq.windows(2) {
            chain_next[pair[0]] = Some(pair[1]);
            chain_indeg[pair[1]] += 1;
        }
    }

    // Kahn over the combined graph, recording the processing order.
    let mut indegree: Vec<usize> =
        (0..n).map(|t| g.parents(t).len() + chain_indeg[t]).collect();
    let mut ready: Vec<TaskId> = (0..n).filter(|&t| indegree[t] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(t) = ready.pop() {
        order.push(t);
        for &(c, _) in g.children(t) {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push(c);
            }
        }
        if let Some(nx) = chain_next[t] {
            indegree[nx] -= 1;
            if indegree[nx] == 0 {
                ready.push(nx);
            }
        }
    }
    if order.len() != n {
        return None;
    }

    let mut lp = vec![0 as Time; n];
    let mut best = 0;
    for &t in order.iter().rev() {
        let mut below = 0;
        for &(c, comm) in g.children(t) {
            let cost = if proc_of[t] == proc_of[c] { 0 } else { comm };
            below = below.max(cost + lp[c]);
        }
        if let Some(nx) = chain_next[t] {
            below = below.max(lp[nx]);
        }
        lp[t] = g.weight(t) + below;
        best = best.max(lp[t]);
    }
    Some(best)
}
