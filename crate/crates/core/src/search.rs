//! Sequential best-first and depth-first branch-and-bound solvers,
//! generic over a state space.
//!
//! A* pops states from a priority queue in non-decreasing f order. With
//! an admissible, monotone f the first complete state popped is
//! optimal. DFBnB explores depth-first, keeps the best complete
//! solution found so far, and prunes any state whose f does not beat
//! it; when the stack runs dry the incumbent is optimal. A* is faster
//! when memory allows, DFBnB needs only O(bd) space.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::time::{Duration, Instant};

use crate::graph::TaskGraph;
use crate::schedule::Schedule;
use crate::Time;

/// A search problem: a root, a child generator, and a way to read a
/// schedule back out of a complete state. Expansion returns each child
/// with its f value (lower bound on the best completion through it).
pub trait StateSpace: Sync {
    type State: Clone + Send;

    fn graph(&self) -> &TaskGraph;

    /// Root state and its f value.
    fn initial(&self) -> (Self::State, Time);

    fn is_complete(&self, state: &Self::State) -> bool;

    fn expand(&self, state: &Self::State) -> Vec<(Self::State, Time)>;

    /// Decisions committed so far; used for tie-breaking.
    fn depth(&self, state: &Self::State) -> usize;

    /// Canonical identity for duplicate detection: two states with
    /// equal keys lead to the same set of completions.
    fn dup_key(&self, state: &Self::State) -> Vec<u8>;

    /// The schedule a complete state stands for.
    fn extract_schedule(&self, state: &Self::State) -> Schedule;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Solver {
    Astar,
    Dfbnb,
    Pastar,
    PastarDd,
    Pdfs,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Astar => "astar",
            Solver::Dfbnb => "dfbnb",
            Solver::Pastar => "pastar",
            Solver::PastarDd => "pastar-dd",
            Solver::Pdfs => "pdfs",
        }
    }

    pub fn is_parallel(self) -> bool {
        matches!(self, Solver::Pastar | Solver::PastarDd | Solver::Pdfs)
    }
}

impl std::fmt::Display for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Solver {
    type Err = String;

    fn from_str(s: &str) -> Result<Solver, String> {
        match s {
            "astar" => Ok(Solver::Astar),
            "dfbnb" => Ok(Solver::Dfbnb),
            "pastar" => Ok(Solver::Pastar),
            "pastar-dd" => Ok(Solver::PastarDd),
            "pdfs" => Ok(Solver::Pdfs),
            _ => Err(format!("unknown solver {s:?}")),
        }
    }
}

/// Where every generated state ended up. The counters satisfy
/// generated = expanded + pruned + duplicates + flushed + leftover
/// on every run, so no state is silently dropped.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// States created, root included.
    pub generated: u64,
    /// States popped and examined (the returned complete state counts).
    pub expanded: u64,
    /// States discarded against the best known solution.
    pub pruned: u64,
    /// States discarded because their key was already seen.
    pub duplicates: u64,
    /// States discarded by emptying a local queue wholesale.
    pub flushed: u64,
    /// States still in open structures at termination.
    pub leftover: u64,
    /// Largest total open size observed.
    pub peak_open: u64,
    /// Largest single-expansion child count.
    pub max_branching: u64,
    /// Deepest state generated.
    pub max_depth: u64,
}

impl SearchStats {
    pub fn accounted(&self) -> u64 {
        self.expanded + self.pruned + self.duplicates + self.flushed + self.leftover
    }

    fn saw_state(&mut self, depth: usize) {
        self.generated += 1;
        self.max_depth = self.max_depth.max(depth as u64);
    }

    fn saw_open_size(&mut self, len: usize) {
        self.peak_open = self.peak_open.max(len as u64);
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub schedule: Schedule,
    pub makespan: Time,
    pub solver: Solver,
    pub stats: SearchStats,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum SearchError {
    #[error("search timed out")]
    TimedOut { stats: SearchStats, wall_time: Duration },
    #[error("open set exceeded the memory budget")]
    MemoryExceeded { stats: SearchStats, wall_time: Duration },
}

#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    pub timeout: Option<Duration>,
    /// Cap on the total open size, as a stand-in for a byte budget.
    pub max_open: Option<usize>,
}

impl Default for SearchLimits {
    fn default() -> SearchLimits {
        SearchLimits { timeout: Some(Duration::from_secs(120)), max_open: None }
    }
}

impl SearchLimits {
    pub fn none() -> SearchLimits {
        SearchLimits { timeout: None, max_open: None }
    }

    pub fn with_timeout(timeout: Duration) -> SearchLimits {
        SearchLimits { timeout: Some(timeout), max_open: None }
    }

    pub(crate) fn deadline(&self) -> Option<Instant> {
        self.timeout.map(|t| Instant::now() + t)
    }
}

/// Heap entry ranked so the max-heap surfaces the best state: lowest
/// f, then greatest depth (closer to completion), then earliest
/// insertion.
pub(crate) struct OpenEntry<S> {
    pub f: Time,
    pub depth: usize,
    pub seq: u64,
    pub state: S,
}

impl<S> Ord for OpenEntry<S> {
    fn cmp(&self, other: &OpenEntry<S>) -> Ordering {
        other
            .f
            .cmp(&self.f)
            .then_with(|| self.depth.cmp(&other.depth))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl<S> PartialOrd for OpenEntry<S> {
    fn partial_cmp(&self, other: &OpenEntry<S>) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S> PartialEq for OpenEntry<S> {
    fn eq(&self, other: &OpenEntry<S>) -> bool {
        self.f == other.f && self.depth == other.depth && self.seq == other.seq
    }
}

impl<S> Eq for OpenEntry<S> {}

/// Best-first search. With `dup_detect`, a generated state whose
/// canonical key was already seen is dropped; the ELS space needs this
/// to avoid re-exploring identical partial schedules, while on the AO
/// space it never fires.
pub fn astar<S: StateSpace>(
    space: &S,
    dup_detect: bool,
    limits: &SearchLimits,
) -> Result<SearchResult, SearchError> {
    let start = Instant::now();
    let deadline = limits.deadline();
    let mut stats = SearchStats::default();
    let mut open = BinaryHeap::new();
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut seq = 0u64;

    let (root, root_f) = space.initial();
    stats.saw_state(space.depth(&root));
    if dup_detect {
        seen.insert(space.dup_key(&root));
    }
    open.push(OpenEntry { f: root_f, depth: space.depth(&root), seq, state: root });
    stats.saw_open_size(1);

    #[cfg(debug_assertions)]
    let mut last_popped_f = 0;

    while let Some(entry) = open.pop() {
        if let Some(d) = deadline {
            if Instant::now() >= d {
                stats.leftover = open.len() as u64 + 1;
                return Err(SearchError::TimedOut { stats, wall_time: start.elapsed() });
            }
        }
        #[cfg(debug_assertions)]
        {
            debug_assert!(entry.f >= last_popped_f, "popped f must be non-decreasing");
            last_popped_f = entry.f;
        }

        stats.expanded += 1;
        if space.is_complete(&entry.state) {
            stats.leftover = open.len() as u64;
            let schedule = space.extract_schedule(&entry.state);
            let makespan = schedule.makespan(space.graph()).expect("complete state");
            debug_assert_eq!(makespan, entry.f, "f of a complete state is its makespan");
            return Ok(SearchResult {
                schedule,
                makespan,
                solver: Solver::Astar,
                stats,
                wall_time: start.elapsed(),
            });
        }

        let children = space.expand(&entry.state);
        stats.max_branching = stats.max_branching.max(children.len() as u64);
        for (child, f) in children {
            let depth = space.depth(&child);
            stats.saw_state(depth);
            debug_assert!(f >= entry.f, "monotone f must not decrease along an edge");
            if dup_detect && !seen.insert(space.dup_key(&child)) {
                stats.duplicates += 1;
                continue;
            }
            seq += 1;
            open.push(OpenEntry { f, depth, seq, state: child });
        }
        stats.saw_open_size(open.len());
        if let Some(cap) = limits.max_open {
            if open.len() > cap {
                stats.leftover = open.len() as u64;
                return Err(SearchError::MemoryExceeded { stats, wall_time: start.elapsed() });
            }
        }
    }

    unreachable!("a finite space with feasible schedules always yields a complete state");
}

/// Depth-first branch and bound. Keeps O(bd) states: the stack only
/// ever holds the unexplored siblings along the current path.
pub fn dfbnb<S: StateSpace>(
    space: &S,
    limits: &SearchLimits,
) -> Result<SearchResult, SearchError> {
    let start = Instant::now();
    let deadline = limits.deadline();
    let mut stats = SearchStats::default();

    let mut f_best = Time::MAX;
    let mut incumbent: Option<S::State> = None;

    let (root, root_f) = space.initial();
    stats.saw_state(space.depth(&root));
    let mut stack = vec![(root, root_f)];
    stats.saw_open_size(1);

    while let Some((state, f)) = stack.pop() {
        if let Some(d) = deadline {
            if Instant::now() >= d {
                stats.leftover = stack.len() as u64 + 1;
                return Err(SearchError::TimedOut { stats, wall_time: start.elapsed() });
            }
        }
        if f >= f_best {
            stats.pruned += 1;
            continue;
        }
        stats.expanded += 1;
        if space.is_complete(&state) {
            f_best = f;
            incumbent = Some(state);
            continue;
        }

        let mut children = space.expand(&state);
        stats.max_branching = stats.max_branching.max(children.len() as u64);
        // Push in decreasing f so the most promising child is on top.
        children.sort_by(|a, b| b.1.cmp(&a.1));
        for (child, cf) in children {
            stats.saw_state(space.depth(&child));
            if cf >= f_best {
                stats.pruned += 1;
                continue;
            }
            stack.push((child, cf));
        }
        stats.saw_open_size(stack.len());
    }

    let state = incumbent.expect("a finite space always yields a complete state");
    let schedule = space.extract_schedule(&state);
    let makespan = schedule.makespan(space.graph()).expect("complete state");
    debug_assert_eq!(makespan, f_best);
    Ok(SearchResult {
        schedule,
        makespan,
        solver: Solver::Dfbnb,
        stats,
        wall_time: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ao::AoSpace;
    use crate::bounds::BoundContext;
    use crate::els::ElsSpace;
    use crate::graph::{SystemSpec, TaskGraph};

    fn diamond() -> TaskGraph {
        TaskGraph::new(
            vec![2, 3, 3, 1],
            vec![(0, 1, 1), (0, 2, 1), (1, 3, 2), (2, 3, 2)],
        )
        .unwrap()
    }

    fn solve_both(g: &TaskGraph, procs: usize) -> Vec<Time> {
        let sys = SystemSpec::new(procs);
        let ctx = BoundContext::compute(g, &sys);
        let els = ElsSpace::new(g, &sys, &ctx);
        let ao = AoSpace::new(g, &sys, &ctx);
        let limits = SearchLimits::none();
        vec![
            astar(&els, true, &limits).unwrap().makespan,
            dfbnb(&els, &limits).unwrap().makespan,
            astar(&ao, false, &limits).unwrap().makespan,
            dfbnb(&ao, &limits).unwrap().makespan,
        ]
    }

    #[test]
    fn single_task_solves_immediately() {
        let g = TaskGraph::new(vec![4], vec![]).unwrap();
        assert_eq!(solve_both(&g, 2), vec![4, 4, 4, 4]);
    }

    #[test]
    fn diamond_optimum_is_8() {
        assert_eq!(solve_both(&diamond(), 2), vec![8, 8, 8, 8]);
    }

    #[test]
    fn three_independent_tasks_pack_as_4() {
        let g = TaskGraph::new(vec![2, 2, 2], vec![]).unwrap();
        assert_eq!(solve_both(&g, 2), vec![4, 4, 4, 4]);
    }

    #[test]
    fn chain_runs_sequentially() {
        let g = TaskGraph::new(vec![1, 1, 1], vec![(0, 1, 0), (1, 2, 0)]).unwrap();
        assert_eq!(solve_both(&g, 2), vec![3, 3, 3, 3]);
    }

    #[test]
    fn results_carry_valid_schedules() {
        let g = diamond();
        let sys = SystemSpec::new(2);
        let ctx = BoundContext::compute(&g, &sys);
        let els = ElsSpace::new(&g, &sys, &ctx);
        let r = astar(&els, true, &SearchLimits::none()).unwrap();
        assert_eq!(r.schedule.is_valid(&g, &sys), Ok(true));
        assert_eq!(r.schedule.makespan(&g).unwrap(), r.makespan);
        assert_eq!(r.solver, Solver::Astar);
    }

    #[test]
    fn empty_graph_has_zero_makespan() {
        let g = TaskGraph::new(vec![], vec![]).unwrap();
        assert_eq!(solve_both(&g, 2), vec![0, 0, 0, 0]);
    }

    #[test]
    fn astar_accounts_for_every_generated_state() {
        let g = diamond();
        let sys = SystemSpec::new(2);
        let ctx = BoundContext::compute(&g, &sys);
        let els = ElsSpace::new(&g, &sys, &ctx);
        for dup in [false, true] {
            let r = astar(&els, dup, &SearchLimits::none()).unwrap();
            assert_eq!(r.stats.generated, r.stats.accounted());
            assert_eq!(r.stats.pruned, 0);
            assert_eq!(r.stats.flushed, 0);
        }
    }

    #[test]
    fn dfbnb_accounts_for_every_generated_state() {
        let g = diamond();
        for procs in [1, 2, 3] {
            let sys = SystemSpec::new(procs);
            let ctx = BoundContext::compute(&g, &sys);
            let els = ElsSpace::new(&g, &sys, &ctx);
            let r = dfbnb(&els, &SearchLimits::none()).unwrap();
            assert_eq!(r.stats.generated, r.stats.accounted());
            assert_eq!(r.stats.duplicates, 0);
            assert_eq!(r.stats.leftover, 0);
        }
    }

    #[test]
    fn dfbnb_stack_stays_within_branching_times_depth() {
        let g = diamond();
        let sys = SystemSpec::new(3);
        let ctx = BoundContext::compute(&g, &sys);
        let els = ElsSpace::new(&g, &sys, &ctx);
        let r = dfbnb(&els, &SearchLimits::none()).unwrap();
        assert!(r.stats.peak_open <= r.stats.max_branching * r.stats.max_depth);
    }

    #[test]
    fn timeout_reports_partial_stats() {
        // An instance big enough that expansion cannot finish in zero time.
        let g = TaskGraph::new(vec![1; 12], vec![]).unwrap();
        let sys = SystemSpec::new(3);
        let ctx = BoundContext::compute(&g, &sys);
        let els = ElsSpace::new(&g, &sys, &ctx);
        let limits = SearchLimits::with_timeout(Duration::ZERO);
        match astar(&els, true, &limits) {
            Err(SearchError::TimedOut { stats, .. }) => {
                assert_eq!(stats.generated, stats.accounted());
            }
            other => panic!("expected timeout, got {other:?}"),
        }
    }

    #[test]
    fn open_cap_reports_memory_exhaustion() {
        let g = TaskGraph::new(vec![1; 10], vec![]).unwrap();
        let sys = SystemSpec::new(3);
        let ctx = BoundContext::compute(&g, &sys);
        let els = ElsSpace::new(&g, &sys, &ctx);
        let limits = SearchLimits { timeout: None, max_open: Some(50) };
        match astar(&els, false, &limits) {
            Err(SearchError::MemoryExceeded { stats, .. }) => {
                assert!(stats.peak_open > 50);
            }
            other => panic!("expected memory exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn tie_break_prefers_deeper_states() {
        let mut heap = BinaryHeap::new();
        heap.push(OpenEntry { f: 5, depth: 1, seq: 0, state: () });
        heap.push(OpenEntry { f: 5, depth: 3, seq: 1, state: () });
        heap.push(OpenEntry { f: 4, depth: 0, seq: 2, state: () });
        assert_eq!(heap.pop().unwrap().f, 4);
        let next = heap.pop().unwrap();
        assert_eq!((next.f, next.depth), (5, 3));
    }

    #[test]
    fn tie_break_falls_back_to_insertion_order() {
        let mut heap = BinaryHeap::new();
        heap.push(OpenEntry { f: 7, depth: 2, seq: 0, state: "first" });
        heap.push(OpenEntry { f: 7, depth: 2, seq: 1, state: "second" });
        assert_eq!(heap.pop().unwrap().state, "first");
    }

    #[test]
    fn duplicate_detection_is_noop_on_ao() {
        let g = diamond();
        let sys = SystemSpec::new(2);
        let ctx = BoundContext::compute(&g, &sys);
        let ao = AoSpace::new(&g, &sys, &ctx);
        let with = astar(&ao, true, &SearchLimits::none()).unwrap();
        let without = astar(&ao, false, &SearchLimits::none()).unwrap();
        assert_eq!(with.stats.duplicates, 0);
        assert_eq!(with.stats.expanded, without.stats.expanded);
    }

    #[test]
    fn solver_names_round_trip() {
        for s in [Solver::Astar, Solver::Dfbnb, Solver::Pastar, Solver::PastarDd, Solver::Pdfs] {
            assert_eq!(s.name().parse::<Solver>().unwrap(), s);
        }
    }
}
