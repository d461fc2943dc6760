//! Shared-memory parallel solvers: PA*, PA* with duplicate detection,
//! and parallel depth-first branch and bound.
//!
//! All three share one pool shape. A short sequential A* run seeds the
//! pool, dealing its open set round-robin to per-worker queues; each
//! worker then loops pop-test-expand against a local copy of the best
//! known solution, refreshed every `sync_threshold` pops. A worker
//! whose queue runs dry announces itself idle and steals from a random
//! victim: the best state for PA* (the head of an ordered queue), the
//! shallowest for PDFS (the tail of the deque, holding the largest
//! subtree). The pool ends when every worker is idle at once.
//!
//! The solvers differ from their sequential counterparts only in
//! traversal timing, never in the result: a state is discarded only
//! against a bound the incumbent already meets, so the final incumbent
//! is optimal no matter how the race unfolds.

use std::collections::{BinaryHeap, VecDeque};
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicU8, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use dashmap::DashSet;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::search::{
    OpenEntry, SearchError, SearchLimits, SearchResult, SearchStats, Solver, StateSpace,
};
use crate::Time;

/// Per-worker states to seed before the pool starts.
const SEED_FACTOR: usize = 8;

const RUNNING: u8 = 0;
const ABORT_TIMEOUT: u8 = 1;
const ABORT_MEMORY: u8 = 2;

#[derive(Debug, Clone)]
pub struct ParallelConfig {
    pub threads: usize,
    /// Pops between refreshes of a worker's local copy of the best
    /// known solution.
    pub sync_threshold: u64,
    /// Seeds the per-worker victim-selection generators.
    pub steal_seed: u64,
    pub limits: SearchLimits,
}

impl ParallelConfig {
    pub fn new(threads: usize) -> ParallelConfig {
        ParallelConfig {
            threads,
            sync_threshold: 100_000,
            steal_seed: 0,
            limits: SearchLimits::default(),
        }
    }
}

/// Worker-local open structure. Owners push and pop at the working
/// end; thieves remove from the steal end. Which ends those are is
/// what distinguishes PA* from PDFS.
trait LocalQueue<St>: Default + Send {
    fn push_seed(&mut self, e: OpenEntry<St>);
    fn push_stolen(&mut self, e: OpenEntry<St>);
    fn push_children(&mut self, batch: Vec<OpenEntry<St>>);
    fn pop(&mut self) -> Option<OpenEntry<St>>;
    /// Removes the state a thief is entitled to, per policy.
    fn steal(&mut self) -> Option<OpenEntry<St>>;
    fn len(&self) -> usize;
    fn clear(&mut self) -> u64;
}

/// Best-first queue; pop and steal both take the lowest-f state.
struct HeapQueue<St>(BinaryHeap<OpenEntry<St>>);

impl<St> Default for HeapQueue<St> {
    fn default() -> Self {
        HeapQueue(BinaryHeap::new())
    }
}

impl<St: Send> LocalQueue<St> for HeapQueue<St> {
    fn push_seed(&mut self, e: OpenEntry<St>) {
        self.0.push(e);
    }

    fn push_stolen(&mut self, e: OpenEntry<St>) {
        self.0.push(e);
    }

    fn push_children(&mut self, batch: Vec<OpenEntry<St>>) {
        self.0.extend(batch);
    }

    fn pop(&mut self) -> Option<OpenEntry<St>> {
        self.0.pop()
    }

    fn steal(&mut self) -> Option<OpenEntry<St>> {
        self.0.pop()
    }

    fn len(&self) -> usize {
        self.0.len()
    }

    fn clear(&mut self) -> u64 {
        let n = self.0.len() as u64;
        self.0.clear();
        n
    }
}

/// Depth-first deque; the owner works at the front, thieves take the
/// back, where the shallowest states (largest unexplored subtrees)
/// sit.
struct DequeQueue<St>(VecDeque<OpenEntry<St>>);

impl<St> Default for DequeQueue<St> {
    fn default() -> Self {
        DequeQueue(VecDeque::new())
    }
}

impl<St: Send> LocalQueue<St> for DequeQueue<St> {
    fn push_seed(&mut self, e: OpenEntry<St>) {
        // Seeds arrive best-first; queue them so the best is popped first.
        self.0.push_back(e);
    }

    fn push_stolen(&mut self, e: OpenEntry<St>) {
        self.0.push_front(e);
    }

    fn push_children(&mut self, mut batch: Vec<OpenEntry<St>>) {
        // Decreasing f, pushed front one by one: lowest f ends on top.
        batch.sort_by(|a, b| b.f.cmp(&a.f));
        for e in batch {
            self.0.push_front(e);
        }
    }

    fn pop(&mut self) -> Option<OpenEntry<St>> {
        self.0.pop_front()
    }

    fn steal(&mut self) -> Option<OpenEntry<St>> {
        self.0.pop_back()
    }

    fn len(&self) -> usize {
        self.0.len()
    }

    fn clear(&mut self) -> u64 {
        let n = self.0.len() as u64;
        self.0.clear();
        n
    }
}

struct Incumbent<St> {
    f: Time,
    state: Option<St>,
    /// Every f ever stored, in store order; strictly decreasing.
    log: Vec<Time>,
}

struct Pool<'a, S: StateSpace, Q> {
    space: &'a S,
    queues: Vec<Mutex<Q>>,
    has_work: Vec<AtomicBool>,
    idle: AtomicUsize,
    incumbent: Mutex<Incumbent<S::State>>,
    /// Read side of the incumbent's f, refreshed on every store.
    best_f: AtomicU64,
    dup: Option<DashSet<Vec<u8>>>,
    /// States currently sitting in any queue.
    open_total: AtomicU64,
    abort: AtomicU8,
    deadline: Option<Instant>,
    max_open: Option<usize>,
    sync_threshold: u64,
    /// When set, popping f >= the local best flushes the whole queue
    /// (sound for ordered queues: everything behind the pop is worse).
    flush_on_prune: bool,
}

impl<'a, S: StateSpace, Q: LocalQueue<S::State>> Pool<'a, S, Q> {
    /// Stores a solution unless one at least as good is already held;
    /// returns the f in force afterwards.
    fn offer_solution(&self, f: Time, state: S::State) -> Time {
        let mut inc = self.incumbent.lock().unwrap();
        if f < inc.f {
            inc.f = f;
            inc.state = Some(state);
            inc.log.push(f);
            self.best_f.store(f, Ordering::SeqCst);
        }
        inc.f
    }

    fn timed_out(&self) -> bool {
        match self.deadline {
            Some(d) if Instant::now() >= d => {
                let _ = self.abort.compare_exchange(
                    RUNNING,
                    ABORT_TIMEOUT,
                    Ordering::SeqCst,
                    Ordering::SeqCst,
                );
                true
            }
            _ => self.abort.load(Ordering::SeqCst) != RUNNING,
        }
    }

    /// One steal attempt against one uniformly random victim. Fails
    /// when no victim exists, the victim advertises no work, or its
    /// queue empties before the lock is taken.
    fn steal_once(&self, thief: usize, rng: &mut ChaCha8Rng) -> Option<OpenEntry<S::State>> {
        let w = self.queues.len();
        if w < 2 {
            return None;
        }
        let r = rng.gen_range(0..w - 1);
        let victim = r + usize::from(r >= thief);
        if !self.has_work[victim].load(Ordering::Relaxed) {
            return None;
        }
        let mut q = self.queues[victim].lock().unwrap();
        let e = q.steal();
        self.has_work[victim].store(q.len() > 0, Ordering::Relaxed);
        e
    }

    fn worker(&self, id: usize, steal_seed: u64) -> SearchStats {
        let num_workers = self.queues.len();
        let mut rng = ChaCha8Rng::seed_from_u64(steal_seed ^ (id as u64).wrapping_mul(0x9E3779B97F4A7C15));
        let mut stats = SearchStats::default();
        let mut local_best = self.best_f.load(Ordering::SeqCst);
        let mut pops_since_sync = 0u64;
        // Distinct per worker so heap tie-breaks stay total.
        let mut next_seq = ((id as u64) + 1) << 40;

        loop {
            if self.timed_out() {
                return stats;
            }

            let popped = {
                let mut q = self.queues[id].lock().unwrap();
                let e = q.pop();
                self.has_work[id].store(q.len() > 0, Ordering::Relaxed);
                e
            };

            let Some(entry) = popped else {
                // Out of work: announce idleness, then steal. The idle
                // count is incremented before the attempt and
                // decremented only after success, so it can only
                // overcount; the recheck below turns transient
                // overcounts into retries, never missed work.
                self.idle.fetch_add(1, Ordering::SeqCst);
                let mut failures = 0;
                let stolen = loop {
                    if self.timed_out() {
                        break None;
                    }
                    if let Some(e) = self.steal_once(id, &mut rng) {
                        break Some(e);
                    }
                    failures += 1;
                    if failures >= num_workers {
                        if self.idle.load(Ordering::SeqCst) == num_workers {
                            break None;
                        }
                        failures = 0;
                        std::thread::yield_now();
                    }
                };
                match stolen {
                    Some(e) => {
                        self.idle.fetch_sub(1, Ordering::SeqCst);
                        let mut q = self.queues[id].lock().unwrap();
                        q.push_stolen(e);
                        self.has_work[id].store(true, Ordering::Relaxed);
                        continue;
                    }
                    // Exit while idle; the count stays raised so the
                    // remaining workers see it and leave too.
                    None => return stats,
                }
            };

            self.open_total.fetch_sub(1, Ordering::SeqCst);
            pops_since_sync += 1;
            if pops_since_sync >= self.sync_threshold {
                local_best = self.best_f.load(Ordering::SeqCst);
                pops_since_sync = 0;
            }

            if entry.f >= local_best {
                stats.pruned += 1;
                if self.flush_on_prune {
                    // Ordered queue: everything left is at least as bad.
                    let mut q = self.queues[id].lock().unwrap();
                    let n = q.clear();
                    self.has_work[id].store(false, Ordering::Relaxed);
                    drop(q);
                    stats.flushed += n;
                    self.open_total.fetch_sub(n, Ordering::SeqCst);
                }
                continue;
            }

            stats.expanded += 1;
            if self.space.is_complete(&entry.state) {
                let stored = self.offer_solution(entry.f, entry.state);
                local_best = local_best.min(stored);
                continue;
            }

            let children = self.space.expand(&entry.state);
            stats.max_branching = stats.max_branching.max(children.len() as u64);
            let mut batch = Vec::with_capacity(children.len());
            for (child, f) in children {
                let depth = self.space.depth(&child);
                stats.generated += 1;
                stats.max_depth = stats.max_depth.max(depth as u64);
                if f >= local_best {
                    stats.pruned += 1;
                    continue;
                }
                if let Some(dup) = &self.dup {
                    if !dup.insert(self.space.dup_key(&child)) {
                        stats.duplicates += 1;
                        continue;
                    }
                }
                next_seq += 1;
                batch.push(OpenEntry { f, depth, seq: next_seq, state: child });
            }
            let pushed = batch.len() as u64;
            // Counted before they become stealable: a racing worker may
            // pop a child and decrement before this add otherwise.
            let total = self.open_total.fetch_add(pushed, Ordering::SeqCst) + pushed;
            stats.peak_open = stats.peak_open.max(total);
            if pushed > 0 {
                let mut q = self.queues[id].lock().unwrap();
                q.push_children(batch);
                self.has_work[id].store(true, Ordering::Relaxed);
            }
            if let Some(cap) = self.max_open {
                if total as usize > cap {
                    let _ = self.abort.compare_exchange(
                        RUNNING,
                        ABORT_MEMORY,
                        Ordering::SeqCst,
                        Ordering::SeqCst,
                    );
                    return stats;
                }
            }
        }
    }
}

enum Seeded<St> {
    /// Enough open states to start the pool, in pop order.
    Spread(Vec<OpenEntry<St>>),
    /// The instance completed during seeding.
    Done { state: St, f: Time },
}

/// Sequential A* until the open set can feed every worker, or the
/// instance is solved outright.
fn seed_states<S: StateSpace>(
    space: &S,
    dup: Option<&DashSet<Vec<u8>>>,
    num_workers: usize,
    deadline: Option<Instant>,
    stats: &mut SearchStats,
) -> Result<Seeded<S::State>, SearchStats> {
    let want = SEED_FACTOR * num_workers;
    let mut open = BinaryHeap::new();
    let mut seq = 0u64;

    let (root, root_f) = space.initial();
    stats.generated += 1;
    stats.max_depth = stats.max_depth.max(space.depth(&root) as u64);
    if let Some(dup) = dup {
        dup.insert(space.dup_key(&root));
    }
    open.push(OpenEntry { f: root_f, depth: space.depth(&root), seq, state: root });
    stats.peak_open = stats.peak_open.max(1);

    loop {
        if open.len() >= want {
            let mut spread = Vec::with_capacity(open.len());
            while let Some(e) = open.pop() {
                spread.push(e);
            }
            return Ok(Seeded::Spread(spread));
        }
        if let Some(d) = deadline {
            if Instant::now() >= d {
                stats.leftover += open.len() as u64;
                return Err(*stats);
            }
        }
        let entry = open.pop().expect("a finite feasible space cannot exhaust unsolved");
        stats.expanded += 1;
        if space.is_complete(&entry.state) {
            stats.leftover += open.len() as u64;
            return Ok(Seeded::Done { state: entry.state, f: entry.f });
        }
        let children = space.expand(&entry.state);
        stats.max_branching = stats.max_branching.max(children.len() as u64);
        for (child, f) in children {
            stats.generated += 1;
            stats.max_depth = stats.max_depth.max(space.depth(&child) as u64);
            if let Some(dup) = dup {
                if !dup.insert(space.dup_key(&child)) {
                    stats.duplicates += 1;
                    continue;
                }
            }
            seq += 1;
            open.push(OpenEntry { f, depth: space.depth(&child), seq, state: child });
        }
        stats.peak_open = stats.peak_open.max(open.len() as u64);
    }
}

fn merge(total: &mut SearchStats, part: &SearchStats) {
    total.generated += part.generated;
    total.expanded += part.expanded;
    total.pruned += part.pruned;
    total.duplicates += part.duplicates;
    total.flushed += part.flushed;
    total.leftover += part.leftover;
    total.peak_open = total.peak_open.max(part.peak_open);
    total.max_branching = total.max_branching.max(part.max_branching);
    total.max_depth = total.max_depth.max(part.max_depth);
}

fn run_pool<S: StateSpace, Q: LocalQueue<S::State>>(
    space: &S,
    solver: Solver,
    dup_detect: bool,
    flush_on_prune: bool,
    cfg: &ParallelConfig,
) -> Result<(SearchResult, Vec<Time>), SearchError> {
    assert!(cfg.threads >= 1, "a worker pool needs at least one worker");
    let start = Instant::now();
    let deadline = cfg.limits.deadline();
    let mut stats = SearchStats::default();
    let dup = dup_detect.then(DashSet::new);

    let seeds = match seed_states(space, dup.as_ref(), cfg.threads, deadline, &mut stats) {
        Ok(s) => s,
        Err(stats) => {
            return Err(SearchError::TimedOut { stats, wall_time: start.elapsed() })
        }
    };
    let spread = match seeds {
        Seeded::Done { state, f } => {
            let schedule = space.extract_schedule(&state);
            debug_assert_eq!(schedule.makespan(space.graph()).expect("complete"), f);
            return Ok((
                SearchResult {
                    schedule,
                    makespan: f,
                    solver,
                    stats,
                    wall_time: start.elapsed(),
                },
                vec![f],
            ));
        }
        Seeded::Spread(spread) => spread,
    };

    let pool = Pool::<S, Q> {
        space,
        queues: (0..cfg.threads).map(|_| Mutex::new(Q::default())).collect(),
        has_work: (0..cfg.threads).map(|_| AtomicBool::new(false)).collect(),
        idle: AtomicUsize::new(0),
        incumbent: Mutex::new(Incumbent { f: Time::MAX, state: None, log: Vec::new() }),
        best_f: AtomicU64::new(Time::MAX),
        dup,
        open_total: AtomicU64::new(spread.len() as u64),
        abort: AtomicU8::new(RUNNING),
        deadline,
        max_open: cfg.limits.max_open,
        sync_threshold: cfg.sync_threshold,
        flush_on_prune,
    };
    stats.peak_open = stats.peak_open.max(spread.len() as u64);
    for (i, e) in spread.into_iter().enumerate() {
        let w = i % cfg.threads;
        pool.queues[w].lock().unwrap().push_seed(e);
        pool.has_work[w].store(true, Ordering::Relaxed);
    }

    let worker_stats: Vec<SearchStats> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..cfg.threads)
            .map(|id| {
                let pool = &pool;
                scope.spawn(move || pool.worker(id, cfg.steal_seed))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    for ws in &worker_stats {
        merge(&mut stats, ws);
    }
    for q in &pool.queues {
        stats.leftover += q.lock().unwrap().len() as u64;
    }

    let wall_time = start.elapsed();
    match pool.abort.load(Ordering::SeqCst) {
        ABORT_TIMEOUT => return Err(SearchError::TimedOut { stats, wall_time }),
        ABORT_MEMORY => return Err(SearchError::MemoryExceeded { stats, wall_time }),
        _ => {}
    }

    let inc = pool.incumbent.into_inner().unwrap();
    let state = inc.state.expect("pool terminated without any complete state");
    let schedule = space.extract_schedule(&state);
    let makespan = schedule.makespan(space.graph()).expect("complete state");
    debug_assert_eq!(makespan, inc.f);
    Ok((
        SearchResult { schedule, makespan, solver, stats, wall_time },
        inc.log,
    ))
}

/// Parallel best-first search; with `dup_detect`, generated states are
/// checked against a shared set of canonical keys.
pub fn pastar<S: StateSpace>(
    space: &S,
    dup_detect: bool,
    cfg: &ParallelConfig,
) -> Result<SearchResult, SearchError> {
    let solver = if dup_detect { Solver::PastarDd } else { Solver::Pastar };
    run_pool::<S, HeapQueue<S::State>>(space, solver, dup_detect, true, cfg).map(|(r, _)| r)
}

/// Parallel depth-first branch and bound.
pub fn pdfs<S: StateSpace>(space: &S, cfg: &ParallelConfig) -> Result<SearchResult, SearchError> {
    run_pool::<S, DequeQueue<S::State>>(space, Solver::Pdfs, false, false, cfg).map(|(r, _)| r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::BoundContext;
    use crate::els::ElsSpace;
    use crate::graph::{generate, GraphStructure, SystemSpec, TaskGraph};
    use crate::search::{astar, dfbnb};
    use crate::ao::AoSpace;

    fn diamond() -> TaskGraph {
        TaskGraph::new(
            vec![2, 3, 3, 1],
            vec![(0, 1, 1), (0, 2, 1), (1, 3, 2), (2, 3, 2)],
        )
        .unwrap()
    }

    fn desk_cfg(threads: usize) -> ParallelConfig {
        ParallelConfig {
            threads,
            sync_threshold: 100,
            steal_seed: 7,
            limits: SearchLimits::none(),
        }
    }

    #[test]
    fn single_thread_matches_sequential_astar() {
        for (g, procs) in [
            (diamond(), 2),
            (TaskGraph::new(vec![2, 3, 3], vec![(0, 1, 1), (0, 2, 1)]).unwrap(), 2),
            (TaskGraph::new(vec![2, 2, 2], vec![]).unwrap(), 2),
        ] {
            let sys = SystemSpec::new(procs);
            let ctx = BoundContext::compute(&g, &sys);
            let els = ElsSpace::new(&g, &sys, &ctx);
            let seq = astar(&els, true, &SearchLimits::none()).unwrap();
            let par = pastar(&els, true, &desk_cfg(1)).unwrap();
            assert_eq!(par.makespan, seq.makespan);
            assert_eq!(par.solver, Solver::PastarDd);
        }
    }

    #[test]
    fn single_thread_matches_sequential_dfbnb() {
        let g = diamond();
        let sys = SystemSpec::new(2);
        let ctx = BoundContext::compute(&g, &sys);
        let ao = AoSpace::new(&g, &sys, &ctx);
        let seq = dfbnb(&ao, &SearchLimits::none()).unwrap();
        let par = pdfs(&ao, &desk_cfg(1)).unwrap();
        assert_eq!(par.makespan, seq.makespan);
        assert_eq!(par.solver, Solver::Pdfs);
    }

    #[test]
    fn multi_thread_solves_diamond() {
        let g = diamond();
        let sys = SystemSpec::new(2);
        let ctx = BoundContext::compute(&g, &sys);
        let els = ElsSpace::new(&g, &sys, &ctx);
        let ao = AoSpace::new(&g, &sys, &ctx);
        for threads in [2, 4] {
            assert_eq!(pastar(&els, true, &desk_cfg(threads)).unwrap().makespan, 8);
            assert_eq!(pastar(&ao, false, &desk_cfg(threads)).unwrap().makespan, 8);
            assert_eq!(pdfs(&ao, &desk_cfg(threads)).unwrap().makespan, 8);
        }
    }

    #[test]
    fn steal_seeds_do_not_change_makespans() {
        let g = generate(GraphStructure::Random, 7, 1.0, 3).unwrap();
        let sys = SystemSpec::new(2);
        let ctx = BoundContext::compute(&g, &sys);
        let els = ElsSpace::new(&g, &sys, &ctx);
        let expected = astar(&els, true, &SearchLimits::none()).unwrap().makespan;
        for seed in [1, 2, 3, 4, 5] {
            let mut cfg = desk_cfg(4);
            cfg.steal_seed = seed;
            assert_eq!(pdfs(&els, &cfg).unwrap().makespan, expected);
            assert_eq!(pastar(&els, true, &cfg).unwrap().makespan, expected);
        }
    }

    #[test]
    fn heap_steal_takes_the_best_state() {
        let mut q = HeapQueue::default();
        for (f, tag) in [(5, "mid"), (3, "best"), (9, "worst")] {
            q.push_seed(OpenEntry { f, depth: 0, seq: f, state: tag });
        }
        let stolen = q.steal().unwrap();
        assert_eq!((stolen.f, stolen.state), (3, "best"));
    }

    #[test]
    fn deque_steal_takes_the_shallowest_state() {
        let mut q = DequeQueue::default();
        q.push_stolen(OpenEntry { f: 4, depth: 1, seq: 0, state: "shallow" });
        // Deeper work arrives later and sits at the front.
        q.push_children(vec![OpenEntry { f: 5, depth: 3, seq: 1, state: "deep" }]);
        assert_eq!(q.steal().unwrap().state, "shallow");
        assert_eq!(q.pop().unwrap().state, "deep");
    }

    #[test]
    fn deque_owner_pops_lowest_f_child_first() {
        let mut q = DequeQueue::default();
        q.push_children(vec![
            OpenEntry { f: 9, depth: 1, seq: 0, state: 9 },
            OpenEntry { f: 4, depth: 1, seq: 1, state: 4 },
            OpenEntry { f: 6, depth: 1, seq: 2, state: 6 },
        ]);
        assert_eq!(q.pop().unwrap().f, 4);
        assert_eq!(q.pop().unwrap().f, 6);
        assert_eq!(q.pop().unwrap().f, 9);
    }

    #[test]
    fn steal_with_single_worker_finds_no_victim() {
        let g = TaskGraph::new(vec![1], vec![]).unwrap();
        let sys = SystemSpec::new(1);
        let ctx = BoundContext::compute(&g, &sys);
        let els = ElsSpace::new(&g, &sys, &ctx);
        let pool = Pool::<_, HeapQueue<_>> {
            space: &els,
            queues: vec![Mutex::new(HeapQueue::default())],
            has_work: vec![AtomicBool::new(false)],
            idle: AtomicUsize::new(0),
            incumbent: Mutex::new(Incumbent { f: Time::MAX, state: None, log: vec![] }),
            best_f: AtomicU64::new(Time::MAX),
            dup: None,
            open_total: AtomicU64::new(0),
            abort: AtomicU8::new(RUNNING),
            deadline: None,
            max_open: None,
            sync_threshold: 100,
            flush_on_prune: true,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(pool.steal_once(0, &mut rng).is_none());
    }

    #[test]
    fn no_work_is_lost_and_none_is_left_behind() {
        let g = generate(GraphStructure::ForkJoin, 7, 1.0, 11).unwrap();
        let sys = SystemSpec::new(3);
        let ctx = BoundContext::compute(&g, &sys);
        let ao = AoSpace::new(&g, &sys, &ctx);
        let els = ElsSpace::new(&g, &sys, &ctx);
        for threads in [1, 2, 4] {
            for r in [
                pastar(&ao, false, &desk_cfg(threads)).unwrap(),
                pastar(&els, true, &desk_cfg(threads)).unwrap(),
                pdfs(&ao, &desk_cfg(threads)).unwrap(),
            ] {
                assert_eq!(r.stats.generated, r.stats.accounted());
                assert_eq!(r.stats.leftover, 0, "natural termination leaves empty queues");
            }
        }
    }

    #[test]
    fn incumbent_log_is_strictly_decreasing() {
        let g = generate(GraphStructure::Random, 8, 1.0, 5).unwrap();
        let sys = SystemSpec::new(2);
        let ctx = BoundContext::compute(&g, &sys);
        let ao = AoSpace::new(&g, &sys, &ctx);
        let (result, log) =
            run_pool::<_, DequeQueue<_>>(&ao, Solver::Pdfs, false, false, &desk_cfg(4)).unwrap();
        assert!(!log.is_empty());
        assert!(log.windows(2).all(|w| w[1] < w[0]), "log {log:?}");
        assert_eq!(*log.last().unwrap(), result.makespan);
    }

    #[test]
    fn duplicate_detection_stays_silent_on_ao() {
        let g = generate(GraphStructure::OutTree, 6, 1.0, 2).unwrap();
        let sys = SystemSpec::new(2);
        let ctx = BoundContext::compute(&g, &sys);
        let ao = AoSpace::new(&g, &sys, &ctx);
        for threads in [1, 2] {
            let r = pastar(&ao, true, &desk_cfg(threads)).unwrap();
            assert_eq!(r.stats.duplicates, 0);
        }
        // Deterministic single worker: expansion count unaffected.
        let with = pastar(&ao, true, &desk_cfg(1)).unwrap();
        let without = pastar(&ao, false, &desk_cfg(1)).unwrap();
        assert_eq!(with.stats.expanded, without.stats.expanded);
    }

    #[test]
    fn tiny_instances_finish_during_seeding() {
        let g = TaskGraph::new(vec![4], vec![]).unwrap();
        let sys = SystemSpec::new(2);
        let ctx = BoundContext::compute(&g, &sys);
        let els = ElsSpace::new(&g, &sys, &ctx);
        let r = pastar(&els, true, &desk_cfg(4)).unwrap();
        assert_eq!(r.makespan, 4);
    }

    #[test]
    fn zero_timeout_reports_timeout() {
        let g = TaskGraph::new(vec![1; 10], vec![]).unwrap();
        let sys = SystemSpec::new(3);
        let ctx = BoundContext::compute(&g, &sys);
        let els = ElsSpace::new(&g, &sys, &ctx);
        let cfg = ParallelConfig {
            threads: 2,
            sync_threshold: 100,
            steal_seed: 0,
            limits: SearchLimits::with_timeout(std::time::Duration::ZERO),
        };
        match pdfs(&els, &cfg) {
            Err(SearchError::TimedOut { stats, .. }) => {
                assert_eq!(stats.generated, stats.accounted());
            }
            other => panic!("expected timeout, got {other:?}"),
        }
    }

    #[test]
    fn aggregate_open_cap_aborts_the_pool() {
        let g = TaskGraph::new(vec![1; 12], vec![]).unwrap();
        let sys = SystemSpec::new(3);
        let ctx = BoundContext::compute(&g, &sys);
        let els = ElsSpace::new(&g, &sys, &ctx);
        let cfg = ParallelConfig {
            threads: 2,
            sync_threshold: 100,
            steal_seed: 0,
            limits: SearchLimits { timeout: None, max_open: Some(64) },
        };
        match pastar(&els, false, &cfg) {
            Err(SearchError::MemoryExceeded { .. }) => {}
            other => panic!("expected memory abort, got {other:?}"),
        }
    }
}
