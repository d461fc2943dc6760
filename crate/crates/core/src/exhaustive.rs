//! Brute-force reference solver and unpruned state-space walkers.
//!
//! [`enumerate`] finds the optimal makespan by trying every processor
//! assignment and every per-processor execution order directly, sharing
//! no code with the search-based solvers; it exists so their answers can
//! be checked against an independent implementation on small instances.
//! Cost grows factorially, so keep it to roughly n ≤ 9.
//!
//! The walkers at the bottom expand a state space exhaustively (no
//! pruning, no duplicate detection), which the test suites use to check
//! duplicate-freeness claims and bound admissibility state by state.

use crate::graph::{ancestor_masks, SystemSpec, TaskGraph};
use crate::search::StateSpace;
use crate::{ProcId, TaskId, Time};

/// Outcome of full enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExhaustiveResult {
    /// Minimum makespan over every feasible complete schedule.
    pub optimal_makespan: Time,
    /// Number of distinct feasible schedules, counting processor
    /// assignments up to relabeling and per-processor orders exactly;
    /// every schedule uses packed (earliest) start times.
    pub schedule_count: u64,
}

/// Enumerates every complete schedule: processor assignments are walked
/// in restricted-growth form (so relabeled assignments are visited
/// once), per-processor orders as linear extensions of the same-
/// processor precedence relation, and each combination is evaluated at
/// packed earliest starts. Combinations whose cross-processor order
/// contradicts precedence are infeasible and skipped.
pub fn enumerate(g: &TaskGraph, sys: &SystemSpec) -> ExhaustiveResult {
    assert!(g.num_tasks() <= 60, "exhaustive enumeration is for small instances");
    let mut e = Enumerator {
        g,
        num_procs: sys.num_procs(),
        ancestors: ancestor_masks(g),
        assignment: vec![0; g.num_tasks()],
        sequences: Vec::new(),
        best: None,
        count: 0,
    };
    e.assign_from(0, 0);
    ExhaustiveResult {
        // At minimum the all-on-one-processor serial schedule is
        // feasible, and with zero tasks the empty schedule counts.
        optimal_makespan: e.best.expect("serial schedule is always feasible"),
        schedule_count: e.count,
    }
}

/// Minimum makespan over every complete schedule.
pub fn optimal_makespan(g: &TaskGraph, sys: &SystemSpec) -> Time {
    enumerate(g, sys).optimal_makespan
}

struct Enumerator<'a> {
    g: &'a TaskGraph,
    num_procs: usize,
    ancestors: Vec<u64>,
    assignment: Vec<ProcId>,
    sequences: Vec<Vec<TaskId>>,
    best: Option<Time>,
    count: u64,
}

impl Enumerator<'_> {
    /// Assigns processors to tasks t.. ; `used` processors appear among
    /// tasks 0..t. Restricted growth: a task may reuse any seen
    /// processor or open the next fresh one, never skip ahead.
    fn assign_from(&mut self, t: TaskId, used: usize) {
        if t == self.g.num_tasks() {
            self.sequences = vec![Vec::new(); used];
            self.order_proc(0);
            return;
        }
        let limit = (used + 1).min(self.num_procs);
        for p in 0..limit {
            self.assignment[t] = p;
            self.assign_from(t + 1, used.max(p + 1));
        }
    }

    /// Fixes the execution order of processor p, then recurses to p+1.
    fn order_proc(&mut self, p: usize) {
        if p == self.sequences.len() {
            self.evaluate();
            return;
        }
        let members: Vec<TaskId> =
            self.g.tasks().filter(|&t| self.assignment[t] == p).collect();
        let full: u64 = members.iter().map(|&t| 1 << t).sum();
        self.extend_sequence(p, &members, full, 0);
    }

    /// Appends one more task to sequence p; only tasks whose same-
    /// processor ancestors are all placed may come next, which restricts
    /// the walk to linear extensions.
    fn extend_sequence(&mut self, p: usize, members: &[TaskId], full: u64, placed: u64) {
        if placed == full {
            self.order_proc(p + 1);
            return;
        }
        for &t in members {
            let bit = 1u64 << t;
            if placed & bit != 0 {
                continue;
            }
            if self.ancestors[t] & full & !placed != 0 {
                continue;
            }
            self.sequences[p].push(t);
            self.extend_sequence(p, members, full, placed | bit);
            self.sequences[p].pop();
        }
    }

    /// Computes packed earliest starts for the fixed assignment and
    /// sequences by relaxing over the combined constraint graph
    /// (precedence edges plus each processor's chain). A cycle between
    /// the two constraint sets means the combination is infeasible.
    fn evaluate(&mut self) {
        let n = self.g.num_tasks();
        let mut queue_pred: Vec<Option<TaskId>> = vec![None; n];
        for seq in &self.sequences {
            for pair in seq.windows(2) {
                queue_pred[pair[1]] = Some(pair[0]);
            }
        }
        let mut indegree: Vec<usize> = self
            .g
            .tasks()
            .map(|t| self.g.parents(t).len() + usize::from(queue_pred[t].is_some()))
            .collect();
        let mut ready: Vec<TaskId> = self.g.tasks().filter(|&t| indegree[t] == 0).collect();
        let mut queue_next: Vec<Option<TaskId>> = vec![None; n];
        for seq in &self.sequences {
            for pair in seq.windows(2) {
                queue_next[pair[0]] = Some(pair[1]);
            }
        }

        let mut start = vec![0 as Time; n];
        let mut makespan: Time = 0;
        let mut done = 0;
        while let Some(t) = ready.pop() {
            let mut s: Time = 0;
            for &(parent, comm) in self.g.parents(t) {
                let delay =
                    if self.assignment[parent] == self.assignment[t] { 0 } else { comm };
                s = s.max(start[parent] + self.g.weight(parent) + delay);
            }
            if let Some(prev) = queue_pred[t] {
                s = s.max(start[prev] + self.g.weight(prev));
            }
            start[t] = s;
            makespan = makespan.max(s + self.g.weight(t));
            done += 1;

            for &(child, _) in self.g.children(t) {
                indegree[child] -= 1;
                if indegree[child] == 0 {
                    ready.push(child);
                }
            }
            if let Some(next) = queue_next[t] {
                indegree[next] -= 1;
                if indegree[next] == 0 {
                    ready.push(next);
                }
            }
        }
        if done < n {
            return; // cyclic combination
        }
        self.count += 1;
        self.best = Some(self.best.map_or(makespan, |b| b.min(makespan)));
    }
}

/// Walks the full expansion tree of a state space with no pruning and
/// no duplicate detection, invoking `visit(state, f)` on every state
/// including the root. Exponential; test use only.
pub fn walk_tree<S: StateSpace>(space: &S, mut visit: impl FnMut(&S::State, Time)) {
    fn rec<S: StateSpace>(space: &S, state: &S::State, f: Time, visit: &mut impl FnMut(&S::State, Time)) {
        visit(state, f);
        if space.is_complete(state) {
            return;
        }
        for (child, cf) in space.expand(state) {
            rec(space, &child, cf, visit);
        }
    }
    let (root, f) = space.initial();
    rec(space, &root, f, &mut visit);
}

/// Minimum makespan over all complete states in `state`'s subtree,
/// by unpruned expansion; None if no completion exists. Makespans come
/// from the extracted schedules, not from f, so the result is a valid
/// reference point for admissibility checks.
pub fn min_completion<S: StateSpace>(space: &S, state: &S::State) -> Option<Time> {
    if space.is_complete(state) {
        let schedule = space.extract_schedule(state);
        return Some(schedule.makespan(space.graph()).expect("complete state"));
    }
    space
        .expand(state)
        .iter()
        .filter_map(|(child, _)| min_completion(space, child))
        .min()
}

/// First admissibility violation found in an exhaustive walk: a state
/// whose f exceeded the best makespan reachable below it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundViolation {
    pub f: Time,
    pub best_completion: Time,
}

/// Checks f(state) ≤ best reachable completion for every state in one
/// unpruned sweep, computing best completions bottom-up. Returns the
/// number of states visited. Dead states (no completion below them)
/// vacuously pass.
pub fn verify_lower_bounds<S: StateSpace>(space: &S) -> Result<u64, BoundViolation> {
    fn rec<S: StateSpace>(
        space: &S,
        state: &S::State,
        f: Time,
        visited: &mut u64,
    ) -> Result<Option<Time>, BoundViolation> {
        *visited += 1;
        let best = if space.is_complete(state) {
            let schedule = space.extract_schedule(state);
            Some(schedule.makespan(space.graph()).expect("complete state"))
        } else {
            let mut best = None;
            for (child, cf) in space.expand(state) {
                if let Some(b) = rec(space, &child, cf, visited)? {
                    best = Some(best.map_or(b, |x: Time| x.min(b)));
                }
            }
            best
        };
        match best {
            Some(b) if f > b => Err(BoundViolation { f, best_completion: b }),
            other => Ok(other),
        }
    }
    let (root, f) = space.initial();
    let mut visited = 0;
    rec(space, &root, f, &mut visited)?;
    Ok(visited)
}
