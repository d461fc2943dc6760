//! Exhaustive list scheduling state space.
//!
//! A state is a partial schedule. Expansion takes every free task (all
//! parents placed) and places it at its earliest start on every
//! meaningfully distinct processor: all non-empty ones plus at most one
//! empty representative, since empty processors are interchangeable
//! (processor normalization). Even so, the same partial schedule is
//! reachable through different placement orders of independent tasks,
//! so the space contains duplicates; [`ElsSpace::dup_key`] gives the
//! canonical identity that search-side duplicate detection needs.

use crate::bounds::{f_els, BoundContext};
use crate::graph::{SystemSpec, TaskGraph};
use crate::schedule::Schedule;
use crate::search::StateSpace;
use crate::{ProcId, TaskId, Time};

/// A partial schedule plus the bookkeeping expansion needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElsState {
    partial: Schedule,
    /// Bitmask of scheduled tasks.
    scheduled: u64,
    /// proc_finish[p] = finish time of the last task on p, 0 if empty.
    proc_finish: Vec<Time>,
    depth: u32,
    /// Total idle gap committed so far across processors. Appends only
    /// happen at or after a processor's finish time, so gaps never
    /// close; the load bound charges them against remaining capacity.
    idle_time: Time,
    /// Max over placed tasks of start + bottom level.
    cp_bound: Time,
}

impl ElsState {
    pub fn schedule(&self) -> &Schedule {
        &self.partial
    }

    pub fn depth(&self) -> usize {
        self.depth as usize
    }

    pub fn proc_finish(&self) -> &[Time] {
        &self.proc_finish
    }

    pub fn is_scheduled(&self, task: TaskId) -> bool {
        self.scheduled & (1 << task) != 0
    }

    pub(crate) fn scheduled_mask(&self) -> u64 {
        self.scheduled
    }

    pub(crate) fn idle_time(&self) -> Time {
        self.idle_time
    }

    pub(crate) fn scheduled_cp_bound(&self) -> Time {
        self.cp_bound
    }

    pub(crate) fn partial_makespan(&self) -> Time {
        self.proc_finish.iter().copied().max().unwrap_or(0)
    }
}

/// The ELS space for one (graph, system) instance.
pub struct ElsSpace<'a> {
    g: &'a TaskGraph,
    sys: SystemSpec,
    ctx: &'a BoundContext,
    /// parent_masks[t] = bitmask of direct parents of t.
    parent_masks: Vec<u64>,
}

impl<'a> ElsSpace<'a> {
    pub fn new(g: &'a TaskGraph, sys: &SystemSpec, ctx: &'a BoundContext) -> ElsSpace<'a> {
        assert!(g.num_tasks() <= 64, "list-scheduling states track tasks in a 64-bit mask");
        let parent_masks = g
            .tasks()
            .map(|t| g.parents(t).iter().map(|&(p, _)| 1u64 << p).sum())
            .collect();
        ElsSpace { g, sys: *sys, ctx, parent_masks }
    }

    /// Unscheduled tasks whose parents are all scheduled, ascending.
    pub fn free_tasks(&self, state: &ElsState) -> Vec<TaskId> {
        self.g
            .tasks()
            .filter(|&t| {
                state.scheduled & (1 << t) == 0
                    && self.parent_masks[t] & !state.scheduled == 0
            })
            .collect()
    }

    /// Child state: `task` placed on `proc` at its earliest start.
    fn place(&self, state: &ElsState, task: TaskId, proc: ProcId) -> (ElsState, Time) {
        let data_ready = state
            .partial
            .data_ready_time(self.g, task, proc)
            .expect("free task has all parents placed");
        let start = data_ready.max(state.proc_finish[proc]);

        let mut child = state.clone();
        child.partial.assign(task, proc, start);
        child.scheduled |= 1 << task;
        child.depth += 1;
        child.idle_time += start - state.proc_finish[proc];
        child.proc_finish[proc] = start + self.g.weight(task);
        child.cp_bound = child.cp_bound.max(start + self.ctx.bottom_level(task));
        let f = f_els(&child, self.ctx);
        (child, f)
    }

    /// Target processors for expansion: every non-empty processor plus
    /// at most one empty representative (the lowest-indexed empty one).
    fn distinct_procs(&self, state: &ElsState) -> Vec<ProcId> {
        let mut procs = Vec::with_capacity(self.sys.num_procs());
        let mut empty_seen = false;
        for p in 0..self.sys.num_procs() {
            if state.proc_finish[p] > 0 {
                procs.push(p);
            } else if !empty_seen {
                procs.push(p);
                empty_seen = true;
            }
        }
        procs
    }

    /// All children without processor normalization: every free task on
    /// every processor, empty or not. Exists to demonstrate what
    /// normalization removes; the search solvers never call it.
    pub fn expand_unnormalized(&self, state: &ElsState) -> Vec<(ElsState, Time)> {
        let mut children = Vec::new();
        for task in self.free_tasks(state) {
            for proc in 0..self.sys.num_procs() {
                children.push(self.place(state, task, proc));
            }
        }
        children
    }

    /// Canonical identity of a state's partial schedule up to processor
    /// relabeling: the per-processor (task, start) sequences, sorted
    /// lexicographically across processors and serialized.
    pub fn state_key(&self, state: &ElsState) -> Vec<u8> {
        let mut seqs: Vec<Vec<(TaskId, Time)>> = vec![Vec::new(); self.sys.num_procs()];
        for (t, p) in state.partial.assigned_tasks() {
            seqs[p.proc].push((t, p.start));
        }
        for s in &mut seqs {
            s.sort_unstable_by_key(|&(_, start)| start);
        }
        seqs.retain(|s| !s.is_empty());
        seqs.sort_unstable();

        let mut key = Vec::with_capacity(seqs.iter().map(|s| 4 + 12 * s.len()).sum());
        for s in &seqs {
            key.extend_from_slice(&(s.len() as u32).to_le_bytes());
            for &(t, start) in s {
                key.extend_from_slice(&(t as u32).to_le_bytes());
                key.extend_from_slice(&start.to_le_bytes());
            }
        }
        key
    }
}

impl StateSpace for ElsSpace<'_> {
    type State = ElsState;

    fn graph(&self) -> &TaskGraph {
        self.g
    }

    fn initial(&self) -> (ElsState, Time) {
        let state = ElsState {
            partial: Schedule::empty(self.g.num_tasks()),
            scheduled: 0,
            proc_finish: vec![0; self.sys.num_procs()],
            depth: 0,
            idle_time: 0,
            cp_bound: 0,
        };
        let f = f_els(&state, self.ctx);
        (state, f)
    }

    fn is_complete(&self, state: &ElsState) -> bool {
        state.depth as usize == self.g.num_tasks()
    }

    /// Children in deterministic order: free tasks ascending, target
    /// processors ascending.
    fn expand(&self, state: &ElsState) -> Vec<(ElsState, Time)> {
        let procs = self.distinct_procs(state);
        let free = self.free_tasks(state);
        let mut children = Vec::with_capacity(free.len() * procs.len());
        for task in free {
            for &proc in &procs {
                children.push(self.place(state, task, proc));
            }
        }
        children
    }

    fn depth(&self, state: &ElsState) -> usize {
        state.depth as usize
    }

    fn dup_key(&self, state: &ElsState) -> Vec<u8> {
        self.state_key(state)
    }

    fn extract_schedule(&self, state: &ElsState) -> Schedule {
        state.partial.clone()
    }
}
