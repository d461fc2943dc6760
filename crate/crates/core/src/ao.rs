//! Allocation-ordering state space.
//!
//! Scheduling splits into two phases. The allocation phase walks the
//! tasks in the graph's canonical order and assigns each to an existing
//! subset or a fresh one (at most one subset per processor); because
//! every partition is built in exactly one way, this phase is free of
//! duplicate states. The ordering phase then fixes the execution
//! sequence of each processor one task at a time, with the target
//! processor forced by a round-robin rule, so sequence prefixes are also
//! built in exactly one way. A complete ordering state determines a full
//! schedule by giving every task its earliest start compatible with the
//! precedence edges and its position in sequence.
//!
//! Cross-processor orderings can contradict precedence (a cycle between
//! chain edges and DAG edges); such children have no completion and are
//! dropped during expansion.

use crate::bounds::{combined_critical_path, f_ao, f_ordering_from_cp, BoundContext};
use crate::graph::{ancestor_masks, SystemSpec, TaskGraph};
use crate::schedule::Schedule;
use crate::search::StateSpace;
use crate::{ProcId, TaskId, Time};

/// Partial partition of the canonical task prefix into subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocationState {
    /// Position in the canonical task order; tasks before it are
    /// partitioned, tasks from it on are not.
    next_task_index: u32,
    /// Subset task masks in creation order. Creation order is the
    /// processor mapping: subset i runs on processor i.
    masks: Vec<u64>,
    /// Total task weight per subset.
    works: Vec<Time>,
}

impl AllocationState {
    pub fn next_task_index(&self) -> usize {
        self.next_task_index as usize
    }

    pub fn num_subsets(&self) -> usize {
        self.masks.len()
    }

    pub fn subset_mask(&self, i: usize) -> u64 {
        self.masks[i]
    }

    pub(crate) fn subset_works(&self) -> &[Time] {
        &self.works
    }

    /// Subset index of an allocated task, None if not yet allocated.
    pub fn subset_of(&self, task: TaskId) -> Option<usize> {
        self.masks.iter().position(|m| m & (1 << task) != 0)
    }
}

/// A completed allocation plus per-processor sequence prefixes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingState {
    /// proc_of[t] = processor of task t (its subset's creation index).
    proc_of: Vec<ProcId>,
    /// Task mask per processor (empty procs beyond the subset count are
    /// not represented).
    proc_masks: Vec<u64>,
    works: Vec<Time>,
    /// Fixed sequence prefix per processor.
    sequences: Vec<Vec<TaskId>>,
    /// Bitmask of ordered tasks.
    ordered: u64,
    ordering_depth: u32,
}

impl OrderingState {
    pub fn ordering_depth(&self) -> usize {
        self.ordering_depth as usize
    }

    pub fn sequences(&self) -> &[Vec<TaskId>] {
        &self.sequences
    }

    pub fn proc_of(&self) -> &[ProcId] {
        &self.proc_of
    }

    pub fn is_ordered(&self, task: TaskId) -> bool {
        self.ordered & (1 << task) != 0
    }

    pub(crate) fn subset_works(&self) -> &[Time] {
        &self.works
    }
}

/// A state in either phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AoState {
    Allocation(AllocationState),
    Ordering(OrderingState),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AoError {
    #[error("combined ordering constraints are cyclic; no schedule exists")]
    CyclicConstraints,
}

/// The AO space for one (graph, system) instance.
pub struct AoSpace<'a> {
    g: &'a TaskGraph,
    sys: SystemSpec,
    ctx: &'a BoundContext,
    /// ancestors[t] = bitmask of transitive predecessors.
    ancestors: Vec<u64>,
}

impl<'a> AoSpace<'a> {
    pub fn new(g: &'a TaskGraph, sys: &SystemSpec, ctx: &'a BoundContext) -> AoSpace<'a> {
        assert!(g.num_tasks() <= 64, "allocation states track tasks in a 64-bit mask");
        AoSpace { g, sys: *sys, ctx, ancestors: ancestor_masks(g) }
    }

    /// Builds an allocation-phase state (or the ordering root, when the
    /// partition is complete) from explicit subsets. The subsets must
    /// partition a prefix of the canonical task order. Intended for
    /// tests and diagnostics; search reaches states through expansion.
    pub fn allocation_state(&self, subsets: &[Vec<TaskId>]) -> AoState {
        let mut masks = Vec::with_capacity(subsets.len());
        let mut works = Vec::with_capacity(subsets.len());
        let mut all = 0u64;
        let mut count = 0;
        for s in subsets {
            let mut mask = 0u64;
            let mut work = 0;
            for &t in s {
                mask |= 1 << t;
                work += self.g.weight(t);
            }
            all |= mask;
            count += s.len();
            masks.push(mask);
            works.push(work);
        }
        let expect: u64 =
            self.g.canonical_order()[..count].iter().map(|&t| 1u64 << t).sum();
        assert_eq!(all, expect, "subsets must partition a canonical-order prefix");
        assert!(masks.len() <= self.sys.num_procs());

        let alloc = AllocationState { next_task_index: count as u32, masks, works };
        if count == self.g.num_tasks() {
            AoState::Ordering(self.ordering_root(&alloc))
        } else {
            AoState::Allocation(alloc)
        }
    }

    /// Builds an ordering-phase state from explicit subsets and
    /// sequence prefixes. Intended for tests and diagnostics.
    pub fn ordering_state(&self, subsets: &[Vec<TaskId>], sequences: &[Vec<TaskId>]) -> AoState {
        let AoState::Ordering(mut o) = self.allocation_state(subsets) else {
            panic!("subsets must cover all tasks before ordering starts");
        };
        assert_eq!(sequences.len(), subsets.len());
        for (p, seq) in sequences.iter().enumerate() {
            for &t in seq {
                assert!(o.proc_masks[p] & (1 << t) != 0, "task {t} not allocated to proc {p}");
                assert!(o.ordered & (1 << t) == 0, "task {t} ordered twice");
                o.ordered |= 1 << t;
                o.ordering_depth += 1;
            }
            o.sequences[p] = seq.clone();
        }
        AoState::Ordering(o)
    }

    fn ordering_root(&self, alloc: &AllocationState) -> OrderingState {
        let k = alloc.masks.len();
        let mut proc_of = vec![0; self.g.num_tasks()];
        for (i, &mask) in alloc.masks.iter().enumerate() {
            let mut m = mask;
            while m != 0 {
                let t = m.trailing_zeros() as TaskId;
                proc_of[t] = i;
                m &= m - 1;
            }
        }
        OrderingState {
            proc_of,
            proc_masks: alloc.masks.clone(),
            works: alloc.works.clone(),
            sequences: vec![Vec::new(); k],
            ordered: 0,
            ordering_depth: 0,
        }
    }

    fn expand_allocation(&self, state: &AllocationState) -> Vec<(AoState, Time)> {
        let task = self.g.canonical_order()[state.next_task_index as usize];
        let bit = 1u64 << task;
        let w = self.g.weight(task);

        let mut children = Vec::with_capacity(state.masks.len() + 1);
        let mut emit = |child: AllocationState| {
            let ao = if child.next_task_index as usize == self.g.num_tasks() {
                AoState::Ordering(self.ordering_root(&child))
            } else {
                AoState::Allocation(child)
            };
            let f = f_ao(&ao, self.g, self.ctx);
            children.push((ao, f));
        };

        for i in 0..state.masks.len() {
            let mut child = state.clone();
            child.next_task_index += 1;
            child.masks[i] |= bit;
            child.works[i] += w;
            emit(child);
        }
        if state.masks.len() < self.sys.num_procs() {
            let mut child = state.clone();
            child.next_task_index += 1;
            child.masks.push(bit);
            child.works.push(w);
            emit(child);
        }
        children
    }

    /// The processor whose sequence grows next: cycle ascending from
    /// (ordering_depth mod num_procs), skipping processors whose
    /// allocation is fully ordered. Purely a function of the subset
    /// sizes and the depth, so every state at one depth agrees.
    pub fn next_processor(&self, state: &OrderingState) -> ProcId {
        let num_procs = self.sys.num_procs();
        let first = state.ordering_depth as usize % num_procs;
        for k in 0..num_procs {
            let p = (first + k) % num_procs;
            if p >= state.proc_masks.len() {
                continue; // no subset was created for this processor
            }
            if (state.sequences[p].len() as u32) < state.proc_masks[p].count_ones() {
                return p;
            }
        }
        panic!("next_processor called on a complete ordering state");
    }

    /// Allocated-but-unordered tasks on `proc` whose same-processor
    /// ancestors are all already in the sequence, ascending by id.
    pub fn ordering_free_tasks(&self, state: &OrderingState, proc: ProcId) -> Vec<TaskId> {
        let mut free = Vec::new();
        let mut m = state.proc_masks[proc] & !state.ordered;
        while m != 0 {
            let t = m.trailing_zeros() as TaskId;
            m &= m - 1;
            if self.ancestors[t] & state.proc_masks[proc] & !state.ordered == 0 {
                free.push(t);
            }
        }
        free
    }

    fn expand_ordering(&self, state: &OrderingState) -> Vec<(AoState, Time)> {
        let proc = self.next_processor(state);
        let free = self.ordering_free_tasks(state, proc);
        let mut children = Vec::with_capacity(free.len());
        for t in free {
            let mut child = state.clone();
            child.sequences[proc].push(t);
            child.ordered |= 1 << t;
            child.ordering_depth += 1;
            // The new chain edge can close a cycle through precedence
            // edges on other processors; such a child has no completion.
            let Some(cp) = combined_critical_path(self.g, &child.proc_of, &child.sequences)
            else {
                continue;
            };
            let f = f_ordering_from_cp(&child, self.ctx, cp);
            children.push((AoState::Ordering(child), f));
        }
        children
    }

    /// Schedule of a complete ordering state: walk the combined
    /// constraint graph topologically, giving each task its earliest
    /// start on its processor. The defensive error fires only if called
    /// on constraints that expansion would have filtered.
    pub fn derive_schedule(&self, state: &OrderingState) -> Result<Schedule, AoError> {
        let n = self.g.num_tasks();
        let mut chain_next: Vec<Option<TaskId>> = vec![None; n];
        let mut chain_indeg = vec![0usize; n];
        for seq in &state.sequences {
            for pair in seq.windows(2) {
                chain_next[pair[0]] = Some(pair[1]);
                chain_indeg[pair[1]] += 1;
            }
        }
        let mut indegree: Vec<usize> =
            (0..n).map(|t| self.g.parents(t).len() + chain_indeg[t]).collect();
        let mut ready: Vec<TaskId> = (0..n).filter(|&t| indegree[t] == 0).collect();

        let mut schedule = Schedule::empty(n);
        let mut done = 0;
        while let Some(t) = ready.pop() {
            let proc = state.proc_of[t];
            let start = schedule.earliest_start(self.g, t, proc).expect("parents scheduled");
            schedule.assign(t, proc, start);
            done += 1;
            for &(c, _) in self.g.children(t) {
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
        if done < n {
            return Err(AoError::CyclicConstraints);
        }
        Ok(schedule)
    }
}

impl StateSpace for AoSpace<'_> {
    type State = AoState;

    fn graph(&self) -> &TaskGraph {
        self.g
    }

    fn initial(&self) -> (AoState, Time) {
        let state = if self.g.num_tasks() == 0 {
            // Nothing to allocate: the empty ordering is complete.
            AoState::Ordering(OrderingState {
                proc_of: vec![],
                proc_masks: vec![],
                works: vec![],
                sequences: vec![],
                ordered: 0,
                ordering_depth: 0,
            })
        } else {
            AoState::Allocation(AllocationState {
                next_task_index: 0,
                masks: vec![],
                works: vec![],
            })
        };
        let f = f_ao(&state, self.g, self.ctx);
        (state, f)
    }

    fn is_complete(&self, state: &AoState) -> bool {
        match state {
            AoState::Allocation(_) => false,
            AoState::Ordering(o) => o.ordering_depth as usize == self.g.num_tasks(),
        }
    }

    fn expand(&self, state: &AoState) -> Vec<(AoState, Time)> {
        match state {
            AoState::Allocation(a) => self.expand_allocation(a),
            AoState::Ordering(o) => self.expand_ordering(o),
        }
    }

    /// Total decisions made: allocation steps, then ordering steps.
    fn depth(&self, state: &AoState) -> usize {
        match state {
            AoState::Allocation(a) => a.next_task_index as usize,
            AoState::Ordering(o) => self.g.num_tasks() + o.ordering_depth as usize,
        }
    }

    /// Full state content. The space is duplicate-free, so equal keys
    /// can only come from the same state; duplicate detection over
    /// these keys must be a no-op.
    fn dup_key(&self, state: &AoState) -> Vec<u8> {
        let mut key = Vec::new();
        match state {
            AoState::Allocation(a) => {
                key.push(0);
                key.extend_from_slice(&a.next_task_index.to_le_bytes());
                for &m in &a.masks {
                    key.extend_from_slice(&m.to_le_bytes());
                }
            }
            AoState::Ordering(o) => {
                key.push(1);
                for (p, seq) in o.sequences.iter().enumerate() {
                    key.extend_from_slice(&o.proc_masks[p].to_le_bytes());
                    key.extend_from_slice(&(seq.len() as u32).to_le_bytes());
                    for &t in seq {
                        key.extend_from_slice(&(t as u32).to_le_bytes());
                    }
                }
            }
        }
        key
    }

    fn extract_schedule(&self, state: &AoState) -> Schedule {
        let AoState::Ordering(o) = state else {
            panic!("only complete ordering states carry a schedule");
        };
        debug_assert!(self.is_complete(state));
        self.derive_schedule(o).expect("expansion filtered cyclic orderings")
    }
}
