//! Schedules: task → (processor, start time) assignments.
//!
//! A schedule may be partial while a search is in flight; validity and
//! makespan are defined for complete schedules. Time is integral
//! throughout, so all comparisons are exact.

use crate::graph::{SystemSpec, TaskGraph};
use crate::{ProcId, TaskId, Time};

/// Where and when one task runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Placement {
    pub proc: ProcId,
    pub start: Time,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScheduleError {
    #[error("schedule is incomplete: task {missing} is unassigned")]
    Incomplete { missing: TaskId },
    #[error("task {task} depends on unassigned parent {parent}")]
    UnassignedParent { task: TaskId, parent: TaskId },
}

/// A (possibly partial) mapping from tasks to placements.
///
/// Processors are append-only queues: a task placed on a processor runs
/// after everything placed there earlier, so start times on one
/// processor never interleave.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    slots: Vec<Option<Placement>>,
    assigned: usize,
}

impl Schedule {
    pub fn empty(num_tasks: usize) -> Schedule {
        Schedule { slots: vec![None; num_tasks], assigned: 0 }
    }

    pub fn num_tasks(&self) -> usize {
        self.slots.len()
    }

    pub fn assigned_count(&self) -> usize {
        self.assigned
    }

    pub fn is_complete(&self) -> bool {
        self.assigned == self.slots.len()
    }

    pub fn get(&self, task: TaskId) -> Option<Placement> {
        self.slots[task]
    }

    /// Places a task. The slot must be empty.
    pub fn assign(&mut self, task: TaskId, proc: ProcId, start: Time) {
        debug_assert!(self.slots[task].is_none(), "task {task} assigned twice");
        self.slots[task] = Some(Placement { proc, start });
        self.assigned += 1;
    }

    /// Tasks with a placement, ascending by id.
    pub fn assigned_tasks(&self) -> impl Iterator<Item = (TaskId, Placement)> + '_ {
        self.slots.iter().enumerate().filter_map(|(t, p)| p.map(|p| (t, p)))
    }

    fn first_missing(&self) -> Option<TaskId> {
        self.slots.iter().position(Option::is_none)
    }

    /// Completion time of the schedule: max over tasks of start + weight.
    /// Errors if any task is unassigned.
    pub fn makespan(&self, g: &TaskGraph) -> Result<Time, ScheduleError> {
        if let Some(missing) = self.first_missing() {
            return Err(ScheduleError::Incomplete { missing });
        }
        Ok(self.partial_makespan(g))
    }

    /// Max finish time over the tasks assigned so far (0 when empty).
    pub fn partial_makespan(&self, g: &TaskGraph) -> Time {
        self.assigned_tasks().map(|(t, p)| p.start + g.weight(t)).max().unwrap_or(0)
    }

    /// Checks a complete schedule against both scheduling constraints:
    /// tasks sharing a processor must not overlap, and every task must
    /// start only after each parent's data has arrived (parent finish
    /// time, plus the edge weight if the parent ran on another
    /// processor). Also rejects processor indexes outside the system.
    pub fn is_valid(&self, g: &TaskGraph, sys: &SystemSpec) -> Result<bool, ScheduleError> {
        if let Some(missing) = self.first_missing() {
            return Err(ScheduleError::Incomplete { missing });
        }

        let mut by_proc: Vec<Vec<(Time, Time)>> = vec![Vec::new(); sys.num_procs()];
        for (t, p) in self.assigned_tasks() {
            if p.proc >= sys.num_procs() {
                return Ok(false);
            }
            by_proc[p.proc].push((p.start, p.start + g.weight(t)));
        }
        for intervals in &mut by_proc {
            intervals.sort_unstable();
            for pair in intervals.windows(2) {
                if pair[1].0 < pair[0].1 {
                    return Ok(false);
                }
            }
        }

        for e in g.edges() {
            let u = self.slots[e.src].unwrap();
            let v = self.slots[e.dst].unwrap();
            let arrival = u.start
                + g.weight(e.src)
                + if u.proc == v.proc { 0 } else { e.comm };
            if v.start < arrival {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Earliest time `task` may start on `proc` given the tasks already
    /// placed: after the processor's last finish, and after every
    /// parent's data has arrived. Errors if a parent is unassigned.
    pub fn earliest_start(
        &self,
        g: &TaskGraph,
        task: TaskId,
        proc: ProcId,
    ) -> Result<Time, ScheduleError> {
        let proc_free = self
            .assigned_tasks()
            .filter(|(_, p)| p.proc == proc)
            .map(|(t, p)| p.start + g.weight(t))
            .max()
            .unwrap_or(0);
        Ok(proc_free.max(self.data_ready_time(g, task, proc)?))
    }

    /// Earliest time every parent's data can be at `proc`: max over
    /// parents of finish + (0 if same processor else edge weight).
    /// Zero for tasks without parents.
    pub fn data_ready_time(
        &self,
        g: &TaskGraph,
        task: TaskId,
        proc: ProcId,
    ) -> Result<Time, ScheduleError> {
        let mut ready = 0;
        for &(parent, comm) in g.parents(task) {
            let p = self.slots[parent]
                .ok_or(ScheduleError::UnassignedParent { task, parent })?;
            let arrival = p.start + g.weight(parent) + if p.proc == proc { 0 } else { comm };
            ready = ready.max(arrival);
        }
        Ok(ready)
    }

    /// Serializes as `S <task> <proc> <start>` lines in ascending task
    /// order plus a trailing `M <makespan>` line.
    pub fn to_text(&self, g: &TaskGraph) -> Result<String, ScheduleError> {
        let makespan = self.makespan(g)?;
        let mut out = String::new();
        for (t, p) in self.assigned_tasks() {
            out.push_str(&format!("S {} {} {}\n", t, p.proc, p.start));
        }
        out.push_str(&format!("M {makespan}\n"));
        Ok(out)
    }
}
