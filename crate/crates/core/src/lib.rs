//! Optimal scheduling of task graphs with communication delays.
//!
//! The problem: a program is modelled as a directed acyclic graph whose
//! nodes are tasks with integer computation weights and whose edges carry
//! integer communication weights. The target machine has a fixed number of
//! identical processors, fully connected; communication between tasks on
//! the same processor is free, across processors it costs the edge weight.
//! A schedule assigns every task a processor and a start time so that a
//! processor runs one task at a time and every task starts only after each
//! of its parents has finished (plus the communication delay if the parent
//! ran elsewhere). The objective is minimal makespan, and the solvers here
//! are exact: the returned schedule is provably optimal, not heuristic.
//!
//! Two state spaces over partial solutions are provided. Exhaustive list
//! scheduling ([`els`]) grows a schedule one placed task at a time and
//! relies on duplicate detection to stay tractable. Allocation-ordering
//! ([`ao`]) first partitions tasks into processor groups, then orders each
//! group; its two phases avoid the permutation duplicates that plague the
//! list-scheduling space.
//!
//! Search is A* or depth-first branch-and-bound over either space
//! ([`search`]), both guided by the admissible lower bounds in [`bounds`],
//! plus multi-threaded variants with work stealing in [`parallel`]. The
//! [`exhaustive`] module holds an independent brute-force solver used to
//! validate everything else on small instances.

pub mod ao;
pub mod bounds;
pub mod els;
pub mod exhaustive;
pub mod graph;
pub mod parallel;
pub mod schedule;
pub mod search;

/// Task identifier: index into the graph's task list.
pub type TaskId = usize;

/// Processor identifier: index in `0..num_procs`.
pub type ProcId = usize;

/// Discrete time. All weights are integers, so every start and finish
/// time in an earliest-start schedule is an integer too; using u64
/// keeps makespan arithmetic exact.
pub type Time = u64;
