//! Task graph model, text format, and random instance generators.
//!
//! A [`TaskGraph`] is a DAG with positive integer task weights and
//! non-negative integer edge (communication) weights. Task ids are dense:
//! a graph with n tasks uses exactly the ids `0..n`.

mod generator;
mod parser;

pub use generator::{generate, GenerateError, GraphStructure};
pub use parser::{parse_tg, ParseError};

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::{TaskId, Time};

/// A directed edge with a communication weight.
///
/// The weight is paid only when `src` and `dst` are scheduled on
/// different processors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub src: TaskId,
    pub dst: TaskId,
    pub comm: Time,
}

/// Errors from constructing or validating a task graph.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("task {task} has a non-positive weight; task weights must be >= 1")]
    NonPositiveWeight { task: TaskId },
    #[error("task id {id} out of range for {num_tasks} tasks")]
    TaskIdOutOfRange { id: TaskId, num_tasks: usize },
    #[error("duplicate task id {id}")]
    DuplicateTask { id: TaskId },
    #[error("task ids are not dense: id {missing} is missing")]
    MissingTask { missing: TaskId },
    #[error("duplicate edge {src} -> {dst}")]
    DuplicateEdge { src: TaskId, dst: TaskId },
    #[error("graph contains a cycle")]
    Cycle,
}

/// An immutable task graph: weighted tasks, weighted precedence edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskGraph {
    weights: Vec<Time>,
    /// All edges, sorted by (src, dst). Construction order does not
    /// survive, which makes graphs comparable regardless of how their
    /// edge lists were assembled.
    edges: Vec<Edge>,
    /// children[t] = (child, comm) pairs, ascending by child id.
    children: Vec<Vec<(TaskId, Time)>>,
    /// parents[t] = (parent, comm) pairs, ascending by parent id.
    parents: Vec<Vec<(TaskId, Time)>>,
    /// The order in which tasks were declared. Fixes the canonical task
    /// order consumed by the allocation phase of the AO state space.
    canonical_order: Vec<TaskId>,
}

impl TaskGraph {
    /// Builds a graph from task weights (task i has weight `weights[i]`)
    /// and edges; the canonical task order is 0, 1, 2, ...
    pub fn new(
        weights: Vec<Time>,
        edges: Vec<(TaskId, TaskId, Time)>,
    ) -> Result<TaskGraph, GraphError> {
        let decls = weights.into_iter().enumerate().collect();
        TaskGraph::from_declarations(decls, edges)
    }

    /// Builds a graph from (id, weight) declarations in an arbitrary
    /// order; the declaration order becomes the canonical task order.
    /// The declared ids must be exactly `0..decls.len()`.
    pub fn from_declarations(
        decls: Vec<(TaskId, Time)>,
        edges: Vec<(TaskId, TaskId, Time)>,
    ) -> Result<TaskGraph, GraphError> {
        let n = decls.len();
        let mut weights: Vec<Option<Time>> = vec![None; n];
        let mut canonical_order = Vec::with_capacity(n);
        for &(id, w) in &decls {
            if id >= n {
                // Some id beyond the count means some id below it is absent.
                let missing = (0..n).find(|&t| decls.iter().all(|&(d, _)| d != t)).unwrap_or(n);
                return Err(GraphError::MissingTask { missing });
            }
            if weights[id].is_some() {
                return Err(GraphError::DuplicateTask { id });
            }
            if w == 0 {
                return Err(GraphError::NonPositiveWeight { task: id });
            }
            weights[id] = Some(w);
            canonical_order.push(id);
        }
        let weights: Vec<Time> = weights.into_iter().map(Option::unwrap).collect();

        let mut sorted: Vec<Edge> = Vec::with_capacity(edges.len());
        for &(src, dst, comm) in &edges {
            if src >= n {
                return Err(GraphError::TaskIdOutOfRange { id: src, num_tasks: n });
            }
            if dst >= n {
                return Err(GraphError::TaskIdOutOfRange { id: dst, num_tasks: n });
            }
            sorted.push(Edge { src, dst, comm });
        }
        sorted.sort_unstable_by_key(|e| (e.src, e.dst));
        for pair in sorted.windows(2) {
            if pair[0].src == pair[1].src && pair[0].dst == pair[1].dst {
                return Err(GraphError::DuplicateEdge { src: pair[0].src, dst: pair[0].dst });
            }
        }

        let mut children = vec![Vec::new(); n];
        let mut parents = vec![Vec::new(); n];
        for e in &sorted {
            children[e.src].push((e.dst, e.comm));
            parents[e.dst].push((e.src, e.comm));
        }
        for p in &mut parents {
            p.sort_unstable_by_key(|&(id, _)| id);
        }

        let graph = TaskGraph { weights, edges: sorted, children, parents, canonical_order };
        graph.topological_order()?; // rejects cycles, including self-loops
        Ok(graph)
    }

    pub fn num_tasks(&self) -> usize {
        self.weights.len()
    }

    pub fn tasks(&self) -> std::ops::Range<TaskId> {
        0..self.num_tasks()
    }

    /// Computation weight of a task.
    pub fn weight(&self, task: TaskId) -> Time {
        self.weights[task]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Outgoing edges of `task` as (child, comm), ascending by child id.
    pub fn children(&self, task: TaskId) -> &[(TaskId, Time)] {
        &self.children[task]
    }

    /// Incoming edges of `task` as (parent, comm), ascending by parent id.
    pub fn parents(&self, task: TaskId) -> &[(TaskId, Time)] {
        &self.parents[task]
    }

    /// Sum of all task weights.
    pub fn total_work(&self) -> Time {
        self.weights.iter().sum()
    }

    /// Sum of all edge weights.
    pub fn total_comm(&self) -> Time {
        self.edges.iter().map(|e| e.comm).sum()
    }

    /// Communication-to-computation ratio: total edge weight over total
    /// task weight. Zero for edgeless graphs.
    pub fn ccr(&self) -> f64 {
        if self.total_work() == 0 {
            return 0.0;
        }
        self.total_comm() as f64 / self.total_work() as f64
    }

    /// The canonical task order: declaration order. The AO allocation
    /// phase consumes tasks in exactly this sequence.
    pub fn canonical_order(&self) -> &[TaskId] {
        &self.canonical_order
    }

    /// A topological order: every edge (u, v) places u before v. Kahn's
    /// algorithm with ties broken by ascending task id, so the result is
    /// deterministic.
    pub fn topological_order(&self) -> Result<Vec<TaskId>, GraphError> {
        let n = self.num_tasks();
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<TaskId>> = BinaryHeap::new();
        for t in 0..n {
            if indegree[t] == 0 {
                ready.push(Reverse(t));
            }
        }
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(t)) = ready.pop() {
            order.push(t);
            for &(c, _) in &self.children[t] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.push(Reverse(c));
                }
            }
        }
        if order.len() != n {
            return Err(GraphError::Cycle);
        }
        Ok(order)
    }

    /// Serializes into the text graph format: a task line per task in
    /// ascending id order, then an edge line per edge in (src, dst)
    /// order.
    pub fn to_tg_string(&self) -> String {
        let mut out = String::new();
        for t in self.tasks() {
            out.push_str(&format!("T {} {}\n", t, self.weights[t]));
        }
        for e in &self.edges {
            out.push_str(&format!("E {} {} {}\n", e.src, e.dst, e.comm));
        }
        out
    }
}

/// ancestors[t] = bitmask of all transitive predecessors of t.
/// Only valid for graphs with at most 64 tasks.
pub(crate) fn ancestor_masks(g: &TaskGraph) -> Vec<u64> {
    debug_assert!(g.num_tasks() <= 64);
    let mut anc = vec![0u64; g.num_tasks()];
    for &t in &g.topological_order().expect("validated graph") {
        for &(parent, _) in g.parents(t) {
            anc[t] |= anc[parent] | (1 << parent);
        }
    }
    anc
}

/// The target machine: a number of identical, fully connected processors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemSpec {
    num_procs: usize,
}

impl SystemSpec {
    /// Panics if `num_procs` is zero.
    pub fn new(num_procs: usize) -> SystemSpec {
        assert!(num_procs >= 1, "a system needs at least one processor");
        SystemSpec { num_procs }
    }

    pub fn num_procs(&self) -> usize {
        self.num_procs
    }
}
