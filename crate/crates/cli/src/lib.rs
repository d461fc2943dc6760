//! Benchmarking front end for the scheduling solvers: run records,
//! corpus generation, batch execution, and derived metrics.

pub mod corpus;
pub mod profile;
pub mod records;
pub mod runner;
