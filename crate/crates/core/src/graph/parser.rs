//! Parser for the `.tg` task graph text format.
//!
//! One record per line. `#` starts a comment line, `T <id> <weight>`
//! declares a task, `E <src> <dst> <weight>` declares an edge. Blank
//! lines are ignored. Ids must be dense from 0; edges may reference
//! tasks declared on later lines.

use super::{GraphError, TaskGraph};
use crate::{TaskId, Time};

/// Errors from [`parse_tg`]. Line numbers are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: syntax error: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("line {line}: unknown task id {id}")]
    UnknownTask { line: usize, id: TaskId },
    #[error("line {line}: duplicate task id {id}")]
    DuplicateTask { line: usize, id: TaskId },
    #[error("line {line}: duplicate edge {src} -> {dst}")]
    DuplicateEdge { line: usize, src: TaskId, dst: TaskId },
    #[error("line {line}: task {id} has non-positive weight {weight}")]
    NonPositiveWeight { line: usize, id: TaskId, weight: i64 },
    #[error("line {line}: edge {src} -> {dst} has negative weight {weight}")]
    NegativeEdgeWeight { line: usize, src: TaskId, dst: TaskId, weight: i64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Parses a `.tg` document into a validated [`TaskGraph`]. The order of
/// `T` lines fixes the graph's canonical task order.
pub fn parse_tg(text: &str) -> Result<TaskGraph, ParseError> {
    let mut decls: Vec<(TaskId, Time)> = Vec::new();
    let mut edges: Vec<(TaskId, TaskId, Time)> = Vec::new();
    // Line numbers retained so post-pass checks (unknown id, duplicates)
    // can point at the offending record.
    let mut decl_lines: Vec<usize> = Vec::new();
    let mut edge_lines: Vec<usize> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        match fields[0] {
            "T" => {
                if fields.len() != 3 {
                    return Err(syntax(line, "expected `T <id> <weight>`"));
                }
                let id = parse_id(line, fields[1], "task id")?;
                let weight = parse_int(line, fields[2], "task weight")?;
                if weight <= 0 {
                    return Err(ParseError::NonPositiveWeight { line, id, weight });
                }
                decls.push((id, weight as Time));
                decl_lines.push(line);
            }
            "E" => {
                if fields.len() != 4 {
                    return Err(syntax(line, "expected `E <src> <dst> <weight>`"));
                }
                let src = parse_id(line, fields[1], "source task id")?;
                let dst = parse_id(line, fields[2], "destination task id")?;
                let weight = parse_int(line, fields[3], "edge weight")?;
                if weight < 0 {
                    return Err(ParseError::NegativeEdgeWeight { line, src, dst, weight });
                }
                edges.push((src, dst, weight as Time));
                edge_lines.push(line);
            }
            other => {
                return Err(syntax(line, &format!("unknown record type `{other}`")));
            }
        }
    }

    let mut declared = std::collections::HashSet::new();
    for (&(id, _), &line) in decls.iter().zip(&decl_lines) {
        if !declared.insert(id) {
            return Err(ParseError::DuplicateTask { line, id });
        }
    }
    let mut seen_edges = std::collections::HashSet::new();
    for (&(src, dst, _), &line) in edges.iter().zip(&edge_lines) {
        for id in [src, dst] {
            if !declared.contains(&id) {
                return Err(ParseError::UnknownTask { line, id });
            }
        }
        if !seen_edges.insert((src, dst)) {
            return Err(ParseError::DuplicateEdge { line, src, dst });
        }
    }

    Ok(TaskGraph::from_declarations(decls, edges)?)
}

fn syntax(line: usize, reason: &str) -> ParseError {
    ParseError::Syntax { line, reason: reason.to_string() }
}

fn parse_id(line: usize, field: &str, what: &str) -> Result<TaskId, ParseError> {
    field
        .parse::<TaskId>()
        .map_err(|_| syntax(line, &format!("{what} `{field}` is not a non-negative integer")))
}

fn parse_int(line: usize, field: &str, what: &str) -> Result<i64, ParseError> {
    field
        .parse::<i64>()
        .map_err(|_| syntax(line, &format!("{what} `{field}` is not an integer")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_tasks_and_edges() {
        let g = parse_tg("T 0 2\nT 1 3\nE 0 1 1").unwrap();
        assert_eq!(g.num_tasks(), 2);
        assert_eq!(g.weight(0), 2);
        assert_eq!(g.weight(1), 3);
        assert_eq!(g.children(0), &[(1, 1)]);
    }

    #[test]
    fn ignores_comments_blank_lines_and_extra_whitespace() {
        let text = "# a fork\n\nT 0 2\n  T 1 3\nT 2 4\n\nE 0 1 1\nE 0  2 5\n# done\n";
        let g = parse_tg(text).unwrap();
        assert_eq!(g.num_tasks(), 3);
        assert_eq!(g.children(0), &[(1, 1), (2, 5)]);
    }

    #[test]
    fn declaration_order_becomes_canonical_order() {
        let g = parse_tg("T 1 5\nT 0 2\nT 2 1\n").unwrap();
        assert_eq!(g.canonical_order(), &[1, 0, 2]);
    }

    #[test]
    fn edge_may_reference_task_declared_later() {
        let g = parse_tg("T 0 1\nE 0 1 3\nT 1 1\n").unwrap();
        assert_eq!(g.children(0), &[(1, 3)]);
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let err = parse_tg("T 0 1\nE 0 0 1").unwrap_err();
        assert_eq!(err, ParseError::Graph(GraphError::Cycle));
    }

    #[test]
    fn cycle_is_detected() {
        let err = parse_tg("T 0 1\nT 1 1\nE 0 1 0\nE 1 0 0").unwrap_err();
        assert_eq!(err, ParseError::Graph(GraphError::Cycle));
    }

    #[test]
    fn unknown_task_in_edge() {
        let err = parse_tg("T 0 2\nE 0 1 1").unwrap_err();
        assert_eq!(err, ParseError::UnknownTask { line: 2, id: 1 });
    }

    #[test]
    fn duplicate_task_reports_line() {
        let err = parse_tg("T 0 2\nT 1 1\nT 0 3").unwrap_err();
        assert_eq!(err, ParseError::DuplicateTask { line: 3, id: 0 });
    }

    #[test]
    fn duplicate_edge_reports_line() {
        let err = parse_tg("T 0 2\nT 1 1\nE 0 1 1\nE 0 1 2").unwrap_err();
        assert_eq!(err, ParseError::DuplicateEdge { line: 4, src: 0, dst: 1 });
    }

    #[test]
    fn weight_sign_errors() {
        let err = parse_tg("T 0 0").unwrap_err();
        assert_eq!(err, ParseError::NonPositiveWeight { line: 1, id: 0, weight: 0 });

        let err = parse_tg("T 0 -3").unwrap_err();
        assert_eq!(err, ParseError::NonPositiveWeight { line: 1, id: 0, weight: -3 });

        let err = parse_tg("T 0 1\nT 1 1\nE 0 1 -2").unwrap_err();
        assert_eq!(err, ParseError::NegativeEdgeWeight { line: 3, src: 0, dst: 1, weight: -2 });
    }

    #[test]
    fn syntax_errors_report_line() {
        assert!(matches!(parse_tg("T 0").unwrap_err(), ParseError::Syntax { line: 1, .. }));
        assert!(matches!(parse_tg("T 0 2\nX 1 2").unwrap_err(), ParseError::Syntax { line: 2, .. }));
        assert!(matches!(parse_tg("T a 2").unwrap_err(), ParseError::Syntax { line: 1, .. }));
        assert!(matches!(
            parse_tg("T 0 1\nE 0 0").unwrap_err(),
            ParseError::Syntax { line: 2, .. }
        ));
    }

    #[test]
    fn non_dense_ids_rejected() {
        let err = parse_tg("T 0 1\nT 2 1").unwrap_err();
        assert_eq!(err, ParseError::Graph(GraphError::MissingTask { missing: 1 }));
    }

    #[test]
    fn round_trips_a_graph() {
        let text = "T 0 2\nT 1 3\nT 2 3\nT 3 1\nE 0 1 1\nE 0 2 1\nE 1 3 2\nE 2 3 2\n";
        let g = parse_tg(text).unwrap();
        assert_eq!(g.to_tg_string(), text);
        assert_eq!(parse_tg(&g.to_tg_string()).unwrap(), g);
    }
}
