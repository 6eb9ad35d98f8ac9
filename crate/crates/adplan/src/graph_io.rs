//! Plain-text edge lists.
//!
//! ```text
//! # comment
//! agents 3
//! 2 1 0.8
//! 3 2 1.0
//! ```
//!
//! A line `i j w` sets `a_ij = w`: agent `j` influences agent `i`. Indices
//! are 1-based. Repeated pairs keep the last weight.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use adplan_core::SocialGraph;

use crate::error::{HarnessError, Result};

pub fn read_graph(path: &Path) -> Result<SocialGraph> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::Unreadable { path: path.to_path_buf(), source: e })?;
    parse_graph(&text, &path.display().to_string())
}

/// Parses an edge list; `origin` only labels error messages.
pub fn parse_graph(text: &str, origin: &str) -> Result<SocialGraph> {
    let err = |line: usize, message: String| HarnessError::Parse { origin: origin.to_string(), line, message };
    let mut agents = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] == "agents" {
            if agents.is_some() {
                return Err(err(line_no, "repeated `agents` header".into()));
            }
            if fields.len() != 2 {
                return Err(err(line_no, "expected `agents N`".into()));
            }
            let n: usize = fields[1].parse().map_err(|_| err(line_no, format!("bad agent count `{}`", fields[1])))?;
            if n == 0 {
                return Err(err(line_no, "agent count must be positive".into()));
            }
            agents = Some(n);
            continue;
        }
        let Some(n) = agents else {
            return Err(err(line_no, "edge before the `agents N` header".into()));
        };
        if fields.len() != 3 {
            return Err(err(line_no, format!("expected `i j w`, found `{line}`")));
        }
        let index = |s: &str| -> Result<usize> {
            let i: usize = s.parse().map_err(|_| err(line_no, format!("bad agent index `{s}`")))?;
            if i == 0 || i > n {
                return Err(err(line_no, format!("agent index {i} outside 1..={n}")));
            }
            Ok(i - 1)
        };
        let i = index(fields[0])?;
        let j = index(fields[1])?;
        let w: f64 = fields[2].parse().map_err(|_| err(line_no, format!("bad weight `{}`", fields[2])))?;
        edges.push((i, j, w));
    }
    let n = agents.ok_or_else(|| err(0, "missing `agents N` header".into()))?;
    SocialGraph::from_edges(n, edges).map_err(|e| HarnessError::model(origin, e))
}

/// Serializes a graph in the format [`parse_graph`] reads.
pub fn format_graph(graph: &SocialGraph) -> String {
    let mut out = format!("agents {}\n", graph.agents());
    for (i, j, w) in graph.edges() {
        let _ = writeln!(out, "{} {} {}", i + 1, j + 1, w);
    }
    out
}

pub fn write_graph(graph: &SocialGraph, path: &Path) -> Result<()> {
    fs::write(path, format_graph(graph)).map_err(|e| HarnessError::io(path, e))
}
