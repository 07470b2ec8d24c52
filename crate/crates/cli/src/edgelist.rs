//! Edge-list ingestion: one edge per line, labels separated by
//! whitespace or commas, `#` comments and blank lines skipped. Duplicate
//! edges collapse; self-loops are dropped and counted.

use std::collections::HashMap;
use std::path::Path;

use graphon_core::AdjacencyMatrix;

use crate::CliError;

#[derive(Debug, Clone)]
pub struct EdgeListGraph {
    /// Original labels in first-appearance order; index = node id.
    pub node_labels: Vec<String>,
    pub adjacency: AdjacencyMatrix,
    pub self_loops_dropped: usize,
    pub duplicate_edges: usize,
}

pub fn parse_edge_list(path: &Path) -> Result<EdgeListGraph, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    parse_edge_list_str(&text).map_err(|e| match e {
        CliError::Data(m) => CliError::Data(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse_edge_list_str(text: &str) -> Result<EdgeListGraph, CliError> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut intern = |label: &str, labels: &mut Vec<String>| -> usize {
        *index.entry(label.to_string()).or_insert_with(|| {
            labels.push(label.to_string());
            labels.len() - 1
        })
    };
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut seen: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
    let mut self_loops = 0usize;
    let mut duplicates = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> =
            line.split(|c: char| c == ',' || c.is_whitespace()).filter(|p| !p.is_empty()).collect();
        if parts.len() != 2 {
            return Err(CliError::Data(format!(
                "line {}: expected two labels, found {}",
                lineno + 1,
                parts.len()
            )));
        }
        let a = intern(parts[0], &mut labels);
        let b = intern(parts[1], &mut labels);
        if a == b {
            self_loops += 1;
            continue;
        }
        let key = (a.min(b), a.max(b));
        if seen.insert(key) {
            edges.push(key);
        } else {
            duplicates += 1;
        }
    }
    if edges.is_empty() {
        return Err(CliError::Data("no edges found".into()));
    }
    let adjacency = AdjacencyMatrix::from_edges(labels.len(), &edges);
    Ok(EdgeListGraph { node_labels: labels, adjacency, self_loops_dropped: self_loops, duplicate_edges: duplicates })
}
