//! Plain-text edge-list format.
//!
//! ```text
//! directed 0
//! nodes 4
//! blocks
//! 1 1
//! 2 1
//! 3 2
//! 4 2
//! edges
//! 1 2
//! 3 4
//! ```
//!
//! Labels are 1-based. The `blocks` section is optional and, when present,
//! lists every node exactly once. Lines starting with `#` and blank lines are
//! skipped.

use std::fmt::Write as _;

use super::{BlockStructure, Graph};
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn header_value(line: Option<(usize, &str)>, key: &str) -> Result<(usize, usize)> {
    let (no, text) = line.ok_or_else(|| parse_err(0, format!("missing `{key}` header")))?;
    let mut parts = text.split_whitespace();
    if parts.next() != Some(key) {
        return Err(parse_err(no, format!("expected `{key} <value>`")));
    }
    let value = parts
        .next()
        .and_then(|v| v.parse::<usize>().ok())
        .ok_or_else(|| parse_err(no, format!("`{key}` needs a non-negative integer")))?;
    if parts.next().is_some() {
        return Err(parse_err(no, "trailing tokens after header value"));
    }
    Ok((no, value))
}

fn parse_pair(no: usize, text: &str) -> Result<(usize, usize)> {
    let mut parts = text.split_whitespace();
    let mut next = || -> Result<usize> {
        parts
            .next()
            .and_then(|v| v.parse::<usize>().ok())
            .ok_or_else(|| parse_err(no, format!("expected two positive integers, got `{text}`")))
    };
    let pair = (next()?, next()?);
    if parts.next().is_some() {
        return Err(parse_err(no, "more than two fields"));
    }
    Ok(pair)
}

/// Parses the edge-list format. Returns the block structure iff a `blocks`
/// section is present.
pub fn parse_edge_list(text: &str) -> Result<(Graph, Option<BlockStructure>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (dir_line, directed) = header_value(lines.next(), "directed")?;
    let directed = match directed {
        0 => false,
        1 => true,
        _ => return Err(parse_err(dir_line, "`directed` must be 0 or 1")),
    };
    let (nodes_line, n) = header_value(lines.next(), "nodes")?;
    if n == 0 {
        return Err(parse_err(nodes_line, "`nodes` must be at least 1"));
    }

    let mut graph = Graph::new(n, directed)?;
    let mut blocks = None;
    let (mut no, mut section) = lines
        .next()
        .ok_or_else(|| parse_err(nodes_line, "missing `edges` section"))?;

    if section == "blocks" {
        let mut assignment = vec![None; n];
        for _ in 0..n {
            let (bno, text) = lines
                .next()
                .ok_or_else(|| parse_err(no, format!("block section needs {n} lines")))?;
            let (node, block) = parse_pair(bno, text)?;
            if node == 0 || node > n {
                return Err(parse_err(bno, format!("node {node} outside 1..={n}")));
            }
            if block == 0 {
                return Err(parse_err(bno, "block ids start at 1"));
            }
            if assignment[node - 1].replace(block - 1).is_some() {
                return Err(parse_err(bno, format!("node {node} assigned twice")));
            }
        }
        let assignment: Vec<usize> = assignment.into_iter().map(Option::unwrap).collect();
        blocks = Some(BlockStructure::new(assignment).map_err(|e| parse_err(no, e.to_string()))?);
        (no, section) = lines
            .next()
            .ok_or_else(|| parse_err(no, "missing `edges` section"))?;
    }

    if section != "edges" {
        return Err(parse_err(no, format!("expected `edges`, got `{section}`")));
    }

    for (eno, text) in lines {
        let (i, j) = parse_pair(eno, text)?;
        for node in [i, j] {
            if node == 0 || node > n {
                return Err(parse_err(eno, format!("node {node} outside 1..={n}")));
            }
        }
        if i == j {
            return Err(parse_err(eno, format!("self-loop at node {i}")));
        }
        if graph.has_edge(i - 1, j - 1) {
            return Err(parse_err(eno, format!("duplicate edge {i} {j}")));
        }
        graph.set_edge(i - 1, j - 1, true)?;
    }

    Ok((graph, blocks))
}

/// Writes `graph` (and `blocks`, if given) in the edge-list format.
pub fn serialize_edge_list(graph: &Graph, blocks: Option<&BlockStructure>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "directed {}", u8::from(graph.is_directed()));
    let _ = writeln!(out, "nodes {}", graph.n());
    if let Some(b) = blocks {
        out.push_str("blocks\n");
        for (i, &blk) in b.assignment().iter().enumerate() {
            let _ = writeln!(out, "{} {}", i + 1, blk + 1);
        }
    }
    out.push_str("edges\n");
    for (i, j) in graph.edges() {
        let _ = writeln!(out, "{} {}", i + 1, j + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_path() {
        let (g, b) = parse_edge_list("directed 0\nnodes 3\nedges\n1 2\n2 3\n").unwrap();
        assert!(b.is_none());
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
        assert!(g.has_edge(2, 1));
    }

    #[test]
    fn parses_directed() {
        let (g, _) = parse_edge_list("directed 1\nnodes 3\nedges\n1 2\n2 3\n").unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(!g.has_edge(1, 0));
    }

    #[test]
    fn comments_and_blocks() {
        let text =
            "# classes\ndirected 1\nnodes 4\nblocks\n1 1\n2 1\n# second\n3 2\n4 2\nedges\n1 2\n";
        let (g, b) = parse_edge_list(text).unwrap();
        let b = b.unwrap();
        assert_eq!(b.block_count(), 2);
        assert_eq!(b.block_of(3), 1);
        assert_eq!(g.edge_count(), 1);
    }

    fn err_line(text: &str) -> usize {
        match parse_edge_list(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_name_the_line() {
        assert_eq!(err_line("directed 0\nnodes 3\nedges\n1 2\n1 1\n"), 5);
        assert_eq!(err_line("directed 0\nnodes 3\nedges\n1 2\n2 1\n"), 5);
        assert_eq!(err_line("directed 0\nnodes 3\nedges\n1 4\n"), 4);
        assert_eq!(err_line("directed 2\nnodes 3\nedges\n"), 1);
        assert_eq!(err_line("directed 0\nnode 3\nedges\n"), 2);
        assert_eq!(err_line("directed 0\nnodes 3\nedges\n1 x\n"), 4);
        assert_eq!(
            err_line("directed 0\nnodes 2\nblocks\n1 1\n1 2\nedges\n"),
            5
        );
    }

    #[test]
    fn serialize_matches_format() {
        let g = Graph::from_edges(3, false, &[(1, 0), (1, 2)]).unwrap();
        let b = BlockStructure::new(vec![0, 0, 1]).unwrap();
        let text = serialize_edge_list(&g, Some(&b));
        assert_eq!(
            text,
            "directed 0\nnodes 3\nblocks\n1 1\n2 1\n3 2\nedges\n1 2\n2 3\n"
        );
        assert_eq!(parse_edge_list(&text).unwrap(), (g, Some(b)));
    }
}
