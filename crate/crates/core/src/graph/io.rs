//! Plain-text graph format.
//!
//! ```text
//! # comment lines start with '#'
//! n m
//! u v [id]
//! ...
//! ```
//!
//! Nodes are 0-indexed. A line without an `id` column gets the ID equal to its
//! position among the edge lines (0, 1, 2, ...).

use std::fmt::Write as _;

use super::{Edge, EdgeId, GraphError, MultiGraph};

pub fn parse_graph(text: &str) -> Result<MultiGraph, GraphError> {
    parse_graph_with_comments(text).map(|(g, _)| g)
}

/// Parses a graph and returns the comment lines (without the leading `#`, trimmed).
pub fn parse_graph_with_comments(text: &str) -> Result<(MultiGraph, Vec<String>), GraphError> {
    let mut comments = Vec::new();
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            comments.push(c.trim().to_string());
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let num = |i: usize| -> Result<u64, GraphError> {
            fields[i].parse::<u64>().map_err(|_| GraphError::Parse {
                line: line_no,
                msg: format!("expected a non-negative integer, found {:?}", fields[i]),
            })
        };
        match header {
            None => {
                if fields.len() != 2 {
                    return Err(GraphError::Parse {
                        line: line_no,
                        msg: "header must be `n m`".into(),
                    });
                }
                header = Some((num(0)? as usize, num(1)? as usize));
            }
            Some((_, m)) => {
                if !(2..=3).contains(&fields.len()) {
                    return Err(GraphError::Parse {
                        line: line_no,
                        msg: "edge line must be `u v [id]`".into(),
                    });
                }
                if edges.len() == m {
                    return Err(GraphError::Parse {
                        line: line_no,
                        msg: format!("more than the declared {m} edges"),
                    });
                }
                let id: EdgeId = if fields.len() == 3 {
                    num(2)?
                } else {
                    edges.len() as EdgeId
                };
                edges.push(Edge {
                    id,
                    u: num(0)? as usize,
                    v: num(1)? as usize,
                });
            }
        }
    }

    let (n, m) = header.ok_or(GraphError::Parse {
        line: last_line,
        msg: "missing `n m` header".into(),
    })?;
    if edges.len() != m {
        return Err(GraphError::Parse {
            line: last_line,
            msg: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    Ok((MultiGraph::from_edges(n, edges)?, comments))
}

/// Serializes `g` with explicit edge IDs, preceded by `# `-prefixed comment lines.
pub fn write_graph(g: &MultiGraph, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "{} {}", g.node_count(), g.edge_count());
    for e in g.edges() {
        let _ = writeln!(out, "{} {} {}", e.u, e.v, e.id);
    }
    out
}
