//! Text formats: the plain edge-list format used everywhere, and a reader for
//! DIMACS ".col"-style files.
//!
//! Edge list: one `u v` pair per line, `#` comments and blank lines ignored.
//! Duplicate edges are collapsed silently (counted in the diagnostics);
//! self-loops are a parse error. Serialization is canonical: edges sorted
//! with `u < v`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: self-loop {v} {v}")]
    SelfLoop { line: usize, v: u32 },
}

/// What the parser saw besides the graph itself.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct ParseDiagnostics {
    pub duplicate_edges: usize,
    pub comment_lines: usize,
}

pub fn parse_edge_list(text: &str) -> Result<Graph, ParseError> {
    parse_edge_list_with_diagnostics(text).map(|(g, _)| g)
}

pub fn parse_edge_list_with_diagnostics(
    text: &str,
) -> Result<(Graph, ParseDiagnostics), ParseError> {
    let mut edges: BTreeSet<(u32, u32)> = BTreeSet::new();
    let mut diag = ParseDiagnostics::default();
    let mut max_vertex: Option<u32> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            if raw.trim_start().starts_with('#') {
                diag.comment_lines += 1;
            }
            continue;
        }
        let mut it = content.split_whitespace();
        let u = parse_vertex(it.next(), line)?;
        let v = parse_vertex(it.next(), line)?;
        if it.next().is_some() {
            return Err(ParseError::Malformed {
                line,
                msg: "expected exactly two vertex ids".into(),
            });
        }
        if u == v {
            return Err(ParseError::SelfLoop { line, v: u });
        }
        max_vertex = Some(max_vertex.map_or(u.max(v), |m| m.max(u).max(v)));
        if !edges.insert((u.min(v), u.max(v))) {
            diag.duplicate_edges += 1;
        }
    }
    let n = max_vertex.map_or(0, |m| m as usize + 1);
    let g = Graph::from_edges(n, edges).expect("validated during parse");
    Ok((g, diag))
}

fn parse_vertex(tok: Option<&str>, line: usize) -> Result<u32, ParseError> {
    let tok = tok.ok_or_else(|| ParseError::Malformed {
        line,
        msg: "expected two vertex ids".into(),
    })?;
    tok.parse().map_err(|_| ParseError::Malformed {
        line,
        msg: format!("not a vertex id: '{tok}'"),
    })
}

/// Canonical form: edges sorted, `u < v`, one per line, trailing newline.
pub fn serialize_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

/// DIMACS ".col" reader: `p edge n m` header, `e u v` lines (1-indexed),
/// `c` comment lines. Converted to 0-indexed ids.
pub fn parse_dimacs(text: &str) -> Result<Graph, ParseError> {
    let mut n: Option<usize> = None;
    let mut edges: BTreeSet<(u32, u32)> = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('c') {
            continue;
        }
        let mut it = content.split_whitespace();
        match it.next() {
            Some("p") => {
                let kind = it.next().unwrap_or("");
                if kind != "edge" && kind != "col" {
                    return Err(ParseError::Malformed {
                        line,
                        msg: format!("unsupported problem kind '{kind}'"),
                    });
                }
                let declared = parse_vertex(it.next(), line)? as usize;
                let _m = parse_vertex(it.next(), line)?;
                n = Some(declared);
            }
            Some("e") => {
                let header_n = n.ok_or_else(|| ParseError::Malformed {
                    line,
                    msg: "edge line before 'p' header".into(),
                })?;
                let u = parse_vertex(it.next(), line)?;
                let v = parse_vertex(it.next(), line)?;
                if u == 0 || v == 0 {
                    return Err(ParseError::Malformed {
                        line,
                        msg: "DIMACS vertices are 1-indexed".into(),
                    });
                }
                let (u, v) = (u - 1, v - 1);
                if u == v {
                    return Err(ParseError::SelfLoop { line, v: u });
                }
                if u as usize >= header_n || v as usize >= header_n {
                    return Err(ParseError::Malformed {
                        line,
                        msg: format!("vertex beyond declared order {header_n}"),
                    });
                }
                edges.insert((u.min(v), u.max(v)));
            }
            Some(other) => {
                return Err(ParseError::Malformed {
                    line,
                    msg: format!("unexpected line kind '{other}'"),
                });
            }
            None => unreachable!(),
        }
    }
    let n = n.ok_or(ParseError::Malformed { line: 0, msg: "missing 'p' header".into() })?;
    Ok(Graph::from_edges(n, edges).expect("validated during parse"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_small_path() {
        let g = parse_edge_list("0 1\n1 2").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2) && !g.has_edge(0, 2));
    }

    #[test]
    fn round_trip_is_canonical() {
        let messy = "# a comment\n2 1\n\n0 1  # inline\n1 2\n";
        let (g, diag) = parse_edge_list_with_diagnostics(messy).unwrap();
        assert_eq!(diag.duplicate_edges, 1);
        let canon = serialize_edge_list(&g);
        assert_eq!(canon, "0 1\n1 2\n");
        assert_eq!(serialize_edge_list(&parse_edge_list(&canon).unwrap()), canon);
    }

    #[test]
    fn self_loop_errors_with_line() {
        assert_eq!(
            parse_edge_list("0 0").unwrap_err(),
            ParseError::SelfLoop { line: 1, v: 0 }
        );
    }

    #[test]
    fn malformed_line_reported() {
        let err = parse_edge_list("0 1\nx y").unwrap_err();
        assert!(matches!(err, ParseError::Malformed { line: 2, .. }));
    }

    #[test]
    fn dimacs_round_trip() {
        let text = "c sample\np edge 4 3\ne 1 2\ne 2 3\ne 3 4\n";
        let g = parse_dimacs(text).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(serialize_edge_list(&g), "0 1\n1 2\n2 3\n");
    }
}
