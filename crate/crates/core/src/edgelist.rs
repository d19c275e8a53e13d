//! Plain-text edge lists.
//!
//! ```text
//! # nodes 4
//! # any further comment line is ignored
//! 1 2
//! 2 3
//! ```
//!
//! Ids are 1-based on disk. Self-loops are rejected; repeated edges are merged
//! and counted.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ParseStats {
    pub edges_read: usize,
    pub duplicates_merged: usize,
}

pub fn read_edge_list<R: BufRead>(reader: R) -> Result<(DirectedGraph, ParseStats)> {
    let mut n: Option<usize> = None;
    let mut rows: Vec<Vec<usize>> = Vec::new();
    let mut stats = ParseStats::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let mut parts = comment.split_whitespace();
            if n.is_none() && parts.next() == Some("nodes") {
                let value = parts.next().ok_or_else(|| Error::Parse {
                    line: lineno,
                    message: "missing node count".into(),
                })?;
                let count: usize = value.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("bad node count {value:?}"),
                })?;
                if count == 0 {
                    return Err(Error::Parse {
                        line: lineno,
                        message: "node count must be at least 1".into(),
                    });
                }
                n = Some(count);
                rows = vec![Vec::new(); count];
            }
            continue;
        }
        let count = n.ok_or_else(|| Error::Parse {
            line: lineno,
            message: "edge before '# nodes <N>' header".into(),
        })?;
        let mut parts = trimmed.split_whitespace();
        let mut id = |what: &str| -> Result<usize> {
            let tok = parts.next().ok_or_else(|| Error::Parse {
                line: lineno,
                message: format!("missing {what} id"),
            })?;
            let v: usize = tok.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad {what} id {tok:?}"),
            })?;
            if v == 0 || v > count {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("{what} id {v} outside 1..={count}"),
                });
            }
            Ok(v - 1)
        };
        let u = id("tail")?;
        let v = id("head")?;
        if parts.next().is_some() {
            return Err(Error::Parse {
                line: lineno,
                message: "expected exactly two ids".into(),
            });
        }
        if u == v {
            return Err(Error::Parse {
                line: lineno,
                message: format!("self-loop on node {}", u + 1),
            });
        }
        rows[u].push(v);
        stats.edges_read += 1;
    }
    if n.is_none() {
        return Err(Error::Parse {
            line: 0,
            message: "missing '# nodes <N>' header".into(),
        });
    }
    let (g, dups) = DirectedGraph::from_successors(rows)?;
    stats.duplicates_merged = dups;
    Ok((g, stats))
}

/// Writes the active edges of `g`. `comments` are emitted as `# ` lines after
/// the header.
pub fn write_edge_list<W: Write>(g: &DirectedGraph, comments: &[String], mut out: W) -> Result<()> {
    writeln!(out, "# nodes {}", g.node_count())?;
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    for (u, v) in g.edges() {
        writeln!(out, "{} {}", u + 1, v + 1)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_header_comments_and_duplicates() {
        let text = "# nodes 3\n# generated by hand\n1 2\n\n2 3\n1 2\n";
        let (g, stats) = read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(stats.edges_read, 3);
        assert_eq!(stats.duplicates_merged, 1);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2));
    }

    #[test]
    fn rejects_bad_input() {
        for bad in [
            "1 2\n",
            "# nodes 3\n1 1\n",
            "# nodes 3\n1 4\n",
            "# nodes 3\n0 1\n",
            "# nodes 3\n1 x\n",
            "# nodes 3\n1 2 3\n",
            "",
        ] {
            assert!(read_edge_list(bad.as_bytes()).is_err(), "{bad:?}");
        }
    }

    proptest! {
        #[test]
        fn write_then_read_is_identity(edges in prop::collection::vec((0..12usize, 0..12usize), 0..50)) {
            let edges: Vec<_> = edges.into_iter().filter(|(u, v)| u != v).collect();
            let g = DirectedGraph::from_edges(12, edges).unwrap();
            let mut buf = Vec::new();
            write_edge_list(&g, &["seed=1".to_string()], &mut buf).unwrap();
            let (back, stats) = read_edge_list(buf.as_slice()).unwrap();
            prop_assert_eq!(stats.duplicates_merged, 0);
            prop_assert_eq!(back, g);
        }
    }
}
