//! Line-based text format for [`WeightedGraph`]:
//!
//! ```text
//! dim 3
//! edges
//! 0,0,0 2,0,0 1
//! 0,0,0 -1,0,0 2
//! boundary
//! 2,0,0
//! ```
//!
//! Coordinates are doubled. Blank lines and lines starting with `#` are
//! ignored.

use std::io::{BufRead, Write};

use super::graph::{HalfVertex, WeightedGraph};
use crate::{GreenError, Result};

pub fn write_graph<W: Write>(graph: &WeightedGraph, mut out: W) -> Result<()> {
    writeln!(out, "dim {}", graph.dim())?;
    writeln!(out, "edges")?;
    for (u, v, c) in graph.edges() {
        writeln!(out, "{} {} {}", graph.vertex(u), graph.vertex(v), c)?;
    }
    writeln!(out, "boundary")?;
    for i in graph.boundary_vertices() {
        writeln!(out, "{}", graph.vertex(i))?;
    }
    Ok(())
}

pub fn dump_graph(graph: &WeightedGraph) -> String {
    let mut buf = Vec::new();
    write_graph(graph, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

enum Section {
    Header,
    Edges,
    Boundary,
}

pub fn read_graph<R: BufRead>(input: R) -> Result<WeightedGraph> {
    let mut graph: Option<WeightedGraph> = None;
    let mut section = Section::Header;
    for (k, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = k + 1;
        let fail = |message: String| GreenError::Format {
            line: lineno,
            message,
        };
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        match text {
            "edges" | "boundary" if graph.is_none() => {
                return Err(fail("missing 'dim' header".into()));
            }
            "edges" => {
                section = Section::Edges;
                continue;
            }
            "boundary" => {
                section = Section::Boundary;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Header => {
                let d = text
                    .strip_prefix("dim")
                    .and_then(|r| r.trim().parse::<usize>().ok())
                    .filter(|&d| d >= 1)
                    .ok_or_else(|| fail(format!("expected 'dim <d>', got {text:?}")))?;
                if graph.is_some() {
                    return Err(fail("duplicate 'dim' header".into()));
                }
                graph = Some(WeightedGraph::new(d));
            }
            Section::Edges => {
                let g = graph.as_mut().expect("header seen");
                let parts: Vec<&str> = text.split_whitespace().collect();
                let [u, v, c] = parts[..] else {
                    return Err(fail(format!("expected 'u v c', got {text:?}")));
                };
                let u: HalfVertex = u.parse().map_err(|e: GreenError| fail(e.to_string()))?;
                let v: HalfVertex = v.parse().map_err(|e: GreenError| fail(e.to_string()))?;
                let c: f64 = c
                    .parse()
                    .map_err(|_| fail(format!("bad conductance {c:?}")))?;
                g.add_edge(&u, &v, c).map_err(|e| fail(e.to_string()))?;
            }
            Section::Boundary => {
                let g = graph.as_mut().expect("header seen");
                let v: HalfVertex = text.parse().map_err(|e: GreenError| fail(e.to_string()))?;
                g.set_boundary(&v, true).map_err(|e| fail(e.to_string()))?;
            }
        }
    }
    graph.ok_or(GreenError::Format {
        line: 0,
        message: "empty input".into(),
    })
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    read_graph(text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut g = WeightedGraph::new(2);
        let a = HalfVertex::from_doubled(vec![0, 0]);
        let b = HalfVertex::from_doubled(vec![-1, 0]);
        let c = HalfVertex::from_doubled(vec![2, 0]);
        g.add_edge(&a, &b, 2.0).unwrap();
        g.add_edge(&a, &c, 0.1 + 0.2).unwrap();
        g.set_boundary(&c, true).unwrap();
        let text = dump_graph(&g);
        let back = parse_graph(&text).unwrap();
        assert!(back.same_as(&g, 0.0));
    }

    #[test]
    fn reports_line_numbers() {
        let bad = "dim 2\nedges\n0,0 2,0 1\n0,0 4,0 -1\n";
        match parse_graph(bad) {
            Err(GreenError::Format { line: 4, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_graph("edges\n"),
            Err(GreenError::Format { line: 1, .. })
        ));
        assert!(matches!(
            parse_graph("dim 2\nedges\n0,0 2\n"),
            Err(GreenError::Format { line: 3, .. })
        ));
        assert!(matches!(parse_graph(""), Err(GreenError::Format { .. })));
    }
}
