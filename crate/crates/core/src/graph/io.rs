//! Graph file I/O.
//!
//! Native format is JSON: `{"v": V, "edges": [[i,j],...], "weights": [w0,...]}`
//! with 0-based indices and each edge listed once with i < j. A CSV edge list
//! with header `src,dst` is also accepted on load (weights default to 1).

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ConflictGraph, GraphError, VertexWeights};

#[derive(Debug, Error)]
pub enum GraphIoError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("schema error: {0}")]
    Schema(String),
}

impl From<GraphError> for GraphIoError {
    fn from(e: GraphError) -> Self {
        GraphIoError::Schema(e.to_string())
    }
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    v: usize,
    edges: Vec<(usize, usize)>,
    weights: Vec<f64>,
}

pub fn save_graph(
    path: impl AsRef<Path>,
    graph: &ConflictGraph,
    weights: &VertexWeights,
) -> Result<(), GraphIoError> {
    let path = path.as_ref();
    let file = GraphFile {
        v: graph.vertex_count(),
        edges: graph.edges().collect(),
        weights: weights.values().to_vec(),
    };
    let body = serde_json::to_string(&file).expect("graph serializes");
    let io_err = |source| GraphIoError::Io { path: path.display().to_string(), source };
    let mut f = fs::File::create(path).map_err(io_err)?;
    f.write_all(body.as_bytes())
        .and_then(|_| f.write_all(b"\n"))
        .map_err(|source| GraphIoError::Io { path: path.display().to_string(), source })
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<(ConflictGraph, VertexWeights), GraphIoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|source| GraphIoError::Io { path: path.display().to_string(), source })?;
    if path.extension().is_some_and(|e| e == "csv") {
        load_csv(&text)
    } else {
        load_json(&text)
    }
}

fn load_json(text: &str) -> Result<(ConflictGraph, VertexWeights), GraphIoError> {
    let file: GraphFile = serde_json::from_str(text)
        .map_err(|e| GraphIoError::Parse { line: e.line(), message: e.to_string() })?;
    if file.weights.len() != file.v {
        return Err(GraphIoError::Schema(format!(
            "weights length {} does not match v={}",
            file.weights.len(),
            file.v
        )));
    }
    for &(i, j) in &file.edges {
        if i >= j {
            return Err(GraphIoError::Schema(format!("edge ({i}, {j}) must satisfy i < j")));
        }
    }
    let graph = ConflictGraph::from_edges(file.v, file.edges)?;
    let weights = VertexWeights::for_graph(file.weights, &graph)?;
    Ok((graph, weights))
}

fn load_csv(text: &str) -> Result<(ConflictGraph, VertexWeights), GraphIoError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "src,dst" => {}
        Some((_, header)) => {
            return Err(GraphIoError::Parse {
                line: 1,
                message: format!("expected header 'src,dst', found '{}'", header.trim()),
            })
        }
        None => return Err(GraphIoError::Parse { line: 1, message: "empty file".into() }),
    }
    let mut edges = Vec::new();
    let mut max_vertex = None::<usize>;
    for (idx, line) in lines {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut parts = trimmed.split(',');
        let parse = |s: Option<&str>| -> Result<usize, GraphIoError> {
            s.and_then(|x| x.trim().parse().ok()).ok_or_else(|| GraphIoError::Parse {
                line: line_no,
                message: format!("expected 'src,dst' integers, found '{trimmed}'"),
            })
        };
        let src = parse(parts.next())?;
        let dst = parse(parts.next())?;
        if parts.next().is_some() {
            return Err(GraphIoError::Parse { line: line_no, message: "too many fields".into() });
        }
        max_vertex = Some(max_vertex.map_or(src.max(dst), |m: usize| m.max(src).max(dst)));
        edges.push((src.min(dst), src.max(dst)));
    }
    let v = max_vertex.map_or(0, |m| m + 1);
    let graph = ConflictGraph::from_edges(v, edges)?;
    let weights = VertexWeights::for_graph(vec![1.0; v], &graph)?;
    Ok((graph, weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_er;

    #[test]
    fn json_round_trip_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        let g = gen_er(17, 0.3, 4);
        let w = VertexWeights::uniform(17, 5);
        save_graph(&path, &g, &w).unwrap();
        let (g2, w2) = load_graph(&path).unwrap();
        assert_eq!(g, g2);
        assert_eq!(w.values(), w2.values());
    }

    #[test]
    fn empty_graph_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.json");
        save_graph(&path, &ConflictGraph::empty(0), &VertexWeights::new(vec![]).unwrap()).unwrap();
        let (g, w) = load_graph(&path).unwrap();
        assert_eq!(g.vertex_count(), 0);
        assert!(w.values().is_empty());
    }

    #[test]
    fn duplicate_edge_is_schema_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dup.json");
        fs::write(&path, r#"{"v":3,"edges":[[0,1],[0,1]],"weights":[1,1,1]}"#).unwrap();
        match load_graph(&path) {
            Err(GraphIoError::Schema(msg)) => assert!(msg.contains("duplicate")),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_json_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        fs::write(&path, "{\"v\": 3,\n\"edges\": oops\n}").unwrap();
        match load_graph(&path) {
            Err(GraphIoError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn inconsistent_weight_length_is_schema_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.json");
        fs::write(&path, r#"{"v":3,"edges":[],"weights":[1.0]}"#).unwrap();
        assert!(matches!(load_graph(&path), Err(GraphIoError::Schema(_))));
    }

    #[test]
    fn csv_edge_list_import() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.csv");
        fs::write(&path, "src,dst\n0,1\n2,1\n").unwrap();
        let (g, w) = load_graph(&path).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(w.values(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn csv_bad_row_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.csv");
        fs::write(&path, "src,dst\n0,1\nx,2\n").unwrap();
        match load_graph(&path) {
            Err(GraphIoError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
