//! Canonical graph file format: a single JSON document
//! `{"format":"dgsp-graph/1","vertices":[{"id":"v1","db":[["i1","i2"],…]},…],"edges":[["v1","v2"],…]}`.
//!
//! Transaction ids are positional; itemsets are arrays of item name strings.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DatabaseGraph;

pub const GRAPH_FORMAT: &str = "dgsp-graph/1";

#[derive(Debug, Serialize, Deserialize)]
struct GraphFile {
    format: String,
    vertices: Vec<VertexEntry>,
    edges: Vec<[String; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
struct VertexEntry {
    id: String,
    db: Vec<Vec<String>>,
}

/// Parses and validates a graph file.
pub fn load_graph<R: Read>(source: R) -> Result<DatabaseGraph> {
    let file: GraphFile =
        serde_json::from_reader(source).map_err(|e| Error::Parse(e.to_string()))?;
    if file.format != GRAPH_FORMAT {
        return Err(Error::Parse(format!(
            "unsupported format tag {:?}, expected {GRAPH_FORMAT:?}",
            file.format
        )));
    }
    DatabaseGraph::from_parts(
        file.vertices.into_iter().map(|v| (v.id, v.db)),
        file.edges.into_iter().map(|[a, b]| (a, b)),
    )
}

/// Serializes a graph back to the canonical file format. The output is a
/// deterministic function of the graph (declaration order is preserved).
pub fn write_graph<W: Write>(graph: &DatabaseGraph, mut sink: W) -> Result<()> {
    let file = GraphFile {
        format: GRAPH_FORMAT.to_string(),
        vertices: graph
            .vertex_ids()
            .map(|v| VertexEntry {
                id: graph.vertex_name(v).to_string(),
                db: graph
                    .database(v)
                    .transactions
                    .iter()
                    .map(|t| {
                        t.items
                            .iter()
                            .map(|&i| graph.item_name(i).to_string())
                            .collect()
                    })
                    .collect(),
            })
            .collect(),
        edges: graph
            .vertex_ids()
            .flat_map(|u| {
                graph.out(u).iter().map(move |&v| {
                    [
                        graph.vertex_name(u).to_string(),
                        graph.vertex_name(v).to_string(),
                    ]
                })
            })
            .collect(),
    };
    serde_json::to_writer(&mut sink, &file).map_err(|e| Error::Parse(e.to_string()))?;
    sink.write_all(b"\n")?;
    Ok(())
}
