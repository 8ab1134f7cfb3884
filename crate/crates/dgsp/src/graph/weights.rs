//! Per-vertex, per-depth continuation weights used by the path sampler.
//!
//! Two modes are supported. `WalkCount` counts length-q directed walks
//! starting at a vertex, computed by one dynamic-programming sweep per depth;
//! it satisfies the recurrence w(v,q) = Σ_{u ∈ out(v)} w(u,q−1), which is what
//! makes the telescoping-product path sampler exactly uniform. `DistanceDegree`
//! counts vertices at shortest-path distance exactly q, computed by one
//! truncated breadth-first traversal per vertex; the two coincide on trees but
//! not on general digraphs.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DatabaseGraph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightMode {
    /// Number of length-q directed walks from the vertex.
    #[serde(rename = "walk-count")]
    WalkCount,
    /// Number of vertices at shortest-path distance exactly q.
    #[serde(rename = "distance-degree")]
    DistanceDegree,
}

impl WeightMode {
    pub fn as_str(self) -> &'static str {
        match self {
            WeightMode::WalkCount => "walk-count",
            WeightMode::DistanceDegree => "distance-degree",
        }
    }
}

impl std::str::FromStr for WeightMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "walk-count" => Ok(WeightMode::WalkCount),
            // Older flag spelling kept as an accepted alias.
            "distance-degree" | "paper-literal" => Ok(WeightMode::DistanceDegree),
            other => Err(Error::Domain(format!("unknown weight mode {other:?}"))),
        }
    }
}

/// Continuation weights for all vertices at depths 0..=l.
/// `weight(v, 0) = 1` for every vertex in both modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightTable {
    mode: WeightMode,
    l: usize,
    /// Indexed `[vertex][depth]`, depth 0..=l.
    table: Vec<Vec<u128>>,
}

impl WeightTable {
    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    pub fn path_length(&self) -> usize {
        self.l
    }

    pub fn weight(&self, v: VertexId, depth: usize) -> u128 {
        self.table[v.0 as usize][depth]
    }

    /// Σ_v weight(v, l): the number of start states available to the sampler.
    pub fn start_total(&self) -> u128 {
        self.table.iter().map(|row| row[self.l]).sum()
    }
}

/// Fills the weight table for all vertices and depths 0..=l.
/// All-zero rows are legal and mean the vertex starts no length-l walk.
pub fn compute_weights(graph: &DatabaseGraph, l: usize, mode: WeightMode) -> Result<WeightTable> {
    if l < 1 {
        return Err(Error::Precondition("path length l must be >= 1".into()));
    }
    let n = graph.vertex_count();
    let mut table = vec![vec![0u128; l + 1]; n];
    for row in &mut table {
        row[0] = 1;
    }
    match mode {
        WeightMode::WalkCount => {
            for q in 1..=l {
                for v in 0..n {
                    table[v][q] = graph
                        .out(VertexId(v as u32))
                        .iter()
                        .map(|u| table[u.0 as usize][q - 1])
                        .sum();
                }
            }
        }
        WeightMode::DistanceDegree => {
            let mut dist = vec![usize::MAX; n];
            for v in 0..n {
                dist.fill(usize::MAX);
                dist[v] = 0;
                let mut queue = VecDeque::from([VertexId(v as u32)]);
                while let Some(cur) = queue.pop_front() {
                    let d = dist[cur.0 as usize];
                    if d == l {
                        continue;
                    }
                    for &next in graph.out(cur) {
                        if dist[next.0 as usize] == usize::MAX {
                            dist[next.0 as usize] = d + 1;
                            table[v][d + 1] += 1;
                            queue.push_back(next);
                        }
                    }
                }
            }
        }
    }
    Ok(WeightTable { mode, l, table })
}
