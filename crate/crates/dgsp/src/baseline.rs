//! Exact ground truth: enumerate every length-l simple path, induce the full
//! transaction-sequence database D_l, and compute exact frequencies and exact
//! top-k rankings.
//!
//! D_l is a multiset indexed by (path, transaction choices): identical itemset
//! sequences reached through different paths or different tids count
//! separately. Everything streams over paths; D_l itself is never stored, not
//! even for top-k mining, which works on one factorized record per path.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::graph::{DatabaseGraph, ItemId, Path, VertexId};
use crate::miner::{
    self, ExactTotals, MinerOptions, Pattern, ProductRecord, RankedPatterns, ScoreKind,
};

/// One transaction chosen per vertex along a path. `choices[q]` indexes into
/// the database of the path's q-th vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionSequence {
    pub path: Path,
    pub choices: Vec<u32>,
}

impl TransactionSequence {
    /// The chosen transactions' itemsets, borrowed from the graph.
    pub fn itemsets<'g>(&self, graph: &'g DatabaseGraph) -> Vec<&'g [ItemId]> {
        self.path
            .vertices()
            .iter()
            .zip(&self.choices)
            .map(|(&v, &j)| graph.database(v).transactions[j as usize].items.as_slice())
            .collect()
    }

    pub fn contains_pattern(&self, graph: &DatabaseGraph, pattern: &Pattern) -> bool {
        miner::contains(&self.itemsets(graph), pattern)
    }
}

/// Streaming depth-first enumeration of all length-l simple paths, emitted in
/// lexicographic vertex order (start vertices ascending, then neighbor order).
pub struct PathEnumerator<'g> {
    graph: &'g DatabaseGraph,
    l: usize,
    /// (vertex, index of the next out-neighbor to try).
    stack: Vec<(VertexId, usize)>,
    on_path: Vec<bool>,
    next_start: u32,
    done: bool,
}

impl<'g> PathEnumerator<'g> {
    fn new(graph: &'g DatabaseGraph, l: usize) -> Self {
        PathEnumerator {
            graph,
            l,
            stack: Vec::with_capacity(l + 1),
            on_path: vec![false; graph.vertex_count()],
            next_start: 0,
            done: graph.vertex_count() == 0,
        }
    }

    fn push(&mut self, v: VertexId) {
        self.stack.push((v, 0));
        self.on_path[v.0 as usize] = true;
    }

    fn pop(&mut self) {
        if let Some((v, _)) = self.stack.pop() {
            self.on_path[v.0 as usize] = false;
        }
    }
}

impl<'g> Iterator for PathEnumerator<'g> {
    type Item = Path;

    fn next(&mut self) -> Option<Path> {
        if self.done {
            return None;
        }
        loop {
            if self.stack.is_empty() {
                if self.next_start as usize >= self.graph.vertex_count() {
                    self.done = true;
                    return None;
                }
                let start = VertexId(self.next_start);
                self.next_start += 1;
                self.push(start);
            }
            // A full-length path on the stack is emitted, then backtracked.
            if self.stack.len() == self.l + 1 {
                let path = Path::new(self.stack.iter().map(|&(v, _)| v).collect());
                self.pop();
                return Some(path);
            }
            let (v, cursor) = *self.stack.last().unwrap();
            let neighbors = self.graph.out(v);
            match neighbors[cursor..]
                .iter()
                .position(|u| !self.on_path[u.0 as usize])
            {
                Some(offset) => {
                    self.stack.last_mut().unwrap().1 = cursor + offset + 1;
                    let next = neighbors[cursor + offset];
                    self.push(next);
                }
                None => self.pop(),
            }
        }
    }
}

/// Emits every length-l simple path exactly once; empty when none exists.
pub fn enumerate_paths(graph: &DatabaseGraph, l: usize) -> Result<PathEnumerator<'_>> {
    if l < 1 {
        return Err(Error::Precondition("path length l must be >= 1".into()));
    }
    Ok(PathEnumerator::new(graph, l))
}

/// Cartesian product of the databases along `path` in lexicographic choice
/// order (position 0 most significant). Emits M = Π_q |T_{v_q}| sequences.
pub struct SequenceInducer {
    path: Path,
    sizes: Vec<u32>,
    odometer: Option<Vec<u32>>,
}

impl Iterator for SequenceInducer {
    type Item = TransactionSequence;

    fn next(&mut self) -> Option<TransactionSequence> {
        let current = self.odometer.as_mut()?;
        let out = TransactionSequence {
            path: self.path.clone(),
            choices: current.clone(),
        };
        // Advance the rightmost digit, carrying leftwards.
        let mut pos = current.len();
        loop {
            if pos == 0 {
                self.odometer = None;
                break;
            }
            pos -= 1;
            current[pos] += 1;
            if current[pos] < self.sizes[pos] {
                break;
            }
            current[pos] = 0;
        }
        Some(out)
    }
}

/// Streams the full Cartesian product of transaction choices along a path.
pub fn induce_sequences(graph: &DatabaseGraph, path: &Path) -> Result<SequenceInducer> {
    graph.validate_path(path)?;
    let sizes: Vec<u32> = path
        .vertices()
        .iter()
        .map(|&v| graph.database(v).len() as u32)
        .collect();
    Ok(SequenceInducer {
        path: path.clone(),
        odometer: Some(vec![0; sizes.len()]),
        sizes,
    })
}

/// |P_l| and Σ_i M^i, streamed over the path enumeration.
pub fn path_stats(graph: &DatabaseGraph, l: usize) -> Result<ExactTotals> {
    let mut path_count: u128 = 0;
    let mut total: u128 = 0;
    for path in enumerate_paths(graph, l)? {
        path_count += 1;
        total += path.sequence_count(graph);
    }
    Ok(ExactTotals {
        path_count,
        total_sequence_weight: total,
    })
}

/// Exact frequency of `pattern` in D_l as a rational with denominator |D_l|.
///
/// Transactions along a path are chosen independently per position, so the
/// number of induced records of a path containing the pattern is the product
/// over positions of per-database containment counts; only paths are streamed.
pub fn exact_frequency(graph: &DatabaseGraph, l: usize, pattern: &Pattern) -> Result<Ratio<u128>> {
    if pattern.positions() != l + 1 {
        return Err(Error::Precondition(format!(
            "pattern has {} positions, expected {}",
            pattern.positions(),
            l + 1
        )));
    }
    let mut containing: u128 = 0;
    let mut total: u128 = 0;
    for path in enumerate_paths(graph, l)? {
        total += path.sequence_count(graph);
        containing += path
            .vertices()
            .iter()
            .zip(pattern.itemsets())
            .map(|(&v, itemset)| graph.database(v).count_containing(itemset))
            .product::<u128>();
    }
    if total == 0 {
        return Err(Error::NoPath { l });
    }
    Ok(Ratio::new(containing, total))
}

/// Exact mining result: the induced database size plus the ranked top-k.
#[derive(Debug, Clone)]
pub struct ExactResult {
    /// |D_l|: number of induced sequence records.
    pub d_l_size: u128,
    pub topk: RankedPatterns,
}

impl ExactResult {
    /// The exact rational frequency of a ranked entry.
    pub fn rational_frequency(&self, rank: usize) -> Ratio<u128> {
        let entry = &self.topk.entries[rank - 1];
        Ratio::new(entry.support, self.d_l_size)
    }
}

/// Exact top-k by frequency over D_l. Patterns score one unit per induced
/// sequence containing them, but D_l itself is never materialized: each path
/// becomes one factorized record holding its per-position transaction lists,
/// and the miner counts matches as products of per-position containment
/// counts.
pub fn exact_topk(graph: &DatabaseGraph, l: usize, k: usize) -> Result<ExactResult> {
    exact_topk_with(graph, l, k, &MinerOptions::default())
}

pub fn exact_topk_with(
    graph: &DatabaseGraph,
    l: usize,
    k: usize,
    opts: &MinerOptions,
) -> Result<ExactResult> {
    if k == 0 {
        return Err(Error::Precondition("k must be >= 1".into()));
    }
    let mut records: Vec<ProductRecord> = Vec::new();
    let mut d_l_size: u128 = 0;
    for path in enumerate_paths(graph, l)? {
        d_l_size += path.sequence_count(graph);
        records.push(ProductRecord {
            positions: path
                .vertices()
                .iter()
                .map(|&v| {
                    graph
                        .database(v)
                        .transactions
                        .iter()
                        .map(|t| t.items.clone())
                        .collect()
                })
                .collect(),
        });
    }
    if d_l_size == 0 {
        return Err(Error::NoPath { l });
    }
    let entries = miner::mine_topk_product(&records, l + 1, k, opts)
        .into_iter()
        .enumerate()
        .map(|(i, (pattern, support))| miner::RankedEntry {
            rank: (i + 1) as u32,
            pattern,
            support,
            frequency: support as f64 / d_l_size as f64,
        })
        .collect();
    let topk = RankedPatterns {
        score_kind: ScoreKind::ExactFrequency,
        length: l,
        entries,
    };
    Ok(ExactResult { d_l_size, topk })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_graph;

    const FIG1_JSON: &str = include_str!("../tests/data/fig1.json");

    fn fig1() -> DatabaseGraph {
        load_graph(FIG1_JSON.as_bytes()).unwrap()
    }

    fn path_names(graph: &DatabaseGraph, l: usize) -> Vec<Vec<String>> {
        enumerate_paths(graph, l)
            .unwrap()
            .map(|p| p.names(graph).into_iter().map(String::from).collect())
            .collect()
    }

    #[test]
    fn fig1_path_enumeration() {
        let g = fig1();
        assert_eq!(path_names(&g, 3), vec![vec!["v1", "v2", "v4", "v7"]]);
        assert_eq!(
            path_names(&g, 2),
            vec![
                vec!["v1", "v2", "v4"],
                vec!["v1", "v2", "v5"],
                vec!["v1", "v3", "v6"],
                vec!["v2", "v4", "v7"],
            ]
        );
        assert!(path_names(&g, 4).is_empty());
    }

    #[test]
    fn induction_counts() {
        let g = fig1();
        let p6 = enumerate_paths(&g, 3).unwrap().next().unwrap();
        assert_eq!(induce_sequences(&g, &p6).unwrap().count(), 12);

        let two = Path::new(vec![g.vertex_id("v1").unwrap(), g.vertex_id("v2").unwrap()]);
        assert_eq!(induce_sequences(&g, &two).unwrap().count(), 6);

        // Singleton databases along the path leave a single sequence.
        let singletons = Path::new(vec![g.vertex_id("v3").unwrap(), g.vertex_id("v6").unwrap()]);
        let only: Vec<_> = induce_sequences(&g, &singletons).unwrap().collect();
        assert_eq!(only.len(), 1);
        assert_eq!(only[0].choices, vec![0, 0]);
    }

    #[test]
    fn exact_frequencies_on_fig1() {
        let g = fig1();
        let f = |shape: &[&[&str]]| {
            let sets: Vec<Vec<&str>> = shape.iter().map(|s| s.to_vec()).collect();
            exact_frequency(&g, 3, &Pattern::from_names(&g, &sets).unwrap()).unwrap()
        };
        assert_eq!(
            f(&[&["i1"], &["i3"], &["i3"], &["i1", "i4"]]),
            Ratio::new(12, 12)
        );
        assert_eq!(f(&[&["i3"], &["i3"], &["i3"], &["i1"]]), Ratio::new(8, 12));
        assert_eq!(f(&[&["zzz"], &["i3"], &["i3"], &["i1"]]), Ratio::new(0, 12));
    }

    #[test]
    fn no_paths_is_an_error_for_frequency() {
        let g = fig1();
        let p = Pattern::from_names(&g, &vec![vec!["i1"]; 5]).unwrap();
        assert!(matches!(
            exact_frequency(&g, 4, &p),
            Err(Error::NoPath { l: 4 })
        ));
    }

    #[test]
    fn path_stats_on_fig1() {
        let g = fig1();
        let t3 = path_stats(&g, 3).unwrap();
        assert_eq!(t3.path_count, 1);
        assert_eq!(t3.total_sequence_weight, 12);
        let t2 = path_stats(&g, 2).unwrap();
        assert_eq!(t2.path_count, 4);
        assert_eq!(t2.total_sequence_weight, 12 + 6 + 3 + 4);
    }
}
