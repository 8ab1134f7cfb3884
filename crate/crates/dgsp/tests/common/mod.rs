//! Shared test helpers: fixtures, brute-force oracles, and a chi-square
//! critical-value routine for goodness-of-fit checks. Everything here is
//! independent of the library's own algorithms.

#![allow(dead_code)]

use dgsp::baseline::{enumerate_paths, exact_frequency, induce_sequences};
use dgsp::graph::{load_graph, DatabaseGraph, ItemId, VertexId};
use dgsp::miner::Pattern;
use num_rational::Ratio;

pub const FIG1_JSON: &str = include_str!("../data/fig1.json");

pub fn fig1() -> DatabaseGraph {
    load_graph(FIG1_JSON.as_bytes()).unwrap()
}

/// A 5-vertex fixture with unequal database sizes, so path weights M^i vary.
pub fn varied_weights_graph() -> DatabaseGraph {
    DatabaseGraph::from_parts(
        vec![
            ("a", vec![vec!["x"], vec!["x", "y"]]),
            ("b", vec![vec!["y"]]),
            ("c", vec![vec!["x", "y"], vec!["y", "z"], vec!["z"]]),
            ("d", vec![vec!["x", "z"]]),
            ("e", vec![vec!["z"], vec!["y", "z"]]),
        ],
        vec![
            ("a", "b"),
            ("a", "c"),
            ("b", "c"),
            ("c", "d"),
            ("b", "d"),
            ("d", "e"),
        ],
    )
    .unwrap()
}

pub fn pattern(graph: &DatabaseGraph, shape: &[&[&str]]) -> Pattern {
    let sets: Vec<Vec<&str>> = shape.iter().map(|s| s.to_vec()).collect();
    Pattern::from_names(graph, &sets).unwrap()
}

/// Number of length-q directed walks from `v`, by direct recursion.
pub fn brute_walk_count(graph: &DatabaseGraph, v: VertexId, q: usize) -> u128 {
    if q == 0 {
        return 1;
    }
    graph
        .out(v)
        .iter()
        .map(|&u| brute_walk_count(graph, u, q - 1))
        .sum()
}

/// Number of length-q simple paths starting at `v`, by DFS.
pub fn brute_simple_path_count(graph: &DatabaseGraph, v: VertexId, q: usize) -> u128 {
    fn dfs(graph: &DatabaseGraph, v: VertexId, left: usize, on_path: &mut Vec<bool>) -> u128 {
        if left == 0 {
            return 1;
        }
        let mut total = 0;
        for &u in graph.out(v) {
            if !on_path[u.0 as usize] {
                on_path[u.0 as usize] = true;
                total += dfs(graph, u, left - 1, on_path);
                on_path[u.0 as usize] = false;
            }
        }
        total
    }
    let mut on_path = vec![false; graph.vertex_count()];
    on_path[v.0 as usize] = true;
    dfs(graph, v, q, &mut on_path)
}

/// All non-empty subsets of `items`, as sorted id lists.
fn subsets(items: &[ItemId]) -> Vec<Vec<ItemId>> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << items.len()) {
        let set: Vec<ItemId> = items
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &item)| item)
            .collect();
        out.push(set);
    }
    out
}

/// Exhaustive top-k oracle: enumerate every pattern whose positional itemsets
/// are subsets of transactions observed at that path position, score each with
/// `exact_frequency`, and sort by (frequency desc, canonical pattern asc).
/// Only usable on tiny graphs.
pub fn naive_topk(graph: &DatabaseGraph, l: usize, k: usize) -> Vec<(Pattern, Ratio<u128>)> {
    let mut per_position: Vec<Vec<Vec<ItemId>>> = vec![Vec::new(); l + 1];
    for path in enumerate_paths(graph, l).unwrap() {
        for (q, &v) in path.vertices().iter().enumerate() {
            for transaction in &graph.database(v).transactions {
                for set in subsets(&transaction.items) {
                    if !per_position[q].contains(&set) {
                        per_position[q].push(set);
                    }
                }
            }
        }
    }
    let mut scored: Vec<(Pattern, Ratio<u128>)> = Vec::new();
    let mut cursor = vec![0usize; l + 1];
    'outer: loop {
        let itemsets: Vec<Vec<ItemId>> = cursor
            .iter()
            .enumerate()
            .map(|(q, &i)| per_position[q][i].clone())
            .collect();
        let p = Pattern::new(itemsets).unwrap();
        let f = exact_frequency(graph, l, &p).unwrap();
        if f > Ratio::new(0, 1) {
            scored.push((p, f));
        }
        for q in (0..=l).rev() {
            cursor[q] += 1;
            if cursor[q] < per_position[q].len() {
                continue 'outer;
            }
            cursor[q] = 0;
            if q == 0 {
                break 'outer;
            }
        }
    }
    scored.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored.truncate(k);
    scored
}

/// Frequency of `pattern` by full enumeration of D_l and per-record
/// containment checks (the slow route exact_frequency avoids).
pub fn enumerated_frequency(graph: &DatabaseGraph, l: usize, pattern: &Pattern) -> Ratio<u128> {
    let mut containing: u128 = 0;
    let mut total: u128 = 0;
    for path in enumerate_paths(graph, l).unwrap() {
        for seq in induce_sequences(graph, &path).unwrap() {
            total += 1;
            if seq.contains_pattern(graph, pattern) {
                containing += 1;
            }
        }
    }
    Ratio::new(containing, total)
}
