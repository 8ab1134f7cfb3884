//! Database graphs: directed graphs whose vertices carry transaction databases.
//!
//! Vertices and items are interned to dense integer ids at construction time;
//! the external string names survive only in the id tables. All structures are
//! immutable after construction and safe to share across threads.

mod io;
mod weights;

pub use io::{load_graph, write_graph};
pub use weights::{compute_weights, WeightMode, WeightTable};

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};

/// Dense vertex id, valid only within the graph that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

/// Dense item id. Ids at or above the graph's item count never match any
/// transaction; they are used for items named in a pattern but absent from
/// the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(pub u32);

impl ItemId {
    /// Sentinel for an item name that does not occur in the graph.
    pub const UNKNOWN: ItemId = ItemId(u32::MAX);
}

/// An identified itemset. `items` is strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    pub tid: u32,
    pub items: Vec<ItemId>,
}

impl Transaction {
    /// True iff every id in `itemset` occurs in this transaction.
    /// Both sides must be sorted; this is a single merge scan.
    pub fn contains_itemset(&self, itemset: &[ItemId]) -> bool {
        itemset_subset(itemset, &self.items)
    }
}

/// `needle ⊆ haystack` for sorted id slices.
pub(crate) fn itemset_subset(needle: &[ItemId], haystack: &[ItemId]) -> bool {
    let mut hay = haystack.iter();
    'outer: for want in needle {
        for have in hay.by_ref() {
            match have.cmp(want) {
                std::cmp::Ordering::Less => continue,
                std::cmp::Ordering::Equal => continue 'outer,
                std::cmp::Ordering::Greater => return false,
            }
        }
        return false;
    }
    true
}

/// The multiset of transactions attached to one vertex. Never empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionDatabase {
    pub transactions: Vec<Transaction>,
}

impl TransactionDatabase {
    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    /// Number of transactions containing `itemset`.
    pub fn count_containing(&self, itemset: &[ItemId]) -> u128 {
        self.transactions
            .iter()
            .filter(|t| t.contains_itemset(itemset))
            .count() as u128
    }
}

/// A directed graph where every vertex owns a non-empty transaction database.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatabaseGraph {
    vertex_names: Vec<String>,
    vertex_index: HashMap<String, VertexId>,
    databases: Vec<TransactionDatabase>,
    out_edges: Vec<Vec<VertexId>>,
    item_names: Vec<String>,
    item_index: HashMap<String, ItemId>,
}

impl DatabaseGraph {
    /// Builds and validates a graph from externally named parts.
    ///
    /// Item ids are assigned densely in first-appearance order (vertices in
    /// declaration order, transactions in database order, items left to
    /// right); duplicate names within one itemset collapse. Adjacency lists
    /// are sorted by target id. Item names may not contain the pattern text
    /// delimiters `(`, `)`, `,`.
    pub fn from_parts<V, E, S, T>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator<Item = (S, Vec<Vec<T>>)>,
        E: IntoIterator<Item = (S, S)>,
        S: Into<String>,
        T: AsRef<str>,
    {
        let mut vertex_names: Vec<String> = Vec::new();
        let mut vertex_index: HashMap<String, VertexId> = HashMap::new();
        let mut item_names: Vec<String> = Vec::new();
        let mut item_index: HashMap<String, ItemId> = HashMap::new();
        let mut databases: Vec<TransactionDatabase> = Vec::new();

        for (name, raw_db) in vertices {
            let name = name.into();
            let id = VertexId(vertex_names.len() as u32);
            match vertex_index.entry(name.clone()) {
                Entry::Occupied(_) => {
                    return Err(Error::Validation(format!("duplicate vertex id {name:?}")))
                }
                Entry::Vacant(slot) => {
                    slot.insert(id);
                }
            }
            if raw_db.is_empty() {
                return Err(Error::Validation(format!(
                    "vertex {name:?} has an empty transaction database"
                )));
            }
            let mut transactions = Vec::with_capacity(raw_db.len());
            for (tid, raw_items) in raw_db.into_iter().enumerate() {
                if raw_items.is_empty() {
                    return Err(Error::Validation(format!(
                        "transaction {tid} of vertex {name:?} has an empty itemset"
                    )));
                }
                let mut items: Vec<ItemId> = Vec::with_capacity(raw_items.len());
                for raw in &raw_items {
                    let raw = raw.as_ref();
                    // These characters delimit the pattern text form.
                    if raw.is_empty() || raw.contains(['(', ')', ',']) {
                        return Err(Error::Validation(format!(
                            "item name {raw:?} in vertex {name:?} is empty or contains '(', ')' or ','"
                        )));
                    }
                    let id = *item_index.entry(raw.to_string()).or_insert_with(|| {
                        let id = ItemId(item_names.len() as u32);
                        item_names.push(raw.to_string());
                        id
                    });
                    items.push(id);
                }
                items.sort_unstable();
                items.dedup();
                transactions.push(Transaction {
                    tid: tid as u32,
                    items,
                });
            }
            vertex_names.push(name);
            databases.push(TransactionDatabase { transactions });
        }

        let mut out_edges: Vec<Vec<VertexId>> = vec![Vec::new(); vertex_names.len()];
        let mut seen = std::collections::HashSet::new();
        for (src, dst) in edges {
            let (src, dst) = (src.into(), dst.into());
            let &u = vertex_index.get(&src).ok_or_else(|| {
                Error::Validation(format!("edge endpoint {src:?} is not a declared vertex"))
            })?;
            let &v = vertex_index.get(&dst).ok_or_else(|| {
                Error::Validation(format!("edge endpoint {dst:?} is not a declared vertex"))
            })?;
            if u == v {
                return Err(Error::Validation(format!("self-loop on vertex {src:?}")));
            }
            if !seen.insert((u, v)) {
                return Err(Error::Validation(format!(
                    "duplicate edge [{src:?}, {dst:?}]"
                )));
            }
            out_edges[u.0 as usize].push(v);
        }
        for targets in &mut out_edges {
            targets.sort_unstable();
        }

        Ok(DatabaseGraph {
            vertex_names,
            vertex_index,
            databases,
            out_edges,
            item_names,
            item_index,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    /// Size of the item universe I (distinct items across all databases).
    pub fn item_count(&self) -> usize {
        self.item_names.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_names.len() as u32).map(VertexId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.0 as usize]
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.vertex_index.get(name).copied()
    }

    pub fn item_name(&self, item: ItemId) -> &str {
        self.item_names
            .get(item.0 as usize)
            .map(String::as_str)
            .unwrap_or("?")
    }

    pub fn item_id(&self, name: &str) -> Option<ItemId> {
        self.item_index.get(name).copied()
    }

    /// Out-neighbors of `v`, sorted by id.
    pub fn out(&self, v: VertexId) -> &[VertexId] {
        &self.out_edges[v.0 as usize]
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out_edges[v.0 as usize].len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_edges.iter().map(Vec::len).sum()
    }

    pub fn database(&self, v: VertexId) -> &TransactionDatabase {
        &self.databases[v.0 as usize]
    }

    /// C = max_v |T_v|, the largest per-vertex database.
    pub fn max_db_size(&self) -> usize {
        self.databases
            .iter()
            .map(TransactionDatabase::len)
            .max()
            .unwrap_or(0)
    }

    pub fn total_transactions(&self) -> usize {
        self.databases.iter().map(TransactionDatabase::len).sum()
    }

    /// Length of the shortest directed path from `u` to `v`; `None` when `v`
    /// is unreachable from `u`.
    pub fn distance(&self, u: VertexId, v: VertexId) -> Option<usize> {
        if u == v {
            return Some(0);
        }
        let mut dist = vec![usize::MAX; self.vertex_count()];
        dist[u.0 as usize] = 0;
        let mut queue = VecDeque::from([u]);
        while let Some(cur) = queue.pop_front() {
            let d = dist[cur.0 as usize];
            for &next in self.out(cur) {
                if dist[next.0 as usize] == usize::MAX {
                    if next == v {
                        return Some(d + 1);
                    }
                    dist[next.0 as usize] = d + 1;
                    queue.push_back(next);
                }
            }
        }
        None
    }

    /// N_l(v): all vertices within distance `l` of `v`, excluding `v` itself,
    /// sorted by id.
    pub fn l_neighborhood(&self, v: VertexId, l: usize) -> Vec<VertexId> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        dist[v.0 as usize] = 0;
        let mut queue = VecDeque::from([v]);
        let mut found = Vec::new();
        while let Some(cur) = queue.pop_front() {
            let d = dist[cur.0 as usize];
            if d == l {
                continue;
            }
            for &next in self.out(cur) {
                if dist[next.0 as usize] == usize::MAX {
                    dist[next.0 as usize] = d + 1;
                    found.push(next);
                    queue.push_back(next);
                }
            }
        }
        found.sort_unstable();
        found
    }

    /// Checks that `path` is a simple directed path of this graph.
    pub fn validate_path(&self, path: &Path) -> Result<()> {
        let vs = path.vertices();
        if vs.len() < 2 {
            return Err(Error::Precondition(
                "a path needs at least two vertices".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for v in vs {
            if v.0 as usize >= self.vertex_count() {
                return Err(Error::Precondition(format!(
                    "vertex id {} out of range",
                    v.0
                )));
            }
            if !seen.insert(*v) {
                return Err(Error::Precondition(format!(
                    "path repeats vertex {:?}",
                    self.vertex_name(*v)
                )));
            }
        }
        for pair in vs.windows(2) {
            if self.out(pair[0]).binary_search(&pair[1]).is_err() {
                return Err(Error::Precondition(format!(
                    "no edge {:?} -> {:?}",
                    self.vertex_name(pair[0]),
                    self.vertex_name(pair[1])
                )));
            }
        }
        Ok(())
    }
}

/// A simple directed path: l+1 distinct vertices joined by edges.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    vertices: Vec<VertexId>,
}

impl Path {
    pub fn new(vertices: Vec<VertexId>) -> Self {
        Path { vertices }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    /// Number of edges, one less than the number of vertices.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn names<'g>(&self, graph: &'g DatabaseGraph) -> Vec<&'g str> {
        self.vertices
            .iter()
            .map(|&v| graph.vertex_name(v))
            .collect()
    }

    /// M = product of database sizes along the path: how many transaction
    /// sequences the path supports.
    pub fn sequence_count(&self, graph: &DatabaseGraph) -> u128 {
        self.vertices
            .iter()
            .map(|&v| graph.database(v).len() as u128)
            .product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const FIG1_JSON: &str = include_str!("../../tests/data/fig1.json");

    fn fig1() -> DatabaseGraph {
        load_graph(FIG1_JSON.as_bytes()).unwrap()
    }

    #[test]
    fn fig1_shape() {
        let g = fig1();
        assert_eq!(g.vertex_count(), 7);
        assert_eq!(g.edge_count(), 6);
        assert_eq!(g.item_count(), 4);
        let v1 = g.vertex_id("v1").unwrap();
        assert_eq!(g.database(v1).len(), 3);
        assert_eq!(g.max_db_size(), 3);
    }

    #[test]
    fn rejects_self_loop() {
        let err = DatabaseGraph::from_parts(
            vec![("v1".to_string(), vec![vec!["a".to_string()]])],
            vec![("v1".to_string(), "v1".to_string())],
        )
        .unwrap_err();
        assert!(err.to_string().contains("v1"), "{err}");
        assert!(err.to_string().contains("self-loop"), "{err}");
    }

    #[test]
    fn rejects_empty_database() {
        let err = DatabaseGraph::from_parts(
            vec![("v1".to_string(), Vec::<Vec<String>>::new())],
            Vec::<(String, String)>::new(),
        )
        .unwrap_err();
        assert!(
            err.to_string().contains("empty transaction database"),
            "{err}"
        );
    }

    #[test]
    fn rejects_item_names_that_break_the_pattern_text_form() {
        for bad in ["a,b", "(a", "b)", ""] {
            let err = DatabaseGraph::from_parts(
                vec![("v1".to_string(), vec![vec![bad.to_string()]])],
                Vec::<(String, String)>::new(),
            )
            .unwrap_err();
            assert!(err.to_string().contains("item name"), "{bad:?}: {err}");
        }
    }

    #[test]
    fn rejects_duplicate_edge_and_unknown_endpoint() {
        let vs = || {
            vec![
                ("a".to_string(), vec![vec!["x".to_string()]]),
                ("b".to_string(), vec![vec!["x".to_string()]]),
            ]
        };
        let err = DatabaseGraph::from_parts(
            vs(),
            vec![
                ("a".to_string(), "b".to_string()),
                ("a".to_string(), "b".to_string()),
            ],
        )
        .unwrap_err();
        assert!(err.to_string().contains("duplicate edge"), "{err}");

        let err =
            DatabaseGraph::from_parts(vs(), vec![("a".to_string(), "c".to_string())]).unwrap_err();
        assert!(err.to_string().contains("\"c\""), "{err}");
    }

    #[test]
    fn distances_on_fig1() {
        let g = fig1();
        let id = |n: &str| g.vertex_id(n).unwrap();
        assert_eq!(g.distance(id("v1"), id("v7")), Some(3));
        assert_eq!(g.distance(id("v1"), id("v1")), Some(0));
        assert_eq!(g.distance(id("v7"), id("v1")), None);
    }

    #[test]
    fn neighborhoods_on_fig1() {
        let g = fig1();
        let id = |n: &str| g.vertex_id(n).unwrap();
        let names = |vs: Vec<VertexId>| {
            vs.into_iter()
                .map(|v| g.vertex_name(v).to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(names(g.l_neighborhood(id("v1"), 1)), vec!["v2", "v3"]);
        assert_eq!(
            names(g.l_neighborhood(id("v1"), 2)),
            vec!["v2", "v3", "v4", "v5", "v6"]
        );
        assert_eq!(
            names(g.l_neighborhood(id("v1"), 3)),
            vec!["v2", "v3", "v4", "v5", "v6", "v7"]
        );
    }

    #[test]
    fn subset_scan() {
        let hay: Vec<ItemId> = [0u32, 2, 5, 9].into_iter().map(ItemId).collect();
        assert!(itemset_subset(&[ItemId(2), ItemId(9)], &hay));
        assert!(itemset_subset(&[], &hay));
        assert!(!itemset_subset(&[ItemId(3)], &hay));
        assert!(!itemset_subset(&[ItemId(0), ItemId(10)], &hay));
    }
}
