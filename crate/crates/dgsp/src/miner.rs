//! Positional pattern mining by depth-first pattern growth.
//!
//! A pattern is one non-empty itemset per path position; a record contains a
//! pattern when every positional itemset is a subset of the transaction at
//! that position. Patterns are ranked by weighted support: the sum of record
//! weights over containing records. For sampled records weighted by M^i the
//! weighted support is the numerator of the unbiased frequency estimator, so
//! ranking by it and ranking by estimated frequency give the same order (the
//! denominator does not depend on the pattern).
//!
//! Two record representations share the search and top-k machinery:
//! [`WeightedRecord`] holds one materialized transaction sequence per record
//! (sampled batches), while [`ProductRecord`] holds the per-position
//! transaction lists of one path and stands for its entire induced Cartesian
//! product (exact mining).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{itemset_subset, DatabaseGraph, ItemId};
use crate::sampler::SampleBatch;

/// An ordered list of non-empty itemsets, one per path position.
/// Itemsets are sorted and duplicate-free; the derived ordering (positional,
/// then lexicographic over sorted id lists) is the canonical tie-break order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    itemsets: Vec<Vec<ItemId>>,
}

impl Pattern {
    /// Normalizes (sorts, dedups) each positional itemset. Every position
    /// must be non-empty.
    pub fn new(mut itemsets: Vec<Vec<ItemId>>) -> Result<Self> {
        if itemsets.is_empty() {
            return Err(Error::Precondition("pattern has no positions".into()));
        }
        for set in &mut itemsets {
            set.sort_unstable();
            set.dedup();
            if set.is_empty() {
                return Err(Error::Precondition(
                    "every positional itemset must be non-empty".into(),
                ));
            }
        }
        Ok(Pattern { itemsets })
    }

    /// Builds a pattern from item names. Names absent from the graph map to
    /// a reserved id that matches no transaction, so such patterns simply
    /// have frequency zero.
    pub fn from_names<S: AsRef<str>>(graph: &DatabaseGraph, itemsets: &[Vec<S>]) -> Result<Self> {
        Pattern::new(
            itemsets
                .iter()
                .map(|set| {
                    set.iter()
                        .map(|name| graph.item_id(name.as_ref()).unwrap_or(ItemId::UNKNOWN))
                        .collect()
                })
                .collect(),
        )
    }

    /// Number of positions, one more than the pattern length.
    pub fn positions(&self) -> usize {
        self.itemsets.len()
    }

    pub fn itemsets(&self) -> &[Vec<ItemId>] {
        &self.itemsets
    }

    /// Text form: itemsets in parentheses, items comma-separated, positions
    /// concatenated, e.g. `(i1)(i3)(i3)(i1,i4)`.
    pub fn to_text(&self, graph: &DatabaseGraph) -> String {
        let mut out = String::new();
        for set in &self.itemsets {
            out.push('(');
            for (i, item) in set.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(graph.item_name(*item));
            }
            out.push(')');
        }
        out
    }
}

/// True iff `X_q ⊆ T_q` at every position. Lengths must match.
pub fn contains(sequence: &[&[ItemId]], pattern: &Pattern) -> bool {
    assert_eq!(
        sequence.len(),
        pattern.positions(),
        "sequence and pattern must have the same number of positions"
    );
    sequence
        .iter()
        .zip(pattern.itemsets())
        .all(|(transaction, itemset)| itemset_subset(itemset, transaction))
}

/// One mining input record: materialized itemsets per position plus a weight
/// (M^i for sampled records, a multiplicity for exact mining).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedRecord {
    pub positions: Vec<Vec<ItemId>>,
    pub weight: u128,
}

/// Merges records with identical itemset sequences, summing weights.
pub fn merge_records(records: Vec<WeightedRecord>) -> Vec<WeightedRecord> {
    let mut merged: HashMap<Vec<Vec<ItemId>>, u128> = HashMap::new();
    for rec in records {
        *merged.entry(rec.positions).or_insert(0) += rec.weight;
    }
    let mut out: Vec<WeightedRecord> = merged
        .into_iter()
        .map(|(positions, weight)| WeightedRecord { positions, weight })
        .collect();
    out.sort_unstable_by(|a, b| a.positions.cmp(&b.positions));
    out
}

#[derive(Debug, Clone)]
pub struct MinerOptions {
    /// Cut search branches whose weighted support cannot reach the current
    /// k-th best. Disabling is only useful for cross-checking.
    pub prune: bool,
    /// Optional cap on per-position itemset width.
    pub max_itemset_width: Option<usize>,
}

impl Default for MinerOptions {
    fn default() -> Self {
        MinerOptions {
            prune: true,
            max_itemset_width: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScoreKind {
    #[serde(rename = "exact-frequency")]
    ExactFrequency,
    #[serde(rename = "estimated-frequency")]
    EstimatedFrequency,
    #[serde(rename = "weighted-support")]
    WeightedSupport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntry {
    /// 1-based, consecutive.
    pub rank: u32,
    pub pattern: Pattern,
    /// Weighted support (exact mining: number of containing records).
    pub support: u128,
    /// support / total weight: exact frequency for exact mining, the ratio
    /// frequency estimate for sampled mining.
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedPatterns {
    pub score_kind: ScoreKind,
    /// Pattern length l (positions - 1).
    pub length: usize,
    pub entries: Vec<RankedEntry>,
}

impl RankedPatterns {
    pub fn patterns(&self) -> impl Iterator<Item = &Pattern> {
        self.entries.iter().map(|e| &e.pattern)
    }
}

/// Serialized row shared by the JSON and CSV outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PatternRow {
    pub rank: u32,
    pub pattern: String,
    pub support: u128,
    pub freq: f64,
}

impl RankedPatterns {
    pub fn to_rows(&self, graph: &DatabaseGraph) -> Vec<PatternRow> {
        self.entries
            .iter()
            .map(|e| PatternRow {
                rank: e.rank,
                pattern: e.pattern.to_text(graph),
                support: e.support,
                freq: e.frequency,
            })
            .collect()
    }
}

/// Parses the pattern text form back into itemsets of item names.
pub fn parse_pattern_text(text: &str) -> Result<Vec<Vec<String>>> {
    let mut itemsets = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let Some(stripped) = rest.strip_prefix('(') else {
            return Err(Error::Parse(format!("expected '(' in pattern {text:?}")));
        };
        let Some(close) = stripped.find(')') else {
            return Err(Error::Parse(format!("unclosed '(' in pattern {text:?}")));
        };
        let body = &stripped[..close];
        let items: Vec<String> = body
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        if items.is_empty() {
            return Err(Error::Parse(format!("empty itemset in pattern {text:?}")));
        }
        itemsets.push(items);
        rest = &stripped[close + 1..];
    }
    if itemsets.is_empty() {
        return Err(Error::Parse(format!("empty pattern {text:?}")));
    }
    Ok(itemsets)
}

/// Worst-kept-first ordering for the running top-k heap: lower support is
/// worse; at equal support the canonically larger pattern is worse.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Kept {
    support: u128,
    pattern: Pattern,
}

impl Ord for Kept {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .support
            .cmp(&self.support)
            .then_with(|| self.pattern.cmp(&other.pattern))
    }
}

impl PartialOrd for Kept {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Running top-k selection shared by both search engines. Prunes against the
/// current k-th best when enabled; equal supports are kept so boundary ties
/// resolve by canonical order, never by visit order.
struct TopK {
    k: usize,
    prune: bool,
    heap: BinaryHeap<Kept>,
}

impl TopK {
    fn new(k: usize, prune: bool) -> Self {
        TopK {
            k,
            prune,
            heap: BinaryHeap::new(),
        }
    }

    fn admissible(&self, support: u128) -> bool {
        if support == 0 {
            return false;
        }
        if !self.prune || self.heap.len() < self.k {
            return true;
        }
        support >= self.heap.peek().map_or(0, |kept| kept.support)
    }

    fn offer(&mut self, itemsets: &[Vec<ItemId>], support: u128) {
        self.heap.push(Kept {
            support,
            pattern: Pattern {
                itemsets: itemsets.to_vec(),
            },
        });
        if self.heap.len() > self.k {
            self.heap.pop();
        }
    }

    fn into_sorted(self) -> Vec<(Pattern, u128)> {
        let mut found: Vec<(Pattern, u128)> = self
            .heap
            .into_iter()
            .map(|kept| (kept.pattern, kept.support))
            .collect();
        found.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        found
    }
}

struct Growth<'a> {
    records: &'a [WeightedRecord],
    positions: usize,
    opts: &'a MinerOptions,
    top: TopK,
}

impl<'a> Growth<'a> {
    /// Weighted support per candidate item at `pos` over the projected
    /// records, restricted to items greater than `min_item` when extending
    /// the current itemset. BTreeMap keeps candidate order deterministic.
    fn candidate_weights(
        &self,
        proj: &[u32],
        pos: usize,
        min_item: Option<ItemId>,
    ) -> BTreeMap<ItemId, u128> {
        let mut weights = BTreeMap::new();
        for &idx in proj {
            let rec = &self.records[idx as usize];
            let items = &rec.positions[pos];
            let start = match min_item {
                Some(min) => items.partition_point(|&i| i <= min),
                None => 0,
            };
            for &item in &items[start..] {
                *weights.entry(item).or_insert(0) += rec.weight;
            }
        }
        weights
    }

    fn filter_proj(&self, proj: &[u32], pos: usize, item: ItemId) -> Vec<u32> {
        proj.iter()
            .copied()
            .filter(|&idx| {
                self.records[idx as usize].positions[pos]
                    .binary_search(&item)
                    .is_ok()
            })
            .collect()
    }

    fn grow(&mut self, itemsets: &mut Vec<Vec<ItemId>>, pos: usize, proj: Vec<u32>, support: u128) {
        if pos + 1 == self.positions {
            self.top.offer(itemsets, support);
        }

        let width_ok = self
            .opts
            .max_itemset_width
            .is_none_or(|cap| itemsets[pos].len() < cap);
        if width_ok {
            let last = *itemsets[pos].last().expect("current itemset non-empty");
            for (item, weight) in self.candidate_weights(&proj, pos, Some(last)) {
                if !self.top.admissible(weight) {
                    continue;
                }
                let child = self.filter_proj(&proj, pos, item);
                itemsets[pos].push(item);
                self.grow(itemsets, pos, child, weight);
                itemsets[pos].pop();
            }
        }

        if pos + 1 < self.positions {
            for (item, weight) in self.candidate_weights(&proj, pos + 1, None) {
                if !self.top.admissible(weight) {
                    continue;
                }
                let child = self.filter_proj(&proj, pos + 1, item);
                itemsets.push(vec![item]);
                self.grow(itemsets, pos + 1, child, weight);
                itemsets.pop();
            }
        }
    }
}

/// Depth-first positional pattern growth over merged weighted records.
/// Returns at most k `(pattern, weighted support)` pairs sorted by support
/// descending, ties broken by canonical pattern order.
pub fn mine_topk_records(
    records: &[WeightedRecord],
    positions: usize,
    k: usize,
    opts: &MinerOptions,
) -> Vec<(Pattern, u128)> {
    if records.is_empty() || k == 0 {
        return Vec::new();
    }
    debug_assert!(records.iter().all(|r| r.positions.len() == positions));

    let mut growth = Growth {
        records,
        positions,
        opts,
        top: TopK::new(k, opts.prune),
    };
    let all: Vec<u32> = (0..records.len() as u32).collect();
    let mut itemsets: Vec<Vec<ItemId>> = Vec::with_capacity(positions);
    for (item, weight) in growth.candidate_weights(&all, 0, None) {
        if !growth.top.admissible(weight) {
            continue;
        }
        let child = growth.filter_proj(&all, 0, item);
        itemsets.push(vec![item]);
        growth.grow(&mut itemsets, 0, child, weight);
        itemsets.pop();
    }
    growth.top.into_sorted()
}

/// A mining input record in factorized form: the transactions available at
/// each position of one path. It stands for the full Cartesian product of
/// transaction choices along the path — M = Π_q |T_q| induced sequences —
/// without materializing any of them.
#[derive(Debug, Clone)]
pub struct ProductRecord {
    /// `positions[q]` holds the sorted itemsets of the q-th vertex's
    /// transactions.
    pub positions: Vec<Vec<Vec<ItemId>>>,
}

impl ProductRecord {
    /// Number of induced sequences.
    pub fn weight(&self) -> u128 {
        self.positions.iter().map(|txs| txs.len() as u128).product()
    }
}

/// Projection entry for the product engine: per record, the product of
/// matching-transaction counts over already-closed positions and the
/// transaction indices at the current position that contain the current
/// itemset. A record's contribution to the support of any completion of the
/// prefix is `closed · |matched| · (sizes of the open tail)`.
struct ProductEntry {
    record: u32,
    closed: u128,
    matched: Vec<u32>,
}

struct ProductGrowth<'a> {
    records: &'a [ProductRecord],
    /// `tail[r][q]` = Π_{p ≥ q} |T_p| of record r; `tail[r][positions]` = 1.
    tail: Vec<Vec<u128>>,
    positions: usize,
    opts: &'a MinerOptions,
    top: TopK,
}

impl<'a> ProductGrowth<'a> {
    /// Support of extending the current itemset with each candidate item:
    /// Σ closed · |matched containing item| · tail.
    fn extend_weights(
        &self,
        proj: &[ProductEntry],
        pos: usize,
        min_item: ItemId,
    ) -> BTreeMap<ItemId, u128> {
        let mut weights = BTreeMap::new();
        for entry in proj {
            let rec = &self.records[entry.record as usize];
            let unit = entry.closed * self.tail[entry.record as usize][pos + 1];
            for &tx in &entry.matched {
                let items = &rec.positions[pos][tx as usize];
                let start = items.partition_point(|&i| i <= min_item);
                for &item in &items[start..] {
                    *weights.entry(item).or_insert(0) += unit;
                }
            }
        }
        weights
    }

    /// Support of opening the next position with each candidate item:
    /// Σ closed · |matched| · |T_{pos+1} containing item| · tail.
    fn open_weights(&self, proj: &[ProductEntry], next: usize) -> BTreeMap<ItemId, u128> {
        let mut weights = BTreeMap::new();
        for entry in proj {
            let rec = &self.records[entry.record as usize];
            let unit = entry.closed
                * entry.matched.len() as u128
                * self.tail[entry.record as usize][next + 1];
            for items in &rec.positions[next] {
                for &item in items {
                    *weights.entry(item).or_insert(0) += unit;
                }
            }
        }
        weights
    }

    fn extend_proj(&self, proj: &[ProductEntry], pos: usize, item: ItemId) -> Vec<ProductEntry> {
        proj.iter()
            .filter_map(|entry| {
                let rec = &self.records[entry.record as usize];
                let matched: Vec<u32> = entry
                    .matched
                    .iter()
                    .copied()
                    .filter(|&tx| rec.positions[pos][tx as usize].binary_search(&item).is_ok())
                    .collect();
                (!matched.is_empty()).then_some(ProductEntry {
                    record: entry.record,
                    closed: entry.closed,
                    matched,
                })
            })
            .collect()
    }

    fn open_proj(&self, proj: &[ProductEntry], next: usize, item: ItemId) -> Vec<ProductEntry> {
        proj.iter()
            .filter_map(|entry| {
                let rec = &self.records[entry.record as usize];
                let matched: Vec<u32> = (0..rec.positions[next].len() as u32)
                    .filter(|&tx| {
                        rec.positions[next][tx as usize]
                            .binary_search(&item)
                            .is_ok()
                    })
                    .collect();
                (!matched.is_empty()).then_some(ProductEntry {
                    record: entry.record,
                    closed: entry.closed * entry.matched.len() as u128,
                    matched,
                })
            })
            .collect()
    }

    fn grow(
        &mut self,
        itemsets: &mut Vec<Vec<ItemId>>,
        pos: usize,
        proj: Vec<ProductEntry>,
        support: u128,
    ) {
        if pos + 1 == self.positions {
            self.top.offer(itemsets, support);
        }

        let width_ok = self
            .opts
            .max_itemset_width
            .is_none_or(|cap| itemsets[pos].len() < cap);
        if width_ok {
            let last = *itemsets[pos].last().expect("current itemset non-empty");
            for (item, weight) in self.extend_weights(&proj, pos, last) {
                if !self.top.admissible(weight) {
                    continue;
                }
                let child = self.extend_proj(&proj, pos, item);
                itemsets[pos].push(item);
                self.grow(itemsets, pos, child, weight);
                itemsets[pos].pop();
            }
        }

        if pos + 1 < self.positions {
            for (item, weight) in self.open_weights(&proj, pos + 1) {
                if !self.top.admissible(weight) {
                    continue;
                }
                let child = self.open_proj(&proj, pos + 1, item);
                itemsets.push(vec![item]);
                self.grow(itemsets, pos + 1, child, weight);
                itemsets.pop();
            }
        }
    }
}

/// Pattern growth over factorized records. Supports are exact counts over the
/// induced sequence multiset, computed as Σ_records Π_q (matching
/// transactions at q), so the full product never has to exist in memory.
pub fn mine_topk_product(
    records: &[ProductRecord],
    positions: usize,
    k: usize,
    opts: &MinerOptions,
) -> Vec<(Pattern, u128)> {
    if records.is_empty() || k == 0 {
        return Vec::new();
    }
    debug_assert!(records.iter().all(|r| r.positions.len() == positions));

    let tail: Vec<Vec<u128>> = records
        .iter()
        .map(|rec| {
            let mut tail = vec![1u128; positions + 1];
            for q in (0..positions).rev() {
                tail[q] = tail[q + 1] * rec.positions[q].len() as u128;
            }
            tail
        })
        .collect();

    let mut growth = ProductGrowth {
        records,
        tail,
        positions,
        opts,
        top: TopK::new(k, opts.prune),
    };

    // Root candidates: no closed positions yet, so a record contributes
    // tail[1] per transaction at position 0 containing the item.
    let mut roots: BTreeMap<ItemId, u128> = BTreeMap::new();
    for (r, rec) in records.iter().enumerate() {
        let unit = growth.tail[r][1];
        for items in &rec.positions[0] {
            for &item in items {
                *roots.entry(item).or_insert(0) += unit;
            }
        }
    }
    let mut itemsets: Vec<Vec<ItemId>> = Vec::with_capacity(positions);
    for (item, weight) in roots {
        if !growth.top.admissible(weight) {
            continue;
        }
        let child: Vec<ProductEntry> = records
            .iter()
            .enumerate()
            .filter_map(|(r, rec)| {
                let matched: Vec<u32> = (0..rec.positions[0].len() as u32)
                    .filter(|&tx| rec.positions[0][tx as usize].binary_search(&item).is_ok())
                    .collect();
                (!matched.is_empty()).then_some(ProductEntry {
                    record: r as u32,
                    closed: 1,
                    matched,
                })
            })
            .collect();
        itemsets.push(vec![item]);
        growth.grow(&mut itemsets, 0, child, weight);
        itemsets.pop();
    }
    growth.top.into_sorted()
}

/// Ranks merged records and attaches `support / total_weight` frequencies.
pub(crate) fn rank_records(
    records: Vec<WeightedRecord>,
    positions: usize,
    k: usize,
    opts: &MinerOptions,
    score_kind: ScoreKind,
) -> RankedPatterns {
    let records = merge_records(records);
    let total_weight: u128 = records.iter().map(|r| r.weight).sum();
    let entries = mine_topk_records(&records, positions, k, opts)
        .into_iter()
        .enumerate()
        .map(|(i, (pattern, support))| RankedEntry {
            rank: (i + 1) as u32,
            pattern,
            support,
            frequency: support as f64 / total_weight as f64,
        })
        .collect();
    RankedPatterns {
        score_kind,
        length: positions - 1,
        entries,
    }
}

/// Top-k patterns of a sample batch by weighted support Σ M^i.
pub fn mine_topk(
    graph: &DatabaseGraph,
    batch: &SampleBatch,
    k: usize,
    opts: &MinerOptions,
) -> Result<RankedPatterns> {
    if batch.records.is_empty() {
        return Err(Error::Precondition("sample batch is empty".into()));
    }
    if k == 0 {
        return Err(Error::Precondition("k must be >= 1".into()));
    }
    Ok(rank_records(
        batch.to_weighted_records(graph),
        batch.l + 1,
        k,
        opts,
        ScoreKind::WeightedSupport,
    ))
}

/// Aggregated batch state behind the frequency estimator: the batch total
/// weight, the batch size, and merged records for accumulator queries.
#[derive(Debug, Clone)]
pub struct EstimatorState {
    total_weight: u128,
    batch_size: usize,
    records: Vec<WeightedRecord>,
}

impl EstimatorState {
    pub fn from_batch(graph: &DatabaseGraph, batch: &SampleBatch) -> Self {
        let records = merge_records(batch.to_weighted_records(graph));
        EstimatorState {
            total_weight: records.iter().map(|r| r.weight).sum(),
            batch_size: batch.records.len(),
            records,
        }
    }

    pub fn total_weight(&self) -> u128 {
        self.total_weight
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    /// Σ M^i over records containing `pattern` (the estimator numerator).
    pub fn accumulator(&self, pattern: &Pattern) -> u128 {
        self.records
            .iter()
            .filter(|rec| {
                rec.positions
                    .iter()
                    .zip(pattern.itemsets())
                    .all(|(t, x)| itemset_subset(x, t))
            })
            .map(|rec| rec.weight)
            .sum()
    }
}

/// Exact whole-graph totals, available on small graphs via path enumeration.
#[derive(Debug, Clone, Copy)]
pub struct ExactTotals {
    /// |P_l|: number of length-l simple paths.
    pub path_count: u128,
    /// Σ_i M^i over all length-l paths (= |D_l|).
    pub total_sequence_weight: u128,
}

/// Pattern frequency estimate from a sample batch.
///
/// With exact totals this evaluates the unbiased estimator
/// `acc(s) / ((|S_l|/|P_l|) · Σ_i M^i)` directly; without them it returns the
/// consistent ratio estimate `acc(s) / Σ_sampled M^i`. Both assign every
/// pattern the same denominator, so rankings are unaffected by the choice.
/// The ratio form always lands in [0, 1]; the exact-totals form is unbiased
/// and may exceed 1 on batches that oversampled heavy paths.
pub fn estimate_frequency(
    state: &EstimatorState,
    pattern: &Pattern,
    exact: Option<ExactTotals>,
) -> f64 {
    assert!(state.batch_size >= 1, "estimator needs a non-empty batch");
    let acc = state.accumulator(pattern) as f64;
    match exact {
        Some(totals) => {
            let denom = state.batch_size as f64 / totals.path_count as f64
                * totals.total_sequence_weight as f64;
            acc / denom
        }
        None => acc / state.total_weight as f64,
    }
}
