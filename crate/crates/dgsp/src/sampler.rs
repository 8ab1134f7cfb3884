//! Two-step sampling: draw a length-l path, then draw one transaction per
//! vertex of the path.
//!
//! Path sampling works backwards from continuation weights. In walk-count
//! mode the start vertex is drawn with probability w(v,l)/Σ_u w(u,l) and each
//! next vertex with probability w(u,q-1)/w(v,q), so a complete walk has
//! probability 1/#walks; walks that repeat a vertex are rejected and redrawn,
//! which leaves exactly the uniform distribution over simple length-l paths.
//! In distance-degree mode the same procedure runs on distance-based degree
//! counts with per-step renormalization; no uniformity is claimed there.
//!
//! Transaction choices are uniform and independent per position, so a sampled
//! record (path i, choices j) has marginal probability 1/(|P_l| · M^i) per
//! draw in walk-count mode. The M^i = Π_q |T_{v_q}| weight is recorded on each
//! sample for the estimator.
//!
//! Batches are deterministic in (graph, l, m, mode, seed) for any worker
//! count: record i draws from its own RNG substream, and workers only decide
//! which records they produce.

use std::io::{BufRead, Write};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::TransactionSequence;
use crate::error::{Error, Result};
use crate::graph::{compute_weights, DatabaseGraph, Path, VertexId, WeightMode, WeightTable};

pub const DEFAULT_REJECTION_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone)]
pub struct SamplerOptions {
    /// Consecutive rejected walks tolerated per record before giving up.
    pub rejection_budget: u64,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        SamplerOptions {
            rejection_budget: DEFAULT_REJECTION_BUDGET,
        }
    }
}

/// One sampled transaction sequence plus its path weight M^i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleRecord {
    pub sequence: TransactionSequence,
    pub path_weight: u128,
}

/// A batch of independently sampled records (sampling is with replacement).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleBatch {
    pub records: Vec<SampleRecord>,
    pub l: usize,
    pub seed: u64,
    pub weight_mode: WeightMode,
    /// Total rejected walks across the batch, a diagnostic for walk-dominated
    /// graphs.
    pub rejections: u64,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Σ M^i over the batch.
    pub fn total_weight(&self) -> u128 {
        self.records.iter().map(|r| r.path_weight).sum()
    }

    /// Materializes records for the miner.
    pub fn to_weighted_records(&self, graph: &DatabaseGraph) -> Vec<crate::miner::WeightedRecord> {
        self.records
            .iter()
            .map(|rec| crate::miner::WeightedRecord {
                positions: rec
                    .sequence
                    .itemsets(graph)
                    .into_iter()
                    .map(<[crate::graph::ItemId]>::to_vec)
                    .collect(),
                weight: rec.path_weight,
            })
            .collect()
    }
}

/// Reusable path sampler: start-vertex distribution is precomputed once.
pub struct PathSampler<'g> {
    graph: &'g DatabaseGraph,
    weights: &'g WeightTable,
    /// Cumulative start weights aligned with vertex ids.
    cumulative_start: Vec<u128>,
    start_total: u128,
    opts: SamplerOptions,
}

impl<'g> PathSampler<'g> {
    pub fn new(
        graph: &'g DatabaseGraph,
        weights: &'g WeightTable,
        opts: SamplerOptions,
    ) -> Result<Self> {
        let l = weights.path_length();
        let mut cumulative_start = Vec::with_capacity(graph.vertex_count());
        let mut acc: u128 = 0;
        for v in graph.vertex_ids() {
            acc += weights.weight(v, l);
            cumulative_start.push(acc);
        }
        if acc == 0 {
            return Err(Error::NoPath { l });
        }
        Ok(PathSampler {
            graph,
            weights,
            cumulative_start,
            start_total: acc,
            opts,
        })
    }

    fn draw_start<R: Rng>(&self, rng: &mut R) -> VertexId {
        let ticket = rng.random_range(0..self.start_total);
        let idx = self.cumulative_start.partition_point(|&c| c <= ticket);
        VertexId(idx as u32)
    }

    /// One attempted walk; `None` when it revisits a vertex or dead-ends.
    fn try_walk<R: Rng>(&self, rng: &mut R, visited: &mut [bool]) -> Option<Vec<VertexId>> {
        let l = self.weights.path_length();
        let mut walk = Vec::with_capacity(l + 1);
        visited.fill(false);

        let start = self.draw_start(rng);
        walk.push(start);
        visited[start.0 as usize] = true;

        let mut current = start;
        for step in 0..l {
            let remaining = l - step - 1;
            let total: u128 = self
                .graph
                .out(current)
                .iter()
                .map(|&u| self.weights.weight(u, remaining))
                .sum();
            if total == 0 {
                // Impossible in walk-count mode: w(v, r+1) > 0 implies some
                // out-neighbor continues. Degree counts do not compose this
                // way, so distance-degree walks may dead-end.
                debug_assert_ne!(self.weights.mode(), WeightMode::WalkCount);
                return None;
            }
            if self.weights.mode() == WeightMode::WalkCount {
                // Conservation: step probabilities sum to exactly 1.
                debug_assert_eq!(total, self.weights.weight(current, remaining + 1));
            }
            let ticket = rng.random_range(0..total);
            let mut acc: u128 = 0;
            let mut chosen = None;
            for &u in self.graph.out(current) {
                acc += self.weights.weight(u, remaining);
                if ticket < acc {
                    chosen = Some(u);
                    break;
                }
            }
            let next = chosen.expect("ticket below total");
            if visited[next.0 as usize] {
                return None;
            }
            visited[next.0 as usize] = true;
            walk.push(next);
            current = next;
        }
        Some(walk)
    }

    /// Draws one simple length-l path; also reports how many walks were
    /// rejected on the way.
    pub fn sample_with_stats<R: Rng>(&self, rng: &mut R) -> Result<(Path, u64)> {
        let mut visited = vec![false; self.graph.vertex_count()];
        let mut rejected: u64 = 0;
        loop {
            match self.try_walk(rng, &mut visited) {
                Some(walk) => return Ok((Path::new(walk), rejected)),
                None => {
                    rejected += 1;
                    if rejected >= self.opts.rejection_budget {
                        return Err(Error::RejectionBudget {
                            budget: self.opts.rejection_budget,
                        });
                    }
                }
            }
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<Path> {
        self.sample_with_stats(rng).map(|(path, _)| path)
    }
}

/// Uniformly samples one simple length-l path. Prefer [`PathSampler`] when
/// drawing many paths from the same graph.
pub fn sample_path<R: Rng>(
    graph: &DatabaseGraph,
    weights: &WeightTable,
    rng: &mut R,
    opts: &SamplerOptions,
) -> Result<Path> {
    PathSampler::new(graph, weights, opts.clone())?.sample(rng)
}

/// Uniformly and independently draws one transaction per path position.
pub fn sample_transaction_sequence<R: Rng>(
    graph: &DatabaseGraph,
    path: &Path,
    rng: &mut R,
) -> SampleRecord {
    let mut choices = Vec::with_capacity(path.vertices().len());
    let mut path_weight: u128 = 1;
    for &v in path.vertices() {
        let size = graph.database(v).len();
        path_weight *= size as u128;
        choices.push(rng.random_range(0..size) as u32);
    }
    SampleRecord {
        sequence: TransactionSequence {
            path: path.clone(),
            choices,
        },
        path_weight,
    }
}

/// The RNG substream owned by record `index` of a batch.
fn record_rng(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws m records through the two-step sampler.
///
/// The result is a deterministic function of (graph, l, m, mode, seed);
/// `workers` only controls parallelism.
pub fn sample_batch(
    graph: &DatabaseGraph,
    l: usize,
    m: usize,
    mode: WeightMode,
    seed: u64,
    workers: usize,
    opts: &SamplerOptions,
) -> Result<SampleBatch> {
    if m == 0 {
        return Err(Error::Precondition("sample size m must be >= 1".into()));
    }
    if workers == 0 {
        return Err(Error::Precondition("workers must be >= 1".into()));
    }
    let weights = compute_weights(graph, l, mode)?;
    let sampler = PathSampler::new(graph, &weights, opts.clone())?;

    let draw = |index: usize| -> Result<(SampleRecord, u64)> {
        let mut rng = record_rng(seed, index as u64);
        let (path, rejected) = sampler.sample_with_stats(&mut rng)?;
        Ok((
            sample_transaction_sequence(graph, &path, &mut rng),
            rejected,
        ))
    };

    let drawn: Vec<(SampleRecord, u64)> = if workers == 1 {
        (0..m).map(draw).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Precondition(format!("cannot start worker pool: {e}")))?;
        pool.install(|| (0..m).into_par_iter().map(draw).collect::<Result<_>>())?
    };

    let rejections = drawn.iter().map(|(_, r)| r).sum();
    Ok(SampleBatch {
        records: drawn.into_iter().map(|(rec, _)| rec).collect(),
        l,
        seed,
        weight_mode: mode,
        rejections,
    })
}

/// JSON-lines export row: `{"path":["v1",...],"tids":[0,...],"weight":12}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct SampleRow {
    pub path: Vec<String>,
    pub tids: Vec<u32>,
    pub weight: u128,
}

/// Writes one JSON object per record.
pub fn write_batch_jsonl<W: Write>(
    graph: &DatabaseGraph,
    batch: &SampleBatch,
    mut sink: W,
) -> Result<()> {
    for rec in &batch.records {
        let row = SampleRow {
            path: rec
                .sequence
                .path
                .names(graph)
                .into_iter()
                .map(String::from)
                .collect(),
            tids: rec.sequence.choices.clone(),
            weight: rec.path_weight,
        };
        serde_json::to_writer(&mut sink, &row).map_err(|e| Error::Parse(e.to_string()))?;
        sink.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads back just the path weights of a JSONL batch export.
pub fn read_batch_weights<R: BufRead>(source: R) -> Result<Vec<u128>> {
    let mut weights = Vec::new();
    for line in source.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: SampleRow =
            serde_json::from_str(&line).map_err(|e| Error::Parse(e.to_string()))?;
        weights.push(row.weight);
    }
    Ok(weights)
}
