//! Sampled top-k over a graph file:
//! `cargo run --example sampled_topk -- graph.json [l] [k] [m]`

use dgsp::miner::{mine_topk, MinerOptions};
use dgsp::sampler::SamplerOptions;
use dgsp::{load_graph, sample_batch, WeightMode};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .expect("usage: sampled_topk <graph.json> [l] [k] [m]");
    let l: usize = args.next().map_or(2, |v| v.parse().expect("l"));
    let k: usize = args.next().map_or(20, |v| v.parse().expect("k"));
    let m: usize = args.next().map_or(50_000, |v| v.parse().expect("m"));

    let graph = load_graph(std::fs::File::open(path).unwrap()).unwrap();
    let batch = sample_batch(
        &graph,
        l,
        m,
        WeightMode::WalkCount,
        1,
        4,
        &SamplerOptions::default(),
    )
    .unwrap();
    let top = mine_topk(&graph, &batch, k, &MinerOptions::default()).unwrap();
    for entry in &top.entries {
        println!(
            "{:>4}  {:>12}  {:.4}  {}",
            entry.rank,
            entry.support,
            entry.frequency,
            entry.pattern.to_text(&graph)
        );
    }
}
