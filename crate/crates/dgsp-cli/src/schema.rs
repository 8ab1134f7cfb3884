//! Result file schemas shared by the mine and eval commands.

use serde::{Deserialize, Serialize};

use dgsp::eval::MetricsCell;
use dgsp::miner::{parse_pattern_text, PatternRow, ScoreKind};

use crate::manifest::ManifestCore;

/// Ranked-pattern result file.
#[derive(Debug, Serialize, Deserialize)]
pub struct MineFile {
    pub manifest: ManifestCore,
    pub score_kind: ScoreKind,
    pub l: usize,
    pub k: usize,
    pub list_len: usize,
    /// |D_l| for exact runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_l_size: Option<u128>,
    /// Batch statistics for sampled runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_weight: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejections: Option<u64>,
    pub patterns: Vec<PatternRow>,
}

/// Metrics result file: one cell per requested k.
#[derive(Debug, Serialize, Deserialize)]
pub struct EvalFile {
    pub manifest: ManifestCore,
    pub cells: Vec<MetricsCell>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BoundValue {
    /// The bound as a real number.
    pub raw: f64,
    /// Ceiling-applied integer sample size.
    pub samples: u64,
}

/// Bound report.
#[derive(Debug, Serialize, Deserialize)]
pub struct BoundFile {
    pub manifest: ManifestCore,
    pub epsilon: f64,
    pub delta: f64,
    pub items: usize,
    pub l: usize,
    pub a: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern_count: Option<f64>,
    /// 12/(ε²a)·ln(2|Q_l|/δ); requires a pattern count.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_from_pattern_count: Option<BoundValue>,
    /// (12|I|(l+1)+12)/(ε²a)·ln(2/δ), always computable.
    pub bound_from_item_cap: BoundValue,
}

/// Canonical comparison key for a pattern's text form: item names sorted
/// within each position, independent of the item-id assignment of the graph
/// that produced the file.
pub fn pattern_key(text: &str) -> dgsp::Result<String> {
    let mut itemsets = parse_pattern_text(text)?;
    let mut key = String::new();
    for set in &mut itemsets {
        set.sort();
        set.dedup();
        key.push('(');
        key.push_str(&set.join(","));
        key.push(')');
    }
    Ok(key)
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn patterns_to_csv(rows: &[PatternRow]) -> String {
    let mut out = String::from("rank,pattern,support,freq\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.rank,
            csv_escape(&row.pattern),
            row.support,
            row.freq
        ));
    }
    out
}

pub fn cells_to_csv(cells: &[MetricsCell]) -> String {
    let mut out = String::from("k,ME,AP,RS,m,l,seed,me_missing,produced_len\n");
    for c in cells {
        let fmt_opt = |v: Option<u64>| v.map_or(String::new(), |x| x.to_string());
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            c.k,
            c.me.map_or(String::new(), |m| m.to_string()),
            c.ap,
            c.rs,
            fmt_opt(c.m),
            fmt_opt(c.l),
            fmt_opt(c.seed),
            c.me_missing,
            c.produced_len
        ));
    }
    out
}
