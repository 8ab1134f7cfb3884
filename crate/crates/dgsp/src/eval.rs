//! Ranking quality metrics and sample-size bound calculators.
//!
//! For a ground-truth ranked list G and a produced ranked list L:
//!   ME(k) = (1/k) Σ_{i≤k} |f(s_i) − f̂(s_i)| over the top-k truth patterns,
//!   AP(k) = (1/|G(k)|) Σ_{i=1..|L|} (|L(i) ∩ G(k)| / i) · R(i), where R(i)=1
//!           iff L's rank-i pattern is a member of the ground-truth list G(k),
//!   RS(k) = |G(k) ∩ L(k)| / k.
//!
//! The bound calculators evaluate
//!   |S_l| ≥ 12/(ε²a) · ln(2|Q_l|/δ)            (with a pattern count), and
//!   |S_l| ≥ (12|I|(l+1)+12)/(ε²a) · ln(2/δ)    (via |Q_l| ≤ 2^{|I|(l+1)}),
//! where a = (Σ_i M^i)/(|P_l| · M*) and M* = max_i M^i. Results are reals;
//! ceilings are applied at the CLI layer.

use std::collections::HashSet;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::SampleBatch;

/// Mean absolute estimation error over the top-k truth patterns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeOutcome {
    pub value: f64,
    /// Truth patterns with no estimate available; each contributed f̂ = 0.
    pub missing: usize,
}

/// `truth` is (pattern, exact frequency) in rank order; `estimate` looks up
/// the estimated frequency of a truth pattern.
pub fn mean_estimation_error<K, F>(truth: &[(K, f64)], estimate: F, k: usize) -> Result<MeOutcome>
where
    F: Fn(&K) -> Option<f64>,
{
    if k == 0 {
        return Err(Error::Precondition("k must be >= 1".into()));
    }
    if truth.len() < k {
        return Err(Error::Precondition(format!(
            "ground truth has {} entries, need {k}",
            truth.len()
        )));
    }
    let mut sum = 0.0;
    let mut missing = 0;
    for (pattern, exact) in &truth[..k] {
        let est = match estimate(pattern) {
            Some(e) => e,
            None => {
                missing += 1;
                0.0
            }
        };
        sum += (exact - est).abs();
    }
    Ok(MeOutcome {
        value: sum / k as f64,
        missing,
    })
}

/// Average precision of `produced` against the top-k of `truth`.
pub fn average_precision<K>(produced: &[K], truth: &[K], k: usize) -> Result<f64>
where
    K: Eq + Hash,
{
    if k == 0 {
        return Err(Error::Precondition("k must be >= 1".into()));
    }
    if truth.len() < k {
        return Err(Error::Precondition(format!(
            "ground truth has {} entries, need {k}",
            truth.len()
        )));
    }
    let truth_topk: HashSet<&K> = truth[..k].iter().collect();
    let mut hits_in_topk = 0usize;
    let mut sum = 0.0;
    for (i, pattern) in produced.iter().enumerate() {
        if truth_topk.contains(pattern) {
            hits_in_topk += 1;
            sum += hits_in_topk as f64 / (i + 1) as f64;
        }
    }
    Ok(sum / truth_topk.len() as f64)
}

/// Fraction of the top-k members shared by both lists.
pub fn ranking_similarity<K>(produced: &[K], truth: &[K], k: usize) -> Result<f64>
where
    K: Eq + Hash,
{
    if k == 0 {
        return Err(Error::Precondition("k must be >= 1".into()));
    }
    if truth.len() < k || produced.len() < k {
        return Err(Error::Precondition(format!(
            "both lists need {k} entries (truth has {}, produced has {})",
            truth.len(),
            produced.len()
        )));
    }
    let truth_topk: HashSet<&K> = truth[..k].iter().collect();
    let shared = produced[..k]
        .iter()
        .filter(|p| truth_topk.contains(p))
        .count();
    Ok(shared as f64 / k as f64)
}

/// Inputs to the sample-size bound calculators.
#[derive(Debug, Clone, Copy)]
pub struct BoundInputs {
    pub epsilon: f64,
    pub delta: f64,
    /// |I|: size of the item universe.
    pub item_count: usize,
    pub l: usize,
    /// a = (Σ_i M^i)/(|P_l| · M*) ∈ (0, 1].
    pub a: f64,
    /// |Q_l| when known; otherwise the 2^{|I|(l+1)} cap is substituted.
    pub pattern_count: Option<f64>,
}

impl BoundInputs {
    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Domain(format!(
                "epsilon must be in (0,1), got {}",
                self.epsilon
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Domain(format!(
                "delta must be in (0,1), got {}",
                self.delta
            )));
        }
        if !(self.a > 0.0 && self.a <= 1.0) {
            return Err(Error::Domain(format!("a must be in (0,1], got {}", self.a)));
        }
        if self.item_count == 0 {
            return Err(Error::Domain("item count must be >= 1".into()));
        }
        if self.l == 0 {
            return Err(Error::Domain("l must be >= 1".into()));
        }
        if let Some(q) = self.pattern_count {
            if q < 1.0 || q.is_nan() {
                return Err(Error::Domain(format!(
                    "pattern count must be >= 1, got {q}"
                )));
            }
        }
        Ok(())
    }
}

/// Sample size sufficient for all pattern frequencies to be within ε/2 of
/// exact with probability 1−δ.
pub fn sample_size_bound(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    let eps2a = inputs.epsilon * inputs.epsilon * inputs.a;
    Ok(match inputs.pattern_count {
        Some(q) => 12.0 / eps2a * (2.0 * q / inputs.delta).ln(),
        None => {
            let coeff = 12.0 * inputs.item_count as f64 * (inputs.l as f64 + 1.0) + 12.0;
            coeff / eps2a * (2.0 / inputs.delta).ln()
        }
    })
}

/// Plug-in estimate â = mean(M^i) / max(M^i) from a sampled batch. Optimistic:
/// the sampled maximum can only under-estimate M*, so â upper-bounds a.
pub fn estimate_a(batch: &SampleBatch) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::Precondition("batch is empty".into()));
    }
    estimate_a_from_weights(batch.records.iter().map(|r| r.path_weight))
}

pub fn estimate_a_from_weights<I: IntoIterator<Item = u128>>(weights: I) -> Result<f64> {
    let mut count: u128 = 0;
    let mut sum: u128 = 0;
    let mut max: u128 = 0;
    for w in weights {
        count += 1;
        sum += w;
        max = max.max(w);
    }
    if count == 0 || max == 0 {
        return Err(Error::Precondition("no sample weights".into()));
    }
    Ok(sum as f64 / count as f64 / max as f64)
}

/// One metrics report cell, emitted per (k, m) pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsCell {
    pub k: usize,
    #[serde(rename = "ME", skip_serializing_if = "Option::is_none")]
    pub me: Option<f64>,
    #[serde(rename = "AP")]
    pub ap: f64,
    #[serde(rename = "RS")]
    pub rs: f64,
    pub m: Option<u64>,
    pub l: Option<u64>,
    pub seed: Option<u64>,
    /// Number of truth patterns with no estimate (each scored as f̂=0 in ME).
    pub me_missing: usize,
    /// Full length of the produced list used for AP.
    pub produced_len: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn me_direct_evaluation() {
        let truth = vec![("a", 1.0), ("b", 2.0 / 3.0)];
        let est = |p: &&str| match *p {
            "a" => Some(0.9),
            "b" => Some(0.7),
            _ => None,
        };
        let out = mean_estimation_error(&truth, est, 2).unwrap();
        assert!((out.value - (0.1 + 1.0 / 30.0) / 2.0).abs() < 1e-12);
        assert_eq!(out.missing, 0);

        // Estimates equal to the exact frequencies give zero error.
        let identity = mean_estimation_error(
            &truth,
            |p| {
                if *p == "a" {
                    Some(1.0)
                } else {
                    Some(2.0 / 3.0)
                }
            },
            2,
        )
        .unwrap();
        assert_eq!(identity.value, 0.0);
    }

    #[test]
    fn me_flags_missing_estimates() {
        let truth = vec![("a", 0.5), ("b", 0.25)];
        let out = mean_estimation_error(&truth, |_| None, 2).unwrap();
        assert_eq!(out.missing, 2);
        assert!((out.value - 0.375).abs() < 1e-12);
    }

    #[test]
    fn ap_direct_evaluation() {
        let truth = vec!["a", "c"];
        assert_eq!(average_precision(&truth, &truth, 2).unwrap(), 1.0);

        let produced = vec!["a", "b", "c"];
        let ap = average_precision(&produced, &truth, 2).unwrap();
        assert!((ap - 5.0 / 6.0).abs() < 1e-12, "ap={ap}");

        let disjoint = vec!["x", "y"];
        assert_eq!(average_precision(&disjoint, &truth, 2).unwrap(), 0.0);
    }

    #[test]
    fn ap_stays_in_unit_interval_for_long_lists() {
        // Produced longer than k, every produced pattern in the full truth.
        let truth = vec!["a", "b", "c", "d", "e"];
        let produced = vec!["e", "d", "c", "b", "a"];
        for k in 1..=5 {
            let ap = average_precision(&produced, &truth, k).unwrap();
            assert!((0.0..=1.0).contains(&ap), "k={k} ap={ap}");
        }
        // Set-equal reversed lists: order is invisible at full depth but
        // penalized at shallower ranks.
        assert_eq!(average_precision(&produced, &truth, 5).unwrap(), 1.0);
        assert!(average_precision(&produced, &truth, 2).unwrap() < 1.0);
    }

    #[test]
    fn rs_direct_evaluation() {
        let truth = vec!["a", "b", "c", "d"];
        assert_eq!(ranking_similarity(&truth, &truth, 4).unwrap(), 1.0);
        let produced = vec!["a", "b", "c", "x"];
        assert_eq!(ranking_similarity(&produced, &truth, 4).unwrap(), 0.75);
        let disjoint = vec!["p", "q", "r", "s"];
        assert_eq!(ranking_similarity(&disjoint, &truth, 4).unwrap(), 0.0);
    }

    #[test]
    fn bound_matches_hand_computation() {
        let inputs = BoundInputs {
            epsilon: 0.1,
            delta: 0.1,
            item_count: 4,
            l: 3,
            a: 1.0,
            pattern_count: None,
        };
        let bound = sample_size_bound(&inputs).unwrap();
        let by_hand = 20_400.0 * 20.0f64.ln();
        assert!((bound - by_hand).abs() / by_hand < 1e-12);
    }

    #[test]
    fn bound_with_single_pattern() {
        let inputs = BoundInputs {
            epsilon: 0.2,
            delta: 0.05,
            item_count: 10,
            l: 2,
            a: 0.5,
            pattern_count: Some(1.0),
        };
        let bound = sample_size_bound(&inputs).unwrap();
        let expected = 12.0 / (0.04 * 0.5) * (2.0 / 0.05f64).ln();
        assert!((bound - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn halving_epsilon_quadruples_the_bound() {
        let base = BoundInputs {
            epsilon: 0.2,
            delta: 0.1,
            item_count: 5,
            l: 2,
            a: 0.8,
            pattern_count: None,
        };
        let half = BoundInputs {
            epsilon: 0.1,
            ..base
        };
        let b0 = sample_size_bound(&base).unwrap();
        let b1 = sample_size_bound(&half).unwrap();
        assert!((b1 / b0 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn bound_rejects_domain_violations() {
        let mut inputs = BoundInputs {
            epsilon: 1.5,
            delta: 0.1,
            item_count: 4,
            l: 3,
            a: 1.0,
            pattern_count: None,
        };
        assert!(sample_size_bound(&inputs).is_err());
        inputs.epsilon = 0.1;
        inputs.a = 0.0;
        assert!(sample_size_bound(&inputs).is_err());
        inputs.a = 1.0;
        inputs.delta = 1.0;
        assert!(sample_size_bound(&inputs).is_err());
    }

    #[test]
    fn estimate_a_from_weight_lists() {
        assert_eq!(estimate_a_from_weights([5, 5, 5]).unwrap(), 1.0);
        let a = estimate_a_from_weights([6, 6, 3]).unwrap();
        assert!((a - 5.0 / 6.0).abs() < 1e-12);
    }
}
