//! Support code for the CLI and acceptance suites: fixtures, an enumeration
//! oracle, and chi-square machinery for goodness-of-fit checks. Independent
//! of the library's own algorithm paths.

#![allow(dead_code)]

use dgsp::baseline::{enumerate_paths, induce_sequences};
use dgsp::graph::{load_graph, DatabaseGraph};
use dgsp::miner::Pattern;
use num_rational::Ratio;

pub const FIG1_JSON: &str = include_str!("../../../dgsp/tests/data/fig1.json");

pub fn fig1() -> DatabaseGraph {
    load_graph(FIG1_JSON.as_bytes()).unwrap()
}

/// 5-vertex fixture with unequal database sizes (varying M^i).
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

/// Frequency by full enumeration of D_l and per-record containment checks.
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

// --- chi-square machinery -------------------------------------------------

fn ln_gamma(z: f64) -> f64 {
    // Lanczos approximation, g = 7, coefficients as published.
    #[allow(clippy::excessive_precision)]
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if z < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * z).sin()).ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = COEFFS[0];
    for (i, &c) in COEFFS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// Regularized lower incomplete gamma P(a, x).
fn gamma_p(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    let ln_prefix = -x + a * x.ln() - ln_gamma(a);
    if x < a + 1.0 {
        // Series expansion.
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut n = a;
        for _ in 0..500 {
            n += 1.0;
            term *= x / n;
            sum += term;
            if term.abs() < sum.abs() * 1e-15 {
                break;
            }
        }
        sum * ln_prefix.exp()
    } else {
        // Continued fraction for Q(a, x), modified Lentz.
        const FPMIN: f64 = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / FPMIN;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < FPMIN {
                d = FPMIN;
            }
            c = b + an / c;
            if c.abs() < FPMIN {
                c = FPMIN;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-15 {
                break;
            }
        }
        1.0 - ln_prefix.exp() * h
    }
}

/// Chi-square CDF with `df` degrees of freedom.
pub fn chi_square_cdf(x: f64, df: usize) -> f64 {
    gamma_p(df as f64 / 2.0, x / 2.0)
}

/// Upper critical value: the x with P(X > x) = alpha.
pub fn chi_square_critical(df: usize, alpha: f64) -> f64 {
    assert!(df >= 1 && alpha > 0.0 && alpha < 1.0);
    let target = 1.0 - alpha;
    let mut hi = df as f64;
    while chi_square_cdf(hi, df) < target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chi_square_cdf(mid, df) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Pearson statistic Σ (obs − exp)² / exp.
pub fn chi_square_statistic(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let diff = o as f64 - e;
            diff * diff / e
        })
        .sum()
}

mod self_checks {
    use super::*;

    #[test]
    fn chi_square_critical_values_match_tables() {
        // Frozen textbook values for the 0.001 and 0.05 upper tails.
        let cases = [
            (1, 0.001, 10.828),
            (2, 0.001, 13.816),
            (3, 0.001, 16.266),
            (9, 0.001, 27.877),
            (17, 0.001, 40.790),
            (10, 0.05, 18.307),
        ];
        for (df, alpha, expect) in cases {
            let got = chi_square_critical(df, alpha);
            assert!(
                (got - expect).abs() / expect < 2e-3,
                "df={df} alpha={alpha}: got {got}, expected {expect}"
            );
        }
    }
}
