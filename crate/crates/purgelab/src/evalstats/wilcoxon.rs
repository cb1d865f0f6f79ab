//! Wilcoxon signed-ranks test for paired accuracies.
//!
//! Differences are ranked by absolute value with mean ranks for ties. Zero
//! differences follow the split-and-drop-odd variant: if their count is odd
//! one zero is ignored, the rest keep their (lowest) ranks and contribute
//! half their rank sum to each of `w_plus` and `w_minus`. `n_effective`
//! counts the kept differences, so `w_plus + w_minus =
//! n_effective (n_effective + 1) / 2` always holds.
//!
//! Two-sided p-values are exact for `n_effective <= 25` — the tail count of
//! the sign-assignment distribution, computed by dynamic programming over
//! half-integer ranks — and otherwise use the normal approximation with the
//! tie-aware variance `sum(r_i^2)/4` over nonzero ranks and a 0.5 continuity
//! correction.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::{Error, Result};

pub const EXACT_LIMIT: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WilcoxonMethod {
    Exact,
    NormalApproximation,
}

#[derive(Clone, Debug)]
pub struct WilcoxonResult {
    pub n_effective: usize,
    pub w_plus: f64,
    pub w_minus: f64,
    pub p_two_sided: f64,
    pub method: WilcoxonMethod,
}

/// Paired two-sided test of `a` vs `b`.
pub fn wilcoxon_signed_ranks(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(Error::InvalidArg(format!(
            "paired vectors differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::InvalidArg("empty paired vectors".into()));
    }

    let mut diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let zeros = diffs.iter().filter(|&&d| d == 0.0).count();
    if zeros % 2 == 1 {
        let drop = diffs.iter().position(|&d| d == 0.0).expect("zero present");
        diffs.swap_remove(drop);
    }
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonResult {
            n_effective: 0,
            w_plus: 0.0,
            w_minus: 0.0,
            p_two_sided: 1.0,
            method: WilcoxonMethod::Exact,
        });
    }

    // Mean ranks over |d|, ties sharing the average of their positions.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diffs[i].abs().partial_cmp(&diffs[j].abs()).unwrap());
    let mut ranks = vec![0.0; n];
    let mut pos = 0;
    while pos < n {
        let mut end = pos;
        while end + 1 < n && diffs[order[end + 1]].abs() == diffs[order[pos]].abs() {
            end += 1;
        }
        let mean_rank = (pos + end + 2) as f64 / 2.0; // ranks are 1-based
        for &idx in &order[pos..=end] {
            ranks[idx] = mean_rank;
        }
        pos = end + 1;
    }

    let mut w_plus = 0.0;
    let mut w_minus = 0.0;
    for (d, r) in diffs.iter().zip(&ranks) {
        if *d > 0.0 {
            w_plus += r;
        } else if *d < 0.0 {
            w_minus += r;
        } else {
            w_plus += r / 2.0;
            w_minus += r / 2.0;
        }
    }

    let p = if n <= EXACT_LIMIT {
        exact_p(&diffs, &ranks, w_plus, w_minus)
    } else {
        normal_p(&diffs, &ranks, w_plus, w_minus)
    };

    Ok(WilcoxonResult {
        n_effective: n,
        w_plus,
        w_minus,
        p_two_sided: p,
        method: if n <= EXACT_LIMIT { WilcoxonMethod::Exact } else { WilcoxonMethod::NormalApproximation },
    })
}

/// Exact tail probability under random sign flips of the nonzero
/// differences: the fraction of assignments whose `min(W+, W-)` does not
/// exceed the observed minimum. Ranks are half-integers, so everything
/// scales by two into integer arithmetic; subset-sum counts come from a DP
/// table rather than raw enumeration.
fn exact_p(diffs: &[f64], ranks: &[f64], w_plus: f64, w_minus: f64) -> f64 {
    let scaled: Vec<u64> = diffs
        .iter()
        .zip(ranks)
        .filter(|(d, _)| **d != 0.0)
        .map(|(_, r)| (r * 2.0).round() as u64)
        .collect();
    let zero_half: u64 = diffs
        .iter()
        .zip(ranks)
        .filter(|(d, _)| **d == 0.0)
        .map(|(_, r)| (r * 2.0).round() as u64)
        .sum::<u64>()
        / 2;

    let total: u64 = scaled.iter().sum::<u64>() + 2 * zero_half;
    let w_min_scaled = (w_plus.min(w_minus) * 2.0).round() as u64;

    // counts[s] = number of subsets of the nonzero ranks with scaled sum s.
    let span = scaled.iter().sum::<u64>() as usize;
    let mut counts = vec![0u64; span + 1];
    counts[0] = 1;
    for &r in &scaled {
        let r = r as usize;
        for s in (r..=span).rev() {
            counts[s] += counts[s - r];
        }
    }

    let mut tail = 0u64;
    for (s, &c) in counts.iter().enumerate() {
        let w2 = zero_half + s as u64; // scaled W+ for this subset
        if w2 <= w_min_scaled || w2 >= total - w_min_scaled {
            tail += c;
        }
    }
    let assignments = (1u64) << scaled.len();
    (tail as f64 / assignments as f64).min(1.0)
}

fn normal_p(diffs: &[f64], ranks: &[f64], w_plus: f64, w_minus: f64) -> f64 {
    let total: f64 = ranks.iter().sum();
    let mean = total / 2.0;
    let variance: f64 = diffs
        .iter()
        .zip(ranks)
        .filter(|(d, _)| **d != 0.0)
        .map(|(_, r)| r * r / 4.0)
        .sum();
    if variance <= 0.0 {
        return 1.0;
    }
    let w_min = w_plus.min(w_minus);
    let z = (w_min - mean + 0.5) / variance.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    (2.0 * normal.cdf(z)).min(1.0)
}
