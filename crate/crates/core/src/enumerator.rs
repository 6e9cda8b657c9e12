//! Exact finite-length ensemble enumerators in the natural-log domain.
//!
//! The ensemble-average weight enumerator of the serial chain is obtained by
//! averaging over uniformly random interleavers:
//!
//! ```text
//! Ā_h = Σ_{h0} Σ_{h1} A0(h0) · Acc(h0, h1) · Acc(h1, h) / (C(N, h0) · C(N, h1))
//! ```
//!
//! with the single-accumulator ensemble dropping the `h1` sum. The sum over
//! `h0` does not depend on `h`, so it is folded once into an intermediate
//! spectrum and the whole table costs `O(N^2)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::linear_code::{weight_enumerator_auto, BlockCodeSpec};
use crate::logmath::{LnFactorials, LogSum};
use crate::{EnsembleSpec, Error, Result};

/// Natural-log weight spectrum `a_h = ln A_h`, `-∞` for empty weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogWeightSpectrum {
    pub logs: Vec<f64>,
}

impl LogWeightSpectrum {
    /// Largest weight stored. Equals the block length for full spectra.
    pub fn max_weight(&self) -> usize {
        self.logs.len() - 1
    }

    pub fn get(&self, h: usize) -> f64 {
        self.logs.get(h).copied().unwrap_or(f64::NEG_INFINITY)
    }

    /// `ln Σ_h A_h`.
    pub fn log_total(&self) -> f64 {
        let mut acc = LogSum::new();
        self.logs.iter().for_each(|&x| acc.add(x));
        acc.value()
    }
}

/// `ln A_{w,h}` of the length-`n` accumulator,
/// `A_{w,h} = C(n - h, ⌊w/2⌋) · C(h - 1, ⌈w/2⌉ - 1)`.
pub fn acc_iowe_log(n: usize, w: usize, h: usize) -> Result<f64> {
    if w > n {
        return Err(Error::out_of_range(
            "input weight w",
            w,
            &format!("[0, {n}]"),
        ));
    }
    if h > n {
        return Err(Error::out_of_range(
            "output weight h",
            h,
            &format!("[0, {n}]"),
        ));
    }
    let table = LnFactorials::new(n);
    Ok(acc_iowe_log_with(&table, n, w, h))
}

#[inline]
fn acc_iowe_log_with(table: &LnFactorials, n: usize, w: usize, h: usize) -> f64 {
    if w == 0 {
        return if h == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let (n, w, h) = (n as i64, w as i64, h as i64);
    let lo = w / 2;
    let hi = (w + 1) / 2;
    table.ln_binomial(n - h, lo) + table.ln_binomial(h - 1, hi - 1)
}

/// Weight spectrum of `L` concatenated outer codewords, i.e. the `L`-th
/// power of the outer weight-enumerator polynomial.
pub fn outer_we_log(outer: &BlockCodeSpec, repetitions: usize) -> Result<LogWeightSpectrum> {
    outer_we_log_prefix(outer, repetitions, outer.n * repetitions)
}

/// Same as [`outer_we_log`] but only weights `0..=max_h` are kept.
pub fn outer_we_log_prefix(
    outer: &BlockCodeSpec,
    repetitions: usize,
    max_h: usize,
) -> Result<LogWeightSpectrum> {
    if repetitions == 0 {
        return Err(Error::out_of_range("L", repetitions, "L >= 1"));
    }
    let base = weight_enumerator_auto(outer)?.logs();
    Ok(power_truncated(
        &base,
        repetitions,
        max_h.min(outer.n * repetitions),
    ))
}

fn power_truncated(base: &[f64], exponent: usize, max_h: usize) -> LogWeightSpectrum {
    let support: Vec<(usize, f64)> = base
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, x)| x.is_finite())
        .collect();
    let mut current = vec![f64::NEG_INFINITY; max_h + 1];
    current[0] = 0.0;
    let mut reach = 0;
    let top = base.len() - 1;
    for _ in 0..exponent {
        reach = (reach + top).min(max_h);
        let mut next = vec![f64::NEG_INFINITY; max_h + 1];
        for (h, slot) in next.iter_mut().enumerate().take(reach + 1) {
            let mut acc = LogSum::new();
            for &(i, ln_a) in support.iter().take_while(|(i, _)| *i <= h) {
                acc.add(current[h - i] + ln_a);
            }
            *slot = acc.value();
        }
        current = next;
    }
    LogWeightSpectrum { logs: current }
}

/// Precomputed ensemble-average enumerator for weights `0..=max_h`.
#[derive(Debug, Clone)]
pub struct EnsembleEnumerator {
    block_length: usize,
    logs: Vec<f64>,
}

impl EnsembleEnumerator {
    pub fn new(ens: &EnsembleSpec, max_h: usize) -> Result<Self> {
        let n = ens.block_length();
        let max_h = max_h.min(n);
        let mid_max = if ens.stages() == 2 {
            (2 * max_h).min(n)
        } else {
            max_h
        };
        let outer_max = (2 * mid_max).min(n);
        let outer = outer_we_log_prefix(&ens.outer, ens.repetitions(), outer_max)?;
        let table = LnFactorials::new(n);

        // g(h1) = Σ_{h0 ≤ 2 h1} A0(h0) Acc(h0, h1) / C(N, h0)
        let first: Vec<f64> = (0..=mid_max)
            .map(|h1| {
                let mut acc = LogSum::new();
                for h0 in 0..=(2 * h1).min(outer_max) {
                    let a0 = outer.logs[h0];
                    if a0 == f64::NEG_INFINITY {
                        continue;
                    }
                    let t = acc_iowe_log_with(&table, n, h0, h1);
                    if t == f64::NEG_INFINITY {
                        continue;
                    }
                    acc.add(a0 + t - table.ln_binomial(n as i64, h0 as i64));
                }
                acc.value()
            })
            .collect();

        let logs = if ens.stages() == 1 {
            first
        } else {
            (0..=max_h)
                .map(|h| {
                    let mut acc = LogSum::new();
                    for (h1, &g) in first.iter().enumerate().take((2 * h).min(mid_max) + 1) {
                        if g == f64::NEG_INFINITY {
                            continue;
                        }
                        let t = acc_iowe_log_with(&table, n, h1, h);
                        if t == f64::NEG_INFINITY {
                            continue;
                        }
                        acc.add(g + t - table.ln_binomial(n as i64, h1 as i64));
                    }
                    acc.value()
                })
                .collect()
        };
        Ok(Self {
            block_length: n,
            logs,
        })
    }

    pub fn max_weight(&self) -> usize {
        self.logs.len() - 1
    }

    pub fn block_length(&self) -> usize {
        self.block_length
    }

    /// `ln Ā_h`.
    pub fn log_avg(&self, h: usize) -> f64 {
        self.logs[h]
    }

    pub fn into_spectrum(self) -> LogWeightSpectrum {
        LogWeightSpectrum { logs: self.logs }
    }
}

/// `ln Ā_h` for a single weight.
pub fn ensemble_avg_we_log(ens: &EnsembleSpec, h: usize) -> Result<f64> {
    let n = ens.block_length();
    if h > n {
        return Err(Error::out_of_range(
            "output weight h",
            h,
            &format!("[0, {n}]"),
        ));
    }
    Ok(EnsembleEnumerator::new(ens, h)?.log_avg(h))
}

/// Full ensemble-average spectrum `ln Ā_0 .. ln Ā_N`.
pub fn ensemble_we_log(ens: &EnsembleSpec) -> Result<LogWeightSpectrum> {
    Ok(EnsembleEnumerator::new(ens, ens.block_length())?.into_spectrum())
}

/// `ln Σ_{h=1}^{d-1} Ā_h`, an upper bound on `ln Pr(d_min < d)` (clamp at 0).
pub fn dmin_prob_bound(ens: &EnsembleSpec, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::out_of_range("d", d, "d >= 1"));
    }
    if d == 1 {
        return Ok(f64::NEG_INFINITY);
    }
    let max_h = (d - 1).min(ens.block_length());
    let e = EnsembleEnumerator::new(ens, max_h)?;
    let mut acc = LogSum::new();
    (1..=max_h).for_each(|h| acc.add(e.log_avg(h)));
    Ok(acc.value())
}

/// Result of the probabilistic minimum-distance bound at one block length.
#[derive(Debug, Clone, Serialize)]
pub struct DistanceBound {
    pub block_length: usize,
    pub prob_target: f64,
    /// Largest `d` with `Σ_{h=1}^{d-1} Ā_h < prob_target`.
    pub d_star: usize,
    /// `cumulative[d - 1] = ln Σ_{h=1}^{d-1} Ā_h` for `d = 1..=d_star + 1`
    /// (the last entry is the first one at or above the target, when it exists).
    pub cumulative: Vec<f64>,
}

impl DistanceBound {
    /// `ln` of the bound at `d_star`.
    pub fn ln_bound_at_d_star(&self) -> f64 {
        self.cumulative[self.d_star - 1]
    }

    /// Probability bound at `d`, clamped to 1.
    pub fn probability(&self, d: usize) -> Option<f64> {
        self.cumulative
            .get(d.checked_sub(1)?)
            .map(|x| x.exp().min(1.0))
    }

    /// The bound at `d` is at least 1 and carries no information.
    pub fn is_vacuous(&self, d: usize) -> bool {
        d >= 1 && self.cumulative.get(d - 1).is_some_and(|&x| x >= 0.0)
    }
}

/// Bound for one ensemble. The enumerator prefix is grown geometrically
/// until the cumulative sum crosses `prob_target`.
pub fn dmin_bound(ens: &EnsembleSpec, prob_target: f64) -> Result<DistanceBound> {
    if !(prob_target > 0.0 && prob_target < 1.0) {
        return Err(Error::out_of_range("prob_target", prob_target, "(0, 1)"));
    }
    let n = ens.block_length();
    let ln_target = prob_target.ln();
    let mut max_h = 64.min(n);
    loop {
        let e = EnsembleEnumerator::new(ens, max_h)?;
        let mut cumulative = vec![f64::NEG_INFINITY];
        let mut acc = LogSum::new();
        for h in 1..=max_h {
            acc.add(e.log_avg(h));
            cumulative.push(acc.value());
            if acc.value() >= ln_target {
                return Ok(DistanceBound {
                    block_length: n,
                    prob_target,
                    d_star: h,
                    cumulative,
                });
            }
        }
        if max_h == n {
            return Ok(DistanceBound {
                block_length: n,
                prob_target,
                d_star: n + 1,
                cumulative,
            });
        }
        max_h = (2 * max_h).min(n);
    }
}

/// Bound curve over several block lengths. Each `N` is independent and
/// evaluated in parallel; the output order follows `block_lengths`.
pub fn dmin_bound_curve(
    outer: &BlockCodeSpec,
    stages: usize,
    block_lengths: &[usize],
    prob_target: f64,
) -> Result<Vec<DistanceBound>> {
    let ensembles = block_lengths
        .iter()
        .map(|&n| EnsembleSpec::with_block_length(outer.clone(), n, stages))
        .collect::<Result<Vec<_>>>()?;
    ensembles
        .par_iter()
        .map(|ens| dmin_bound(ens, prob_target))
        .collect()
}
