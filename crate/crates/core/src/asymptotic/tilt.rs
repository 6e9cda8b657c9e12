//! Asymptotic weight enumerator of `L` concatenated outer codewords.
//!
//! The growth exponent maximizes `(1/n)(H(P) + Σ p_i ln A_i)` over weight
//! compositions `P` with mean weight `nβ₀`. The maximizer is the tilted
//! family `p_i ∝ A_i x^i`, so the problem reduces to finding the scalar tilt
//! `x` that matches the mean.

use serde::Serialize;

use crate::linear_code::{weight_enumerator_auto, BlockCodeSpec, WeightSpectrum};
use crate::logmath::log_sum_exp;
use crate::{Error, Result};

/// Optimal weight composition at one normalized outer weight.
#[derive(Debug, Clone, Serialize)]
pub struct TiltedComposition {
    pub n: usize,
    /// Weights `i` with `A_i > 0`.
    pub support: Vec<usize>,
    /// `p_0 .. p_n`, zero off the support.
    pub probabilities: Vec<f64>,
    /// `ln x`; `±∞` when the composition is a point mass at an end of the support.
    pub log_tilt: f64,
    /// Exponent in nats per output bit.
    pub value: f64,
}

impl TiltedComposition {
    pub fn mean_weight(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(i, p)| i as f64 * p)
            .sum()
    }
}

/// Precomputed outer spectrum for repeated tilt solves.
#[derive(Debug, Clone)]
pub struct OuterAsymptotic {
    n: usize,
    weights: Vec<f64>,
    support: Vec<usize>,
    ln_counts: Vec<f64>,
}

const TILT_TOL: f64 = 1e-13;

impl OuterAsymptotic {
    pub fn new(code: &BlockCodeSpec) -> Result<Self> {
        Self::from_spectrum(&weight_enumerator_auto(code)?)
    }

    pub fn from_spectrum(ws: &WeightSpectrum) -> Result<Self> {
        let logs = ws.logs();
        let support: Vec<usize> = (0..=ws.n).filter(|&i| logs[i].is_finite()).collect();
        if support.first() != Some(&0) {
            return Err(Error::InvalidParameter(
                "spectrum must contain the zero codeword".into(),
            ));
        }
        Ok(Self {
            n: ws.n,
            weights: support.iter().map(|&i| i as f64).collect(),
            ln_counts: support.iter().map(|&i| logs[i]).collect(),
            support,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest normalized weight `w_max / n` reachable by the outer code.
    pub fn max_beta(&self) -> f64 {
        *self.support.last().unwrap() as f64 / self.n as f64
    }

    fn log_weights(&self, t: f64, out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            self.ln_counts
                .iter()
                .zip(&self.weights)
                .map(|(a, w)| a + w * t),
        );
    }

    /// Mean weight under tilt `t = ln x`, plus the normalized probabilities.
    fn tilted(&self, t: f64, scratch: &mut Vec<f64>) -> f64 {
        self.log_weights(t, scratch);
        let lse = log_sum_exp(scratch);
        let mut mean = 0.0;
        for (lw, w) in scratch.iter_mut().zip(&self.weights) {
            *lw = (*lw - lse).exp();
            mean += *lw * w;
        }
        mean
    }

    /// Exponent `a(β₀)` only; the hot path of the spectral-shape optimizer.
    /// Returns `-∞` outside `[0, max_beta]`.
    pub fn value(&self, beta0: f64) -> f64 {
        if !(0.0..=self.max_beta()).contains(&beta0) {
            return f64::NEG_INFINITY;
        }
        let mut scratch = Vec::with_capacity(self.support.len());
        match self.solve(beta0, &mut scratch) {
            Ok((_, v)) => v,
            Err(_) => f64::NEG_INFINITY,
        }
    }

    /// Full solution with the optimal composition.
    pub fn evaluate(&self, beta0: f64) -> Result<TiltedComposition> {
        if !(0.0..=self.max_beta()).contains(&beta0) {
            return Err(Error::out_of_range(
                "beta0",
                beta0,
                &format!("[0, {}]", self.max_beta()),
            ));
        }
        let mut scratch = Vec::with_capacity(self.support.len());
        let (log_tilt, value) = self.solve(beta0, &mut scratch)?;
        let mut probabilities = vec![0.0; self.n + 1];
        if log_tilt == f64::NEG_INFINITY {
            probabilities[0] = 1.0;
        } else if log_tilt == f64::INFINITY {
            probabilities[*self.support.last().unwrap()] = 1.0;
        } else {
            self.tilted(log_tilt, &mut scratch);
            for (&i, &p) in self.support.iter().zip(&scratch) {
                probabilities[i] = p;
            }
        }
        Ok(TiltedComposition {
            n: self.n,
            support: self.support.clone(),
            probabilities,
            log_tilt,
            value,
        })
    }

    /// Returns `(ln x, exponent)`.
    fn solve(&self, beta0: f64, scratch: &mut Vec<f64>) -> Result<(f64, f64)> {
        let n = self.n as f64;
        let target = n * beta0;
        let w_max = *self.weights.last().unwrap();
        if target <= 0.0 {
            return Ok((f64::NEG_INFINITY, 0.0));
        }
        if target >= w_max {
            return Ok((f64::INFINITY, self.ln_counts.last().unwrap() / n));
        }
        // Mean weight is increasing in t; bracket then bisect.
        let (mut lo, mut hi) = (-1.0f64, 1.0f64);
        while self.tilted(lo, scratch) > target {
            lo *= 2.0;
            if lo < -1e6 {
                return Err(Error::NoBracket(format!(
                    "beta0 = {beta0}: lower tilt bracket"
                )));
            }
        }
        while self.tilted(hi, scratch) < target {
            hi *= 2.0;
            if hi > 1e6 {
                return Err(Error::NoBracket(format!(
                    "beta0 = {beta0}: upper tilt bracket"
                )));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.tilted(mid, scratch) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= TILT_TOL * hi.abs().max(1.0) {
                break;
            }
        }
        let t = 0.5 * (lo + hi);
        self.tilted(t, scratch);
        // (1/n)(H(P) + Σ p_i ln A_i), evaluated in entropy form.
        let mut acc = 0.0;
        for (&p, &ln_a) in scratch.iter().zip(&self.ln_counts) {
            if p > 0.0 {
                acc += p * (ln_a - p.ln());
            }
        }
        Ok((t, acc / n))
    }
}

/// Outer-code asymptotic weight exponent at `β₀`, with its composition.
pub fn outer_asym_we(code: &BlockCodeSpec, beta0: f64) -> Result<(f64, TiltedComposition)> {
    let solved = OuterAsymptotic::new(code)?.evaluate(beta0)?;
    Ok((solved.value, solved))
}
