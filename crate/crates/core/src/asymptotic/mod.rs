//! Asymptotic spectral shape of the serial chain and its distance growth rate.
//!
//! For normalized output weight `δ` the spectral shape of the two-accumulator
//! ensemble is
//!
//! ```text
//! r(δ) = max_{β0, β1} a0(β0) + acc(β0, β1) + acc(β1, δ) − H(β0) − H(β1)
//! ```
//!
//! where `a0` is the outer exponent (see [`OuterAsymptotic`]) and `acc` the
//! accumulator input-output exponent. Since `(β0, β1) = (0, 0)` always gives
//! zero, `r ≥ 0`, and the growth rate `δ_min` is where `r` first becomes
//! strictly positive.

mod nelder_mead;
mod tilt;

use rayon::prelude::*;
use serde::Serialize;

pub use tilt::{outer_asym_we, OuterAsymptotic, TiltedComposition};

use crate::linear_code::BlockCodeSpec;
use crate::{EnsembleSpec, Error, Result};

/// Binary entropy in nats, unchecked. `0 ln 0 = 0`.
#[inline]
pub(crate) fn h_nats(p: f64) -> f64 {
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.ln();
    }
    if p < 1.0 {
        h -= (1.0 - p) * (-p).ln_1p();
    }
    h
}

fn check_unit(what: &'static str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::out_of_range(what, p, "[0, 1]"));
    }
    Ok(())
}

pub fn entropy_nats(p: f64) -> Result<f64> {
    check_unit("p", p)?;
    Ok(h_nats(p))
}

pub fn entropy_bits(p: f64) -> Result<f64> {
    Ok(entropy_nats(p)? / std::f64::consts::LN_2)
}

/// Accumulator exponent without range checks; `-∞` off the support.
#[inline]
pub(crate) fn acc_exponent(alpha: f64, beta: f64) -> f64 {
    if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&beta) {
        return f64::NEG_INFINITY;
    }
    let room = 1.0 - beta;
    if alpha > 2.0 * beta.min(room) * (1.0 + 1e-12) {
        return f64::NEG_INFINITY;
    }
    let mut v = 0.0;
    if room > 0.0 {
        v += room * h_nats((alpha / (2.0 * room)).min(1.0));
    }
    if beta > 0.0 {
        v += beta * h_nats((alpha / (2.0 * beta)).min(1.0));
    }
    v
}

/// Asymptotic input-output exponent of an accumulator,
/// `(1−β) H(α / 2(1−β)) + β H(α / 2β)`.
pub fn acc_asym_iowe(alpha: f64, beta: f64) -> Result<f64> {
    check_unit("alpha", alpha)?;
    check_unit("beta", beta)?;
    Ok(acc_exponent(alpha, beta))
}

/// `H(δ) − (1 − R) ln 2`, the spectral shape of random linear codes.
pub fn random_code_shape(rate: f64, delta: f64) -> Result<f64> {
    check_rate(rate)?;
    check_unit("delta", delta)?;
    Ok(h_nats(delta) - (1.0 - rate) * std::f64::consts::LN_2)
}

fn check_rate(rate: f64) -> Result<()> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::out_of_range("rate", rate, "(0, 1)"));
    }
    Ok(())
}

/// Normalized Gilbert–Varshamov distance: the root `δ ≤ 1/2` of `H₂(δ) = 1 − R`.
pub fn gvb_delta(rate: f64) -> Result<f64> {
    check_rate(rate)?;
    let target = (1.0 - rate) * std::f64::consts::LN_2;
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if h_nats(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Optimizer settings for [`SpectralShape`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ShapeOptions {
    /// Grid intervals per axis over the feasible region.
    pub grid_steps: usize,
    /// Parameter tolerance of the local polish.
    pub polish_xtol: f64,
    /// Number of best grid points used as polish starts.
    pub starts: usize,
}

impl Default for ShapeOptions {
    fn default() -> Self {
        Self {
            grid_steps: 400,
            polish_xtol: 1e-7,
            starts: 5,
        }
    }
}

/// One sample of the spectral shape with its maximizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralSample {
    pub delta: f64,
    /// Nats per output bit.
    pub r: f64,
    pub beta0: f64,
    /// Equals `beta0`'s image through the single accumulator when `stages = 1`
    /// (reported as `delta`).
    pub beta1: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralCurve {
    pub ensemble: String,
    pub samples: Vec<SpectralSample>,
}

/// Spectral-shape evaluator for one outer code and accumulator depth.
#[derive(Debug, Clone)]
pub struct SpectralShape {
    outer: OuterAsymptotic,
    stages: usize,
    rate: f64,
    label: String,
    opts: ShapeOptions,
}

impl SpectralShape {
    pub fn new(ens: &EnsembleSpec, opts: ShapeOptions) -> Result<Self> {
        Self::for_outer(&ens.outer, ens.stages(), opts)
    }

    pub fn for_outer(outer: &BlockCodeSpec, stages: usize, opts: ShapeOptions) -> Result<Self> {
        if !(1..=2).contains(&stages) {
            return Err(Error::out_of_range("stages", stages, "{1, 2}"));
        }
        if opts.grid_steps < 2 || opts.starts == 0 {
            return Err(Error::InvalidParameter(
                "grid_steps >= 2 and starts >= 1 required".into(),
            ));
        }
        Ok(Self {
            outer: OuterAsymptotic::new(outer)?,
            stages,
            rate: outer.rate(),
            label: format!("{}{}", outer.label(), "A".repeat(stages)),
            opts,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn options(&self) -> ShapeOptions {
        self.opts
    }

    pub fn evaluate(&self, delta: f64) -> Result<SpectralSample> {
        check_unit("delta", delta)?;
        Ok(match self.stages {
            1 => self.evaluate_single(delta),
            _ => self.evaluate_double(delta),
        })
    }

    /// Samples `r` at every `δ`, in parallel.
    pub fn curve(&self, deltas: &[f64]) -> Result<SpectralCurve> {
        let samples = deltas
            .par_iter()
            .map(|&d| self.evaluate(d))
            .collect::<Result<Vec<_>>>()?;
        Ok(SpectralCurve {
            ensemble: self.label.clone(),
            samples,
        })
    }

    fn evaluate_single(&self, delta: f64) -> SpectralSample {
        let g = self.opts.grid_steps;
        let b0max = (2.0 * delta.min(1.0 - delta))
            .min(self.outer.max_beta())
            .min(1.0);
        let objective = |x: &[f64; 1]| {
            let b0 = x[0];
            self.outer.value(b0) - h_nats_checked(b0) + acc_exponent(b0, delta)
        };
        let mut top = TopK::new(self.opts.starts);
        for i in 0..=g {
            let b0 = b0max * i as f64 / g as f64;
            top.offer(objective(&[b0]), [b0, delta]);
        }
        let step = (b0max / g as f64).max(1e-12);
        let mut best = top.best();
        for &(_, start) in top.items() {
            let p = nelder_mead::maximize(objective, [start[0]], step, self.opts.polish_xtol, 4000);
            if p.value > best.0 {
                best = (p.value, [p.point[0], delta]);
            }
        }
        SpectralSample {
            delta,
            r: best.0,
            beta0: best.1[0],
            beta1: delta,
        }
    }

    fn evaluate_double(&self, delta: f64) -> SpectralSample {
        let g = self.opts.grid_steps;
        let b1max = (2.0 * delta.min(1.0 - delta)).min(1.0);
        let b0max = (2.0 * b1max.min(0.5)).min(self.outer.max_beta());
        let b0s: Vec<f64> = (0..=g).map(|i| b0max * i as f64 / g as f64).collect();
        let b1s: Vec<f64> = (0..=g).map(|j| b1max * j as f64 / g as f64).collect();
        let outer_part: Vec<f64> = b0s
            .par_iter()
            .map(|&b| self.outer.value(b) - h_nats(b))
            .collect();
        let inner_part: Vec<f64> = b1s
            .iter()
            .map(|&b| acc_exponent(b, delta) - h_nats(b))
            .collect();

        let mut top = TopK::new(self.opts.starts);
        for (b1, v) in b1s.iter().zip(&inner_part) {
            if *v == f64::NEG_INFINITY {
                continue;
            }
            let limit = 2.0 * b1.min(1.0 - b1) * (1.0 + 1e-12);
            for (b0, u) in b0s
                .iter()
                .zip(&outer_part)
                .take_while(|(b0, _)| **b0 <= limit)
            {
                top.offer(u + v + acc_exponent(*b0, *b1), [*b0, *b1]);
            }
        }

        let objective = |x: &[f64; 2]| {
            let (b0, b1) = (x[0], x[1]);
            if !(0.0..=1.0).contains(&b0) || !(0.0..=1.0).contains(&b1) {
                return f64::NEG_INFINITY;
            }
            let mid = acc_exponent(b0, b1);
            let last = acc_exponent(b1, delta);
            if mid == f64::NEG_INFINITY || last == f64::NEG_INFINITY {
                return f64::NEG_INFINITY;
            }
            self.outer.value(b0) + mid + last - h_nats(b0) - h_nats(b1)
        };
        let step = (b0max.min(b1max) / g as f64).max(1e-12);
        let mut best = top.best();
        for &(_, start) in top.items() {
            let p = nelder_mead::maximize(objective, start, step, self.opts.polish_xtol, 4000);
            if p.value > best.0 {
                best = (p.value, p.point);
            }
        }
        SpectralSample {
            delta,
            r: best.0,
            beta0: best.1[0],
            beta1: best.1[1],
        }
    }
}

#[inline]
fn h_nats_checked(p: f64) -> f64 {
    if (0.0..=1.0).contains(&p) {
        h_nats(p)
    } else {
        f64::NEG_INFINITY
    }
}

/// Keeps the `k` largest `(value, point)` pairs seen.
struct TopK {
    k: usize,
    items: Vec<(f64, [f64; 2])>,
}

impl TopK {
    fn new(k: usize) -> Self {
        Self {
            k,
            items: Vec::with_capacity(k + 1),
        }
    }

    fn offer(&mut self, value: f64, point: [f64; 2]) {
        if !value.is_finite() {
            return;
        }
        if self.items.len() == self.k && value <= self.items[self.k - 1].0 {
            return;
        }
        let pos = self.items.partition_point(|(v, _)| *v >= value);
        self.items.insert(pos, (value, point));
        self.items.truncate(self.k);
    }

    fn items(&self) -> &[(f64, [f64; 2])] {
        &self.items
    }

    fn best(&self) -> (f64, [f64; 2]) {
        self.items.first().copied().unwrap_or((0.0, [0.0, 0.0]))
    }
}

/// `r(δ)` with default optimizer settings.
pub fn spectral_shape(ens: &EnsembleSpec, delta: f64) -> Result<SpectralSample> {
    SpectralShape::new(ens, ShapeOptions::default())?.evaluate(delta)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeltaMinOptions {
    /// Detection threshold on `r`, nats per bit.
    pub epsilon: f64,
    /// Bisection stops when the bracket is narrower than this.
    pub resolution: f64,
    /// Step of the coarse scan starting at `δ = scan_step`.
    pub scan_step: f64,
    /// Also locate `δ_min` at `epsilon / 10` and `epsilon * 10`.
    pub sensitivity: bool,
}

impl Default for DeltaMinOptions {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            resolution: 1e-5,
            scan_step: 1e-3,
            sensitivity: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsilonSensitivity {
    pub epsilon: f64,
    pub delta_min: Option<f64>,
}

/// Growth-rate estimate and diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub ensemble: String,
    pub rate: f64,
    pub delta_min: f64,
    pub delta_gv: f64,
    pub epsilon: f64,
    pub resolution: f64,
    /// Final bisection bracket; `r ≤ ε` at the low end, `r > ε` at the high end.
    pub bracket: (f64, f64),
    pub r_at_delta_min: f64,
    pub grid_steps: usize,
    pub shape_evaluations: usize,
    pub sensitivity: Vec<EpsilonSensitivity>,
    /// `δ_min ≤ δ_GV ≤ 1/2`, reported, not enforced.
    pub ordering_ok: bool,
}

/// Smallest `δ` with `r(δ) > ε`: coarse scan upward from `scan_step`, then
/// bisection.
pub fn delta_min(ens: &EnsembleSpec, opts: DeltaMinOptions) -> Result<AnalysisReport> {
    let shape = SpectralShape::new(ens, ShapeOptions::default())?;
    delta_min_with(&shape, opts)
}

pub fn delta_min_with(shape: &SpectralShape, opts: DeltaMinOptions) -> Result<AnalysisReport> {
    if !(opts.epsilon > 0.0) || !(opts.resolution > 0.0) || !(opts.scan_step > 0.0) {
        return Err(Error::InvalidParameter(
            "epsilon, resolution and scan_step must be positive".into(),
        ));
    }
    let mut evaluations = 0usize;
    let mut r_at = |d: f64| -> f64 {
        evaluations += 1;
        shape.evaluate(d).map(|s| s.r).unwrap_or(f64::NEG_INFINITY)
    };

    // Coarse scan over (0, 1/2], stopping once every requested epsilon is exceeded.
    let eps_list: Vec<f64> = if opts.sensitivity {
        vec![opts.epsilon, opts.epsilon / 10.0, opts.epsilon * 10.0]
    } else {
        vec![opts.epsilon]
    };
    let max_eps = eps_list.iter().copied().fold(0.0, f64::max);
    let mut scan: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    let mut d = opts.scan_step;
    loop {
        let d_clamped = d.min(0.5);
        let r = r_at(d_clamped);
        scan.push((d_clamped, r));
        if r > max_eps || d_clamped >= 0.5 {
            break;
        }
        d += opts.scan_step;
    }

    let locate = |eps: f64, r_at: &mut dyn FnMut(f64) -> f64| -> Option<(f64, f64, f64)> {
        let idx = scan.iter().position(|&(_, r)| r > eps)?;
        let (mut lo, mut hi, mut r_hi) = (scan[idx - 1].0, scan[idx].0, scan[idx].1);
        while hi - lo > opts.resolution {
            let mid = 0.5 * (lo + hi);
            let r = r_at(mid);
            if r > eps {
                hi = mid;
                r_hi = r;
            } else {
                lo = mid;
            }
        }
        Some((lo, hi, r_hi))
    };

    let (lo, hi, r_hi) = locate(opts.epsilon, &mut r_at).ok_or(Error::NoPositiveGrowth {
        epsilon: opts.epsilon,
    })?;
    let sensitivity = eps_list
        .iter()
        .skip(1)
        .map(|&eps| EpsilonSensitivity {
            epsilon: eps,
            delta_min: locate(eps, &mut r_at).map(|(_, h, _)| h),
        })
        .collect();
    let delta_gv = gvb_delta(shape.rate)?;
    Ok(AnalysisReport {
        ensemble: shape.label.clone(),
        rate: shape.rate,
        delta_min: hi,
        delta_gv,
        epsilon: opts.epsilon,
        resolution: opts.resolution,
        bracket: (lo, hi),
        r_at_delta_min: r_hi,
        grid_steps: shape.opts.grid_steps,
        shape_evaluations: evaluations,
        sensitivity,
        ordering_ok: hi <= delta_gv && delta_gv <= 0.5,
    })
}
