//! EXIT transfer curves and the tunnel-based convergence threshold.
//!
//! The three-component chain is reduced to two curves. The outer curve is
//! the MAP block decoder fed consistent-Gaussian a-priori LLRs on all of its
//! codeword bits. The inner curve treats both accumulators, `π2` and the
//! channel as one super-decoder: a-priori on the first accumulator's inputs,
//! a fixed number of inner↔middle exchanges, extrinsic measured on those
//! same inputs. Both are measured by Monte Carlo on the actual interleavers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    bpsk_awgn_into, bpsk_capacity_threshold, gaussian_apriori_into, j_inverse,
    mi_estimate_unchecked, mix_seed, with_workers, ChannelSpec,
};
use crate::codec::{
    accumulator_siso_into, encode_frame_trace, BlockScratch, CodecSpec, MESSAGE_CLIP,
};
use crate::{EnsembleSpec, Error, Result};

/// `0, 0.05, …, 0.95, 0.975, 0.99, 0.999`.
pub const DEFAULT_EXIT_GRID: [f64; 23] = [
    0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8,
    0.85, 0.9, 0.95, 0.975, 0.99, 0.999,
];

const OUTER_TAG: u64 = 0x6f75_7465;
const INNER_TAG: u64 = 0x696e_6e65;

pub const METHODOLOGY: &str =
    "two-curve reduction: outer MAP block decoder vs. inner super-decoder \
(both accumulators, pi2 and channel) with consistent-Gaussian a-priori LLRs, curves measured by \
Monte Carlo on fixed interleavers with common random numbers across Eb/N0; tunnel open when the \
inner curve exceeds the inverted outer curve at every grid point";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExitComponent {
    Outer,
    InnerSuperDecoder,
}

/// Measured `(I_A, I_E)` pairs sorted by `I_A`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitCurve {
    pub component: ExitComponent,
    pub ebn0_db: Option<f64>,
    pub samples: Vec<(f64, f64)>,
}

impl ExitCurve {
    /// Smallest `I_A` at which the piecewise-linear curve, made monotone and
    /// closed with `(1, 1)`, reaches `target`.
    pub fn inverse(&self, target: f64) -> f64 {
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(self.samples.len() + 1);
        let mut running = 0.0f64;
        for &(x, y) in &self.samples {
            running = running.max(y);
            pts.push((x, running));
        }
        if pts.last().is_none_or(|p| p.0 < 1.0) {
            pts.push((1.0, 1.0f64.max(running)));
        }
        if target <= pts[0].1 {
            return pts[0].0;
        }
        for w in pts.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if target <= y1 {
                return if y1 > y0 {
                    x0 + (x1 - x0) * (target - y0) / (y1 - y0)
                } else {
                    x0
                };
            }
        }
        1.0
    }
}

/// Monte-Carlo settings shared by the EXIT curve and threshold routines.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitOptions {
    pub grid: Vec<f64>,
    /// Frames of `N` bits averaged per grid point.
    pub frames_per_point: usize,
    pub inner_activations: usize,
    pub step_db: f64,
    pub seed: u64,
    pub workers: usize,
    /// Repeat the threshold search with 5 and 20 inner activations.
    pub activation_sensitivity: bool,
}

impl Default for ExitOptions {
    fn default() -> Self {
        Self {
            grid: DEFAULT_EXIT_GRID.to_vec(),
            frames_per_point: 4,
            inner_activations: 10,
            step_db: 0.05,
            seed: 1,
            workers: 0,
            activation_sensitivity: false,
        }
    }
}

impl ExitOptions {
    fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::InvalidParameter("empty I_A grid".into()));
        }
        if let Some(&x) = self.grid.iter().find(|x| !(0.0..1.0).contains(*x)) {
            return Err(Error::out_of_range("I_A grid point", x, "[0, 1)"));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "I_A grid must be strictly increasing".into(),
            ));
        }
        if self.frames_per_point == 0 {
            return Err(Error::out_of_range("frames per point", 0, ">= 1"));
        }
        if self.inner_activations == 0 {
            return Err(Error::out_of_range("inner activations", 0, ">= 1"));
        }
        if !(self.step_db > 0.0) {
            return Err(Error::out_of_range("dB step", self.step_db, "> 0"));
        }
        Ok(())
    }
}

fn random_message(rng: &mut ChaCha8Rng, k: usize) -> Vec<u8> {
    (0..k).map(|_| rng.random_range(0..2u8)).collect()
}

/// Averages per-frame MI values in frame order for every grid point.
fn measure_grid(
    opts: &ExitOptions,
    measure: impl Fn(usize, usize) -> f64 + Sync + Send,
) -> Result<Vec<(f64, f64)>> {
    let frames = opts.frames_per_point;
    let tasks: Vec<(usize, usize)> = (0..opts.grid.len())
        .flat_map(|j| (0..frames).map(move |f| (j, f)))
        .collect();
    let values: Vec<f64> = with_workers(opts.workers, || {
        tasks.par_iter().map(|&(j, f)| measure(j, f)).collect()
    })?;
    Ok(opts
        .grid
        .iter()
        .zip(values.chunks(frames))
        .map(|(&x, v)| (x, (v.iter().sum::<f64>() / frames as f64).clamp(0.0, 1.0)))
        .collect())
}

fn sigmas(grid: &[f64]) -> Result<Vec<f64>> {
    grid.iter().map(|&x| j_inverse(x)).collect()
}

pub fn outer_exit_curve(codec: &CodecSpec, opts: &ExitOptions) -> Result<ExitCurve> {
    opts.validate()?;
    let sig = sigmas(&opts.grid)?;
    let siso = codec.outer_siso();
    let outer = &codec.ensemble.outer;
    let samples = measure_grid(opts, |j, f| {
        let mut rng =
            ChaCha8Rng::seed_from_u64(mix_seed(&[opts.seed, OUTER_TAG, j as u64, f as u64]));
        let n = codec.block_length();
        let mut word = vec![0u8; n];
        for cw in word.chunks_mut(outer.n) {
            let msg = random_message(&mut rng, outer.k);
            outer.encode_into(&msg, cw);
        }
        let mut apriori = vec![0.0; n];
        gaussian_apriori_into(&word, sig[j], &mut rng, &mut apriori);
        let mut ext = vec![0.0; n];
        let mut post = vec![0.0; n];
        let mut scratch = BlockScratch::default();
        for ((a, e), p) in apriori
            .chunks(outer.n)
            .zip(ext.chunks_mut(outer.n))
            .zip(post.chunks_mut(outer.n))
        {
            siso.decode_into(a, e, p, &mut scratch);
        }
        mi_estimate_unchecked(&ext, &word)
    })?;
    Ok(ExitCurve {
        component: ExitComponent::Outer,
        ebn0_db: None,
        samples,
    })
}

fn clip_all(v: &mut [f64]) {
    v.iter_mut()
        .for_each(|x| *x = x.clamp(-MESSAGE_CLIP, MESSAGE_CLIP));
}

pub fn inner_exit_curve(codec: &CodecSpec, ebn0_db: f64, opts: &ExitOptions) -> Result<ExitCurve> {
    opts.validate()?;
    let channel = ChannelSpec::new(ebn0_db, codec.ensemble.rate())?;
    let sig = sigmas(&opts.grid)?;
    let samples = measure_grid(opts, |j, f| {
        let mut rng =
            ChaCha8Rng::seed_from_u64(mix_seed(&[opts.seed, INNER_TAG, j as u64, f as u64]));
        inner_frame_mi(codec, &channel, sig[j], opts.inner_activations, &mut rng)
    })?;
    Ok(ExitCurve {
        component: ExitComponent::InnerSuperDecoder,
        ebn0_db: Some(ebn0_db),
        samples,
    })
}

fn inner_frame_mi(
    codec: &CodecSpec,
    channel: &ChannelSpec,
    sigma_l: f64,
    activations: usize,
    rng: &mut ChaCha8Rng,
) -> f64 {
    let n = codec.block_length();
    let message = random_message(rng, codec.message_length());
    let trace = encode_frame_trace(codec, &message).expect("message length matches codec");
    let targets = codec.pi1().interleave(&trace.outer);
    let mut apriori = vec![0.0; n];
    gaussian_apriori_into(&targets, sigma_l, rng, &mut apriori);
    let mut llr = vec![0.0; n];
    bpsk_awgn_into(&trace.frame, channel, rng, &mut llr);

    let mut ext_in = vec![0.0; n];
    let mut scratch_out = vec![0.0; n];
    let mut alpha = Vec::with_capacity(n + 1);
    match codec.pi2() {
        None => {
            accumulator_siso_into(&llr, &apriori, &mut ext_in, &mut scratch_out, &mut alpha);
        }
        Some(pi2) => {
            let mut mid_out_ext = vec![0.0; n];
            let mut buf_a = vec![0.0; n];
            let mut buf_b = vec![0.0; n];
            for _ in 0..activations {
                pi2.interleave_into(&mid_out_ext, &mut buf_a);
                accumulator_siso_into(&llr, &buf_a, &mut buf_b, &mut scratch_out, &mut alpha);
                clip_all(&mut buf_b);
                pi2.deinterleave_into(&buf_b, &mut buf_a);
                accumulator_siso_into(&buf_a, &apriori, &mut ext_in, &mut mid_out_ext, &mut alpha);
                clip_all(&mut mid_out_ext);
            }
        }
    }
    clip_all(&mut ext_in);
    mi_estimate_unchecked(&ext_in, &targets)
}

pub fn exit_curves(
    codec: &CodecSpec,
    ebn0_db: f64,
    opts: &ExitOptions,
) -> Result<(ExitCurve, ExitCurve)> {
    Ok((
        outer_exit_curve(codec, opts)?,
        inner_exit_curve(codec, ebn0_db, opts)?,
    ))
}

/// Smallest `T_in(x) − T_out⁻¹(x)` over the inner curve's grid, with the
/// `I_A` at which it occurs.
pub fn tunnel_margin(inner: &ExitCurve, outer: &ExitCurve) -> (f64, f64) {
    inner
        .samples
        .iter()
        .map(|&(x, y)| (y - outer.inverse(x), x))
        .fold(
            (f64::INFINITY, 0.0),
            |best, m| if m.0 < best.0 { m } else { best },
        )
}

pub fn tunnel_is_open(inner: &ExitCurve, outer: &ExitCurve) -> bool {
    tunnel_margin(inner, outer).0 > 0.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TunnelCheck {
    pub ebn0_db: f64,
    pub open: bool,
    pub min_margin: f64,
    pub worst_i_a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActivationSensitivity {
    pub inner_activations: usize,
    pub threshold_db: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdReport {
    pub ensemble: String,
    pub rate: f64,
    pub block_length: usize,
    pub threshold_db: f64,
    pub capacity_db: f64,
    pub gap_db: f64,
    pub window_db: (f64, f64),
    pub options: ExitOptions,
    pub evaluations: Vec<TunnelCheck>,
    pub outer: ExitCurve,
    pub inner_at_threshold: ExitCurve,
    pub sensitivity: Vec<ActivationSensitivity>,
    pub methodology: &'static str,
}

struct Search {
    threshold_db: f64,
    inner: ExitCurve,
    evaluations: Vec<TunnelCheck>,
}

fn bisect(
    codec: &CodecSpec,
    outer: &ExitCurve,
    lo_db: f64,
    hi_db: f64,
    opts: &ExitOptions,
) -> Result<Search> {
    let steps = ((hi_db - lo_db) / opts.step_db + 1e-9).floor() as usize;
    // Rounded so grid values print cleanly.
    let at = |i: usize| ((lo_db + i as f64 * opts.step_db) * 1e9).round() / 1e9;
    let mut evaluations = Vec::new();
    let mut check = |i: usize| -> Result<(bool, ExitCurve)> {
        let ebn0 = at(i);
        let inner = inner_exit_curve(codec, ebn0, opts)?;
        let (margin, worst) = tunnel_margin(&inner, outer);
        evaluations.push(TunnelCheck {
            ebn0_db: ebn0,
            open: margin > 0.0,
            min_margin: margin,
            worst_i_a: worst,
        });
        Ok((margin > 0.0, inner))
    };
    let (open_hi, mut inner_hi) = check(steps)?;
    if !open_hi {
        return Err(Error::NoOpenTunnel {
            lo_db,
            hi_db: at(steps),
        });
    }
    if check(0)?.0 {
        return Err(Error::NoBracket(format!(
            "tunnel already open at the window start {lo_db} dB"
        )));
    }
    let (mut lo, mut hi) = (0usize, steps);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        let (open, inner) = check(mid)?;
        if open {
            hi = mid;
            inner_hi = inner;
        } else {
            lo = mid;
        }
    }
    evaluations.sort_by(|a, b| a.ebn0_db.total_cmp(&b.ebn0_db));
    Ok(Search {
        threshold_db: at(hi),
        inner: inner_hi,
        evaluations,
    })
}

/// Smallest `Eb/N0` on the `step_db` grid over `[lo_db, hi_db]` with an
/// open tunnel, located by bisection on the grid index (the tunnel margin
/// is nondecreasing in `Eb/N0` under common random numbers). The
/// interleavers are drawn from `opts.seed`.
pub fn threshold_search(
    ensemble: &EnsembleSpec,
    lo_db: f64,
    hi_db: f64,
    opts: &ExitOptions,
) -> Result<ThresholdReport> {
    opts.validate()?;
    if !(lo_db.is_finite() && hi_db.is_finite() && hi_db > lo_db) {
        return Err(Error::InvalidParameter(format!(
            "invalid dB window [{lo_db}, {hi_db}]"
        )));
    }
    let codec = CodecSpec::random(ensemble.clone(), opts.seed)?;
    let outer = outer_exit_curve(&codec, opts)?;
    let main = bisect(&codec, &outer, lo_db, hi_db, opts)?;
    let mut sensitivity = Vec::new();
    if opts.activation_sensitivity && ensemble.stages() == 2 {
        for activations in [5, 20] {
            let alt = ExitOptions {
                inner_activations: activations,
                ..opts.clone()
            };
            sensitivity.push(ActivationSensitivity {
                inner_activations: activations,
                threshold_db: bisect(&codec, &outer, lo_db, hi_db, &alt)
                    .ok()
                    .map(|s| s.threshold_db),
            });
        }
    }
    let rate = ensemble.rate();
    let capacity_db = bpsk_capacity_threshold(rate)?;
    Ok(ThresholdReport {
        ensemble: ensemble.family_label(),
        rate,
        block_length: ensemble.block_length(),
        threshold_db: main.threshold_db,
        capacity_db,
        gap_db: main.threshold_db - capacity_db,
        window_db: (lo_db, hi_db),
        options: opts.clone(),
        evaluations: main.evaluations,
        outer,
        inner_at_threshold: main.inner,
        sensitivity,
        methodology: METHODOLOGY,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear_code::{build_code, CodeParams};

    fn codec(m: u32, l: usize, stages: usize) -> CodecSpec {
        let ens =
            EnsembleSpec::new(build_code(&CodeParams::Hamming { m }).unwrap(), l, stages).unwrap();
        CodecSpec::random(ens, 4).unwrap()
    }

    fn quick() -> ExitOptions {
        ExitOptions {
            frames_per_point: 2,
            workers: 1,
            ..ExitOptions::default()
        }
    }

    #[test]
    fn outer_curve_endpoints() {
        let c = codec(3, 200, 2);
        let opts = ExitOptions {
            grid: vec![0.0, 0.5, 0.9999],
            ..quick()
        };
        let curve = outer_exit_curve(&c, &opts).unwrap();
        assert!(curve.samples[0].1 < 1e-9);
        assert!(curve.samples[2].1 > 0.9999);
        assert!(curve.samples[1].1 > 0.0 && curve.samples[1].1 < 1.0);
    }

    #[test]
    fn inner_curve_grows_with_snr() {
        let c = codec(4, 60, 2);
        let opts = ExitOptions {
            grid: vec![0.3],
            frames_per_point: 8,
            ..quick()
        };
        let v: Vec<f64> = [1.0, 2.0, 3.0]
            .iter()
            .map(|&db| inner_exit_curve(&c, db, &opts).unwrap().samples[0].1)
            .collect();
        assert!(v[1] >= v[0] - 0.01 && v[2] >= v[1] - 0.01, "{v:?}");
    }

    #[test]
    fn inverse_is_monotone_interpolation() {
        let curve = ExitCurve {
            component: ExitComponent::Outer,
            ebn0_db: None,
            samples: vec![(0.0, 0.0), (0.5, 0.2), (0.9, 0.8)],
        };
        assert_eq!(curve.inverse(0.0), 0.0);
        assert!((curve.inverse(0.1) - 0.25).abs() < 1e-12);
        assert!((curve.inverse(0.5) - 0.7).abs() < 1e-12);
        assert!((curve.inverse(0.9) - 0.95).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_grid() {
        let c = codec(3, 4, 2);
        for grid in [vec![], vec![0.5, 0.2], vec![1.0]] {
            let opts = ExitOptions { grid, ..quick() };
            assert!(outer_exit_curve(&c, &opts).is_err());
        }
    }

    #[test]
    fn deterministic_across_workers() {
        let c = codec(3, 30, 2);
        let a = inner_exit_curve(
            &c,
            2.0,
            &ExitOptions {
                workers: 1,
                ..quick()
            },
        )
        .unwrap();
        let b = inner_exit_curve(
            &c,
            2.0,
            &ExitOptions {
                workers: 3,
                ..quick()
            },
        )
        .unwrap();
        assert_eq!(a, b);
    }
}
