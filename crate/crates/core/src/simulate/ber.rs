//! Bit/frame error rate simulation.
//!
//! Frame `f` at every `Eb/N0` point draws its message and noise from a seed
//! derived from `(master seed, f)`, so points share random numbers. Frames
//! run in fixed-size chunks on the worker pool and are folded back in frame
//! order; the stop rule is applied frame by frame, which makes the counts
//! independent of the worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{bpsk_awgn_into, mix_seed, with_workers, ChannelSpec};
use crate::codec::{encode_frame, turbo_decode, CodecSpec, DEFAULT_MAX_ITERATIONS};
use crate::{Error, Result};

const CHUNK: usize = 16;

/// What is being simulated.
#[derive(Debug, Clone)]
pub enum BerTarget {
    Coded(CodecSpec),
    /// Uncoded BPSK with hard decisions, in frames of `frame_bits` bits.
    Uncoded {
        frame_bits: usize,
    },
}

impl BerTarget {
    fn label(&self) -> String {
        match self {
            Self::Coded(c) => c.ensemble.family_label(),
            Self::Uncoded { .. } => "uncoded".into(),
        }
    }

    fn rate(&self) -> f64 {
        match self {
            Self::Coded(c) => c.ensemble.rate(),
            Self::Uncoded { .. } => 1.0,
        }
    }

    fn message_bits(&self) -> usize {
        match self {
            Self::Coded(c) => c.message_length(),
            Self::Uncoded { frame_bits } => *frame_bits,
        }
    }
}

/// Simulate until `min_frame_errors` frame errors or `max_frames` frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StopRule {
    pub min_frame_errors: u64,
    pub max_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_frame_errors: 100,
            max_frames: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BerOptions {
    pub stop: StopRule,
    pub max_iterations: usize,
    pub seed: u64,
    pub workers: usize,
}

impl Default for BerOptions {
    fn default() -> Self {
        Self {
            stop: StopRule::default(),
            max_iterations: DEFAULT_MAX_ITERATIONS,
            seed: 1,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BerPoint {
    pub ebn0_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub iter_mean: f64,
    /// 95% Wilson intervals.
    pub ber_interval: (f64, f64),
    pub fer_interval: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub ensemble: String,
    pub rate: f64,
    pub message_bits: usize,
    pub seed: u64,
    pub stop: StopRule,
    pub max_iterations: usize,
    pub points: Vec<BerPoint>,
}

/// 95% Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

struct FrameResult {
    bit_errors: u64,
    iterations: u64,
}

fn run_frame(
    target: &BerTarget,
    channel: &ChannelSpec,
    opts: &BerOptions,
    frame: u64,
) -> Result<FrameResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[opts.seed, frame]));
    let k = target.message_bits();
    let message: Vec<u8> = (0..k).map(|_| rng.random_range(0..2u8)).collect();
    match target {
        BerTarget::Uncoded { .. } => {
            let mut llr = vec![0.0; k];
            bpsk_awgn_into(&message, channel, &mut rng, &mut llr);
            let bit_errors = llr
                .iter()
                .zip(&message)
                .filter(|(&l, &b)| u8::from(l < 0.0) != b)
                .count();
            Ok(FrameResult {
                bit_errors: bit_errors as u64,
                iterations: 0,
            })
        }
        BerTarget::Coded(codec) => {
            let x = encode_frame(codec, &message)?;
            let mut llr = vec![0.0; x.len()];
            bpsk_awgn_into(&x, channel, &mut rng, &mut llr);
            let out = turbo_decode(codec, &llr, opts.max_iterations)?;
            let bit_errors = out
                .message
                .iter()
                .zip(&message)
                .filter(|(a, b)| a != b)
                .count();
            Ok(FrameResult {
                bit_errors: bit_errors as u64,
                iterations: out.iterations as u64,
            })
        }
    }
}

fn simulate_point(target: &BerTarget, ebn0_db: f64, opts: &BerOptions) -> Result<BerPoint> {
    let channel = ChannelSpec::new(ebn0_db, target.rate())?;
    let stop = opts.stop;
    let (mut frames, mut frame_errors, mut bit_errors, mut iterations) = (0u64, 0u64, 0u64, 0u64);
    'outer: while frames < stop.max_frames && frame_errors < stop.min_frame_errors {
        let first = frames;
        let count = (CHUNK as u64).min(stop.max_frames - first);
        let results: Vec<Result<FrameResult>> = (first..first + count)
            .into_par_iter()
            .map(|f| run_frame(target, &channel, opts, f))
            .collect();
        for r in results {
            let r = r?;
            frames += 1;
            bit_errors += r.bit_errors;
            frame_errors += u64::from(r.bit_errors > 0);
            iterations += r.iterations;
            if frame_errors >= stop.min_frame_errors {
                break 'outer;
            }
        }
    }
    let bits = frames * target.message_bits() as u64;
    Ok(BerPoint {
        ebn0_db,
        frames,
        bit_errors,
        frame_errors,
        ber: bit_errors as f64 / bits as f64,
        fer: frame_errors as f64 / frames as f64,
        iter_mean: iterations as f64 / frames as f64,
        ber_interval: wilson_interval(bit_errors, bits),
        fer_interval: wilson_interval(frame_errors, frames),
    })
}

pub fn ber_curve(target: &BerTarget, ebn0_db: &[f64], opts: &BerOptions) -> Result<SimReport> {
    if ebn0_db.is_empty() {
        return Err(Error::InvalidParameter("empty Eb/N0 list".into()));
    }
    if opts.stop.max_frames == 0 || opts.stop.min_frame_errors == 0 {
        return Err(Error::InvalidParameter(
            "stop rule needs max_frames >= 1 and min_frame_errors >= 1".into(),
        ));
    }
    if opts.max_iterations == 0 {
        return Err(Error::out_of_range("max_iterations", 0, ">= 1"));
    }
    if let BerTarget::Uncoded { frame_bits: 0 } = target {
        return Err(Error::out_of_range("frame bits", 0, ">= 1"));
    }
    let points = with_workers(opts.workers, || {
        ebn0_db
            .iter()
            .map(|&db| simulate_point(target, db, opts))
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(SimReport {
        ensemble: target.label(),
        rate: target.rate(),
        message_bits: target.message_bits(),
        seed: opts.seed,
        stop: opts.stop,
        max_iterations: opts.max_iterations,
        points,
    })
}

/// `Q(x) = erfc(x/√2)/2`.
pub fn gaussian_q(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}
