//! Encoder chain and iterative decoder.
//!
//! ```text
//! message (K) → outer code ×L → π1 → acc → [π2 → acc] → frame (N)
//! ```
//!
//! LLRs everywhere use `L = ln(P(0) / P(1))`.

mod accumulator;
mod block;
mod interleaver;

use std::ops::Deref;

use serde::Serialize;

pub(crate) use accumulator::accumulator_siso_into;
pub use accumulator::{accumulate_bits, accumulator_siso, AccumulatorExtrinsics};
pub(crate) use block::Scratch as BlockScratch;
pub use block::{BlockSiso, BlockSisoOutput, MAX_ENUMERATION_K, MAX_TRELLIS_REDUNDANCY};
pub use interleaver::Interleaver;

use crate::{EnsembleSpec, Error, Result};

/// Stream ids of the interleaver PRNG draws.
pub const PI1_STREAM: u64 = 1;
pub const PI2_STREAM: u64 = 2;

/// Extrinsic messages exchanged between component decoders are clipped to
/// this magnitude so a saturated (`±∞`) message cannot lock a wrong decision.
pub const MESSAGE_CLIP: f64 = 60.0;

pub const DEFAULT_MAX_ITERATIONS: usize = 30;

/// A frame of LLRs; NaN is rejected, `±∞` is allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrFrame(Vec<f64>);

impl LlrFrame {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|x| x.is_nan()) {
            return Err(Error::NanInput("LLR frame"));
        }
        Ok(Self(values))
    }

    /// Perfect knowledge of `bits`: `+∞` for 0, `-∞` for 1.
    pub fn from_hard_bits(bits: &[u8]) -> Self {
        Self(
            bits.iter()
                .map(|&b| {
                    if b == 0 {
                        f64::INFINITY
                    } else {
                        f64::NEG_INFINITY
                    }
                })
                .collect(),
        )
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn hard_decisions(&self) -> Vec<u8> {
        self.0.iter().map(|&l| u8::from(l < 0.0)).collect()
    }
}

impl Deref for LlrFrame {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// A concrete code from the ensemble: the ensemble plus fixed interleavers.
#[derive(Debug, Clone)]
pub struct CodecSpec {
    pub ensemble: EnsembleSpec,
    pi1: Interleaver,
    pi2: Option<Interleaver>,
    siso: BlockSiso,
}

impl CodecSpec {
    pub fn new(ensemble: EnsembleSpec, pi1: Interleaver, pi2: Option<Interleaver>) -> Result<Self> {
        let n = ensemble.block_length();
        if pi1.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: pi1.len(),
            });
        }
        match (&pi2, ensemble.stages()) {
            (Some(p), 2) if p.len() != n => {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: p.len(),
                })
            }
            (None, 2) => return Err(Error::InvalidParameter("two-stage codec needs π2".into())),
            (Some(_), 1) => {
                return Err(Error::InvalidParameter(
                    "single-stage codec takes no π2".into(),
                ))
            }
            _ => {}
        }
        let siso = BlockSiso::new(&ensemble.outer)?;
        Ok(Self {
            ensemble,
            pi1,
            pi2,
            siso,
        })
    }

    /// Draws π1 (stream [`PI1_STREAM`]) and, for two stages, π2 (stream
    /// [`PI2_STREAM`]) from `seed`.
    pub fn random(ensemble: EnsembleSpec, seed: u64) -> Result<Self> {
        let n = ensemble.block_length();
        let pi1 = Interleaver::random(n, seed, PI1_STREAM);
        let pi2 = (ensemble.stages() == 2).then(|| Interleaver::random(n, seed, PI2_STREAM));
        Self::new(ensemble, pi1, pi2)
    }

    pub fn pi1(&self) -> &Interleaver {
        &self.pi1
    }

    pub fn pi2(&self) -> Option<&Interleaver> {
        self.pi2.as_ref()
    }

    pub fn block_length(&self) -> usize {
        self.ensemble.block_length()
    }

    pub fn message_length(&self) -> usize {
        self.ensemble.message_length()
    }

    pub(crate) fn outer_siso(&self) -> &BlockSiso {
        &self.siso
    }
}

/// Intermediate words of one encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameTrace {
    /// Concatenated outer codewords (`C0` output).
    pub outer: Vec<u8>,
    /// First accumulator output.
    pub first: Vec<u8>,
    /// Transmitted frame.
    pub frame: Vec<u8>,
}

pub fn encode_frame(codec: &CodecSpec, message: &[u8]) -> Result<Vec<u8>> {
    Ok(encode_frame_trace(codec, message)?.frame)
}

pub fn encode_frame_trace(codec: &CodecSpec, message: &[u8]) -> Result<FrameTrace> {
    let k = codec.message_length();
    if message.len() != k {
        return Err(Error::LengthMismatch {
            expected: k,
            got: message.len(),
        });
    }
    let outer_code = &codec.ensemble.outer;
    let n = codec.block_length();
    let mut outer = vec![0u8; n];
    for (msg, cw) in message
        .chunks(outer_code.k)
        .zip(outer.chunks_mut(outer_code.n))
    {
        outer_code.encode_into(msg, cw);
    }
    let mut buf = codec.pi1.interleave(&outer);
    let mut first = vec![0u8; n];
    accumulator::accumulate_into(&buf, &mut first);
    let frame = match &codec.pi2 {
        Some(pi2) => {
            pi2.interleave_into(&first, &mut buf);
            let mut out = vec![0u8; n];
            accumulator::accumulate_into(&buf, &mut out);
            out
        }
        None => first.clone(),
    };
    Ok(FrameTrace {
        outer,
        first,
        frame,
    })
}

/// Per-iteration decoder statistics.
#[derive(Debug, Clone, Serialize)]
pub struct IterationStats {
    /// Outer codeword bits whose hard decision changed in this iteration.
    pub changed_decisions: usize,
    pub mean_abs_message_llr: f64,
}

#[derive(Debug, Clone)]
pub struct DecodeOutcome {
    pub message: Vec<u8>,
    pub message_posteriors: Vec<f64>,
    pub iterations: usize,
    pub diagnostics: Vec<IterationStats>,
}

#[inline]
fn clip(x: f64) -> f64 {
    x.clamp(-MESSAGE_CLIP, MESSAGE_CLIP)
}

/// Iterative decoding, innermost component first in every iteration:
/// inner accumulator → π2⁻¹ → middle accumulator → π1⁻¹ → outer SISO per
/// block, then extrinsics travel back down. Stops after `max_iterations` or
/// once an iteration changes no hard decision on the outer codeword bits.
/// The decoded message is the sign of the outer message-bit posteriors.
pub fn turbo_decode(
    codec: &CodecSpec,
    channel: &[f64],
    max_iterations: usize,
) -> Result<DecodeOutcome> {
    let n = codec.block_length();
    if channel.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: channel.len(),
        });
    }
    if channel.iter().any(|x| x.is_nan()) {
        return Err(Error::NanInput("channel LLRs"));
    }
    if max_iterations == 0 {
        return Err(Error::out_of_range("max_iterations", 0, ">= 1"));
    }
    let mut dec = TurboState::new(codec);
    let mut diagnostics = Vec::new();
    let mut decisions: Option<Vec<u8>> = None;
    let mut iterations = 0;
    for _ in 0..max_iterations {
        dec.iterate(codec, channel);
        iterations += 1;
        let now: Vec<u8> = dec.outer_post.iter().map(|&l| u8::from(l < 0.0)).collect();
        let changed = decisions.as_ref().map_or(n, |prev| {
            prev.iter().zip(&now).filter(|(a, b)| a != b).count()
        });
        let msg_llrs = dec.message_posteriors(codec);
        diagnostics.push(IterationStats {
            changed_decisions: changed,
            mean_abs_message_llr: msg_llrs.iter().map(|x| x.abs().min(1e300)).sum::<f64>()
                / msg_llrs.len().max(1) as f64,
        });
        decisions = Some(now);
        if changed == 0 {
            break;
        }
    }
    let message_posteriors = dec.message_posteriors(codec);
    Ok(DecodeOutcome {
        message: message_posteriors
            .iter()
            .map(|&l| u8::from(l < 0.0))
            .collect(),
        message_posteriors,
        iterations,
        diagnostics,
    })
}

/// Decoder buffers for one frame.
pub(crate) struct TurboState {
    /// Extrinsic of the middle accumulator on its outputs (in π2-domain order before interleaving).
    mid_out_ext: Vec<f64>,
    /// Outer extrinsic on C0 bits.
    outer_ext: Vec<f64>,
    /// Outer posterior on C0 bits.
    outer_post: Vec<f64>,
    buf_a: Vec<f64>,
    buf_b: Vec<f64>,
    buf_c: Vec<f64>,
    buf_d: Vec<f64>,
    alpha: Vec<[f64; 2]>,
    block: block::Scratch,
}

impl TurboState {
    pub(crate) fn new(codec: &CodecSpec) -> Self {
        let n = codec.block_length();
        Self {
            mid_out_ext: vec![0.0; n],
            outer_ext: vec![0.0; n],
            outer_post: vec![0.0; n],
            buf_a: vec![0.0; n],
            buf_b: vec![0.0; n],
            buf_c: vec![0.0; n],
            buf_d: vec![0.0; n],
            alpha: Vec::with_capacity(n + 1),
            block: block::Scratch::default(),
        }
    }

    fn iterate(&mut self, codec: &CodecSpec, channel: &[f64]) {
        // A-priori on the C1 inputs: π1(outer extrinsic).
        codec.pi1.interleave_into(&self.outer_ext, &mut self.buf_c);
        match &codec.pi2 {
            Some(pi2) => {
                // Inner accumulator: channel on outputs, π2(middle output extrinsic) on inputs.
                pi2.interleave_into(&self.mid_out_ext, &mut self.buf_a);
                accumulator::accumulator_siso_into(
                    channel,
                    &self.buf_a,
                    &mut self.buf_b,
                    &mut self.buf_d,
                    &mut self.alpha,
                );
                self.buf_b.iter_mut().for_each(|x| *x = clip(*x));
                pi2.deinterleave_into(&self.buf_b, &mut self.buf_a);
                // Middle accumulator, two-sided.
                accumulator::accumulator_siso_into(
                    &self.buf_a,
                    &self.buf_c,
                    &mut self.buf_b,
                    &mut self.mid_out_ext,
                    &mut self.alpha,
                );
                self.mid_out_ext.iter_mut().for_each(|x| *x = clip(*x));
            }
            None => {
                accumulator::accumulator_siso_into(
                    channel,
                    &self.buf_c,
                    &mut self.buf_b,
                    &mut self.buf_d,
                    &mut self.alpha,
                );
            }
        }
        self.buf_b.iter_mut().for_each(|x| *x = clip(*x));
        // A-priori on C0 bits.
        codec.pi1.deinterleave_into(&self.buf_b, &mut self.buf_a);
        let n_outer = codec.ensemble.outer.n;
        let siso = codec.outer_siso();
        for ((apriori, ext), post) in self
            .buf_a
            .chunks(n_outer)
            .zip(self.outer_ext.chunks_mut(n_outer))
            .zip(self.outer_post.chunks_mut(n_outer))
        {
            siso.decode_into(apriori, ext, post, &mut self.block);
        }
        self.outer_ext.iter_mut().for_each(|x| *x = clip(*x));
    }

    fn message_posteriors(&self, codec: &CodecSpec) -> Vec<f64> {
        let outer = &codec.ensemble.outer;
        self.outer_post
            .chunks(outer.n)
            .flat_map(|block| outer.info_positions.iter().map(move |&p| block[p]))
            .collect()
    }
}
