//! Bitwise MAP decoding of the outer block code.
//!
//! Small codes (`k ≤ 16` and `2^k ≤ 2^(n−k)`) are decoded by exact
//! log-domain enumeration of all codewords. Otherwise a syndrome trellis
//! with `2^(n−k)` states is used, run in the probability domain with
//! per-section normalization; both compute the same exact posteriors.

use super::accumulator::{bit_log_probs, log_ratio};
use crate::linear_code::BlockCodeSpec;
use crate::logmath::LogSum;
use crate::{Error, Result};

pub const MAX_ENUMERATION_K: usize = 16;
pub const MAX_TRELLIS_REDUNDANCY: usize = 16;

/// Extrinsic LLRs on codeword bits and posterior LLRs on message bits.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSisoOutput {
    pub extrinsic: Vec<f64>,
    pub message_posteriors: Vec<f64>,
}

#[derive(Debug, Clone)]
enum Engine {
    Enumeration {
        codewords: Vec<Vec<u8>>,
    },
    Trellis {
        column_syndromes: Vec<u32>,
        states: usize,
    },
}

/// Reusable MAP decoder for one outer code.
#[derive(Debug, Clone)]
pub struct BlockSiso {
    n: usize,
    info_positions: Vec<usize>,
    engine: Engine,
}

impl BlockSiso {
    pub fn new(code: &BlockCodeSpec) -> Result<Self> {
        let r = code.n - code.k;
        let engine = if code.k <= MAX_ENUMERATION_K && code.k <= r {
            Self::enumeration(code)
        } else if r <= MAX_TRELLIS_REDUNDANCY {
            Self::trellis(code)
        } else if code.k <= MAX_ENUMERATION_K {
            Self::enumeration(code)
        } else {
            return Err(Error::TooLargeForEnumeration {
                k: code.k,
                max: MAX_ENUMERATION_K,
            });
        };
        Ok(Self {
            n: code.n,
            info_positions: code.info_positions.clone(),
            engine,
        })
    }

    /// Forces the enumeration engine (`k ≤ 16`).
    pub fn with_enumeration(code: &BlockCodeSpec) -> Result<Self> {
        if code.k > MAX_ENUMERATION_K {
            return Err(Error::TooLargeForEnumeration {
                k: code.k,
                max: MAX_ENUMERATION_K,
            });
        }
        Ok(Self {
            n: code.n,
            info_positions: code.info_positions.clone(),
            engine: Self::enumeration(code),
        })
    }

    /// Forces the syndrome-trellis engine (`n − k ≤ 16`).
    pub fn with_trellis(code: &BlockCodeSpec) -> Result<Self> {
        if code.n - code.k > MAX_TRELLIS_REDUNDANCY {
            return Err(Error::InvalidParameter(format!(
                "syndrome trellis needs n - k <= {MAX_TRELLIS_REDUNDANCY}"
            )));
        }
        Ok(Self {
            n: code.n,
            info_positions: code.info_positions.clone(),
            engine: Self::trellis(code),
        })
    }

    fn enumeration(code: &BlockCodeSpec) -> Engine {
        let codewords = (0u32..(1 << code.k))
            .map(|m| {
                let msg: Vec<u8> = (0..code.k).map(|i| ((m >> i) & 1) as u8).collect();
                let mut cw = vec![0u8; code.n];
                code.encode_into(&msg, &mut cw);
                cw
            })
            .collect();
        Engine::Enumeration { codewords }
    }

    fn trellis(code: &BlockCodeSpec) -> Engine {
        let column_syndromes = (0..code.n)
            .map(|j| {
                code.parity_check
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (row, h)| acc | ((h[j] as u32) << row))
            })
            .collect();
        Engine::Trellis {
            column_syndromes,
            states: 1 << (code.n - code.k),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn uses_trellis(&self) -> bool {
        matches!(self.engine, Engine::Trellis { .. })
    }

    pub fn decode(&self, apriori: &[f64]) -> Result<BlockSisoOutput> {
        if apriori.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: apriori.len(),
            });
        }
        if apriori.iter().any(|x| x.is_nan()) {
            return Err(Error::NanInput("block a-priori LLRs"));
        }
        let mut extrinsic = vec![0.0; self.n];
        let mut posterior = vec![0.0; self.n];
        let mut scratch = Scratch::default();
        self.decode_into(apriori, &mut extrinsic, &mut posterior, &mut scratch);
        Ok(BlockSisoOutput {
            extrinsic,
            message_posteriors: self.info_positions.iter().map(|&p| posterior[p]).collect(),
        })
    }

    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    /// Unchecked; writes extrinsic and full posterior LLRs per codeword bit.
    pub(crate) fn decode_into(
        &self,
        apriori: &[f64],
        extrinsic: &mut [f64],
        posterior: &mut [f64],
        scratch: &mut Scratch,
    ) {
        match &self.engine {
            Engine::Enumeration { codewords } => {
                enumerate_map(codewords, apriori, extrinsic, posterior)
            }
            Engine::Trellis {
                column_syndromes,
                states,
            } => trellis_map(
                column_syndromes,
                *states,
                apriori,
                extrinsic,
                posterior,
                scratch,
            ),
        }
    }
}

#[derive(Debug, Default)]
pub(crate) struct Scratch {
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

fn enumerate_map(
    codewords: &[Vec<u8>],
    apriori: &[f64],
    extrinsic: &mut [f64],
    posterior: &mut [f64],
) {
    let n = apriori.len();
    let lp: Vec<[f64; 2]> = apriori.iter().map(|&l| bit_log_probs(l)).collect();
    let mut ext_acc = vec![[LogSum::new(); 2]; n];
    let mut post_acc = vec![[LogSum::new(); 2]; n];
    for cw in codewords {
        // Finite part of the metric and the positions of -∞ factors.
        let mut finite = 0.0;
        let mut blocked = 0usize;
        let mut blocked_at = usize::MAX;
        for (j, &b) in cw.iter().enumerate() {
            let v = lp[j][b as usize];
            if v == f64::NEG_INFINITY {
                blocked += 1;
                blocked_at = j;
            } else {
                finite += v;
            }
        }
        for (j, &b) in cw.iter().enumerate() {
            let b = b as usize;
            let excl = match blocked {
                0 => finite - lp[j][b],
                1 if blocked_at == j => finite,
                _ => f64::NEG_INFINITY,
            };
            ext_acc[j][b].add(excl);
            if blocked == 0 {
                post_acc[j][b].add(finite);
            }
        }
    }
    for j in 0..n {
        extrinsic[j] = log_ratio(ext_acc[j][0].value(), ext_acc[j][1].value());
        posterior[j] = log_ratio(post_acc[j][0].value(), post_acc[j][1].value());
    }
}

/// Unnormalized bit probabilities `[P(0), P(1)]` up to a common factor.
#[inline]
fn bit_weights(llr: f64) -> [f64; 2] {
    if llr >= 0.0 {
        [1.0, (-llr).exp()]
    } else {
        [llr.exp(), 1.0]
    }
}

#[inline]
fn ratio(zero: f64, one: f64) -> f64 {
    if zero == 0.0 && one == 0.0 {
        0.0
    } else {
        (zero / one).ln()
    }
}

fn trellis_map(
    columns: &[u32],
    states: usize,
    apriori: &[f64],
    extrinsic: &mut [f64],
    posterior: &mut [f64],
    scratch: &mut Scratch,
) {
    let n = apriori.len();
    let alpha = &mut scratch.alpha;
    let beta = &mut scratch.beta;
    alpha.clear();
    alpha.resize((n + 1) * states, 0.0);
    beta.clear();
    beta.resize((n + 1) * states, 0.0);
    alpha[0] = 1.0;
    for j in 0..n {
        let p = bit_weights(apriori[j]);
        let h = columns[j] as usize;
        let (cur, next) = alpha.split_at_mut((j + 1) * states);
        let cur = &cur[j * states..];
        let next = &mut next[..states];
        let mut total = 0.0;
        for s in 0..states {
            let v = p[0] * cur[s] + p[1] * cur[s ^ h];
            next[s] = v;
            total += v;
        }
        if total > 0.0 {
            let inv = total.recip();
            next.iter_mut().for_each(|v| *v *= inv);
        }
    }
    beta[n * states] = 1.0;
    for j in (0..n).rev() {
        let p = bit_weights(apriori[j]);
        let h = columns[j] as usize;
        let (cur, next) = beta.split_at_mut((j + 1) * states);
        let cur = &mut cur[j * states..];
        let next = &next[..states];
        let a = &alpha[j * states..(j + 1) * states];
        let (mut e0, mut e1) = (0.0, 0.0);
        let mut total = 0.0;
        for s in 0..states {
            e0 += a[s] * next[s];
            e1 += a[s] * next[s ^ h];
            let v = p[0] * next[s] + p[1] * next[s ^ h];
            cur[s] = v;
            total += v;
        }
        if total > 0.0 {
            let inv = total.recip();
            cur.iter_mut().for_each(|v| *v *= inv);
        }
        extrinsic[j] = ratio(e0, e1);
        posterior[j] = ratio(p[0] * e0, p[1] * e1);
    }
}
